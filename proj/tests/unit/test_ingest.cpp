#include "mfqp/error.hpp"
#include "mfqp/ingest.hpp"

#include <doctest.h>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <string>

#include <unistd.h>

using namespace mfqp;

namespace {

class TempCsv
{
public:
  explicit TempCsv(const std::string& text)
  {
    static int counter = 0;
    path_ = std::filesystem::temp_directory_path() /
            ("mfqp_ingest_" + std::to_string(::getpid()) + "_" + std::to_string(counter++) + ".csv");
    std::ofstream(path_, std::ios::binary) << text;
  }
  ~TempCsv() { std::filesystem::remove(path_); }
  const std::filesystem::path& path() const { return path_; }

private:
  std::filesystem::path path_;
};

Error error_of(auto fn)
{
  try {
    fn();
  } catch (const Error& e) {
    return e;
  }
  FAIL("no error thrown");
  return Error(ErrorCode::io_error, "");
}

} // namespace

TEST_SUITE("read_prices")
{
  TEST_CASE("two rows")
  {
    const TempCsv f("date,close\n2020-01-02,100\n2020-01-03,101.5\n");
    const auto r = read_prices(f.path());
    REQUIRE(r.prices.closes.size() == 2);
    CHECK(r.prices.dates[0] == "2020-01-02");
    CHECK(r.prices.dates[1] == "2020-01-03");
    CHECK(r.prices.closes[0] == 100.0);
    CHECK(r.prices.closes[1] == 101.5);
    CHECK(r.skipped_rows.empty());
    CHECK(r.prices.source_id == f.path().string());
  }

  TEST_CASE("extra columns, custom names and delimiter")
  {
    const TempCsv f("Open;Date;Adj Close\n1;2021-03-01;10\n2;2021-03-02;11\n");
    CsvSpec spec;
    spec.date_column = "Date";
    spec.close_column = "Adj Close";
    spec.delimiter = ';';
    const auto r = read_prices(f.path(), spec);
    REQUIRE(r.prices.closes.size() == 2);
    CHECK(r.prices.closes[1] == 11.0);
  }

  TEST_CASE("byte order mark and CRLF line endings")
  {
    const TempCsv f("\xEF\xBB\xBF" "date,close\r\n2020-01-02,100\r\n2020-01-03,99\r\n");
    const auto r = read_prices(f.path());
    REQUIRE(r.prices.closes.size() == 2);
    CHECK(r.prices.closes[1] == 99.0);
  }

  TEST_CASE("nonpositive close names the row")
  {
    const TempCsv f("date,close\n2020-01-02,100\n2020-01-03,-5\n");
    const auto e = error_of([&] { read_prices(f.path()); });
    CHECK(e.code() == ErrorCode::validation_error);
    CHECK(std::string(e.what()).find("row 3") != std::string::npos);
  }

  TEST_CASE("dates out of order")
  {
    const TempCsv f("date,close\n2020-01-03,100\n2020-01-02,101\n");
    const auto e = error_of([&] { read_prices(f.path()); });
    CHECK(e.code() == ErrorCode::validation_error);
    CHECK(std::string(e.what()).find("row 3") != std::string::npos);
  }

  TEST_CASE("duplicate date")
  {
    const TempCsv f("date,close\n2020-01-02,100\n2020-01-02,101\n");
    const auto e = error_of([&] { read_prices(f.path()); });
    CHECK(e.code() == ErrorCode::validation_error);
    CHECK(std::string(e.what()).find("duplicate") != std::string::npos);
  }

  TEST_CASE("invalid calendar date")
  {
    const TempCsv f("date,close\n2020-02-30,100\n");
    CHECK(error_of([&] { read_prices(f.path()); }).code() == ErrorCode::validation_error);
  }

  TEST_CASE("missing close fails unless skipping is requested")
  {
    const TempCsv f("date,close\n2020-01-02,100\n2020-01-03,\n2020-01-06,null\n2020-01-07,102\n");
    const auto e = error_of([&] { read_prices(f.path()); });
    CHECK(e.code() == ErrorCode::validation_error);
    CHECK(std::string(e.what()).find("row 3") != std::string::npos);

    CsvSpec spec;
    spec.skip_missing = true;
    const auto r = read_prices(f.path(), spec);
    REQUIRE(r.prices.closes.size() == 2);
    CHECK(r.prices.closes[1] == 102.0);
    CHECK(r.skipped_rows == std::vector<std::size_t>{3, 4});
  }

  TEST_CASE("non-numeric close is a parse error naming row and column")
  {
    const TempCsv f("date,close\n2020-01-02,100\n2020-01-03,abc\n");
    CsvSpec spec;
    spec.skip_missing = true;
    const auto e = error_of([&] { read_prices(f.path(), spec); });
    CHECK(e.code() == ErrorCode::parse_error);
    const std::string msg = e.what();
    CHECK(msg.find("row 3") != std::string::npos);
    CHECK(msg.find("close") != std::string::npos);
  }

  TEST_CASE("missing column, short row, missing file")
  {
    const TempCsv a("date,price\n2020-01-02,100\n");
    CHECK(error_of([&] { read_prices(a.path()); }).code() == ErrorCode::parse_error);
    const TempCsv b("date,close\n2020-01-02\n");
    CHECK(error_of([&] { read_prices(b.path()); }).code() == ErrorCode::parse_error);
    CHECK(error_of([&] { read_prices("/nonexistent/prices.csv"); }).code() == ErrorCode::io_error);
  }
}

TEST_SUITE("log_returns")
{
  TEST_CASE("examples")
  {
    PriceSeries p{{"2020-01-02", "2020-01-03"}, {100.0, 105.0}, "x"};
    const auto r = log_returns(p);
    REQUIRE(r.values.size() == 1);
    CHECK(r.values[0] == doctest::Approx(0.048790).epsilon(1e-5));
    CHECK(r.values[0] == std::log(105.0 / 100.0));
    CHECK_FALSE(r.normalized);
    CHECK(r.source_id == "x");

    PriceSeries q{{"a", "b", "c"}, {100.0, 105.0, 105.0}, "y"};
    const auto s = log_returns(q);
    REQUIRE(s.values.size() == 2);
    CHECK(s.values[0] == doctest::Approx(0.048790).epsilon(1e-5));
    CHECK(s.values[1] == 0.0);
  }

  TEST_CASE("constant closes give zero returns")
  {
    PriceSeries p{{"a", "b", "c", "d"}, {7.25, 7.25, 7.25, 7.25}, ""};
    for (double v : log_returns(p).values)
      CHECK(v == 0.0);
  }

  TEST_CASE("cumulative returns reconstruct the prices")
  {
    PriceSeries p;
    double c = 250.0;
    for (int i = 0; i < 500; ++i) {
      p.dates.push_back(std::to_string(i));
      p.closes.push_back(c);
      c *= std::exp(0.01 * std::sin(0.37 * i) + 0.002);
    }
    const auto r = log_returns(p);
    double acc = std::log(p.closes[0]);
    for (std::size_t k = 0; k < r.values.size(); ++k) {
      acc += r.values[k];
      CHECK(std::exp(acc) == doctest::Approx(p.closes[k + 1]).epsilon(1e-12));
    }
  }

  TEST_CASE("too short")
  {
    PriceSeries p{{"a"}, {1.0}, ""};
    CHECK(error_of([&] { log_returns(p); }).code() == ErrorCode::length_too_short);
  }
}
