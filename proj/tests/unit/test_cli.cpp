#include "mfqp/cascade.hpp"
#include "mfqp/numerics/grid.hpp"
#include "mfqp/numerics/random.hpp"
#include "support/cli_harness.hpp"

#include <doctest.h>
#include <json.hpp>

#include <chrono>
#include <cmath>
#include <cstdio>
#include <set>

using namespace mfqp;
using mfqp::testing::CsvTable;
using mfqp::testing::TempDir;
using mfqp::testing::artifact_bytes;
using mfqp::testing::read_file;
using mfqp::testing::run_cli;
using nlohmann::json;

namespace {

json read_json(const std::filesystem::path& path)
{
  return json::parse(read_file(path));
}

std::string iso_date(std::chrono::sys_days day)
{
  const std::chrono::year_month_day ymd{day};
  char buf[16];
  std::snprintf(buf, sizeof buf, "%04d-%02u-%02u", static_cast<int>(ymd.year()),
                static_cast<unsigned>(ymd.month()), static_cast<unsigned>(ymd.day()));
  return buf;
}

//! Geometric Gaussian price walk written as a date,close CSV.
void write_gaussian_prices(const std::filesystem::path& path, std::size_t n_returns, std::uint64_t seed)
{
  const auto z = gaussian_stream({seed, 77}, n_returns);
  std::ofstream out(path);
  out << "date,close\n";
  auto day = std::chrono::sys_days{std::chrono::year{1700} / 1 / 1};
  double log_price = std::log(100.0);
  out.precision(17);
  out << iso_date(day) << ',' << std::exp(log_price) << '\n';
  for (double v : z) {
    day += std::chrono::days{1};
    log_price += 0.01 * v;
    out << iso_date(day) << ',' << std::exp(log_price) << '\n';
  }
}

} // namespace

TEST_SUITE("pdf")
{
  TEST_CASE("values equal the library exactly")
  {
    for (double lambda : {0.0, 0.5}) {
      TempDir dir("cli_pdf");
      const auto r = run_cli({"pdf", "--lambda", lambda == 0.0 ? "0" : "0.5", "--sigma0", "1",
                              "--x-min", "-6", "--x-max", "6", "--n", "241", "--out", dir.str()});
      REQUIRE(r.code == 0);
      const CsvTable t(dir / "pdf.csv");
      CHECK(t.names() == std::vector<std::string>{"x", "p"});
      const Grid grid(-6.0, 6.0, 241);
      const auto p = castaing_pdf({lambda, 1.0}, grid);
      REQUIRE(t.rows() == grid.size());
      for (std::size_t i = 0; i < grid.size(); ++i) {
        CHECK(t["x"][i] == grid[i]);
        CHECK(t["p"][i] == p[i]);
      }
    }
  }

  TEST_CASE("negative lambda is a usage error naming the flag")
  {
    TempDir dir("cli_pdf_bad");
    const auto r = run_cli({"pdf", "--lambda", "-1", "--out", dir.str()});
    CHECK(r.code == 2);
    CHECK(r.err.find("--lambda") != std::string::npos);
  }

  TEST_CASE("unknown subcommand and no arguments")
  {
    CHECK(run_cli({"frobnicate"}).code == 2);
    CHECK(run_cli({}).code == 2);
  }
}

TEST_SUITE("qpotential")
{
  TEST_CASE("gaussian potential is x^2 - 1")
  {
    TempDir dir("cli_qp");
    const auto r = run_cli({"qpotential", "--lambda", "0", "--x-min", "-5", "--x-max", "5",
                            "--n", "1001", "--out", dir.str()});
    REQUIRE(r.code == 0);
    const CsvTable t(dir / "qp.csv");
    CHECK(t.names() == std::vector<std::string>{"x", "u", "masked"});
    for (std::size_t i = 0; i < t.rows(); ++i) {
      const double x = t["x"][i];
      CHECK(std::abs(t["u"][i] - (x * x - 1.0)) <= 1e-9);
      CHECK(t["masked"][i] == 0.0);
    }
    const auto s = read_json(dir / "qp_summary.json");
    CHECK(s["barrier"] == false);
  }

  TEST_CASE("lambda 0.9 flags a barrier")
  {
    TempDir dir("cli_qp_barrier");
    const auto r = run_cli({"qpotential", "--lambda", "0.9", "--x-min", "-10", "--x-max", "10",
                            "--n", "2001", "--out", dir.str()});
    REQUIRE(r.code == 0);
    const auto s = read_json(dir / "qp_summary.json");
    CHECK(s["barrier"] == true);
    REQUIRE(s["local_maxima"].size() == 1);
    CHECK(s["local_maxima"][0]["x"].get<double>() == doctest::Approx(0.386).epsilon(0.02));
  }

  TEST_CASE("missing lambda")
  {
    TempDir dir("cli_qp_missing");
    CHECK(run_cli({"qpotential", "--out", dir.str()}).code == 2);
  }
}

TEST_SUITE("synth")
{
  TEST_CASE("figure configuration, determinism and bad hurst")
  {
    TempDir a("cli_synth_a"), b("cli_synth_b");
    const std::vector<std::string> args{"synth", "--lambda", "0.3", "--hurst", "0.6", "--L", "2000",
                                        "--n", "100000", "--seed", "7"};
    auto with_out = [&](const TempDir& d) {
      auto v = args;
      v.push_back("--out");
      v.push_back(d.str());
      return v;
    };
    REQUIRE(run_cli(with_out(a)).code == 0);
    REQUIRE(run_cli(with_out(b)).code == 0);
    const CsvTable t(a / "path.csv");
    CHECK(t.names() == std::vector<std::string>{"t", "x", "dx"});
    CHECK(t.rows() == 100000);
    CHECK(t["t"].front() == 1.0);
    CHECK(t["x"].front() == t["dx"].front());
    CHECK(read_file(a / "path.csv") == read_file(b / "path.csv"));
    const auto m = read_json(a / "manifest.json");
    CHECK(m["seed"] == 7);

    TempDir c("cli_synth_bad");
    const auto bad = run_cli({"synth", "--hurst", "1.5", "--out", c.str()});
    CHECK(bad.code == 2);
    CHECK(bad.err.find("--hurst") != std::string::npos);
  }
}

TEST_SUITE("mfa")
{
  TEST_CASE("exact power-law fixture")
  {
    TempDir dir("cli_mfa");
    {
      std::ofstream f(dir / "line.csv");
      f << "t,x\n";
      for (int t = 0; t <= 4096; ++t)
        f << t << ',' << 0.5 * t << '\n';
    }
    const auto r = run_cli({"mfa", "--input", (dir / "line.csv").string(), "--column", "x", "--levels",
                            "--tau-min", "1", "--tau-max", "64", "--fit-min", "1", "--fit-max", "64",
                            "--out", dir.str()});
    REQUIRE(r.code == 0);
    const CsvTable xi(dir / "xi.csv");
    REQUIRE(xi.rows() > 0);
    for (std::size_t i = 0; i < xi.rows(); ++i)
      CHECK(std::abs(xi["xi"][i] - xi["q"][i]) <= 1e-10);
    const CsvTable sf(dir / "sf.csv");
    for (std::size_t i = 0; i < sf.rows(); ++i)
      CHECK(sf["m"][i] == doctest::Approx(std::pow(0.5 * sf["tau"][i], sf["q"][i])).epsilon(1e-12));
    const auto fit = read_json(dir / "fit.json");
    CHECK(std::abs(fit["h_hat"].get<double>() - 1.0) <= 1e-10);
    CHECK(fit["lambda_hat"].get<double>() == 0.0);
    CHECK(fit["flags"]["monofractal"] == true);
  }

  TEST_CASE("series shorter than the largest lag")
  {
    TempDir dir("cli_mfa_short");
    {
      std::ofstream f(dir / "short.csv");
      f << "dx\n";
      for (int t = 0; t < 50; ++t)
        f << (t % 3) - 1 << '\n';
    }
    const auto r = run_cli({"mfa", "--input", (dir / "short.csv").string(), "--tau-min", "1",
                            "--tau-max", "200", "--fit-min", "1", "--fit-max", "200", "--out", dir.str()});
    CHECK(r.code == 1);
    CHECK(r.err.find("insufficient-data") != std::string::npos);
  }
}

TEST_SUITE("analyze")
{
  TEST_CASE("gaussian price walk")
  {
    TempDir dir("cli_analyze");
    write_gaussian_prices(dir / "prices.csv", 100000, 1);
    const auto r = run_cli({"analyze", "--prices", (dir / "prices.csv").string(), "--out", dir.str()});
    REQUIRE(r.code == 0);
    const auto rep = read_json(dir / "report.json");
    CHECK(rep["schema_version"] == 1);
    CHECK(rep["n_returns"] == 100000);
    CHECK(rep["castaing_mle"]["lambda"].get<double>() <= 0.05);
    CHECK(rep["monofractal"] == true);
    for (const char* f : {"returns.csv", "kde.csv", "qp.csv", "sf.csv", "xi.csv"})
      CHECK(std::filesystem::exists(dir / f));
  }

  TEST_CASE("malformed csv reports the row")
  {
    TempDir dir("cli_analyze_bad");
    {
      std::ofstream f(dir / "bad.csv");
      f << "date,close\n2020-01-02,100\n2020-01-03,oops\n";
    }
    const auto r = run_cli({"analyze", "--prices", (dir / "bad.csv").string(), "--out", dir.str()});
    CHECK(r.code == 1);
    CHECK(r.err.find("row 3") != std::string::npos);
  }
}

TEST_SUITE("reproduce")
{
  TEST_CASE("fig1 tail ordering and curve count")
  {
    TempDir dir("cli_fig1");
    const auto r = run_cli({"reproduce", "fig1", "--out", dir.str()});
    REQUIRE(r.code == 0);
    const auto s = read_json(dir / "fig1_summary.json");
    CHECK(s["tail_ordering_holds"] == true);
    CHECK(s["curves"].size() == 4);
    const CsvTable a(dir / "fig1a.csv");
    CHECK(a.names().size() == 5);
    const CsvTable b(dir / "fig1b.csv");
    CHECK(b.names().size() == 9);
  }

  TEST_CASE("fig2 without data prints a notice and lists every artifact")
  {
    TempDir dir("cli_fig2");
    const auto r = run_cli({"reproduce", "fig2", "--seed", "7", "--out", dir.str()});
    REQUIRE(r.code == 0);
    CHECK(r.out.find("notice: no --data") != std::string::npos);
    CHECK(std::filesystem::exists(dir / "fig2_toy_path.csv"));
    CHECK_FALSE(std::filesystem::exists(dir / "fig2_data_report.json"));

    const auto m = read_json(dir / "manifest.json");
    std::set<std::string> listed;
    for (const auto& a : m["artifacts"])
      listed.insert(a.get<std::string>());
    std::set<std::string> present;
    for (const auto& e : std::filesystem::directory_iterator(dir.path()))
      present.insert(e.path().filename().string());
    CHECK(listed == present);
  }
}

TEST_SUITE("threads")
{
  TEST_CASE("outputs do not depend on the thread count")
  {
    TempDir one("cli_threads_1"), four("cli_threads_4");
    for (const auto* d : {&one, &four}) {
      const std::string threads = d == &one ? "1" : "4";
      REQUIRE(run_cli({"synth", "--n", "20000", "--L", "500", "--seed", "3", "--threads", threads,
                       "--out", d->str()})
                .code == 0);
      REQUIRE(run_cli({"mfa", "--input", (d->path() / "path.csv").string(), "--threads", threads,
                       "--out", d->str()})
                .code == 0);
      REQUIRE(run_cli({"qpotential", "--lambda", "0.5", "--threads", threads, "--out", d->str()}).code == 0);
    }
    const auto a = artifact_bytes(one.path());
    const auto b = artifact_bytes(four.path());
    CHECK(a.size() >= 5);
    CHECK(a == b);
  }
}
