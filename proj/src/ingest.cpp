#include "mfqp/ingest.hpp"

#include "mfqp/error.hpp"

#include <algorithm>
#include <charconv>
#include <chrono>
#include <cmath>
#include <fstream>
#include <string_view>

namespace mfqp {

namespace {

std::string_view trim(std::string_view s)
{
  constexpr std::string_view ws = " \t\r\n";
  const auto b = s.find_first_not_of(ws);
  if (b == std::string_view::npos)
    return {};
  const auto e = s.find_last_not_of(ws);
  s = s.substr(b, e - b + 1);
  if (s.size() >= 2 && s.front() == '"' && s.back() == '"')
    s = s.substr(1, s.size() - 2);
  return s;
}

std::vector<std::string_view> split(std::string_view line, char delim)
{
  std::vector<std::string_view> out;
  std::size_t start = 0;
  while (true) {
    const auto pos = line.find(delim, start);
    out.push_back(trim(line.substr(start, pos == std::string_view::npos ? pos : pos - start)));
    if (pos == std::string_view::npos)
      break;
    start = pos + 1;
  }
  return out;
}

std::string row_prefix(std::size_t row)
{
  return "row " + std::to_string(row) + ": ";
}

bool valid_iso_date(std::string_view s)
{
  if (s.size() < 10 || s[4] != '-' || s[7] != '-')
    return false;
  if (s.size() > 10 && s[10] != 'T' && s[10] != ' ')
    return false;
  int y = 0;
  unsigned m = 0;
  unsigned d = 0;
  auto num = [&](std::size_t off, std::size_t len, auto& out) {
    const auto* first = s.data() + off;
    const auto r = std::from_chars(first, first + len, out);
    return r.ec == std::errc{} && r.ptr == first + len;
  };
  if (!num(0, 4, y) || !num(5, 2, m) || !num(8, 2, d))
    return false;
  return std::chrono::year_month_day{std::chrono::year{y}, std::chrono::month{m},
                                     std::chrono::day{d}}
    .ok();
}

bool is_missing(std::string_view s)
{
  return s.empty() || s == "null" || s == "NULL" || s == "NaN" || s == "nan" || s == "NA";
}

} // namespace

ReadResult read_prices(const std::filesystem::path& path, const CsvSpec& spec)
{
  std::ifstream in(path);
  if (!in)
    throw Error(ErrorCode::io_error, "cannot open " + path.string());

  std::string line;
  if (!std::getline(in, line))
    throw Error(ErrorCode::parse_error, row_prefix(1) + "missing header in " + path.string());
  if (line.size() >= 3 && line.compare(0, 3, "\xEF\xBB\xBF") == 0)
    line.erase(0, 3);

  const auto header = split(line, spec.delimiter);
  auto column = [&](const std::string& name) {
    const auto it = std::find(header.begin(), header.end(), name);
    if (it == header.end())
      throw Error(ErrorCode::parse_error,
                  row_prefix(1) + "column '" + name + "' not found in header");
    return static_cast<std::size_t>(it - header.begin());
  };
  const std::size_t date_col = column(spec.date_column);
  const std::size_t close_col = column(spec.close_column);

  ReadResult result;
  result.prices.source_id = path.string();
  std::size_t row = 1;
  while (std::getline(in, line)) {
    ++row;
    if (trim(line).empty())
      continue;
    const auto fields = split(line, spec.delimiter);
    if (fields.size() <= std::max(date_col, close_col))
      throw Error(ErrorCode::parse_error,
                  row_prefix(row) + "expected at least " +
                    std::to_string(std::max(date_col, close_col) + 1) + " columns, found " +
                    std::to_string(fields.size()));

    const auto date = fields[date_col];
    if (!valid_iso_date(date))
      throw Error(ErrorCode::validation_error,
                  row_prefix(row) + "'" + std::string(date) + "' is not an ISO-8601 date");

    const auto raw = fields[close_col];
    if (is_missing(raw)) {
      if (spec.skip_missing) {
        result.skipped_rows.push_back(row);
        continue;
      }
      throw Error(ErrorCode::validation_error, row_prefix(row) + "missing close");
    }
    double close = 0.0;
    const auto r = std::from_chars(raw.data(), raw.data() + raw.size(), close);
    if (r.ec != std::errc{} || r.ptr != raw.data() + raw.size())
      throw Error(ErrorCode::parse_error,
                  row_prefix(row) + "column '" + spec.close_column + "': cannot parse '" +
                    std::string(raw) + "' as a number");
    if (!(close > 0.0) || !std::isfinite(close))
      throw Error(ErrorCode::validation_error,
                  row_prefix(row) + "close must be positive (got " + std::string(raw) + ")");

    auto& dates = result.prices.dates;
    if (!dates.empty()) {
      if (date == dates.back())
        throw Error(ErrorCode::validation_error,
                    row_prefix(row) + "duplicate date " + std::string(date));
      if (date < std::string_view(dates.back()))
        throw Error(ErrorCode::validation_error,
                    row_prefix(row) + "date " + std::string(date) + " precedes " + dates.back());
    }
    dates.emplace_back(date);
    result.prices.closes.push_back(close);
  }
  return result;
}

ReturnSeries log_returns(const PriceSeries& prices)
{
  if (prices.closes.size() < 2)
    throw Error(ErrorCode::length_too_short, "log returns need at least 2 prices");
  ReturnSeries out;
  out.source_id = prices.source_id;
  out.values.resize(prices.closes.size() - 1);
  for (std::size_t k = 0; k + 1 < prices.closes.size(); ++k)
    out.values[k] = std::log(prices.closes[k + 1] / prices.closes[k]);
  return out;
}

} // namespace mfqp
