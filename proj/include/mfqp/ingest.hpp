#pragma once

#include "mfqp/empirical.hpp"

#include <filesystem>
#include <string>
#include <vector>

namespace mfqp {

//! Daily close prices in trading-day order.
struct PriceSeries
{
  std::vector<std::string> dates; //!< ISO-8601, strictly increasing
  std::vector<double> closes;     //!< all > 0
  std::string source_id;
};

//! CSV layout: UTF-8, header row, named columns, '.' decimal point.
//! Columns other than the two named ones are ignored.
struct CsvSpec
{
  std::string date_column = "date";
  std::string close_column = "close";
  char delimiter = ',';
  //! Drop rows whose close is empty or a null token (null, NaN, NA) instead
  //! of failing; their row numbers are reported in `skipped_rows`. Text that
  //! is present but not a number is still a parse error.
  bool skip_missing = false;
};

struct ReadResult
{
  PriceSeries prices;
  std::vector<std::size_t> skipped_rows; //!< 1-based file line numbers
};

//! Throws Error(io_error), Error(parse_error) naming row and column, or
//! Error(validation_error) naming the row (nonpositive close, bad or
//! out-of-order or duplicate date).
ReadResult read_prices(const std::filesystem::path& path, const CsvSpec& spec = {});

//! r[k] = ln(close[k+1] / close[k]); not normalized. Throws
//! Error(length_too_short) below 2 prices.
ReturnSeries log_returns(const PriceSeries& prices);

} // namespace mfqp
