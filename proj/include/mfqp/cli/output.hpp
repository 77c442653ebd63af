#pragma once

#include <json.hpp>

#include <cstdint>
#include <filesystem>
#include <fstream>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace mfqp::cli {

//! Shortest decimal text that parses back to the same double.
std::string format_double(double v);

//! Row-oriented CSV output with round-trip number formatting.
class CsvWriter
{
public:
  CsvWriter(const std::filesystem::path& path, const std::vector<std::string>& header);

  CsvWriter& add(double v);
  CsvWriter& add(std::int64_t v);
  CsvWriter& add(std::size_t v) { return add(static_cast<std::int64_t>(v)); }
  CsvWriter& add(int v) { return add(static_cast<std::int64_t>(v)); }
  CsvWriter& add(std::string_view v);
  void end_row();

private:
  void separator();

  std::ofstream out_;
  std::filesystem::path path_;
  bool first_in_row_ = true;
};

void write_json(const std::filesystem::path& path, const nlohmann::json& j);
void write_text(const std::filesystem::path& path, std::string_view text);

//! Output directory: explicit flag, else $MFQP_OUT_DIR, else ".".
std::filesystem::path resolve_output_dir(const std::string& flag_value);

//! Per-invocation provenance record written as manifest.json.
class RunManifest
{
public:
  RunManifest(std::string command, std::filesystem::path dir);

  nlohmann::json& parameters() { return parameters_; }
  void set_seed(std::uint64_t seed) { seed_ = seed; }

  //! Path for a named artifact inside the output directory, recorded in the
  //! manifest's artifact list.
  std::filesystem::path artifact(const std::string& name);

  std::filesystem::path write() const;

private:
  std::string command_;
  std::filesystem::path dir_;
  nlohmann::json parameters_ = nlohmann::json::object();
  std::optional<std::uint64_t> seed_;
  std::vector<std::string> artifacts_;
};

} // namespace mfqp::cli
