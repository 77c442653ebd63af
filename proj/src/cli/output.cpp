#include "mfqp/cli/output.hpp"

#include "mfqp/error.hpp"

#include <array>
#include <charconv>
#include <chrono>
#include <cstdlib>
#include <ctime>

#ifndef MFQP_VERSION
#define MFQP_VERSION "0.0.0"
#endif

namespace mfqp::cli {

std::string format_double(double v)
{
  std::array<char, 32> buf{};
  const auto r = std::to_chars(buf.data(), buf.data() + buf.size(), v);
  return std::string(buf.data(), r.ptr);
}

CsvWriter::CsvWriter(const std::filesystem::path& path, const std::vector<std::string>& header)
  : out_(path, std::ios::binary)
  , path_(path)
{
  if (!out_)
    throw Error(ErrorCode::io_error, "cannot write " + path.string());
  for (const auto& h : header)
    add(std::string_view(h));
  end_row();
}

void CsvWriter::separator()
{
  if (!first_in_row_)
    out_ << ',';
  first_in_row_ = false;
}

CsvWriter& CsvWriter::add(double v)
{
  separator();
  out_ << format_double(v);
  return *this;
}

CsvWriter& CsvWriter::add(std::int64_t v)
{
  separator();
  out_ << v;
  return *this;
}

CsvWriter& CsvWriter::add(std::string_view v)
{
  separator();
  out_ << v;
  return *this;
}

void CsvWriter::end_row()
{
  out_ << '\n';
  first_in_row_ = true;
  if (!out_)
    throw Error(ErrorCode::io_error, "write failed for " + path_.string());
}

void write_json(const std::filesystem::path& path, const nlohmann::json& j)
{
  write_text(path, j.dump(2) + "\n");
}

void write_text(const std::filesystem::path& path, std::string_view text)
{
  std::ofstream out(path, std::ios::binary);
  out << text;
  if (!out)
    throw Error(ErrorCode::io_error, "cannot write " + path.string());
}

std::filesystem::path resolve_output_dir(const std::string& flag_value)
{
  std::filesystem::path dir;
  if (!flag_value.empty())
    dir = flag_value;
  else if (const char* env = std::getenv("MFQP_OUT_DIR"); env != nullptr && *env != '\0')
    dir = env;
  else
    dir = ".";
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  if (ec)
    throw Error(ErrorCode::io_error, "cannot create output directory " + dir.string());
  return dir;
}

RunManifest::RunManifest(std::string command, std::filesystem::path dir)
  : command_(std::move(command))
  , dir_(std::move(dir))
{}

std::filesystem::path RunManifest::artifact(const std::string& name)
{
  artifacts_.push_back(name);
  return dir_ / name;
}

std::filesystem::path RunManifest::write() const
{
  const auto now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  std::tm utc{};
  gmtime_r(&now, &utc);
  std::array<char, 32> stamp{};
  std::strftime(stamp.data(), stamp.size(), "%Y-%m-%dT%H:%M:%SZ", &utc);

  nlohmann::json j;
  j["command"] = command_;
  j["parameters"] = parameters_;
  j["seed"] = seed_ ? nlohmann::json(*seed_) : nlohmann::json(nullptr);
  auto listed = artifacts_;
  listed.push_back("manifest.json");
  j["artifacts"] = listed;
  j["tool_version"] = MFQP_VERSION;
  j["timestamp"] = stamp.data();
  const auto path = dir_ / "manifest.json";
  write_json(path, j);
  return path;
}

} // namespace mfqp::cli
