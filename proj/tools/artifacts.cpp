#include "artifacts.hpp"

#include "kickedxy/core.hpp"

#include <openssl/evp.h>

#include <array>
#include <cmath>
#include <cstdio>
#include <iomanip>
#include <sstream>

namespace kxy::cli {

std::string format_number(double value) {
  if (!std::isfinite(value)) return std::isnan(value) ? "nan" : (value > 0 ? "inf" : "-inf");
  if (value == std::trunc(value) && std::abs(value) < 1e15) {
    // Avoid "-0".
    return std::to_string(static_cast<long long>(value == 0.0 ? 0.0 : value));
  }
  std::array<char, 40> buf{};
  std::snprintf(buf.data(), buf.size(), "%.*g", kCsvDigits, value);
  return buf.data();
}

CsvWriter::CsvWriter(const std::filesystem::path& path, const std::vector<std::string>& columns)
    : path_(path), out_(path), columns_(columns.size()) {
  if (!out_) throw ConfigError("cannot write " + path.string());
  out_ << "# schema=" << kCsvSchema << '\n';
  for (std::size_t i = 0; i < columns.size(); ++i) out_ << (i ? "," : "") << columns[i];
  out_ << '\n';
}

void CsvWriter::separator() {
  if (field_ > 0) out_ << ',';
  ++field_;
}

CsvWriter& CsvWriter::operator<<(double value) {
  separator();
  out_ << format_number(value);
  return *this;
}

CsvWriter& CsvWriter::operator<<(int value) {
  separator();
  out_ << value;
  return *this;
}

CsvWriter& CsvWriter::operator<<(const std::string& value) {
  separator();
  out_ << value;
  return *this;
}

void CsvWriter::end_row() {
  if (field_ != columns_) {
    throw NumericError("row with " + std::to_string(field_) + " fields in " + path_.string());
  }
  out_ << '\n';
  field_ = 0;
  ++rows_;
}

void CsvWriter::close() {
  out_.close();
  if (!out_) throw ConfigError("failed writing " + path_.string());
}

std::string sha256_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigError("cannot read " + path.string());
  EVP_MD_CTX* ctx = EVP_MD_CTX_new();
  EVP_DigestInit_ex(ctx, EVP_sha256(), nullptr);
  std::array<char, 1 << 16> buf{};
  while (in) {
    in.read(buf.data(), buf.size());
    EVP_DigestUpdate(ctx, buf.data(), static_cast<std::size_t>(in.gcount()));
  }
  std::array<unsigned char, EVP_MAX_MD_SIZE> digest{};
  unsigned int len = 0;
  EVP_DigestFinal_ex(ctx, digest.data(), &len);
  EVP_MD_CTX_free(ctx);
  std::ostringstream hex;
  for (unsigned int i = 0; i < len; ++i) {
    hex << std::hex << std::setw(2) << std::setfill('0') << static_cast<int>(digest[i]);
  }
  return hex.str();
}

RunManifest::RunManifest(std::filesystem::path directory, std::string command)
    : directory_(std::move(directory)), command_(std::move(command)) {}

void RunManifest::add_output(const std::filesystem::path& file, int rows) {
  outputs_.emplace_back(file, rows);
}

nlohmann::json RunManifest::to_json() const {
  nlohmann::json j;
  j["tool"] = "kickedxy";
  j["tool_version"] = kToolVersion;
  j["command"] = command_;
  j["config"] = config_;
  j["seed"] = has_seed_ ? nlohmann::json(seed_) : nlohmann::json(nullptr);
  j["wall_time_seconds"] = wall_time_;
  j["outputs"] = nlohmann::json::array();
  for (const auto& [file, rows] : outputs_) {
    nlohmann::json o;
    o["file"] = std::filesystem::relative(file, directory_).generic_string();
    o["sha256"] = sha256_file(file);
    if (rows >= 0) o["rows"] = rows;
    j["outputs"].push_back(o);
  }
  for (const auto& item : extra_.items()) j[item.key()] = item.value();
  return j;
}

std::filesystem::path RunManifest::save() const {
  const auto path = directory_ / kManifestName;
  std::ofstream out(path);
  if (!out) throw ConfigError("cannot write " + path.string());
  out << to_json().dump(2) << '\n';
  return path;
}

void prepare_output_directory(const std::filesystem::path& directory) {
  std::error_code ec;
  if (std::filesystem::exists(directory, ec) && !std::filesystem::is_directory(directory, ec)) {
    throw ConfigError("output path " + directory.string() + " is not a directory");
  }
  std::filesystem::create_directories(directory, ec);
  if (ec) throw ConfigError("cannot create " + directory.string() + ": " + ec.message());
}

}  // namespace kxy::cli
