#pragma once

#include <json.hpp>

#include <filesystem>
#include <fstream>
#include <initializer_list>
#include <string>
#include <vector>

namespace kxy::cli {

inline constexpr int kCsvSchema = 1;
inline constexpr int kCsvDigits = 12;

/// Formats a double with 12 significant digits. Integers print as integers
/// so CSVs diff cleanly.
std::string format_number(double value);

class CsvWriter {
 public:
  CsvWriter(const std::filesystem::path& path, const std::vector<std::string>& columns);

  CsvWriter& operator<<(double value);
  CsvWriter& operator<<(int value);
  CsvWriter& operator<<(const std::string& value);
  void end_row();
  void close();

  const std::filesystem::path& path() const { return path_; }
  int rows() const { return rows_; }

 private:
  void separator();

  std::filesystem::path path_;
  std::ofstream out_;
  std::size_t columns_ = 0;
  std::size_t field_ = 0;
  int rows_ = 0;
};

/// Lowercase hex SHA-256 of a file's bytes.
std::string sha256_file(const std::filesystem::path& path);

/// One manifest.json per output directory. Every file written through the
/// command is registered here, hashed when the manifest is saved.
class RunManifest {
 public:
  RunManifest(std::filesystem::path directory, std::string command);

  void set_config(nlohmann::json config) { config_ = std::move(config); }
  void set_seed(std::uint64_t seed) { seed_ = seed; has_seed_ = true; }
  void set_wall_time(double seconds) { wall_time_ = seconds; }
  void add_output(const std::filesystem::path& file, int rows = -1);
  void set_extra(const std::string& key, nlohmann::json value) { extra_[key] = std::move(value); }

  nlohmann::json to_json() const;
  std::filesystem::path save() const;

 private:
  std::filesystem::path directory_;
  std::string command_;
  nlohmann::json config_ = nlohmann::json::object();
  nlohmann::json extra_ = nlohmann::json::object();
  std::uint64_t seed_ = 0;
  bool has_seed_ = false;
  double wall_time_ = 0.0;
  std::vector<std::pair<std::filesystem::path, int>> outputs_;
};

inline constexpr const char* kManifestName = "manifest.json";
inline constexpr const char* kToolVersion = "1.0.0";

/// Creates the directory when missing; refuses a path that is a file.
void prepare_output_directory(const std::filesystem::path& directory);

}  // namespace kxy::cli
