#ifndef AXDA_IO_HPP
#define AXDA_IO_HPP

#include <cstdint>
#include <filesystem>
#include <fstream>
#include <map>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace axda {

// Raised for malformed configs, unknown keys and unreadable inputs
// (CLI exit code 2).
struct ConfigError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// CSV with a fixed header row; values serialized with 17 significant
// digits so identical runs diff byte-for-byte.
class CsvWriter {
 public:
  CsvWriter(const std::filesystem::path& path,
            const std::vector<std::string>& header);
  void row(std::span<const double> values);
  void row(std::initializer_list<double> values);

 private:
  std::ofstream out_;
  std::size_t columns_;
};

std::string format_double(double v);

// 8-bit binary (P5) PGM.
struct Pgm {
  int width = 0, height = 0;
  std::vector<std::uint8_t> pixels;  // row-major
};

Pgm read_pgm(const std::filesystem::path& path);
void write_pgm(const std::filesystem::path& path, const Pgm& img);

// Pixels in [0,1] <-> 8-bit gray.
std::vector<double> pgm_to_unit(const Pgm& img);
Pgm unit_to_pgm(int height, int width, std::span<const double> values);

// Flat key=value configuration ('#' starts a comment).  Experiments validate
// keys against a whitelist; unknown keys are errors.
class Config {
 public:
  static Config from_file(const std::filesystem::path& path);
  static Config empty() { return Config{}; }

  void set(const std::string& key, const std::string& value);
  void set_from_assignment(const std::string& assignment);  // "key=value"
  bool has(const std::string& key) const;

  std::string get_string(const std::string& key, const std::string& fallback) const;
  double get_double(const std::string& key, double fallback) const;
  long get_long(const std::string& key, long fallback) const;
  std::uint64_t get_seed(const std::string& key, std::uint64_t fallback) const;
  std::vector<double> get_double_list(const std::string& key,
                                      const std::vector<double>& fallback) const;
  // "min:max:count" -> log-spaced grid
  std::vector<double> get_log_grid(const std::string& key, double min_fallback,
                                   double max_fallback, int count_fallback) const;

  // Throws ConfigError if a key outside `allowed` is present.
  void require_known_keys(std::span<const std::string> allowed) const;

 private:
  std::map<std::string, std::string> kv_;
};

std::vector<double> log_spaced(double lo, double hi, int count);

}  // namespace axda

#endif
