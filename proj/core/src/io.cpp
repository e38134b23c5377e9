#include "axda/io.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <sstream>

namespace axda {

CsvWriter::CsvWriter(const std::filesystem::path& path,
                     const std::vector<std::string>& header)
    : out_(path, std::ios::binary), columns_(header.size()) {
  if (!out_) throw ConfigError("cannot open output file " + path.string());
  for (std::size_t i = 0; i < header.size(); ++i) {
    if (i) out_ << ',';
    out_ << header[i];
  }
  out_ << '\n';
}

std::string format_double(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

void CsvWriter::row(std::span<const double> values) {
  if (values.size() != columns_)
    throw std::invalid_argument("CsvWriter: wrong number of columns");
  for (std::size_t i = 0; i < values.size(); ++i) {
    if (i) out_ << ',';
    out_ << format_double(values[i]);
  }
  out_ << '\n';
}

void CsvWriter::row(std::initializer_list<double> values) {
  row(std::span<const double>(values.begin(), values.size()));
}

namespace {

int next_pgm_token(std::istream& in) {
  // skips whitespace and '#' comments
  while (in) {
    int c = in.peek();
    if (c == '#') {
      std::string line;
      std::getline(in, line);
    } else if (std::isspace(c)) {
      in.get();
    } else {
      break;
    }
  }
  int v;
  if (!(in >> v)) throw ConfigError("malformed PGM header");
  return v;
}

}  // namespace

Pgm read_pgm(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigError("cannot open image " + path.string());
  std::string magic(2, '\0');
  in.read(magic.data(), 2);
  if (magic != "P5") throw ConfigError("not a binary (P5) PGM: " + path.string());
  Pgm img;
  img.width = next_pgm_token(in);
  img.height = next_pgm_token(in);
  int maxval = next_pgm_token(in);
  if (maxval != 255) throw ConfigError("only 8-bit PGM supported");
  in.get();  // single whitespace after maxval
  img.pixels.resize(static_cast<std::size_t>(img.width) * img.height);
  in.read(reinterpret_cast<char*>(img.pixels.data()),
          static_cast<std::streamsize>(img.pixels.size()));
  if (in.gcount() != static_cast<std::streamsize>(img.pixels.size()))
    throw ConfigError("truncated PGM payload");
  return img;
}

void write_pgm(const std::filesystem::path& path, const Pgm& img) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw ConfigError("cannot open output image " + path.string());
  out << "P5\n" << img.width << " " << img.height << "\n255\n";
  out.write(reinterpret_cast<const char*>(img.pixels.data()),
            static_cast<std::streamsize>(img.pixels.size()));
}

std::vector<double> pgm_to_unit(const Pgm& img) {
  std::vector<double> v(img.pixels.size());
  for (std::size_t i = 0; i < v.size(); ++i) v[i] = img.pixels[i] / 255.0;
  return v;
}

Pgm unit_to_pgm(int height, int width, std::span<const double> values) {
  Pgm img;
  img.height = height;
  img.width = width;
  img.pixels.resize(values.size());
  for (std::size_t i = 0; i < values.size(); ++i) {
    double v = std::clamp(values[i], 0.0, 1.0);
    img.pixels[i] = static_cast<std::uint8_t>(std::lround(v * 255.0));
  }
  return img;
}

namespace {

std::string trim(const std::string& s) {
  auto b = s.find_first_not_of(" \t\r\n");
  auto e = s.find_last_not_of(" \t\r\n");
  if (b == std::string::npos) return "";
  return s.substr(b, e - b + 1);
}

}  // namespace

Config Config::from_file(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config " + path.string());
  Config cfg;
  std::string line;
  while (std::getline(in, line)) {
    auto hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    line = trim(line);
    if (line.empty()) continue;
    cfg.set_from_assignment(line);
  }
  return cfg;
}

void Config::set(const std::string& key, const std::string& value) {
  kv_[key] = value;
}

void Config::set_from_assignment(const std::string& assignment) {
  auto eq = assignment.find('=');
  if (eq == std::string::npos)
    throw ConfigError("expected key=value, got '" + assignment + "'");
  std::string key = trim(assignment.substr(0, eq));
  std::string val = trim(assignment.substr(eq + 1));
  if (key.empty()) throw ConfigError("empty key in '" + assignment + "'");
  kv_[key] = val;
}

bool Config::has(const std::string& key) const { return kv_.count(key) > 0; }

std::string Config::get_string(const std::string& key,
                               const std::string& fallback) const {
  auto it = kv_.find(key);
  return it == kv_.end() ? fallback : it->second;
}

double Config::get_double(const std::string& key, double fallback) const {
  auto it = kv_.find(key);
  if (it == kv_.end()) return fallback;
  try {
    std::size_t pos;
    double v = std::stod(it->second, &pos);
    if (pos != it->second.size()) throw std::invalid_argument("");
    return v;
  } catch (...) {
    throw ConfigError("key '" + key + "': not a number: " + it->second);
  }
}

long Config::get_long(const std::string& key, long fallback) const {
  double v = get_double(key, static_cast<double>(fallback));
  long l = static_cast<long>(v);
  if (static_cast<double>(l) != v)
    throw ConfigError("key '" + key + "': expected an integer");
  return l;
}

std::uint64_t Config::get_seed(const std::string& key,
                               std::uint64_t fallback) const {
  auto it = kv_.find(key);
  if (it == kv_.end()) return fallback;
  try {
    return std::stoull(it->second);
  } catch (...) {
    throw ConfigError("key '" + key + "': not a valid seed");
  }
}

std::vector<double> Config::get_double_list(
    const std::string& key, const std::vector<double>& fallback) const {
  auto it = kv_.find(key);
  if (it == kv_.end()) return fallback;
  std::vector<double> out;
  std::stringstream ss(it->second);
  std::string tok;
  while (std::getline(ss, tok, ',')) {
    tok = trim(tok);
    if (tok.empty()) continue;
    try {
      out.push_back(std::stod(tok));
    } catch (...) {
      throw ConfigError("key '" + key + "': bad list entry: " + tok);
    }
  }
  if (out.empty()) throw ConfigError("key '" + key + "': empty list");
  return out;
}

std::vector<double> log_spaced(double lo, double hi, int count) {
  if (count == 1) {
    if (!(lo > 0) || !(hi >= lo))
      throw ConfigError("log grid needs 0 < min <= max");
    return {lo};
  }
  if (!(lo > 0) || !(hi > lo) || count < 1)
    throw ConfigError("log grid needs 0 < min < max and count >= 1");
  std::vector<double> g(count);
  double llo = std::log10(lo), lhi = std::log10(hi);
  for (int i = 0; i < count; ++i)
    g[i] = std::pow(10.0, llo + (lhi - llo) * i / (count - 1));
  return g;
}

std::vector<double> Config::get_log_grid(const std::string& key,
                                         double min_fallback,
                                         double max_fallback,
                                         int count_fallback) const {
  auto it = kv_.find(key);
  if (it == kv_.end())
    return log_spaced(min_fallback, max_fallback, count_fallback);
  std::stringstream ss(it->second);
  std::string a, b, c;
  if (!std::getline(ss, a, ':') || !std::getline(ss, b, ':') ||
      !std::getline(ss, c, ':'))
    throw ConfigError("key '" + key + "': expected min:max:count");
  try {
    return log_spaced(std::stod(a), std::stod(b), std::stoi(c));
  } catch (const ConfigError&) {
    throw;
  } catch (...) {
    throw ConfigError("key '" + key + "': expected min:max:count");
  }
}

void Config::require_known_keys(std::span<const std::string> allowed) const {
  for (const auto& [key, value] : kv_) {
    if (std::find(allowed.begin(), allowed.end(), key) == allowed.end())
      throw ConfigError("unknown config key '" + key + "'");
  }
}

}  // namespace axda
