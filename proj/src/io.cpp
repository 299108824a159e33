#include "streamrec/io.hpp"

#include <charconv>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <stdexcept>

namespace streamrec {

namespace {

std::vector<std::string> split(const std::string& line) {
  std::vector<std::string> out;
  std::string cell;
  std::istringstream in(line);
  while (std::getline(in, cell, ',')) out.push_back(cell);
  if (!line.empty() && line.back() == ',') out.emplace_back();
  return out;
}

std::string strip(std::string s) {
  while (!s.empty() && (s.back() == '\r' || s.back() == ' ')) s.pop_back();
  std::size_t i = 0;
  while (i < s.size() && s[i] == ' ') ++i;
  return s.substr(i);
}

double parse_double(const std::string& s, const std::string& where) {
  const std::string t = strip(s);
  double v = 0.0;
  const auto res = std::from_chars(t.data(), t.data() + t.size(), v);
  if (res.ec != std::errc() || res.ptr != t.data() + t.size())
    throw std::runtime_error("cannot parse number '" + t + "' in " + where);
  return v;
}

long parse_long(const std::string& s, const std::string& where) {
  const std::string t = strip(s);
  long v = 0;
  const auto res = std::from_chars(t.data(), t.data() + t.size(), v);
  if (res.ec != std::errc() || res.ptr != t.data() + t.size())
    throw std::runtime_error("cannot parse integer '" + t + "' in " + where);
  return v;
}

std::vector<std::vector<std::string>> read_table(const std::string& path, const std::vector<std::string>& header) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open " + path);
  std::string line;
  if (!std::getline(in, line)) throw std::runtime_error(path + ": empty file");
  if (line.size() >= 3 && line.compare(0, 3, "\xEF\xBB\xBF") == 0) line = line.substr(3);
  auto cols = split(strip(line));
  for (auto& c : cols) c = strip(c);
  if (cols != header) {
    std::string want;
    for (const auto& h : header) want += (want.empty() ? "" : ",") + h;
    throw std::runtime_error(path + ": expected header '" + want + "'");
  }
  std::vector<std::vector<std::string>> rows;
  std::size_t number = 1;
  while (std::getline(in, line)) {
    ++number;
    if (strip(line).empty()) continue;
    auto cells = split(strip(line));
    if (cells.size() != header.size())
      throw std::runtime_error(path + ":" + std::to_string(number) + ": expected " + std::to_string(header.size()) +
                               " fields");
    rows.push_back(std::move(cells));
  }
  return rows;
}

}  // namespace

std::string format_double(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

SampleStream read_samples_csv(const std::string& path) {
  SampleStream out;
  for (const auto& row : read_table(path, {"t", "y"})) out.push_back({parse_double(row[0], path), parse_double(row[1], path)});
  return out;
}

std::string samples_csv(const SampleStream& samples) {
  std::string s = "t,y\n";
  for (const auto& p : samples) s += format_double(p.t) + "," + format_double(p.y) + "\n";
  return s;
}

void write_samples_csv(const std::string& path, const SampleStream& samples) { write_text(path, samples_csv(samples)); }

std::string coefficients_csv(const std::map<long, Vector>& coefficients) {
  std::string s = "k,n,alpha_star\n";
  for (const auto& [k, v] : coefficients)
    for (std::size_t n = 0; n < v.size(); ++n) s += std::to_string(k) + "," + std::to_string(n + 1) + "," + format_double(v[n]) + "\n";
  return s;
}

std::map<long, Vector> read_coefficients_csv(const std::string& path) {
  std::map<long, Vector> out;
  for (const auto& row : read_table(path, {"k", "n", "alpha_star"})) {
    const long k = parse_long(row[0], path);
    const long n = parse_long(row[1], path);
    auto& v = out[k];
    if (n != static_cast<long>(v.size()) + 1) throw std::runtime_error(path + ": coefficients must be listed in order");
    v.push_back(parse_double(row[2], path));
  }
  return out;
}

std::string estimates_csv(const EstimateHistory& history) {
  std::string s = "k,K,n,alpha\n";
  for (const auto& [key, v] : history.snapshots())
    for (std::size_t n = 0; n < v.size(); ++n)
      s += std::to_string(key.first) + "," + std::to_string(key.second) + "," + std::to_string(n + 1) + "," +
           format_double(v[n]) + "\n";
  return s;
}

void write_text(const std::string& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write " + path);
  out << text;
}

std::string read_text(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot read " + path);
  std::stringstream buffer;
  buffer << in.rdbuf();
  return buffer.str();
}

}  // namespace streamrec
