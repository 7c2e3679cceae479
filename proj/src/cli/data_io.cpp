#include "addcomp/cli.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <istream>
#include <optional>
#include <sstream>

namespace addcomp::cli {

namespace {

std::vector<std::string> tokenize(const std::string& line, char delimiter) {
  std::vector<std::string> fields;
  if (delimiter == ' ') {
    std::istringstream in(line);
    std::string f;
    while (in >> f) fields.push_back(f);
    return fields;
  }
  std::string f;
  std::istringstream in(line);
  while (std::getline(in, f, delimiter)) {
    const auto a = f.find_first_not_of(" \t\r");
    const auto b = f.find_last_not_of(" \t\r");
    fields.push_back(a == std::string::npos ? std::string{} : f.substr(a, b - a + 1));
  }
  if (!line.empty() && line.back() == delimiter) fields.emplace_back();
  return fields;
}

bool skippable(const std::string& line) {
  const auto first = line.find_first_not_of(" \t\r");
  return first == std::string::npos || line[first] == '#';
}

}  // namespace

Observations read_observations(std::istream& in) {
  std::string line;
  int number = 0;
  while (std::getline(in, line)) {
    ++number;
    if (!skippable(line)) break;
  }
  if (skippable(line)) throw DataError("input has no header row");

  const char delimiter = line.find('\t') != std::string::npos   ? '\t'
                         : line.find(',') != std::string::npos ? ','
                                                               : ' ';
  const auto header = tokenize(line, delimiter);
  std::optional<std::size_t> x_col, z_col;
  std::map<int, std::size_t> y_cols;
  for (std::size_t c = 0; c < header.size(); ++c) {
    const std::string& name = header[c];
    if (name == "x") {
      x_col = c;
    } else if (name == "z") {
      z_col = c;
    } else if (name.size() > 1 && name[0] == 'y') {
      int j = 0;
      auto [ptr, ec] = std::from_chars(name.data() + 1, name.data() + name.size(), j);
      if (ec != std::errc() || ptr != name.data() + name.size() || j < 1) {
        throw DataError("line " + std::to_string(number) + ": unexpected column '" + name + "'");
      }
      y_cols[j] = c;
    } else {
      throw DataError("line " + std::to_string(number) + ": unexpected column '" + name + "'");
    }
  }
  if (!x_col) throw DataError("missing column 'x'");
  if (!z_col) throw DataError("missing column 'z'");
  const int K = static_cast<int>(y_cols.size());
  for (int j = 1; j <= K; ++j) {
    if (!y_cols.count(j)) throw DataError("missing column 'y" + std::to_string(j) + "'");
  }

  std::vector<double> xs, zs;
  std::vector<std::vector<double>> ys(static_cast<std::size_t>(K));
  while (std::getline(in, line)) {
    ++number;
    if (skippable(line)) continue;
    const auto fields = tokenize(line, delimiter);
    if (fields.size() != header.size()) {
      throw DataError("line " + std::to_string(number) + ": expected " +
                      std::to_string(header.size()) + " fields, found " +
                      std::to_string(fields.size()));
    }
    auto value = [&](std::size_t c) {
      double v = 0.0;
      const std::string& f = fields[c];
      auto [ptr, ec] = std::from_chars(f.data(), f.data() + f.size(), v);
      if (f.empty() || ec != std::errc() || ptr != f.data() + f.size() || !std::isfinite(v)) {
        throw DataError("line " + std::to_string(number) + ": column '" + header[c] +
                        "' is not a number: '" + f + "'");
      }
      return v;
    };
    auto covariate = [&](std::size_t c) {
      const double v = value(c);
      if (v < 0.0 || v > 1.0) {
        throw DataError("line " + std::to_string(number) + ": column '" + header[c] +
                        "' value " + fields[c] + " is outside [0,1]");
      }
      return v;
    };
    xs.push_back(covariate(*x_col));
    for (int j = 1; j <= K; ++j) ys[static_cast<std::size_t>(j - 1)].push_back(covariate(y_cols[j]));
    zs.push_back(value(*z_col));
  }
  if (xs.empty()) throw DataError("input has no data rows");

  Observations obs;
  const auto n = static_cast<Eigen::Index>(xs.size());
  obs.design.x = Eigen::Map<const Vec>(xs.data(), n);
  obs.z = Eigen::Map<const Vec>(zs.data(), n);
  obs.design.y.resize(n, K);
  for (int j = 0; j < K; ++j) {
    obs.design.y.col(j) = Eigen::Map<const Vec>(ys[static_cast<std::size_t>(j)].data(), n);
  }
  return obs;
}

Observations read_observations(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot open data file " + path.string());
  return read_observations(in);
}

}  // namespace addcomp::cli
