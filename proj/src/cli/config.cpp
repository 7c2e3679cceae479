#include "addcomp/cli.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <istream>
#include <sstream>

namespace addcomp::cli {

namespace {

std::string trim(const std::string& s) {
  const auto first = s.find_first_not_of(" \t\r");
  if (first == std::string::npos) return {};
  const auto last = s.find_last_not_of(" \t\r");
  return s.substr(first, last - first + 1);
}

std::vector<std::string> split(const std::string& s, char sep) {
  std::vector<std::string> parts;
  std::string item;
  std::istringstream in(s);
  while (std::getline(in, item, sep)) parts.push_back(trim(item));
  return parts;
}

template <class T>
T parse_number(const std::string& text, const char* what) {
  T value{};
  const auto* begin = text.data();
  const auto* end = text.data() + text.size();
  auto [ptr, ec] = std::from_chars(begin, end, value);
  if (ec != std::errc() || ptr != end || text.empty()) {
    throw UsageError(std::string("invalid ") + what + " '" + text + "'");
  }
  return value;
}

}  // namespace

const std::vector<std::string>& known_keys() {
  static const std::vector<std::string> keys{
      "n",    "K",     "s",       "t",     "sigma2", "variance", "collection", "C",
      "C-grid", "reps", "seed",   "noise", "threads", "out"};
  return keys;
}

Settings parse_config(std::istream& in, const std::string& origin) {
  Settings settings;
  std::string line;
  int number = 0;
  while (std::getline(in, line)) {
    ++number;
    if (const auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos) {
      throw UsageError(origin + ":" + std::to_string(number) + ": expected key=value");
    }
    const std::string key = trim(line.substr(0, eq));
    const std::string value = trim(line.substr(eq + 1));
    const auto& keys = known_keys();
    if (std::find(keys.begin(), keys.end(), key) == keys.end()) {
      throw UsageError(origin + ":" + std::to_string(number) + ": unknown key '" + key + "'");
    }
    settings[key] = value;
  }
  return settings;
}

Settings load_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw UsageError("cannot open config file " + path.string());
  return parse_config(in, path.string());
}

std::vector<int> parse_int_list(const std::string& text) {
  std::vector<int> out;
  for (const auto& part : split(text, ',')) {
    const auto dash = part.find('-', 1);
    if (dash == std::string::npos) {
      out.push_back(parse_number<int>(part, "integer"));
      continue;
    }
    const int lo = parse_number<int>(trim(part.substr(0, dash)), "range start");
    const int hi = parse_number<int>(trim(part.substr(dash + 1)), "range end");
    if (hi < lo) throw UsageError("empty range '" + part + "'");
    for (int k = lo; k <= hi; ++k) out.push_back(k);
  }
  if (out.empty()) throw UsageError("empty integer list");
  return out;
}

std::vector<double> parse_real_list(const std::string& text) {
  std::vector<double> out;
  if (text.find(':') != std::string::npos) {
    const auto parts = split(text, ':');
    if (parts.size() != 3) throw UsageError("grid must be start:stop:step, got '" + text + "'");
    const double lo = parse_number<double>(parts[0], "grid start");
    const double hi = parse_number<double>(parts[1], "grid stop");
    const double step = parse_number<double>(parts[2], "grid step");
    if (!(step > 0.0) || hi < lo) throw UsageError("invalid grid '" + text + "'");
    const auto count = static_cast<int>(std::floor((hi - lo) / step + 1e-9));
    for (int k = 0; k <= count; ++k) out.push_back(lo + k * step);
    return out;
  }
  for (const auto& part : split(text, ',')) out.push_back(parse_number<double>(part, "number"));
  if (out.empty()) throw UsageError("empty list");
  return out;
}

NoiseSpec parse_noise(const std::string& text) {
  if (text == "gaussian") return NoiseSpec::gaussian();
  if (text.rfind("t:", 0) == 0) {
    const double df = parse_number<double>(text.substr(2), "degrees of freedom");
    if (!(df > 2.0)) throw UsageError("student-t noise needs df > 2");
    return NoiseSpec::student_t(df);
  }
  throw UsageError("noise must be 'gaussian' or 't:<df>', got '" + text + "'");
}

Family parse_family(const std::string& text) {
  if (text == "nested") return Family::nested;
  if (text == "complete") return Family::complete;
  throw UsageError("collection must be 'nested' or 'complete', got '" + text + "'");
}

}  // namespace addcomp::cli
