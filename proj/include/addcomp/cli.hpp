#pragma once

// Command-line front end: estimate, simulate, compare-zero, figure.

#include "addcomp/bases.hpp"
#include "addcomp/simulation.hpp"

#include <filesystem>
#include <iosfwd>
#include <map>
#include <stdexcept>
#include <string>

namespace addcomp::cli {

enum ExitCode : int { kOk = 0, kUsage = 2, kDataError = 3, kNumerical = 4 };

/// Bad flags, config keys or values.
class UsageError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Unreadable or malformed input data.
class DataError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

using Settings = std::map<std::string, std::string>;

/// Flat `key = value` lines, '#' starts a comment. Throws UsageError with
/// the offending line number.
Settings parse_config(std::istream& in, const std::string& origin = "config");
Settings load_config(const std::filesystem::path& path);

/// Keys accepted in config files and as --flags.
const std::vector<std::string>& known_keys();

/// "3", "1-6" or "1,3,6".
std::vector<int> parse_int_list(const std::string& text);
/// "0:5:0.5" (inclusive) or "0,1.5,3".
std::vector<double> parse_real_list(const std::string& text);
/// "gaussian" or "t:<df>".
NoiseSpec parse_noise(const std::string& text);
Family parse_family(const std::string& text);

/// Observations read from a delimited file with header x, y1..yK, z.
struct Observations {
  DesignPoints design;
  Vec z;
};

/// Delimiter is tab, comma or whitespace, detected from the header. Blank
/// lines and lines starting with '#' are skipped. Covariates must lie in
/// [0,1]. Throws DataError naming the line or column.
Observations read_observations(std::istream& in);
Observations read_observations(const std::filesystem::path& path);

/// Entry point shared by the executable and the tests.
int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace addcomp::cli
