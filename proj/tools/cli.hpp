#pragma once

#include <iosfwd>
#include <map>
#include <string>
#include <string_view>
#include <vector>

#include "apc/core.hpp"

namespace apc::cli {

enum ExitCode : int { kOk = 0, kFailure = 1, kConfigError = 2, kDegenerate = 3 };

/// Runs one command. `args` excludes the program name.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

/// Radians from `pi`-expressions (`pi/2`, `3pi/2`, `-pi/2`, `2*pi/3`) or plain numbers.
double parse_angle(std::string_view text);

struct SeriesFile {
  TimeSeries series;
  std::map<std::string, std::string> headers;
};

/// One sample per line; `# key=value` header lines; `start_index` header honored.
SeriesFile read_series(std::istream& in);
SeriesFile read_series_file(const std::string& path);

void write_series(std::ostream& out, const TimeSeries& x, const std::vector<std::pair<std::string, std::string>>& headers);

/// Oracle battery behind the hidden `verify` command; returns an exit code.
int run_verify(std::ostream& out);

}  // namespace apc::cli
