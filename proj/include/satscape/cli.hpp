#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace satscape::cli {

inline constexpr const char* kVersion = "0.1.0";

enum ExitCode : int { kOk = 0, kValidation = 2, kResource = 3, kInternal = 4 };

/// Runs one command line (without the program name). Data files and
/// manifest.json go to --out; errors are reported on `err` as one JSON line.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

int main_entry(int argc, char** argv);

}  // namespace satscape::cli
