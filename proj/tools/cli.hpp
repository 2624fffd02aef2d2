#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace ps4::cli {

inline constexpr const char* kVersion = "0.1.0";

// Exit codes.
inline constexpr int kOk = 0;
inline constexpr int kVerificationFailed = 1;
inline constexpr int kUsage = 2;

// Runs one command line (args excludes the program name). Normal output goes to
// `out` unless --out names a file; diagnostics go to `err`.
int dispatch(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace ps4::cli
