#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace blowup::cli {

/// Exit codes.
inline constexpr int kOk = 0;
inline constexpr int kKellerOsserman = 2;
inline constexpr int kNumerics = 3;
inline constexpr int kParse = 4;

/// Runs one CLI invocation. `args` excludes the program name. Results go to
/// `out` (or to --out), diagnostics to `err`.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace blowup::cli
