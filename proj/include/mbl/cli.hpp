#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace mbl {

inline constexpr int kExitOk = 0;
inline constexpr int kExitUsage = 1;
inline constexpr int kExitData = 2;

/// Runs the command-line tool. `args` excludes the program name. Subcommands: train, test,
/// classify, xval, ig-report, window, lexicon, tag. Returns 0 on success, 1 on usage errors,
/// 2 on data errors.
int cli_main(const std::vector<std::string>& args, std::istream& in, std::ostream& out, std::ostream& err);

}  // namespace mbl
