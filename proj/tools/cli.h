#ifndef DHBB_TOOLS_CLI_H_
#define DHBB_TOOLS_CLI_H_

#include <iosfwd>
#include <string>
#include <vector>

namespace dhbb::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitFailure = 1;
inline constexpr int kExitUsage = 2;

// Runs one subcommand. `args` excludes the program name. Reports go to `out`,
// progress and diagnostics to `err`. Every flag can also come from an
// environment variable named DHBB_<FLAG> (upper case, dashes as underscores).
int run(const std::vector<std::string> &args, std::ostream &out, std::ostream &err);

}  // namespace dhbb::cli

#endif  // DHBB_TOOLS_CLI_H_
