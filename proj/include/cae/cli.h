// The `cae` command line. Subcommands: annotate, graph, eval, rules check,
// rules preview, lexicon build, serve.

#ifndef CAE_CLI_H_
#define CAE_CLI_H_

#include <ostream>
#include <string>
#include <vector>

namespace cae {

inline constexpr int kExitOk = 0;
inline constexpr int kExitFailure = 1;
inline constexpr int kExitUsage = 2;

inline constexpr const char *kVersion = "0.1.0";

// `args` excludes the program name. Returns the process exit code.
int RunCli(const std::vector<std::string> &args, std::ostream &out, std::ostream &err);

}  // namespace cae

#endif  // CAE_CLI_H_
