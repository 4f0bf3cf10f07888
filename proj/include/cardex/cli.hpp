#ifndef CARDEX_CLI_HPP
#define CARDEX_CLI_HPP

#include <string>
#include <vector>

namespace cardex {

/// Toolkit entry point. Subcommands: analyze, annotate, train, predict,
/// baseline, evaluate. Returns 0 on success, 1 on usage errors, 2 on data
/// errors.
int cli_main(int argc, const char* const* argv);

/// Convenience overload for driving the CLI in-process.
int cli_main(const std::vector<std::string>& args);

}  // namespace cardex

#endif  // CARDEX_CLI_HPP
