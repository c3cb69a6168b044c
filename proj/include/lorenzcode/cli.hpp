#ifndef LORENZCODE_CLI_HPP
#define LORENZCODE_CLI_HPP

#include <iosfwd>

namespace lzc::cli {

// Runs one subcommand. Exit codes: 0 success, 1 domain/validation error,
// 2 I/O or format error. Errors are a single machine-parsable line
// "error: <category>: <detail>" on err.
int run(int argc, const char* const* argv, std::ostream& out,
        std::ostream& err);

} // namespace lzc::cli

#endif
