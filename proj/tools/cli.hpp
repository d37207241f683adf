#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace substrat::cli {

/// Runs one subcommand. Reports go to `out` (or the --output file), notes
/// and timings to `err`. Returns 0 on success, 2 on a domain error or a
/// failed selftest, 1 on a usage error.
int dispatch(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace substrat::cli
