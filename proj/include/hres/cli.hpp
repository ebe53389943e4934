#pragma once

#include <ostream>

namespace hres {

/// Entry point of the command-line tool. Writes one JSON object (or CSV with
/// --csv) to `out` and diagnostics to `err`. Returns 0 on success, 2 for
/// precondition, domain, configuration or usage errors, and 3 for numerical
/// failures (including failed built-in checks).
int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace hres
