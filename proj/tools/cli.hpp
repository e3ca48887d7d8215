#pragma once

#include <ostream>

namespace uood::cli {

/// Exit status: 0 success, 1 usage error, 2 data or validation error.
/// Data goes to `out` (or the --out file), diagnostics to `err`.
int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace uood::cli
