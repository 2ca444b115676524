#pragma once

#include <iosfwd>

namespace metastab {

/// Entry point of the metastab tool. Returns the process exit code.
int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace metastab
