#pragma once

#include <optional>
#include <ostream>
#include <string>
#include <vector>

namespace splinequad::cli {

/// Runs one command line (without the program name). Documents go to `out`,
/// error objects to `err`. Returns the process exit code: 0 when the result
/// converged and validated, 1 when it did not, 2 on usage errors.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

/// SPLINEQUAD_TOLERANCE if set, otherwise 1e-12. Throws on an unparsable value.
double default_tolerance();

}  // namespace splinequad::cli
