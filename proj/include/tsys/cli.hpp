#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace tsys::cli {

enum ExitCode : int { ok = 0, usage = 1, infeasible = 2, undecided = 3 };

/// args excludes the program name. Results go to out (or --out), diagnostics to err.
[[nodiscard]] int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);
[[nodiscard]] int run(int argc, char** argv);

}  // namespace tsys::cli
