#pragma once

#include <istream>
#include <ostream>

#include "vacq/model.hpp"

namespace vacq {

// CLI entry point. Subcommands: simulate, solve, analytic, compare.
// Exit codes: 0 success, 2 invalid input, 3 unstable config (solve),
// 4 solver non-convergence / truncation failure, 5 compare tolerance failure.
int run(int argc, char** argv);

// CSV form of a mixed law. Header x,cdf,density,atom; row 0 carries the atom
// at zero, the last row the boundary mass at x_max, interior rows the grid
// nodes. Values print with 17 significant digits so a round-trip is exact.
void write_mixed_csv(std::ostream& out, const MixedDistribution& dist);
MixedDistribution read_mixed_csv(std::istream& in);

}  // namespace vacq
