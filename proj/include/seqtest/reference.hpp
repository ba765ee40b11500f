#pragma once

#include "seqtest/lattice.hpp"

// Plain serial implementations of the lattice kernels, kept alongside the
// OpenMP versions as the comparison baseline for tests and the benchmark.
// They favour obviousness over speed: full O(N^2) tables instead of rolling
// rows, per-state calls into the public core operations, no mass flushing.
namespace seqtest::ref {

LatticePolicy dbc_lattice(const TestSpec& spec, int horizon_override = 0);

TestReport evaluate(const LatticePolicy& policy, const TestSpec& spec,
                    std::span<const double> extra_params = {},
                    const EvalOptions& opts = {});

BackwardResult backward_optimal(const TestSpec& spec, int horizon);

}  // namespace seqtest::ref
