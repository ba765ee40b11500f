#pragma once

#include "seqtest/fit.hpp"
#include "seqtest/lattice.hpp"

namespace seqtest {

struct EssMax {
    double theta = 0.0;
    double ess = 0.0;
};

// Locates every maximizer of theta -> E_theta(tau) over the open interval:
// coarse grid scan through the exact evaluator, then golden-section
// refinement around each local maximum.  Returns all maxima whose ESS comes
// within 1e-6 of the global maximum, in increasing theta order.
std::vector<EssMax> ess_argmax(const LatticePolicy& policy, const TestSpec& spec, double lo,
                               double hi, double grid_step = 0.002, double refine_tol = 1e-5,
                               Par par = {});

struct KWDesign {
    TestSpec spec;
    TestReport report;
    std::vector<double> worst_points;  // theta values attaining the maximal ESS
    double max_ess = 0.0;
    double fixed_point_gap = 0.0;      // last movement of the evaluation points
    double achieved_distance = 0.0;    // relative distance of the final lambda fit
    bool converged = false;
    int rounds = 0;
};

struct KwOptions {
    int horizon = 3000;
    int max_rounds = 8;
    double theta_tol = 1e-4;      // fixed-point gap target
    double grid_step = 0.002;
    double refine_tol = 1e-5;
    NmOptions nm;
    int restarts = 2;
};

// Multi-hypothesis Kiefer-Weiss design with the closed-form rule: place the
// k-1 evaluation points at the ESS maxima and fit the multipliers to the
// error targets, alternating until the points stop moving and the fit meets
// its tolerance.  gamma is uniform over the evaluation points; symmetric
// designs tie the outer multipliers and mirror the evaluation points.
KWDesign kw_fixed_point(const Model& model, std::vector<double> thetas,
                        std::vector<double> lambda_init, bool symmetric,
                        const CalibrationTarget& targets, const KwOptions& options = {},
                        Par par = {});

}  // namespace seqtest
