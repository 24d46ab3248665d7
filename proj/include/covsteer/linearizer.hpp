#pragma once

#include <vector>

#include "covsteer/decision_vars.hpp"
#include "covsteer/moment_engine.hpp"

namespace covsteer {

// Linearization point for the convex subproblem: a hat policy together with
// its exact moment trajectory from propagate.
struct ReferencePoint {
    Policy policy;
    std::vector<MomentTable> tables;

    static ReferencePoint at(const SteeringProblem& problem, Policy policy);
};

// Hat value of any lattice/policy variable (epigraph variables are 0 at the
// reference, where both trust-region norms vanish).
Eigen::MatrixXd reference_value(const ReferencePoint& ref, const VarKey& key);

enum class ConstraintSense { Equality, LessEqual };

struct AffineConstraint {
    AffineMatrix expr;  // Equality: expr = 0. LessEqual: expr <= 0 entrywise.
    ConstraintSense sense = ConstraintSense::Equality;
    // Both sides of the matrix equation are symmetric under transposition of
    // the expression; only the upper triangle carries independent rows.
    bool symmetric = false;
    std::string label;
};

using ConstraintSet = std::vector<AffineConstraint>;

// Local affine approximations of the moment recursions around ref: for every
// time step and lattice element, next-step variable minus the linearized map,
// with every bilinear policy/moment product replaced by its lin2/lin3 form.
// Evaluated at the reference these collapse to the exact recursions.
ConstraintSet linearize_dynamics(const SteeringProblem& problem, const ReferencePoint& ref);

// Convexified Cantelli chance constraints at k = 0..N-1. The state bound uses
// the secant overestimate sqrt(lhat)/2 + l/(2 sqrt(lhat)) >= sqrt(l) of the
// standard-deviation term; lhat is clamped below at lambda_floor so a zero
// reference variance (e.g. a zero-gain first iterate) cannot divide by zero.
ConstraintSet cantelli_constraints(const SteeringProblem& problem, const ReferencePoint& ref,
                                   double lambda_floor = 1e-9);

// Variable expression helpers shared with the subproblem assembler.
AffineMatrix mean_expr(const SteeringProblem& problem, int t, const MultiIndex& mi);
AffineMatrix cov_xx_expr(const SteeringProblem& problem, int t, const MultiIndex& a,
                         const MultiIndex& b);
AffineMatrix cov_xp_expr(const SteeringProblem& problem, int t, const MultiIndex& a,
                         const MultiIndex& b);
AffineMatrix gain_expr(const SteeringProblem& problem, int k);
AffineMatrix feedforward_expr(const SteeringProblem& problem, int k);

}  // namespace covsteer
