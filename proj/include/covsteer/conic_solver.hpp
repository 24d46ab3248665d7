#pragma once

#include <optional>

#include "covsteer/conic_program.hpp"
#include "covsteer/settings.hpp"

namespace covsteer {

enum class SolveStatus { Optimal, MaxIters, PrimalInfeasibleCert, DualInfeasibleCert };

const char* to_string(SolveStatus status);

struct SolveReport {
    SolveStatus status = SolveStatus::MaxIters;
    int iterations = 0;
    double primal_residual = 0.0;  // measured on the equilibrated problem
    double dual_residual = 0.0;
    double complementarity = 0.0;
    double objective = 0.0;  // original (unscaled) objective value
};

struct Solution {
    Eigen::VectorXd x;  // primal
    Eigen::VectorXd y;  // dual, one multiplier per constraint row
    Eigen::VectorXd s;  // cone slack, Ax + s = b
};

// Euclidean projection onto one cone block. Total: never throws for
// conforming dimensions.
Eigen::VectorXd project_cone(const ConeBlock& block, const Eigen::VectorXd& v);

// ADMM over the splitting (quadratic objective + affine constraint, cone
// indicator): each iteration solves a cached quasi-definite KKT system and
// projects the slack onto the cone product. Equilibration uses the program's
// per-variable magnitude hints followed by Ruiz passes; cone blocks receive a
// single row scalar so membership is preserved. Deterministic for identical
// inputs and settings.
Solution solve(const ConicProgram& program, const SolverSettings& settings,
               SolveReport& report, const Solution* warm_start = nullptr);

}  // namespace covsteer
