#pragma once

#include "covsteer/conic_program.hpp"
#include "covsteer/linearizer.hpp"

namespace covsteer {

// Assembles the convexified steering subproblem around a reference point:
// quadratic cost with linearized input terms plus trust-region penalties,
// linearized moment dynamics and boundary conditions as equalities, Cantelli
// rows as nonnegative-cone inequalities, one SOC epigraph per trust-region
// norm, and the terminal covariance either as equalities or as a PSD block
// (Loewner relaxation, the default mode). Every lattice moment is a free
// variable tied by equality constraints. Assembly is deterministic.
ConicProgram assemble(const SteeringProblem& problem, const ReferencePoint& ref);

// Decision vector holding the reference itself (epigraph entries zero); the
// equality rows of the assembled program vanish at this point, and it doubles
// as the solver warm start.
Eigen::VectorXd pack_reference(const ConicProgram& program, const ReferencePoint& ref);

struct SubproblemSolution {
    Policy policy;
    Eigen::VectorXd terminal_mean;  // subproblem's mu[x_N], for diagnostics
    Eigen::MatrixXd terminal_cov;   // subproblem's Sigma[x_N, x_N]
};

// Reads the policy (and terminal moments) out of a solved decision vector.
SubproblemSolution extract_policy(const ConicProgram& program, const SteeringProblem& problem,
                                  const Eigen::VectorXd& x);

}  // namespace covsteer
