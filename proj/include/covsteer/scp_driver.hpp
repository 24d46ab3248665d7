#pragma once

#include <optional>
#include <string>
#include <vector>

#include "covsteer/conic_solver.hpp"
#include "covsteer/convex_subproblem.hpp"

namespace covsteer {

struct ScpIterationRecord {
    int iteration = 0;
    double policy_delta = 0.0;  // sum_k ||v - vhat|| + ||vec(L - Lhat)||
    double subproblem_objective = 0.0;
    SolveReport solver_report;
    double terminal_mean_error = 0.0;  // inf-norm gap of the exact propagation
    double terminal_cov_error = 0.0;   // lambda_max gap (or max abs, equality mode)
};

struct ScpTrace {
    std::vector<ScpIterationRecord> iterations;
    bool converged = false;

    void write_csv(const std::string& path) const;
};

// Margins of the original problem's constraints under exact propagation of a
// policy. Nonnegative margins mean satisfied (up to the tolerances used by
// the caller); Cantelli margins are beta - alpha'mu - sqrt(alpha'Sigma alpha)
// * sqrt((1-delta)/delta).
struct FeasibilityReport {
    double terminal_mean_gap = 0.0;  // ||mu[x_N] - mu_F||_inf
    double terminal_cov_gap = 0.0;   // lambda_max(Sigma - Sigma_F) or max abs deviation
    std::vector<double> state_margins;  // min over k per constraint
    std::vector<double> input_margins;
    bool feasible = false;

    std::string summary() const;
};

struct FeasibilityTolerances {
    double terminal_mean = 1e-3;
    double terminal_cov = 1e-6;
    double cantelli = 1e-6;
};

// Exact-propagation check of the converged policy: terminal mean, terminal
// covariance in the problem's terminal mode, and every Cantelli inequality
// evaluated with the exact moments.
FeasibilityReport verify_feasibility(const SteeringProblem& problem, const Policy& policy,
                                     const FeasibilityTolerances& tol = {});

struct ScpResult {
    Policy policy;
    ScpTrace trace;
    std::vector<MomentTable> tables;  // exact propagation of the returned policy
};

// Sequential convex programming: alternate exact propagation at the hat
// policy with one convex subproblem solve until the summed policy change
// drops below the tolerance. On hitting the iteration cap the best
// feasible-so-far policy (by exact cost) is returned un-converged. Throws
// when the first subproblem is already infeasible.
ScpResult run(const SteeringProblem& problem, const Policy& initial_guess);

inline ScpResult run(const SteeringProblem& problem) {
    return run(problem, Policy::zero(problem.system.n_x(), problem.system.n_u(),
                                     problem.horizon));
}

}  // namespace covsteer
