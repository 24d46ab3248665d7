#pragma once

#include <stdexcept>
#include <string>

namespace covsteer {

// Operator-splitting solver knobs.
struct SolverSettings {
    int max_iters = 20000;
    double eps_abs = 1e-7;
    double eps_rel = 1e-7;
    double over_relaxation = 1.6;
    double rho = 1.0;          // initial penalty; adapted during the solve
    bool adaptive_rho = true;
    bool verbose = false;
    std::string iteration_log_path;  // CSV per-iteration log when nonempty

    void validate() const {
        if (max_iters < 1) throw std::invalid_argument("solver: max_iters must be >= 1");
        if (!(eps_abs > 0.0) || !(eps_rel > 0.0))
            throw std::invalid_argument("solver: tolerances must be positive");
        if (!(over_relaxation > 0.0 && over_relaxation < 2.0))
            throw std::invalid_argument("solver: over-relaxation must lie in (0, 2)");
        if (!(rho > 0.0)) throw std::invalid_argument("solver: rho must be positive");
    }
};

enum class TerminalCovarianceMode {
    Equality,       // Sigma[x_N, x_N] = Sigma_F
    PsdInequality,  // Sigma[x_N, x_N] <= Sigma_F (Loewner order)
};

// Outer-loop knobs for the sequential convex programming driver.
struct ScpSettings {
    double tolerance = 1e-4;          // epsilon on the summed policy deltas
    double trust_region_weight = 10.0;  // Delta_R
    int max_iterations = 60;
    TerminalCovarianceMode terminal_mode = TerminalCovarianceMode::PsdInequality;
    // When on, Delta_R doubles after a failed subproblem or two consecutive
    // delta increases. Off by default: the plain algorithm has no adaptation.
    bool adaptive_trust_region = false;

    void validate() const {
        if (!(tolerance > 0.0)) throw std::invalid_argument("scp: tolerance must be positive");
        if (!(trust_region_weight > 0.0))
            throw std::invalid_argument("scp: trust-region weight must be positive");
        if (max_iterations < 1) throw std::invalid_argument("scp: max_iterations must be >= 1");
    }
};

}  // namespace covsteer
