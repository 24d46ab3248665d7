#include "covsteer/scp_driver.hpp"

#include <cmath>
#include <limits>
#include <fstream>
#include <sstream>
#include <stdexcept>

namespace covsteer {

namespace {

double policy_delta(const Policy& next, const Policy& hat) {
    double delta = 0.0;
    for (std::size_t k = 0; k < next.gains.size(); ++k) {
        delta += (next.feedforwards[k] - hat.feedforwards[k]).norm();
        delta += (next.gains[k] - hat.gains[k]).norm();  // Frobenius = vec 2-norm
    }
    return delta;
}

double max_eigenvalue(const Eigen::MatrixXd& m) {
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(0.5 * (m + m.transpose()),
                                                      Eigen::EigenvaluesOnly);
    return es.eigenvalues().maxCoeff();
}

struct TerminalErrors {
    double mean_gap = 0.0;
    double cov_gap = 0.0;
};

TerminalErrors terminal_errors(const SteeringProblem& problem,
                               const std::vector<MomentTable>& tables) {
    const MultiIndex none;
    TerminalErrors out;
    out.mean_gap =
        (tables.back().mean_of(none) - problem.mu_final).cwiseAbs().maxCoeff();
    const Eigen::MatrixXd sigma = tables.back().xx(none, none);
    if (problem.scp.terminal_mode == TerminalCovarianceMode::Equality)
        out.cov_gap = (sigma - problem.sigma_final).cwiseAbs().maxCoeff();
    else
        out.cov_gap = max_eigenvalue(sigma - problem.sigma_final);
    return out;
}

// Exact reparameterization p' = c p (tilde matrices divided by c) with c
// chosen so every raw moment up to order 2N+2 is at most one. The policy
// space and all order-zero moments are untouched; only the internal lattice
// magnitudes change, which keeps the subproblem well scaled when a parameter
// has fast-growing moments (gaussian kinds reach ~1e10 by order 22).
SteeringProblem rescale_parameters(const SteeringProblem& problem) {
    SteeringProblem out = problem;
    const int max_order = 2 * problem.horizon + 2;
    for (int j = 0; j < problem.system.n_p(); ++j) {
        double scale = 0.0;
        for (int m = 2; m <= max_order; m += 2)
            scale = std::max(scale,
                             std::pow(problem.param_dists[j].raw_moment(m), 1.0 / m));
        if (!(scale > 0.0)) continue;  // parameter is identically zero
        const double c = 1.0 / scale;
        out.param_dists[j] = problem.param_dists[j].scaled(c);
        out.system.a_tilde[j] /= c;
        out.system.b_tilde[j] /= c;
        out.system.d_tilde[j] /= c;
    }
    return out;
}

}  // namespace

void ScpTrace::write_csv(const std::string& path) const {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot open trace file: " + path);
    out << "# covsteer scp trace v1\n";
    out << "iteration,policy_delta,subproblem_objective,solver_status,solver_iterations,"
           "solver_primal_residual,solver_dual_residual,terminal_mean_error,"
           "terminal_cov_error\n";
    for (const auto& rec : iterations) {
        out << rec.iteration << "," << rec.policy_delta << "," << rec.subproblem_objective
            << "," << to_string(rec.solver_report.status) << ","
            << rec.solver_report.iterations << "," << rec.solver_report.primal_residual << ","
            << rec.solver_report.dual_residual << "," << rec.terminal_mean_error << ","
            << rec.terminal_cov_error << "\n";
    }
}

std::string FeasibilityReport::summary() const {
    std::ostringstream out;
    out << "terminal mean gap " << terminal_mean_gap << ", terminal cov gap "
        << terminal_cov_gap;
    for (std::size_t i = 0; i < state_margins.size(); ++i)
        out << ", state[" << i << "] margin " << state_margins[i];
    for (std::size_t i = 0; i < input_margins.size(); ++i)
        out << ", input[" << i << "] margin " << input_margins[i];
    out << (feasible ? " -> feasible" : " -> infeasible");
    return out.str();
}

FeasibilityReport verify_feasibility(const SteeringProblem& problem, const Policy& policy,
                                     const FeasibilityTolerances& tol) {
    const auto tables = propagate(problem, policy);
    const MultiIndex none;
    FeasibilityReport report;
    const TerminalErrors terminal = terminal_errors(problem, tables);
    report.terminal_mean_gap = terminal.mean_gap;
    report.terminal_cov_gap = terminal.cov_gap;

    report.state_margins.assign(problem.state_constraints.size(),
                                std::numeric_limits<double>::infinity());
    report.input_margins.assign(problem.input_constraints.size(),
                                std::numeric_limits<double>::infinity());
    for (int k = 0; k < problem.horizon; ++k) {
        const Eigen::VectorXd mu = tables[k].mean_of(none);
        const Eigen::MatrixXd sigma = tables[k].xx(none, none);
        for (std::size_t i = 0; i < problem.state_constraints.size(); ++i) {
            const auto& cc = problem.state_constraints[i];
            const double sd = std::sqrt(std::max(cc.alpha.dot(sigma * cc.alpha), 0.0));
            const double margin =
                cc.beta - cc.alpha.dot(mu) - sd * cc.cantelli_factor();
            report.state_margins[i] = std::min(report.state_margins[i], margin);
        }
        for (std::size_t i = 0; i < problem.input_constraints.size(); ++i) {
            const auto& cc = problem.input_constraints[i];
            const Eigen::VectorXd u_mean =
                policy.feedforwards[k] + policy.gains[k] * mu;
            const Eigen::MatrixXd u_cov =
                policy.gains[k] * sigma * policy.gains[k].transpose();
            const double sd = std::sqrt(std::max(cc.alpha.dot(u_cov * cc.alpha), 0.0));
            const double margin =
                cc.beta - cc.alpha.dot(u_mean) - sd * cc.cantelli_factor();
            report.input_margins[i] = std::min(report.input_margins[i], margin);
        }
    }

    report.feasible = report.terminal_mean_gap <= tol.terminal_mean &&
                      report.terminal_cov_gap <= tol.terminal_cov;
    for (double margin : report.state_margins)
        report.feasible = report.feasible && margin >= -tol.cantelli;
    for (double margin : report.input_margins)
        report.feasible = report.feasible && margin >= -tol.cantelli;
    return report;
}

ScpResult run(const SteeringProblem& problem, const Policy& initial_guess) {
    problem.validate();
    initial_guess.validate(problem.system.n_x(), problem.system.n_u(), problem.horizon);

    ScpSettings scp = problem.scp;
    // The subproblem sees the moment-normalized twin of the problem; exact
    // propagation, cost, and feasibility all use the original.
    SteeringProblem working = rescale_parameters(problem);

    Policy hat = initial_guess;
    std::vector<MomentTable> hat_tables = propagate(problem, hat);

    ScpResult result;
    std::optional<Solution> warm;
    std::optional<Policy> best_feasible;
    std::vector<MomentTable> best_tables;
    double best_cost = std::numeric_limits<double>::infinity();
    double previous_delta = std::numeric_limits<double>::infinity();
    int delta_increases = 0;

    for (int iteration = 0; iteration < scp.max_iterations; ++iteration) {
        ReferencePoint ref;
        ref.policy = hat;
        ref.tables = propagate(working, hat);

        working.scp.trust_region_weight = scp.trust_region_weight;
        const ConicProgram program = assemble(working, ref);
        Solution warm_start;
        warm_start.x = pack_reference(program, ref);
        warm_start.s = program.rhs - program.constraints * warm_start.x;
        warm_start.y = warm && warm->y.size() == program.num_rows()
                           ? warm->y
                           : Eigen::VectorXd::Zero(program.num_rows());

        SolveReport solver_report;
        const Solution solution = solve(program, problem.solver, solver_report, &warm_start);

        if (solver_report.status == SolveStatus::PrimalInfeasibleCert ||
            solver_report.status == SolveStatus::DualInfeasibleCert) {
            if (iteration == 0)
                throw std::runtime_error(
                    "infeasible linearization - adjust initial guess, trust-region weight, "
                    "or terminal mode");
            if (scp.adaptive_trust_region) {
                scp.trust_region_weight *= 2.0;
                continue;
            }
            break;  // return best so far
        }
        warm = solution;

        const SubproblemSolution sub = extract_policy(program, problem, solution.x);
        const double delta = policy_delta(sub.policy, hat);

        // Exact propagation of the new policy; reused as the next reference.
        std::vector<MomentTable> new_tables = propagate(problem, sub.policy);
        const TerminalErrors terminal = terminal_errors(problem, new_tables);

        ScpIterationRecord record;
        record.iteration = iteration;
        record.policy_delta = delta;
        record.subproblem_objective = solver_report.objective;
        record.solver_report = solver_report;
        record.terminal_mean_error = terminal.mean_gap;
        record.terminal_cov_error = terminal.cov_gap;
        result.trace.iterations.push_back(record);

        const FeasibilityReport feas = verify_feasibility(problem, sub.policy);
        if (feas.feasible) {
            const double cost = exact_cost(problem, sub.policy, new_tables);
            if (cost < best_cost) {
                best_cost = cost;
                best_feasible = sub.policy;
                best_tables = new_tables;
            }
        }

        if (delta < scp.tolerance) {
            result.trace.converged = true;
            result.policy = sub.policy;
            result.tables = std::move(new_tables);
            return result;
        }

        if (scp.adaptive_trust_region) {
            delta_increases = delta > previous_delta ? delta_increases + 1 : 0;
            if (delta_increases >= 2) {
                scp.trust_region_weight *= 2.0;
                delta_increases = 0;
            }
        }
        previous_delta = delta;
        hat = sub.policy;
        hat_tables = std::move(new_tables);
    }

    result.trace.converged = false;
    if (best_feasible) {
        result.policy = *best_feasible;
        result.tables = std::move(best_tables);
    } else {
        result.policy = hat;
        result.tables = std::move(hat_tables);
    }
    return result;
}

}  // namespace covsteer
