#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <random>

#include "covsteer/scp_driver.hpp"
#include "support/fixtures.hpp"

using namespace covsteer;
using namespace covsteer::testing;

namespace {

// Two-state deterministic single-step problem with invertible B: the unique
// feasible input is the analytic feedforward, independent of the penalty.
SteeringProblem one_step_problem() {
    SteeringProblem problem;
    problem.system.a_bar = Eigen::MatrixXd::Identity(2, 2);
    problem.system.a_bar(0, 1) = 0.5;
    problem.system.b_bar = Eigen::MatrixXd::Identity(2, 2);
    problem.system.d_bar = Eigen::MatrixXd::Zero(2, 1);
    problem.noise_dists = {ParameterDistribution::gaussian(1.0)};
    problem.horizon = 1;
    problem.mu0 = Eigen::Vector2d(1.0, -1.0);
    problem.sigma0 = Eigen::MatrixXd::Zero(2, 2);
    problem.mu_final = Eigen::Vector2d(0.2, 0.1);
    problem.sigma_final = Eigen::MatrixXd::Identity(2, 2);
    problem.Q = Eigen::MatrixXd::Identity(2, 2);
    problem.R = Eigen::MatrixXd::Identity(2, 2);
    return problem;
}

// Small mixed multiplicative/additive steering instance that solves in a
// couple of seconds.
SteeringProblem small_mixed_problem() {
    SteeringProblem problem;
    problem.system.a_bar = Eigen::MatrixXd::Identity(2, 2);
    problem.system.a_bar(1, 0) = 0.4;
    problem.system.b_bar = Eigen::MatrixXd::Identity(2, 2);
    problem.system.d_bar = 0.05 * Eigen::MatrixXd::Identity(2, 2);
    Eigen::MatrixXd a_tilde = Eigen::MatrixXd::Zero(2, 2);
    a_tilde(1, 0) = 0.3;
    a_tilde(0, 1) = -0.2;
    problem.system.a_tilde = {a_tilde};
    problem.system.b_tilde = {Eigen::MatrixXd::Zero(2, 2)};
    problem.system.d_tilde = {Eigen::MatrixXd::Zero(2, 2)};
    problem.param_dists = {ParameterDistribution::uniform(-1.0, 1.0)};
    problem.noise_dists = {ParameterDistribution::gaussian(1.0),
                           ParameterDistribution::gaussian(1.0)};
    problem.horizon = 4;
    problem.mu0 = Eigen::Vector2d(1.0, 1.0);
    problem.sigma0 = 0.01 * Eigen::MatrixXd::Identity(2, 2);
    problem.mu_final = Eigen::Vector2d::Zero();
    problem.sigma_final = 0.1 * Eigen::MatrixXd::Identity(2, 2);
    problem.Q = 0.01 * Eigen::MatrixXd::Identity(2, 2);
    problem.R = 0.1 * Eigen::MatrixXd::Identity(2, 2);
    problem.solver.eps_abs = 1e-8;
    problem.solver.eps_rel = 1e-8;
    return problem;
}

}  // namespace

TEST_CASE("one-step deterministic problem converges in at most two iterations") {
    const auto problem = one_step_problem();
    const auto result = run(problem);
    CHECK(result.trace.converged);
    CHECK(result.trace.iterations.size() <= 2);
    const Eigen::Vector2d u_expected =
        problem.system.b_bar.inverse() *
        (problem.mu_final - problem.system.a_bar * problem.mu0);
    const Eigen::Vector2d u = result.policy.feedforwards[0] +
                              result.policy.gains[0] * problem.mu0;
    CHECK((u - u_expected).cwiseAbs().maxCoeff() < 1e-5);
}

TEST_CASE("restarting from a stationary point returns immediately") {
    const auto problem = small_mixed_problem();
    const auto first = run(problem);
    REQUIRE(first.trace.converged);
    const auto second = run(problem, first.policy);
    CHECK(second.trace.converged);
    CHECK(second.trace.iterations.size() == 1);
    // The policy is unchanged up to the solver tolerance.
    double delta = 0.0;
    for (int k = 0; k < problem.horizon; ++k) {
        delta += (second.policy.gains[k] - first.policy.gains[k]).norm();
        delta += (second.policy.feedforwards[k] - first.policy.feedforwards[k]).norm();
    }
    CHECK(delta < problem.scp.tolerance);
}

TEST_CASE("collapse at a stationary point: subproblem moments equal exact propagation") {
    const auto problem = small_mixed_problem();
    const auto result = run(problem);
    REQUIRE(result.trace.converged);
    // One more subproblem solve at the converged policy.
    const auto ref = ReferencePoint::at(problem, result.policy);
    const ConicProgram program = assemble(problem, ref);
    SolveReport report;
    const Solution solution = solve(program, problem.solver, report);
    REQUIRE(report.status == SolveStatus::Optimal);
    const auto sub = extract_policy(program, problem, solution.x);
    const MultiIndex none;
    const auto tables = propagate(problem, sub.policy);
    CHECK((sub.terminal_mean - tables.back().mean_of(none)).cwiseAbs().maxCoeff() < 1e-5);
    CHECK((sub.terminal_cov - tables.back().xx(none, none)).cwiseAbs().maxCoeff() < 1e-5);
}

TEST_CASE("mixed problem: converged run passes the exact feasibility check") {
    const auto problem = small_mixed_problem();
    const auto result = run(problem);
    REQUIRE(result.trace.converged);
    const auto report = verify_feasibility(problem, result.policy);
    CHECK(report.feasible);
    CHECK(report.terminal_mean_gap <= 1e-3);
    CHECK(report.terminal_cov_gap <= 1e-6);
}

TEST_CASE("verify_feasibility margins") {
    // Zero-noise system steered exactly: all margins nonnegative.
    auto problem = one_step_problem();
    ChanceConstraint cc;
    cc.alpha = Eigen::Vector2d(1.0, 0.0);
    cc.beta = 5.0;
    cc.delta = 0.2;
    problem.state_constraints = {cc};
    const auto result = run(problem);
    REQUIRE(result.trace.converged);
    auto report = verify_feasibility(problem, result.policy);
    CHECK(report.feasible);
    for (double margin : report.state_margins) CHECK(margin >= 0.0);

    // Perturbing the feedforward moves the terminal mean by exactly B * dv.
    Policy perturbed = result.policy;
    perturbed.feedforwards[0](0) += 1.0;
    report = verify_feasibility(problem, perturbed);
    CHECK_FALSE(report.feasible);
    const Eigen::Vector2d shift = problem.system.b_bar.col(0);  // B * e1
    CHECK(report.terminal_mean_gap ==
          doctest::Approx(shift.cwiseAbs().maxCoeff()).epsilon(1e-4));
}

TEST_CASE("determinism: identical problems give identical traces") {
    const auto problem = small_mixed_problem();
    const auto a = run(problem);
    const auto b = run(problem);
    REQUIRE(a.trace.iterations.size() == b.trace.iterations.size());
    for (std::size_t i = 0; i < a.trace.iterations.size(); ++i) {
        CHECK(a.trace.iterations[i].policy_delta == b.trace.iterations[i].policy_delta);
        CHECK(a.trace.iterations[i].solver_report.iterations ==
              b.trace.iterations[i].solver_report.iterations);
    }
}

TEST_CASE("trace exports to CSV") {
    const auto problem = one_step_problem();
    const auto result = run(problem);
    const std::string path = "/tmp/covsteer_trace_test.csv";
    result.trace.write_csv(path);
    std::ifstream in(path);
    std::string line;
    std::getline(in, line);
    CHECK(line == "# covsteer scp trace v1");
    int data_lines = 0;
    while (std::getline(in, line))
        if (!line.empty() && line[0] != '#' && line.substr(0, 9) != "iteration") ++data_lines;
    CHECK(data_lines == static_cast<int>(result.trace.iterations.size()));
}
