#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <random>

#include "covsteer/linearizer.hpp"
#include "support/fixtures.hpp"

using namespace covsteer;
using namespace covsteer::testing;

namespace {

// Evaluate every constraint at a concrete (policy, tables) point; returns the
// largest entry magnitude over all expressions.
double max_residual(const ConstraintSet& constraints, const ReferencePoint& point) {
    double worst = 0.0;
    const auto value_of = [&](const VarKey& key) { return reference_value(point, key); };
    for (const auto& c : constraints)
        worst = std::max(worst, c.expr.evaluate(value_of).cwiseAbs().maxCoeff());
    return worst;
}

SteeringProblem gaussian_uniform_problem(std::mt19937_64& rng) {
    auto problem = random_two_point_problem(rng, 2, 2, 1, 2, 3);
    problem.param_dists = {ParameterDistribution::uniform(-1.0, 1.0),
                           ParameterDistribution::gaussian(0.5)};
    problem.noise_dists = {ParameterDistribution::gaussian(1.0)};
    problem.sigma0 = 0.02 * Eigen::MatrixXd::Identity(2, 2);
    return problem;
}

}  // namespace

TEST_CASE("lin2/lin3 scalar behavior") {
    const VarKey xk{VarKind::Mean, 0, {}, {}};
    const VarKey yk{VarKind::Mean, 1, {}, {}};
    const VarKey zk{VarKind::Mean, 2, {}, {}};
    const auto x = AffineMatrix::variable(xk, 1, 1);
    const auto y = AffineMatrix::variable(yk, 1, 1);
    const auto z = AffineMatrix::variable(zk, 1, 1);
    const auto c = [](double v) { return Eigen::MatrixXd::Constant(1, 1, v); };

    const auto expr2 = lin2(x, c(2.0), y, c(3.0));
    const auto at = [&](double xv, double yv, double zv) {
        return [=](const VarKey& key) {
            if (key == xk) return Eigen::MatrixXd::Constant(1, 1, xv);
            if (key == yk) return Eigen::MatrixXd::Constant(1, 1, yv);
            return Eigen::MatrixXd::Constant(1, 1, zv);
        };
    };
    CHECK(expr2.evaluate(at(2.0, 3.0, 0.0))(0, 0) == doctest::Approx(6.0));

    const auto expr3 = lin3(x, c(1.0), y, c(2.0), z, c(3.0));
    CHECK(expr3.evaluate(at(1.0, 2.0, 3.0))(0, 0) == doctest::Approx(6.0));
    const double h = 0.25;
    CHECK(expr3.evaluate(at(1.0 + h, 2.0, 3.0))(0, 0) == doctest::Approx(6.0 + 6.0 * h));
}

TEST_CASE("lin3 gradient matches central finite differences of the product") {
    std::mt19937_64 rng(2);
    std::uniform_real_distribution<double> pick(-2.0, 2.0);
    const VarKey xk{VarKind::Mean, 0, {}, {}};
    const VarKey yk{VarKind::Mean, 1, {}, {}};
    const VarKey zk{VarKind::Mean, 2, {}, {}};
    for (int trial = 0; trial < 50; ++trial) {
        const double xh = pick(rng), yh = pick(rng), zh = pick(rng);
        const auto c = [](double v) { return Eigen::MatrixXd::Constant(1, 1, v); };
        const auto expr = lin3(AffineMatrix::variable(xk, 1, 1), c(xh),
                               AffineMatrix::variable(yk, 1, 1), c(yh),
                               AffineMatrix::variable(zk, 1, 1), c(zh));
        const auto value = [&](double xv, double yv, double zv) {
            return expr.evaluate([&](const VarKey& key) {
                if (key == xk) return Eigen::MatrixXd::Constant(1, 1, xv);
                if (key == yk) return Eigen::MatrixXd::Constant(1, 1, yv);
                return Eigen::MatrixXd::Constant(1, 1, zv);
            })(0, 0);
        };
        const double step = 1e-5;
        // d(xyz)/dx at the hats is yh*zh, etc.
        const double gx = (value(xh + step, yh, zh) - value(xh - step, yh, zh)) / (2 * step);
        const double gy = (value(xh, yh + step, zh) - value(xh, yh - step, zh)) / (2 * step);
        const double gz = (value(xh, yh, zh + step) - value(xh, yh, zh - step)) / (2 * step);
        CHECK(gx == doctest::Approx(yh * zh).epsilon(1e-6));
        CHECK(gy == doctest::Approx(xh * zh).epsilon(1e-6));
        CHECK(gz == doctest::Approx(xh * yh).epsilon(1e-6));
    }
}

TEST_CASE("collapse: linearized dynamics vanish at the reference") {
    std::mt19937_64 rng(21);
    for (int trial = 0; trial < 6; ++trial) {
        auto problem = gaussian_uniform_problem(rng);
        const auto policy = random_policy(rng, 2, 2, 3);
        const auto ref = ReferencePoint::at(problem, policy);
        CHECK(max_residual(linearize_dynamics(problem, ref), ref) < 1e-12);
    }
}

TEST_CASE("tangency: linearization error scales as h^2") {
    std::mt19937_64 rng(77);
    auto problem = gaussian_uniform_problem(rng);
    const auto policy = random_policy(rng, 2, 2, 3);
    const auto direction = random_policy(rng, 2, 2, 3, 1.0, 1.0);
    const auto ref = ReferencePoint::at(problem, policy);
    const auto constraints = linearize_dynamics(problem, ref);

    const auto residual_at = [&](double h) {
        Policy perturbed = policy;
        for (int k = 0; k < 3; ++k) {
            perturbed.gains[k] += h * direction.gains[k];
            perturbed.feedforwards[k] += h * direction.feedforwards[k];
        }
        return max_residual(constraints, ReferencePoint::at(problem, perturbed));
    };
    const double err_large = residual_at(1e-3);
    const double err_small = residual_at(1e-4);
    CHECK(err_large > 0.0);
    // Quadratic decay: shrinking h by 10 shrinks the error by ~100.
    CHECK(err_small <= 0.05 * err_large + 1e-13);
}

TEST_CASE("with zero perturbation matrices the mean map errs only through L*mu") {
    SteeringProblem problem = scalar_fixture(2);
    problem.system.a_tilde[0].setZero();
    problem.system.b_bar = Eigen::MatrixXd::Constant(1, 1, 2.0);
    const MultiIndex none;

    std::mt19937_64 rng(4);
    const auto hat_policy = random_policy(rng, 1, 1, 2);
    const auto ref = ReferencePoint::at(problem, hat_policy);
    const auto constraints = linearize_dynamics(problem, ref);

    const auto perturbed_policy = random_policy(rng, 1, 1, 2);
    auto point = ReferencePoint::at(problem, perturbed_policy);
    // The t=1 -> 2 mean row: residual = B (L - Lhat)(mu - muhat) exactly,
    // linear in v (no error) and bilinear only through L*mu.
    const double dl = (perturbed_policy.gains[1] - hat_policy.gains[1])(0, 0);
    const double dmu =
        (point.tables[1].mean_of(none) - ref.tables[1].mean_of(none))(0);
    CHECK(std::abs(dl * dmu) > 1e-12);  // the probe actually moves both factors
    bool found = false;
    for (const auto& c : constraints) {
        if (c.label.find("dyn_mean[t=2, a=()") == std::string::npos) continue;
        found = true;
        const double residual =
            c.expr.evaluate([&](const VarKey& key) { return reference_value(point, key); })(0, 0);
        CHECK(residual == doctest::Approx(2.0 * dl * dmu).epsilon(1e-10));
    }
    CHECK(found);
}

TEST_CASE("cantelli rows: factors, fixed example, and conservatism") {
    // delta = 0.5 makes the Cantelli factor exactly one.
    ChanceConstraint half;
    half.alpha = Eigen::VectorXd::Constant(1, 1.0);
    half.beta = 0.0;
    half.delta = 0.5;
    CHECK(half.cantelli_factor() == doctest::Approx(1.0));

    // mu = 0, Sigma = I, alpha = e1, delta = 0.2, Sigma_hat = Sigma:
    // the row evaluates to 2 - beta (feasible iff beta >= 2).
    SteeringProblem problem = scalar_fixture(1);
    problem.system.a_tilde[0].setZero();
    problem.mu0 = Eigen::VectorXd::Zero(1);
    problem.sigma0 = Eigen::MatrixXd::Identity(1, 1);
    ChanceConstraint cc;
    cc.alpha = Eigen::VectorXd::Constant(1, 1.0);
    cc.beta = 3.0;
    cc.delta = 0.2;
    problem.state_constraints = {cc};
    const auto ref = ReferencePoint::at(problem, Policy::zero(1, 1, 1));
    const auto rows = cantelli_constraints(problem, ref);
    REQUIRE(rows.size() == 1);
    const double lhs =
        rows[0].expr.evaluate([&](const VarKey& key) { return reference_value(ref, key); })(0, 0);
    CHECK(lhs == doctest::Approx(2.0 - 3.0));

    // Secant overestimate: sqrt(lhat)/2 + l/(2 sqrt(lhat)) >= sqrt(l).
    std::mt19937_64 rng(8);
    std::uniform_real_distribution<double> uni(-1.0, 1.0);
    for (int trial = 0; trial < 1000; ++trial) {
        Eigen::MatrixXd g(4, 4);
        for (int i = 0; i < 16; ++i) g(i / 4, i % 4) = uni(rng);
        const Eigen::MatrixXd psd = g * g.transpose();
        Eigen::VectorXd alpha(4);
        for (int i = 0; i < 4; ++i) alpha(i) = uni(rng);
        const double lam = alpha.dot(psd * alpha);
        const double lam_hat = std::max(uni(rng) + 1.5, 1e-9);  // arbitrary positive hat
        const double secant = std::sqrt(lam_hat) / 2.0 + lam / (2.0 * std::sqrt(lam_hat));
        CHECK(secant + 1e-12 >= std::sqrt(std::max(lam, 0.0)));
    }
}

TEST_CASE("cantelli input rows collapse to the exact bound at the reference") {
    std::mt19937_64 rng(12);
    auto problem = gaussian_uniform_problem(rng);
    ChanceConstraint cc;
    cc.alpha = Eigen::VectorXd(2);
    cc.alpha << 1.0, -0.5;
    cc.beta = 4.0;
    cc.delta = 0.1;
    problem.input_constraints = {cc};
    const auto policy = random_policy(rng, 2, 2, 3);
    const auto ref = ReferencePoint::at(problem, policy);
    const MultiIndex none;

    for (const auto& row : cantelli_constraints(problem, ref)) {
        REQUIRE(row.sense == ConstraintSense::LessEqual);
        const double lhs =
            row.expr.evaluate([&](const VarKey& key) { return reference_value(ref, key); })(0, 0);
        // Recover k from the label to compare against the closed form.
        const int k = std::stoi(row.label.substr(row.label.find("k=") + 2));
        const Eigen::VectorXd mu = ref.tables[k].mean_of(none);
        const Eigen::MatrixXd sigma = ref.tables[k].xx(none, none);
        const Eigen::VectorXd u_mean = policy.feedforwards[k] + policy.gains[k] * mu;
        const double lam =
            cc.alpha.dot(policy.gains[k] * sigma * policy.gains[k].transpose() * cc.alpha);
        const double expected = cc.alpha.dot(u_mean) +
                                std::sqrt(std::max(lam, 0.0)) * cc.cantelli_factor() - cc.beta;
        CHECK(lhs == doctest::Approx(expected).epsilon(1e-10));
    }
}
