#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <random>

#include "covsteer/conic_solver.hpp"
#include "support/qp_oracle.hpp"

using namespace covsteer;
using covsteer::testing::DenseQp;
using covsteer::testing::active_set_solve;

namespace {

// Minimal hand-rolled program: variables indexed 0..n-1, rows appended
// per cone section in order.
struct ProgramBuilder {
    int n;
    std::vector<Eigen::Triplet<double>> p_triplets, a_triplets;
    std::vector<double> rhs;
    std::vector<ConeBlock> cones;
    Eigen::VectorXd q;
    explicit ProgramBuilder(int num_vars) : n(num_vars), q(Eigen::VectorXd::Zero(num_vars)) {}

    int add_row(const std::vector<std::pair<int, double>>& coeffs, double b) {
        const int row = static_cast<int>(rhs.size());
        for (auto [col, value] : coeffs) a_triplets.emplace_back(row, col, value);
        rhs.push_back(b);
        return row;
    }
    ConicProgram build() {
        ConicProgram prog;
        for (int i = 0; i < n; ++i)
            prog.layout.add({VarKind::Mean, i, {}, {}}, 1, 1, false);
        prog.quadratic = Eigen::SparseMatrix<double>(n, n);
        prog.quadratic.setFromTriplets(p_triplets.begin(), p_triplets.end());
        prog.linear = q;
        prog.constraints = Eigen::SparseMatrix<double>(static_cast<int>(rhs.size()), n);
        prog.constraints.setFromTriplets(a_triplets.begin(), a_triplets.end());
        prog.rhs = Eigen::Map<Eigen::VectorXd>(rhs.data(), rhs.size());
        prog.cones = cones;
        prog.var_scale_hint = Eigen::VectorXd::Ones(n);
        return prog;
    }
};

SolverSettings default_settings() {
    SolverSettings s;
    s.eps_abs = 1e-9;
    s.eps_rel = 1e-9;
    return s;
}

}  // namespace

TEST_CASE("cone projections: closed-form examples") {
    ConeBlock soc{ConeKind::SecondOrder, 3, 0};
    Eigen::VectorXd v(3);
    v << 0.0, 3.0, 4.0;
    Eigen::VectorXd proj = project_cone(soc, v);
    CHECK(proj(0) == doctest::Approx(2.5));
    CHECK(proj(1) == doctest::Approx(1.5));
    CHECK(proj(2) == doctest::Approx(2.0));

    ConeBlock psd{ConeKind::PositiveSemidefinite, 3, 2};
    Eigen::MatrixXd m(2, 2);
    m << 1.0, 0.0, 0.0, -2.0;
    const Eigen::MatrixXd clamped = svec_inverse(project_cone(psd, svec(m)), 2);
    CHECK(clamped(0, 0) == doctest::Approx(1.0));
    CHECK(clamped(1, 1) == doctest::Approx(0.0).epsilon(1e-12));

    ConeBlock nn{ConeKind::Nonnegative, 2, 0};
    Eigen::VectorXd w(2);
    w << -1.0, 2.0;
    const Eigen::VectorXd wp = project_cone(nn, w);
    CHECK(wp(0) == 0.0);
    CHECK(wp(1) == 2.0);
}

TEST_CASE("property: projections are idempotent, in-cone, and non-expansive") {
    std::mt19937_64 rng(15);
    std::normal_distribution<double> gauss(0.0, 2.0);
    const std::vector<ConeBlock> blocks = {{ConeKind::Nonnegative, 6, 0},
                                           {ConeKind::SecondOrder, 5, 0},
                                           {ConeKind::PositiveSemidefinite, 10, 4},
                                           {ConeKind::Zero, 4, 0}};
    for (const auto& block : blocks) {
        for (int trial = 0; trial < 10000; ++trial) {
            Eigen::VectorXd a(block.dim), b(block.dim);
            for (int i = 0; i < block.dim; ++i) {
                a(i) = gauss(rng);
                b(i) = gauss(rng);
            }
            const Eigen::VectorXd pa = project_cone(block, a);
            const Eigen::VectorXd pb = project_cone(block, b);
            CHECK((project_cone(block, pa) - pa).cwiseAbs().maxCoeff() < 1e-9);
            CHECK((pa - pb).norm() <= (a - b).norm() + 1e-12);
        }
    }
}

TEST_CASE("scalar bound-constrained quadratic") {
    // min (x-1)^2 s.t. x >= 2 -> x = 2, objective 1.
    ProgramBuilder builder(1);
    builder.p_triplets.emplace_back(0, 0, 2.0);
    builder.q(0) = -2.0;
    builder.add_row({{0, -1.0}}, -2.0);
    builder.cones.push_back({ConeKind::Nonnegative, 1, 0});
    ConicProgram prog = builder.build();
    prog.constant = 1.0;

    SolveReport report;
    const Solution sol = solve(prog, default_settings(), report);
    CHECK(report.status == SolveStatus::Optimal);
    CHECK(sol.x(0) == doctest::Approx(2.0).epsilon(1e-6));
    CHECK(report.objective == doctest::Approx(1.0).epsilon(1e-6));
}

TEST_CASE("pinned PSD block") {
    // min tr(X) s.t. X psd, X11 = 1, X22 = 1, X12 = 0.9 -> objective 2.
    // Variables: upper triangle (x11, x12, x22).
    ProgramBuilder builder(3);
    builder.q(0) = 1.0;
    builder.q(2) = 1.0;
    builder.add_row({{0, 1.0}}, 1.0);
    builder.add_row({{1, 1.0}}, 0.9);
    builder.add_row({{2, 1.0}}, 1.0);
    builder.cones.push_back({ConeKind::Zero, 3, 0});
    const double rt2 = std::sqrt(2.0);
    builder.add_row({{0, 1.0}}, 0.0);
    builder.add_row({{1, rt2}}, 0.0);
    builder.add_row({{2, 1.0}}, 0.0);
    builder.cones.push_back({ConeKind::PositiveSemidefinite, 3, 2});
    // Slack of the PSD rows is -svec(X) + b... sign: s = b - Ax must lie in
    // the cone, so emit -X to require X itself psd: flip coefficients.
    for (auto& t : builder.a_triplets)
        if (t.row() >= 3) t = {t.row(), t.col(), -t.value()};

    SolveReport report;
    const Solution sol = solve(builder.build(), default_settings(), report);
    CHECK(report.status == SolveStatus::Optimal);
    CHECK(sol.x(0) + sol.x(2) == doctest::Approx(2.0).epsilon(1e-6));
}

TEST_CASE("SOC epigraph minimization") {
    // min t s.t. t >= ||(3,4)|| -> t = 5.
    ProgramBuilder builder(1);
    builder.q(0) = 1.0;
    builder.add_row({{0, -1.0}}, 0.0);
    builder.add_row({}, 3.0);
    builder.add_row({}, 4.0);
    builder.cones.push_back({ConeKind::SecondOrder, 3, 0});
    SolveReport report;
    const Solution sol = solve(builder.build(), default_settings(), report);
    CHECK(report.status == SolveStatus::Optimal);
    CHECK(sol.x(0) == doctest::Approx(5.0).epsilon(1e-6));
}

TEST_CASE("infeasible equalities yield a primal infeasibility certificate") {
    ProgramBuilder builder(1);
    builder.p_triplets.emplace_back(0, 0, 1e-8);
    builder.add_row({{0, 1.0}}, 0.0);
    builder.add_row({{0, 1.0}}, 1.0);
    builder.cones.push_back({ConeKind::Zero, 2, 0});
    SolverSettings settings = default_settings();
    settings.max_iters = 5000;
    SolveReport report;
    solve(builder.build(), settings, report);
    CHECK(report.status == SolveStatus::PrimalInfeasibleCert);
}

TEST_CASE("unbounded direction yields a dual infeasibility certificate") {
    // min -x s.t. x >= 0: unbounded below.
    ProgramBuilder builder(1);
    builder.q(0) = -1.0;
    builder.add_row({{0, -1.0}}, 0.0);
    builder.cones.push_back({ConeKind::Nonnegative, 1, 0});
    SolverSettings settings = default_settings();
    settings.max_iters = 5000;
    SolveReport report;
    solve(builder.build(), settings, report);
    CHECK(report.status == SolveStatus::DualInfeasibleCert);
}

TEST_CASE("determinism: identical inputs give identical iterates") {
    ProgramBuilder builder(2);
    builder.p_triplets.emplace_back(0, 0, 2.0);
    builder.p_triplets.emplace_back(1, 1, 4.0);
    builder.q << -1.0, -2.0;
    builder.add_row({{0, 1.0}, {1, 1.0}}, 1.0);
    builder.cones.push_back({ConeKind::Zero, 1, 0});
    const ConicProgram prog = builder.build();
    SolveReport r1, r2;
    const Solution s1 = solve(prog, default_settings(), r1);
    const Solution s2 = solve(prog, default_settings(), r2);
    CHECK(s1.x == s2.x);
    CHECK(r1.iterations == r2.iterations);
}

TEST_CASE("random QPs match the dense active-set oracle") {
    std::mt19937_64 rng(2024);
    std::normal_distribution<double> gauss(0.0, 1.0);
    int solved = 0;
    for (int trial = 0; trial < 40; ++trial) {
        const int n = 2 + static_cast<int>(rng() % 14);
        const int m_eq = static_cast<int>(rng() % std::max(1, n / 3));
        const int m_in = 1 + static_cast<int>(rng() % (n bitor 1));

        DenseQp qp;
        Eigen::MatrixXd g(n, n);
        for (int i = 0; i < n * n; ++i) g(i / n, i % n) = gauss(rng);
        qp.P = g * g.transpose() + Eigen::MatrixXd::Identity(n, n);
        qp.q = Eigen::VectorXd::NullaryExpr(n, [&](int) { return gauss(rng); });
        Eigen::VectorXd x0 = Eigen::VectorXd::NullaryExpr(n, [&](int) { return gauss(rng); });
        qp.a_eq = Eigen::MatrixXd::NullaryExpr(m_eq, n, [&](int, int) { return gauss(rng); });
        qp.b_eq = qp.a_eq * x0;
        qp.a_in = Eigen::MatrixXd::NullaryExpr(m_in, n, [&](int, int) { return gauss(rng); });
        qp.b_in = qp.a_in * x0;
        for (int i = 0; i < m_in; ++i) qp.b_in(i) += 0.1 + std::abs(gauss(rng));

        const Eigen::VectorXd x_oracle = active_set_solve(qp, x0);
        const double oracle_obj = 0.5 * x_oracle.dot(qp.P * x_oracle) + qp.q.dot(x_oracle);

        ProgramBuilder builder(n);
        for (int i = 0; i < n; ++i)
            for (int j = 0; j < n; ++j)
                if (qp.P(i, j) != 0.0) builder.p_triplets.emplace_back(i, j, qp.P(i, j));
        builder.q = qp.q;
        for (int r = 0; r < m_eq; ++r) {
            std::vector<std::pair<int, double>> coeffs;
            for (int c = 0; c < n; ++c) coeffs.emplace_back(c, qp.a_eq(r, c));
            builder.add_row(coeffs, qp.b_eq(r));
        }
        if (m_eq > 0) builder.cones.push_back({ConeKind::Zero, m_eq, 0});
        for (int r = 0; r < m_in; ++r) {
            std::vector<std::pair<int, double>> coeffs;
            for (int c = 0; c < n; ++c) coeffs.emplace_back(c, qp.a_in(r, c));
            builder.add_row(coeffs, qp.b_in(r));
        }
        builder.cones.push_back({ConeKind::Nonnegative, m_in, 0});

        SolveReport report;
        const Solution sol = solve(builder.build(), default_settings(), report);
        REQUIRE(report.status == SolveStatus::Optimal);
        const double obj = 0.5 * sol.x.dot(qp.P * sol.x) + qp.q.dot(sol.x);
        CHECK(std::abs(obj - oracle_obj) <=
              1e-5 * std::max(1.0, std::abs(oracle_obj)));
        ++solved;
    }
    CHECK(solved == 40);
}
