#include "covsteer/scenarios.hpp"

#include <cmath>
#include <fstream>
#include <nlohmann/json.hpp>
#include <sstream>

namespace covsteer {

SteeringProblem build_spacecraft(const SpacecraftParams& params) {
    if (params.theta_x < 0.0 || params.theta_w < 0.0)
        throw std::invalid_argument("spacecraft: noise intensities must be nonnegative");
    if (!(params.dt > 0.0)) throw std::invalid_argument("spacecraft: dt must be positive");
    if (!(params.mass > 0.0)) throw std::invalid_argument("spacecraft: mass must be positive");
    const double dt = params.dt;

    SteeringProblem problem;
    Eigen::MatrixXd a = Eigen::MatrixXd::Identity(4, 4);
    a(2, 0) = dt;
    a(3, 1) = dt;
    Eigen::MatrixXd b = Eigen::MatrixXd::Zero(4, 2);
    b(0, 0) = dt / params.mass;
    b(1, 1) = dt / params.mass;
    Eigen::MatrixXd d = Eigen::MatrixXd::Zero(4, 2);
    d(0, 0) = params.theta_w * dt / params.mass;
    d(1, 1) = params.theta_w * dt / params.mass;
    Eigen::MatrixXd a_tilde = Eigen::MatrixXd::Zero(4, 4);
    a_tilde(2, 1) = -params.theta_x * dt;
    a_tilde(3, 0) = params.theta_x * dt;

    problem.system.a_bar = a;
    problem.system.b_bar = b;
    problem.system.d_bar = d;
    problem.system.a_tilde = {a_tilde};
    problem.system.b_tilde = {Eigen::MatrixXd::Zero(4, 2)};
    problem.system.d_tilde = {Eigen::MatrixXd::Zero(4, 2)};
    problem.param_dists = {params.heading};
    problem.noise_dists = {params.force_noise, params.force_noise};

    problem.horizon = 10;
    problem.mu0 = Eigen::VectorXd(4);
    problem.mu0 << 1.0, -1.0, 1.5, 1.5;
    problem.sigma0 = 0.001 * Eigen::MatrixXd::Identity(4, 4);
    problem.mu_final = Eigen::VectorXd::Zero(4);
    problem.sigma_final = Eigen::Vector4d(1.2, 1.0, 0.12, 0.12).asDiagonal();
    problem.Q = 0.01 * Eigen::MatrixXd::Identity(4, 4);
    problem.R = 0.1 * Eigen::MatrixXd::Identity(2, 2);
    return problem;
}

SteeringProblem build_bicycle(const BicycleParams& params) {
    if (!(params.d_front + params.d_rear > 0.0))
        throw std::invalid_argument("bicycle: wheelbase must be positive");
    if (!(params.dt > 0.0)) throw std::invalid_argument("bicycle: dt must be positive");
    const double dt = params.dt;
    const double wheelbase = params.d_front + params.d_rear;
    const double rear_ratio = params.d_rear / wheelbase;

    Eigen::MatrixXd a3 = Eigen::MatrixXd::Identity(3, 3);
    a3(1, 0) = params.nominal_velocity * dt / wheelbase;
    a3(2, 0) = rear_ratio * params.nominal_velocity * dt;
    a3(2, 1) = params.nominal_velocity * dt;
    Eigen::VectorXd b3(3);
    b3 << dt, rear_ratio * dt, 0.0;
    Eigen::MatrixXd a3_tilde = Eigen::MatrixXd::Zero(3, 3);
    a3_tilde(1, 0) = params.theta_x * dt / wheelbase;
    a3_tilde(2, 0) = params.theta_x * rear_ratio * dt;
    a3_tilde(2, 1) = params.theta_x * dt;
    const Eigen::Vector3d offset(0.0, -params.psi_dot_ref * dt, 0.0);

    // Constant-one augmented state absorbing the affine offset.
    SteeringProblem problem;
    Eigen::MatrixXd a = Eigen::MatrixXd::Zero(4, 4);
    a.topLeftCorner(3, 3) = a3;
    a.topRightCorner(3, 1) = offset;
    a(3, 3) = 1.0;
    Eigen::MatrixXd b = Eigen::MatrixXd::Zero(4, 1);
    b.topRows(3) = b3;
    Eigen::MatrixXd a_tilde = Eigen::MatrixXd::Zero(4, 4);
    a_tilde.topLeftCorner(3, 3) = a3_tilde;

    problem.system.a_bar = a;
    problem.system.b_bar = b;
    problem.system.d_bar = Eigen::MatrixXd::Zero(4, 1);
    problem.system.a_tilde = {a_tilde};
    problem.system.b_tilde = {Eigen::MatrixXd::Zero(4, 1)};
    problem.system.d_tilde = {Eigen::MatrixXd::Zero(4, 1)};
    problem.param_dists = {params.velocity_error};
    problem.noise_dists = {ParameterDistribution::gaussian(1.0)};

    problem.horizon = 10;
    problem.mu0 = Eigen::Vector4d(0.0, 0.0, 1.0, 1.0);
    problem.sigma0 = Eigen::Vector4d(0.001, 0.001, 0.1, 0.0).asDiagonal();
    problem.mu_final = Eigen::Vector4d(0.3, 0.0, 0.0, 1.0);
    problem.sigma_final = Eigen::Vector4d(1.0, 0.002, 0.01, 0.0).asDiagonal();
    problem.Q = Eigen::Vector4d(0.01, 0.01, 0.01, 0.0).asDiagonal();
    problem.R = 0.1 * Eigen::MatrixXd::Identity(1, 1);
    return problem;
}

namespace {

using nlohmann::json;

double get_number(const json& j, const std::string& path) {
    if (!j.is_number()) throw ConfigError(path, "expected a number");
    return j.get<double>();
}

int get_int(const json& j, const std::string& path) {
    if (!j.is_number_integer()) throw ConfigError(path, "expected an integer");
    return j.get<int>();
}

Eigen::VectorXd parse_vector(const json& j, const std::string& path) {
    if (!j.is_array()) throw ConfigError(path, "expected an array of numbers");
    Eigen::VectorXd v(j.size());
    for (std::size_t i = 0; i < j.size(); ++i)
        v(i) = get_number(j[i], path + "[" + std::to_string(i) + "]");
    return v;
}

Eigen::MatrixXd parse_matrix(const json& j, const std::string& path) {
    if (j.is_object()) {
        if (j.contains("diag")) {
            const Eigen::VectorXd d = parse_vector(j["diag"], path + ".diag");
            return d.asDiagonal();
        }
        if (j.contains("scaled_identity")) {
            if (!j.contains("size")) throw ConfigError(path, "scaled_identity needs size");
            const int n = get_int(j["size"], path + ".size");
            return get_number(j["scaled_identity"], path + ".scaled_identity") *
                   Eigen::MatrixXd::Identity(n, n);
        }
        throw ConfigError(path, "expected rows, diag, or scaled_identity");
    }
    if (!j.is_array() || j.empty()) throw ConfigError(path, "expected an array of rows");
    const std::size_t cols = j[0].is_array() ? j[0].size() : 0;
    if (cols == 0) throw ConfigError(path, "expected nonempty rows");
    Eigen::MatrixXd m(j.size(), cols);
    for (std::size_t r = 0; r < j.size(); ++r) {
        if (!j[r].is_array() || j[r].size() != cols)
            throw ConfigError(path + "[" + std::to_string(r) + "]", "ragged matrix rows");
        for (std::size_t c = 0; c < cols; ++c)
            m(r, c) = get_number(j[r][c], path + "[" + std::to_string(r) + "]");
    }
    return m;
}

ParameterDistribution parse_distribution(const json& j, const std::string& path) {
    if (!j.is_object() || !j.contains("kind")) throw ConfigError(path, "expected {kind, ...}");
    const std::string kind = j["kind"].get<std::string>();
    try {
        if (kind == "gaussian") return ParameterDistribution::gaussian(get_number(j.at("std"), path + ".std"));
        if (kind == "uniform")
            return ParameterDistribution::uniform(get_number(j.at("lo"), path + ".lo"),
                                                  get_number(j.at("hi"), path + ".hi"));
        if (kind == "two_point")
            return ParameterDistribution::two_point(get_number(j.at("value"), path + ".value"));
        if (kind == "explicit") {
            const Eigen::VectorXd raw = parse_vector(j.at("moments"), path + ".moments");
            return ParameterDistribution::explicit_moments(
                std::vector<double>(raw.data(), raw.data() + raw.size()));
        }
    } catch (const json::exception&) {
        throw ConfigError(path, "missing field for kind '" + kind + "'");
    } catch (const std::invalid_argument& e) {
        throw ConfigError(path, e.what());
    }
    throw ConfigError(path + ".kind", "unknown distribution kind '" + kind + "'");
}

std::vector<ParameterDistribution> parse_distribution_list(const json& j,
                                                           const std::string& path) {
    if (!j.is_array()) throw ConfigError(path, "expected an array of distributions");
    std::vector<ParameterDistribution> out;
    for (std::size_t i = 0; i < j.size(); ++i)
        out.push_back(parse_distribution(j[i], path + "[" + std::to_string(i) + "]"));
    return out;
}

std::vector<ChanceConstraint> parse_constraints(const json& j, const std::string& path) {
    if (!j.is_array()) throw ConfigError(path, "expected an array of constraints");
    std::vector<ChanceConstraint> out;
    for (std::size_t i = 0; i < j.size(); ++i) {
        const std::string p = path + "[" + std::to_string(i) + "]";
        if (!j[i].is_object()) throw ConfigError(p, "expected {alpha, beta, delta}");
        ChanceConstraint c;
        c.alpha = parse_vector(j[i].at("alpha"), p + ".alpha");
        c.beta = get_number(j[i].at("beta"), p + ".beta");
        c.delta = get_number(j[i].at("delta"), p + ".delta");
        out.push_back(std::move(c));
    }
    return out;
}

SteeringProblem parse_system(const json& j, std::array<int, 2>& ellipse_axes) {
    if (!j.is_object()) throw ConfigError("$.system", "expected an object");
    if (j.contains("builder")) {
        const std::string builder = j["builder"].get<std::string>();
        if (builder == "spacecraft") {
            SpacecraftParams params;
            if (j.contains("theta_x")) params.theta_x = get_number(j["theta_x"], "$.system.theta_x");
            if (j.contains("theta_w")) params.theta_w = get_number(j["theta_w"], "$.system.theta_w");
            if (j.contains("dt")) params.dt = get_number(j["dt"], "$.system.dt");
            if (j.contains("mass")) params.mass = get_number(j["mass"], "$.system.mass");
            if (j.contains("heading")) params.heading = parse_distribution(j["heading"], "$.system.heading");
            if (j.contains("force_noise"))
                params.force_noise = parse_distribution(j["force_noise"], "$.system.force_noise");
            ellipse_axes = {2, 3};  // (X, Y)
            try {
                return build_spacecraft(params);
            } catch (const std::invalid_argument& e) {
                throw ConfigError("$.system", e.what());
            }
        }
        if (builder == "bicycle") {
            BicycleParams params;
            if (j.contains("nominal_velocity"))
                params.nominal_velocity = get_number(j["nominal_velocity"], "$.system.nominal_velocity");
            if (j.contains("d_front")) params.d_front = get_number(j["d_front"], "$.system.d_front");
            if (j.contains("d_rear")) params.d_rear = get_number(j["d_rear"], "$.system.d_rear");
            if (j.contains("dt")) params.dt = get_number(j["dt"], "$.system.dt");
            if (j.contains("theta_x")) params.theta_x = get_number(j["theta_x"], "$.system.theta_x");
            if (j.contains("psi_dot_ref"))
                params.psi_dot_ref = get_number(j["psi_dot_ref"], "$.system.psi_dot_ref");
            if (j.contains("velocity_error"))
                params.velocity_error =
                    parse_distribution(j["velocity_error"], "$.system.velocity_error");
            ellipse_axes = {1, 2};  // (e_psi, e_y)
            try {
                return build_bicycle(params);
            } catch (const std::invalid_argument& e) {
                throw ConfigError("$.system", e.what());
            }
        }
        throw ConfigError("$.system.builder", "unknown builder '" + builder + "'");
    }
    if (!j.contains("matrices")) throw ConfigError("$.system", "need builder or matrices");
    const json& m = j["matrices"];
    SteeringProblem problem;
    problem.system.a_bar = parse_matrix(m.at("a_bar"), "$.system.matrices.a_bar");
    problem.system.b_bar = parse_matrix(m.at("b_bar"), "$.system.matrices.b_bar");
    problem.system.d_bar = parse_matrix(m.at("d_bar"), "$.system.matrices.d_bar");
    const auto parse_list = [&](const char* name) {
        std::vector<Eigen::MatrixXd> out;
        const std::string path = std::string("$.system.matrices.") + name;
        if (!m.contains(name)) return out;
        if (!m[name].is_array()) throw ConfigError(path, "expected an array of matrices");
        for (std::size_t i = 0; i < m[name].size(); ++i)
            out.push_back(parse_matrix(m[name][i], path + "[" + std::to_string(i) + "]"));
        return out;
    };
    problem.system.a_tilde = parse_list("a_tilde");
    problem.system.b_tilde = parse_list("b_tilde");
    problem.system.d_tilde = parse_list("d_tilde");
    const int nx = problem.system.n_x();
    ellipse_axes = {std::max(0, nx - 2), std::max(0, nx - 1)};
    return problem;
}

}  // namespace

ScenarioConfig parse_config(const std::string& json_text) {
    json j;
    try {
        j = json::parse(json_text);
    } catch (const json::exception& e) {
        throw ConfigError("$", std::string("invalid JSON: ") + e.what());
    }
    if (!j.is_object()) throw ConfigError("$", "expected a JSON object");
    if (!j.contains("system")) throw ConfigError("$.system", "required");

    ScenarioConfig config;
    config.problem = parse_system(j["system"], config.ellipse_axes);
    SteeringProblem& p = config.problem;

    if (j.contains("horizon")) p.horizon = get_int(j["horizon"], "$.horizon");
    if (j.contains("params")) p.param_dists = parse_distribution_list(j["params"], "$.params");
    if (j.contains("noise")) p.noise_dists = parse_distribution_list(j["noise"], "$.noise");
    if (j.contains("mu0")) p.mu0 = parse_vector(j["mu0"], "$.mu0");
    if (j.contains("sigma0")) p.sigma0 = parse_matrix(j["sigma0"], "$.sigma0");
    if (j.contains("mu_final")) p.mu_final = parse_vector(j["mu_final"], "$.mu_final");
    if (j.contains("sigma_final")) p.sigma_final = parse_matrix(j["sigma_final"], "$.sigma_final");
    if (j.contains("Q")) p.Q = parse_matrix(j["Q"], "$.Q");
    if (j.contains("R")) p.R = parse_matrix(j["R"], "$.R");
    if (j.contains("state_constraints"))
        p.state_constraints = parse_constraints(j["state_constraints"], "$.state_constraints");
    if (j.contains("input_constraints"))
        p.input_constraints = parse_constraints(j["input_constraints"], "$.input_constraints");

    if (j.contains("scp")) {
        const json& s = j["scp"];
        if (s.contains("tolerance")) p.scp.tolerance = get_number(s["tolerance"], "$.scp.tolerance");
        if (s.contains("trust_region_weight"))
            p.scp.trust_region_weight = get_number(s["trust_region_weight"], "$.scp.trust_region_weight");
        if (s.contains("max_iterations"))
            p.scp.max_iterations = get_int(s["max_iterations"], "$.scp.max_iterations");
        if (s.contains("adaptive_trust_region"))
            p.scp.adaptive_trust_region = s["adaptive_trust_region"].get<bool>();
        if (s.contains("terminal_mode")) {
            const std::string mode = s["terminal_mode"].get<std::string>();
            if (mode == "equality")
                p.scp.terminal_mode = TerminalCovarianceMode::Equality;
            else if (mode == "psd-inequality")
                p.scp.terminal_mode = TerminalCovarianceMode::PsdInequality;
            else
                throw ConfigError("$.scp.terminal_mode", "expected equality or psd-inequality");
        }
    }
    if (j.contains("solver")) {
        const json& s = j["solver"];
        if (s.contains("max_iters")) p.solver.max_iters = get_int(s["max_iters"], "$.solver.max_iters");
        if (s.contains("eps_abs")) p.solver.eps_abs = get_number(s["eps_abs"], "$.solver.eps_abs");
        if (s.contains("eps_rel")) p.solver.eps_rel = get_number(s["eps_rel"], "$.solver.eps_rel");
        if (s.contains("over_relaxation"))
            p.solver.over_relaxation = get_number(s["over_relaxation"], "$.solver.over_relaxation");
        if (s.contains("rho")) p.solver.rho = get_number(s["rho"], "$.solver.rho");
        if (s.contains("verbose")) p.solver.verbose = s["verbose"].get<bool>();
        if (s.contains("iteration_log")) p.solver.iteration_log_path = s["iteration_log"].get<std::string>();
    }
    if (j.contains("mc")) {
        const json& s = j["mc"];
        if (s.contains("samples")) config.mc_samples = get_int(s["samples"], "$.mc.samples");
        if (s.contains("seed")) config.mc_seed = s["seed"].get<std::uint64_t>();
    }
    if (j.contains("output_dir")) config.output_dir = j["output_dir"].get<std::string>();
    if (j.contains("ellipse_axes")) {
        const Eigen::VectorXd v = parse_vector(j["ellipse_axes"], "$.ellipse_axes");
        if (v.size() != 2) throw ConfigError("$.ellipse_axes", "expected two indices");
        config.ellipse_axes = {static_cast<int>(v(0)), static_cast<int>(v(1))};
    }

    try {
        p.validate();
    } catch (const std::invalid_argument& e) {
        throw ConfigError("$", e.what());
    }
    for (int axis : config.ellipse_axes)
        if (axis < 0 || axis >= p.system.n_x())
            throw ConfigError("$.ellipse_axes", "index out of range");
    return config;
}

ScenarioConfig load_config(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("$", "cannot open config file: " + path);
    std::ostringstream buffer;
    buffer << in.rdbuf();
    return parse_config(buffer.str());
}

void write_policy_json(const std::string& path, const Policy& policy) {
    json j;
    j["L"] = json::array();
    j["v"] = json::array();
    for (const auto& gain : policy.gains) {
        json rows = json::array();
        for (int r = 0; r < gain.rows(); ++r) {
            json row = json::array();
            for (int c = 0; c < gain.cols(); ++c) row.push_back(gain(r, c));
            rows.push_back(std::move(row));
        }
        j["L"].push_back(std::move(rows));
    }
    for (const auto& ff : policy.feedforwards)
        j["v"].push_back(std::vector<double>(ff.data(), ff.data() + ff.size()));
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot open policy file: " + path);
    out << j.dump(2) << "\n";
}

Policy read_policy_json(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open policy file: " + path);
    json j;
    try {
        in >> j;
    } catch (const json::exception& e) {
        throw std::runtime_error("invalid policy JSON: " + std::string(e.what()));
    }
    if (!j.contains("L") || !j.contains("v") || j["L"].size() != j["v"].size())
        throw std::runtime_error("policy JSON must hold equal-length L and v lists");
    Policy policy;
    for (const auto& gain : j["L"]) {
        Eigen::MatrixXd m(gain.size(), gain.empty() ? 0 : gain[0].size());
        for (std::size_t r = 0; r < gain.size(); ++r)
            for (std::size_t c = 0; c < gain[r].size(); ++c) m(r, c) = gain[r][c].get<double>();
        policy.gains.push_back(std::move(m));
    }
    for (const auto& ff : j["v"]) {
        Eigen::VectorXd v(ff.size());
        for (std::size_t i = 0; i < ff.size(); ++i) v(i) = ff[i].get<double>();
        policy.feedforwards.push_back(std::move(v));
    }
    return policy;
}

void write_moments_csv(const std::string& path, const std::vector<MomentTable>& tables) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot open moments file: " + path);
    const MultiIndex none;
    const int nx = static_cast<int>(tables.front().mean_of(none).size());
    out << "# covsteer moments v1\n";
    out << "time";
    for (int i = 0; i < nx; ++i) out << ",mu_" << i;
    for (int c = 0; c < nx; ++c)
        for (int r = 0; r <= c; ++r) out << ",sigma_" << r << "_" << c;
    out << "\n";
    out.precision(17);
    for (const auto& table : tables) {
        out << table.time;
        const Eigen::VectorXd mu = table.mean_of(none);
        const Eigen::MatrixXd sigma = table.xx(none, none);
        for (int i = 0; i < nx; ++i) out << "," << mu(i);
        for (int c = 0; c < nx; ++c)
            for (int r = 0; r <= c; ++r) out << "," << sigma(r, c);
        out << "\n";
    }
}

void write_batch_csv(const std::string& path, const SimulationBatch& batch) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot open batch file: " + path);
    const int nx = static_cast<int>(batch.mean.front().size());
    out << "# covsteer mc batch v1\n";
    out << "time";
    for (int i = 0; i < nx; ++i) out << ",mean_" << i;
    for (int c = 0; c < nx; ++c)
        for (int r = 0; r <= c; ++r) out << ",cov_" << r << "_" << c;
    for (std::size_t i = 0; i < batch.state_violation_rate.size(); ++i)
        out << ",state_violation_" << i;
    for (std::size_t i = 0; i < batch.input_violation_rate.size(); ++i)
        out << ",input_violation_" << i;
    out << "\n";
    out.precision(17);
    const int N = static_cast<int>(batch.mean.size()) - 1;
    for (int t = 0; t <= N; ++t) {
        out << t;
        for (int i = 0; i < nx; ++i) out << "," << batch.mean[t](i);
        for (int c = 0; c < nx; ++c)
            for (int r = 0; r <= c; ++r) out << "," << batch.covariance[t](r, c);
        for (const auto& rates : batch.state_violation_rate)
            out << "," << (t < N ? rates[t] : 0.0);
        for (const auto& rates : batch.input_violation_rate)
            out << "," << (t < N ? rates[t] : 0.0);
        out << "\n";
    }
}

void write_trajectories_csv(const std::string& path, const SimulationBatch& batch) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot open trajectory file: " + path);
    out << "# covsteer mc trajectories v1 (first " << batch.kept_trajectories.size()
        << " samples)\n";
    out << "sample,time";
    const int nx = batch.kept_trajectories.empty()
                       ? 0
                       : static_cast<int>(batch.kept_trajectories.front().rows());
    for (int i = 0; i < nx; ++i) out << ",x_" << i;
    out << "\n";
    out.precision(17);
    for (std::size_t s = 0; s < batch.kept_trajectories.size(); ++s) {
        const auto& traj = batch.kept_trajectories[s];
        for (int t = 0; t < traj.cols(); ++t) {
            out << s << "," << t;
            for (int i = 0; i < nx; ++i) out << "," << traj(i, t);
            out << "\n";
        }
    }
}

void write_ellipse_csv(const std::string& path, const std::vector<MomentTable>& tables,
                       const std::array<int, 2>& axes, int points_per_step, double level) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot open ellipse file: " + path);
    out << "# covsteer covariance ellipses v1 (axes " << axes[0] << "," << axes[1]
        << ", level " << level << " sigma, " << points_per_step << " points)\n";
    out << "time,point,x,y\n";
    out.precision(17);
    const MultiIndex none;
    for (const auto& table : tables) {
        const Eigen::VectorXd mu = table.mean_of(none);
        const Eigen::MatrixXd sigma = table.xx(none, none);
        Eigen::Matrix2d marginal;
        marginal << sigma(axes[0], axes[0]), sigma(axes[0], axes[1]),
            sigma(axes[1], axes[0]), sigma(axes[1], axes[1]);
        Eigen::SelfAdjointEigenSolver<Eigen::Matrix2d> es(marginal);
        const Eigen::Vector2d lam = es.eigenvalues().cwiseMax(0.0);
        const Eigen::Matrix2d sqrt_marginal =
            es.eigenvectors() * lam.cwiseSqrt().asDiagonal() * es.eigenvectors().transpose();
        for (int i = 0; i < points_per_step; ++i) {
            const double angle = 2.0 * M_PI * i / points_per_step;
            const Eigen::Vector2d unit(std::cos(angle), std::sin(angle));
            const Eigen::Vector2d point =
                Eigen::Vector2d(mu(axes[0]), mu(axes[1])) + level * (sqrt_marginal * unit);
            out << table.time << "," << i << "," << point(0) << "," << point(1) << "\n";
        }
    }
}

}  // namespace covsteer
