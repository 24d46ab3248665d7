#include <CLI11.hpp>
#include <filesystem>
#include <iostream>

#include "covsteer/scenarios.hpp"

namespace {

constexpr int kExitOk = 0;
constexpr int kExitInfeasible = 1;
constexpr int kExitConfigError = 2;

namespace fs = std::filesystem;

std::string out_path(const std::string& dir, const std::string& name) {
    fs::create_directories(dir);
    return (fs::path(dir) / name).string();
}

int cmd_plan(const covsteer::ScenarioConfig& config) {
    const auto result = covsteer::run(config.problem);
    const std::string& dir = config.output_dir;
    covsteer::write_policy_json(out_path(dir, "policy.json"), result.policy);
    covsteer::write_moments_csv(out_path(dir, "moments.csv"), result.tables);
    result.trace.write_csv(out_path(dir, "trace.csv"));
    covsteer::write_ellipse_csv(out_path(dir, "ellipses.csv"), result.tables,
                                config.ellipse_axes);

    const auto report = covsteer::verify_feasibility(config.problem, result.policy);
    std::cerr << "plan: " << (result.trace.converged ? "converged" : "did not converge")
              << " in " << result.trace.iterations.size() << " iterations; "
              << report.summary() << "\n";
    std::cerr << "plan: outputs written to " << dir << "\n";
    return (result.trace.converged && report.feasible) ? kExitOk : kExitInfeasible;
}

int cmd_verify(const covsteer::ScenarioConfig& config, const std::string& policy_path) {
    const auto policy = covsteer::read_policy_json(policy_path);
    policy.validate(config.problem.system.n_x(), config.problem.system.n_u(),
                    config.problem.horizon);
    const auto report = covsteer::verify_feasibility(config.problem, policy);
    std::cout << report.summary() << "\n";
    return report.feasible ? kExitOk : kExitInfeasible;
}

int cmd_simulate(const covsteer::ScenarioConfig& config, const std::string& policy_path) {
    const auto policy = covsteer::read_policy_json(policy_path);
    policy.validate(config.problem.system.n_x(), config.problem.system.n_u(),
                    config.problem.horizon);
    const auto batch =
        covsteer::simulate(config.problem, policy, config.mc_samples, config.mc_seed);
    const std::string& dir = config.output_dir;
    covsteer::write_batch_csv(out_path(dir, "mc_summary.csv"), batch);
    covsteer::write_trajectories_csv(out_path(dir, "mc_trajectories.csv"), batch);
    std::cerr << "simulate: " << batch.n_samples << " samples (seed " << batch.seed
              << ") written to " << dir << "\n";
    return kExitOk;
}

int cmd_oracle(const covsteer::ScenarioConfig& config) {
    const auto& problem = config.problem;
    const covsteer::Policy policy =
        covsteer::Policy::zero(problem.system.n_x(), problem.system.n_u(), problem.horizon);
    const auto exact = covsteer::enumerate_exact(problem, policy);
    const auto tables = covsteer::propagate(problem, policy);
    double max_err = 0.0;
    for (std::size_t t = 0; t < tables.size(); ++t) {
        for (const auto& [mi, mean] : exact.tables[t].mean)
            max_err = std::max(max_err,
                               (mean - tables[t].mean_of(mi)).cwiseAbs().maxCoeff());
        for (const auto& [key, cov] : exact.tables[t].cov_xx)
            max_err = std::max(
                max_err, (cov - tables[t].xx(key.first, key.second)).cwiseAbs().maxCoeff());
        for (const auto& [key, cov] : exact.tables[t].cov_xp)
            max_err = std::max(
                max_err, (cov - tables[t].xp(key.first, key.second)).cwiseAbs().maxCoeff());
    }
    std::cout << "oracle: max |engine - enumeration| = " << max_err << "\n";
    return max_err <= 1e-9 ? kExitOk : kExitInfeasible;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Finite-horizon covariance steering under constant parametric uncertainty"};
    app.require_subcommand(1);

    std::string config_path;
    std::string policy_path;
    std::string out_override;
    int samples_override = -1;
    long long seed_override = -1;

    auto add_common = [&](CLI::App* cmd, bool with_policy) {
        cmd->add_option("config", config_path, "scenario config JSON")->required();
        if (with_policy)
            cmd->add_option("policy", policy_path, "policy JSON from 'plan'")->required();
        cmd->add_option("--out", out_override, "output directory override");
        cmd->add_option("--samples", samples_override, "Monte-Carlo sample override");
        cmd->add_option("--seed", seed_override, "Monte-Carlo seed override");
    };
    add_common(app.add_subcommand("plan", "solve the steering problem"), false);
    add_common(app.add_subcommand("verify", "exact feasibility check of a policy"), true);
    add_common(app.add_subcommand("simulate", "closed-loop Monte-Carlo of a policy"), true);
    add_common(app.add_subcommand("oracle", "exhaustive enumeration cross-check"), false);

    CLI11_PARSE(app, argc, argv);

    try {
        covsteer::ScenarioConfig config = covsteer::load_config(config_path);
        if (!out_override.empty()) config.output_dir = out_override;
        if (samples_override > 0) config.mc_samples = samples_override;
        if (seed_override >= 0) config.mc_seed = static_cast<std::uint64_t>(seed_override);

        if (app.got_subcommand("plan")) return cmd_plan(config);
        if (app.got_subcommand("verify")) return cmd_verify(config, policy_path);
        if (app.got_subcommand("simulate")) return cmd_simulate(config, policy_path);
        if (app.got_subcommand("oracle")) return cmd_oracle(config);
    } catch (const covsteer::ConfigError& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return kExitConfigError;
    } catch (const std::invalid_argument& e) {
        std::cerr << "input error: " << e.what() << "\n";
        return kExitConfigError;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitInfeasible;
    }
    return kExitConfigError;
}
