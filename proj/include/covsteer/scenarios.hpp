#pragma once

#include <array>
#include <cstdint>
#include <string>

#include "covsteer/mc_validator.hpp"
#include "covsteer/scp_driver.hpp"

namespace covsteer {

// Planar spacecraft under a small-angle heading error: states
// (vx, vy, X, Y), thruster inputs (tau_x, tau_y), one uncertain heading
// parameter entering the position rows, and actuation noise on the velocity
// rows. theta_x / theta_w select the multiplicative / additive intensities.
struct SpacecraftParams {
    double theta_x = 0.5;
    double theta_w = 0.2;
    double dt = 0.2;
    double mass = 1.0;  // not fixed by the scenario description; configuration value
    ParameterDistribution heading = ParameterDistribution::uniform(-1.0, 1.0);
    ParameterDistribution force_noise = ParameterDistribution::gaussian(1.0);
};

SteeringProblem build_spacecraft(const SpacecraftParams& params);

// Path-following kinematic bicycle with an uncertain constant velocity:
// physical states (phi, e_psi, e_y) plus a constant augmented state that
// carries the -psi_dot_ref * dt offset, so the affine term fits the linear
// dynamics without touching the moment machinery. The augmented state has
// zero variance and no parameter coupling.
struct BicycleParams {
    double nominal_velocity = 15.0;
    double d_front = 1.5;
    double d_rear = 1.5;
    double dt = 0.1;
    double theta_x = 1.5;
    double psi_dot_ref = 1.0;
    ParameterDistribution velocity_error = ParameterDistribution::gaussian(1.0);
};

SteeringProblem build_bicycle(const BicycleParams& params);

// Thrown by config parsing with the JSON path of the offending field.
class ConfigError : public std::runtime_error {
public:
    ConfigError(const std::string& path, const std::string& message)
        : std::runtime_error(path + ": " + message) {}
};

struct ScenarioConfig {
    SteeringProblem problem;
    int mc_samples = 100000;
    std::uint64_t mc_seed = 12345;
    std::string output_dir = "out";
    std::array<int, 2> ellipse_axes{0, 0};
};

ScenarioConfig parse_config(const std::string& json_text);
ScenarioConfig load_config(const std::string& path);

// File outputs. Every CSV starts with a versioned header comment line.
void write_policy_json(const std::string& path, const Policy& policy);
Policy read_policy_json(const std::string& path);
void write_moments_csv(const std::string& path, const std::vector<MomentTable>& tables);
void write_batch_csv(const std::string& path, const SimulationBatch& batch);
void write_trajectories_csv(const std::string& path, const SimulationBatch& batch);
// 2x2 position-marginal covariance ellipses (level sigma-multiple, default 2)
// with a fixed number of boundary points per time step.
void write_ellipse_csv(const std::string& path, const std::vector<MomentTable>& tables,
                       const std::array<int, 2>& axes, int points_per_step = 64,
                       double level = 2.0);

}  // namespace covsteer
