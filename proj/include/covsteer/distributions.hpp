#pragma once

#include <cstdint>
#include <random>
#include <vector>

#include "covsteer/multi_index.hpp"

namespace covsteer {

// Scalar zero-mean distribution for an uncertain parameter (or a unit-variance
// additive noise channel). All raw moments are available; gaussian, uniform and
// two_point kinds are also samplable for the Monte-Carlo oracle.
//
// Immutable after construction; safe to share across threads.
class ParameterDistribution {
public:
    enum class Kind { Gaussian, Uniform, TwoPoint, ExplicitMoments };

    // p ~ N(0, std^2)
    static ParameterDistribution gaussian(double std_dev);
    // p ~ U(lo, hi); the zero-mean assumption demands hi == -lo, anything else
    // is rejected rather than mean-shifted so modeling errors stay visible.
    static ParameterDistribution uniform(double lo, double hi);
    // p = +value or -value with equal probability.
    static ParameterDistribution two_point(double value);
    // raw[m] = E[p^m] for m = 0..M. Requires raw[0] == 1 and raw[1] == 0.
    static ParameterDistribution explicit_moments(std::vector<double> raw);

    Kind kind() const { return kind_; }

    // E[p^m]. m = 0 returns 1. An explicit table queried beyond its order
    // throws "moment order unavailable".
    double raw_moment(int m) const;

    // Distribution of c * p. Exact: raw moments scale by c^m.
    ParameterDistribution scaled(double c) const;

    bool samplable() const { return kind_ != Kind::ExplicitMoments; }
    // One draw; the generator mapping is fixed (not delegated to the standard
    // library distributions) so identical seeds give identical samples on any
    // platform.
    double sample(std::mt19937_64& rng) const;

private:
    ParameterDistribution() = default;

    Kind kind_ = Kind::TwoPoint;
    double scale_ = 0.0;               // std / hi / value
    std::vector<double> moments_;      // tabulated E[p^m], m = 0..table size-1
};

// E[prod_j p_j over mi] under mutual independence: the product over distinct
// parameters of their raw moments at the respective multiplicities.
double joint_moment(const std::vector<ParameterDistribution>& dists, const MultiIndex& mi);

// Cov(prod over mi_a, prod over mi_b) = E[prod over union] - E[a] E[b].
double param_cov(const std::vector<ParameterDistribution>& dists, const MultiIndex& mi_a,
                 const MultiIndex& mi_b);

}  // namespace covsteer
