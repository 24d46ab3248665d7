#include "covsteer/distributions.hpp"

#include <cmath>
#include <stdexcept>

namespace covsteer {

namespace {

// Moments are queried up to order 2N+2 over and over by the hierarchy;
// tabulating this far at construction covers any sane horizon.
constexpr int kTabulatedOrders = 128;

double uniform01(std::mt19937_64& rng) {
    return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

double closed_form_moment(ParameterDistribution::Kind kind, double scale, int m) {
    if (m == 0) return 1.0;
    if (m % 2 == 1) return 0.0;  // all supported kinds are symmetric
    switch (kind) {
        case ParameterDistribution::Kind::Gaussian: {
            // E[p^m] = (m-1)!! sigma^m
            double v = 1.0;
            for (int i = m - 1; i > 0; i -= 2) v *= static_cast<double>(i);
            return v * std::pow(scale, m);
        }
        case ParameterDistribution::Kind::Uniform:
            return std::pow(scale, m) / static_cast<double>(m + 1);
        case ParameterDistribution::Kind::TwoPoint:
            return std::pow(scale, m);
        case ParameterDistribution::Kind::ExplicitMoments:
            break;
    }
    throw std::logic_error("closed_form_moment: not a closed-form kind");
}

}  // namespace

ParameterDistribution ParameterDistribution::gaussian(double std_dev) {
    if (!(std_dev >= 0.0)) throw std::invalid_argument("gaussian: std must be >= 0");
    ParameterDistribution d;
    d.kind_ = Kind::Gaussian;
    d.scale_ = std_dev;
    d.moments_.resize(kTabulatedOrders + 1);
    for (int m = 0; m <= kTabulatedOrders; ++m) d.moments_[m] = closed_form_moment(d.kind_, std_dev, m);
    return d;
}

ParameterDistribution ParameterDistribution::uniform(double lo, double hi) {
    if (!(hi > 0.0) || lo != -hi)
        throw std::invalid_argument("uniform: requires hi = -lo > 0 (zero-mean support)");
    ParameterDistribution d;
    d.kind_ = Kind::Uniform;
    d.scale_ = hi;
    d.moments_.resize(kTabulatedOrders + 1);
    for (int m = 0; m <= kTabulatedOrders; ++m) d.moments_[m] = closed_form_moment(d.kind_, hi, m);
    return d;
}

ParameterDistribution ParameterDistribution::two_point(double value) {
    if (!(value >= 0.0)) throw std::invalid_argument("two_point: value must be >= 0");
    ParameterDistribution d;
    d.kind_ = Kind::TwoPoint;
    d.scale_ = value;
    d.moments_.resize(kTabulatedOrders + 1);
    for (int m = 0; m <= kTabulatedOrders; ++m) d.moments_[m] = closed_form_moment(d.kind_, value, m);
    return d;
}

ParameterDistribution ParameterDistribution::explicit_moments(std::vector<double> raw) {
    if (raw.empty() || raw[0] != 1.0)
        throw std::invalid_argument("explicit moments: raw[0] must be 1");
    if (raw.size() < 2 || raw[1] != 0.0)
        throw std::invalid_argument("explicit moments: raw[1] must be 0 (zero mean)");
    ParameterDistribution d;
    d.kind_ = Kind::ExplicitMoments;
    d.moments_ = std::move(raw);
    return d;
}

ParameterDistribution ParameterDistribution::scaled(double c) const {
    if (!(c > 0.0)) throw std::invalid_argument("scaled: factor must be positive");
    switch (kind_) {
        case Kind::Gaussian:
            return gaussian(scale_ * c);
        case Kind::Uniform:
            return uniform(-scale_ * c, scale_ * c);
        case Kind::TwoPoint:
            return two_point(scale_ * c);
        case Kind::ExplicitMoments: {
            std::vector<double> raw(moments_.size());
            double power = 1.0;
            for (std::size_t m = 0; m < moments_.size(); ++m) {
                raw[m] = moments_[m] * power;
                power *= c;
            }
            return explicit_moments(std::move(raw));
        }
    }
    throw std::logic_error("scaled: unknown kind");
}

double ParameterDistribution::raw_moment(int m) const {
    if (m < 0) throw std::invalid_argument("raw_moment: order must be nonnegative");
    if (m < static_cast<int>(moments_.size())) return moments_[m];
    if (kind_ == Kind::ExplicitMoments)
        throw std::out_of_range("moment order unavailable");
    return closed_form_moment(kind_, scale_, m);
}

double ParameterDistribution::sample(std::mt19937_64& rng) const {
    switch (kind_) {
        case Kind::Gaussian: {
            // Box-Muller; u clamped away from 0 so log stays finite.
            double u = uniform01(rng);
            double v = uniform01(rng);
            if (u < 0x1.0p-53) u = 0x1.0p-53;
            return scale_ * std::sqrt(-2.0 * std::log(u)) * std::cos(6.283185307179586476925286766559 * v);
        }
        case Kind::Uniform:
            // Half-open [-hi, hi); the boundary convention has measure zero
            // and no effect on moments.
            return -scale_ + 2.0 * scale_ * uniform01(rng);
        case Kind::TwoPoint:
            return (rng() & 1u) ? scale_ : -scale_;
        case Kind::ExplicitMoments:
            break;
    }
    throw std::runtime_error("oracle requires a samplable kind");
}

double joint_moment(const std::vector<ParameterDistribution>& dists, const MultiIndex& mi) {
    double prod = 1.0;
    int i = 0;
    const auto& idx = mi.indices();
    while (i < static_cast<int>(idx.size())) {
        int j = idx[i];
        int count = 0;
        while (i < static_cast<int>(idx.size()) && idx[i] == j) {
            ++count;
            ++i;
        }
        if (j >= static_cast<int>(dists.size()))
            throw std::out_of_range("joint_moment: parameter index out of range");
        prod *= dists[j].raw_moment(count);
        if (prod == 0.0) return 0.0;
    }
    return prod;
}

double param_cov(const std::vector<ParameterDistribution>& dists, const MultiIndex& mi_a,
                 const MultiIndex& mi_b) {
    return joint_moment(dists, mi_a.merged(mi_b)) -
           joint_moment(dists, mi_a) * joint_moment(dists, mi_b);
}

}  // namespace covsteer
