#pragma once

// Set-membership bound on the array output: either the parameter-dependent
// time-varying recursion
//     delta(i) = beta delta(i-1) + (1 - beta) sqrt(alpha ||w(i)||^2 sigma_hat^2(i))
// or a constant.

#include <cmath>
#include <complex>
#include <string>

#include "beamsm/errors.hpp"

namespace beamsm {

enum class BoundMode { time_varying, fixed };

[[nodiscard]] inline const char* to_string(BoundMode mode) noexcept {
    return mode == BoundMode::fixed ? "fixed" : "time_varying";
}

class BoundTracker {
public:
    // Direct construction; only checks that the recursion is well defined
    // (beta in [0, 1], alpha >= 0). Use init_bound() for the strict ranges.
    BoundTracker(BoundMode mode, double alpha, double beta, double noise_power_estimate, double delta0)
        : mode_(mode), alpha_(alpha), beta_(beta), noise_(noise_power_estimate), delta_(delta0) {
        if (!(beta >= 0.0 && beta <= 1.0)) throw ParameterError("bound beta must lie in [0, 1]");
        if (!(alpha >= 0.0)) throw ParameterError("bound alpha must be non-negative");
        if (!(noise_power_estimate >= 0.0)) throw ParameterError("noise power estimate must be non-negative");
        if (!(delta0 >= 0.0)) throw ParameterError("bound must be non-negative");
    }

    static BoundTracker fixed(double value) { return BoundTracker(BoundMode::fixed, 0.0, 1.0, 0.0, value); }

    [[nodiscard]] BoundMode mode() const noexcept { return mode_; }
    [[nodiscard]] double alpha() const noexcept { return alpha_; }
    [[nodiscard]] double beta() const noexcept { return beta_; }
    [[nodiscard]] double delta() const noexcept { return delta_; }
    [[nodiscard]] double noise_power_estimate() const noexcept { return noise_; }

    void set_noise_power_estimate(double value) {
        if (!(value >= 0.0)) throw ParameterError("noise power estimate must be non-negative");
        noise_ = value;
    }

    // weight_norm_sq is ||T_r(i) w_bar(i)||^2. Fixed mode ignores it.
    double update(double weight_norm_sq) {
        if (mode_ == BoundMode::fixed) return delta_;
        if (!(weight_norm_sq >= 0.0)) throw ParameterError("weight norm must be non-negative");
        delta_ = beta_ * delta_ + (1.0 - beta_) * std::sqrt(alpha_ * weight_norm_sq * noise_);
        return delta_;
    }

private:
    BoundMode mode_;
    double alpha_;
    double beta_;
    double noise_;
    double delta_;
};

// Time-varying mode starts at the recursion's fixed point for the initial
// weight norm; fixed mode starts (and stays) at fixed_value.
[[nodiscard]] inline BoundTracker init_bound(BoundMode mode, double alpha, double beta, double noise_power_estimate,
                                             double w0_norm_sq, double fixed_value = 1.0) {
    if (mode == BoundMode::fixed) {
        if (!(fixed_value >= 0.0)) throw ParameterError("fixed bound must be non-negative");
        return BoundTracker::fixed(fixed_value);
    }
    if (!(alpha > 1.0)) throw ParameterError("bound alpha must exceed 1");
    if (!(beta > 0.0 && beta < 1.0)) throw ParameterError("bound beta must lie in (0, 1)");
    if (!(w0_norm_sq >= 0.0)) throw ParameterError("initial weight norm must be non-negative");
    if (!(noise_power_estimate >= 0.0)) throw ParameterError("noise power estimate must be non-negative");
    return BoundTracker(mode, alpha, beta, noise_power_estimate, std::sqrt(alpha * w0_norm_sq * noise_power_estimate));
}

enum class NoiseEstimatorKind { oracle, smoothed };

// Supplies sigma_hat^2(i) to the bound. Oracle mode returns the true noise
// power. Smoothed mode tracks the decision-directed output residual
// |y - gamma sgn(Re y)|^2 / ||w||^2 with forgetting 0.99.
class NoiseEstimator {
public:
    static constexpr double kSmoothing = 0.99;

    NoiseEstimator(NoiseEstimatorKind kind, double initial) : kind_(kind), estimate_(initial) {
        if (!(initial >= 0.0)) throw ParameterError("initial noise estimate must be non-negative");
    }

    [[nodiscard]] NoiseEstimatorKind kind() const noexcept { return kind_; }
    [[nodiscard]] double estimate() const noexcept { return estimate_; }

    double observe(std::complex<double> y, double gamma, double weight_norm_sq) {
        if (kind_ == NoiseEstimatorKind::oracle || !(weight_norm_sq > 0.0)) return estimate_;
        const double decision = y.real() >= 0.0 ? gamma : -gamma;
        const double residual = std::norm(y - decision) / weight_norm_sq;
        estimate_ = kSmoothing * estimate_ + (1.0 - kSmoothing) * residual;
        return estimate_;
    }

private:
    NoiseEstimatorKind kind_;
    double estimate_;
};

} // namespace beamsm
