#pragma once

// Uniform linear array data model: steering vectors, BPSK sources in white
// circular Gaussian noise, and the exact covariance the snapshots follow.

#include <cmath>
#include <cstdint>
#include <numbers>
#include <optional>
#include <random>
#include <string>
#include <vector>

#include "beamsm/errors.hpp"
#include "beamsm/linalg.hpp"

namespace beamsm {

[[nodiscard]] inline double db_to_linear(double db) noexcept { return std::pow(10.0, db / 10.0); }
[[nodiscard]] inline double deg_to_rad(double deg) noexcept { return deg * std::numbers::pi / 180.0; }

struct ArrayGeometry {
    std::size_t num_elements = 0;
    double spacing_ratio = 0.5; // d / lambda_c

    void validate() const {
        if (num_elements < 1) throw ParameterError("array needs at least one element");
        if (!(spacing_ratio > 0.0)) throw ParameterError("element spacing ratio must be positive");
    }
};

// Element n responds with exp(-2 pi j n (d/lambda) cos theta).
[[nodiscard]] inline CVector steering_vector(const ArrayGeometry& geometry, double theta) {
    geometry.validate();
    CVector a(geometry.num_elements);
    const double phase_step = -2.0 * std::numbers::pi * geometry.spacing_ratio * std::cos(theta);
    a[0] = 1.0;
    for (std::size_t n = 1; n < a.size(); ++n) a[n] = std::polar(1.0, phase_step * static_cast<double>(n));
    return a;
}

struct Source {
    double doa = 0.0;   // radians
    double power = 0.0; // E|s_k(i)|^2
};

enum class Modulation { bpsk };

// sources[0] is the desired user.
struct Scenario {
    ArrayGeometry geometry;
    std::vector<Source> sources;
    double noise_power = 1.0;
    std::size_t num_snapshots = 0;
    Modulation modulation = Modulation::bpsk;

    [[nodiscard]] std::size_t num_sources() const noexcept { return sources.size(); }
    [[nodiscard]] const Source& desired() const {
        if (sources.empty()) throw ParameterError("scenario has no desired user");
        return sources.front();
    }

    void validate() const {
        geometry.validate();
        if (sources.size() > geometry.num_elements)
            throw ParameterError("more sources (" + std::to_string(sources.size()) + ") than array elements (" +
                                 std::to_string(geometry.num_elements) + ")");
        if (noise_power < 0.0) throw ParameterError("noise power must be non-negative");
        for (std::size_t k = 0; k < sources.size(); ++k) {
            if (!(sources[k].power > 0.0))
                throw ParameterError("source " + std::to_string(k) + " has non-positive power");
            for (std::size_t l = 0; l < k; ++l)
                if (sources[k].doa == sources[l].doa)
                    throw ParameterError("sources " + std::to_string(l) + " and " + std::to_string(k) +
                                         " share a DOA");
        }
    }
};

// Interference-plus-noise and desired-signal parts of the exact covariance.
struct CovarianceSplit {
    CMatrix desired;                 // power0 a0 a0^H
    CMatrix interference_plus_noise; // sum_{k>=1} power_k a_k a_k^H + sigma^2 I
    [[nodiscard]] CMatrix total() const { return desired + interference_plus_noise; }
};

namespace detail {
inline void add_rank_one(CMatrix& r, const CVector& a, double power) {
    for (std::size_t i = 0; i < a.size(); ++i)
        for (std::size_t j = 0; j < a.size(); ++j) r(i, j) += power * a[i] * std::conj(a[j]);
}
} // namespace detail

[[nodiscard]] inline CovarianceSplit covariance_split(const Scenario& scenario) {
    scenario.validate();
    const std::size_t m = scenario.geometry.num_elements;
    CovarianceSplit out{CMatrix(m, m), CMatrix::identity(m, scenario.noise_power)};
    for (std::size_t k = 0; k < scenario.sources.size(); ++k) {
        const auto a = steering_vector(scenario.geometry, scenario.sources[k].doa);
        detail::add_rank_one(k == 0 ? out.desired : out.interference_plus_noise, a, scenario.sources[k].power);
    }
    return out;
}

[[nodiscard]] inline CMatrix ideal_covariance(const Scenario& scenario) {
    scenario.validate();
    const std::size_t m = scenario.geometry.num_elements;
    CMatrix r = CMatrix::identity(m, scenario.noise_power);
    for (const auto& s : scenario.sources) detail::add_rank_one(r, steering_vector(scenario.geometry, s.doa), s.power);
    return r;
}

struct Snapshot {
    CVector x;
    cdouble s0; // desired-user symbol sqrt(power0) * b0(i)
};

// Sequential snapshot generator for one Monte-Carlo realization.
class SnapshotStream {
public:
    SnapshotStream(Scenario scenario, std::uint64_t seed)
        : scenario_(std::move(scenario)), rng_(seed) {
        scenario_.validate();
        steering_.reserve(scenario_.sources.size());
        amplitude_.reserve(scenario_.sources.size());
        for (const auto& s : scenario_.sources) {
            steering_.push_back(steering_vector(scenario_.geometry, s.doa));
            amplitude_.push_back(std::sqrt(s.power));
        }
        noise_sigma_ = std::sqrt(scenario_.noise_power / 2.0);
    }

    [[nodiscard]] const Scenario& scenario() const noexcept { return scenario_; }
    [[nodiscard]] std::size_t emitted() const noexcept { return index_; }
    [[nodiscard]] bool exhausted() const noexcept { return index_ >= scenario_.num_snapshots; }

    // Returns std::nullopt once num_snapshots have been emitted.
    std::optional<Snapshot> next() {
        if (exhausted()) return std::nullopt;
        ++index_;
        const std::size_t m = scenario_.geometry.num_elements;
        Snapshot snap{CVector(m), cdouble{}};
        for (std::size_t k = 0; k < steering_.size(); ++k) {
            const double symbol = amplitude_[k] * ((rng_() & 1u) ? 1.0 : -1.0);
            if (k == 0) snap.s0 = symbol;
            const auto& a = steering_[k];
            for (std::size_t n = 0; n < m; ++n) snap.x[n] += symbol * a[n];
        }
        if (noise_sigma_ > 0.0) {
            for (std::size_t n = 0; n < m; ++n) snap.x[n] += cdouble(noise_sigma_ * normal_(rng_), noise_sigma_ * normal_(rng_));
        }
        return snap;
    }

private:
    Scenario scenario_;
    std::mt19937_64 rng_;
    std::normal_distribution<double> normal_{0.0, 1.0};
    std::vector<CVector> steering_;
    std::vector<double> amplitude_;
    double noise_sigma_ = 0.0;
    std::size_t index_ = 0;
};

// Draws `count` DOAs uniformly in (0, pi), rejecting any within `guard`
// radians of `avoid`.
template <class Rng>
[[nodiscard]] std::vector<double> draw_doas_excluding(Rng& rng, std::size_t count, double avoid, double guard) {
    if (!(guard >= 0.0) || 2.0 * guard >= std::numbers::pi) throw ParameterError("DOA guard band out of range");
    std::uniform_real_distribution<double> uniform(0.0, std::numbers::pi);
    std::vector<double> out;
    out.reserve(count);
    while (out.size() < count) {
        const double t = uniform(rng);
        if (t <= 0.0 || std::abs(t - avoid) <= guard) continue;
        out.push_back(t);
    }
    return out;
}

} // namespace beamsm
