#pragma once

// Monte-Carlo experiment runner. Run j of an experiment uses seed
// base_seed + j for both its interferer DOAs and its snapshot stream, and
// every algorithm sees the same realization.

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdint>
#include <exception>
#include <functional>
#include <limits>
#include <mutex>
#include <numeric>
#include <optional>
#include <random>
#include <string>
#include <thread>
#include <vector>

#include "beamsm/baselines.hpp"
#include "beamsm/config.hpp"
#include "beamsm/errors.hpp"
#include "beamsm/jio_sm_rls.hpp"
#include "beamsm/linalg.hpp"
#include "beamsm/signal_model.hpp"
#include "beamsm/sm_bound.hpp"

namespace beamsm {

class UndefinedSinrError : public Error {
public:
    using Error::Error;
};

// 10 log10 (w^H R_s w / w^H R_{i+n} w). A weight orthogonal to the desired
// steering vector yields -infinity.
[[nodiscard]] inline double output_sinr(const CVector& w, const CovarianceSplit& cov) {
    if (norm_sq(w) == 0.0) throw UndefinedSinrError("output SINR undefined for a zero weight vector");
    const double signal = quadratic_form(cov.desired, w);
    const double rest = quadratic_form(cov.interference_plus_noise, w);
    if (!(rest > 0.0)) throw UndefinedSinrError("interference-plus-noise output power is not positive");
    if (!(signal > 0.0)) return -std::numeric_limits<double>::infinity();
    return 10.0 * std::log10(signal / rest);
}

[[nodiscard]] inline double output_sinr(const CVector& w, const Scenario& scenario) {
    return output_sinr(w, covariance_split(scenario));
}

// Per-snapshot log entry; delta is 0 for algorithms without a bound.
struct SnapshotRecord {
    double sinr_db = 0.0;
    bool updated = false;
    double lambda1 = 0.0;
    double delta = 0.0;
};

struct RunResult {
    std::size_t run = 0;
    std::uint64_t seed = 0;
    std::vector<SnapshotRecord> snapshots;
    std::size_t update_count = 0;
    CVector final_weight;

    [[nodiscard]] double update_rate() const {
        return snapshots.empty() ? 0.0 : static_cast<double>(update_count) / static_cast<double>(snapshots.size());
    }
};

struct RunFailure {
    std::size_t run = 0;
    std::string message;
};

struct AlgorithmResult {
    AlgorithmConfig config;
    std::vector<RunResult> runs; // successful runs in run-index order
    std::vector<RunFailure> failures;
    std::vector<double> mean_sinr_db;
    double mean_update_rate = 0.0;

    [[nodiscard]] double final_sinr_db() const {
        return mean_sinr_db.empty() ? std::nan("") : mean_sinr_db.back();
    }
    [[nodiscard]] double sinr_at(std::size_t snapshot) const { return mean_sinr_db.at(snapshot - 1); }
};

struct ExperimentResult {
    ExperimentConfig config;
    std::vector<AlgorithmResult> algorithms;

    [[nodiscard]] const AlgorithmResult& by_label(const std::string& label) const {
        for (const auto& a : algorithms)
            if (a.config.label == label) return a;
        throw Error("no algorithm labelled '" + label + "'");
    }

    // Largest per-algorithm fraction of aborted runs.
    [[nodiscard]] double failure_fraction() const {
        double worst = 0.0;
        for (const auto& a : algorithms)
            worst = std::max(worst, static_cast<double>(a.failures.size()) / static_cast<double>(config.runs));
        return worst;
    }
    [[nodiscard]] bool failures_over_threshold() const { return failure_fraction() > config.failure_threshold; }
};

[[nodiscard]] inline std::uint64_t run_seed(std::uint64_t base_seed, std::size_t run) noexcept {
    return base_seed + static_cast<std::uint64_t>(run);
}

// Builds the scenario for one seed: desired user first, interferers either
// listed in the config or drawn uniformly outside the guard band.
[[nodiscard]] inline Scenario realize_scenario(const ScenarioConfig& sc, std::uint64_t seed) {
    Scenario s;
    s.geometry = ArrayGeometry{sc.num_elements, sc.spacing_ratio};
    s.noise_power = sc.noise_power();
    s.num_snapshots = sc.num_snapshots;
    const double theta0 = deg_to_rad(sc.desired_doa_deg);
    s.sources.push_back({theta0, sc.desired_power()});
    std::vector<double> doas;
    if (sc.interferer_doas_deg) {
        for (double d : *sc.interferer_doas_deg) doas.push_back(deg_to_rad(d));
    } else {
        std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32), 0xD0A5u};
        std::mt19937_64 rng(seq);
        doas = draw_doas_excluding(rng, sc.num_users - 1, theta0, deg_to_rad(sc.doa_guard_deg));
    }
    for (double d : doas) s.sources.push_back({d, sc.interferer_power()});
    s.validate();
    return s;
}

// Seed for the snapshot stream, decorrelated from the DOA draw.
[[nodiscard]] inline std::uint64_t stream_seed(std::uint64_t seed) noexcept {
    std::uint64_t z = seed + 0x9E3779B97F4A7C15ull;
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
    return z ^ (z >> 31);
}

namespace detail {

// Bound plus its noise-power input for one SM run.
struct BoundDriver {
    BoundTracker tracker;
    NoiseEstimator noise;
    double gamma;

    BoundDriver(const AlgorithmConfig& cfg, double true_noise, double w0_norm_sq)
        : tracker(init_bound(cfg.bound.mode, cfg.bound.alpha, cfg.bound.beta, true_noise, w0_norm_sq,
                             cfg.bound.fixed_value)),
          noise(cfg.bound.noise_estimator, true_noise), gamma(cfg.gamma) {}

    // delta(i) from the current weights, before any update at instant i.
    double next(const CVector& w, const CVector& x) {
        const double wn = norm_sq(w);
        if (noise.kind() == NoiseEstimatorKind::smoothed) {
            noise.observe(dot(w, x), gamma, wn);
            tracker.set_noise_power_estimate(noise.estimate());
        }
        return tracker.update(wn);
    }
};

// Recomputes SINR only when the weight changed.
class SinrMeter {
public:
    explicit SinrMeter(const CovarianceSplit& cov) : cov_(cov) {}
    double operator()(const CVector& w, bool changed) {
        if (changed || !cached_) {
            value_ = output_sinr(w, cov_);
            cached_ = true;
        }
        return value_;
    }

private:
    const CovarianceSplit& cov_;
    double value_ = 0.0;
    bool cached_ = false;
};

} // namespace detail

// One algorithm over one realization.
[[nodiscard]] inline RunResult run_single(const AlgorithmConfig& cfg, const Scenario& scenario,
                                          const CovarianceSplit& cov, std::uint64_t seed) {
    const std::size_t m = scenario.geometry.num_elements;
    const CVector a0 = steering_vector(scenario.geometry, scenario.desired().doa);
    SnapshotStream stream(scenario, stream_seed(seed));
    detail::SinrMeter sinr(cov);

    RunResult out;
    out.seed = seed;
    out.snapshots.reserve(scenario.num_snapshots);

    switch (cfg.kind) {
    case Algorithm::mvdr: {
        const auto w = mvdr_weight(cov.total(), a0, cfg.gamma);
        const double s = output_sinr(w, cov);
        while (stream.next()) out.snapshots.push_back({s, false, 0.0, 0.0});
        out.final_weight = w;
        break;
    }
    case Algorithm::fr_rls: {
        auto st = init_full_rank(m, cfg.gamma, cfg.rho, a0, cfg.lambda1);
        while (auto snap = stream.next()) {
            fr_rls_step(st, snap->x, a0, cfg.lambda1.max);
            out.snapshots.push_back({sinr(st.weight, true), true, cfg.lambda1.max, 0.0});
        }
        out.update_count = st.update_count;
        out.final_weight = st.weight;
        break;
    }
    case Algorithm::fr_sm_rls: {
        auto st = init_full_rank(m, cfg.gamma, cfg.rho, a0, cfg.lambda1);
        detail::BoundDriver bound(cfg, scenario.noise_power, norm_sq(st.weight));
        while (auto snap = stream.next()) {
            const double delta = bound.next(st.weight, snap->x);
            const auto ev = fr_sm_rls_step(st, snap->x, a0, delta);
            out.snapshots.push_back({sinr(st.weight, ev.updated), ev.updated, ev.lambda1, delta});
        }
        out.update_count = st.update_count;
        out.final_weight = st.weight;
        break;
    }
    case Algorithm::jio_rls:
    case Algorithm::jio_sm_rls: {
        auto st = init_state(m, cfg.rank, cfg.gamma, cfg.rho, cfg.varrho, a0, cfg.lambda1);
        CVector w = full_weight(st);
        const bool selective = cfg.kind == Algorithm::jio_sm_rls;
        std::optional<detail::BoundDriver> bound;
        if (selective) bound.emplace(cfg, scenario.noise_power, norm_sq(w));
        while (auto snap = stream.next()) {
            const double delta = selective ? bound->next(w, snap->x) : 0.0;
            const auto ev = selective ? update(st, snap->x, a0, delta) : jio_rls_step(st, snap->x, a0);
            if (ev.updated) w = full_weight(st);
            out.snapshots.push_back({sinr(w, ev.updated), ev.updated, ev.lambda1, delta});
        }
        out.update_count = st.update_count;
        out.final_weight = w;
        break;
    }
    }
    return out;
}

namespace detail {

inline void aggregate(AlgorithmResult& a, std::size_t num_snapshots, SinrAverage mode) {
    a.mean_sinr_db.assign(num_snapshots, 0.0);
    a.mean_update_rate = 0.0;
    if (a.runs.empty()) {
        std::fill(a.mean_sinr_db.begin(), a.mean_sinr_db.end(), std::nan(""));
        return;
    }
    const double k = static_cast<double>(a.runs.size());
    std::size_t updates = 0;
    for (const auto& r : a.runs) {
        updates += r.update_count;
        for (std::size_t i = 0; i < num_snapshots; ++i) {
            const double v = r.snapshots[i].sinr_db;
            a.mean_sinr_db[i] += mode == SinrAverage::db ? v : std::pow(10.0, v / 10.0);
        }
    }
    for (auto& v : a.mean_sinr_db) {
        v /= k;
        if (mode == SinrAverage::linear) v = 10.0 * std::log10(v);
    }
    a.mean_update_rate = static_cast<double>(updates) / (k * static_cast<double>(num_snapshots));
}

} // namespace detail

using ProgressCallback = std::function<void(std::size_t done, std::size_t total)>;

[[nodiscard]] inline ExperimentResult run_experiment(const ExperimentConfig& config, ProgressCallback progress = {}) {
    config.validate();
    const std::size_t runs = config.runs;
    const std::size_t n_alg = config.algorithms.size();

    // slot[run][alg]
    struct Slot {
        std::optional<RunResult> result;
        std::optional<std::string> failure;
    };
    std::vector<std::vector<Slot>> slots(runs, std::vector<Slot>(n_alg));

    std::atomic<std::size_t> next{0};
    std::atomic<std::size_t> done{0};
    std::mutex mutex;
    std::exception_ptr fatal;
    auto worker = [&] {
        for (std::size_t j = next++; j < runs; j = next++) try {
            const std::uint64_t seed = run_seed(config.base_seed, j);
            const Scenario scenario = realize_scenario(config.scenario, seed);
            const CovarianceSplit cov = covariance_split(scenario);
            for (std::size_t a = 0; a < n_alg; ++a) {
                try {
                    auto r = run_single(config.algorithms[a], scenario, cov, seed);
                    r.run = j;
                    slots[j][a].result = std::move(r);
                } catch (const SingularUpdateError& e) {
                    slots[j][a].failure = e.what();
                } catch (const SingularConstraintError& e) {
                    slots[j][a].failure = e.what();
                }
            }
            const std::size_t d = ++done;
            if (progress) {
                std::lock_guard lock(mutex);
                progress(d, runs);
            }
        } catch (...) {
            std::lock_guard lock(mutex);
            if (!fatal) fatal = std::current_exception();
            next = runs;
        }
    };

    std::size_t threads = config.threads ? config.threads : std::max(1u, std::thread::hardware_concurrency());
    threads = std::min(threads, runs);
    if (threads <= 1) {
        worker();
    } else {
        std::vector<std::jthread> pool;
        pool.reserve(threads);
        for (std::size_t t = 0; t < threads; ++t) pool.emplace_back(worker);
    }
    if (fatal) std::rethrow_exception(fatal);

    ExperimentResult out;
    out.config = config;
    out.algorithms.resize(n_alg);
    for (std::size_t a = 0; a < n_alg; ++a) {
        auto& alg = out.algorithms[a];
        alg.config = config.algorithms[a];
        for (std::size_t j = 0; j < runs; ++j) {
            auto& slot = slots[j][a];
            if (slot.result) alg.runs.push_back(std::move(*slot.result));
            else alg.failures.push_back({j, slot.failure.value_or("unknown failure")});
        }
        detail::aggregate(alg, config.scenario.num_snapshots, config.sinr_average);
    }
    return out;
}

} // namespace beamsm
