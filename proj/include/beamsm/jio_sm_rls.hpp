#pragma once

// Reduced-rank set-membership LCMV beamformer with jointly updated projection
// matrix T_r and reduced-rank weight w_bar (JIO-SM-RLS).
//
// Per snapshot x(i):
//   x_bar = T_r^H x, y = w_bar^H x_bar
//   if |y|^2 >= delta^2(i):
//       lambda1 from the output-magnitude constraint, clamped
//       k = P x / (1 + lambda1 x^H P x);   P -= lambda1 k x^H P
//       T_r = gamma P a0 / (a0^H P a0) * w_bar^H / ||w_bar||^2   (previous w_bar)
//       a_bar = T_r^H a0, x_bar = T_r^H x                        (new T_r)
//       k_bar, P_bar likewise in r dimensions
//       w_bar = gamma P_bar a_bar / (a_bar^H P_bar a_bar)
//   otherwise nothing changes.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <optional>

#include "beamsm/errors.hpp"
#include "beamsm/linalg.hpp"

namespace beamsm {

// Which gain enters the lambda1 expression, which itself feeds the gain.
enum class GainPolicy {
    unit,     // provisional gain computed with lambda1 = 1
    previous, // provisional gain computed with the last accepted lambda1
};

struct Lambda1Options {
    double min = 0.1;
    double max = 0.998;
    GainPolicy gain_policy = GainPolicy::unit;
    bool delta_squared = false; // use delta^2 instead of delta in the numerator

    void validate() const {
        if (!(min > 0.0 && min <= max && max <= 1.0)) throw ParameterError("lambda1 range must satisfy 0 < min <= max <= 1");
    }
};

struct JioSmState {
    CMatrix projection;    // T_r, m x r
    CVector reduced_weight; // w_bar, r
    CMatrix p;             // inverse full-rank correlation, m x m
    CMatrix p_bar;         // inverse reduced-rank correlation, r x r
    double gamma = 1.0;
    std::size_t rank = 0;
    Lambda1Options lambda1;
    double last_lambda1 = 0.0;
    std::size_t update_count = 0;
    std::size_t snapshot_count = 0;

    [[nodiscard]] std::size_t num_elements() const noexcept { return projection.rows(); }

    // Algorithmic state only (counters excluded).
    [[nodiscard]] bool same_parameters(const JioSmState& o) const {
        return projection == o.projection && reduced_weight == o.reduced_weight && p == o.p && p_bar == o.p_bar &&
               last_lambda1 == o.last_lambda1;
    }

    bool operator==(const JioSmState&) const = default;
};

struct UpdateEvent {
    std::size_t snapshot_index = 0;
    bool updated = false;
    double y_mag_sq = 0.0;
    double delta_sq = 0.0;
    double lambda1 = 0.0;
    bool degenerate = false; // lambda1 denominator vanished, lambda_max used
};

struct Lambda1Result {
    double value = 0.0;
    double raw = 0.0; // real part before clamping
    bool degenerate = false;
};

// Lagrange multiplier of the output-magnitude constraint
//   a^H P [d a - gamma^2 x] / (a^H k x^H P [d a - gamma^2 x]),  d = delta or delta^2,
// real part, clamped into the configured range. A vanishing denominator yields
// the range maximum.
[[nodiscard]] inline Lambda1Result lambda1_from_constraint(const CMatrix& p, const CVector& a0, const CVector& x,
                                                           const CVector& k, double delta, double gamma,
                                                           const Lambda1Options& options) {
    const double d = options.delta_squared ? delta * delta : delta;
    CVector v(a0.size());
    for (std::size_t n = 0; n < v.size(); ++n) v[n] = d * a0[n] - gamma * gamma * x[n];
    const auto pv = p * v;
    const cdouble numer = dot(a0, pv);
    const cdouble denom = dot(a0, k) * dot(x, pv);
    if (std::abs(denom) < tol::singular) return {options.max, std::nan(""), true};
    const double raw = (numer / denom).real();
    return {std::clamp(raw, options.min, options.max), raw, false};
}

[[nodiscard]] inline JioSmState init_state(std::size_t m, std::size_t r, double gamma, double rho, double varrho,
                                           const CVector& a0, Lambda1Options lambda1 = {}) {
    if (r < 1 || r > m) throw ParameterError("rank must satisfy 1 <= r <= m");
    if (!(rho > 0.0) || !(varrho > 0.0)) throw ParameterError("rho and varrho must be positive");
    if (a0.size() != m) throw DimensionError("steering vector length differs from element count");
    lambda1.validate();

    JioSmState s;
    s.projection = CMatrix(m, r);
    for (std::size_t l = 0; l < r; ++l) s.projection(l, l) = 1.0;
    const auto a_bar = adjoint_times(s.projection, a0);
    const double norm = norm_sq(a_bar);
    if (!(norm > tol::singular)) throw ParameterError("truncated steering vector vanishes; cannot initialise");
    s.reduced_weight = CVector(r);
    for (std::size_t l = 0; l < r; ++l) s.reduced_weight[l] = gamma * a_bar[l] / norm;
    s.p = CMatrix::identity(m, rho);
    s.p_bar = CMatrix::identity(r, varrho);
    s.gamma = gamma;
    s.rank = r;
    s.lambda1 = lambda1;
    s.last_lambda1 = lambda1.max;
    return s;
}

struct FilterOutput {
    cdouble y;
    CVector x_bar;
};

[[nodiscard]] inline FilterOutput filter_output(const JioSmState& state, const CVector& x) {
    if (x.size() != state.num_elements()) throw DimensionError("snapshot length differs from element count");
    auto x_bar = adjoint_times(state.projection, x);
    const auto y = dot(state.reduced_weight, x_bar);
    return {y, std::move(x_bar)};
}

// True when |y|^2 <= delta^2, i.e. the current pair already lies in the
// constraint set for this snapshot.
[[nodiscard]] inline bool check_membership(const JioSmState& state, const CVector& x, double delta) {
    if (!(delta >= 0.0)) throw ParameterError("bound must be non-negative");
    return std::norm(filter_output(state, x).y) <= delta * delta;
}

[[nodiscard]] inline CVector provisional_gain(const JioSmState& state, const CVector& x) {
    const double l = state.lambda1.gain_policy == GainPolicy::unit ? 1.0 : state.last_lambda1;
    return gain_vector(state.p, x, l);
}

// Zero outside the update branch (|y|^2 < delta^2).
[[nodiscard]] inline Lambda1Result compute_lambda1(const JioSmState& state, const CVector& x, const CVector& a0,
                                                   double delta, const CVector& k_prev) {
    if (std::norm(filter_output(state, x).y) < delta * delta) return {};
    return lambda1_from_constraint(state.p, a0, x, k_prev, delta, state.gamma, state.lambda1);
}

// gamma P a / (a^H P a)
[[nodiscard]] inline CVector constrained_direction(const CMatrix& p, const CVector& a, double gamma,
                                                   const char* what) {
    auto pa = p * a;
    const cdouble denom = dot(a, pa);
    if (std::abs(denom) < tol::singular) throw SingularConstraintError(what);
    pa *= gamma / denom;
    return pa;
}

struct UpdateOverrides {
    bool force_update = false;            // skip the membership test
    std::optional<double> fixed_lambda1;  // bypass the constraint-derived lambda1
};

inline UpdateEvent update(JioSmState& state, const CVector& x, const CVector& a0, double delta,
                          const UpdateOverrides& overrides = {}) {
    if (a0.size() != state.num_elements()) throw DimensionError("steering vector length differs from element count");
    const std::size_t index = ++state.snapshot_count;

    UpdateEvent ev;
    ev.snapshot_index = index;
    const auto out = filter_output(state, x);
    ev.y_mag_sq = std::norm(out.y);
    ev.delta_sq = delta * delta;
    if (!overrides.force_update && ev.y_mag_sq < ev.delta_sq) return ev;

    try {
        double lambda1 = 0.0;
        if (overrides.fixed_lambda1) {
            lambda1 = *overrides.fixed_lambda1;
        } else {
            const auto res = lambda1_from_constraint(state.p, a0, x, provisional_gain(state, x), delta, state.gamma,
                                                     state.lambda1);
            lambda1 = res.value;
            ev.degenerate = res.degenerate;
        }

        // Full-rank inverse correlation and the projection matrix built from
        // the previous reduced-rank weight.
        const auto k = gain_vector(state.p, x, lambda1);
        CMatrix p = hermitian_regularize(inverse_update(state.p, k, x, lambda1));
        const auto f = constrained_direction(p, a0, state.gamma, "a0^H P a0 vanished");
        const double w_norm = norm_sq(state.reduced_weight);
        if (!(w_norm > tol::singular)) throw SingularConstraintError("reduced-rank weight vanished");
        CMatrix projection(f.size(), state.rank);
        for (std::size_t n = 0; n < f.size(); ++n)
            for (std::size_t l = 0; l < state.rank; ++l)
                projection(n, l) = f[n] * std::conj(state.reduced_weight[l]) / w_norm;

        // Reduced-rank quantities recomputed with the new projection.
        const auto a_bar = adjoint_times(projection, a0);
        const auto x_bar = adjoint_times(projection, x);
        const auto k_bar = gain_vector(state.p_bar, x_bar, lambda1);
        CMatrix p_bar = hermitian_regularize(inverse_update(state.p_bar, k_bar, x_bar, lambda1));
        auto w_bar = constrained_direction(p_bar, a_bar, state.gamma, "a_bar^H P_bar a_bar vanished");

        state.p = std::move(p);
        state.projection = std::move(projection);
        state.p_bar = std::move(p_bar);
        state.reduced_weight = std::move(w_bar);
        state.last_lambda1 = lambda1;
        ++state.update_count;
        ev.updated = true;
        ev.lambda1 = lambda1;
    } catch (const SingularUpdateError& e) {
        throw e.at(index);
    } catch (const SingularConstraintError& e) {
        throw SingularConstraintError(e.what(), index);
    }
    return ev;
}

// w = T_r w_bar
[[nodiscard]] inline CVector full_weight(const JioSmState& state) { return state.projection * state.reduced_weight; }

} // namespace beamsm
