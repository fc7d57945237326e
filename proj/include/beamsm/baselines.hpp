#pragma once

// Reference beamformers: the exact MVDR solution, full-rank constrained RLS
// with a constant weighting, its set-membership variant, and JIO-RLS (the
// reduced-rank recursion updating on every snapshot).
//
// The full-rank recursions are the r = m, T_r = I specialisation of the
// reduced-rank one: w(i) = gamma P(i) a0 / (a0^H P(i) a0).

#include <string>
#include <string_view>

#include "beamsm/errors.hpp"
#include "beamsm/jio_sm_rls.hpp"
#include "beamsm/linalg.hpp"

namespace beamsm {

enum class Algorithm { mvdr, fr_rls, fr_sm_rls, jio_rls, jio_sm_rls };

[[nodiscard]] inline std::string_view to_string(Algorithm a) noexcept {
    switch (a) {
    case Algorithm::mvdr: return "mvdr";
    case Algorithm::fr_rls: return "fr_rls";
    case Algorithm::fr_sm_rls: return "fr_sm_rls";
    case Algorithm::jio_rls: return "jio_rls";
    case Algorithm::jio_sm_rls: return "jio_sm_rls";
    }
    return "?";
}

[[nodiscard]] inline bool is_set_membership(Algorithm a) noexcept {
    return a == Algorithm::fr_sm_rls || a == Algorithm::jio_sm_rls;
}

// gamma R^{-1} a0 / (a0^H R^{-1} a0)
[[nodiscard]] inline CVector mvdr_weight(const CMatrix& r, const CVector& a0, double gamma) {
    CVector z;
    try {
        z = cholesky_solve(r, a0);
    } catch (const SingularUpdateError&) {
        throw SingularConstraintError("mvdr_weight: covariance is singular or not positive definite");
    }
    const cdouble denom = dot(a0, z);
    if (std::abs(denom) < tol::singular) throw SingularConstraintError("mvdr_weight: a0^H R^-1 a0 vanished");
    z *= gamma / denom;
    return z;
}

struct FullRankState {
    CMatrix p;
    CVector weight;
    double gamma = 1.0;
    Lambda1Options lambda1;
    double last_lambda1 = 0.0;
    std::size_t update_count = 0;
    std::size_t snapshot_count = 0;
};

// P(0) = rho I, so w(0) = gamma a0 / ||a0||^2.
[[nodiscard]] inline FullRankState init_full_rank(std::size_t m, double gamma, double rho, const CVector& a0,
                                                  Lambda1Options lambda1 = {}) {
    if (a0.size() != m) throw DimensionError("steering vector length differs from element count");
    if (!(rho > 0.0)) throw ParameterError("rho must be positive");
    lambda1.validate();
    FullRankState s;
    s.p = CMatrix::identity(m, rho);
    s.weight = constrained_direction(s.p, a0, gamma, "a0^H P a0 vanished");
    s.gamma = gamma;
    s.lambda1 = lambda1;
    s.last_lambda1 = lambda1.max;
    return s;
}

namespace detail {
inline void full_rank_update(FullRankState& s, const CVector& x, const CVector& a0, double lambda1) {
    const auto k = gain_vector(s.p, x, lambda1);
    CMatrix p = hermitian_regularize(inverse_update(s.p, k, x, lambda1));
    s.weight = constrained_direction(p, a0, s.gamma, "a0^H P a0 vanished");
    s.p = std::move(p);
    s.last_lambda1 = lambda1;
    ++s.update_count;
}
} // namespace detail

inline constexpr double kFrRlsWeighting = 0.998;

// Updates on every snapshot with a constant lambda1.
inline void fr_rls_step(FullRankState& s, const CVector& x, const CVector& a0, double lambda1 = kFrRlsWeighting) {
    if (x.size() != s.p.rows() || a0.size() != s.p.rows()) throw DimensionError("fr_rls_step: length mismatch");
    const std::size_t index = ++s.snapshot_count;
    try {
        detail::full_rank_update(s, x, a0, lambda1);
    } catch (const SingularUpdateError& e) {
        throw e.at(index);
    } catch (const SingularConstraintError& e) {
        throw SingularConstraintError(e.what(), index);
    }
}

inline UpdateEvent fr_sm_rls_step(FullRankState& s, const CVector& x, const CVector& a0, double delta) {
    if (x.size() != s.p.rows() || a0.size() != s.p.rows()) throw DimensionError("fr_sm_rls_step: length mismatch");
    UpdateEvent ev;
    ev.snapshot_index = ++s.snapshot_count;
    ev.y_mag_sq = std::norm(dot(s.weight, x));
    ev.delta_sq = delta * delta;
    if (ev.y_mag_sq < ev.delta_sq) return ev;
    try {
        const double l = s.lambda1.gain_policy == GainPolicy::unit ? 1.0 : s.last_lambda1;
        const auto res = lambda1_from_constraint(s.p, a0, x, gain_vector(s.p, x, l), delta, s.gamma, s.lambda1);
        detail::full_rank_update(s, x, a0, res.value);
        ev.updated = true;
        ev.lambda1 = res.value;
        ev.degenerate = res.degenerate;
    } catch (const SingularUpdateError& e) {
        throw e.at(ev.snapshot_index);
    } catch (const SingularConstraintError& e) {
        throw SingularConstraintError(e.what(), ev.snapshot_index);
    }
    return ev;
}

// JIO-RLS: the reduced-rank recursion with the membership test disabled and
// lambda1 pinned at the top of its range.
inline UpdateEvent jio_rls_step(JioSmState& s, const CVector& x, const CVector& a0) {
    return update(s, x, a0, 0.0, UpdateOverrides{true, s.lambda1.max});
}

} // namespace beamsm
