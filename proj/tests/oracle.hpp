#pragma once

// Test-only helpers: conversions to Eigen (used as an independent dense
// linear-algebra oracle) and seeded random generators.

#include <complex>
#include <random>

#include <Eigen/Dense>

#include "beamsm/linalg.hpp"

namespace oracle {

using EMat = Eigen::MatrixXcd;
using EVec = Eigen::VectorXcd;

inline EMat to_eigen(const beamsm::CMatrix& m) {
    EMat out(m.rows(), m.cols());
    for (std::size_t r = 0; r < m.rows(); ++r)
        for (std::size_t c = 0; c < m.cols(); ++c) out(r, c) = m(r, c);
    return out;
}

inline EVec to_eigen(const beamsm::CVector& v) {
    EVec out(v.size());
    for (std::size_t i = 0; i < v.size(); ++i) out(i) = v[i];
    return out;
}

inline beamsm::CMatrix from_eigen(const EMat& m) {
    beamsm::CMatrix out(m.rows(), m.cols());
    for (Eigen::Index r = 0; r < m.rows(); ++r)
        for (Eigen::Index c = 0; c < m.cols(); ++c) out(r, c) = m(r, c);
    return out;
}

inline beamsm::CVector random_vector(std::mt19937_64& rng, std::size_t n, double scale = 1.0) {
    std::normal_distribution<double> g(0.0, scale);
    beamsm::CVector v(n);
    for (auto& x : v) x = {g(rng), g(rng)};
    return v;
}

// B B^H + n I: well-conditioned Hermitian positive definite.
inline beamsm::CMatrix random_hpd(std::mt19937_64& rng, std::size_t n) {
    std::normal_distribution<double> g(0.0, 1.0);
    EMat b(n, n);
    for (Eigen::Index r = 0; r < b.rows(); ++r)
        for (Eigen::Index c = 0; c < b.cols(); ++c) b(r, c) = {g(rng), g(rng)};
    EMat p = b * b.adjoint() + static_cast<double>(n) * EMat::Identity(n, n);
    return from_eigen(p);
}

inline double max_abs_diff(const EMat& a, const EMat& b) { return (a - b).cwiseAbs().maxCoeff(); }

inline double rel_diff(const EMat& a, const EMat& b) { return (a - b).norm() / b.norm(); }

} // namespace oracle
