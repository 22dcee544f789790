#pragma once

#include <cmath>
#include <cstdint>
#include <numbers>
#include <stdexcept>
#include <vector>

#include <Eigen/Dense>

namespace bendcusp {

using Vec = Eigen::VectorXd;
using Mat = Eigen::MatrixXd;

/// Base class for all library errors.
struct GeometryError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct DimensionError : GeometryError {
    using GeometryError::GeometryError;
};
struct DomainError : GeometryError {
    using GeometryError::GeometryError;
};

/// Relative tolerance used for projective comparisons; mutable global.
inline double& projective_tolerance() {
    static double tol = 1e-9;
    return tol;
}

/// Lebesgue volume of the unit d-ball.
inline double unit_ball_volume(int d) {
    return std::pow(std::numbers::pi, d / 2.0) / std::tgamma(d / 2.0 + 1.0);
}

// ---------------------------------------------------------------------------
// Deterministic RNG. All randomized estimators in the library derive their
// streams from (seed, shard) pairs through this generator so results are
// reproducible regardless of scheduling.

struct SplitMix64 {
    std::uint64_t state;

    explicit SplitMix64(std::uint64_t seed) : state(seed) {}
    SplitMix64(std::uint64_t seed, std::uint64_t shard)
        : state(seed ^ (0x9e3779b97f4a7c15ULL * (shard + 1))) {
        next();
    }

    std::uint64_t next() {
        std::uint64_t z = (state += 0x9e3779b97f4a7c15ULL);
        z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
        z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
        return z ^ (z >> 31);
    }

    /// Uniform in (0,1).
    double uniform() {
        return (static_cast<double>(next() >> 11) + 0.5) * 0x1.0p-53;
    }

    double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

    /// Standard normal via Box-Muller.
    double gaussian() {
        double u1 = uniform();
        double u2 = uniform();
        return std::sqrt(-2.0 * std::log(u1)) *
               std::cos(2.0 * std::numbers::pi * u2);
    }

    Vec gaussian_vector(int n) {
        Vec v(n);
        for (int i = 0; i < n; ++i) v[i] = gaussian();
        return v;
    }

    /// Uniform direction on S^{n-1}.
    Vec direction(int n) {
        Vec v = gaussian_vector(n);
        double norm = v.norm();
        while (norm < 1e-12) {
            v = gaussian_vector(n);
            norm = v.norm();
        }
        return v / norm;
    }
};

namespace detail {

inline double halton(std::uint64_t index, std::uint32_t base) {
    double f = 1.0, r = 0.0;
    while (index > 0) {
        f /= base;
        r += f * static_cast<double>(index % base);
        index /= base;
    }
    return r;
}

} // namespace detail

/// Deterministic low-discrepancy direction set on S^{d-1}. For d == 2 the
/// set is the exact uniform angular grid (trapezoidal quadrature on the
/// circle); for d >= 3 Halton points are pushed through Box-Muller and
/// normalized.
inline std::vector<Vec> sphere_directions(int d, int count) {
    if (d < 2) throw DimensionError("sphere_directions: need d >= 2");
    std::vector<Vec> dirs;
    dirs.reserve(count);
    if (d == 2) {
        for (int k = 0; k < count; ++k) {
            double a = 2.0 * std::numbers::pi * (k + 0.5) / count;
            Vec v(2);
            v << std::cos(a), std::sin(a);
            dirs.push_back(v);
        }
        return dirs;
    }
    static const std::uint32_t bases[] = {2, 3, 5, 7, 11, 13, 17, 19};
    int pairs = (d + 1) / 2;
    for (int k = 0; k < count; ++k) {
        Vec v(d);
        for (int p = 0; p < pairs; ++p) {
            double u1 = detail::halton(k + 1, bases[2 * p]);
            double u2 = detail::halton(k + 1, bases[2 * p + 1]);
            u1 = std::max(u1, 1e-16);
            double r = std::sqrt(-2.0 * std::log(u1));
            double a = 2.0 * std::numbers::pi * u2;
            v[2 * p] = r * std::cos(a);
            if (2 * p + 1 < d) v[2 * p + 1] = r * std::sin(a);
        }
        double norm = v.norm();
        if (norm < 1e-12) {
            v.setZero();
            v[0] = 1.0;
            norm = 1.0;
        }
        dirs.push_back(v / norm);
    }
    return dirs;
}

} // namespace bendcusp
