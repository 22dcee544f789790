#pragma once

/// Hilbert metric, Finsler norm, and Busemann volume on convex domain
/// oracles.  Distances come from chord cross-ratios evaluated with affine
/// chord parameters, which handles ideal chord endpoints (the corresponding
/// cross-ratio factors tend to 1 and are dropped exactly).

#include "numeric.hpp"
#include "domain.hpp"

#include <cmath>
#include <functional>
#include <vector>

namespace bendcusp {

struct ContainmentError : GeometryError {
    using GeometryError::GeometryError;
};

/// d_Omega(x, y) = (1/2) log [p : x : y : q] along the chord through x, y.
inline double hilbert_distance(const ConvexDomain& omega,
                               const ProjectivePoint& x,
                               const ProjectivePoint& y) {
    Vec ux = omega.chart(x);
    Vec uy = omega.chart(y);
    if (omega.defining(ux) <= 0 || omega.defining(uy) <= 0)
        throw DomainError("hilbert_distance: points must be interior");
    double sep = (uy - ux).norm();
    if (sep == 0.0) return 0.0;
    auto [minus, plus] = omega.boundary_hit(x, uy - ux);
    // Chord parameters: p at s_m < 0, x at 0, y at sep, q at s_p > sep.
    double ratio = 1.0;
    if (plus.finite) ratio *= plus.parameter / (plus.parameter - sep);
    if (minus.finite) ratio *= (sep - minus.parameter) / (-minus.parameter);
    return 0.5 * std::log(ratio);
}

/// F(x, v) = (|v|/2) (1/|x p^-| + 1/|x p^+|) in the oracle's chart.
inline double finsler_norm(const ConvexDomain& omega,
                           const ProjectivePoint& x, const Vec& v) {
    if (v.norm() == 0.0) throw ZeroVector("finsler_norm: zero vector");
    auto [minus, plus] = omega.boundary_hit(x, v);
    double inv = 0.0;
    if (plus.finite) inv += 1.0 / plus.parameter;
    if (minus.finite) inv += 1.0 / (-minus.parameter);
    return 0.5 * v.norm() * inv;
}

/// Lebesgue volume of the unit Finsler ball B_x(1), by radial integration
/// over a deterministic low-discrepancy direction set.  An anisotropic
/// diagonal preconditioner (the axis radii) tames the variance of very
/// eccentric balls near the boundary.
inline double busemann_unit_ball_volume(const ConvexDomain& omega,
                                        const ProjectivePoint& x,
                                        int directions = 2048) {
    int d = omega.dim();
    if (d == 1) {
        Vec e = Vec::Ones(1);
        return 2.0 / finsler_norm(omega, x, e);
    }
    Vec radii(d);
    for (int i = 0; i < d; ++i) {
        Vec e = Vec::Zero(d);
        e[i] = 1.0;
        radii[i] = 1.0 / finsler_norm(omega, x, e);
    }
    double det = radii.prod();
    double acc = 0.0;
    std::vector<Vec> dirs = sphere_directions(d, directions);
    for (const Vec& u : dirs) {
        Vec w = radii.cwiseProduct(u);
        acc += std::pow(finsler_norm(omega, x, w), -d);
    }
    return det * unit_ball_volume(d) * acc / directions;
}

/// Axis-aligned box with an optional membership predicate, describing a
/// Borel region inside a chart.
struct BoxRegion {
    Vec lo;
    Vec hi;
    std::function<bool(const Vec&)> contains;  ///< optional; empty = whole box

    double box_volume() const { return (hi - lo).prod(); }
    bool inside(const Vec& u) const { return !contains || contains(u); }
};

struct VolumeEstimate {
    double value = 0.0;
    double standard_error = 0.0;
    long long sample_count = 0;
    std::uint64_t rng_seed = 0;
};

/// Monte-Carlo Busemann volume of A (a chart region) inside omega:
/// integral over A of alpha_d / mu_L(B_z(1)).  Deterministic per seed;
/// shards derive independent streams so parallel order cannot matter.
inline VolumeEstimate
busemann_volume(const ConvexDomain& omega, const BoxRegion& region,
                long long samples, std::uint64_t seed,
                int directions = 256,
                const std::function<double(const Vec&)>* density_override =
                    nullptr) {
    int d = omega.dim();
    double boxvol = region.box_volume();
    double sum = 0.0, sumsq = 0.0;
    SplitMix64 rng(seed, /*shard=*/0);
    for (long long k = 0; k < samples; ++k) {
        Vec z(d);
        for (int i = 0; i < d; ++i)
            z[i] = rng.uniform(region.lo[i], region.hi[i]);
        double g = 0.0;
        if (region.inside(z) && omega.defining(z) > 0) {
            if (density_override) {
                g = (*density_override)(z);
            } else {
                double ball =
                    busemann_unit_ball_volume(omega, omega.unchart(z),
                                              directions);
                g = unit_ball_volume(d) / ball;
            }
        }
        sum += g;
        sumsq += g * g;
    }
    VolumeEstimate out;
    out.sample_count = samples;
    out.rng_seed = seed;
    if (samples == 0) return out;
    double mean = sum / samples;
    double var = std::max(0.0, sumsq / samples - mean * mean);
    out.value = boxvol * mean;
    out.standard_error = boxvol * std::sqrt(var / samples);
    return out;
}

struct ComparisonReport {
    int pairs = 0;
    double max_violation = 0.0;  ///< max of d_outer - d_inner over samples
    bool ok = false;
};

/// Check d_{Omega2} <= d_{Omega1} + tol for Omega1 inside Omega2 on sampled
/// interior pairs of Omega1 drawn from `box` by rejection.
inline ComparisonReport
metric_comparison_check(const ConvexDomain& inner, const ConvexDomain& outer,
                        const BoxRegion& box, int pairs, std::uint64_t seed,
                        double tol = 1e-9) {
    int d = inner.dim();
    SplitMix64 rng(seed, 1);
    auto draw = [&]() {
        for (int tries = 0; tries < 100000; ++tries) {
            Vec u(d);
            for (int i = 0; i < d; ++i)
                u[i] = rng.uniform(box.lo[i], box.hi[i]);
            if (inner.defining(u) > 0) return u;
        }
        throw DomainError("metric_comparison_check: sampling box misses the "
                          "inner domain");
    };
    ComparisonReport rep;
    rep.pairs = pairs;
    for (int k = 0; k < pairs; ++k) {
        Vec a = draw(), b = draw();
        ProjectivePoint pa = inner.unchart(a), pb = inner.unchart(b);
        if (outer.membership(pa) != Region::Interior ||
            outer.membership(pb) != Region::Interior)
            throw ContainmentError("metric_comparison_check: sampled point of "
                                   "the inner domain is not inside the outer "
                                   "domain");
        double di = hilbert_distance(inner, pa, pb);
        double dout = hilbert_distance(outer, pa, pb);
        rep.max_violation = std::max(rep.max_violation, dout - di);
    }
    rep.ok = rep.max_violation <= tol;
    return rep;
}

}  // namespace bendcusp
