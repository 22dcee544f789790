#pragma once

/// Model cusp geometry: the bent group B_d and its domain, the degenerate
/// companions P'_d and B'_d with their affine-line witnesses, boundary
/// sections, the deep-simplex length formulas, and shell-volume estimation
/// for standard and bent cusps.

#include "numeric.hpp"
#include "projective.hpp"
#include "hyperbolic.hpp"
#include "domain.hpp"
#include "hilbert.hpp"

#include <algorithm>
#include <cmath>
#include <memory>
#include <vector>

namespace bendcusp {

struct NotYetDeep : GeometryError {
    using GeometryError::GeometryError;
};
struct LatticeError : GeometryError {
    using GeometryError::GeometryError;
};

/// Horosphere level of a chart point of B^d: g-value x + log y - |v|^2/2,
/// constant along B_d-orbits.
inline double bent_level(const Vec& u) {
    int d = static_cast<int>(u.size());
    if (u[1] <= 0) throw DomainError("bent_level: need y > 0");
    double v2 = d > 2 ? u.tail(d - 2).squaredNorm() : 0.0;
    return u[0] + std::log(u[1]) - 0.5 * v2;
}

/// Horosphere level of a chart point of the paraboloid model:
/// x - |v|^2/2.
inline double standard_level(const Vec& u) {
    int d = static_cast<int>(u.size());
    return u[0] - 0.5 * u.tail(d - 1).squaredNorm();
}

/// Element (b, v) of B_d: dilation log b and translation v of length d-2.
/// Group law (b1,v1)(b2,v2) = (b1+b2, v1+v2).
inline ProjectiveMap bent_group_element(double b, const Vec& v) {
    int d = static_cast<int>(v.size()) + 2;
    Mat m = Mat::Identity(d + 1, d + 1);
    m(0, d) = 0.5 * v.squaredNorm() - b;
    m(1, 1) = std::exp(b);
    if (d > 2) {
        m.block(0, 2, 1, d - 2) = v.transpose();
        m.block(2, d, d - 2, 1) = v;
    }
    return ProjectiveMap(m);
}

/// Chart form of the B_d action: (x, y, w) -> (x + v.w + |v|^2/2 - b,
/// e^b y, w + v).
inline Vec bent_apply_chart(double b, const Vec& v, const Vec& u) {
    int d = static_cast<int>(u.size());
    Vec out = u;
    double vw = d > 2 ? v.dot(u.tail(d - 2)) : 0.0;
    out[0] = u[0] + vw + 0.5 * v.squaredNorm() - b;
    out[1] = std::exp(b) * u[1];
    if (d > 2) out.tail(d - 2) = u.tail(d - 2) + v;
    return out;
}

/// Element (a, u) of P'_d; preserves the degenerate companion form Q'_d.
inline Mat degenerate_p_matrix(double a, const Vec& u) {
    int d = static_cast<int>(u.size()) + 2;
    Mat m = Mat::Identity(d + 1, d + 1);
    m(0, 1) = a;
    m(0, d) = 0.5 * (u.squaredNorm() - a * a);
    m(1, d) = -a;
    if (d > 2) {
        m.block(0, 2, 1, d - 2) = u.transpose();
        m.block(2, d, d - 2, 1) = u;
    }
    return m;
}
inline ProjectiveMap degenerate_p_element(double a, const Vec& u) {
    return ProjectiveMap(degenerate_p_matrix(a, u));
}

/// Element (t, u) of B'_d (the degenerate companion of B_d).
inline Mat degenerate_b_matrix(double t, const Vec& u) {
    int d = static_cast<int>(u.size()) + 2;
    Mat m = Mat::Identity(d + 1, d + 1);
    m(0, d) = 0.5 * u.squaredNorm() + t;
    m(1, 1) = std::exp(t);
    if (d > 2) {
        m.block(0, 2, 1, d - 2) = u.transpose();
        m.block(2, d, d - 2, 1) = u;
    }
    return m;
}
inline ProjectiveMap degenerate_b_element(double t, const Vec& u) {
    return ProjectiveMap(degenerate_b_matrix(t, u));
}

/// The two-dimensional section of B^d by the plane spanned by a finite
/// boundary point x and the ideal segment s_infinity (v is frozen at its
/// value at x).
inline PlaneSliceDomain omega_x_section(const ProjectivePoint& x, int d) {
    const Vec& c = x.coords();
    if (std::abs(c[d]) < 1e-10)
        throw DegenerateSection("omega_x_section: point lies on the ideal "
                                "segment");
    auto bent = std::make_shared<BentDomain>(d);
    Vec u = bent->chart(x);
    if (std::abs(bent->defining(u)) > 1e-7)
        throw DomainError("omega_x_section: point must lie on the boundary");
    Vec origin = Vec::Zero(d);
    if (d > 2) origin.tail(d - 2) = u.tail(d - 2);
    Vec e = Vec::Unit(d, 0);
    Vec f = Vec::Unit(d, 1);
    return PlaneSliceDomain(bent, origin, e, f);
}

enum class DegenerateVariant { PPrime, BPrime };

struct DegenerateWitness {
    std::vector<Vec> seq_plus;   ///< continuous sphere lifts limiting to +e1
    std::vector<Vec> seq_minus;  ///< lifts limiting to -e1
    double residual_plus = 0.0;
    double residual_minus = 0.0;
};

namespace detail {

inline Vec lattice_point_near(const std::vector<Vec>& basis,
                              const Vec& target) {
    int n = static_cast<int>(basis.size());
    int dim = static_cast<int>(basis[0].size());
    Mat b(dim, n);
    for (int i = 0; i < n; ++i) b.col(i) = basis[i];
    Vec coef = b.fullPivLu().solve(target);
    Vec out = Vec::Zero(dim);
    for (int i = 0; i < n; ++i)
        out += std::llround(coef[i]) * basis[i];
    return out;
}

}  // namespace detail

/// Constructs the two divergent lattice orbits whose sphere lifts converge
/// to the antipodal ideal points [e1] and [-e1], certifying that the lattice
/// preserves no properly convex open set.  The parameter space is (a, u) for
/// P'_d and (t, u) for B'_d; the basis must span it.
inline DegenerateWitness
degenerate_affine_line_witness(DegenerateVariant variant,
                               const std::vector<Vec>& basis, int steps = 41) {
    if (basis.empty())
        throw LatticeError("degenerate_affine_line_witness: empty basis");
    int dim = static_cast<int>(basis[0].size());  // = d - 1
    int d = dim + 1;
    Mat b(dim, static_cast<int>(basis.size()));
    for (size_t i = 0; i < basis.size(); ++i) b.col(static_cast<int>(i)) = basis[i];
    if (Eigen::FullPivLU<Mat>(b).rank() < dim)
        throw LatticeError("degenerate_affine_line_witness: basis does not "
                           "span the parameter space");

    auto element = [&](const Vec& p) {
        double head = p[0];
        Vec u = p.tail(dim - 1);
        return variant == DegenerateVariant::PPrime
                   ? degenerate_p_matrix(head, u)
                   : degenerate_b_matrix(head, u);
    };
    // Base point: avoid the kernel of the relevant linear functional so the
    // orbit actually escapes.
    Vec base = Vec::Zero(d + 1);
    base[d] = 1.0;
    if (variant == DegenerateVariant::BPrime) base[1] = 1.0;

    auto run = [&](const Vec& direction) {
        std::vector<Vec> seq;
        Vec prev;
        for (int n = 0; n < steps; ++n) {
            Vec target = std::pow(2.0, n) * direction;
            Vec p = detail::lattice_point_near(basis, target);
            Vec img = element(p) * base;
            img.normalize();
            if (!seq.empty() && img.dot(prev) < 0) img = -img;
            seq.push_back(img);
            prev = img;
        }
        return seq;
    };

    // +e1 escape: grow the translation part u; -e1 escape: grow the head
    // parameter (a or t), toward -infinity in the B' case.
    Vec dir_plus = Vec::Zero(dim);
    if (dim > 1) dir_plus[1] = 1.0;
    else dir_plus[0] = 1.0;  // d = 2 fallback: no u directions exist
    Vec dir_minus = Vec::Zero(dim);
    dir_minus[0] = variant == DegenerateVariant::BPrime ? -1.0 : 1.0;

    DegenerateWitness w;
    w.seq_plus = run(dir_plus);
    w.seq_minus = run(dir_minus);
    Vec e1 = Vec::Unit(d + 1, 0);
    Vec lift_plus = w.seq_plus.back();
    Vec lift_minus = w.seq_minus.back();
    // The plus sequence should head to +e1; align the global sign of each
    // *sequence* (a single lift choice), not of individual terms.
    if (lift_plus.dot(e1) < 0) {
        for (Vec& v : w.seq_plus) v = -v;
        lift_plus = w.seq_plus.back();
    }
    w.residual_plus = (lift_plus - e1).norm();
    w.residual_minus = (lift_minus + e1).norm();
    return w;
}

/// Deep-cusp simplex at z0 = (x0, y0, v0) in the bent domain.
struct CuspSimplex {
    std::vector<Vec> offsets;        ///< d+1 vertex offsets, first is 0
    std::vector<double> finsler;     ///< oracle norms of the d edge vectors
    std::vector<double> formula;     ///< closed-form norms, same order
    double lebesgue = 0.0;           ///< Lebesgue volume of the simplex
};

/// Closed-form edge norms of the deep simplex (x-edge, y-edge, v-edge along
/// v0, v-edge perpendicular to v0).
inline double cusp_length1(double x0, double y0, const Vec& v0) {
    return x0 / (2 * x0 - v0.squaredNorm() + 2 * std::log(y0));
}
inline double cusp_length2(double x0, double y0, const Vec& v0, double eps) {
    return eps / (2 * (y0 - std::exp(0.5 * v0.squaredNorm() - x0)));
}
inline double cusp_length3(double x0, double y0, const Vec& v0) {
    double s = x0 + std::log(y0);
    return std::sqrt(2 * x0 * s) / (2 * s - v0.squaredNorm());
}
inline double cusp_length4(double x0, double y0, const Vec& v0) {
    return std::sqrt(x0) /
           std::sqrt(2 * (x0 + std::log(y0) - 0.5 * v0.squaredNorm()));
}

inline CuspSimplex cusp_simplex(const Vec& z0, double eps) {
    int d = static_cast<int>(z0.size());
    BentDomain bent(d);
    if (bent.defining(z0) <= 0)
        throw DomainError("cusp_simplex: base point not interior");
    double x0 = z0[0], y0 = z0[1];
    Vec v0 = d > 2 ? Vec(z0.tail(d - 2)) : Vec(Vec::Zero(0));

    CuspSimplex s;
    s.offsets.push_back(Vec::Zero(d));
    std::vector<Vec> edges;
    Vec w1 = Vec::Zero(d);
    w1[0] = x0;
    edges.push_back(w1);
    s.formula.push_back(cusp_length1(x0, y0, v0));
    Vec w2 = Vec::Zero(d);
    w2[1] = eps;
    edges.push_back(w2);
    s.formula.push_back(cusp_length2(x0, y0, v0, eps));
    if (d > 2) {
        // Orthonormal v-frame adapted to v0: first vector along v0.
        Mat frame = Mat::Identity(d - 2, d - 2);
        bool along_v0 = v0.norm() > 1e-12;
        if (along_v0) {
            Mat col = v0;
            Eigen::HouseholderQR<Mat> qr(col);
            frame = qr.householderQ() * Mat::Identity(d - 2, d - 2);
            if (frame.col(0).dot(v0) < 0) frame = -frame;
        }
        for (int i = 0; i < d - 2; ++i) {
            Vec w = Vec::Zero(d);
            w.tail(d - 2) = std::sqrt(x0) * frame.col(i);
            edges.push_back(w);
            s.formula.push_back(along_v0 && i == 0
                                    ? cusp_length3(x0, y0, v0)
                                    : cusp_length4(x0, y0, v0));
        }
    }
    ProjectivePoint p0 = bent.unchart(z0);
    double leb = 1.0;
    for (const Vec& e : edges) {
        s.finsler.push_back(finsler_norm(bent, p0, e));
        s.offsets.push_back(e);
        leb *= e.norm();
    }
    for (int k = 2; k <= d; ++k) leb /= k;
    s.lebesgue = leb;
    for (double f : s.finsler)
        if (f >= 1.0)
            throw NotYetDeep("cusp_simplex: x0 too small, an edge leaves the "
                             "unit tangent ball");
    return s;
}

/// Smallest x0 on the dyadic grid 2^k whose deep simplex fits inside the
/// unit tangent ball.
inline double cusp_depth_threshold(double y0, const Vec& v0, double eps,
                                   int d) {
    for (int k = 0; k < 60; ++k) {
        double x0 = std::pow(2.0, k);
        Vec z0 = Vec::Zero(d);
        z0[0] = x0;
        z0[1] = y0;
        if (d > 2) z0.tail(d - 2) = v0;
        BentDomain bent(d);
        if (bent.defining(z0) <= 0) continue;
        try {
            cusp_simplex(z0, eps);
            return x0;
        } catch (const NotYetDeep&) {
        }
    }
    throw GeometryError("cusp_depth_threshold: no depth found on the grid");
}

/// Interpolated Lebesgue volume of the unit tangent ball along the bent
/// horosphere levels: mu_L(B_z(1)) = y * V(level) by B_d equivariance, with
/// V tabulated once on a log grid.  This is what makes million-sample shell
/// estimates cheap.
class BentDensityModel {
  public:
    BentDensityModel(int d, double lmin, double lmax, int grid = 160,
                     int directions = 2048)
        : d_(d), loglo_(std::log(lmin)), loghi_(std::log(lmax)) {
        if (!(lmin > 0 && lmax > lmin))
            throw DomainError("BentDensityModel: need 0 < lmin < lmax");
        BentDomain bent(d);
        logv_.resize(grid);
        for (int i = 0; i < grid; ++i) {
            double l = std::exp(loglo_ + (loghi_ - loglo_) * i / (grid - 1));
            Vec u = Vec::Zero(d);
            u[0] = l;
            u[1] = 1.0;
            logv_[i] =
                std::log(busemann_unit_ball_volume(bent, bent.unchart(u),
                                                   directions));
        }
    }

    double unit_ball_volume(double level) const {
        double t = (std::log(level) - loglo_) / (loghi_ - loglo_) *
                   (static_cast<int>(logv_.size()) - 1);
        int i = std::clamp(static_cast<int>(std::floor(t)), 0,
                           static_cast<int>(logv_.size()) - 2);
        double frac = std::clamp(t - i, 0.0, 1.0);
        return std::exp(logv_[i] + frac * (logv_[i + 1] - logv_[i]));
    }

    /// alpha_d / mu_L(B_z(1)) at a chart point of B^d.
    double density(const Vec& u) const {
        return bendcusp::unit_ball_volume(d_) /
               (u[1] * unit_ball_volume(bent_level(u)));
    }

  private:
    int d_;
    double loglo_, loghi_;
    std::vector<double> logv_;
};

enum class CuspKind { Standard, Bent };

/// Fundamental cell of the lattice, a box in group parameters: v in R^{d-1}
/// for P_d lattices, (b, v) in R^{d-1} for B_d lattices.
struct CuspLatticeCell {
    Vec lo;
    Vec hi;
};

struct ShellSchedule {
    double x0 = 16.0;  ///< innermost shell starts at x = x0
    int count = 9;     ///< shells [2^k x0, 2^{k+1} x0], k = 0..count-1
};

/// Exact standard-cusp shell volume: the x-integral of the closed-form
/// density (2x - |v|^2)^{-(d+1)/2} done analytically, the cell integral by
/// a deterministic low-discrepancy sum.
inline double standard_cusp_shell_volume_exact(int d,
                                               const CuspLatticeCell& cell,
                                               double x_lo, double x_hi,
                                               int nodes = 20000) {
    int n = static_cast<int>(cell.lo.size());
    if (n != d - 1) throw LatticeError("cell dimension must be d-1");
    double cellvol = (cell.hi - cell.lo).prod();
    double p = 0.5 * (d - 1);
    double acc = 0.0;
    for (int k = 0; k < nodes; ++k) {
        static constexpr std::uint32_t primes[] = {2, 3, 5, 7, 11, 13, 17};
        Vec v(n);
        for (int i = 0; i < n; ++i) {
            double u = detail::halton(k + 1, primes[i % 7]);
            v[i] = cell.lo[i] + (cell.hi[i] - cell.lo[i]) * u;
        }
        double v2 = v.squaredNorm();
        acc += (std::pow(2 * x_lo - v2, -p) - std::pow(2 * x_hi - v2, -p)) /
               (d - 1);
    }
    return cellvol * acc / nodes;
}

/// Monte-Carlo Busemann volume of the shells {cell} x {x in [X, 2X]} for
/// X = 2^k x0.  Standard cusps use the exact paraboloid density; bent cusps
/// use the level-interpolated density model.  Deterministic per seed.
inline std::vector<VolumeEstimate>
cusp_volume_estimate(CuspKind kind, int d, const CuspLatticeCell& cell,
                     const ShellSchedule& schedule, long long samples,
                     std::uint64_t seed, double cone_base_level = 1.0) {
    int n = static_cast<int>(cell.lo.size());
    if (n != d - 1 || (cell.hi - cell.lo).minCoeff() <= 0)
        throw LatticeError("cusp_volume_estimate: degenerate fundamental "
                           "cell");
    double cellvol = (cell.hi - cell.lo).prod();
    std::vector<VolumeEstimate> out;

    std::unique_ptr<BentDensityModel> model;
    if (kind == CuspKind::Bent) {
        double xmax = schedule.x0 * std::pow(2.0, schedule.count);
        double lmin = cone_base_level * 0.5;
        double lmax = 2 * xmax + std::abs(cell.hi[0]) + std::abs(cell.lo[0]) +
                      cone_base_level;
        model = std::make_unique<BentDensityModel>(d, lmin, lmax);
    }

    for (int k = 0; k < schedule.count; ++k) {
        double X = schedule.x0 * std::pow(2.0, k);
        SplitMix64 rng(seed, static_cast<std::uint64_t>(k));
        double sum = 0.0, sumsq = 0.0;
        for (long long i = 0; i < samples; ++i) {
            double g = 0.0;
            if (kind == CuspKind::Standard) {
                Vec v(n);
                for (int j = 0; j < n; ++j)
                    v[j] = rng.uniform(cell.lo[j], cell.hi[j]);
                double x = rng.uniform(X, 2 * X);
                double q = 2 * x - v.squaredNorm();
                if (q > 0) g = X * std::pow(q, -0.5 * (d + 1));
            } else {
                double b = rng.uniform(cell.lo[0], cell.hi[0]);
                Vec v(n - 1);
                for (int j = 0; j + 1 < n; ++j)
                    v[j] = rng.uniform(cell.lo[j + 1], cell.hi[j + 1]);
                double shift = b - 0.5 * v.squaredNorm();
                double l_lo = std::max(X + shift, cone_base_level);
                double l_hi = std::max(2 * X + shift, cone_base_level);
                if (l_hi > l_lo) {
                    double l = rng.uniform(l_lo, l_hi);
                    g = (l_hi - l_lo) * unit_ball_volume(d) /
                        model->unit_ball_volume(l);
                }
            }
            sum += g;
            sumsq += g * g;
        }
        double mean = sum / samples;
        double var = std::max(0.0, sumsq / samples - mean * mean);
        VolumeEstimate est;
        est.value = cellvol * mean;
        est.standard_error = cellvol * std::sqrt(var / samples);
        est.sample_count = samples;
        est.rng_seed = seed;
        out.push_back(est);
    }
    return out;
}

}  // namespace bendcusp
