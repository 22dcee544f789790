#pragma once

/// Classification of peripheral holonomy after bending.  The peripheral
/// element lands in the centralizer of the wall translations; its action on
/// the invariant pencil is the 2x2 matrix [beta delta; 0 1], and explicit
/// conjugations by centralizer/normalizer elements push it into one of four
/// normal forms: P_d (standard), B_d (bent), or the degenerate companions
/// P'_d and B'_d, which preserve no properly convex open set.

#include "numeric.hpp"
#include "projective.hpp"
#include "hyperbolic.hpp"
#include "domain.hpp"
#include "hilbert.hpp"
#include "cusp.hpp"

#include <cmath>
#include <optional>
#include <vector>

namespace bendcusp {

struct NotInCentralizer : GeometryError {
    using GeometryError::GeometryError;
};
struct OrientationError : GeometryError {
    using GeometryError::GeometryError;
};
struct NormalFormFailure : GeometryError {
    using GeometryError::GeometryError;
};
struct OrderError : GeometryError {
    using GeometryError::GeometryError;
};
struct ModelError : GeometryError {
    using GeometryError::GeometryError;
};
struct SandwichFailure : GeometryError {
    using GeometryError::GeometryError;
};

/// A wall crossing of the peripheral curve: position along the curve in
/// [0,1) and a sign.
struct SignedPoint {
    double position = 0.0;
    int sign = +1;
};

/// Peripheral data at one cusp: a lattice basis of wall translations, the
/// unbent peripheral element, and the signed wall crossings of the curve it
/// represents.
struct PeripheralData {
    int dimension = 3;
    std::vector<Mat> delta;        ///< wall-translation images
    Mat gamma0;                    ///< unbent image, a parabolic
    std::vector<SignedPoint> points;
};

/// The bent image of gamma: each crossing at position p contributes a wall
/// stabilizer conjugate of c_t^{sign}, placed at offset p * v1 along the
/// crossing direction.
inline Mat peripheral_holonomy(const PeripheralData& data, double t) {
    int d = data.dimension;
    Mat m = data.gamma0;
    double corner = m(d, d);
    if (std::abs(corner) < 1e-12) throw NotInCentralizer("bad gamma matrix");
    double v1 = m(0, 1) / corner;   // crossing component of the translation
    Mat acc = Mat::Identity(d + 1, d + 1);
    for (const SignedPoint& sp : data.points) {
        Vec offset = Vec::Zero(d - 1);
        offset[0] = sp.position * v1;
        Mat h = parabolic_matrix(offset);
        Mat ct = bending_element(sp.sign * t, d).matrix();
        acc = acc * h * ct * h.inverse();
    }
    return acc * m;
}

enum class CuspClass { Standard, Bent, DegenerateP, DegenerateB };

inline const char* cusp_class_name(CuspClass k) {
    switch (k) {
        case CuspClass::Standard: return "standard";
        case CuspClass::Bent: return "bent";
        case CuspClass::DegenerateP: return "degenerate-P'";
        case CuspClass::DegenerateB: return "degenerate-B'";
    }
    return "?";
}

struct CuspReport {
    CuspClass kind = CuspClass::Standard;
    double beta = 1.0;           ///< pencil multiplier (after b > 0 choice)
    double b = 0.0;              ///< log beta
    double delta = 0.0;          ///< pencil translation part
    Mat pencil;                  ///< 2x2 [beta delta; 0 1]
    Mat conjugator;              ///< n * gamma^(inv) * n^{-1} = normal_form
    bool inverted = false;       ///< classified gamma^{-1} to force b >= 0
    Mat normal_form;
    double normal_residual = 0.0;
    double tolerance = 1e-7;
    bool witness_certified = false;  ///< degenerate kinds: affine-line run
};

namespace detail {

/// Centralizer element [[1, a, 0, z],[0, m, 0, c],[0,0,I,0],[0,0,0,1]].
inline Mat wall_centralizer_element(int d, double a, double c, double m,
                                    double z = 0.0) {
    Mat n = Mat::Identity(d + 1, d + 1);
    n(0, 1) = a;
    n(0, d) = z;
    n(1, 1) = m;
    n(1, d) = c;
    return n;
}

/// Diagonal normalizer diag(q^2, 1, q I, 1): scales u by q and z by q^2.
inline Mat wall_diagonal_normalizer(int d, double q) {
    Vec diag = Vec::Constant(d + 1, q);
    diag[0] = q * q;
    diag[1] = 1.0;
    diag[d] = 1.0;
    return Mat(diag.asDiagonal());
}

struct WallShape {
    double alpha, beta, delta, z;
    Vec u;
};

inline WallShape extract_wall_shape(const Mat& m_in, int d,
                                    double tol = 1e-8) {
    Mat m = m_in;
    if (std::abs(m(d, d)) < 1e-12 * m.norm())
        throw NotInCentralizer("matrix does not fix the wall pencil");
    m /= m(d, d);
    auto member = centralizer_membership(ProjectiveMap(m_in),
                                         CentralizerKind::WallParabolic, tol);
    if (!member.member)
        throw NotInCentralizer("peripheral image is not in the centralizer "
                               "of the wall translations");
    WallShape s;
    s.alpha = m(0, 1);
    s.beta = m(1, 1);
    s.delta = m(1, d);
    s.z = m(0, d);
    s.u = d > 2 ? Vec(m.block(0, 2, 1, d - 2).transpose()) : Vec(Vec::Zero(0));
    return s;
}

}  // namespace detail

/// Action on the invariant pencil of hyperplanes: [beta delta; 0 1].
inline Mat pencil_action(const Mat& gamma_image, int d,
                         double tol = 1e-8) {
    detail::WallShape s = detail::extract_wall_shape(gamma_image, d, tol);
    if (s.beta <= 0)
        throw OrientationError("pencil multiplier must be positive");
    Mat p(2, 2);
    p << s.beta, s.delta, 0, 1;
    return p;
}

/// Classify the peripheral element at bending parameter t.
inline CuspReport classify(const PeripheralData& data, double t,
                           double beta_tol = 1e-7) {
    int d = data.dimension;
    Mat gamma = peripheral_holonomy(data, t);
    for (const Mat& dg : data.delta) {
        Mat dn = ProjectiveMap(dg).matrix();
        Mat gn = ProjectiveMap(gamma).matrix();
        if ((gn * dn - dn * gn).norm() > 1e-7)
            throw NotInCentralizer("gamma does not centralize the wall "
                                   "lattice");
    }

    CuspReport report;
    report.tolerance = beta_tol;
    detail::WallShape s = detail::extract_wall_shape(gamma, d);
    if (s.beta <= 0)
        throw OrientationError("pencil multiplier must be positive");

    Mat work = gamma / gamma(d, d);
    if (s.beta < 1.0 - beta_tol) {
        // Replace gamma by its inverse so b = log beta >= 0.
        report.inverted = true;
        work = Mat(work.inverse());
        work /= work(d, d);
        s = detail::extract_wall_shape(work, d);
    }
    report.beta = s.beta;
    report.b = std::log(s.beta);
    report.delta = s.delta;
    report.pencil = Mat(2, 2);
    report.pencil << s.beta, s.delta, 0, 1;

    Mat conj = Mat::Identity(d + 1, d + 1);
    auto apply = [&](const Mat& n) {
        work = n * work * Mat(n.inverse());
        work /= work(d, d);
        conj = n * conj;
        s = detail::extract_wall_shape(work, d);
    };

    double u2 = s.u.squaredNorm();
    double scale = std::max({1.0, std::abs(s.alpha), std::abs(s.delta)});
    if (std::abs(s.beta - 1.0) <= beta_tol * std::max(1.0, s.beta)) {
        // Parabolic pencil action.
        if (std::abs(s.alpha) < 1e-9 * scale &&
            std::abs(s.delta) < 1e-9 * scale) {
            if (std::abs(s.z - 0.5 * u2) > 1e-7)
                throw NormalFormFailure("parabolic pencil action with "
                                        "inconsistent corner entry");
            report.kind = CuspClass::Standard;
        } else if (s.alpha * s.delta > 0) {
            // Conjugate to alpha = delta, then fix the corner: P_d form.
            double m = std::sqrt(s.alpha / s.delta);
            apply(detail::wall_centralizer_element(d, 0, 0, m));
            double a = (0.5 * (s.alpha * s.alpha + u2) - s.z) / s.delta;
            apply(detail::wall_centralizer_element(d, a, 0, 1));
            report.kind = CuspClass::Standard;
        } else if (s.alpha * s.delta < 0) {
            double m = std::sqrt(-s.alpha / s.delta);
            apply(detail::wall_centralizer_element(d, 0, 0, m));
            double a = (0.5 * (u2 - s.alpha * s.alpha) - s.z) / s.delta;
            apply(detail::wall_centralizer_element(d, a, 0, 1));
            report.kind = CuspClass::DegenerateP;
        } else {
            throw NormalFormFailure("exactly one pencil entry vanishes");
        }
    } else {
        // Hyperbolic pencil action: kill alpha and delta, then read the
        // sign of the conjugation invariant z - alpha delta / (beta - 1)
        // - |u|^2 / 2.
        double a = -s.alpha / (s.beta - 1.0);
        double c = s.delta / (s.beta - 1.0);
        apply(detail::wall_centralizer_element(d, a, c, 1));
        double gap = s.z - 0.5 * u2;
        if (std::abs(gap) < 1e-9 * std::max(1.0, std::abs(s.z))) {
            throw NormalFormFailure("hyperbolic pencil action on the wall "
                                    "between the bent and degenerate forms");
        }
        if (gap < 0) {
            report.kind = CuspClass::Bent;
        } else {
            report.kind = CuspClass::DegenerateB;
        }
        // Scale the invariant onto the exact model corner |u|^2/2 -+ b.
        double q = std::sqrt(report.b / std::abs(gap));
        apply(detail::wall_diagonal_normalizer(d, q));
    }

    report.conjugator = conj;
    report.normal_form = work;

    // Verify against the exact model element.
    Mat model;
    switch (report.kind) {
        case CuspClass::Standard: {
            Vec v(d - 1);
            v[0] = s.alpha;
            if (d > 2) v.tail(d - 2) = s.u;
            model = parabolic_matrix(v);
            break;
        }
        case CuspClass::DegenerateP:
            model = degenerate_p_matrix(s.alpha, s.u);
            break;
        case CuspClass::Bent:
            model = bent_group_element(report.b, s.u).matrix();
            model /= model(d, d);
            break;
        case CuspClass::DegenerateB:
            model = degenerate_b_matrix(report.b, s.u);
            break;
    }
    report.normal_residual = (work - model).norm();
    if (report.normal_residual > 1e-6 * std::max(1.0, model.norm()))
        throw NormalFormFailure("conjugated element does not match its "
                                "normal form");

    if (report.kind == CuspClass::DegenerateP ||
        report.kind == CuspClass::DegenerateB) {
        std::vector<Vec> basis;
        for (int i = 0; i < d - 1; ++i) basis.push_back(Vec::Unit(d - 1, i));
        DegenerateWitness w = degenerate_affine_line_witness(
            report.kind == CuspClass::DegenerateP ? DegenerateVariant::PPrime
                                                  : DegenerateVariant::BPrime,
            basis);
        report.witness_certified =
            w.residual_plus < 1e-6 && w.residual_minus < 1e-6;
    }
    return report;
}

/// Piecewise-affine developing map of the circle: one-sided scaling by
/// e^{sign * t} at every signed point.
struct AffineCircleMap {
    std::vector<double> breaks;
    std::vector<double> slopes;  ///< slopes.size() == breaks.size() + 1
    double scale = 1.0;          ///< holonomy derivative of the unit shift
    double offset = 0.0;         ///< image of 1 (holonomy offset)

    double operator()(double x) const {
        double y = 0.0, x0 = 0.0;
        size_t seg = 0;
        while (seg < breaks.size() && x > breaks[seg]) {
            y += slopes[seg] * (breaks[seg] - x0);
            x0 = breaks[seg];
            ++seg;
        }
        return y + slopes[seg] * (x - x0);
    }
};

inline AffineCircleMap
affine_circle_developing(const std::vector<SignedPoint>& points, double t) {
    AffineCircleMap map;
    double prev = -1.0;
    double slope = 1.0;
    map.slopes.push_back(slope);
    for (const SignedPoint& sp : points) {
        if (sp.position < 0 || sp.position >= 1 || sp.position <= prev)
            throw OrderError("signed points must be strictly increasing "
                             "in [0,1)");
        prev = sp.position;
        map.breaks.push_back(sp.position);
        slope *= std::exp(sp.sign * t);
        map.slopes.push_back(slope);
    }
    map.scale = slope;
    map.offset = map(1.0);
    return map;
}

/// Grid-certified sandwich constants: the boundary graph h of omega over
/// the cell K satisfies h < model + D and model - E < h, where the model
/// graph is f_0 (standard) or g_0 (bent).
struct SandwichBounds {
    double d_upper = 0.0;
    double e_lower = 0.0;
    double grid_margin = 0.0;
};

inline SandwichBounds horoball_sandwich(const ConvexDomain& omega,
                                        CuspKind kind, const BoxRegion& cell,
                                        int grid_per_axis = 64) {
    int d = omega.dim();
    int base_dims = d - 1;  // graph coordinates: (v) or (y, v)
    long long total = 1;
    for (int i = 0; i < base_dims; ++i) total *= grid_per_axis;

    auto model_height = [&](const Vec& w) {
        if (kind == CuspKind::Standard) return 0.5 * w.squaredNorm();
        double y = w[0];
        double v2 = base_dims > 1 ? w.tail(base_dims - 1).squaredNorm() : 0.0;
        return 0.5 * v2 - std::log(y);
    };

    double dmax = -1e300, emax = -1e300;
    std::vector<double> heights(static_cast<size_t>(total));
    for (long long idx = 0; idx < total; ++idx) {
        long long rem = idx;
        Vec w(base_dims);
        for (int i = 0; i < base_dims; ++i) {
            int gi = static_cast<int>(rem % grid_per_axis);
            rem /= grid_per_axis;
            w[i] = cell.lo[i] +
                   (cell.hi[i] - cell.lo[i]) * (gi + 0.5) / grid_per_axis;
        }
        // Find the boundary height below a deep interior point.
        Vec probe(d);
        probe[0] = model_height(w) + 1e4;
        probe.tail(base_dims) = w;
        if (omega.defining(probe) <= 0)
            throw SandwichFailure("cell point has no deep interior above it");
        Vec down = Vec::Zero(d);
        down[0] = -1.0;
        auto [minus, plus] = omega.boundary_hit(omega.unchart(probe), down);
        (void)minus;
        if (!plus.finite)
            throw SandwichFailure("boundary graph is unbounded below over "
                                  "the cell");
        double h = probe[0] - plus.parameter;
        double ref = model_height(w);
        dmax = std::max(dmax, h - ref);
        emax = std::max(emax, ref - h);
        heights[static_cast<size_t>(idx)] = h;
    }
    // Grid margin: largest height step between neighboring grid nodes.
    double lip = 0.0;
    long long stride = 1;
    for (int axis = 0; axis < base_dims; ++axis) {
        for (long long idx = 0; idx < total; ++idx) {
            long long gi = (idx / stride) % grid_per_axis;
            if (gi + 1 >= grid_per_axis) continue;
            lip = std::max(lip, std::abs(heights[static_cast<size_t>(
                                             idx + stride)] -
                                         heights[static_cast<size_t>(idx)]));
        }
        stride *= grid_per_axis;
    }
    SandwichBounds out;
    // Certified containment needs d_upper/e_lower plus the grid margin; the
    // margin is kept separate so exact fits report as exact.
    out.grid_margin = lip;
    out.d_upper = dmax;
    out.e_lower = emax;
    return out;
}

/// Smallest horoball level (on a dyadic schedule) at which the parabolic
/// gamma moves horosphere points less than eps in the Hilbert metric of the
/// reference horoball.  The displacement is constant along each horosphere;
/// constancy is verified by sampling.
inline double precise_invariance_level(const Vec& wall_translation,
                                       double eps, int d,
                                       double spread_tol = 1e-6) {
    if (wall_translation.size() != d - 1 ||
        std::abs(wall_translation[0]) > 1e-12)
        throw ModelError("precise_invariance_level: generator must be a "
                         "wall translation (first component zero)");
    ParaboloidDomain h_int(d, /*level=*/0.0);
    Mat g = parabolic_matrix(wall_translation);

    auto displacement = [&](double level, const Vec& v) {
        Vec z(d);
        z[0] = 0.5 * v.squaredNorm() + level;
        z.tail(d - 1) = v;
        ProjectivePoint p = h_int.unchart(z);
        ProjectivePoint q(g * p.coords());
        return hilbert_distance(h_int, p, q);
    };

    SplitMix64 rng(12345);
    for (int k = 0; k < 60; ++k) {
        double level = std::pow(2.0, k);
        double lo = 1e300, hi = -1e300;
        for (int s = 0; s < 100; ++s) {
            Vec v = 3.0 * rng.gaussian_vector(d - 1);
            double disp = displacement(level, v);
            lo = std::min(lo, disp);
            hi = std::max(hi, disp);
        }
        if (hi - lo > spread_tol)
            throw ModelError("displacement is not constant along the "
                             "horosphere");
        if (hi < eps) return level;
    }
    throw GeometryError("precise_invariance_level: schedule exhausted");
}

}  // namespace bendcusp
