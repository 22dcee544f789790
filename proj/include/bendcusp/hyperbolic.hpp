#pragma once

/// Paraboloid model of hyperbolic d-space: the quadratic form
/// Q_d = x_2^2 + ... + x_d^2 - 2 x_1 x_{d+1}, the parabolic translation group
/// P_d, the diagonal path c_t, and centralizer shape checkers.
///
/// Coordinates are 0-indexed: entry 0 is x_1, entries 1..d-1 are x_2..x_d,
/// entry d is x_{d+1}.  The model interior is {x_1 > (x_2^2+..+x_d^2)/2} in
/// the affine chart x_{d+1}=1, together with nothing at infinity; the ideal
/// boundary adds the graph of the paraboloid and the point [1:0:...:0].

#include "numeric.hpp"
#include "projective.hpp"

#include <cmath>
#include <vector>

namespace bendcusp {

enum class Region { Interior, Boundary, Exterior };

/// The form x_2^2 + ... + x_d^2 - 2 x_1 x_{d+1} of signature (d,1), or its
/// degenerate-cusp companion with the x_2^2 term negated.
class QuadraticFormQ {
  public:
    static QuadraticFormQ standard(int d) { return QuadraticFormQ(d, +1.0); }
    static QuadraticFormQ primed(int d) { return QuadraticFormQ(d, -1.0); }

    int dim() const { return d_; }
    const Mat& gram() const { return gram_; }

    double bilinear(const Vec& x, const Vec& y) const {
        if (x.size() != d_ + 1 || y.size() != d_ + 1)
            throw DimensionError("QuadraticFormQ: vector length must be d+1");
        return x.dot(gram_ * y);
    }

    double operator()(const Vec& x) const { return bilinear(x, x); }

    /// Residual of G^T J G = J after unimodular scaling; ~0 iff G preserves
    /// the form up to sign of the representative.
    double preservation_residual(const Mat& g) const {
        Mat gn = ProjectiveMap(g).matrix();
        return (gn.transpose() * gram_ * gn - gram_).norm();
    }

    /// Signs of the Gram eigenvalues: (positive, negative) counts.
    std::pair<int, int> signature() const {
        Eigen::SelfAdjointEigenSolver<Mat> es(gram_);
        int pos = 0, neg = 0;
        for (int i = 0; i < es.eigenvalues().size(); ++i) {
            if (es.eigenvalues()[i] > 0) ++pos;
            else ++neg;
        }
        return {pos, neg};
    }

  private:
    QuadraticFormQ(int d, double x2sign) : d_(d) {
        if (d < 2) throw DimensionError("QuadraticFormQ: need d >= 2");
        gram_ = Mat::Zero(d + 1, d + 1);
        gram_(1, 1) = x2sign;
        for (int i = 2; i < d; ++i) gram_(i, i) = 1.0;
        gram_(0, d) = gram_(d, 0) = -1.0;
    }

    int d_;
    Mat gram_;
};

/// Classify a point against the paraboloid model.  [1:0:...:0] is boundary.
inline Region hyperboloid_membership(const ProjectivePoint& x,
                                     double tol = projective_tolerance()) {
    const Vec& c = x.coords();  // unit norm by canonicalization
    int d = x.ambient_dim();
    QuadraticFormQ q = QuadraticFormQ::standard(d);
    double val = q(c);
    if (std::abs(val) < tol) {
        // Null vectors: the closure of {x_{d+1} != 0, x_1/x_{d+1} > 0} part
        // of the cone plus [e_1]; null points with x_1 x_{d+1} = 0 other than
        // [e_1] (none exist for Q_d except [e_1] itself) are boundary too.
        return Region::Boundary;
    }
    if (val > 0) return Region::Exterior;
    // Q < 0 forces x_1 x_{d+1} > 0; the canonical representative then has
    // x_1/x_{d+1} > 0 and the point sits inside the paraboloid.
    return Region::Interior;
}

/// The nilpotent Lie algebra element of p_d with translation data v.
inline Mat parabolic_nilpotent(const Vec& v) {
    int d = static_cast<int>(v.size()) + 1;
    Mat n = Mat::Zero(d + 1, d + 1);
    n.block(0, 1, 1, d - 1) = v.transpose();
    n.block(1, d, d - 1, 1) = v;
    return n;
}

/// exp of a p_d nilpotent: exact three-term series (nilpotency degree 3).
inline Mat nilpotent_exp(const Mat& n) {
    int m = static_cast<int>(n.rows());
    return Mat::Identity(m, m) + n + 0.5 * (n * n);
}

/// Block parabolic (1, v^T, |v|^2/2 / 0, I, v / 0, 0, 1) acting on the
/// chart as translation by v on the paraboloid.
inline ProjectiveMap make_parabolic(const Vec& v) {
    if (v.size() < 1)
        throw DimensionError("make_parabolic: need a translation vector of "
                             "length d-1 >= 1");
    return ProjectiveMap(nilpotent_exp(parabolic_nilpotent(v)));
}

/// Raw matrix of the parabolic (avoids the |det| renormalization, which is
/// trivial here but keeps entry formulas exact).
inline Mat parabolic_matrix(const Vec& v) {
    return nilpotent_exp(parabolic_nilpotent(v));
}

/// c_t = exp(t C), C = diag(-1, d, -1, ..., -1); det = 1 by trace(C) = 0.
inline ProjectiveMap bending_element(double t, int d) {
    if (d < 2) throw DimensionError("bending_element: need d >= 2");
    Vec diag = Vec::Constant(d + 1, std::exp(-t));
    diag[1] = std::exp(static_cast<double>(d) * t);
    return ProjectiveMap(Mat(diag.asDiagonal()));
}

/// Hyperbolic translation conjugating make_parabolic(v) to
/// make_parabolic(e^s v): diag(e^s, 1, ..., 1, e^{-s}).
inline ProjectiveMap parabolic_scaling(double s, int d) {
    Vec diag = Vec::Ones(d + 1);
    diag[0] = std::exp(s);
    diag[d] = std::exp(-s);
    return ProjectiveMap(Mat(diag.asDiagonal()));
}

/// Rotation by angle theta in the (x_i, x_j) plane, 1-based paper indices
/// restricted to the Euclidean block x_2..x_d (0-based entries 1..d-1).
inline ProjectiveMap model_rotation(int i, int j, double theta, int d) {
    if (i < 1 || j < 1 || i >= d || j >= d || i == j)
        throw DimensionError("model_rotation: indices must be distinct "
                             "Euclidean-block slots");
    Mat m = Mat::Identity(d + 1, d + 1);
    m(i, i) = std::cos(theta);
    m(j, j) = std::cos(theta);
    m(i, j) = -std::sin(theta);
    m(j, i) = std::sin(theta);
    return ProjectiveMap(m);
}

enum class CentralizerKind { PsoWall, FullParabolic, WallParabolic };

struct CentralizerCheck {
    bool member = false;
    double residual = 0.0;     ///< largest shape/commutator violation found
    Mat witness_generator;     ///< a generator with nonzero commutator
    Mat commutator;            ///< [B, witness] for the failing generator
};

namespace detail {

/// Normalize so the bottom-right entry is 1; throws if that entry vanishes
/// (such maps cannot have the triangular centralizer shapes).
inline bool corner_normalize(Mat& m) {
    int n = static_cast<int>(m.rows());
    if (std::abs(m(n - 1, n - 1)) < 1e-12 * m.norm()) return false;
    m /= m(n - 1, n - 1);
    return true;
}

inline CentralizerCheck fail_with_commutator(const Mat& b, const Mat& g) {
    CentralizerCheck out;
    out.member = false;
    out.witness_generator = g;
    out.commutator = b * g - g * b;
    out.residual = out.commutator.norm();
    return out;
}

}  // namespace detail

/// Shape test against the centralizer lemma for the chosen group, with a
/// commuting-generator witness on failure.
inline CentralizerCheck centralizer_membership(const ProjectiveMap& map,
                                               CentralizerKind which,
                                               double tol = 1e-8) {
    int d = map.ambient_dim();
    Mat b = map.matrix();
    auto witness_translation = [&](bool wall_only) {
        // Find the basis translation with the largest commutator.
        CentralizerCheck worst;
        for (int k = wall_only ? 1 : 0; k < d - 1; ++k) {
            Vec v = Vec::Zero(d - 1);
            v[k] = 1.0;
            CentralizerCheck c =
                detail::fail_with_commutator(b, parabolic_matrix(v));
            if (c.residual >= worst.residual) worst = c;
        }
        return worst;
    };

    switch (which) {
        case CentralizerKind::FullParabolic: {
            // (1, u^T, z / 0, I, u / 0, 0, 1): commutes with every P_d
            // element iff the top row block equals the right column block.
            Mat m = b;
            if (!detail::corner_normalize(m)) return witness_translation(false);
            double res = std::abs(m(0, 0) - 1.0);
            res = std::max(res, m.block(1, 0, d, 1).cwiseAbs().maxCoeff());
            res = std::max(res, m.row(d).head(d).cwiseAbs().maxCoeff());
            res = std::max(res, (m.block(1, 1, d - 1, d - 1) -
                                 Mat::Identity(d - 1, d - 1)).norm());
            Vec u_top = m.block(0, 1, 1, d - 1).transpose();
            Vec u_right = m.block(1, d, d - 1, 1);
            res = std::max(res, (u_top - u_right).norm());
            if (res < tol) {
                CentralizerCheck ok;
                ok.member = true;
                ok.residual = res;
                return ok;
            }
            return witness_translation(false);
        }
        case CentralizerKind::WallParabolic: {
            // (1, a, u^T, z / 0, beta, 0, delta / 0, 0, I, u / 0, 0, 0, 1):
            // the centralizer of the wall translations P^0_{d-1}.
            Mat m = b;
            if (!detail::corner_normalize(m)) return witness_translation(true);
            double res = std::abs(m(0, 0) - 1.0);
            res = std::max(res, m.block(1, 0, d, 1).cwiseAbs().maxCoeff());
            res = std::max(res, m.row(d).head(d).cwiseAbs().maxCoeff());
            if (d > 2) {
                res = std::max(res,
                               m.block(1, 2, 1, d - 2).cwiseAbs().maxCoeff());
                res = std::max(res,
                               m.block(2, 1, d - 2, 1).cwiseAbs().maxCoeff());
                res = std::max(res, (m.block(2, 2, d - 2, d - 2) -
                                     Mat::Identity(d - 2, d - 2)).norm());
                Vec u_top = m.block(0, 2, 1, d - 2).transpose();
                Vec u_right = m.block(2, d, d - 2, 1);
                res = std::max(res, (u_top - u_right).norm());
            }
            if (res < tol) {
                CentralizerCheck ok;
                ok.member = true;
                ok.residual = res;
                return ok;
            }
            return witness_translation(true);
        }
        case CentralizerKind::PsoWall: {
            // Membership in PSO(Q_d; d-1, 1): preserve Q_d, preserve the
            // wall x_2 = 0 as a set, and commute with c_t.
            QuadraticFormQ q = QuadraticFormQ::standard(d);
            double res = q.preservation_residual(b);
            Mat m = map.matrix();
            // Wall preservation: row 1 supported on column 1 only.
            for (int j = 0; j <= d; ++j)
                if (j != 1) res = std::max(res, std::abs(m(1, j)));
            Mat ct = bending_element(0.37, d).matrix();
            Mat comm = m * ct - ct * m;
            res = std::max(res, comm.norm());
            if (res < tol) {
                CentralizerCheck ok;
                ok.member = true;
                ok.residual = res;
                return ok;
            }
            return detail::fail_with_commutator(m, ct);
        }
    }
    throw GeometryError("centralizer_membership: unknown kind");
}

/// Generators of a handy subgroup of PSO(Q_d; d-1, 1): wall translations,
/// the scaling flow, and Euclidean-block rotations fixing x_2.
inline std::vector<ProjectiveMap> pso_wall_generators(int d) {
    std::vector<ProjectiveMap> gens;
    for (int k = 1; k < d - 1; ++k) {
        Vec v = Vec::Zero(d - 1);
        v[k] = 1.0;
        gens.push_back(make_parabolic(v));
    }
    gens.push_back(parabolic_scaling(std::log(2.0), d));
    for (int i = 2; i < d - 1; ++i)
        gens.push_back(model_rotation(i, i + 1, 0.5, d));
    return gens;
}

/// arccosh distance from the signature-(d,1) bilinear form; an oracle for
/// the Hilbert distance on the paraboloid model.
inline double hyperbolic_distance_Q(const ProjectivePoint& x,
                                    const ProjectivePoint& y) {
    if (hyperboloid_membership(x) != Region::Interior ||
        hyperboloid_membership(y) != Region::Interior)
        throw DomainError("hyperbolic_distance_Q: points must be interior");
    int d = x.ambient_dim();
    QuadraticFormQ q = QuadraticFormQ::standard(d);
    double bxx = q(x.coords());
    double byy = q(y.coords());
    double bxy = q.bilinear(x.coords(), y.coords());
    double arg = std::abs(bxy) / std::sqrt(bxx * byy);
    if (arg < 1.0) arg = 1.0;  // clamp rounding noise at coincident points
    return std::acosh(arg);
}

}  // namespace bendcusp
