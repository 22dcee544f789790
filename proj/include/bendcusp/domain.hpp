#pragma once

/// Convex domains presented as oracles: a defining function in a preferred
/// affine chart (positive inside), plus generic chord/boundary machinery.
/// No meshes: boundary points come from bracketing + bisection along chords,
/// so non-smooth boundaries (the bent domain) are handled at full accuracy.

#include "numeric.hpp"
#include "projective.hpp"
#include "hyperbolic.hpp"

#include <cmath>
#include <limits>
#include <memory>
#include <utility>

namespace bendcusp {

struct ZeroVector : GeometryError {
    using GeometryError::GeometryError;
};
struct DegenerateSection : GeometryError {
    using GeometryError::GeometryError;
};

/// One end of a chord.  For unbounded domains the chord may leave every
/// compact set; then `finite` is false, `point` is the ideal limit in the
/// sphere lift, and `parameter` is +infinity in magnitude.
struct ChordEndpoint {
    ProjectivePoint point;
    bool finite = true;
    double parameter = 0.0;  ///< signed chart arc-length from the base point
};

/// A properly convex open domain given by a defining function on a preferred
/// affine chart.  Membership of ideal chart points (last homogeneous
/// coordinate zero) is decided by a recession-ray test, which matches the
/// projective closure for convex sets.
class ConvexDomain {
  public:
    virtual ~ConvexDomain() = default;

    /// Dimension of the chart (the projective ambient dimension).
    virtual int dim() const = 0;

    /// Positive inside, negative outside, zero on the boundary.
    virtual double defining(const Vec& u) const = 0;

    /// Some interior chart point (used for recession-ray tests).
    virtual Vec interior_point() const = 0;

    /// Chart of the preferred affine patch.
    virtual Vec chart(const ProjectivePoint& x) const { return x.affine(); }
    virtual ProjectivePoint unchart(const Vec& u) const {
        return ProjectivePoint::from_affine(u);
    }
    /// Ideal point of the chart in the given direction.
    virtual ProjectivePoint chart_infinity(const Vec& dir) const {
        Vec h(dir.size() + 1);
        h.head(dir.size()) = dir;
        h[dir.size()] = 0.0;
        return ProjectivePoint(h);
    }

    virtual Region membership(const ProjectivePoint& x,
                              double tol = 1e-7) const {
        const Vec& c = x.coords();
        int n = static_cast<int>(c.size());
        if (std::abs(c[n - 1]) < 1e-10) {
            Vec dir = c.head(n - 1);
            return ideal_membership(dir);
        }
        double f = defining(chart(x));
        if (std::abs(f) < tol) return Region::Boundary;
        return f > 0 ? Region::Interior : Region::Exterior;
    }

    /// The two boundary points of the chord through x in chart direction v.
    std::pair<ChordEndpoint, ChordEndpoint>
    boundary_hit(const ProjectivePoint& x, const Vec& v) const {
        if (v.norm() == 0.0) throw ZeroVector("boundary_hit: zero direction");
        Vec u0 = chart(x);
        if (defining(u0) <= 0.0)
            throw DomainError("boundary_hit: base point not interior");
        Vec dir = v / v.norm();
        ChordEndpoint plus = hit_one_side(u0, dir);
        ChordEndpoint minus = hit_one_side(u0, -dir);
        minus.parameter = -minus.parameter;
        return {minus, plus};
    }

  protected:
    /// Is the ideal chart direction in the closure of the domain?
    Region ideal_membership(const Vec& dir) const {
        double n = dir.norm();
        if (n < 1e-300) return Region::Exterior;
        Vec u0 = interior_point();
        for (double sign : {1.0, -1.0}) {
            Vec d = sign * dir / n;
            bool inside = true;
            for (double s : {1e6, 1e9, 1e12}) {
                if (defining(u0 + s * d) <= 0.0) {
                    inside = false;
                    break;
                }
            }
            if (inside) return Region::Boundary;
        }
        return Region::Exterior;
    }

    ChordEndpoint hit_one_side(const Vec& u0, const Vec& dir) const {
        constexpr double kFar = 1e15;
        double lo = 0.0, hi = 1.0;
        while (defining(u0 + hi * dir) > 0.0) {
            lo = hi;
            hi *= 2.0;
            if (hi > kFar) {
                ChordEndpoint e{chart_infinity(dir), false,
                                std::numeric_limits<double>::infinity()};
                return e;
            }
        }
        // Bisect to relative tolerance on the chord parameter.
        for (int it = 0; it < 200 && (hi - lo) > 1e-13 * std::max(1.0, hi);
             ++it) {
            double mid = 0.5 * (lo + hi);
            if (defining(u0 + mid * dir) > 0.0) lo = mid;
            else hi = mid;
        }
        double s = 0.5 * (lo + hi);
        ChordEndpoint e{unchart(u0 + s * dir), true, s};
        return e;
    }
};

using DomainPtr = std::shared_ptr<const ConvexDomain>;

/// Open interval (a, b) in the line.
class IntervalDomain : public ConvexDomain {
  public:
    IntervalDomain(double a, double b) : a_(a), b_(b) {
        if (!(a < b)) throw DomainError("IntervalDomain: need a < b");
    }
    int dim() const override { return 1; }
    double defining(const Vec& u) const override {
        return std::min(u[0] - a_, b_ - u[0]);
    }
    Vec interior_point() const override {
        return Vec::Constant(1, 0.5 * (a_ + b_));
    }

  private:
    double a_, b_;
};

/// Round ball of radius r about c.
class BallDomain : public ConvexDomain {
  public:
    BallDomain(Vec center, double radius)
        : c_(std::move(center)), r_(radius) {
        if (radius <= 0) throw DomainError("BallDomain: radius must be > 0");
    }
    int dim() const override { return static_cast<int>(c_.size()); }
    double defining(const Vec& u) const override {
        return r_ - (u - c_).norm();
    }
    Vec interior_point() const override { return c_; }

  private:
    Vec c_;
    double r_;
};

/// Ellipsoid { (u-c)^T M (u-c) < 1 } with M symmetric positive definite.
class EllipsoidDomain : public ConvexDomain {
  public:
    EllipsoidDomain(Mat m, Vec center) : m_(std::move(m)), c_(std::move(center)) {
        Eigen::SelfAdjointEigenSolver<Mat> es(m_);
        if (es.eigenvalues().minCoeff() <= 0)
            throw DomainError("EllipsoidDomain: form must be positive definite");
    }
    int dim() const override { return static_cast<int>(c_.size()); }
    double defining(const Vec& u) const override {
        return 1.0 - std::sqrt((u - c_).dot(m_ * (u - c_)));
    }
    Vec interior_point() const override { return c_; }

  private:
    Mat m_;
    Vec c_;
};

/// The paraboloid model of H^d: chart (x_1, ..., x_d), interior
/// x_1 > (x_2^2 + ... + x_d^2)/2.
class ParaboloidDomain : public ConvexDomain {
  public:
    /// level > 0 gives the standard horoball f_level inside the model.
    explicit ParaboloidDomain(int d, double level = 0.0)
        : d_(d), c_(level) {
        if (d < 2) throw DimensionError("ParaboloidDomain: need d >= 2");
    }
    int dim() const override { return d_; }
    double defining(const Vec& u) const override {
        return u[0] - 0.5 * u.tail(d_ - 1).squaredNorm() - c_;
    }
    Vec interior_point() const override {
        Vec u = Vec::Zero(d_);
        u[0] = c_ + 1.0;
        return u;
    }
    double level() const { return c_; }

  private:
    int d_;
    double c_;
};

/// The bent model domain B^d: chart (x, y, v), interior
/// x > |v|^2/2 - log y over y > 0.
class BentDomain : public ConvexDomain {
  public:
    /// level > 0 gives the bent horoball g_level inside the model.
    explicit BentDomain(int d, double level = 0.0) : d_(d), c_(level) {
        if (d < 2) throw DimensionError("BentDomain: need d >= 2");
    }
    int dim() const override { return d_; }
    double defining(const Vec& u) const override {
        double y = u[1];
        if (y <= 0.0) return y - 1.0;  // any negative value outside y > 0
        double v2 = d_ > 2 ? u.tail(d_ - 2).squaredNorm() : 0.0;
        return u[0] + std::log(y) - 0.5 * v2 - c_;
    }
    Vec interior_point() const override {
        Vec u = Vec::Zero(d_);
        u[0] = c_ + 1.0;
        u[1] = 1.0;
        return u;
    }
    double level() const { return c_; }

  private:
    int d_;
    double c_;
};

/// Open standard simplex { u_i > 0, sum u_i < 1 }.
class SimplexDomain : public ConvexDomain {
  public:
    explicit SimplexDomain(int d) : d_(d) {
        if (d < 1) throw DimensionError("SimplexDomain: need d >= 1");
    }
    int dim() const override { return d_; }
    double defining(const Vec& u) const override {
        double f = 1.0 - u.sum();
        for (int i = 0; i < d_; ++i) f = std::min(f, u[i]);
        return f;
    }
    Vec interior_point() const override {
        return Vec::Constant(d_, 1.0 / (2.0 * d_));
    }

  private:
    int d_;
};

/// Image g(base) of a domain under a projective map.  The preferred chart is
/// the base chart pulled back through g^{-1}, so the defining function and
/// chord machinery are inherited verbatim.
class TransformedDomain : public ConvexDomain {
  public:
    TransformedDomain(DomainPtr base, ProjectiveMap g)
        : base_(std::move(base)), g_(std::move(g)), ginv_(g_.inverse()) {}

    int dim() const override { return base_->dim(); }
    double defining(const Vec& u) const override { return base_->defining(u); }
    Vec interior_point() const override { return base_->interior_point(); }
    Vec chart(const ProjectivePoint& x) const override {
        return base_->chart(ginv_(x));
    }
    ProjectivePoint unchart(const Vec& u) const override {
        return g_(base_->unchart(u));
    }
    ProjectivePoint chart_infinity(const Vec& dir) const override {
        return g_(base_->chart_infinity(dir));
    }
    Region membership(const ProjectivePoint& x,
                      double tol = 1e-7) const override {
        return base_->membership(ginv_(x), tol);
    }

  private:
    DomainPtr base_;
    ProjectiveMap g_;
    ProjectiveMap ginv_;
};

/// Two-dimensional affine slice of a domain: the plane
/// { origin + s e + t f } in the base chart, as a domain in its own RP^2.
class PlaneSliceDomain : public ConvexDomain {
  public:
    PlaneSliceDomain(DomainPtr base, Vec origin, Vec e, Vec f)
        : base_(std::move(base)), o_(std::move(origin)), e_(std::move(e)),
          f_(std::move(f)) {
        if (o_.size() != base_->dim() || e_.size() != base_->dim() ||
            f_.size() != base_->dim())
            throw DimensionError("PlaneSliceDomain: frame dimension mismatch");
        // Find an interior point of the slice by scanning the plane.
        bool found = false;
        for (double s : {0.0, 1.0, -1.0, 2.0, -2.0, 4.0, -4.0}) {
            for (double t : {0.0, 1.0, -1.0, 2.0, -2.0, 4.0, -4.0}) {
                Vec u(2);
                u << s, t;
                if (defining(u) > 0) {
                    ip_ = u;
                    found = true;
                    break;
                }
            }
            if (found) break;
        }
        if (!found)
            throw DegenerateSection("PlaneSliceDomain: plane misses the domain");
    }

    int dim() const override { return 2; }
    double defining(const Vec& u) const override {
        return base_->defining(o_ + u[0] * e_ + u[1] * f_);
    }
    Vec interior_point() const override { return ip_; }

    /// Promote a slice-chart point to the base domain's projective space.
    ProjectivePoint embed(const Vec& u) const {
        return base_->unchart(o_ + u[0] * e_ + u[1] * f_);
    }

  private:
    DomainPtr base_;
    Vec o_, e_, f_;
    Vec ip_;
};

}  // namespace bendcusp
