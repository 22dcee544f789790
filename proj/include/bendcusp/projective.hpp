#pragma once

#include <array>
#include <cmath>
#include <utility>

#include "bendcusp/numeric.hpp"

namespace bendcusp {

struct CollinearityError : GeometryError {
    using GeometryError::GeometryError;
};
struct DegenerateCrossRatio : GeometryError {
    using GeometryError::GeometryError;
};
struct DegenerateLine : GeometryError {
    using GeometryError::GeometryError;
};

/// A point of RP^d stored by a canonical homogeneous representative:
/// unit Euclidean norm, first entry of magnitude above tolerance positive.
class ProjectivePoint {
  public:
    explicit ProjectivePoint(Vec coords) : rep_(std::move(coords)) {
        canonicalize();
    }

    const Vec& coords() const { return rep_; }
    int ambient_dim() const { return static_cast<int>(rep_.size()) - 1; }

    bool approx_equal(const ProjectivePoint& other,
                      double tol = projective_tolerance()) const {
        return (rep_ - other.rep_).norm() < tol;
    }

    /// Chart coordinates in the standard patch x_{d+1} = 1.
    Vec affine() const {
        double w = rep_[rep_.size() - 1];
        if (std::abs(w) < projective_tolerance())
            throw DomainError("point on the hyperplane at infinity");
        return rep_.head(rep_.size() - 1) / w;
    }

    static ProjectivePoint from_affine(const Vec& x) {
        Vec h(x.size() + 1);
        h.head(x.size()) = x;
        h[x.size()] = 1.0;
        return ProjectivePoint(h);
    }

  private:
    void canonicalize() {
        double norm = rep_.norm();
        if (norm < 1e-300)
            throw GeometryError("ProjectivePoint: zero coordinate vector");
        rep_ /= norm;
        for (int i = 0; i < rep_.size(); ++i) {
            if (std::abs(rep_[i]) > projective_tolerance()) {
                if (rep_[i] < 0) rep_ = -rep_;
                break;
            }
        }
    }

    Vec rep_;
};

/// A hyperplane of RP^d by its canonical dual representative.
class ProjectiveHyperplane {
  public:
    explicit ProjectiveHyperplane(Vec covector) : point_(std::move(covector)) {}

    const Vec& covector() const { return point_.coords(); }

    bool incident(const ProjectivePoint& x,
                  double tol = projective_tolerance()) const {
        return std::abs(covector().dot(x.coords())) < tol;
    }

  private:
    ProjectivePoint point_; // reuses point canonicalization on the covector
};

/// An element of PGL_{d+1}(R) via an SL^±-representative (|det| = 1).
class ProjectiveMap {
  public:
    explicit ProjectiveMap(Mat m) : mat_(std::move(m)) { canonicalize(); }

    static ProjectiveMap identity(int d) {
        return ProjectiveMap(Mat::Identity(d + 1, d + 1));
    }

    const Mat& matrix() const { return mat_; }
    int ambient_dim() const { return static_cast<int>(mat_.rows()) - 1; }

    ProjectiveMap inverse() const { return ProjectiveMap(mat_.inverse()); }

    ProjectiveMap operator*(const ProjectiveMap& o) const {
        return ProjectiveMap(mat_ * o.mat_);
    }

    ProjectivePoint operator()(const ProjectivePoint& x) const {
        return ProjectivePoint(mat_ * x.coords());
    }

    /// Induced action on hyperplanes (inverse transpose).
    ProjectiveHyperplane operator()(const ProjectiveHyperplane& h) const {
        return ProjectiveHyperplane(mat_.inverse().transpose() * h.covector());
    }

    /// Distance to the identity class up to the SL^± sign ambiguity.
    double identity_residual() const {
        int n = static_cast<int>(mat_.rows());
        double plus = (mat_ - Mat::Identity(n, n)).norm();
        double minus = (mat_ + Mat::Identity(n, n)).norm();
        return std::min(plus, minus);
    }

    bool approx_equal(const ProjectiveMap& o,
                      double tol = projective_tolerance()) const {
        double plus = (mat_ - o.mat_).norm();
        double minus = (mat_ + o.mat_).norm();
        return std::min(plus, minus) < tol;
    }

  private:
    void canonicalize() {
        int n = static_cast<int>(mat_.rows());
        if (mat_.cols() != n) throw DimensionError("ProjectiveMap: not square");
        double det = mat_.determinant();
        if (std::abs(det) < 1e-300)
            throw GeometryError("ProjectiveMap: singular matrix");
        mat_ /= std::pow(std::abs(det), 1.0 / n);
    }

    Mat mat_;
};

inline ProjectivePoint apply_map(const ProjectiveMap& g,
                                 const ProjectivePoint& x) {
    return g(x);
}

/// Parametrized projective line s -> [cos(s) x + sin(s) y].
class ProjectiveLine {
  public:
    ProjectiveLine(const ProjectivePoint& x, const ProjectivePoint& y)
        : a_(x.coords()), b_(y.coords()) {
        if (x.approx_equal(y))
            throw DegenerateLine("line_through: coincident points");
        // orthonormalize b against a so the parametrization is a great circle
        b_ -= a_ * a_.dot(b_);
        double n = b_.norm();
        if (n < projective_tolerance())
            throw DegenerateLine("line_through: coincident points");
        b_ /= n;
    }

    ProjectivePoint at(double s) const {
        return ProjectivePoint(std::cos(s) * a_ + std::sin(s) * b_);
    }

    /// Parameter of y in the orthonormalized frame.
    double parameter_of(const ProjectivePoint& y) const {
        return std::atan2(b_.dot(y.coords()), a_.dot(y.coords()));
    }

    bool contains(const ProjectivePoint& p,
                  double tol = projective_tolerance()) const {
        const Vec& c = p.coords();
        Vec proj = a_ * a_.dot(c) + b_ * b_.dot(c);
        return (c - proj).norm() < tol;
    }

  private:
    Vec a_, b_;
};

inline ProjectiveLine line_through(const ProjectivePoint& x,
                                   const ProjectivePoint& y) {
    return ProjectiveLine(x, y);
}

namespace detail {

/// 2D homogeneous coordinates of four collinear points in a common frame.
inline std::array<Eigen::Vector2d, 4> collinear_frame(
    const ProjectivePoint& p, const ProjectivePoint& x,
    const ProjectivePoint& y, const ProjectivePoint& q) {
    int n = static_cast<int>(p.coords().size());
    Mat stack(4, n);
    stack.row(0) = p.coords();
    stack.row(1) = x.coords();
    stack.row(2) = y.coords();
    stack.row(3) = q.coords();
    Eigen::JacobiSVD<Mat> svd(stack, Eigen::ComputeFullV);
    const auto& sv = svd.singularValues();
    if (sv.size() > 2 && sv[2] > 1e-7 * sv[0])
        throw CollinearityError("cross_ratio: points are not collinear");
    Mat basis = svd.matrixV().leftCols(2); // n x 2
    std::array<Eigen::Vector2d, 4> out;
    out[0] = basis.transpose() * p.coords();
    out[1] = basis.transpose() * x.coords();
    out[2] = basis.transpose() * y.coords();
    out[3] = basis.transpose() * q.coords();
    return out;
}

inline double det2(const Eigen::Vector2d& u, const Eigen::Vector2d& v) {
    return u[0] * v[1] - u[1] * v[0];
}

} // namespace detail

/// Cross-ratio [p:x:y:q] = (|py| |qx|) / (|px| |qy|) in any affine chart of
/// the common line; computed homogeneously so points at infinity are fine.
inline double cross_ratio(const ProjectivePoint& p, const ProjectivePoint& x,
                          const ProjectivePoint& y, const ProjectivePoint& q) {
    auto f = detail::collinear_frame(p, x, y, q);
    double py = detail::det2(f[0], f[2]);
    double qx = detail::det2(f[3], f[1]);
    double px = detail::det2(f[0], f[1]);
    double qy = detail::det2(f[3], f[2]);
    double scale = f[0].norm() * f[1].norm() * f[2].norm() * f[3].norm();
    if (std::abs(px) < projective_tolerance() * scale ||
        std::abs(qy) < projective_tolerance() * scale)
        throw DegenerateCrossRatio("cross_ratio: p = x or q = y");
    return (py * qx) / (px * qy);
}

/// Affine chart determined by a hyperplane at infinity. chart/unchart use a
/// Householder frame of the covector's orthogonal complement.
class AffinePatch {
  public:
    explicit AffinePatch(ProjectiveHyperplane at_infinity)
        : infinity_(std::move(at_infinity)) {
        const Vec& h = infinity_.covector();
        int n = static_cast<int>(h.size());
        Eigen::HouseholderQR<Mat> qr(h);
        Mat q = qr.householderQ() * Mat::Identity(n, n);
        normal_ = q.col(0);
        if (normal_.dot(h) < 0) normal_ = -normal_;
        basis_ = q.rightCols(n - 1);
    }

    const ProjectiveHyperplane& hyperplane_at_infinity() const {
        return infinity_;
    }

    Vec chart(const ProjectivePoint& x) const {
        double w = normal_.dot(x.coords());
        if (std::abs(w) < projective_tolerance())
            throw DomainError("AffinePatch::chart: point at infinity");
        return (basis_.transpose() * x.coords()) / w;
    }

    ProjectivePoint unchart(const Vec& y) const {
        return ProjectivePoint(basis_ * y + normal_);
    }

  private:
    ProjectiveHyperplane infinity_;
    Vec normal_;
    Mat basis_;
};

} // namespace bendcusp
