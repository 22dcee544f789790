#include <catch2/catch_amalgamated.hpp>

#include <bendcusp/projective.hpp>

using namespace bendcusp;

namespace {
Vec v2(double a, double b) {
    Vec v(2);
    v << a, b;
    return v;
}
Vec v3(double a, double b, double c) {
    Vec v(3);
    v << a, b, c;
    return v;
}
}  // namespace

TEST_CASE("projective points canonicalize and compare") {
    ProjectivePoint p(v3(2, 4, 2));
    ProjectivePoint q(v3(-1, -2, -1));
    CHECK(p.approx_equal(q));
    CHECK(p.coords().norm() == Catch::Approx(1.0));
    CHECK(p.coords()[0] > 0);

    ProjectivePoint r = ProjectivePoint::from_affine(v2(1, 2));
    CHECK(p.approx_equal(r));
    CHECK((p.affine() - v2(1, 2)).norm() < 1e-12);

    CHECK_THROWS_AS(ProjectivePoint(Vec::Zero(3)), GeometryError);
    CHECK_THROWS_AS(ProjectivePoint(v3(1, 0, 0)).affine(), DomainError);
}

TEST_CASE("projective maps act on points and hyperplanes") {
    Mat m(3, 3);
    m << 2, 0, 1, 0, 1, 0, 0, 0, 1;
    ProjectiveMap g(m);
    CHECK(std::abs(std::abs(g.matrix().determinant()) - 1.0) < 1e-12);

    ProjectivePoint x = ProjectivePoint::from_affine(v2(1, 1));
    ProjectivePoint gx = g(x);
    CHECK((gx.affine() - v2(3, 1)).norm() < 1e-12);

    CHECK((g * g.inverse()).identity_residual() < 1e-12);
    CHECK(ProjectiveMap(-Mat::Identity(3, 3)).identity_residual() < 1e-12);

    // Hyperplanes transform by the inverse transpose: incidence is preserved.
    ProjectiveHyperplane h(v3(1, -1, 0));
    CHECK(h.incident(ProjectivePoint(v3(1, 1, 0))));
    CHECK(g(h).incident(g(ProjectivePoint(v3(1, 1, 0)))));
}

TEST_CASE("cross ratio on a known collinear quadruple") {
    // Points -1, 0, 1/2, 1 on the affine line: [p:x:y:q] = 3.
    ProjectivePoint p = ProjectivePoint::from_affine(Vec::Constant(1, -1.0));
    ProjectivePoint x = ProjectivePoint::from_affine(Vec::Constant(1, 0.0));
    ProjectivePoint y = ProjectivePoint::from_affine(Vec::Constant(1, 0.5));
    ProjectivePoint q = ProjectivePoint::from_affine(Vec::Constant(1, 1.0));
    CHECK(cross_ratio(p, x, y, q) == Catch::Approx(3.0).epsilon(1e-12));
}

TEST_CASE("cross ratio is projectively invariant in the plane") {
    ProjectivePoint p = ProjectivePoint::from_affine(v2(-2, -2));
    ProjectivePoint x = ProjectivePoint::from_affine(v2(0, 0));
    ProjectivePoint y = ProjectivePoint::from_affine(v2(1, 1));
    ProjectivePoint q = ProjectivePoint::from_affine(v2(3, 3));
    double cr = cross_ratio(p, x, y, q);

    Mat m(3, 3);
    m << 1, 2, 0.5, 0, 3, 1, 0.2, 0, 1;
    ProjectiveMap g(m);
    double cr2 = cross_ratio(g(p), g(x), g(y), g(q));
    CHECK(cr2 == Catch::Approx(cr).epsilon(1e-9));

    ProjectivePoint off = ProjectivePoint::from_affine(v2(1, 0));
    CHECK_THROWS_AS(cross_ratio(p, x, off, q), CollinearityError);
}

TEST_CASE("projective lines parametrize their points") {
    ProjectivePoint a = ProjectivePoint::from_affine(v2(0, 0));
    ProjectivePoint b = ProjectivePoint::from_affine(v2(2, 0));
    ProjectiveLine line(a, b);
    CHECK(line.contains(ProjectivePoint::from_affine(v2(1, 0))));
    CHECK_FALSE(line.contains(ProjectivePoint::from_affine(v2(1, 1))));
    double s = line.parameter_of(b);
    CHECK(line.at(s).approx_equal(b));
    CHECK_THROWS_AS(ProjectiveLine(a, a), DegenerateLine);
}

TEST_CASE("affine patch charts round trip") {
    ProjectiveHyperplane h(v3(0, 0, 1));  // standard patch x3 = 1
    AffinePatch patch(h);
    ProjectivePoint p = ProjectivePoint::from_affine(v2(3, -4));
    Vec u = patch.chart(p);
    CHECK(patch.unchart(u).approx_equal(p));
}
