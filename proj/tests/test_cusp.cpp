#include <catch2/catch_amalgamated.hpp>

#include <bendcusp/cusp.hpp>

using namespace bendcusp;

namespace {
Vec vn(std::initializer_list<double> cs) {
    Vec v(static_cast<long>(cs.size()));
    int i = 0;
    for (double c : cs) v[i++] = c;
    return v;
}
}  // namespace

TEST_CASE("bent domain membership and ideal segment") {
    BentDomain bent(3);
    CHECK(bent.membership(bent.unchart(vn({1, 1, 0}))) == Region::Interior);
    CHECK(bent.membership(bent.unchart(vn({0, 1, 0}))) == Region::Boundary);
    CHECK(bent.membership(bent.unchart(vn({-1, 1, 0}))) == Region::Exterior);
    // The ideal endpoints of the boundary segment s_infinity.
    CHECK(bent.membership(ProjectivePoint(vn({1, 0, 0, 0}))) ==
          Region::Boundary);
    CHECK(bent.membership(ProjectivePoint(vn({0, 1, 0, 0}))) ==
          Region::Boundary);
    // Interior points of the segment [e1, e2] are still in the closure.
    CHECK(bent.membership(ProjectivePoint(vn({0.7, 0.3, 0, 0}))) ==
          Region::Boundary);
    // Ideal points off the segment are not.
    CHECK(bent.membership(ProjectivePoint(vn({0, 0, 1, 0}))) ==
          Region::Exterior);
}

TEST_CASE("bent domain is convex but not strictly convex") {
    BentDomain bent(3);
    SplitMix64 rng(5);
    for (int k = 0; k < 2000; ++k) {
        Vec a(3), b(3);
        a << rng.uniform(-2, 10), rng.uniform(0.05, 8), rng.uniform(-2, 2);
        b << rng.uniform(-2, 10), rng.uniform(0.05, 8), rng.uniform(-2, 2);
        if (bent.defining(a) <= 0 || bent.defining(b) <= 0) continue;
        CHECK(bent.defining(Vec(0.5 * (a + b))) > 0);
    }
}

TEST_CASE("bent group preserves the domain and horosphere levels") {
    int d = 3;
    BentDomain bent(d);
    SplitMix64 rng(9);
    CHECK(bent_group_element(0.0, Vec::Zero(d - 2)).identity_residual() <
          1e-14);
    for (int k = 0; k < 50; ++k) {
        double b = rng.uniform(-1.5, 1.5);
        Vec v = rng.gaussian_vector(d - 2);
        Vec u(3);
        u << rng.uniform(0.5, 6), rng.uniform(0.2, 4), rng.uniform(-1.5, 1.5);
        if (bent.defining(u) <= 0) continue;
        ProjectiveMap g = bent_group_element(b, v);
        // Matrix action agrees with the affine chart action.
        Vec gu = bent.chart(g(bent.unchart(u)));
        CHECK((gu - bent_apply_chart(b, v, u)).norm() < 1e-9);
        CHECK(bent.defining(gu) > 0);
        CHECK(bent_level(gu) == Catch::Approx(bent_level(u)).margin(1e-9));
        // Group law.
        double b2 = rng.uniform(-1, 1);
        Vec v2 = rng.gaussian_vector(d - 2);
        CHECK((bent_group_element(b, v) * bent_group_element(b2, v2))
                  .approx_equal(bent_group_element(b + b2, Vec(v + v2)),
                                1e-10));
    }
}

TEST_CASE("pure dilations attract boundary orbits to the ideal vertex") {
    BentDomain bent(3);
    ProjectivePoint z = bent.unchart(vn({0.0, 1.0, 0.0}));  // boundary
    ProjectiveMap g = bent_group_element(-1.0, Vec::Zero(1));
    // The approach to the attracting vertex is slow (the chart x-coordinate
    // grows linearly in the iterate count), so test the projective residual
    // at the matching rate.
    ProjectivePoint cur = z;
    double prev = 1.0;
    for (int n = 0; n < 2000; ++n) cur = g(cur);
    double res = (cur.coords() - Vec::Unit(4, 0)).norm();
    CHECK(res < 1e-3);
    for (int n = 0; n < 2000; ++n) cur = g(cur);
    CHECK((cur.coords() - Vec::Unit(4, 0)).norm() < 0.6 * res);
    (void)prev;
}

TEST_CASE("pure translation orbits stay on a hyperplane section") {
    // Translations fix y, so the orbit of a boundary point lies in the
    // hyperplane x2 = y0 x4, whose section of the boundary is an ellipsoid
    // (a paraboloid in the chart): the boundary of a totally geodesic copy
    // of H^{d-1}.
    BentDomain bent(4);
    double y0 = 2.0;
    Vec u0 = vn({0.5 * 1.25 - std::log(y0), y0, 0.5, 1.0});
    REQUIRE(std::abs(bent.defining(u0)) < 1e-12);
    ProjectiveHyperplane h(vn({0, 1, 0, 0, -y0}));
    SplitMix64 rng(3);
    for (int k = 0; k < 20; ++k) {
        Vec v = rng.gaussian_vector(2);
        ProjectivePoint img = bent_group_element(0.0, v)(bent.unchart(u0));
        CHECK(h.incident(img, 1e-9));
        CHECK(bent.membership(img) == Region::Boundary);
    }
}

TEST_CASE("degenerate elements preserve the companion form") {
    QuadraticFormQ qp = QuadraticFormQ::primed(4);
    SplitMix64 rng(71);
    for (int k = 0; k < 30; ++k) {
        double a = rng.uniform(-2, 2);
        Vec u = rng.gaussian_vector(2);
        CHECK(qp.preservation_residual(degenerate_p_element(a, u).matrix()) <
              1e-10);
    }
}

TEST_CASE("omega_x sections of the bent boundary") {
    ProjectivePoint x = ProjectivePoint(vn({0, 1, 0, 1}));  // (0,1,0) chart
    PlaneSliceDomain section = omega_x_section(x, 3);
    // Section = {(s, t): s > -log t}.
    CHECK(section.defining(vn({1.0, 1.0})) > 0);
    CHECK(std::abs(section.defining(vn({0.0, 1.0}))) < 1e-12);
    CHECK(section.defining(vn({-1.0, 1.0})) < 0);
    // Its ideal boundary contains the s_infinity directions.
    CHECK(section.membership(ProjectivePoint(vn({1, 0, 0}))) ==
          Region::Boundary);
    CHECK(section.membership(ProjectivePoint(vn({0, 1, 0}))) ==
          Region::Boundary);

    // Projective invariance under pure dilations: a dilation moves chart
    // points within the same section set.
    BentDomain bent(3);
    Vec p = vn({2.0, 1.0, 0.0});
    Vec q = bent_apply_chart(0.7, Vec::Zero(1), p);
    CHECK(section.defining(vn({q[0], q[1]})) > 0);

    // Sections at translated base points are the translated sections.
    ProjectivePoint x2 = bent_group_element(0.0, vn({1.0}))(x);
    PlaneSliceDomain section2 = omega_x_section(x2, 3);
    // The section threshold is shifted by |v|^2/2 = 0.5.
    CHECK(std::abs(section2.defining(vn({0.5, 1.0}))) < 1e-12);
    CHECK(section2.defining(vn({1.0, 1.0})) > 0);

    CHECK_THROWS_AS(omega_x_section(ProjectivePoint(vn({1, 0, 0, 0})), 3),
                    DegenerateSection);
}

TEST_CASE("degenerate lattice witnesses escape to antipodal points") {
    for (auto variant : {DegenerateVariant::PPrime,
                         DegenerateVariant::BPrime}) {
        std::vector<Vec> basis = {vn({1.0, 0.0}), vn({0.0, 1.0})};
        DegenerateWitness w = degenerate_affine_line_witness(variant, basis);
        CHECK(w.residual_plus < 1e-6);
        CHECK(w.residual_minus < 1e-6);
        // Antipodal limits in the sphere lift.
        CHECK((w.seq_plus.back() + w.seq_minus.back()).norm() < 1e-5);
    }
    std::vector<Vec> degenerate = {vn({1.0, 0.0}), vn({2.0, 0.0})};
    CHECK_THROWS_AS(degenerate_affine_line_witness(DegenerateVariant::PPrime,
                                                   degenerate),
                    LatticeError);
}

TEST_CASE("deep simplex lengths match the closed forms") {
    // Frozen values at x0=100, y0=1, v0=0.
    Vec z0 = vn({100.0, 1.0, 0.0});
    CuspSimplex s = cusp_simplex(z0, 0.1);
    CHECK(s.formula[0] == Catch::Approx(0.5).epsilon(1e-12));
    CHECK(s.formula[1] == Catch::Approx(0.05).epsilon(1e-10));
    CHECK(s.formula[2] ==
          Catch::Approx(1.0 / std::sqrt(2.0)).epsilon(1e-12));
    for (size_t i = 0; i < s.finsler.size(); ++i)
        CHECK(s.finsler[i] == Catch::Approx(s.formula[i]).margin(1e-9));
    CHECK(s.lebesgue == Catch::Approx(0.1 * std::pow(100.0, 1.5) / 6.0)
                            .epsilon(1e-9));

    // Random deep points, all four formulas against the oracle.
    SplitMix64 rng(2024);
    for (int k = 0; k < 20; ++k) {
        Vec z(4);
        z << rng.uniform(50, 500), rng.uniform(0.5, 2.0),
            rng.uniform(-1.0, 1.0), rng.uniform(-1.0, 1.0);
        CuspSimplex deep = cusp_simplex(z, 0.05);
        for (size_t i = 0; i < deep.finsler.size(); ++i)
            CHECK(deep.finsler[i] ==
                  Catch::Approx(deep.formula[i]).margin(1e-9));
    }

    // Too shallow (v0 != 0 pushes the perpendicular edge out of the unit
    // ball): flagged, and the computed threshold fixes it.
    CHECK_THROWS_AS(cusp_simplex(vn({0.6, 1.0, 1.0}), 0.1), NotYetDeep);
    double x0 = cusp_depth_threshold(1.0, vn({1.0}), 0.1, 3);
    Vec ok = vn({x0, 1.0, 1.0});
    CHECK_NOTHROW(cusp_simplex(ok, 0.1));
}

TEST_CASE("bent density model matches direct unit ball volumes") {
    BentDensityModel model(3, 1.0, 600.0, 96, 1024);
    BentDomain bent(3);
    SplitMix64 rng(44);
    for (double l : {2.0, 17.0, 130.0}) {
        Vec u = vn({l, 1.0, 0.0});
        double direct = busemann_unit_ball_volume(bent, bent.unchart(u), 1024);
        CHECK(model.unit_ball_volume(l) ==
              Catch::Approx(direct).epsilon(0.02));
        // Equivariance: a random group element moves the ball volume by the
        // chart Jacobian e^b = y.
        double b = rng.uniform(-0.5, 0.5);
        Vec v = rng.gaussian_vector(1);
        Vec moved = bent_apply_chart(b, v, u);
        double at_moved =
            busemann_unit_ball_volume(bent, bent.unchart(moved), 1024);
        CHECK(at_moved == Catch::Approx(moved[1] * direct).epsilon(0.03));
    }
}

TEST_CASE("standard cusp shells match the closed form") {
    CuspLatticeCell cell{vn({0.0, 0.0}), vn({1.0, 1.0})};
    ShellSchedule sched{8.0, 4};
    auto shells = cusp_volume_estimate(CuspKind::Standard, 3, cell, sched,
                                       200000, 11);
    REQUIRE(shells.size() == 4);
    for (int k = 0; k < 4; ++k) {
        double X = sched.x0 * std::pow(2.0, k);
        double exact = standard_cusp_shell_volume_exact(3, cell, X, 2 * X);
        CHECK(shells[k].value == Catch::Approx(exact).epsilon(0.05));
    }
}

TEST_CASE("bent cusp shells decay in dimension 3 and diverge in 2") {
    CuspLatticeCell cell3{vn({0.0, 0.0}), vn({0.7, 1.0})};
    ShellSchedule sched{16.0, 6};
    auto bent3 = cusp_volume_estimate(CuspKind::Bent, 3, cell3, sched,
                                      100000, 21);
    for (size_t k = 1; k < bent3.size(); ++k) {
        double sigma = 3 * std::hypot(bent3[k].standard_error,
                                      bent3[k - 1].standard_error);
        CHECK(bent3[k].value < 0.9 * bent3[k - 1].value + sigma);
    }

    CuspLatticeCell cell2{vn({0.0}), vn({0.7})};
    auto bent2 = cusp_volume_estimate(CuspKind::Bent, 2, cell2,
                                      ShellSchedule{16.0, 8}, 100000, 22);
    double partial = 0.0;
    for (size_t k = 0; k < bent2.size(); ++k) {
        // Each shell adds mass comparable to the first: no leveling off.
        CHECK(bent2[k].value > 0.5 * bent2[0].value);
        partial += bent2[k].value;
    }
    CHECK(partial > 4.0 * bent2[0].value);
}

TEST_CASE("lattice cell validation") {
    CuspLatticeCell bad{vn({0.0, 1.0}), vn({1.0, 0.5})};
    CHECK_THROWS_AS(cusp_volume_estimate(CuspKind::Standard, 3, bad,
                                         ShellSchedule{8.0, 1}, 10, 1),
                    LatticeError);
}
