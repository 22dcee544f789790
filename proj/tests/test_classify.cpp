#include <catch2/catch_amalgamated.hpp>

#include <bendcusp/classify.hpp>

#include <json.hpp>

#include <cmath>
#include <fstream>

using namespace bendcusp;

namespace {

nlohmann::json load_json(const std::string& name) {
    std::ifstream in(std::string(BEND_CONFIG_DIR) + "/" + name);
    REQUIRE(in.good());
    nlohmann::json j;
    in >> j;
    return j;
}

Mat json_matrix(const nlohmann::json& rows) {
    int n = static_cast<int>(rows.size());
    Mat m(n, n);
    for (int r = 0; r < n; ++r)
        for (int c = 0; c < n; ++c) m(r, c) = rows[r][c].get<double>();
    return m;
}

PeripheralData cusp_from_json(const nlohmann::json& file,
                              const std::string& name) {
    PeripheralData data;
    data.dimension = file.at("dimension").get<int>();
    for (const auto& cusp : file.at("cusps")) {
        if (cusp.at("name").get<std::string>() != name) continue;
        for (const auto& m : cusp.at("delta"))
            data.delta.push_back(json_matrix(m));
        data.gamma0 = json_matrix(cusp.at("gamma"));
        for (const auto& pt : cusp.at("points"))
            data.points.push_back(
                {pt[0].get<double>(), pt[1].get<int>()});
        return data;
    }
    FAIL("no cusp named " + name);
    return data;
}

PeripheralData synthetic_cusp(int d, const Mat& gamma0) {
    PeripheralData data;
    data.dimension = d;
    Vec w = Vec::Zero(d - 1);
    w[d - 2] = 1.0;
    data.delta.push_back(parabolic_matrix(w));
    data.gamma0 = gamma0;
    return data;
}

}  // namespace

TEST_CASE("pencil action of model elements") {
    int d = 3;
    SECTION("parabolic translations act trivially on the pencil") {
        Vec v(2);
        v << 1.5, -0.3;
        Mat p = pencil_action(parabolic_matrix(v), d);
        CHECK(p(0, 0) == Catch::Approx(1.0).margin(1e-12));
        // The translation part along the pencil is the crossing component.
        CHECK(p(0, 1) == Catch::Approx(1.5).margin(1e-12));
        Vec w(2);
        w << 0.0, 1.2;
        Mat pw = pencil_action(parabolic_matrix(w), d);
        CHECK(pw(0, 1) == Catch::Approx(0.0).margin(1e-12));
    }
    SECTION("bent model elements scale the pencil by e^b") {
        Vec u(1);
        u << 0.7;
        Mat p = pencil_action(bent_group_element(0.3, u).matrix() *
                                  bent_group_element(0.3, u).matrix()(d, d),
                              d);
        CHECK(p(0, 0) == Catch::Approx(std::exp(0.3)).epsilon(1e-10));
    }
    SECTION("the bending element scales the pencil by e^{(d+1)t}") {
        double t = 0.4;
        Mat p = pencil_action(bending_element(t, d).matrix(), d);
        CHECK(p(0, 0) == Catch::Approx(std::exp((d + 1) * t)).epsilon(1e-10));
    }
    SECTION("non-centralizer input throws") {
        CHECK_THROWS_AS(pencil_action(model_rotation(1, 2, 0.3, d).matrix(), d),
                        NotInCentralizer);
    }
}

TEST_CASE("single-crossing cusp bends, balanced cusp stays standard") {
    nlohmann::json j = load_json("whitehead.json");
    PeripheralData t1 = cusp_from_json(j, "T1");
    PeripheralData t2 = cusp_from_json(j, "T2");

    for (double t : {-0.8, -0.3, 0.2, 0.5, 1.0}) {
        CuspReport r1 = classify(t1, t);
        CHECK(r1.kind == CuspClass::Bent);
        CHECK(r1.beta == Catch::Approx(std::exp(std::abs((t1.dimension + 1) *
                                                         t))).epsilon(1e-9));
        CuspReport r2 = classify(t2, t);
        CHECK(r2.kind == CuspClass::Standard);
        CHECK(r2.beta == Catch::Approx(1.0).margin(1e-9));
    }
    CHECK(classify(t1, 0.0).kind == CuspClass::Standard);
    CHECK(classify(t2, 0.0).kind == CuspClass::Standard);
}

TEST_CASE("separating-style configuration is standard at every cusp") {
    nlohmann::json j = load_json("separating.json");
    for (const char* name : {"C1", "C2"}) {
        PeripheralData data = cusp_from_json(j, name);
        for (double t : {-1.0, -0.5, 0.0, 0.5, 1.0})
            CHECK(classify(data, t).kind == CuspClass::Standard);
    }
}

TEST_CASE("normal form matches the exact model element") {
    nlohmann::json j = load_json("whitehead.json");
    PeripheralData t1 = cusp_from_json(j, "T1");
    CuspReport r = classify(t1, 0.5);
    CHECK(r.normal_residual < 1e-8);
    // The conjugator actually conjugates gamma (or its inverse) onto the
    // reported normal form.
    Mat gamma = peripheral_holonomy(t1, 0.5);
    if (r.inverted) gamma = Mat(gamma.inverse());
    gamma /= gamma(3, 3);
    Mat moved = r.conjugator * gamma * Mat(r.conjugator.inverse());
    moved /= moved(3, 3);
    CHECK((moved - r.normal_form).norm() < 1e-8);
}

TEST_CASE("classification is stable under wall-centralizer conjugation") {
    int d = 3;
    Vec u(1);
    u << 0.4;
    SplitMix64 rng(99);
    std::vector<std::pair<Mat, CuspClass>> models = {
        {bent_group_element(0.6, u).matrix(), CuspClass::Bent},
        {parabolic_matrix(Vec::Constant(2, 0.8)), CuspClass::Standard},
        {degenerate_p_matrix(0.9, u), CuspClass::DegenerateP},
        {degenerate_b_matrix(0.5, u), CuspClass::DegenerateB}};
    for (const auto& [model, kind] : models) {
        for (int trial = 0; trial < 5; ++trial) {
            double a = rng.uniform(-2.0, 2.0);
            double c = rng.uniform(-2.0, 2.0);
            double m = std::exp(rng.uniform(-1.0, 1.0));
            double z = rng.uniform(-2.0, 2.0);
            Mat n = detail::wall_centralizer_element(d, a, c, m, z);
            Mat gamma = n * model * Mat(n.inverse());
            CuspReport r = classify(synthetic_cusp(d, gamma), 0.0);
            CHECK(r.kind == kind);
            CHECK(r.normal_residual < 1e-7);
        }
    }
}

TEST_CASE("gamma and its inverse classify identically") {
    int d = 3;
    Vec u(1);
    u << 0.4;
    std::vector<std::pair<Mat, CuspClass>> models = {
        {bent_group_element(0.6, u).matrix(), CuspClass::Bent},
        {parabolic_matrix(Vec::Constant(2, 0.8)), CuspClass::Standard},
        {degenerate_p_matrix(0.9, u), CuspClass::DegenerateP},
        {degenerate_b_matrix(0.5, u), CuspClass::DegenerateB}};
    for (const auto& [model, kind] : models) {
        CuspReport fwd = classify(synthetic_cusp(d, model), 0.0);
        CuspReport bwd =
            classify(synthetic_cusp(d, Mat(model.inverse())), 0.0);
        CHECK(fwd.kind == kind);
        CHECK(bwd.kind == kind);
        CHECK(fwd.beta == Catch::Approx(bwd.beta).epsilon(1e-9));
    }
}

TEST_CASE("degenerate classifications carry certified witnesses") {
    nlohmann::json j = load_json("degenerate_pprime.json");
    PeripheralData data = cusp_from_json(j, "P1");
    CuspReport r = classify(data, 0.25);
    CHECK(r.kind == CuspClass::DegenerateP);
    CHECK(r.witness_certified);

    Vec u(1);
    u << 0.7;
    CuspReport rb =
        classify(synthetic_cusp(3, degenerate_b_matrix(0.3, u)), 0.0);
    CHECK(rb.kind == CuspClass::DegenerateB);
    CHECK(rb.witness_certified);
    CHECK(rb.beta == Catch::Approx(std::exp(0.3)).epsilon(1e-9));
}

TEST_CASE("higher-dimensional classification") {
    for (int d : {4, 5}) {
        Vec u = Vec::LinSpaced(d - 2, 0.3, 0.9);
        Mat n = detail::wall_centralizer_element(d, 0.7, -0.4, 1.3, 0.2);
        Mat gamma =
            n * bent_group_element(0.8, u).matrix() * Mat(n.inverse());
        CuspReport r = classify(synthetic_cusp(d, gamma), 0.0);
        CHECK(r.kind == CuspClass::Bent);
        CHECK(r.b == Catch::Approx(0.8).epsilon(1e-9));
    }
}

TEST_CASE("affine circle developing map") {
    SECTION("no points gives the identity") {
        AffineCircleMap m = affine_circle_developing({}, 0.9);
        CHECK(m.scale == Catch::Approx(1.0));
        CHECK(m.offset == Catch::Approx(1.0));
        CHECK(m(0.37) == Catch::Approx(0.37));
    }
    SECTION("one positive point scales by e^t") {
        AffineCircleMap m = affine_circle_developing({{0.5, +1}}, 0.7);
        CHECK(m.scale == Catch::Approx(std::exp(0.7)).epsilon(1e-12));
        CHECK(m(0.25) == Catch::Approx(0.25));
        CHECK(m(1.0) == Catch::Approx(0.5 + 0.5 * std::exp(0.7)));
    }
    SECTION("balanced points give scale one with an offset") {
        AffineCircleMap m =
            affine_circle_developing({{0.3, +1}, {0.6, -1}}, 0.7);
        CHECK(m.scale == Catch::Approx(1.0).epsilon(1e-12));
        CHECK(m.offset ==
              Catch::Approx(0.7 + 0.3 * std::exp(0.7)).epsilon(1e-12));
    }
    SECTION("ordering violations throw") {
        CHECK_THROWS_AS(affine_circle_developing({{0.6, 1}, {0.3, 1}}, 0.2),
                        OrderError);
        CHECK_THROWS_AS(affine_circle_developing({{1.0, 1}}, 0.2), OrderError);
        CHECK_THROWS_AS(affine_circle_developing({{-0.1, 1}}, 0.2),
                        OrderError);
    }
    SECTION("developing scale matches the pencil multiplier") {
        nlohmann::json j = load_json("whitehead.json");
        PeripheralData t1 = cusp_from_json(j, "T1");
        double t = 0.35;
        CuspReport r = classify(t1, t);
        AffineCircleMap m =
            affine_circle_developing(t1.points, (t1.dimension + 1) * t);
        CHECK(m.scale == Catch::Approx(r.beta).epsilon(1e-9));
    }
}

namespace {

// A standard-model domain whose boundary graph is shifted by a bounded
// ripple: f(v) = |v|^2/2 + amp * sin(freq * v_1).
class RippleDomain : public ConvexDomain {
  public:
    RippleDomain(int d, double amp, double freq)
        : d_(d), amp_(amp), freq_(freq) {}
    int dim() const override { return d_; }
    double defining(const Vec& u) const override {
        return u[0] - 0.5 * u.tail(d_ - 1).squaredNorm() -
               amp_ * std::sin(freq_ * u[1]);
    }
    Vec interior_point() const override {
        Vec u = Vec::Zero(d_);
        u[0] = 10.0;
        return u;
    }

  private:
    int d_;
    double amp_, freq_;
};

}  // namespace

TEST_CASE("horoball sandwich constants") {
    BoxRegion cell;
    cell.lo = Vec::Constant(2, -1.0);
    cell.hi = Vec::Constant(2, 1.0);

    SECTION("the standard model fits itself exactly") {
        ParaboloidDomain omega(3);
        SandwichBounds b =
            horoball_sandwich(omega, CuspKind::Standard, cell, 17);
        CHECK(std::abs(b.d_upper) < 1e-9);
        CHECK(std::abs(b.e_lower) < 1e-9);
    }
    SECTION("the bent model fits itself exactly") {
        BentDomain omega(3);
        BoxRegion bent_cell;
        bent_cell.lo = Vec(2);
        bent_cell.lo << 0.5, -1.0;
        bent_cell.hi = Vec(2);
        bent_cell.hi << 2.0, 1.0;
        SandwichBounds b =
            horoball_sandwich(omega, CuspKind::Bent, bent_cell, 17);
        CHECK(std::abs(b.d_upper) < 1e-9);
        CHECK(std::abs(b.e_lower) < 1e-9);
    }
    SECTION("a known ripple is recovered") {
        RippleDomain omega(3, 0.3, 3.0);
        SandwichBounds b =
            horoball_sandwich(omega, CuspKind::Standard, cell, 65);
        CHECK(b.d_upper == Catch::Approx(0.3).epsilon(0.01));
        CHECK(b.e_lower == Catch::Approx(0.3).epsilon(0.01));
        CHECK(b.grid_margin < 0.1);
    }
}

TEST_CASE("precise invariance level") {
    int d = 3;
    Vec w(2);
    w << 0.0, 1.0;
    double c1 = precise_invariance_level(w, 0.1, d);
    double c2 = precise_invariance_level(w, 0.01, d);
    CHECK(c2 >= c1);          // smaller tolerance needs a deeper horoball
    CHECK(c1 > 0.0);

    Vec w2(2);
    w2 << 0.0, 2.0;
    double c3 = precise_invariance_level(w2, 0.1, d);
    CHECK(c3 >= c1);          // longer translation needs a deeper horoball

    Vec bad(2);
    bad << 1.0, 0.0;
    CHECK_THROWS_AS(precise_invariance_level(bad, 0.1, d), ModelError);
}
