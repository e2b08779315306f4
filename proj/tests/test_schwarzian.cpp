#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "schw/generators.hpp"
#include "schw/schwarzian.hpp"

using namespace schw;

namespace {

Diffeo exp_map_1d() {
    return Diffeo::from_jet_function(1, [](std::span<const double> x, int order) {
        Jet v = Jet::variable(1, order, 1, x[0]);
        return MapJet{{v.exp()}};
    });
}

}  // namespace

TEST_CASE("classical schwarzian values") {
    Diffeo sq = Diffeo::from_expressions(1, {"x1^2"});
    CHECK(classical_schwarzian(sq, 1.0) == doctest::Approx(-1.5));

    Diffeo ex = exp_map_1d();
    CHECK(classical_schwarzian(ex, 0.0) == doctest::Approx(-0.5));
    CHECK(classical_schwarzian(ex, 1.7) == doctest::Approx(-0.5));

    // Fractional-linear maps are in the kernel.
    Lcg rng(2);
    for (int t = 0; t < 25; ++t) {
        std::vector<double> x = random_point(rng, 1);
        Diffeo f = random_moebius(rng, 1, {{x}, false});
        CHECK(std::abs(classical_schwarzian(f, x[0])) < 1e-10);
    }

    // Critical points are rejected.
    CHECK_THROWS_AS(classical_schwarzian(sq, 0.0), DomainError);
}

TEST_CASE("flat schwarzian of the shear map") {
    Diffeo shear = Diffeo::from_expressions(2, {"x1 + x2^2", "x2"});
    double x[2] = {0.3, 0.7};

    S2OperatorValue s = schwarzian(shear, Connection::flat(2), x);
    CHECK(s.t_at(0, 1, 1) == doctest::Approx(2.0));
    CHECK(std::abs(s.u_at(1, 1)) < 1e-12);
    CHECK(std::abs(s.u_at(0, 0)) < 1e-12);
    CHECK(std::abs(s.u_at(0, 1)) < 1e-12);
    CHECK(std::abs(s.t_at(1, 1, 1)) < 1e-12);

    S2OperatorValue sf = schwarzian_flat(shear, x);
    S2OperatorValue sc = schwarzian_coord(shear, x);
    for (size_t i = 0; i < s.t.size(); ++i) {
        CHECK(s.t[i] == doctest::Approx(sf.t[i]).epsilon(1e-10));
        CHECK(s.t[i] == doctest::Approx(sc.t[i]).epsilon(1e-10));
    }
    for (size_t i = 0; i < s.u.size(); ++i) {
        CHECK(s.u[i] == doctest::Approx(sf.u[i]).epsilon(1e-10));
        CHECK(s.u[i] == doctest::Approx(sc.u[i]).epsilon(1e-10));
    }
}

TEST_CASE("schwarzian vanishes on moebius maps and at the identity") {
    Lcg rng(13);
    for (int t = 0; t < 20; ++t) {
        int n = 2 + t % 2;
        std::vector<double> x = random_point(rng, n);
        Diffeo f = random_moebius(rng, n, {{x}, false});
        CHECK(schwarzian(f, Connection::flat(n), x).max_abs() < 1e-9);
        CHECK(schwarzian_flat(f, x).max_abs() < 1e-9);
        CHECK(schwarzian_coord(f, x).max_abs() < 1e-9);
    }
    // Identity with a non-flat connection.
    Connection pi = random_projective_connection(rng, 2);
    std::vector<double> x = random_point(rng, 2);
    CHECK(schwarzian(Diffeo::identity(2), pi, x).max_abs() < 1e-11);
}

TEST_CASE("three paths agree on random flat cases") {
    Lcg rng(29);
    for (int t = 0; t < 20; ++t) {
        int n = 2 + t % 2;
        std::vector<double> x = random_point(rng, n);
        Diffeo f = random_map(rng, n, {{x}, false});
        S2OperatorValue a = schwarzian(f, Connection::flat(n), x);
        S2OperatorValue b = schwarzian_flat(f, x);
        S2OperatorValue c = schwarzian_coord(f, x);
        double scale = 1.0 + b.max_abs();
        for (size_t i = 0; i < a.t.size(); ++i) {
            CHECK(std::abs(a.t[i] - b.t[i]) < 1e-9 * scale);
            CHECK(std::abs(b.t[i] - c.t[i]) < 1e-9 * scale);
        }
        for (size_t i = 0; i < a.u.size(); ++i) {
            CHECK(std::abs(a.u[i] - b.u[i]) < 1e-9 * scale);
            CHECK(std::abs(b.u[i] - c.u[i]) < 1e-9 * scale);
        }
    }
}

TEST_CASE("one-dimensional reduction") {
    Lcg rng(41);
    for (int t = 0; t < 25; ++t) {
        std::vector<double> x = random_point(rng, 1);
        Diffeo f = random_map(rng, 1, {{x}, false});
        double scalar = schwarzian_coord(f, x).u_at(0, 0);
        double cl = classical_schwarzian(f, x[0]);
        CHECK(std::abs(scalar + cl) <= 1e-10 * (1.0 + std::abs(cl)));
    }
    // Multi-dimensional paths refuse n = 1.
    Diffeo f1 = Diffeo::from_expressions(1, {"x1 + 0.1*x1^3"});
    double x[1] = {0.2};
    CHECK_THROWS_AS(schwarzian(f1, Connection::flat(1), x), DimensionError);
    CHECK_THROWS_AS(schwarzian_flat(f1, x), DimensionError);
}

TEST_CASE("jacobian identity residual") {
    // Linear maps satisfy it exactly.
    Diffeo lin = Diffeo::affine(2, {1.0, 0.3, -0.2, 0.9}, {0.1, 0.2});
    double x[2] = {0.3, -0.2};
    CHECK(verify_jacobian_identity(lin, x) == doctest::Approx(0.0));

    Lcg rng(37);
    for (int t = 0; t < 10; ++t) {
        std::vector<double> p2 = random_point(rng, 2);
        Diffeo f = random_cubic_perturbation(rng, 2, {{p2}, false});
        CHECK(verify_jacobian_identity(f, p2) < 1e-9);

        std::vector<double> p3 = random_point(rng, 3);
        Diffeo m = random_moebius(rng, 3, {{p3}, false});
        CHECK(verify_jacobian_identity(m, p3) < 1e-9);
    }
}

TEST_CASE("third-jet dependence") {
    Lcg rng(43);
    for (int t = 0; t < 10; ++t) {
        int n = 2 + t % 2;
        std::vector<double> x = random_point(rng, n);
        Diffeo f1 = random_moebius(rng, n, {{x}, false});
        std::vector<double> y0 = f1(x);
        std::vector<std::string> comps(n);
        for (int i = 1; i <= n; ++i) {
            std::ostringstream ss;
            ss.precision(17);
            ss << "x" << i;
            if (i == 1) ss << " + 0.4*(x1 - " << y0[0] << ")^3";
            comps[i - 1] = ss.str();
        }
        Diffeo f2 = Diffeo::compose(Diffeo::from_expressions(n, comps), f1);

        // Same 2-jet at x, different 3-jet.
        MapJet j1 = f1.jet_at(x, 2), j2 = f2.jet_at(x, 2);
        for (int i = 0; i < n; ++i)
            for (int idx = 0; idx < j1.comp[i].table().size; ++idx)
                CHECK(j1.comp[i].coeff(idx) == doctest::Approx(j2.comp[i].coeff(idx)).epsilon(1e-10));

        S2OperatorValue d = schwarzian_flat(f1, x) - schwarzian_flat(f2, x);
        CHECK(d.max_abs() > 1e-3);
    }
}

TEST_CASE("schwarzian with a non-flat connection via the cocycle law") {
    Lcg rng(47);
    for (int t = 0; t < 8; ++t) {
        int n = 2 + t % 2;
        Connection pi = random_projective_connection(rng, n);
        std::vector<double> x = random_point(rng, n);
        Diffeo g = random_map(rng, n, {{x}, false});
        std::vector<double> y = g(x);
        Diffeo f = random_map(rng, n, {{y}, false});

        S2OperatorValue lhs = schwarzian(Diffeo::compose(f, g), pi, x);
        S2OperatorValue pulled =
            pullback_s2_operator(g, [&](std::span<const double> p) { return schwarzian(f, pi, p); }, x);
        S2OperatorValue rhs = pulled + schwarzian(g, pi, x);
        double scale = 1.0 + rhs.max_abs();
        for (size_t i = 0; i < lhs.t.size(); ++i) CHECK(std::abs(lhs.t[i] - rhs.t[i]) < 1e-7 * scale);
        for (size_t i = 0; i < lhs.u.size(); ++i) CHECK(std::abs(lhs.u[i] - rhs.u[i]) < 1e-7 * scale);
    }
}
