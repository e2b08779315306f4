#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "schw/diffeo.hpp"
#include "schw/generators.hpp"
#include "schw/rng.hpp"

using namespace schw;

namespace {

double coeff(const Jet& j, std::initializer_list<int> alpha) {
    std::vector<int> a(alpha);
    return j.coeff(std::span<const int>(a));
}

}  // namespace

TEST_CASE("identity and moebius basics") {
    Diffeo id = Diffeo::identity(2);
    double x[2] = {0.4, -0.3};
    MapJet j = id.jet_at(x, 3);
    CHECK(j.values()[0] == doctest::Approx(0.4));
    CHECK(j.values()[1] == doctest::Approx(-0.3));
    CHECK(j.linear_det() == doctest::Approx(1.0));

    // Identity matrix gives the identity map.
    Diffeo m = Diffeo::moebius(ProjectiveMatrix::identity(2));
    MapJet jm = m.jet_at(x, 3);
    for (int i = 0; i < 2; ++i)
        for (int idx = 0; idx < jm.comp[i].table().size; ++idx)
            CHECK(jm.comp[i].coeff(idx) == doctest::Approx(j.comp[i].coeff(idx)));
}

TEST_CASE("classical fractional-linear jets") {
    // f(x) = (2x+1)/(x+1): f(0) = 1, f' = 1, f'' = -2, f''' = 6.
    ProjectiveMatrix M(1, {2.0, 1.0, 1.0, 1.0});
    Diffeo f = Diffeo::moebius(M);
    double x[1] = {0.0};
    MapJet j = f.jet_at(x, 3);
    CHECK(coeff(j.comp[0], {0}) == doctest::Approx(1.0));
    CHECK(coeff(j.comp[0], {1}) == doctest::Approx(1.0));
    CHECK(coeff(j.comp[0], {2}) == doctest::Approx(-1.0));  // f''/2
    CHECK(coeff(j.comp[0], {3}) == doctest::Approx(1.0));   // f'''/6
}

TEST_CASE("moebius domain and singularity errors") {
    // n = 2 with c = (1, 0), d = 1: hyperplane x1 = -1.
    ProjectiveMatrix M(2, {1, 0, 0, 0, 1, 0, 1, 0, 1});
    Diffeo f = Diffeo::moebius(M);
    double bad[2] = {-1.0, 0.0};
    CHECK_THROWS_AS(f.jet_at(bad, 2), DomainError);
    CHECK(!f.in_domain(bad));
    double ok[2] = {0.5, 0.2};
    CHECK(f.in_domain(ok));

    ProjectiveMatrix S(1, {1.0, 1.0, 1.0, 1.0});
    CHECK_THROWS_AS(Diffeo::moebius(S), SingularError);
}

TEST_CASE("moebius group law") {
    Lcg rng(3);
    for (int t = 0; t < 25; ++t) {
        int n = 1 + t % 3;
        std::vector<double> x = random_point(rng, n);
        Requirements req{{x}, false};
        Diffeo g = random_moebius(rng, n, req);
        std::vector<double> y = g(x);
        Diffeo f = random_moebius(rng, n, {{y}, false});

        MapJet lhs = Diffeo::compose(f, g).jet_at(x, 3);
        MapJet rhs = map_compose(f.jet_at(y, 3), g.jet_at(x, 3), y);
        for (int i = 0; i < n; ++i) {
            double scale = rhs.comp[i].max_abs_coeff();
            for (int idx = 0; idx < rhs.comp[i].table().size; ++idx)
                CHECK(std::abs(lhs.comp[i].coeff(idx) - rhs.comp[i].coeff(idx)) <= 1e-11 * (1.0 + scale));
        }
    }
}

TEST_CASE("inverse of moebius equals the inverse matrix map") {
    Lcg rng(5);
    for (int t = 0; t < 20; ++t) {
        int n = 1 + t % 3;
        std::vector<double> x = random_point(rng, n);
        Diffeo f = random_moebius(rng, n, {{x}, false});
        Diffeo fi = f.inverse();
        std::vector<double> y = f(x);
        std::vector<double> back = fi(y);
        for (int i = 0; i < n; ++i) CHECK(std::abs(back[i] - x[i]) < 1e-12);
    }
}

TEST_CASE("structural and newton inversion") {
    // (x + y^2, y) inverts exactly to (u - v^2, v).
    Diffeo f = Diffeo::from_expressions(2, {"x1 + x2^2", "x2"});
    Diffeo fi = f.inverse();
    double y[2] = {1.25, 0.5};
    std::vector<double> x = fi(y);
    CHECK(x[0] == doctest::Approx(1.0));
    CHECK(x[1] == doctest::Approx(0.5));

    // Jets of the formal inverse match map_inverse of the forward jets.
    MapJet ji = fi.jet_at(y, 3);
    MapJet forward = f.jet_at(x, 3);
    MapJet expect = map_inverse(forward, x);
    for (int i = 0; i < 2; ++i)
        for (int idx = 0; idx < ji.comp[i].table().size; ++idx)
            CHECK(ji.comp[i].coeff(idx) == doctest::Approx(expect.comp[i].coeff(idx)).epsilon(1e-10));

    // invert(identity) = identity.
    Diffeo idi = Diffeo::identity(3).inverse();
    double p[3] = {0.1, 0.2, 0.3};
    std::vector<double> q = idi(p);
    CHECK(q[0] == doctest::Approx(0.1));

    // f(x) = x^2 has no real preimage of -1: Newton must fail.
    Diffeo sq = Diffeo::from_expressions(1, {"x1^2"});
    Diffeo sqi = sq.inverse();
    double neg[1] = {-1.0};
    CHECK_THROWS_AS(sqi.jet_at(neg, 2), SingularError);
}

TEST_CASE("chain rule for jets") {
    Lcg rng(9);
    for (int t = 0; t < 25; ++t) {
        int n = 1 + t % 3;
        std::vector<double> x = random_point(rng, n);
        Diffeo g = random_map(rng, n, {{x}, false});
        std::vector<double> y = g(x);
        Diffeo f = random_map(rng, n, {{y}, false});
        MapJet direct = Diffeo::compose(f, g).jet_at(x, 3);
        MapJet chained = map_compose(f.jet_at(y, 3), g.jet_at(x, 3), y);
        for (int i = 0; i < n; ++i) {
            double scale = chained.comp[i].max_abs_coeff();
            for (int idx = 0; idx < chained.comp[i].table().size; ++idx)
                CHECK(std::abs(direct.comp[i].coeff(idx) - chained.comp[i].coeff(idx)) <= 1e-11 * (1.0 + scale));
        }
    }
}

TEST_CASE("singular jacobian is rejected") {
    Diffeo sq = Diffeo::from_expressions(1, {"x1^2"});
    double zero[1] = {0.0};
    CHECK_THROWS_AS(sq.jet_at(zero, 2), SingularError);
    double ok[1] = {1.0};
    CHECK(sq.jet_at(ok, 2).linear_det() == doctest::Approx(2.0));
}

TEST_CASE("jets agree with central finite differences") {
    // Cross-validation only; the jets are the ground truth.
    Diffeo f = Diffeo::from_expressions(2, {"x1 + 0.3*x2^3 + 0.1*x1^2*x2", "x2 - 0.2*x1^2"});
    double x[2] = {0.2, -0.1};
    MapJet j = f.jet_at(x, 2);
    const double h = 1e-3;
    for (int comp = 0; comp < 2; ++comp)
        for (int var = 0; var < 2; ++var) {
            double xp[2] = {x[0], x[1]};
            double xm[2] = {x[0], x[1]};
            xp[var] += h;
            xm[var] -= h;
            double fd = (f(xp)[comp] - f(xm)[comp]) / (2 * h);
            std::vector<int> a{0, 0};
            a[var] = 1;
            double exact = j.comp[comp].partial(std::span<const int>(a));
            CHECK(std::abs(fd - exact) <= 1e-4 * (1.0 + std::abs(exact)));
        }
}
