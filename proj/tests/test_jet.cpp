#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "schw/jet.hpp"
#include "schw/rng.hpp"

using namespace schw;

namespace {

double coeff(const Jet& j, std::initializer_list<int> alpha) {
    std::vector<int> a(alpha);
    return j.coeff(std::span<const int>(a));
}

double part(const Jet& j, std::initializer_list<int> alpha) {
    std::vector<int> a(alpha);
    return j.partial(std::span<const int>(a));
}

}  // namespace

TEST_CASE("coordinate jets") {
    Jet v = Jet::variable(2, 3, 1, 0.5);
    CHECK(v.value() == 0.5);
    CHECK(coeff(v, {1, 0}) == 1.0);
    CHECK(coeff(v, {0, 1}) == 0.0);
    CHECK(coeff(v, {2, 0}) == 0.0);

    CHECK_THROWS_AS(Jet::variable(1, 3, 2, 0.0), DimensionError);
    CHECK_THROWS_AS(Jet::variable(2, 0, 1, 0.0), DimensionError);
}

TEST_CASE("products") {
    // (2 + h)^2 = 4 + 4h + h^2
    Jet x = Jet::variable(1, 2, 1, 2.0);
    Jet sq = x * x;
    CHECK(coeff(sq, {0}) == doctest::Approx(4.0));
    CHECK(coeff(sq, {1}) == doctest::Approx(4.0));
    CHECK(coeff(sq, {2}) == doctest::Approx(1.0));

    // (1 + h)(1 - h) = 1 - h^2 at K = 2.
    Jet a = Jet::constant(1, 2, 1.0) + Jet::variable(1, 2, 1, 0.0) - 1.0;
    Jet one = Jet::constant(1, 2, 1.0);
    Jet p = (one + a) * (one - a);
    CHECK(coeff(p, {0}) == doctest::Approx(1.0));
    CHECK(coeff(p, {1}) == doctest::Approx(0.0));
    CHECK(coeff(p, {2}) == doctest::Approx(-1.0));

    // Truncation at K = 1: (1 + h)^2 = 1 + 2h.
    Jet h1 = Jet::variable(1, 1, 1, 0.0);
    Jet q = (1.0 + h1) * (1.0 + h1);
    CHECK(q.value() == doctest::Approx(1.0));
    CHECK(coeff(q, {1}) == doctest::Approx(2.0));

    // x*y at base (2,3), K = 3.
    Jet xx = Jet::variable(2, 3, 1, 2.0);
    Jet yy = Jet::variable(2, 3, 2, 3.0);
    Jet xy = xx * yy;
    CHECK(coeff(xy, {0, 0}) == doctest::Approx(6.0));
    CHECK(coeff(xy, {1, 0}) == doctest::Approx(3.0));
    CHECK(coeff(xy, {0, 1}) == doctest::Approx(2.0));
    CHECK(coeff(xy, {1, 1}) == doctest::Approx(1.0));
    CHECK(coeff(xy, {2, 0}) == doctest::Approx(0.0));

    Jet wrong = Jet::variable(2, 2, 1, 0.0);
    CHECK_THROWS_AS((void)(xx * wrong), DimensionError);
}

TEST_CASE("inverse, log, exp") {
    // 1/(1 + h) = 1 - h + h^2 at K = 2.
    Jet h = Jet::variable(1, 2, 1, 0.0);
    Jet inv = (1.0 + h).inv();
    CHECK(coeff(inv, {0}) == doctest::Approx(1.0));
    CHECK(coeff(inv, {1}) == doctest::Approx(-1.0));
    CHECK(coeff(inv, {2}) == doctest::Approx(1.0));

    // log(1 + h) = h - h^2/2 + h^3/3 at K = 3.
    Jet h3 = Jet::variable(1, 3, 1, 0.0);
    Jet lg = (1.0 + h3).log();
    CHECK(coeff(lg, {0}) == doctest::Approx(0.0));
    CHECK(coeff(lg, {1}) == doctest::Approx(1.0));
    CHECK(coeff(lg, {2}) == doctest::Approx(-0.5));
    CHECK(coeff(lg, {3}) == doctest::Approx(1.0 / 3.0));

    // Constant jets invert to constants.
    Jet two = Jet::constant(2, 3, 2.0);
    CHECK(two.inv().value() == doctest::Approx(0.5));
    CHECK(two.inv().max_abs_coeff() == doctest::Approx(0.5));

    CHECK_THROWS_AS(Jet::variable(1, 2, 1, 0.0).inv(), DomainError);
    CHECK_THROWS_AS(Jet::constant(1, 2, -1.0).log(), DomainError);

    // exp(log(a)) = a for positive constant term.
    Jet a = 0.7 + Jet::variable(1, 3, 1, 0.0) * 0.3;
    Jet rt = a.log().exp();
    for (int i = 0; i < 4; ++i) CHECK(rt.coeff(i) == doctest::Approx(a.coeff(i)).epsilon(1e-12));

    // pow: (1+h)^0.5 squared returns 1+h.
    Jet root = (1.0 + h3).pow(0.5);
    Jet sq = root * root;
    CHECK(coeff(sq, {1}) == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(coeff(sq, {2}) == doctest::Approx(0.0).epsilon(1e-12));
}

TEST_CASE("composition") {
    // g(y) = y^2 at base 1, F(h) = 1 + h + h^2 -> 1 + 2h + 3h^2 at K = 2.
    Jet y = Jet::variable(1, 2, 1, 1.0);
    Jet g = y * y;
    Jet h = Jet::variable(1, 2, 1, 0.0);
    MapJet F{{1.0 + h + h * h}};
    double base[1] = {1.0};
    Jet r = compose(g, F, base);
    CHECK(coeff(r, {0}) == doctest::Approx(1.0));
    CHECK(coeff(r, {1}) == doctest::Approx(2.0));
    CHECK(coeff(r, {2}) == doctest::Approx(3.0));

    // Identity coordinate jet returns the component.
    Jet id1 = Jet::variable(1, 2, 1, 1.0);
    Jet rid = compose(id1, F, base);
    for (int i = 0; i < 3; ++i) CHECK(rid.coeff(i) == doctest::Approx(F.comp[0].coeff(i)));

    // Constants compose to themselves.
    Jet c = Jet::constant(1, 2, 7.5);
    CHECK(compose(c, F, base).value() == doctest::Approx(7.5));
    CHECK(compose(c, F, base).max_abs_coeff() == doctest::Approx(7.5));

    // Base-point mismatch is an error.
    double wrong_base[1] = {1.5};
    CHECK_THROWS_AS(compose(g, F, wrong_base), DataError);
}

TEST_CASE("map inverse") {
    // F(h) = h + h^2 at base 0 -> G(k) = k - k^2 + 2k^3 at K = 3.
    Jet h = Jet::variable(1, 3, 1, 0.0);
    MapJet F{{h + h * h}};
    double base[1] = {0.0};
    MapJet G = map_inverse(F, base);
    CHECK(coeff(G.comp[0], {0}) == doctest::Approx(0.0));
    CHECK(coeff(G.comp[0], {1}) == doctest::Approx(1.0));
    CHECK(coeff(G.comp[0], {2}) == doctest::Approx(-1.0));
    CHECK(coeff(G.comp[0], {3}) == doctest::Approx(2.0));

    // F(G) = id to order 3.
    Jet fg = compose(F.comp[0], G, std::vector<double>{0.0});
    CHECK(coeff(fg, {0}) == doctest::Approx(0.0));
    CHECK(coeff(fg, {1}) == doctest::Approx(1.0));
    CHECK(std::abs(coeff(fg, {2})) < 1e-10);
    CHECK(std::abs(coeff(fg, {3})) < 1e-10);

    // Linear maps invert to the matrix inverse.
    Jet x = Jet::variable(2, 2, 1, 0.0), y = Jet::variable(2, 2, 2, 0.0);
    MapJet L{{2.0 * x + 1.0 * y, 1.0 * x + 1.0 * y}};
    double base2[2] = {0.0, 0.0};
    MapJet Li = map_inverse(L, base2);
    std::vector<double> m = Li.linear();
    CHECK(m[0] == doctest::Approx(1.0));
    CHECK(m[1] == doctest::Approx(-1.0));
    CHECK(m[2] == doctest::Approx(-1.0));
    CHECK(m[3] == doctest::Approx(2.0));

    // Zero linear part is singular.
    MapJet Z{{h * h}};
    CHECK_THROWS_AS(map_inverse(Z, base), SingularError);

    // Base points swap: constants of the inverse are the original base.
    Jet hx = Jet::variable(1, 3, 1, 2.0);
    MapJet F2{{hx * hx}};  // f(x) = x^2 near x = 2, value 4
    double base3[1] = {2.0};
    MapJet G2 = map_inverse(F2, base3);
    CHECK(G2.comp[0].value() == doctest::Approx(2.0));
    CHECK(coeff(G2.comp[0], {1}) == doctest::Approx(0.25));
}

TEST_CASE("jacobian determinant") {
    // Identity in two variables.
    double at[2] = {0.3, -0.2};
    MapJet id = identity_map_jet(2, 3, at);
    Jet J = jacobian_det(id);
    CHECK(J.value() == doctest::Approx(1.0));
    CHECK(J.max_abs_coeff() == doctest::Approx(1.0));

    // Unipotent map (x + y^2, y) has constant Jacobian 1.
    Jet x = Jet::variable(2, 3, 1, 0.1), y = Jet::variable(2, 3, 2, 0.4);
    MapJet F{{x + y * y, y}};
    Jet JF = jacobian_det(F);
    CHECK(JF.value() == doctest::Approx(1.0));
    Jet JFm1 = JF - 1.0;
    CHECK(JFm1.max_abs_coeff() == doctest::Approx(0.0));

    // 1-d: f(h) = h + h^2 at 0 -> J = 1 + 2h of order 2.
    Jet h = Jet::variable(1, 3, 1, 0.0);
    MapJet F1{{h + h * h}};
    Jet J1 = jacobian_det(F1);
    CHECK(J1.order() == 2);
    CHECK(coeff(J1, {0}) == doctest::Approx(1.0));
    CHECK(coeff(J1, {1}) == doctest::Approx(2.0));
    CHECK(coeff(J1, {2}) == doctest::Approx(0.0));
}

TEST_CASE("partial derivatives") {
    Jet x = Jet::variable(1, 3, 1, 1.0);
    Jet sq = x * x;
    CHECK(part(sq, {2}) == doctest::Approx(2.0));
    CHECK(part(sq, {0}) == doctest::Approx(1.0));

    Jet xx = Jet::variable(2, 3, 1, 2.0);
    Jet yy = Jet::variable(2, 3, 2, 3.0);
    CHECK(part(xx * yy, {1, 1}) == doctest::Approx(1.0));

    std::vector<int> toohigh{4};
    CHECK_THROWS_AS((void)sq.partial(std::span<const int>(toohigh)), DimensionError);
}

TEST_CASE("compose associativity on random polynomial data") {
    Lcg rng(7);
    for (int trial = 0; trial < 30; ++trial) {
        int n = 1 + trial % 3;
        int K = 3;
        auto random_jet = [&](double base) {
            Jet j = Jet::constant(n, K, base);
            for (int i = 1; i < j.table().size; ++i) j.set_coeff(i, rng.uniform(-0.7, 0.7));
            return j;
        };
        std::vector<double> fbase, gbase;
        std::vector<Jet> fc, gc;
        for (int i = 0; i < n; ++i) {
            double b = rng.uniform(-0.5, 0.5);
            gbase.push_back(b);
            gc.push_back(random_jet(b));
        }
        for (int i = 0; i < n; ++i) {
            double b = gc[i].value();
            (void)b;
        }
        MapJet G{gc};
        for (int i = 0; i < n; ++i) {
            double b = rng.uniform(-0.5, 0.5);
            fbase.push_back(b);
            fc.push_back(random_jet(b));
        }
        MapJet F{fc};
        // g composed with F needs matching base: use F's values as g's base.
        Jet g = Jet::constant(n, K, rng.uniform(-1, 1));
        for (int i = 1; i < g.table().size; ++i) g.set_coeff(i, rng.uniform(-0.7, 0.7));

        std::vector<double> fvals = F.values();
        Jet lhs = compose(compose(g, F, fvals), G, G.values());
        MapJet FG = map_compose(F, G, G.values());
        Jet rhs = compose(g, FG, fvals);
        double scale = rhs.max_abs_coeff();
        for (int i = 0; i < g.table().size; ++i)
            CHECK(std::abs(lhs.coeff(i) - rhs.coeff(i)) <= 1e-11 * (1.0 + scale));
    }
}

TEST_CASE("map_inverse leaves only tiny non-identity coefficients") {
    Lcg rng(11);
    for (int trial = 0; trial < 20; ++trial) {
        int n = 1 + trial % 3;
        std::vector<double> base;
        std::vector<Jet> comps;
        for (int i = 0; i < n; ++i) base.push_back(rng.uniform(-0.5, 0.5));
        for (int i = 0; i < n; ++i) {
            Jet j = Jet::constant(n, 3, rng.uniform(-0.5, 0.5));
            for (int idx = 1; idx < j.table().size; ++idx) j.set_coeff(idx, rng.uniform(-0.4, 0.4));
            // Strengthen the diagonal so the linear part stays invertible.
            Jet e = Jet::variable(n, 3, i + 1, 0.0);
            j += 1.5 * e;
            comps.push_back(j);
        }
        MapJet F{comps};
        MapJet G = map_inverse(F, base);
        MapJet FG = map_compose(F, G, base);
        MapJet id = identity_map_jet(n, 3, F.values());
        for (int i = 0; i < n; ++i)
            for (int idx = 0; idx < FG.comp[i].table().size; ++idx)
                CHECK(std::abs(FG.comp[i].coeff(idx) - id.comp[i].coeff(idx)) < 1e-10);
    }
}
