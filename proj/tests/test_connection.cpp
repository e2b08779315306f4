#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "schw/connection.hpp"
#include "schw/generators.hpp"

using namespace schw;

TEST_CASE("trace-adjusted projection") {
    // Gamma = 0 -> Pi = 0.
    Connection zero = Connection::projective_from_christoffel(Connection::christoffel(2, {}));
    double x[2] = {0.3, 0.1};
    CHECK(zero.value(x).max_abs() == 0.0);

    // n = 2, only Gamma^1_11 = c: Pi^1_11 = c/3, Pi^2_12 = Pi^2_21 = -c/3.
    const double c = 0.9;
    Connection g = Connection::christoffel(2, {{"1,1,1", "0.9"}});
    Connection pi = Connection::projective_from_christoffel(g);
    Tensor21Value v = pi.value(x);
    CHECK(v(0, 0, 0) == doctest::Approx(c / 3));
    CHECK(v(1, 0, 1) == doctest::Approx(-c / 3));
    CHECK(v(0, 0, 1) == doctest::Approx(0.0));
    CHECK(v(0, 1, 1) == doctest::Approx(0.0));
    CHECK(v(1, 1, 1) == doctest::Approx(0.0));
    CHECK(v(1, 0, 0) == doctest::Approx(0.0));
    CHECK(std::abs(v.trace(0)) < 1e-15);
    CHECK(std::abs(v.trace(1)) < 1e-15);

    // Idempotence: projecting the projection changes nothing.
    Connection pi2 = Connection::projective_from_christoffel(pi);
    Tensor21Value v2 = pi2.value(x);
    for (size_t i = 0; i < v.t.size(); ++i) CHECK(v2.t[i] == doctest::Approx(v.t[i]));
}

TEST_CASE("trace-free holds for random fields") {
    Lcg rng(21);
    for (int t = 0; t < 30; ++t) {
        int n = 2 + t % 2;
        Connection pi = random_projective_connection(rng, n);
        std::vector<double> x = random_point(rng, n);
        Tensor21Value v = pi.value(x);
        for (int i = 0; i < n; ++i) CHECK(std::abs(v.trace(i)) < 1e-10);
    }
}

TEST_CASE("asymmetric entries abort with a data error") {
    Connection bad = Connection::christoffel(2, {{"1,1,2", "x1"}, {"1,2,1", "x2"}});
    double x[2] = {0.4, 0.1};
    CHECK_THROWS_AS(bad.value(x), DataError);

    // A single unordered entry is mirrored, not rejected.
    Connection ok = Connection::christoffel(2, {{"1,1,2", "x1"}});
    CHECK(ok.value(x)(0, 0, 1) == doctest::Approx(0.4));
    CHECK(ok.value(x)(0, 1, 0) == doctest::Approx(0.4));
}

TEST_CASE("non-trace-free projective input is a data error") {
    Connection notf = Connection::projective(2, {{"1,1,1", "1"}});
    double x[2] = {0.0, 0.0};
    CHECK_THROWS_AS(notf.value(x), DataError);
}

TEST_CASE("pullback of the flat connection") {
    // Identity leaves any connection unchanged.
    Lcg rng(4);
    Connection pi = random_projective_connection(rng, 2);
    Connection pb = Connection::pullback(Diffeo::identity(2), pi);
    std::vector<double> x = random_point(rng, 2);
    Tensor21Value a = pb.value(x), b = pi.value(x);
    for (size_t i = 0; i < a.t.size(); ++i) CHECK(a.t[i] == doctest::Approx(b.t[i]).epsilon(1e-12));

    // Flat + moebius -> identically zero.
    for (int t = 0; t < 10; ++t) {
        int n = 2 + t % 2;
        std::vector<double> p = random_point(rng, n);
        Diffeo f = random_moebius(rng, n, {{p}, false});
        Connection pbm = Connection::pullback(f, Connection::flat(n));
        CHECK(pbm.value(p).max_abs() < 1e-9);
    }

    // Flat + (x + y^2, y): only ell^1_22 = 2 survives.
    Diffeo shear = Diffeo::from_expressions(2, {"x1 + x2^2", "x2"});
    Connection pbs = Connection::pullback(shear, Connection::flat(2));
    double q[2] = {0.3, 0.7};
    Tensor21Value v = pbs.value(q);
    CHECK(v(0, 1, 1) == doctest::Approx(2.0));
    CHECK(std::abs(v(0, 0, 0)) < 1e-14);
    CHECK(std::abs(v(0, 0, 1)) < 1e-14);
    CHECK(std::abs(v(1, 0, 0)) < 1e-14);
    CHECK(std::abs(v(1, 0, 1)) < 1e-14);
    CHECK(std::abs(v(1, 1, 1)) < 1e-14);
}

TEST_CASE("ell: flat closed form against the pullback difference") {
    Lcg rng(8);
    for (int t = 0; t < 15; ++t) {
        int n = 2 + t % 2;
        std::vector<double> x = random_point(rng, n);
        Diffeo f = random_map(rng, n, {{x}, false});
        Tensor21Value direct = ell_flat(f, x);
        Connection pb = Connection::pullback(f, Connection::flat(n));
        Tensor21Value via_pb = pb.value(x);
        double scale = via_pb.max_abs();
        for (size_t i = 0; i < direct.t.size(); ++i)
            CHECK(std::abs(direct.t[i] - via_pb.t[i]) <= 1e-11 * (1.0 + scale));
        // ell is trace-free.
        for (int i = 0; i < n; ++i) CHECK(std::abs(direct.trace(i)) < 1e-10);
    }
}

TEST_CASE("ell examples") {
    // Affine maps have vanishing ell.
    Diffeo aff = Diffeo::affine(2, {1.0, 0.5, -0.25, 2.0}, {0.3, -0.1});
    double x[2] = {0.2, 0.4};
    CHECK(ell_cocycle(aff, Connection::flat(2), x).max_abs() < 1e-13);

    // The shear example again through ell_cocycle.
    Diffeo shear = Diffeo::from_expressions(2, {"x1 + x2^2", "x2"});
    Tensor21Value v = ell_cocycle(shear, Connection::flat(2), x);
    CHECK(v(0, 1, 1) == doctest::Approx(2.0));
    CHECK(v.max_abs() == doctest::Approx(2.0));
}

TEST_CASE("operator symbols") {
    // Flat symbols give the zero operator.
    double x[2] = {0.1, 0.9};
    S2OperatorValue z = operator_symbols(Connection::flat(2), x);
    CHECK(z.max_abs() == 0.0);

    // n = 1 is rejected.
    CHECK_THROWS_AS(operator_symbols(Connection::flat(1), std::vector<double>{0.0}), DimensionError);

    // n = 2 with only Pi^1_22 = x1: u_22 = -2 everywhere.
    Connection pi = Connection::projective(2, {{"1,2,2", "x1"}});
    S2OperatorValue s = operator_symbols(pi, x);
    CHECK(s.t_at(0, 1, 1) == doctest::Approx(0.1));
    CHECK(s.u_at(1, 1) == doctest::Approx(-2.0));
    CHECK(s.u_at(0, 0) == doctest::Approx(0.0));
    CHECK(s.u_at(0, 1) == doctest::Approx(0.0));
}

TEST_CASE("t_difference equals the difference of operator symbols") {
    Lcg rng(31);
    for (int t = 0; t < 15; ++t) {
        int n = 2 + t % 2;
        Connection a = random_projective_connection(rng, n);
        Connection b = random_projective_connection(rng, n);
        std::vector<double> x = random_point(rng, n);
        S2OperatorValue lhs = t_difference(a, b, x);
        S2OperatorValue sa = operator_symbols(a, x);
        S2OperatorValue sb = operator_symbols(b, x);
        S2OperatorValue rhs = sa - sb;
        double scale = rhs.max_abs();
        for (size_t i = 0; i < lhs.t.size(); ++i) CHECK(std::abs(lhs.t[i] - rhs.t[i]) <= 1e-11 * (1 + scale));
        for (size_t i = 0; i < lhs.u.size(); ++i) CHECK(std::abs(lhs.u[i] - rhs.u[i]) <= 1e-11 * (1 + scale));
        // Difference with itself vanishes.
        CHECK(t_difference(a, a, x).max_abs() < 1e-13);
    }
}

TEST_CASE("operator pullback against the conjugation oracle") {
    // (f*A)(a) = [A(f_* a)] o f for the pushed-forward symmetric field.
    Lcg rng(17);
    for (int t = 0; t < 12; ++t) {
        int n = 2 + t % 2;
        std::vector<double> x = random_point(rng, n);
        Diffeo f = random_map(rng, n, {{x}, false});
        S2OperatorField A = random_s2_operator_field(rng, n);
        std::vector<ScalarField> a = random_sym2_field(rng, n);

        S2OperatorValue P = pullback_s2_operator(f, A, x);
        std::vector<Jet> ax;
        for (auto& fld : a) ax.push_back(fld.eval_jet(x, 1));
        double lhs = apply_s2_operator(P, ax);

        // Push a forward: (f_* a)^{ab}(y) = a^{ij}(g(y)) dF^a_i dF^b_j at g(y).
        MapJet F = f.jet_at(x, 2);
        std::vector<double> y0 = F.values();
        MapJet G = map_inverse(F, x);
        std::vector<Jet> dF(n * n);
        for (int k = 0; k < n; ++k)
            for (int i = 0; i < n; ++i) dF[k * n + i] = F.comp[k].deriv(i + 1);
        std::vector<Jet> push(sym_count(n));
        for (int aa = 0; aa < n; ++aa)
            for (int bb = aa; bb < n; ++bb) {
                Jet v = Jet::constant(n, 1, 0.0);
                for (int i = 0; i < n; ++i)
                    for (int j = 0; j < n; ++j) {
                        Jet aij = a[sym_index(i, j, n)].eval_jet(x, 1);
                        v += aij * dF[aa * n + i].truncated(1) * dF[bb * n + j].truncated(1);
                    }
                // Express in y around y0 by composing with the inverse jets.
                push[sym_index(aa, bb, n)] = compose(v, G.truncated(1), x);
            }
        double rhs = apply_s2_operator(A(y0), push);
        CHECK(std::abs(lhs - rhs) <= 1e-9 * (1.0 + std::abs(rhs)));
    }
}

TEST_CASE("operator pullback basics") {
    Lcg rng(23);
    int n = 2;
    S2OperatorField A = random_s2_operator_field(rng, n);
    std::vector<double> x = random_point(rng, n);

    // Identity pullback changes nothing.
    S2OperatorValue vid = pullback_s2_operator(Diffeo::identity(n), A, x);
    S2OperatorValue direct = A(x);
    for (size_t i = 0; i < vid.t.size(); ++i) CHECK(vid.t[i] == doctest::Approx(direct.t[i]));
    for (size_t i = 0; i < vid.u.size(); ++i) CHECK(vid.u[i] == doctest::Approx(direct.u[i]));

    // Linear maps transform both blocks tensorially (no second-derivative
    // correction).
    std::vector<double> M{1.0, 0.4, -0.2, 1.5};
    Diffeo lin = Diffeo::affine(n, M, {0.0, 0.0});
    S2OperatorValue vlin = pullback_s2_operator(lin, A, x);
    std::vector<double> y = lin(x);
    S2OperatorValue Ay = A(y);
    std::vector<double> G = inverse_dense(M, n);
    for (int i = 0; i < n; ++i)
        for (int j = i; j < n; ++j) {
            double expect_u = 0.0;
            for (int a = 0; a < n; ++a)
                for (int b = 0; b < n; ++b) expect_u += Ay.u_at(a, b) * M[a * n + i] * M[b * n + j];
            CHECK(vlin.u_at(i, j) == doctest::Approx(expect_u).epsilon(1e-12));
            for (int k = 0; k < n; ++k) {
                double expect_t = 0.0;
                for (int a = 0; a < n; ++a)
                    for (int b = 0; b < n; ++b)
                        for (int c = 0; c < n; ++c)
                            expect_t += Ay.t_at(c, a, b) * M[a * n + i] * M[b * n + j] * G[k * n + c];
                CHECK(vlin.t_at(k, i, j) == doctest::Approx(expect_t).epsilon(1e-12));
            }
        }
}
