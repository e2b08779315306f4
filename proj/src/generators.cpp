#include "schw/generators.hpp"

#include <cmath>
#include <sstream>

namespace schw {

namespace {

constexpr int kMaxRedraws = 500;

std::string fmt(double v) {
    std::ostringstream ss;
    ss.precision(17);
    ss << v;
    return ss.str();
}

bool moebius_ok(const ProjectiveMatrix& M, const Requirements& req) {
    int n = M.n;
    double scale = 0.0;
    for (double v : M.m) scale = std::max(scale, std::abs(v));
    if (scale == 0.0) return false;
    double p = 1.0;
    for (int i = 0; i <= n; ++i) p *= scale;
    if (std::abs(M.det()) <= 0.1 * p) return false;
    if (std::abs(M.at(n, n)) < 0.4) return false;
    for (const auto& x : req.cover_points) {
        double den = M.at(n, n);
        for (int j = 0; j < n; ++j) den += M.at(n, j) * x[j];
        if (std::abs(den) < 0.35) return false;
    }
    return true;
}

bool jacobian_ok(const Diffeo& f, const Requirements& req, double min_abs_det) {
    for (const auto& x : req.cover_points) {
        try {
            MapJet J = f.jet_at(x, 1);
            double d = J.linear_det();
            if (std::abs(d) < min_abs_det) return false;
            if (req.positive_jacobian && d <= 0.0) return false;
        } catch (const DomainError&) {
            return false;
        }
    }
    return true;
}

}  // namespace

std::vector<double> random_point(Lcg& rng, int n, double half_width) {
    std::vector<double> x(n);
    for (int i = 0; i < n; ++i) x[i] = rng.uniform(-half_width, half_width);
    return x;
}

Diffeo random_moebius(Lcg& rng, int n, const Requirements& req) {
    for (int attempt = 0; attempt < kMaxRedraws; ++attempt) {
        std::vector<double> e((n + 1) * (n + 1));
        for (double& v : e) v = rng.uniform(-1.0, 1.0);
        ProjectiveMatrix M(n, std::move(e));
        if (!moebius_ok(M, req)) continue;
        Diffeo f = Diffeo::moebius(M);
        if (!jacobian_ok(f, req, 1e-6)) continue;
        return f;
    }
    throw Error("random_moebius: could not satisfy the requirements");
}

std::string random_polynomial_expr(Lcg& rng, int n, int max_degree, double amplitude) {
    // Dense polynomial over all monomials of total degree <= max_degree.
    std::ostringstream ss;
    bool first = true;
    std::vector<int> expo(n, 0);
    auto emit = [&](auto&& self, int pos, int remaining) -> void {
        if (pos == n) {
            double c = rng.uniform(-amplitude, amplitude);
            if (!first) ss << " + ";
            first = false;
            ss << fmt(c);
            for (int i = 0; i < n; ++i)
                if (expo[i] > 0) {
                    ss << "*x" << (i + 1);
                    if (expo[i] > 1) ss << "^" << expo[i];
                }
            return;
        }
        for (int e = 0; e <= remaining; ++e) {
            expo[pos] = e;
            self(self, pos + 1, remaining - e);
            expo[pos] = 0;
        }
    };
    emit(emit, 0, max_degree);
    return ss.str();
}

Diffeo random_cubic_perturbation(Lcg& rng, int n, const Requirements& req) {
    for (int attempt = 0; attempt < kMaxRedraws; ++attempt) {
        double eps = rng.uniform(0.03, 0.1);
        double max_coef = 0.0;
        std::vector<std::string> comps(n);
        for (int i = 0; i < n; ++i) {
            std::ostringstream ss;
            ss << "x" << (i + 1);
            // Cubic part: all monomials of degree <= 3.
            std::vector<int> expo(n, 0);
            auto emit = [&](auto&& self, int pos, int remaining) -> void {
                if (pos == n) {
                    double c = rng.uniform(-1.0, 1.0);
                    max_coef = std::max(max_coef, std::abs(c));
                    ss << " + " << fmt(eps * c);
                    for (int k = 0; k < n; ++k)
                        if (expo[k] > 0) {
                            ss << "*x" << (k + 1);
                            if (expo[k] > 1) ss << "^" << expo[k];
                        }
                    return;
                }
                for (int e = 0; e <= remaining; ++e) {
                    expo[pos] = e;
                    self(self, pos + 1, remaining - e);
                    expo[pos] = 0;
                }
            };
            emit(emit, 0, 3);
            comps[i] = ss.str();
        }
        if (max_coef < 0.2) continue;
        Diffeo f = Diffeo::from_expressions(n, comps);
        if (!jacobian_ok(f, req, 0.5)) continue;
        return f;
    }
    throw Error("random_cubic_perturbation: could not satisfy the requirements");
}

Diffeo random_map(Lcg& rng, int n, const Requirements& req) {
    if (rng.uniform() < 0.5) return random_moebius(rng, n, req);
    return random_cubic_perturbation(rng, n, req);
}

Connection random_projective_connection(Lcg& rng, int n) {
    std::map<std::string, std::string> entries;
    for (int k = 1; k <= n; ++k)
        for (int i = 1; i <= n; ++i)
            for (int j = i; j <= n; ++j) {
                std::ostringstream key;
                key << k << "," << i << "," << j;
                entries[key.str()] = random_polynomial_expr(rng, n, 2, 0.5);
            }
    return Connection::projective_from_christoffel(Connection::christoffel(n, entries));
}

S2OperatorField random_s2_operator_field(Lcg& rng, int n) {
    auto t = std::make_shared<std::vector<ScalarField>>();
    auto u = std::make_shared<std::vector<ScalarField>>();
    t->resize(n * sym_count(n));
    u->resize(sym_count(n));
    for (auto& f : *t) f = ScalarField::parse(random_polynomial_expr(rng, n, 2, 0.5), n);
    for (auto& f : *u) f = ScalarField::parse(random_polynomial_expr(rng, n, 2, 0.5), n);
    return [n, t, u](std::span<const double> x) {
        S2OperatorValue v(n);
        for (int idx = 0; idx < n * sym_count(n); ++idx) v.t[idx] = (*t)[idx].eval(x);
        for (int idx = 0; idx < sym_count(n); ++idx) v.u[idx] = (*u)[idx].eval(x);
        return v;
    };
}

std::shared_ptr<ExprOperatorField> random_operator_field(Lcg& rng, int n) {
    std::vector<ScalarField> a2(sym_count(n)), a1(n);
    for (auto& f : a2) f = ScalarField::parse(random_polynomial_expr(rng, n, 2, 0.5), n);
    for (auto& f : a1) f = ScalarField::parse(random_polynomial_expr(rng, n, 2, 0.5), n);
    ScalarField a0 = ScalarField::parse(random_polynomial_expr(rng, n, 2, 0.5), n);
    return std::make_shared<ExprOperatorField>(n, std::move(a2), std::move(a1), std::move(a0));
}

std::vector<ScalarField> random_sym2_field(Lcg& rng, int n) {
    std::vector<ScalarField> a(sym_count(n));
    for (auto& f : a) f = ScalarField::parse(random_polynomial_expr(rng, n, 2, 0.5), n);
    return a;
}

}  // namespace schw
