#include "schw/connection.hpp"

#include <cmath>
#include <sstream>

namespace schw {

double Tensor21Value::trace(int i) const {
    double s = 0.0;
    for (int k = 0; k < n; ++k) s += (*this)(k, i, k);
    return s;
}

double Tensor21Value::max_abs() const {
    double m = 0.0;
    for (double v : t) m = std::max(m, std::abs(v));
    return m;
}

Tensor21Value& Tensor21Value::operator+=(const Tensor21Value& o) {
    if (n != o.n) throw DimensionError("Tensor21Value dimension mismatch");
    for (size_t i = 0; i < t.size(); ++i) t[i] += o.t[i];
    return *this;
}

Tensor21Value& Tensor21Value::operator-=(const Tensor21Value& o) {
    if (n != o.n) throw DimensionError("Tensor21Value dimension mismatch");
    for (size_t i = 0; i < t.size(); ++i) t[i] -= o.t[i];
    return *this;
}

double S2OperatorValue::max_abs() const {
    double m = 0.0;
    for (double v : t) m = std::max(m, std::abs(v));
    for (double v : u) m = std::max(m, std::abs(v));
    return m;
}

S2OperatorValue& S2OperatorValue::operator-=(const S2OperatorValue& o) {
    if (n != o.n) throw DimensionError("S2OperatorValue dimension mismatch");
    for (size_t i = 0; i < t.size(); ++i) t[i] -= o.t[i];
    for (size_t i = 0; i < u.size(); ++i) u[i] -= o.u[i];
    return *this;
}

S2OperatorValue& S2OperatorValue::operator+=(const S2OperatorValue& o) {
    if (n != o.n) throw DimensionError("S2OperatorValue dimension mismatch");
    for (size_t i = 0; i < t.size(); ++i) t[i] += o.t[i];
    for (size_t i = 0; i < u.size(); ++i) u[i] += o.u[i];
    return *this;
}

Tensor21Value Tensor21Jets::value() const {
    Tensor21Value v(n);
    for (size_t i = 0; i < e.size(); ++i) v.t[i] = e[i].value();
    return v;
}

// ---------------------------------------------------------------------------
// Connection
// ---------------------------------------------------------------------------

struct Connection::Impl {
    enum Kind { kFlat, kChristoffel, kProjective, kProjectedGamma, kPullback } kind;
    int n = 0;
    // For expression-backed fields: full n^3 grid [k][i][j], absent = zero.
    std::vector<ScalarField> grid;
    // For kProjectedGamma / kPullback:
    std::shared_ptr<const Impl> base;
    Diffeo map;

    const ScalarField& entry(int k, int i, int j) const { return grid[(k * n + i) * n + j]; }
};

namespace {

void parse_triple(const std::string& key, int n, int& k, int& i, int& j) {
    std::istringstream ss(key);
    char c1 = 0, c2 = 0;
    if (!(ss >> k >> c1 >> i >> c2 >> j) || c1 != ',' || c2 != ',')
        throw DataError("connection entry key must be \"k,i,j\", got \"" + key + "\"");
    if (k < 1 || k > n || i < 1 || i > n || j < 1 || j > n)
        throw DataError("connection entry index out of range in \"" + key + "\"");
    --k;
    --i;
    --j;
}

std::vector<ScalarField> grid_from_sparse(int n, const std::map<std::string, std::string>& entries) {
    std::vector<ScalarField> grid(n * n * n);
    std::vector<bool> given(n * n * n, false);
    for (const auto& [key, expr] : entries) {
        int k, i, j;
        parse_triple(key, n, k, i, j);
        grid[(k * n + i) * n + j] = ScalarField::parse(expr, n);
        given[(k * n + i) * n + j] = true;
    }
    // Mirror entries given in only one order of the lower pair.
    for (int k = 0; k < n; ++k)
        for (int i = 0; i < n; ++i)
            for (int j = i + 1; j < n; ++j) {
                int a = (k * n + i) * n + j, b = (k * n + j) * n + i;
                if (given[a] && !given[b]) grid[b] = grid[a];
                if (given[b] && !given[a]) grid[a] = grid[b];
            }
    return grid;
}

}  // namespace

Connection Connection::flat(int n) {
    auto impl = std::make_shared<Impl>();
    impl->kind = Impl::kFlat;
    impl->n = n;
    Connection c;
    c.impl_ = std::move(impl);
    return c;
}

Connection Connection::christoffel(int n, const std::map<std::string, std::string>& entries) {
    auto impl = std::make_shared<Impl>();
    impl->kind = Impl::kChristoffel;
    impl->n = n;
    impl->grid = grid_from_sparse(n, entries);
    Connection c;
    c.impl_ = std::move(impl);
    return c;
}

Connection Connection::projective(int n, const std::map<std::string, std::string>& entries) {
    auto impl = std::make_shared<Impl>();
    impl->kind = Impl::kProjective;
    impl->n = n;
    impl->grid = grid_from_sparse(n, entries);
    Connection c;
    c.impl_ = std::move(impl);
    return c;
}

Connection Connection::projective_from_christoffel(const Connection& gamma) {
    if (!gamma.defined()) throw DataError("projective_from_christoffel: undefined input");
    auto impl = std::make_shared<Impl>();
    impl->kind = Impl::kProjectedGamma;
    impl->n = gamma.dim();
    impl->base = gamma.impl_;
    Connection c;
    c.impl_ = std::move(impl);
    return c;
}

Connection Connection::pullback(const Diffeo& f, const Connection& pi) {
    if (!pi.is_projective()) throw DataError("pullback: the connection must be projective");
    if (f.dim() != pi.dim()) throw DimensionError("pullback: dimension mismatch");
    auto impl = std::make_shared<Impl>();
    impl->kind = Impl::kPullback;
    impl->n = pi.dim();
    impl->base = pi.impl_;
    impl->map = f;
    Connection c;
    c.impl_ = std::move(impl);
    return c;
}

int Connection::dim() const {
    if (!impl_) throw Error("undefined Connection");
    return impl_->n;
}

bool Connection::is_flat() const { return impl_ && impl_->kind == Impl::kFlat; }

bool Connection::is_projective() const {
    return impl_ && impl_->kind != Impl::kChristoffel;
}

namespace {

Tensor21Jets eval_impl(const Connection::Impl& impl, std::span<const double> x, int order);

Tensor21Jets eval_grid(const Connection::Impl& impl, std::span<const double> x, int order) {
    const int n = impl.n;
    Tensor21Jets out;
    out.n = n;
    out.e.resize(n * sym_count(n));
    for (int k = 0; k < n; ++k)
        for (int i = 0; i < n; ++i)
            for (int j = i; j < n; ++j) {
                Jet a = impl.entry(k, i, j).eval_jet(x, order);
                if (i != j) {
                    const ScalarField& fij = impl.entry(k, i, j);
                    const ScalarField& fji = impl.entry(k, j, i);
                    // Same AST after mirroring; distinct ASTs get checked.
                    if (&fij != &fji) {
                        Jet b = fji.eval_jet(x, order);
                        if (std::abs(a.value() - b.value()) > 1e-12)
                            throw DataError("connection field is not symmetric in its lower indices at the sampled point");
                    }
                }
                out.ref(k, i, j) = a;
            }
    return out;
}

Tensor21Jets eval_projected(const Connection::Impl& impl, std::span<const double> x, int order) {
    const int n = impl.n;
    Tensor21Jets g = eval_impl(*impl.base, x, order);
    // Traces tr_i = Gamma^l_{il}.
    std::vector<Jet> tr(n, Jet::constant(n, order, 0.0));
    for (int i = 0; i < n; ++i)
        for (int l = 0; l < n; ++l) tr[i] += g.at(l, i, l);
    Tensor21Jets out;
    out.n = n;
    out.e.resize(n * sym_count(n));
    const double c = 1.0 / (n + 1);
    for (int k = 0; k < n; ++k)
        for (int i = 0; i < n; ++i)
            for (int j = i; j < n; ++j) {
                Jet v = g.at(k, i, j);
                if (k == i) v -= c * tr[j];
                if (k == j) v -= c * tr[i];
                out.ref(k, i, j) = v;
            }
    return out;
}

Tensor21Jets eval_pullback(const Connection::Impl& impl, std::span<const double> x, int order) {
    const Diffeo& f = impl.map;
    const int n = impl.n;
    MapJet F = f.jet_at(x, order + 2);
    std::vector<double> y0 = F.values();

    // dF entries and their inverse as jets of order `order`.
    std::vector<Jet> dF(n * n), dFt(n * n);
    for (int a = 0; a < n; ++a)
        for (int i = 0; i < n; ++i) dF[a * n + i] = F.comp[a].deriv(i + 1).truncated(order);
    std::vector<Jet> G = inverse_jet(dF, n);

    // Base connection entries at f(x), composed back to jets in x.
    Tensor21Jets piy = eval_impl(*impl.base, y0, order);
    MapJet Ftrunc = F.truncated(order);
    Tensor21Jets pix;
    pix.n = n;
    pix.e.resize(piy.e.size());
    for (size_t idx = 0; idx < piy.e.size(); ++idx) pix.e[idx] = compose(piy.e[idx], Ftrunc, y0);

    Tensor21Jets ell = ell_flat_jets(f, x, order);

    Tensor21Jets out;
    out.n = n;
    out.e.resize(n * sym_count(n));
    for (int k = 0; k < n; ++k)
        for (int i = 0; i < n; ++i)
            for (int j = i; j < n; ++j) {
                Jet v = ell.at(k, i, j);
                for (int a = 0; a < n; ++a)
                    for (int b = 0; b < n; ++b)
                        for (int c = 0; c < n; ++c)
                            v += pix.at(c, a, b) * dF[a * n + i] * dF[b * n + j] * G[k * n + c];
                out.ref(k, i, j) = v;
            }
    return out;
}

Tensor21Jets eval_impl(const Connection::Impl& impl, std::span<const double> x, int order) {
    const int n = impl.n;
    switch (impl.kind) {
        case Connection::Impl::kFlat: {
            Tensor21Jets out;
            out.n = n;
            out.e.assign(n * sym_count(n), Jet::constant(n, order, 0.0));
            return out;
        }
        case Connection::Impl::kChristoffel:
        case Connection::Impl::kProjective:
            return eval_grid(impl, x, order);
        case Connection::Impl::kProjectedGamma:
            return eval_projected(impl, x, order);
        case Connection::Impl::kPullback:
            return eval_pullback(impl, x, order);
    }
    throw Error("unreachable");
}

}  // namespace

Tensor21Jets Connection::eval(std::span<const double> x, int order) const {
    if (!impl_) throw Error("undefined Connection");
    if (static_cast<int>(x.size()) != impl_->n) throw DimensionError("connection evaluated at wrong-dimension point");
    Tensor21Jets out = eval_impl(*impl_, x, order);
    if (is_projective() && impl_->kind != Impl::kFlat) {
        Tensor21Value v = out.value();
        double scale = std::max(1.0, v.max_abs());
        for (int i = 0; i < impl_->n; ++i)
            if (std::abs(v.trace(i)) > 1e-10 * scale)
                throw DataError("projective symbols are not trace-free at the sampled point");
    }
    return out;
}

Tensor21Value Connection::value(std::span<const double> x) const { return eval(x, 0).value(); }

// ---------------------------------------------------------------------------
// Cocycle ell and operator symbols
// ---------------------------------------------------------------------------

Tensor21Jets ell_flat_jets(const Diffeo& f, std::span<const double> x, int order) {
    const int n = f.dim();
    MapJet F = f.jet_at(x, order + 2);

    std::vector<Jet> dF(n * n);
    for (int a = 0; a < n; ++a)
        for (int i = 0; i < n; ++i) dF[a * n + i] = F.comp[a].deriv(i + 1).truncated(order);
    std::vector<Jet> G = inverse_jet(dF, n);

    // d_i log J_f as jets of order `order`.
    Jet J = jacobian_det(F);  // order + 1
    Jet logJ = J.log();
    std::vector<Jet> dlogJ(n);
    for (int i = 0; i < n; ++i) dlogJ[i] = logJ.deriv(i + 1);

    Tensor21Jets out;
    out.n = n;
    out.e.resize(n * sym_count(n));
    const double c = 1.0 / (n + 1);
    for (int k = 0; k < n; ++k)
        for (int i = 0; i < n; ++i)
            for (int j = i; j < n; ++j) {
                Jet v = Jet::constant(n, order, 0.0);
                for (int l = 0; l < n; ++l) {
                    Jet hess = F.comp[l].deriv(i + 1).deriv(j + 1);  // order
                    v += hess * G[k * n + l];
                }
                if (k == j) v -= c * dlogJ[i];
                if (k == i) v -= c * dlogJ[j];
                out.ref(k, i, j) = v;
            }
    return out;
}

Tensor21Value ell_flat(const Diffeo& f, std::span<const double> x) { return ell_flat_jets(f, x, 0).value(); }

Tensor21Value ell_cocycle(const Diffeo& f, const Connection& pi, std::span<const double> x) {
    if (!pi.is_projective()) throw DataError("ell_cocycle: the connection must be projective");
    if (pi.is_flat()) return ell_flat(f, x);
    Connection pb = Connection::pullback(f, pi);
    return pb.value(x) - pi.value(x);
}

Tensor21Value pullback_tensor21(const Diffeo& f, const Tensor21Field& T, std::span<const double> x) {
    const int n = f.dim();
    MapJet F = f.jet_at(x, 1);
    std::vector<double> Fm = F.linear();
    std::vector<double> G = inverse_dense(Fm, n);
    Tensor21Value Ty = T(F.values());
    Tensor21Value out(n);
    for (int k = 0; k < n; ++k)
        for (int i = 0; i < n; ++i)
            for (int j = i; j < n; ++j) {
                double s = 0.0;
                for (int a = 0; a < n; ++a)
                    for (int b = 0; b < n; ++b)
                        for (int c = 0; c < n; ++c) s += Ty(c, a, b) * Fm[a * n + i] * Fm[b * n + j] * G[k * n + c];
                out.at(k, i, j) = s;
            }
    return out;
}

namespace {

void require_multidim(int n, const char* what) {
    if (n < 2)
        throw DimensionError(std::string(what) +
                             " requires dimension >= 2; use the classical 1-d Schwarzian path for n = 1");
}

}  // namespace

S2OperatorValue operator_symbols(const Connection& pi, std::span<const double> x) {
    const int n = pi.dim();
    require_multidim(n, "operator_symbols");
    if (!pi.is_projective()) throw DataError("operator_symbols: the connection must be projective");
    Tensor21Jets P = pi.eval(x, 1);
    S2OperatorValue out(n);
    const double ca = -2.0 / (n - 1);
    const double cb = static_cast<double>(n + 1) / (n - 1);
    for (int i = 0; i < n; ++i)
        for (int j = i; j < n; ++j) {
            double div = 0.0;
            for (int k = 0; k < n; ++k) {
                out.t_ref(k, i, j) = P.at(k, i, j).value();
                div += P.at(k, i, j).deriv(k + 1).value();
            }
            double quad = 0.0;
            for (int k = 0; k < n; ++k)
                for (int l = 0; l < n; ++l) quad += P.at(k, i, l).value() * P.at(l, k, j).value();
            out.u_ref(i, j) = ca * div + cb * quad;
        }
    return out;
}

S2OperatorValue t_difference_ab(const Connection& tilde, const Connection& pi, std::span<const double> x,
                                double alpha, double beta) {
    const int n = pi.dim();
    require_multidim(n, "t_difference");
    if (tilde.dim() != n) throw DimensionError("t_difference: dimension mismatch");
    Tensor21Jets Pt = tilde.eval(x, 1);
    Tensor21Jets P = pi.eval(x, 1);
    S2OperatorValue out(n);
    for (int i = 0; i < n; ++i)
        for (int j = i; j < n; ++j) {
            double div = 0.0;
            for (int k = 0; k < n; ++k) {
                double d = Pt.at(k, i, j).value() - P.at(k, i, j).value();
                out.t_ref(k, i, j) = d;
                div += Pt.at(k, i, j).deriv(k + 1).value() - P.at(k, i, j).deriv(k + 1).value();
            }
            double quad = 0.0;
            for (int k = 0; k < n; ++k)
                for (int l = 0; l < n; ++l)
                    quad += Pt.at(k, l, i).value() * Pt.at(l, j, k).value() -
                            P.at(k, l, i).value() * P.at(l, j, k).value();
            out.u_ref(i, j) = alpha * div + beta * quad;
        }
    return out;
}

S2OperatorValue t_difference(const Connection& tilde, const Connection& pi, std::span<const double> x) {
    const int n = pi.dim();
    require_multidim(n, "t_difference");
    return t_difference_ab(tilde, pi, x, -2.0 / (n - 1), static_cast<double>(n + 1) / (n - 1));
}

S2OperatorValue pullback_s2_operator(const Diffeo& f, const S2OperatorField& A, std::span<const double> x) {
    const int n = f.dim();
    MapJet F = f.jet_at(x, 2);
    std::vector<double> y0 = F.values();
    std::vector<double> Fm = F.linear();
    std::vector<double> G = inverse_dense(Fm, n);
    S2OperatorValue Ay = A(y0);
    if (Ay.n != n) throw DimensionError("pullback_s2_operator: operator dimension mismatch");

    // Second partials of f.
    std::vector<double> H(n * n * n);  // [a][i][m]
    for (int a = 0; a < n; ++a)
        for (int i = 0; i < n; ++i)
            for (int m = 0; m < n; ++m) H[(a * n + i) * n + m] = F.comp[a].deriv(i + 1).deriv(m + 1).value();

    S2OperatorValue out(n);
    for (int i = 0; i < n; ++i)
        for (int j = i; j < n; ++j) {
            for (int k = 0; k < n; ++k) {
                double s = 0.0;
                for (int a = 0; a < n; ++a)
                    for (int b = 0; b < n; ++b)
                        for (int c = 0; c < n; ++c) s += Ay.t_at(c, a, b) * Fm[a * n + i] * Fm[b * n + j] * G[k * n + c];
                out.t_ref(k, i, j) = s;
            }
            double s = 0.0;
            for (int a = 0; a < n; ++a)
                for (int b = 0; b < n; ++b) s += Ay.u_at(a, b) * Fm[a * n + i] * Fm[b * n + j];
            // Symmetrized second-derivative correction (weight 1/2 over the
            // unordered pair, written out as the two ordered terms).
            for (int a = 0; a < n; ++a)
                for (int b = 0; b < n; ++b)
                    for (int c = 0; c < n; ++c)
                        for (int m = 0; m < n; ++m)
                            s += Ay.t_at(c, a, b) * G[m * n + c] *
                                 (H[(a * n + i) * n + m] * Fm[b * n + j] + Fm[a * n + i] * H[(b * n + j) * n + m]);
            out.u_ref(i, j) = s;
        }
    return out;
}

double apply_s2_operator(const S2OperatorValue& A, std::span<const Jet> a_jets) {
    const int n = A.n;
    if (static_cast<int>(a_jets.size()) != sym_count(n))
        throw DimensionError("apply_s2_operator: expected packed symmetric jets");
    double r = 0.0;
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) {
            const Jet& a = a_jets[sym_index(i, j, n)];
            for (int k = 0; k < n; ++k) r += A.t_at(k, i, j) * a.deriv(k + 1).value();
            r += A.u_at(i, j) * a.value();
        }
    return r;
}

}  // namespace schw
