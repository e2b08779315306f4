#include "schw/jet.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <memory>
#include <mutex>
#include <unordered_map>

namespace schw {

namespace {

std::uint64_t pack_alpha(const std::array<std::uint8_t, kMaxJetDim>& a, int dim) {
    std::uint64_t key = 0;
    for (int i = 0; i < dim; ++i) key |= static_cast<std::uint64_t>(a[i]) << (8 * i);
    return key;
}

struct TableWithLookup {
    JetTable t;
    std::unordered_map<std::uint64_t, int> lookup;
};

double factorial(int k) {
    double r = 1.0;
    for (int i = 2; i <= k; ++i) r *= i;
    return r;
}

TableWithLookup* build_table(int dim, int order) {
    auto tw = new TableWithLookup();
    JetTable& t = tw->t;
    t.dim = dim;
    t.order = order;

    // Enumerate multi-indices grouped by total degree, lexicographic within
    // each degree.
    std::array<std::uint8_t, kMaxJetDim> cur{};
    for (int deg = 0; deg <= order; ++deg) {
        t.prefix_size[deg] = static_cast<int>(t.alpha.size());
        cur.fill(0);
        // Recursive enumeration of compositions of `deg` into `dim` parts.
        auto emit = [&](auto&& self, int pos, int remaining) -> void {
            if (pos == dim - 1) {
                cur[pos] = static_cast<std::uint8_t>(remaining);
                t.alpha.push_back(cur);
                t.degree.push_back(deg);
                double f = 1.0;
                for (int i = 0; i < dim; ++i) f *= factorial(cur[i]);
                t.alpha_factorial.push_back(f);
                return;
            }
            for (int e = remaining; e >= 0; --e) {
                cur[pos] = static_cast<std::uint8_t>(e);
                self(self, pos + 1, remaining - e);
            }
        };
        emit(emit, 0, deg);
        t.prefix_size[deg] = static_cast<int>(t.alpha.size());
    }
    // prefix_size[k] should be the size AFTER including degree k; rebuild.
    {
        int idx = 0;
        for (int deg = 0; deg <= order; ++deg) {
            while (idx < static_cast<int>(t.alpha.size()) && t.degree[idx] <= deg) ++idx;
            t.prefix_size[deg] = idx;
        }
        for (int deg = order + 1; deg <= kMaxJetOrder + 1; ++deg) t.prefix_size[deg] = idx;
    }
    t.size = static_cast<int>(t.alpha.size());

    for (int i = 0; i < t.size; ++i) tw->lookup.emplace(pack_alpha(t.alpha[i], dim), i);

    // Product pair table for the truncated Cauchy product.
    for (int i = 0; i < t.size; ++i) {
        for (int j = 0; j < t.size; ++j) {
            if (t.degree[i] + t.degree[j] > order) continue;
            std::array<std::uint8_t, kMaxJetDim> s{};
            for (int d = 0; d < dim; ++d) s[d] = static_cast<std::uint8_t>(t.alpha[i][d] + t.alpha[j][d]);
            int k = tw->lookup.at(pack_alpha(s, dim));
            t.pairs.push_back({i, j, k});
        }
    }
    return tw;
}

const TableWithLookup& table_with_lookup(int dim, int order) {
    if (dim < 1 || dim > kMaxJetDim)
        throw DimensionError("jet dimension must be in [1, " + std::to_string(kMaxJetDim) + "], got " +
                             std::to_string(dim));
    if (order < 0 || order > kMaxJetOrder)
        throw DimensionError("jet order must be in [0, " + std::to_string(kMaxJetOrder) + "], got " +
                             std::to_string(order));
    static std::mutex mu;
    static std::map<std::pair<int, int>, std::unique_ptr<TableWithLookup>> cache;
    std::lock_guard<std::mutex> lock(mu);
    auto key = std::make_pair(dim, order);
    auto it = cache.find(key);
    if (it == cache.end()) it = cache.emplace(key, std::unique_ptr<TableWithLookup>(build_table(dim, order))).first;
    return *it->second;
}

}  // namespace

int JetTable::rank(std::span<const int> a) const {
    if (static_cast<int>(a.size()) != dim)
        throw DimensionError("multi-index has " + std::to_string(a.size()) + " components, jet dim is " +
                             std::to_string(dim));
    std::array<std::uint8_t, kMaxJetDim> u{};
    int deg = 0;
    for (int i = 0; i < dim; ++i) {
        if (a[i] < 0) throw DimensionError("negative multi-index entry");
        deg += a[i];
        u[i] = static_cast<std::uint8_t>(a[i]);
    }
    if (deg > order) return -1;
    return rank_u8(u, deg);
}

int JetTable::rank_u8(const std::array<std::uint8_t, kMaxJetDim>& a, int deg) const {
    // Linear scan within the degree block; blocks are small at desk scale.
    int lo = deg == 0 ? 0 : prefix_size[deg - 1];
    int hi = prefix_size[deg];
    for (int i = lo; i < hi; ++i)
        if (alpha[i] == a) return i;
    throw Error("internal: multi-index not found");
}

const JetTable& jet_table(int dim, int order) { return table_with_lookup(dim, order).t; }

Jet Jet::constant(int dim, int order, double v) {
    Jet j(&jet_table(dim, order));
    j.c_[0] = v;
    return j;
}

Jet Jet::variable(int dim, int order, int i, double v) {
    if (order < 1) throw DimensionError("coordinate jet needs order >= 1");
    if (i < 1 || i > dim)
        throw DimensionError("variable index " + std::to_string(i) + " out of range for dim " + std::to_string(dim));
    Jet j(&jet_table(dim, order));
    j.c_[0] = v;
    // Degree-1 block starts right after the constant term; indices there are
    // e_1, e_2, ... in lexicographic order of the enumeration (e_1 first).
    std::array<std::uint8_t, kMaxJetDim> e{};
    e[i - 1] = 1;
    j.c_[j.tab_->rank_u8(e, 1)] = 1.0;
    return j;
}

void Jet::check_same(const Jet& b) const {
    if (tab_ != b.tab_) throw DimensionError("jet dimension/order mismatch");
}

double Jet::coeff(std::span<const int> a) const {
    int r = tab_->rank(a);
    if (r < 0) throw DimensionError("multi-index degree exceeds jet order");
    return c_[r];
}

double Jet::partial(std::span<const int> a) const {
    int r = tab_->rank(a);
    if (r < 0) throw DimensionError("multi-index degree exceeds jet order");
    return c_[r] * tab_->alpha_factorial[r];
}

Jet Jet::truncated(int order2) const {
    if (order2 > order()) throw DimensionError("truncated() cannot raise the order");
    if (order2 == order()) return *this;
    Jet r(&jet_table(dim(), order2));
    std::copy_n(c_.begin(), r.c_.size(), r.c_.begin());
    return r;
}

Jet Jet::extended(int order2) const {
    if (order2 < order()) throw DimensionError("extended() cannot lower the order");
    if (order2 == order()) return *this;
    Jet r(&jet_table(dim(), order2));
    std::copy_n(c_.begin(), c_.size(), r.c_.begin());
    return r;
}

Jet Jet::deriv(int j) const {
    if (order() < 1) throw DimensionError("cannot differentiate an order-0 jet");
    if (j < 1 || j > dim()) throw DimensionError("derivative index out of range");
    Jet r(&jet_table(dim(), order() - 1));
    const JetTable& rt = *r.tab_;
    for (int idx = 0; idx < rt.size; ++idx) {
        std::array<std::uint8_t, kMaxJetDim> a = rt.alpha[idx];
        a[j - 1] += 1;
        int src = tab_->rank_u8(a, rt.degree[idx] + 1);
        r.c_[idx] = c_[src] * static_cast<double>(a[j - 1]);
    }
    return r;
}

Jet Jet::operator-() const {
    Jet r = *this;
    for (double& v : r.c_) v = -v;
    return r;
}

Jet& Jet::operator+=(const Jet& b) {
    check_same(b);
    for (size_t i = 0; i < c_.size(); ++i) c_[i] += b.c_[i];
    return *this;
}

Jet& Jet::operator-=(const Jet& b) {
    check_same(b);
    for (size_t i = 0; i < c_.size(); ++i) c_[i] -= b.c_[i];
    return *this;
}

Jet operator*(const Jet& a, const Jet& b) {
    a.check_same(b);
    Jet r(a.tab_);
    for (const JetTable::Pair& p : a.tab_->pairs) r.c_[p.k] += a.c_[p.i] * b.c_[p.j];
    return r;
}

Jet operator*(double s, Jet a) {
    for (double& v : a.c_) v *= s;
    return a;
}

Jet Jet::inv() const {
    double c0 = c_[0];
    if (c0 == 0.0) throw DomainError("jet inverse: zero constant term");
    // a = c0 (1 + u) with u of positive degree; 1/a = (1/c0) sum (-u)^m.
    Jet u = (1.0 / c0) * *this;
    u.c_[0] = 0.0;
    Jet r = Jet::constant(dim(), order(), 1.0);
    Jet up = Jet::constant(dim(), order(), 1.0);
    double sign = 1.0;
    for (int m = 1; m <= order(); ++m) {
        up = up * u;
        sign = -sign;
        r += sign * up;
    }
    return (1.0 / c0) * r;
}

Jet Jet::log() const {
    double c0 = c_[0];
    if (!(c0 > 0.0)) throw DomainError("jet log: non-positive constant term");
    Jet u = (1.0 / c0) * *this;
    u.c_[0] = 0.0;
    Jet r = Jet::constant(dim(), order(), std::log(c0));
    Jet up = Jet::constant(dim(), order(), 1.0);
    double sign = -1.0;
    for (int m = 1; m <= order(); ++m) {
        up = up * u;
        sign = -sign;
        r += (sign / m) * up;
    }
    return r;
}

Jet Jet::exp() const {
    Jet u = *this;
    u.c_[0] = 0.0;
    Jet r = Jet::constant(dim(), order(), 1.0);
    Jet up = Jet::constant(dim(), order(), 1.0);
    double invfact = 1.0;
    for (int m = 1; m <= order(); ++m) {
        up = up * u;
        invfact /= m;
        r += invfact * up;
    }
    return std::exp(c_[0]) * r;
}

Jet Jet::pow(double p) const { return (p * log()).exp(); }

Jet Jet::powi(int m) const {
    if (m < 0) throw DimensionError("powi: negative exponent");
    Jet r = Jet::constant(dim(), order(), 1.0);
    for (int i = 0; i < m; ++i) r = r * *this;
    return r;
}

double Jet::max_abs_coeff() const {
    double m = 0.0;
    for (double v : c_) m = std::max(m, std::abs(v));
    return m;
}

MapJet::MapJet(std::vector<Jet> c) : comp(std::move(c)) {
    for (const Jet& j : comp)
        if (j.dim() != dim() || j.order() != order()) throw DimensionError("MapJet components disagree on dim/order");
}

std::vector<double> MapJet::values() const {
    std::vector<double> v(comp.size());
    for (size_t i = 0; i < comp.size(); ++i) v[i] = comp[i].value();
    return v;
}

std::vector<double> MapJet::linear() const {
    const int n = dim();
    std::vector<double> m(comp.size() * n);
    for (size_t i = 0; i < comp.size(); ++i) {
        std::array<std::uint8_t, kMaxJetDim> e{};
        for (int j = 0; j < n; ++j) {
            e.fill(0);
            e[j] = 1;
            m[i * n + j] = comp[i].coeff(comp[i].table().rank_u8(e, 1));
        }
    }
    return m;
}

double MapJet::linear_det() const {
    if (n_out() != dim()) throw DimensionError("linear_det needs a square map jet");
    return det_dense(linear(), dim());
}

MapJet MapJet::truncated(int order2) const {
    std::vector<Jet> c;
    c.reserve(comp.size());
    for (const Jet& j : comp) c.push_back(j.truncated(order2));
    return MapJet(std::move(c));
}

Jet compose(const Jet& g, const MapJet& F, std::span<const double> g_base) {
    const int m = g.dim();
    if (F.n_out() != m) throw DimensionError("compose: map output count != jet dimension");
    if (F.order() != g.order()) throw DimensionError("compose: order mismatch");
    if (static_cast<int>(g_base.size()) != m) throw DimensionError("compose: base point size mismatch");
    const int K = g.order();
    const int n = F.dim();

    // Displacements of F around the base point of g.
    std::vector<Jet> d(m);
    for (int i = 0; i < m; ++i) {
        if (std::abs(F.comp[i].value() - g_base[i]) > 1e-12)
            throw DataError("compose: base-point mismatch beyond 1e-12");
        d[i] = F.comp[i] - g_base[i];
        d[i].set_coeff(0, 0.0);
    }
    // Powers d_i^e for e <= K.
    std::vector<std::vector<Jet>> dpow(m);
    for (int i = 0; i < m; ++i) {
        dpow[i].resize(K + 1);
        dpow[i][0] = Jet::constant(n, K, 1.0);
        for (int e = 1; e <= K; ++e) dpow[i][e] = dpow[i][e - 1] * d[i];
    }
    Jet r = Jet::constant(n, K, 0.0);
    const JetTable& gt = g.table();
    for (int idx = 0; idx < gt.size; ++idx) {
        double c = g.coeff(idx);
        if (c == 0.0) continue;
        Jet term = Jet::constant(n, K, c);
        for (int i = 0; i < m; ++i) {
            int e = gt.alpha[idx][i];
            if (e > 0) term = term * dpow[i][e];
        }
        r += term;
    }
    return r;
}

MapJet map_compose(const MapJet& F, const MapJet& G, std::span<const double> f_base) {
    std::vector<Jet> c;
    c.reserve(F.comp.size());
    for (const Jet& fj : F.comp) c.push_back(compose(fj, G, f_base));
    return MapJet(std::move(c));
}

MapJet identity_map_jet(int dim, int order, std::span<const double> at) {
    std::vector<Jet> c;
    c.reserve(dim);
    for (int i = 1; i <= dim; ++i) c.push_back(Jet::variable(dim, order, i, at[i - 1]));
    return MapJet(std::move(c));
}

MapJet map_inverse(const MapJet& F, std::span<const double> base) {
    const int n = F.dim();
    if (F.n_out() != n) throw DimensionError("map_inverse needs a square map jet");
    if (F.order() < 1) throw DimensionError("map_inverse needs order >= 1");
    if (static_cast<int>(base.size()) != n) throw DimensionError("map_inverse: base point size mismatch");
    const int K = F.order();

    std::vector<double> A = F.linear();
    double row_norm = 0.0;
    for (int i = 0; i < n; ++i) {
        double s = 0.0;
        for (int j = 0; j < n; ++j) s += std::abs(A[i * n + j]);
        row_norm = std::max(row_norm, s);
    }
    double d = det_dense(A, n);
    double scale = 1.0;
    for (int i = 0; i < n; ++i) scale *= std::max(row_norm, 1e-300);
    if (std::abs(d) < 1e-9 * scale)
        throw SingularError("map_inverse: singular linear part (not a local diffeomorphism)");
    std::vector<double> Ainv = inverse_dense(A, n);

    // F = y0 + A h + N(h); solve G_hat = A^{-1} (k - N(G_hat)) by iteration,
    // which fixes one extra degree per pass.
    std::vector<double> y0 = F.values();
    std::vector<Jet> Nh(n);
    for (int i = 0; i < n; ++i) {
        Nh[i] = F.comp[i] - y0[i];
        Nh[i].set_coeff(0, 0.0);
        // Remove the linear part.
        for (int j = 1; j <= n; ++j) {
            Jet ej = Jet::variable(n, K, j, 0.0);
            Nh[i] -= A[i * n + (j - 1)] * ej;
        }
    }
    std::vector<double> zero(n, 0.0);
    // Start with the linear inverse.
    auto linear_apply = [&](const std::vector<double>& M, const std::vector<Jet>& v) {
        std::vector<Jet> r(n, Jet::constant(n, K, 0.0));
        for (int i = 0; i < n; ++i)
            for (int j = 0; j < n; ++j) r[i] += M[i * n + j] * v[j];
        return r;
    };
    std::vector<Jet> k_vars(n);
    for (int i = 0; i < n; ++i) k_vars[i] = Jet::variable(n, K, i + 1, 0.0);
    std::vector<Jet> Ghat = linear_apply(Ainv, k_vars);
    for (int pass = 1; pass < K; ++pass) {
        MapJet Gm{Ghat};
        std::vector<Jet> NG(n);
        for (int i = 0; i < n; ++i) NG[i] = compose(Nh[i], Gm, zero);
        std::vector<Jet> rhs(n);
        for (int i = 0; i < n; ++i) rhs[i] = k_vars[i] - NG[i];
        Ghat = linear_apply(Ainv, rhs);
    }
    std::vector<Jet> G(n);
    for (int i = 0; i < n; ++i) G[i] = Ghat[i] + base[i];
    return MapJet(std::move(G));
}

Jet jacobian_det(const MapJet& F) {
    const int n = F.dim();
    if (F.n_out() != n) throw DimensionError("jacobian_det needs a square map jet");
    if (F.order() < 1) throw DimensionError("jacobian_det needs order >= 1");
    std::vector<Jet> D(n * n);
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) D[i * n + j] = F.comp[i].deriv(j + 1);
    return det_jet(D, n);
}

double det_dense(std::span<const double> m, int n) {
    std::vector<double> a(m.begin(), m.end());
    double det = 1.0;
    for (int col = 0; col < n; ++col) {
        int piv = col;
        for (int r = col + 1; r < n; ++r)
            if (std::abs(a[r * n + col]) > std::abs(a[piv * n + col])) piv = r;
        if (a[piv * n + col] == 0.0) return 0.0;
        if (piv != col) {
            for (int c = 0; c < n; ++c) std::swap(a[piv * n + c], a[col * n + c]);
            det = -det;
        }
        det *= a[col * n + col];
        for (int r = col + 1; r < n; ++r) {
            double f = a[r * n + col] / a[col * n + col];
            for (int c = col; c < n; ++c) a[r * n + c] -= f * a[col * n + c];
        }
    }
    return det;
}

std::vector<double> inverse_dense(std::span<const double> m, int n) {
    std::vector<double> a(m.begin(), m.end());
    std::vector<double> inv(n * n, 0.0);
    for (int i = 0; i < n; ++i) inv[i * n + i] = 1.0;
    for (int col = 0; col < n; ++col) {
        int piv = col;
        for (int r = col + 1; r < n; ++r)
            if (std::abs(a[r * n + col]) > std::abs(a[piv * n + col])) piv = r;
        if (a[piv * n + col] == 0.0) throw SingularError("inverse_dense: singular matrix");
        for (int c = 0; c < n; ++c) {
            std::swap(a[piv * n + c], a[col * n + c]);
            std::swap(inv[piv * n + c], inv[col * n + c]);
        }
        double p = a[col * n + col];
        for (int c = 0; c < n; ++c) {
            a[col * n + c] /= p;
            inv[col * n + c] /= p;
        }
        for (int r = 0; r < n; ++r) {
            if (r == col) continue;
            double f = a[r * n + col];
            if (f == 0.0) continue;
            for (int c = 0; c < n; ++c) {
                a[r * n + c] -= f * a[col * n + c];
                inv[r * n + c] -= f * inv[col * n + c];
            }
        }
    }
    return inv;
}

Jet det_jet(const std::vector<Jet>& m, int n) {
    if (n == 1) return m[0];
    if (n == 2) return m[0] * m[3] - m[1] * m[2];
    // Cofactor expansion along the first row.
    Jet r;
    for (int j = 0; j < n; ++j) {
        std::vector<Jet> minor;
        minor.reserve((n - 1) * (n - 1));
        for (int a = 1; a < n; ++a)
            for (int b = 0; b < n; ++b)
                if (b != j) minor.push_back(m[a * n + b]);
        Jet term = m[j] * det_jet(minor, n - 1);
        if (j % 2 == 1) term = -term;
        if (r.empty())
            r = term;
        else
            r += term;
    }
    return r;
}

std::vector<Jet> inverse_jet(const std::vector<Jet>& m, int n) {
    Jet d = det_jet(m, n);
    Jet dinv = d.inv();
    std::vector<Jet> inv(n * n);
    if (n == 1) {
        inv[0] = dinv;
        return inv;
    }
    for (int i = 0; i < n; ++i) {
        for (int j = 0; j < n; ++j) {
            // Cofactor C_ji for the (j, i) entry of the adjugate.
            std::vector<Jet> minor;
            minor.reserve((n - 1) * (n - 1));
            for (int a = 0; a < n; ++a) {
                if (a == j) continue;
                for (int b = 0; b < n; ++b)
                    if (b != i) minor.push_back(m[a * n + b]);
            }
            Jet c = det_jet(minor, n - 1) * dinv;
            if ((i + j) % 2 == 1) c = -c;
            inv[i * n + j] = c;
        }
    }
    return inv;
}

}  // namespace schw
