#include "schw/diffeo.hpp"

#include <cmath>
#include <variant>

namespace schw {

namespace {
constexpr double kMoebiusDenomTol = 1e-9;
constexpr int kNewtonMaxIter = 50;
constexpr double kNewtonTol = 1e-12;
}  // namespace

ProjectiveMatrix::ProjectiveMatrix(int n_, std::vector<double> entries) : n(n_), m(std::move(entries)) {
    if (static_cast<int>(m.size()) != (n + 1) * (n + 1))
        throw DimensionError("ProjectiveMatrix: expected (n+1)^2 entries");
}

ProjectiveMatrix ProjectiveMatrix::identity(int n) {
    std::vector<double> e((n + 1) * (n + 1), 0.0);
    for (int i = 0; i <= n; ++i) e[i * (n + 2)] = 1.0;
    return ProjectiveMatrix(n, std::move(e));
}

ProjectiveMatrix ProjectiveMatrix::inverse() const {
    // Scale-invariant singularity test: compare against the matrix scale.
    double scale = 0.0;
    for (double v : m) scale = std::max(scale, std::abs(v));
    double p = 1.0;
    for (int i = 0; i <= n; ++i) p *= std::max(scale, 1e-300);
    if (std::abs(det()) < 1e-12 * p) throw SingularError("projective matrix is singular");
    return ProjectiveMatrix(n, inverse_dense(m, n + 1));
}

ProjectiveMatrix ProjectiveMatrix::operator*(const ProjectiveMatrix& o) const {
    if (n != o.n) throw DimensionError("projective matrix size mismatch");
    int s = n + 1;
    std::vector<double> r(s * s, 0.0);
    for (int i = 0; i < s; ++i)
        for (int k = 0; k < s; ++k)
            for (int j = 0; j < s; ++j) r[i * s + j] += m[i * s + k] * o.m[k * s + j];
    return ProjectiveMatrix(n, std::move(r));
}

struct Diffeo::Body {
    struct Identity {
        int n;
    };
    struct Moebius {
        ProjectiveMatrix m;
    };
    struct Affine {
        int n;
        std::vector<double> a;  // n x n
        std::vector<double> b;  // n
    };
    struct Expressions {
        std::vector<ScalarField> comps;
    };
    struct Composition {
        Diffeo f, g;  // f o g
    };
    struct FormalInverse {
        Diffeo f;
    };
    struct Custom {
        int n;
        JetFn fn;
    };
    std::variant<Identity, Moebius, Affine, Expressions, Composition, FormalInverse, Custom> v;
    int n = 0;
};

Diffeo Diffeo::identity(int n) {
    auto b = std::make_shared<Body>();
    b->v = Body::Identity{n};
    b->n = n;
    Diffeo d;
    d.body_ = std::move(b);
    return d;
}

Diffeo Diffeo::moebius(const ProjectiveMatrix& m) {
    m.inverse();  // invertibility check
    auto b = std::make_shared<Body>();
    b->v = Body::Moebius{m};
    b->n = m.n;
    Diffeo d;
    d.body_ = std::move(b);
    return d;
}

Diffeo Diffeo::affine(int n, std::vector<double> a, std::vector<double> off) {
    if (static_cast<int>(a.size()) != n * n || static_cast<int>(off.size()) != n)
        throw DimensionError("affine map: bad matrix/offset size");
    inverse_dense(a, n);  // invertibility check
    auto b = std::make_shared<Body>();
    b->v = Body::Affine{n, std::move(a), std::move(off)};
    b->n = n;
    Diffeo d;
    d.body_ = std::move(b);
    return d;
}

Diffeo Diffeo::from_expressions(std::vector<ScalarField> components) {
    if (components.empty()) throw DimensionError("expression map needs components");
    int n = components[0].dim();
    if (static_cast<int>(components.size()) != n)
        throw DimensionError("expression map must have dim components (square)");
    for (const auto& c : components)
        if (c.dim() != n) throw DimensionError("expression components disagree on dimension");
    auto b = std::make_shared<Body>();
    b->v = Body::Expressions{std::move(components)};
    b->n = n;
    Diffeo d;
    d.body_ = std::move(b);
    return d;
}

Diffeo Diffeo::from_expressions(int n, const std::vector<std::string>& components) {
    std::vector<ScalarField> fs;
    fs.reserve(components.size());
    for (const auto& s : components) fs.push_back(ScalarField::parse(s, n));
    return from_expressions(std::move(fs));
}

Diffeo Diffeo::from_jet_function(int n, JetFn fn) {
    auto b = std::make_shared<Body>();
    b->v = Body::Custom{n, std::move(fn)};
    b->n = n;
    Diffeo d;
    d.body_ = std::move(b);
    return d;
}

Diffeo Diffeo::compose(const Diffeo& f, const Diffeo& g) {
    if (f.dim() != g.dim()) throw DimensionError("composition dimension mismatch");
    auto b = std::make_shared<Body>();
    b->v = Body::Composition{f, g};
    b->n = f.dim();
    Diffeo d;
    d.body_ = std::move(b);
    return d;
}

int Diffeo::dim() const {
    if (!body_) throw Error("empty Diffeo");
    return body_->n;
}

namespace {

std::vector<double> newton_invert(const Diffeo& f, std::span<const double> y) {
    const int n = f.dim();
    std::vector<double> x(y.begin(), y.end());
    for (int it = 0; it < kNewtonMaxIter; ++it) {
        MapJet j = f.jet_at(x, 1);
        std::vector<double> r = j.values();
        double err = 0.0;
        for (int i = 0; i < n; ++i) {
            r[i] -= y[i];
            err = std::max(err, std::abs(r[i]));
        }
        if (err <= kNewtonTol) return x;
        std::vector<double> Jinv = inverse_dense(j.linear(), n);
        for (int i = 0; i < n; ++i) {
            double s = 0.0;
            for (int k = 0; k < n; ++k) s += Jinv[i * n + k] * r[k];
            x[i] -= s;
        }
        if (!std::isfinite(x[0])) break;
    }
    throw SingularError("inverse map: Newton iteration did not converge (map not invertible near the point)");
}

}  // namespace

MapJet Diffeo::jet_at(std::span<const double> x, int order) const {
    if (!body_) throw Error("empty Diffeo");
    const int n = body_->n;
    if (static_cast<int>(x.size()) != n) throw DimensionError("jet_at: point dimension mismatch");

    MapJet out;
    if (auto* id = std::get_if<Body::Identity>(&body_->v)) {
        (void)id;
        out = identity_map_jet(n, order, x);
    } else if (auto* mb = std::get_if<Body::Moebius>(&body_->v)) {
        const ProjectiveMatrix& M = mb->m;
        Jet den = Jet::constant(n, order, M.at(n, n));
        std::vector<Jet> vars;
        vars.reserve(n);
        for (int j = 0; j < n; ++j) vars.push_back(Jet::variable(n, order, j + 1, x[j]));
        for (int j = 0; j < n; ++j) den += M.at(n, j) * vars[j];
        if (std::abs(den.value()) < kMoebiusDenomTol)
            throw DomainError("moebius map: point on the excluded hyperplane c.x + d = 0");
        Jet deninv = den.inv();
        std::vector<Jet> comps;
        comps.reserve(n);
        for (int i = 0; i < n; ++i) {
            Jet num = Jet::constant(n, order, M.at(i, n));
            for (int j = 0; j < n; ++j) num += M.at(i, j) * vars[j];
            comps.push_back(num * deninv);
        }
        out = MapJet(std::move(comps));
    } else if (auto* af = std::get_if<Body::Affine>(&body_->v)) {
        std::vector<Jet> comps;
        comps.reserve(n);
        for (int i = 0; i < n; ++i) {
            Jet c = Jet::constant(n, order, af->b[i]);
            for (int j = 0; j < n; ++j)
                if (af->a[i * n + j] != 0.0) c += af->a[i * n + j] * Jet::variable(n, order, j + 1, x[j]);
            comps.push_back(c);
        }
        out = MapJet(std::move(comps));
    } else if (auto* ex = std::get_if<Body::Expressions>(&body_->v)) {
        std::vector<Jet> comps;
        comps.reserve(n);
        for (const auto& c : ex->comps) comps.push_back(c.eval_jet(x, order));
        out = MapJet(std::move(comps));
    } else if (auto* co = std::get_if<Body::Composition>(&body_->v)) {
        MapJet gj = co->g.jet_at(x, order);
        MapJet fj = co->f.jet_at(gj.values(), order);
        out = map_compose(fj, gj, gj.values());
    } else if (auto* fi = std::get_if<Body::FormalInverse>(&body_->v)) {
        std::vector<double> pre = newton_invert(fi->f, x);
        MapJet fj = fi->f.jet_at(pre, order);
        out = map_inverse(fj, pre);
    } else {
        const auto& cu = std::get<Body::Custom>(body_->v);
        out = cu.fn(x, order);
        if (out.n_out() != n || out.dim() != n || out.order() != order)
            throw DataError("custom jet function returned a malformed map jet");
    }

    if (order >= 1) {
        std::vector<double> A = out.linear();
        double row_norm = 0.0;
        for (int i = 0; i < n; ++i) {
            double s = 0.0;
            for (int j = 0; j < n; ++j) s += std::abs(A[i * n + j]);
            row_norm = std::max(row_norm, s);
        }
        double scale = 1.0;
        for (int i = 0; i < n; ++i) scale *= std::max(row_norm, 1e-300);
        if (std::abs(det_dense(A, n)) < 1e-9 * scale)
            throw SingularError("map has a singular Jacobian at the point");
    }
    return out;
}

std::vector<double> Diffeo::operator()(std::span<const double> x) const {
    return jet_at(x, 1).values();
}

bool Diffeo::in_domain(std::span<const double> x) const {
    try {
        (void)jet_at(x, 1);
        return true;
    } catch (const DomainError&) {
        return false;
    }
}

Diffeo Diffeo::inverse() const {
    if (!body_) throw Error("empty Diffeo");
    if (auto* id = std::get_if<Body::Identity>(&body_->v)) return identity(id->n);
    if (auto* mb = std::get_if<Body::Moebius>(&body_->v)) return moebius(mb->m.inverse());
    if (auto* af = std::get_if<Body::Affine>(&body_->v)) {
        std::vector<double> ai = inverse_dense(af->a, af->n);
        std::vector<double> bi(af->n, 0.0);
        for (int i = 0; i < af->n; ++i)
            for (int j = 0; j < af->n; ++j) bi[i] -= ai[i * af->n + j] * af->b[j];
        return affine(af->n, std::move(ai), std::move(bi));
    }
    if (auto* co = std::get_if<Body::Composition>(&body_->v))
        return compose(co->g.inverse(), co->f.inverse());
    if (auto* fi = std::get_if<Body::FormalInverse>(&body_->v)) return fi->f;
    auto b = std::make_shared<Body>();
    b->v = Body::FormalInverse{*this};
    b->n = body_->n;
    Diffeo d;
    d.body_ = std::move(b);
    return d;
}

std::string Diffeo::describe() const {
    if (!body_) return "<empty>";
    if (std::holds_alternative<Body::Identity>(body_->v)) return "identity";
    if (std::holds_alternative<Body::Moebius>(body_->v)) return "moebius";
    if (std::holds_alternative<Body::Affine>(body_->v)) return "affine";
    if (auto* ex = std::get_if<Body::Expressions>(&body_->v)) {
        std::string s = "(";
        for (size_t i = 0; i < ex->comps.size(); ++i) {
            if (i) s += ", ";
            s += ex->comps[i].text();
        }
        return s + ")";
    }
    if (auto* co = std::get_if<Body::Composition>(&body_->v))
        return co->f.describe() + " . " + co->g.describe();
    if (auto* fi = std::get_if<Body::FormalInverse>(&body_->v)) return "inverse(" + fi->f.describe() + ")";
    return "custom";
}

}  // namespace schw
