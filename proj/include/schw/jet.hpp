#pragma once

#include <array>
#include <cstdint>
#include <span>
#include <vector>

#include "schw/errors.hpp"

namespace schw {

inline constexpr int kMaxJetDim = 8;
inline constexpr int kMaxJetOrder = 4;

/// Dense multi-index bookkeeping for one (dim, order) pair.  Multi-indices
/// with |alpha| <= order are stored in graded-lexicographic order, so the
/// coefficients of a lower-order truncation form a prefix of the vector.
struct JetTable {
    int dim = 0;
    int order = 0;
    int size = 0;
    std::vector<std::array<std::uint8_t, kMaxJetDim>> alpha;
    std::vector<int> degree;
    std::vector<double> alpha_factorial;

    // Product pairs (i, j) -> k with deg(i) + deg(j) <= order, used by the
    // truncated Cauchy product.
    struct Pair {
        int i, j, k;
    };
    std::vector<Pair> pairs;

    // Rank of a multi-index, or -1 if |alpha| > order.
    int rank(std::span<const int> a) const;
    int rank_u8(const std::array<std::uint8_t, kMaxJetDim>& a, int deg) const;

    // Sizes of the truncations: prefix_size[k] = #, |alpha| <= k.
    std::array<int, kMaxJetOrder + 2> prefix_size{};
};

const JetTable& jet_table(int dim, int order);

/// Truncated multivariate Taylor expansion of a scalar function at a point.
/// Coefficients are Taylor coefficients (derivative / alpha!); the base
/// point is implicit and held by the caller.
class Jet {
  public:
    Jet() = default;

    static Jet constant(int dim, int order, double v);
    /// Jet of the coordinate function x^i (1-based i) with value `v`.
    static Jet variable(int dim, int order, int i, double v);

    bool empty() const { return tab_ == nullptr; }
    int dim() const { return tab_ ? tab_->dim : 0; }
    int order() const { return tab_ ? tab_->order : 0; }
    const JetTable& table() const { return *tab_; }

    double value() const { return c_[0]; }
    double coeff(int idx) const { return c_[idx]; }
    void set_coeff(int idx, double v) { c_[idx] = v; }
    std::span<const double> coeffs() const { return c_; }

    /// Taylor coefficient for a multi-index (zero if |alpha| > order is not
    /// allowed; that throws).
    double coeff(std::span<const int> a) const;
    /// True partial derivative d^alpha f at the base point, alpha! * coeff.
    double partial(std::span<const int> a) const;

    Jet truncated(int order2) const;
    Jet extended(int order2) const;
    /// d/dx_j (1-based j), one order lower.
    Jet deriv(int j) const;

    Jet operator-() const;
    Jet& operator+=(const Jet& b);
    Jet& operator-=(const Jet& b);
    friend Jet operator+(Jet a, const Jet& b) { return a += b; }
    friend Jet operator-(Jet a, const Jet& b) { return a -= b; }
    friend Jet operator*(const Jet& a, const Jet& b);
    friend Jet operator*(double s, Jet a);
    friend Jet operator*(Jet a, double s) { return s * a; }
    friend Jet operator+(Jet a, double s) { a.c_[0] += s; return a; }
    friend Jet operator+(double s, Jet a) { a.c_[0] += s; return a; }
    friend Jet operator-(Jet a, double s) { a.c_[0] -= s; return a; }

    /// Multiplicative inverse; requires a nonzero constant term.
    Jet inv() const;
    /// Truncated logarithm; requires a strictly positive constant term.
    Jet log() const;
    Jet exp() const;
    /// a^p for real p via exp(p log a); requires a positive constant term.
    Jet pow(double p) const;
    /// Integer power by repeated multiplication (m >= 0).
    Jet powi(int m) const;

    double max_abs_coeff() const;

  private:
    Jet(const JetTable* t) : tab_(t), c_(t->size, 0.0) {}
    void check_same(const Jet& b) const;

    const JetTable* tab_ = nullptr;
    std::vector<double> c_;
};

/// n-tuple of jets sharing dim and order: the k-jet of a map R^dim -> R^n.
/// Component constant terms are the map values at the (caller-held) base
/// point.
struct MapJet {
    std::vector<Jet> comp;

    MapJet() = default;
    explicit MapJet(std::vector<Jet> c);

    int n_out() const { return static_cast<int>(comp.size()); }
    int dim() const { return comp.empty() ? 0 : comp[0].dim(); }
    int order() const { return comp.empty() ? 0 : comp[0].order(); }

    std::vector<double> values() const;
    /// Degree-1 coefficient matrix, n_out x dim, row-major.
    std::vector<double> linear() const;
    double linear_det() const;

    MapJet truncated(int order2) const;
};

/// Truncated composition g(F); `g_base` is the base point of g, checked
/// against the constant terms of F to 1e-12.
Jet compose(const Jet& g, const MapJet& F, std::span<const double> g_base);
MapJet map_compose(const MapJet& F, const MapJet& G, std::span<const double> f_base);
/// Inverse map jet: G with F(G) = id up to the common order; `base` is the
/// base point of F and becomes the constant term of G.
MapJet map_inverse(const MapJet& F, std::span<const double> base);
/// det(dF^i/dx_j) as a jet of one order lower.
Jet jacobian_det(const MapJet& F);

MapJet identity_map_jet(int dim, int order, std::span<const double> at);

// Small dense double-matrix helpers (row-major n x n).
double det_dense(std::span<const double> m, int n);
std::vector<double> inverse_dense(std::span<const double> m, int n);

// Matrix of jets: determinant and inverse via cofactor expansion.
Jet det_jet(const std::vector<Jet>& m, int n);
std::vector<Jet> inverse_jet(const std::vector<Jet>& m, int n);

}  // namespace schw
