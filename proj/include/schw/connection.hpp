#pragma once

#include <functional>
#include <map>
#include <memory>
#include <span>
#include <string>
#include <vector>

#include "schw/diffeo.hpp"
#include "schw/expr.hpp"
#include "schw/jet.hpp"

namespace schw {

// Packed storage for index pairs symmetric in (i, j), 0-based, i <= j.
inline int sym_count(int n) { return n * (n + 1) / 2; }
inline int sym_index(int i, int j, int n) {
    if (i > j) std::swap(i, j);
    return i * n - i * (i - 1) / 2 + (j - i);
}

/// Pointwise value of a symmetric (2,1)-tensor: t^k_{ij} with t symmetric in
/// the lower pair by construction (packed storage).
struct Tensor21Value {
    int n = 0;
    std::vector<double> t;  // n * sym_count(n), [k][pair]

    Tensor21Value() = default;
    explicit Tensor21Value(int n_) : n(n_), t(n_ * sym_count(n_), 0.0) {}

    double operator()(int k, int i, int j) const { return t[k * sym_count(n) + sym_index(i, j, n)]; }
    double& at(int k, int i, int j) { return t[k * sym_count(n) + sym_index(i, j, n)]; }
    /// Contraction t^k_{ik} for fixed i.
    double trace(int i) const;
    double max_abs() const;

    Tensor21Value& operator+=(const Tensor21Value& o);
    Tensor21Value& operator-=(const Tensor21Value& o);
    friend Tensor21Value operator+(Tensor21Value a, const Tensor21Value& b) { return a += b; }
    friend Tensor21Value operator-(Tensor21Value a, const Tensor21Value& b) { return a -= b; }
};

/// Pointwise first-order operator S^2 -> C^inf: a |-> (t^k_{ij} d_k + u_{ij}) a^{ij},
/// both blocks symmetric in (i, j).
struct S2OperatorValue {
    int n = 0;
    std::vector<double> t;  // n * sym_count(n)
    std::vector<double> u;  // sym_count(n)

    S2OperatorValue() = default;
    explicit S2OperatorValue(int n_) : n(n_), t(n_ * sym_count(n_), 0.0), u(sym_count(n_), 0.0) {}

    double t_at(int k, int i, int j) const { return t[k * sym_count(n) + sym_index(i, j, n)]; }
    double& t_ref(int k, int i, int j) { return t[k * sym_count(n) + sym_index(i, j, n)]; }
    double u_at(int i, int j) const { return u[sym_index(i, j, n)]; }
    double& u_ref(int i, int j) { return u[sym_index(i, j, n)]; }

    double max_abs() const;
    S2OperatorValue& operator-=(const S2OperatorValue& o);
    S2OperatorValue& operator+=(const S2OperatorValue& o);
    friend S2OperatorValue operator-(S2OperatorValue a, const S2OperatorValue& b) { return a -= b; }
    friend S2OperatorValue operator+(S2OperatorValue a, const S2OperatorValue& b) { return a += b; }
};

/// Jets of the entries of a symmetric (2,1)-tensor field at a point.
struct Tensor21Jets {
    int n = 0;
    std::vector<Jet> e;  // n * sym_count(n)

    Tensor21Jets() = default;
    Tensor21Jets(int n_, int dim_order_hint) : n(n_), e(n_ * sym_count(n_)) { (void)dim_order_hint; }
    const Jet& at(int k, int i, int j) const { return e[k * sym_count(n) + sym_index(i, j, n)]; }
    Jet& ref(int k, int i, int j) { return e[k * sym_count(n) + sym_index(i, j, n)]; }
    Tensor21Value value() const;
};

/// Field of connection symbols: either Christoffel symbols Gamma^k_{ij}
/// (symmetric in the lower pair) or projective symbols Pi^k_{ij} (symmetric
/// and trace-free).  Entries are jet-evaluable scalar fields; validation of
/// the symmetry and trace invariants happens at every evaluation.
class Connection {
  public:
    Connection() = default;

    static Connection flat(int n);
    /// Christoffel symbols from sparse "k,i,j" -> expression entries
    /// (1-based indices).  A pair given in only one order is mirrored; if
    /// both orders are given they are checked against each other at each
    /// evaluation (1e-12) and a DataError is raised on mismatch.
    static Connection christoffel(int n, const std::map<std::string, std::string>& entries);
    /// Projective symbols given directly; trace-freeness is checked at each
    /// evaluation (1e-10).
    static Connection projective(int n, const std::map<std::string, std::string>& entries);
    /// Trace-adjusted projection Pi^k_ij = Gamma^k_ij
    ///   - (delta^k_i Gamma^l_jl + delta^k_j Gamma^l_il) / (n+1);
    /// idempotent on already trace-free input.
    static Connection projective_from_christoffel(const Connection& gamma);
    /// The coordinate expression of the connection pulled back along f:
    /// x |-> Pi^c_ab(f(x)) df^a_i df^b_j dx^k/df^c + ell(f, x)^k_ij.
    static Connection pullback(const Diffeo& f, const Connection& pi);

    bool defined() const { return impl_ != nullptr; }
    int dim() const;
    bool is_flat() const;
    bool is_projective() const;

    /// Entry jets at x; `order` <= 2.  Runs the symmetry / trace checks.
    Tensor21Jets eval(std::span<const double> x, int order) const;
    Tensor21Value value(std::span<const double> x) const;

  private:
    struct Impl;
    std::shared_ptr<const Impl> impl_;
};

/// Flat-structure cocycle value at x:
/// ell(f,x)^k_ij = d2f^l_ij dx^k/df^l - (delta^k_j d_i logJ + delta^k_i d_j logJ)/(n+1).
Tensor21Value ell_flat(const Diffeo& f, std::span<const double> x);
/// Entry jets of the same field (consumes f to order `order` + 2).
Tensor21Jets ell_flat_jets(const Diffeo& f, std::span<const double> x, int order);
/// General cocycle ell(f) = f*Pi - Pi; dispatches to the closed flat form
/// when Pi is flat.
Tensor21Value ell_cocycle(const Diffeo& f, const Connection& pi, std::span<const double> x);

/// Natural pullback of a (2,1)-tensor field T along f, evaluated at x:
/// (f*T)^k_ij(x) = T^c_ab(f(x)) df^a_i df^b_j dx^k/df^c.
using Tensor21Field = std::function<Tensor21Value(std::span<const double>)>;
Tensor21Value pullback_tensor21(const Diffeo& f, const Tensor21Field& T, std::span<const double> x);

/// Operator symbols of a projective connection (n >= 2):
/// T_ij = Pi^k_ij d_k - 2/(n-1) (d_k Pi^k_ij - (n+1)/2 Pi^k_il Pi^l_kj).
S2OperatorValue operator_symbols(const Connection& pi, std::span<const double> x);

/// Difference operator with general coefficients:
/// (tilde-Pi - Pi)^k_ij d_k + alpha d_k(tilde-Pi - Pi)^k_ij
///   + beta (tilde-Pi^k_li tilde-Pi^l_jk - Pi^k_li Pi^l_jk).
S2OperatorValue t_difference_ab(const Connection& tilde, const Connection& pi, std::span<const double> x,
                                double alpha, double beta);
/// The well-defined difference with alpha = -2/(n-1), beta = (n+1)/(n-1);
/// equals operator_symbols(tilde) - operator_symbols(pi).
S2OperatorValue t_difference(const Connection& tilde, const Connection& pi, std::span<const double> x);

/// Pullback of a first-order operator S^2 -> C^inf along f, evaluated at x.
/// The principal symbol pulls back tensorially; the zero-order block picks
/// up the symmetrized second-derivative correction (weight 1/2 on the
/// unordered pair).
using S2OperatorField = std::function<S2OperatorValue(std::span<const double>)>;
S2OperatorValue pullback_s2_operator(const Diffeo& f, const S2OperatorField& A, std::span<const double> x);

/// A(a) at a point from the operator value and the 1-jets of the symmetric
/// field a^{ij} (packed, i <= j).
double apply_s2_operator(const S2OperatorValue& A, std::span<const Jet> a_jets);

}  // namespace schw
