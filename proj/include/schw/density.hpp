#pragma once

#include <map>
#include <memory>
#include <span>
#include <string>
#include <vector>

#include "schw/connection.hpp"
#include "schw/diffeo.hpp"
#include "schw/expr.hpp"

namespace schw {

/// Pointwise coefficients of a second-order operator
/// A = a2^{ij} d_i d_j + a1^i d_i + a0 acting on lambda-densities
/// (a2 packed symmetric).
struct OperatorValue {
    int n = 0;
    std::vector<double> a2;  // sym_count(n)
    std::vector<double> a1;  // n
    double a0 = 0.0;

    OperatorValue() = default;
    explicit OperatorValue(int n_) : n(n_), a2(sym_count(n_), 0.0), a1(n_, 0.0) {}
    double a2_at(int i, int j) const { return a2[sym_index(i, j, n)]; }
    double& a2_ref(int i, int j) { return a2[sym_index(i, j, n)]; }
    double max_abs() const;
};

/// Pointwise value of the symbol triple (abar2, abar1, abar0); same layout.
struct SymbolValue {
    int n = 0;
    std::vector<double> a2;
    std::vector<double> a1;
    double a0 = 0.0;

    SymbolValue() = default;
    explicit SymbolValue(int n_) : n(n_), a2(sym_count(n_), 0.0), a1(n_, 0.0) {}
    double a2_at(int i, int j) const { return a2[sym_index(i, j, n)]; }
    double& a2_ref(int i, int j) { return a2[sym_index(i, j, n)]; }
    double max_abs() const;
};

struct OperatorJets {
    int n = 0;
    std::vector<Jet> a2;  // packed
    std::vector<Jet> a1;
    Jet a0;
    OperatorValue value() const;
};

struct SymbolJets {
    int n = 0;
    std::vector<Jet> a2;
    std::vector<Jet> a1;
    Jet a0;
    SymbolValue value() const;
};

/// A field of second-order operator coefficients, evaluable as jets.  The
/// requested orders are per block: a2 jets of order o2, a1 of o1, a0 of o0.
class OperatorField {
  public:
    virtual ~OperatorField() = default;
    virtual int dim() const = 0;
    virtual OperatorJets eval(std::span<const double> x, int o2, int o1, int o0) const = 0;
    OperatorValue value(std::span<const double> x) const;
};

/// Expression-backed coefficients.  a2 entries are sparse "i,j" -> expr with
/// unordered pairs (giving both orders with different expressions is a data
/// error); a1 entries are "i" -> expr; a0 a single expression.
class ExprOperatorField final : public OperatorField {
  public:
    ExprOperatorField(int n, const std::map<std::string, std::string>& a2, const std::map<std::string, std::string>& a1,
                      const std::string& a0);
    ExprOperatorField(int n, std::vector<ScalarField> a2_packed, std::vector<ScalarField> a1, ScalarField a0);
    int dim() const override { return n_; }
    OperatorJets eval(std::span<const double> x, int o2, int o1, int o0) const override;

  private:
    int n_;
    std::vector<ScalarField> a2_;  // packed
    std::vector<ScalarField> a1_;
    ScalarField a0_;
};

/// Coefficients of the transformed operator f.A.f^{-1} as a field: the
/// conjugation of A by the weight-lambda pullback, b = coefficients of
/// (f* . A . f*^{-1}) with (f* phi)(x) = phi(f(x)) J_f(x)^lambda.
/// Jet orders are limited to (2, 1, 1): the principal part is transported
/// tensorially, the lower blocks are extracted by probe densities.
class ActDirectField final : public OperatorField {
  public:
    ActDirectField(Diffeo f, double lambda, std::shared_ptr<const OperatorField> a);
    int dim() const override;
    OperatorJets eval(std::span<const double> x, int o2, int o1, int o0) const override;

  private:
    Diffeo f_;
    double lambda_;
    std::shared_ptr<const OperatorField> a_;
};

/// A field of symbol triples, same evaluation contract.
class SymbolField {
  public:
    virtual ~SymbolField() = default;
    virtual int dim() const = 0;
    virtual SymbolJets eval(std::span<const double> x, int o2, int o1, int o0) const = 0;
    SymbolValue value(std::span<const double> x) const;
};

class ExprSymbolField final : public SymbolField {
  public:
    ExprSymbolField(int n, std::vector<ScalarField> a2_packed, std::vector<ScalarField> a1, ScalarField a0);
    int dim() const override { return n_; }
    SymbolJets eval(std::span<const double> x, int o2, int o1, int o0) const override;

  private:
    int n_;
    std::vector<ScalarField> a2_;
    std::vector<ScalarField> a1_;
    ScalarField a0_;
};

/// sigma_lambda(A) as a field.
class SigmaField final : public SymbolField {
  public:
    SigmaField(std::shared_ptr<const OperatorField> a, double lambda);
    int dim() const override;
    SymbolJets eval(std::span<const double> x, int o2, int o1, int o0) const override;

  private:
    std::shared_ptr<const OperatorField> a_;
    double lambda_;
};

/// Jet of (phi o f) J_f^lambda at x: the pullback of the weight-lambda
/// density phi.  Requires an orientation-preserving map (J_f > 0).
Jet density_pullback(const Diffeo& f, double lambda, const ScalarField& phi, std::span<const double> x, int order);

/// Symbol map:
///   abar2 = a2
///   abar1^i = a1^i - 2((n+1)L+1)/(n+3) d_j a2^{ij}
///   abar0  = a0 - L d_i a1^i + L((n+1)L+1)/(n+2) d_i d_j a2^{ij}
/// with L = lambda.
SymbolValue symbol_map(const OperatorField& a, double lambda, std::span<const double> x);
SymbolJets symbol_map_jets(const OperatorField& a, double lambda, std::span<const double> x, int o2, int o1, int o0);
/// Exact triangular inverse of the symbol map.
OperatorValue symbol_map_inverse(const SymbolField& s, double lambda, std::span<const double> x);

/// Coefficients at x of the conjugated operator, extracted by applying it
/// to quadratic probe densities centered at x.
OperatorValue act_direct(const Diffeo& f, double lambda, const OperatorField& a, std::span<const double> x);

/// Explicit action on symbols (n >= 2, flat projective structure):
///   abar2 -> f* abar2
///   abar1 -> f* abar1 + (2L-1)(n+1)/(n+3) ell(f)^i_{kl} (f* abar2)^{kl}
///   abar0 -> f* abar0 - 2L(L-1)/(n+2) S(f)_{kl} (f* abar2)^{kl}
/// where f* is the natural contravariant pullback
/// (f* abar2)^{kl}(x) = abar2^{ab}(f(x)) dx^k/df^a dx^l/df^b, and S(f) acts
/// as a first-order operator on the field f* abar2.
SymbolValue act_explicit(const Diffeo& f, double lambda, const SymbolField& s, std::span<const double> x);

struct SturmResult {
    double v = 0.0;
    std::vector<std::string> convention_notes;
};

/// 1-d Sturm-Liouville action on the potential of A_u = -2 d^2 + u:
///   v(x) = u(f^{-1}(x)) ((f^{-1})'(x))^2 - S_classical(f^{-1})(x).
/// Matches the density conjugation of A_u at input weight -1/2 and output
/// weight 3/2 (realized as ((f^{-1})')^2-scaled act_direct of f^{-1} at
/// lambda = -1/2); see the convention notes in the result.
SturmResult sturm_liouville_act(const Diffeo& f, const ScalarField& u, double x);

}  // namespace schw
