#pragma once

#include <memory>
#include <span>
#include <string>
#include <string_view>

#include "schw/jet.hpp"

namespace schw {

/// A scalar field on R^n defined by an expression, evaluable either as a
/// plain double or as a jet of any supported order.
///
/// Grammar:
///   expr   := term (('+'|'-') term)*
///   term   := factor (('*'|'/') factor)*
///   factor := base ('^' integer)?
///   base   := number | 'x' index | '(' expr ')' | '-' base
/// with variables x1..xn and decimal number literals.  Note that '^' binds
/// to the full base, so "-2^2" is (-2)^2 = 4.
class ScalarField {
  public:
    ScalarField() = default;

    static ScalarField parse(std::string_view src, int dim);
    static ScalarField constant(int dim, double v);
    static ScalarField zero(int dim) { return constant(dim, 0.0); }

    bool defined() const { return root_ != nullptr; }
    /// Structurally the constant 0 (an undefined field also counts).
    bool is_zero() const;
    int dim() const { return dim_; }
    const std::string& text() const { return src_; }

    double eval(std::span<const double> x) const;
    Jet eval_jet(std::span<const double> x, int order) const;

    // Arithmetic on fields (used by derived fields in tests/generators).
    friend ScalarField operator+(const ScalarField& a, const ScalarField& b);
    friend ScalarField operator-(const ScalarField& a, const ScalarField& b);
    friend ScalarField operator*(const ScalarField& a, const ScalarField& b);
    friend ScalarField operator*(double s, const ScalarField& a);

    struct Node;

  private:
    std::shared_ptr<const Node> root_;
    int dim_ = 0;
    std::string src_;
};

}  // namespace schw
