#pragma once

#include <functional>
#include <memory>
#include <span>
#include <string>
#include <vector>

#include "schw/expr.hpp"
#include "schw/jet.hpp"

namespace schw {

/// (n+1) x (n+1) matrix of a projective (linear-fractional) map,
/// entries row-major: [ a^i_j  b^i ; c_j  d ].
struct ProjectiveMatrix {
    int n = 0;
    std::vector<double> m;  // (n+1)^2

    ProjectiveMatrix() = default;
    ProjectiveMatrix(int n_, std::vector<double> entries);
    static ProjectiveMatrix identity(int n);

    double at(int r, int c) const { return m[r * (n + 1) + c]; }
    double& at(int r, int c) { return m[r * (n + 1) + c]; }
    double det() const { return det_dense(m, n + 1); }
    ProjectiveMatrix inverse() const;
    ProjectiveMatrix operator*(const ProjectiveMatrix& o) const;
};

/// A concrete diffeomorphism of (an open subset of) R^n.  Values are
/// immutable after construction; all evaluation is reentrant.
class Diffeo {
  public:
    using JetFn = std::function<MapJet(std::span<const double>, int)>;

    Diffeo() = default;

    static Diffeo identity(int n);
    /// Linear-fractional map x -> (A x + b) / (c.x + d); the matrix must be
    /// invertible.
    static Diffeo moebius(const ProjectiveMatrix& m);
    /// x -> A x + b with invertible A.
    static Diffeo affine(int n, std::vector<double> a, std::vector<double> b);
    static Diffeo from_expressions(std::vector<ScalarField> components);
    static Diffeo from_expressions(int n, const std::vector<std::string>& components);
    /// Map defined by a native jet evaluator (used for maps outside the
    /// expression grammar, e.g. exp).
    static Diffeo from_jet_function(int n, JetFn fn);
    /// f then g is compose(g, f); this returns f o g, i.e. x -> f(g(x)).
    static Diffeo compose(const Diffeo& f, const Diffeo& g);

    int dim() const;
    bool in_domain(std::span<const double> x) const;
    std::vector<double> operator()(std::span<const double> x) const;

    /// Order-K jet at x.  Throws DomainError outside the domain and
    /// SingularError if the Jacobian is singular there.  Maps with negative
    /// Jacobian determinant are accepted; density operations check the sign
    /// themselves.
    MapJet jet_at(std::span<const double> x, int order) const;

    /// Structural inverse where available (Moebius, affine, compositions);
    /// otherwise a formal inverse evaluated by Newton iteration plus
    /// jet-level map inversion.
    Diffeo inverse() const;

    /// Describes the construction (for reports).
    std::string describe() const;

  private:
    struct Body;
    std::shared_ptr<const Body> body_;
};

}  // namespace schw
