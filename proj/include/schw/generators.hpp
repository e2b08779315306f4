#pragma once

#include <memory>
#include <span>
#include <string>
#include <vector>

#include "schw/connection.hpp"
#include "schw/density.hpp"
#include "schw/diffeo.hpp"
#include "schw/rng.hpp"

namespace schw {

/// Fixed random-data generator for the property suite.  All checks draw
/// from these functions so that a failure reproduces from (seed, trials)
/// alone.
///
/// Map families:
///  - Moebius: (n+1)x(n+1) entries uniform in [-1,1], redrawn until
///    |det| > 0.1 (after max-entry normalization), |d| >= 0.4, and every
///    point that the trial needs stays away from the excluded hyperplane
///    (|c.x + d| >= 0.35) with a nonsingular Jacobian there.
///  - Polynomial perturbation: id + eps * (cubic with coefficients in
///    [-1,1]), eps in [0.03, 0.1], redrawn until |det dF| >= 0.5 at the
///    needed points and the cubic part is not degenerate
///    (max |coefficient| >= 0.2).
/// Points are drawn uniformly from the box [-0.4, 0.4]^n.
struct Requirements {
    std::vector<std::vector<double>> cover_points;  // must be in the domain
    bool positive_jacobian = false;                 // J > 0 required there
};

std::vector<double> random_point(Lcg& rng, int n, double half_width = 0.4);

Diffeo random_moebius(Lcg& rng, int n, const Requirements& req = {});
Diffeo random_cubic_perturbation(Lcg& rng, int n, const Requirements& req = {});
/// Alternates between the two families by draw.
Diffeo random_map(Lcg& rng, int n, const Requirements& req = {});

/// Random polynomial expression of total degree <= max_degree with
/// coefficients uniform in [-amplitude, amplitude].
std::string random_polynomial_expr(Lcg& rng, int n, int max_degree, double amplitude);

/// Random non-flat projective symbols: the trace-adjusted projection of a
/// random polynomial Christoffel field (degree <= 2, coefficients in
/// [-0.5, 0.5]).
Connection random_projective_connection(Lcg& rng, int n);

/// Random first-order operator field S^2 -> C^inf with polynomial
/// coefficients (degree <= 2, amplitude 0.5).
S2OperatorField random_s2_operator_field(Lcg& rng, int n);

/// Random second-order operator coefficients (degree <= 2, amplitude 0.5).
std::shared_ptr<ExprOperatorField> random_operator_field(Lcg& rng, int n);

/// Random symmetric contravariant 2-tensor field as packed scalar fields.
std::vector<ScalarField> random_sym2_field(Lcg& rng, int n);

}  // namespace schw
