#include "schw/schwarzian.hpp"

#include <cmath>

namespace schw {

namespace {

void require_multidim(int n, const char* what) {
    if (n < 2)
        throw DimensionError(std::string(what) +
                             " requires dimension >= 2; use classical_schwarzian for n = 1");
}

}  // namespace

S2OperatorValue schwarzian(const Diffeo& f, const Connection& pi, std::span<const double> x) {
    require_multidim(f.dim(), "schwarzian");
    if (!pi.is_projective()) throw DataError("schwarzian: the connection must be projective");
    return t_difference(Connection::pullback(f, pi), pi, x);
}

S2OperatorValue schwarzian_flat(const Diffeo& f, std::span<const double> x) {
    const int n = f.dim();
    require_multidim(n, "schwarzian_flat");
    Tensor21Jets L = ell_flat_jets(f, x, 1);
    S2OperatorValue out(n);
    const double ca = -2.0 / (n - 1);
    const double cb = static_cast<double>(n + 1) / (n - 1);
    for (int i = 0; i < n; ++i)
        for (int j = i; j < n; ++j) {
            double div = 0.0;
            for (int k = 0; k < n; ++k) {
                out.t_ref(k, i, j) = L.at(k, i, j).value();
                div += L.at(k, i, j).deriv(k + 1).value();
            }
            double quad = 0.0;
            for (int k = 0; k < n; ++k)
                for (int m = 0; m < n; ++m) quad += L.at(k, i, m).value() * L.at(m, k, j).value();
            out.u_ref(i, j) = ca * div + cb * quad;
        }
    return out;
}

S2OperatorValue schwarzian_coord(const Diffeo& f, std::span<const double> x) {
    const int n = f.dim();
    MapJet F = f.jet_at(x, 3);
    std::vector<double> G = inverse_dense(F.linear(), n);

    Jet J = jacobian_det(F);  // order 2
    double Jv = J.value();
    std::vector<double> dJ(n);
    std::vector<double> d2J(n * n);
    for (int i = 0; i < n; ++i) {
        Jet Ji = J.deriv(i + 1);
        dJ[i] = Ji.value();
        for (int j = 0; j < n; ++j) d2J[i * n + j] = Ji.deriv(j + 1).value();
    }

    Tensor21Value L = ell_flat(f, x);

    S2OperatorValue out(n);
    const double c1 = static_cast<double>(n + 3) / (n + 1);
    const double c2 = static_cast<double>(n + 2) / (n + 1);
    for (int i = 0; i < n; ++i)
        for (int j = i; j < n; ++j) {
            for (int k = 0; k < n; ++k) out.t_ref(k, i, j) = L(k, i, j);
            double third = 0.0;
            for (int k = 0; k < n; ++k) {
                Jet d3 = F.comp[k].deriv(i + 1).deriv(j + 1);  // order 1
                for (int l = 0; l < n; ++l) third += d3.deriv(l + 1).value() * G[l * n + k];
            }
            out.u_ref(i, j) = third - c1 * d2J[i * n + j] / Jv + c2 * dJ[i] * dJ[j] / (Jv * Jv);
        }
    return out;
}

double classical_schwarzian(const Diffeo& f, double x) {
    if (f.dim() != 1) throw DimensionError("classical_schwarzian needs a 1-d map");
    double pt[1] = {x};
    MapJet F = f.jet_at(pt, 3);
    const Jet& j = F.comp[0];
    double f1 = j.coeff(1);          // f'
    double f2 = 2.0 * j.coeff(2);    // f''
    double f3 = 6.0 * j.coeff(3);    // f'''
    if (std::abs(f1) < 1e-12) throw SingularError("classical_schwarzian: critical point (f' = 0)");
    double r = f2 / f1;
    return f3 / f1 - 1.5 * r * r;
}

double verify_jacobian_identity(const Diffeo& f, std::span<const double> x) {
    const int n = f.dim();
    MapJet F = f.jet_at(x, 3);
    std::vector<double> G = inverse_dense(F.linear(), n);

    // Second and third partials of f.
    std::vector<double> H(n * n * n);      // [k][i][m]
    std::vector<double> T3(n * n * n * n); // [k][i][j][l]
    for (int k = 0; k < n; ++k)
        for (int i = 0; i < n; ++i) {
            Jet di = F.comp[k].deriv(i + 1);
            for (int m = 0; m < n; ++m) {
                Jet dim_ = di.deriv(m + 1);
                H[(k * n + i) * n + m] = dim_.value();
                for (int l = 0; l < n; ++l) T3[((k * n + i) * n + m) * n + l] = dim_.deriv(l + 1).value();
            }
        }

    Jet J = jacobian_det(F);  // order 2
    double Jv = J.value();
    std::vector<double> dJ(n);
    std::vector<double> d2J(n * n);
    for (int i = 0; i < n; ++i) {
        Jet Ji = J.deriv(i + 1);
        dJ[i] = Ji.value();
        for (int j = 0; j < n; ++j) d2J[i * n + j] = Ji.deriv(j + 1).value();
    }

    double worst = 0.0;
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) {
            double third = 0.0;
            for (int k = 0; k < n; ++k)
                for (int l = 0; l < n; ++l) third += T3[((k * n + i) * n + j) * n + l] * G[l * n + k];
            double cross = 0.0;
            for (int k = 0; k < n; ++k)
                for (int l = 0; l < n; ++l)
                    for (int m = 0; m < n; ++m)
                        for (int s = 0; s < n; ++s)
                            cross += H[(k * n + i) * n + m] * H[(l * n + j) * n + s] * G[m * n + l] * G[s * n + k];
            double lhs = third - cross;
            double rhs = d2J[i * n + j] / Jv - dJ[i] * dJ[j] / (Jv * Jv);
            worst = std::max(worst, std::abs(lhs - rhs));
        }
    return worst;
}

}  // namespace schw
