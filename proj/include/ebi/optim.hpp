#pragma once

#include <functional>
#include <vector>

#include "ebi/eig.hpp"
#include "ebi/matrix.hpp"
#include "ebi/rng.hpp"

namespace ebi {

// ---------------------------------------------------------------------------
// Nelder-Mead (minimization)
// ---------------------------------------------------------------------------

struct NelderMeadResult {
    std::vector<double> x;
    double f = 0.0;
    int evaluations = 0;
};

inline NelderMeadResult nelder_mead(const std::function<double(const std::vector<double>&)>& f,
                                    std::vector<double> x0, double scale, int max_evals,
                                    double tol = 1e-10) {
    const int n = static_cast<int>(x0.size());
    int evals = 0;
    auto eval = [&](const std::vector<double>& x) {
        ++evals;
        return f(x);
    };

    std::vector<std::vector<double>> pts(n + 1, x0);
    std::vector<double> fv(n + 1);
    for (int i = 1; i <= n; ++i) pts[i][i - 1] += scale;
    for (int i = 0; i <= n; ++i) fv[i] = eval(pts[i]);

    auto order = [&]() {
        for (int i = 0; i <= n; ++i)
            for (int j = i + 1; j <= n; ++j)
                if (fv[j] < fv[i]) {
                    std::swap(fv[i], fv[j]);
                    std::swap(pts[i], pts[j]);
                }
    };
    order();

    while (evals < max_evals) {
        if (fv[n] - fv[0] < tol) break;
        std::vector<double> centroid(n, 0.0);
        for (int i = 0; i < n; ++i)
            for (int k = 0; k < n; ++k) centroid[k] += pts[i][k] / n;

        auto blend = [&](double coef) {
            std::vector<double> x(n);
            for (int k = 0; k < n; ++k) x[k] = centroid[k] + coef * (pts[n][k] - centroid[k]);
            return x;
        };

        const std::vector<double> xr = blend(-1.0);
        const double fr = eval(xr);
        if (fr < fv[0]) {
            const std::vector<double> xe = blend(-2.0);
            const double fe = eval(xe);
            if (fe < fr) {
                pts[n] = xe;
                fv[n] = fe;
            } else {
                pts[n] = xr;
                fv[n] = fr;
            }
        } else if (fr < fv[n - 1]) {
            pts[n] = xr;
            fv[n] = fr;
        } else {
            const bool outside = fr < fv[n];
            const std::vector<double> xc = blend(outside ? -0.5 : 0.5);
            const double fc = eval(xc);
            if (fc < std::min(fr, fv[n])) {
                pts[n] = xc;
                fv[n] = fc;
            } else {
                for (int i = 1; i <= n; ++i) {
                    for (int k = 0; k < n; ++k) pts[i][k] = pts[0][k] + 0.5 * (pts[i][k] - pts[0][k]);
                    fv[i] = eval(pts[i]);
                    if (evals >= max_evals) break;
                }
            }
        }
        order();
    }
    return {pts[0], fv[0], evals};
}

// ---------------------------------------------------------------------------
// Unitary and isometry parameterizations
// ---------------------------------------------------------------------------

/// Generalized Gell-Mann basis of traceless Hermitian d x d matrices (d^2 - 1 of them).
inline std::vector<Matrix> su_generators(int d) {
    std::vector<Matrix> g;
    for (int j = 0; j < d; ++j)
        for (int k = j + 1; k < d; ++k) {
            Matrix sym(d, d);
            sym(j, k) = 1.0;
            sym(k, j) = 1.0;
            g.push_back(sym);
            Matrix asym(d, d);
            asym(j, k) = cplx(0.0, -1.0);
            asym(k, j) = cplx(0.0, 1.0);
            g.push_back(asym);
        }
    for (int l = 1; l < d; ++l) {
        Matrix diag(d, d);
        const double w = std::sqrt(2.0 / (l * (l + 1.0)));
        for (int j = 0; j < l; ++j) diag(j, j) = w;
        diag(l, l) = -w * l;
        g.push_back(diag);
    }
    return g;
}

/// exp(i H) for Hermitian H, via the eigendecomposition.
inline Matrix unitary_exp(const Matrix& h) {
    Spectrum s = herm_eig((h + h.dagger()) * 0.5);
    const int d = h.rows();
    Matrix u(d, d);
    for (int i = 0; i < d; ++i)
        for (int j = 0; j < d; ++j) {
            cplx acc = 0.0;
            for (int k = 0; k < d; ++k)
                acc += s.eigenvectors(i, k) * std::polar(1.0, s.eigenvalues[k]) *
                       std::conj(s.eigenvectors(j, k));
            u(i, j) = acc;
        }
    return u;
}

/// U = exp(i sum_a theta_a G_a) with the su(d) generator basis.
inline Matrix unitary_from_angles(int d, const std::vector<double>& theta) {
    const std::vector<Matrix> gen = su_generators(d);
    if (theta.size() != gen.size())
        throw std::invalid_argument("unitary_from_angles: expected d^2-1 angles");
    Matrix h(d, d);
    for (std::size_t a = 0; a < gen.size(); ++a) h += theta[a] * gen[a];
    return unitary_exp(h);
}

inline int unitary_param_count(int d) { return d * d - 1; }

/// Stinespring isometry V : C^d -> C^d (x) C^{env} from 2*d*env*d raw reals,
/// by column orthonormalization of the raw complex matrix.
inline Matrix isometry_from_params(int d, int env, const std::vector<double>& raw) {
    if (static_cast<int>(raw.size()) != 2 * d * env * d)
        throw std::invalid_argument("isometry_from_params: wrong parameter count");
    Matrix g(d * env, d);
    std::size_t idx = 0;
    for (int i = 0; i < d * env; ++i)
        for (int j = 0; j < d; ++j) {
            g(i, j) = cplx(raw[idx], raw[idx + 1]);
            idx += 2;
        }
    return orthonormalize_columns(std::move(g));
}

inline int isometry_param_count(int d, int env) { return 2 * d * env * d; }

}  // namespace ebi
