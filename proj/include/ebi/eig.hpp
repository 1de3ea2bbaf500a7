#pragma once

#include <algorithm>
#include <cmath>
#include <numeric>
#include <vector>

#include "ebi/matrix.hpp"

namespace ebi {

/// Eigenvalues sorted descending; eigenvectors are the matching orthonormal columns.
struct Spectrum {
    std::vector<double> eigenvalues;
    Matrix eigenvectors;
};

namespace detail {

inline double offdiag_mass(const Matrix& a) {
    double s = 0.0;
    for (int i = 0; i < a.rows(); ++i)
        for (int j = 0; j < a.cols(); ++j)
            if (i != j) s += std::norm(a(i, j));
    return std::sqrt(s);
}

}  // namespace detail

/// Cyclic Jacobi diagonalization of a Hermitian matrix. Sweeps until the
/// off-diagonal Frobenius mass drops below 1e-14 * ||A||_F.
inline Spectrum herm_eig(const Matrix& input) {
    if (!input.square()) throw std::invalid_argument("herm_eig: matrix not square");
    if (!is_hermitian(input)) throw std::invalid_argument("herm_eig: matrix not Hermitian");

    const int n = input.rows();
    Matrix a = input;
    Matrix v = Matrix::identity(n);

    const double fro = std::max(a.frobenius(), 1e-300);
    const int max_sweeps = 100;
    for (int sweep = 0; sweep < max_sweeps; ++sweep) {
        if (detail::offdiag_mass(a) <= 1e-14 * fro) break;
        for (int p = 0; p < n - 1; ++p) {
            for (int q = p + 1; q < n; ++q) {
                const cplx apq = a(p, q);
                const double r = std::abs(apq);
                if (r <= 1e-300) continue;
                const double app = a(p, p).real();
                const double aqq = a(q, q).real();

                // Phase removal followed by a real Jacobi rotation on the pair.
                const cplx phase = apq / r;  // a(p,q) = r * phase
                const double tau = (aqq - app) / (2.0 * r);
                double t;
                if (tau >= 0.0)
                    t = 1.0 / (tau + std::sqrt(1.0 + tau * tau));
                else
                    t = -1.0 / (-tau + std::sqrt(1.0 + tau * tau));
                const double c = 1.0 / std::sqrt(1.0 + t * t);
                const double s = t * c;

                // J restricted to (p,q): [[c, s], [-conj(phase)*s, conj(phase)*c]]
                const cplx jpp = c;
                const cplx jpq = s;
                const cplx jqp = -std::conj(phase) * s;
                const cplx jqq = std::conj(phase) * c;

                for (int k = 0; k < n; ++k) {  // A <- A J
                    const cplx akp = a(k, p), akq = a(k, q);
                    a(k, p) = akp * jpp + akq * jqp;
                    a(k, q) = akp * jpq + akq * jqq;
                }
                for (int k = 0; k < n; ++k) {  // A <- J^dag A
                    const cplx apk = a(p, k), aqk = a(q, k);
                    a(p, k) = std::conj(jpp) * apk + std::conj(jqp) * aqk;
                    a(q, k) = std::conj(jpq) * apk + std::conj(jqq) * aqk;
                }
                for (int k = 0; k < n; ++k) {  // V <- V J
                    const cplx vkp = v(k, p), vkq = v(k, q);
                    v(k, p) = vkp * jpp + vkq * jqp;
                    v(k, q) = vkp * jpq + vkq * jqq;
                }
            }
        }
    }

    std::vector<int> order(n);
    std::iota(order.begin(), order.end(), 0);
    std::vector<double> diag(n);
    for (int i = 0; i < n; ++i) diag[i] = a(i, i).real();
    std::stable_sort(order.begin(), order.end(), [&](int x, int y) { return diag[x] > diag[y]; });

    Spectrum out;
    out.eigenvalues.resize(n);
    out.eigenvectors = Matrix(n, n);
    for (int k = 0; k < n; ++k) {
        out.eigenvalues[k] = diag[order[k]];
        for (int i = 0; i < n; ++i) out.eigenvectors(i, k) = v(i, order[k]);
    }
    return out;
}

inline double min_eigenvalue(const Matrix& hermitian) {
    const Spectrum s = herm_eig(hermitian);
    return s.eigenvalues.back();
}

/// Square roots of the eigenvalues of A^dag A, clamped at zero, sorted descending.
inline std::vector<double> singular_values(const Matrix& a) {
    const Matrix gram = a.dagger() * a;
    // Symmetrize to wash out roundoff before the Hermitian solve.
    const Matrix sym = (gram + gram.dagger()) * 0.5;
    Spectrum s = herm_eig(sym);
    std::vector<double> sv(s.eigenvalues.size());
    for (std::size_t i = 0; i < sv.size(); ++i) sv[i] = std::sqrt(std::max(0.0, s.eigenvalues[i]));
    return sv;
}

constexpr double schatten_inf = std::numeric_limits<double>::infinity();

inline double schatten_norm(const Matrix& a, double p) {
    if (!(p >= 1.0)) throw std::invalid_argument("schatten_norm: p must be >= 1");
    const std::vector<double> sv = singular_values(a);
    if (p == schatten_inf) return sv.empty() ? 0.0 : sv.front();
    double s = 0.0;
    for (double x : sv) s += std::pow(x, p);
    return std::pow(s, 1.0 / p);
}

inline double trace_norm(const Matrix& a) { return schatten_norm(a, 1.0); }

}  // namespace ebi
