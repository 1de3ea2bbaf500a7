#pragma once

#include <cmath>
#include <cstdint>
#include <random>

#include "ebi/matrix.hpp"
#include "ebi/real3.hpp"

namespace ebi {

/// Seeded generator with hand-rolled distributions, so streams depend only on
/// the mt19937_64 sequence and stay identical across standard libraries.
class Rng {
public:
    explicit Rng(std::uint64_t seed) : gen_(seed) {}

    std::uint64_t raw() { return gen_(); }

    double uniform() {  // [0, 1)
        return static_cast<double>(gen_() >> 11) * 0x1.0p-53;
    }

    double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

    int uniform_int(int lo, int hi) {  // inclusive bounds
        return lo + static_cast<int>(gen_() % static_cast<std::uint64_t>(hi - lo + 1));
    }

    double normal() {
        // Box-Muller; one value per call keeps the stream position predictable.
        double u1 = uniform();
        while (u1 <= 0.0) u1 = uniform();
        const double u2 = uniform();
        return std::sqrt(-2.0 * std::log(u1)) * std::cos(6.283185307179586476925286766559 * u2);
    }

    cplx cnormal() {
        const double re = normal();
        const double im = normal();
        return cplx(re, im) * 0.7071067811865475244;  // unit-variance complex
    }

    Matrix ginibre(int rows, int cols) {
        Matrix g(rows, cols);
        for (int i = 0; i < rows; ++i)
            for (int j = 0; j < cols; ++j) g(i, j) = cnormal();
        return g;
    }

    Vec3 unit_vec3() {
        while (true) {
            Vec3 v{normal(), normal(), normal()};
            const double n = norm(v);
            if (n > 1e-8) return (1.0 / n) * v;
        }
    }

private:
    std::mt19937_64 gen_;
};

/// Gram-Schmidt column orthonormalization with deterministic phase handling.
/// Columns are assumed generic (full column rank).
inline Matrix orthonormalize_columns(Matrix m) {
    const int rows = m.rows(), cols = m.cols();
    for (int j = 0; j < cols; ++j) {
        for (int k = 0; k < j; ++k) {
            cplx inner = 0.0;
            for (int i = 0; i < rows; ++i) inner += std::conj(m(i, k)) * m(i, j);
            for (int i = 0; i < rows; ++i) m(i, j) -= inner * m(i, k);
        }
        double nrm = 0.0;
        for (int i = 0; i < rows; ++i) nrm += std::norm(m(i, j));
        nrm = std::sqrt(nrm);
        if (nrm < 1e-12) throw std::runtime_error("orthonormalize_columns: rank deficiency");
        for (int i = 0; i < rows; ++i) m(i, j) /= nrm;
    }
    return m;
}

inline Matrix haar_unitary(int d, Rng& rng) { return orthonormalize_columns(rng.ginibre(d, d)); }

/// Haar-random pure state density matrix on dimension d.
inline Matrix random_pure_state(int d, Rng& rng) {
    Matrix v = rng.ginibre(d, 1);
    double nrm = 0.0;
    for (int i = 0; i < d; ++i) nrm += std::norm(v(i, 0));
    nrm = std::sqrt(nrm);
    Matrix rho(d, d);
    for (int i = 0; i < d; ++i)
        for (int j = 0; j < d; ++j) rho(i, j) = v(i, 0) * std::conj(v(j, 0)) / (nrm * nrm);
    return rho;
}

/// Wishart-style random mixed state.
inline Matrix random_mixed_state(int d, Rng& rng, int rank = 0) {
    if (rank <= 0) rank = d;
    const Matrix g = rng.ginibre(d, rank);
    Matrix rho = g * g.dagger();
    const double t = rho.trace().real();
    return rho * (1.0 / t);
}

}  // namespace ebi
