#pragma once

#include "ebi/linear_map.hpp"
#include "ebi/real3.hpp"

namespace ebi {

/// Affine representation (M, c) of a qubit map: r -> M r + c on Bloch vectors.
struct BlochRep {
    Mat3 M = mat3_zero();
    Vec3 c{0, 0, 0};

    bool unital(double tol = 1e-12) const { return norm(c) <= tol; }
};

inline Matrix state_from_bloch(const Vec3& r) {
    Matrix rho = Matrix::identity(2);
    for (int i = 0; i < 3; ++i) rho += r[i] * pauli(i + 1);
    return rho * 0.5;
}

inline Vec3 bloch_from_state(const Matrix& rho) {
    Vec3 r;
    for (int i = 0; i < 3; ++i) r[i] = (pauli(i + 1) * rho).trace().real();
    return r;
}

inline BlochRep bloch_from_map(const LinearMap& m) {
    if (m.dim_in != 2 || m.dim_out != 2)
        throw std::invalid_argument("bloch_from_map: requires a qubit map");
    BlochRep b;
    const Matrix img_id = apply(m, Matrix::identity(2));
    for (int i = 0; i < 3; ++i) {
        b.c[i] = 0.5 * (pauli(i + 1) * img_id).trace().real();
        for (int j = 0; j < 3; ++j) {
            const Matrix img = apply(m, pauli(j + 1));
            b.M[i][j] = 0.5 * (pauli(i + 1) * img).trace().real();
        }
    }
    return b;
}

inline BlochRep bloch_from_channel(const Channel& ch) { return bloch_from_map(ch.map()); }

/// Inverse direction: Choi matrix assembled from (M, c). May fail CP; callers
/// that need a guaranteed Channel go through channel_from_bloch.
inline LinearMap map_from_bloch(const Mat3& m, const Vec3& c) {
    Matrix choi = Matrix::identity(4);
    for (int i = 0; i < 3; ++i) {
        choi += c[i] * kron(pauli(i + 1), Matrix::identity(2));
        for (int j = 0; j < 3; ++j) {
            if (m[i][j] == 0.0) continue;
            choi += m[i][j] * kron(pauli(i + 1), pauli(j + 1).transpose());
        }
    }
    return LinearMap(2, 2, choi * 0.25);
}

inline LinearMap map_from_bloch(const BlochRep& b) { return map_from_bloch(b.M, b.c); }

inline Channel channel_from_bloch(const Mat3& m, const Vec3& c) {
    return Channel::make(map_from_bloch(m, c));
}

inline Channel channel_from_bloch(const BlochRep& b) { return channel_from_bloch(b.M, b.c); }

/// Unitary qubit channel acting as the rotation o on Bloch vectors.
inline Channel rotation_channel(const Mat3& o) { return channel_from_bloch(o, Vec3{0, 0, 0}); }

}  // namespace ebi
