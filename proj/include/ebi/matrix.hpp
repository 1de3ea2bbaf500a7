#pragma once

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstddef>
#include <limits>
#include <stdexcept>
#include <string>
#include <vector>

namespace ebi {

using cplx = std::complex<double>;

/// Dense complex matrix in row-major order. Values are immutable in spirit:
/// every operation returns a fresh matrix, nothing here shares storage.
class Matrix {
public:
    Matrix() = default;
    Matrix(int rows, int cols)
        : rows_(rows), cols_(cols), a_(static_cast<std::size_t>(rows) * cols) {
        if (rows < 0 || cols < 0) throw std::invalid_argument("Matrix: negative dimension");
    }

    static Matrix zero(int rows, int cols) { return Matrix(rows, cols); }

    static Matrix identity(int n) {
        Matrix m(n, n);
        for (int i = 0; i < n; ++i) m(i, i) = 1.0;
        return m;
    }

    /// |i><j| in dimension d.
    static Matrix unit(int d, int i, int j) {
        Matrix m(d, d);
        m(i, j) = 1.0;
        return m;
    }

    static Matrix diag(const std::vector<double>& v) {
        Matrix m(static_cast<int>(v.size()), static_cast<int>(v.size()));
        for (std::size_t i = 0; i < v.size(); ++i) m(static_cast<int>(i), static_cast<int>(i)) = v[i];
        return m;
    }

    int rows() const { return rows_; }
    int cols() const { return cols_; }
    bool square() const { return rows_ == cols_; }

    cplx& operator()(int i, int j) { return a_[static_cast<std::size_t>(i) * cols_ + j]; }
    const cplx& operator()(int i, int j) const { return a_[static_cast<std::size_t>(i) * cols_ + j]; }

    const std::vector<cplx>& data() const { return a_; }

    Matrix& operator+=(const Matrix& o) {
        check_same_shape(o);
        for (std::size_t k = 0; k < a_.size(); ++k) a_[k] += o.a_[k];
        return *this;
    }
    Matrix& operator-=(const Matrix& o) {
        check_same_shape(o);
        for (std::size_t k = 0; k < a_.size(); ++k) a_[k] -= o.a_[k];
        return *this;
    }
    Matrix& operator*=(cplx s) {
        for (auto& x : a_) x *= s;
        return *this;
    }

    Matrix dagger() const {
        Matrix m(cols_, rows_);
        for (int i = 0; i < rows_; ++i)
            for (int j = 0; j < cols_; ++j) m(j, i) = std::conj((*this)(i, j));
        return m;
    }

    Matrix transpose() const {
        Matrix m(cols_, rows_);
        for (int i = 0; i < rows_; ++i)
            for (int j = 0; j < cols_; ++j) m(j, i) = (*this)(i, j);
        return m;
    }

    Matrix conjugate() const {
        Matrix m(rows_, cols_);
        for (std::size_t k = 0; k < a_.size(); ++k) m.a_[k] = std::conj(a_[k]);
        return m;
    }

    cplx trace() const {
        if (!square()) throw std::invalid_argument("trace: non-square matrix");
        cplx t = 0.0;
        for (int i = 0; i < rows_; ++i) t += (*this)(i, i);
        return t;
    }

    double maxabs() const {
        double m = 0.0;
        for (const auto& x : a_) m = std::max(m, std::abs(x));
        return m;
    }

    double frobenius() const {
        double s = 0.0;
        for (const auto& x : a_) s += std::norm(x);
        return std::sqrt(s);
    }

private:
    void check_same_shape(const Matrix& o) const {
        if (rows_ != o.rows_ || cols_ != o.cols_)
            throw std::invalid_argument("matrix shape mismatch");
    }

    int rows_ = 0;
    int cols_ = 0;
    std::vector<cplx> a_;
};

inline Matrix operator+(Matrix a, const Matrix& b) { return a += b; }
inline Matrix operator-(Matrix a, const Matrix& b) { return a -= b; }
inline Matrix operator*(Matrix a, cplx s) { return a *= s; }
inline Matrix operator*(cplx s, Matrix a) { return a *= s; }
inline Matrix operator*(Matrix a, double s) { return a *= cplx(s, 0.0); }
inline Matrix operator*(double s, Matrix a) { return a *= cplx(s, 0.0); }

inline Matrix operator*(const Matrix& a, const Matrix& b) {
    if (a.cols() != b.rows()) throw std::invalid_argument("matrix product: dimension mismatch");
    Matrix c(a.rows(), b.cols());
    for (int i = 0; i < a.rows(); ++i)
        for (int k = 0; k < a.cols(); ++k) {
            const cplx aik = a(i, k);
            if (aik == cplx(0.0, 0.0)) continue;
            for (int j = 0; j < b.cols(); ++j) c(i, j) += aik * b(k, j);
        }
    return c;
}

inline double max_entry_distance(const Matrix& a, const Matrix& b) {
    if (a.rows() != b.rows() || a.cols() != b.cols()) return std::numeric_limits<double>::infinity();
    double m = 0.0;
    for (int i = 0; i < a.rows(); ++i)
        for (int j = 0; j < a.cols(); ++j) m = std::max(m, std::abs(a(i, j) - b(i, j)));
    return m;
}

inline bool is_hermitian(const Matrix& a, double tol = 1e-12) {
    if (!a.square()) return false;
    const double bound = tol * (1.0 + a.maxabs());
    for (int i = 0; i < a.rows(); ++i)
        for (int j = i; j < a.cols(); ++j)
            if (std::abs(a(i, j) - std::conj(a(j, i))) > bound) return false;
    return true;
}

inline Matrix kron(const Matrix& a, const Matrix& b) {
    Matrix c(a.rows() * b.rows(), a.cols() * b.cols());
    for (int i = 0; i < a.rows(); ++i)
        for (int j = 0; j < a.cols(); ++j) {
            const cplx aij = a(i, j);
            if (aij == cplx(0.0, 0.0)) continue;
            for (int k = 0; k < b.rows(); ++k)
                for (int l = 0; l < b.cols(); ++l)
                    c(i * b.rows() + k, j * b.cols() + l) = aij * b(k, l);
        }
    return c;
}

enum class Sub { first, second };

namespace detail {
inline void check_bipartite(const Matrix& m, int d1, int d2) {
    if (!m.square() || m.rows() != d1 * d2)
        throw std::invalid_argument("bipartite operation: dims inconsistent with matrix size");
}
}  // namespace detail

inline Matrix partial_trace(const Matrix& m, int d1, int d2, Sub which) {
    detail::check_bipartite(m, d1, d2);
    if (which == Sub::first) {
        Matrix r(d2, d2);
        for (int k = 0; k < d1; ++k)
            for (int i = 0; i < d2; ++i)
                for (int j = 0; j < d2; ++j) r(i, j) += m(k * d2 + i, k * d2 + j);
        return r;
    }
    Matrix r(d1, d1);
    for (int i = 0; i < d1; ++i)
        for (int j = 0; j < d1; ++j)
            for (int k = 0; k < d2; ++k) r(i, j) += m(i * d2 + k, j * d2 + k);
    return r;
}

/// Entry permutation only, hence an exact involution.
inline Matrix partial_transpose(const Matrix& m, int d1, int d2, Sub which) {
    detail::check_bipartite(m, d1, d2);
    Matrix r(d1 * d2, d1 * d2);
    for (int i = 0; i < d1; ++i)
        for (int k = 0; k < d2; ++k)
            for (int j = 0; j < d1; ++j)
                for (int l = 0; l < d2; ++l) {
                    if (which == Sub::first)
                        r(i * d2 + k, j * d2 + l) = m(j * d2 + k, i * d2 + l);
                    else
                        r(i * d2 + k, j * d2 + l) = m(i * d2 + l, j * d2 + k);
                }
    return r;
}

/// Reorders the tensor factors of an operator on dims[0] x dims[1] x ... so that
/// factor perm[k] of the input sits at slot k of the output.
inline Matrix permute_subsystems(const Matrix& m, const std::vector<int>& dims,
                                 const std::vector<int>& perm) {
    const int n = static_cast<int>(dims.size());
    int total = 1;
    for (int d : dims) total *= d;
    if (!m.square() || m.rows() != total)
        throw std::invalid_argument("permute_subsystems: dims inconsistent");
    if (static_cast<int>(perm.size()) != n)
        throw std::invalid_argument("permute_subsystems: bad permutation");

    std::vector<int> out_dims(n);
    for (int k = 0; k < n; ++k) out_dims[k] = dims[perm[k]];

    // strides of the input factors
    std::vector<int> stride(n, 1);
    for (int k = n - 2; k >= 0; --k) stride[k] = stride[k + 1] * dims[k + 1];

    Matrix r(total, total);
    std::vector<int> idx_r(n, 0), idx_c(n, 0);
    for (int row = 0; row < total; ++row) {
        int t = row;
        for (int k = n - 1; k >= 0; --k) {
            idx_r[k] = t % out_dims[k];
            t /= out_dims[k];
        }
        int src_row = 0;
        for (int k = 0; k < n; ++k) src_row += idx_r[k] * stride[perm[k]];
        for (int col = 0; col < total; ++col) {
            t = col;
            for (int k = n - 1; k >= 0; --k) {
                idx_c[k] = t % out_dims[k];
                t /= out_dims[k];
            }
            int src_col = 0;
            for (int k = 0; k < n; ++k) src_col += idx_c[k] * stride[perm[k]];
            r(row, col) = m(src_row, src_col);
        }
    }
    return r;
}

/// Pauli matrices; index 0 gives the identity.
inline Matrix pauli(int i) {
    Matrix m(2, 2);
    switch (i) {
        case 0: m(0, 0) = 1.0; m(1, 1) = 1.0; break;
        case 1: m(0, 1) = 1.0; m(1, 0) = 1.0; break;
        case 2: m(0, 1) = cplx(0.0, -1.0); m(1, 0) = cplx(0.0, 1.0); break;
        case 3: m(0, 0) = 1.0; m(1, 1) = -1.0; break;
        default: throw std::invalid_argument("pauli: index out of range");
    }
    return m;
}

/// Swap operator on a d x d bipartite space.
inline Matrix swap_operator(int d) {
    Matrix s(d * d, d * d);
    for (int i = 0; i < d; ++i)
        for (int j = 0; j < d; ++j) s(i * d + j, j * d + i) = 1.0;
    return s;
}

}  // namespace ebi
