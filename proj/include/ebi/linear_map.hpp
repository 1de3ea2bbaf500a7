#pragma once

#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "ebi/eig.hpp"
#include "ebi/matrix.hpp"
#include "json.hpp"

namespace ebi {

/// Trace-1 maximally entangled projector |eps><eps| with |eps> = sum_i |ii>/sqrt(d).
inline Matrix max_ent_state(int d) {
    if (d < 2) throw std::invalid_argument("max_ent_state: d must be >= 2");
    Matrix m(d * d, d * d);
    for (int i = 0; i < d; ++i)
        for (int j = 0; j < d; ++j) m(i * d + i, j * d + j) = 1.0 / d;
    return m;
}

/// Linear superoperator stored by its Choi matrix, normalized so that
/// choi = (map (x) identity)(|eps><eps|). Output factor first, input copy second.
/// Not necessarily CP or TP; Channel below is the validated subtype.
struct LinearMap {
    int dim_in = 0;
    int dim_out = 0;
    Matrix choi;

    LinearMap() = default;
    LinearMap(int din, int dout, Matrix c) : dim_in(din), dim_out(dout), choi(std::move(c)) {
        if (choi.rows() != dim_in * dim_out || !choi.square())
            throw std::invalid_argument("LinearMap: Choi size inconsistent with dims");
    }
};

inline LinearMap identity_map(int d) {
    return LinearMap(d, d, max_ent_state(d));
}

/// Constant map X -> sigma Tr X.
inline LinearMap constant_map(const Matrix& sigma, int dim_in) {
    return LinearMap(dim_in, sigma.rows(),
                     kron(sigma, Matrix::identity(dim_in) * (1.0 / dim_in)));
}

inline Matrix apply(const LinearMap& f, const Matrix& rho) {
    if (rho.rows() != f.dim_in || rho.cols() != f.dim_in)
        throw std::invalid_argument("apply: state dimension mismatch");
    Matrix out(f.dim_out, f.dim_out);
    for (int a = 0; a < f.dim_out; ++a)
        for (int b = 0; b < f.dim_out; ++b) {
            cplx s = 0.0;
            for (int i = 0; i < f.dim_in; ++i)
                for (int k = 0; k < f.dim_in; ++k)
                    s += f.choi(a * f.dim_in + i, b * f.dim_in + k) * rho(i, k);
            out(a, b) = static_cast<double>(f.dim_in) * s;
        }
    return out;
}

/// Transfer matrix acting on row-major vec(rho); S[(a,b),(i,k)] = d_in * C[(a,i),(b,k)].
inline Matrix superop_from_choi(const LinearMap& f) {
    Matrix s(f.dim_out * f.dim_out, f.dim_in * f.dim_in);
    for (int a = 0; a < f.dim_out; ++a)
        for (int b = 0; b < f.dim_out; ++b)
            for (int i = 0; i < f.dim_in; ++i)
                for (int k = 0; k < f.dim_in; ++k)
                    s(a * f.dim_out + b, i * f.dim_in + k) =
                        static_cast<double>(f.dim_in) * f.choi(a * f.dim_in + i, b * f.dim_in + k);
    return s;
}

inline LinearMap map_from_superop(const Matrix& s, int dim_in, int dim_out) {
    Matrix c(dim_out * dim_in, dim_out * dim_in);
    for (int a = 0; a < dim_out; ++a)
        for (int b = 0; b < dim_out; ++b)
            for (int i = 0; i < dim_in; ++i)
                for (int k = 0; k < dim_in; ++k)
                    c(a * dim_in + i, b * dim_in + k) =
                        s(a * dim_out + b, i * dim_in + k) / static_cast<double>(dim_in);
    return LinearMap(dim_in, dim_out, std::move(c));
}

/// compose(f, g) acts as f after g.
inline LinearMap compose(const LinearMap& f, const LinearMap& g) {
    if (f.dim_in != g.dim_out) throw std::invalid_argument("compose: dimension mismatch");
    return map_from_superop(superop_from_choi(f) * superop_from_choi(g), g.dim_in, f.dim_out);
}

inline LinearMap tensor(const LinearMap& f, const LinearMap& g) {
    const Matrix prod = kron(f.choi, g.choi);
    // (out_f, in_f, out_g, in_g) -> (out_f, out_g, in_f, in_g)
    const Matrix c = permute_subsystems(prod, {f.dim_out, f.dim_in, g.dim_out, g.dim_in}, {0, 2, 1, 3});
    return LinearMap(f.dim_in * g.dim_in, f.dim_out * g.dim_out, c);
}

/// Builds the Choi matrix of the map E_ij -> action(E_ij).
template <typename Action>
inline LinearMap map_from_action(int dim_in, int dim_out, Action&& action) {
    Matrix c(dim_out * dim_in, dim_out * dim_in);
    for (int i = 0; i < dim_in; ++i)
        for (int j = 0; j < dim_in; ++j) {
            const Matrix img = action(Matrix::unit(dim_in, i, j));
            for (int a = 0; a < dim_out; ++a)
                for (int b = 0; b < dim_out; ++b)
                    c(a * dim_in + i, b * dim_in + j) = img(a, b) / static_cast<double>(dim_in);
        }
    return LinearMap(dim_in, dim_out, std::move(c));
}

struct ValidationReport {
    bool cp = false;
    bool tp = false;
    double min_choi_eig = 0.0;  // most negative Choi eigenvalue found
    double tp_defect = 0.0;     // || Tr_out choi - 1/d ||_max

    bool ok() const { return cp && tp; }
    std::string violated() const {
        if (ok()) return "";
        std::string s;
        if (!cp) s += "not completely positive (min Choi eigenvalue " + std::to_string(min_choi_eig) + ")";
        if (!tp) {
            if (!s.empty()) s += "; ";
            s += "not trace preserving (defect " + std::to_string(tp_defect) + ")";
        }
        return s;
    }
};

inline ValidationReport validate(const LinearMap& m, double tol = 1e-9) {
    ValidationReport r;
    const Matrix sym = (m.choi + m.choi.dagger()) * 0.5;
    r.min_choi_eig = min_eigenvalue(sym);
    const double herm_defect = max_entry_distance(m.choi, m.choi.dagger());
    const double scale = 1.0 + m.choi.maxabs();
    r.cp = (r.min_choi_eig >= -tol * scale) && (herm_defect <= tol * scale);

    // trace preservation: Tr_out(choi) must equal 1/d_in.
    Matrix marg = partial_trace(m.choi, m.dim_out, m.dim_in, Sub::first);
    marg -= Matrix::identity(m.dim_in) * (1.0 / m.dim_in);
    r.tp_defect = marg.maxabs();
    r.tp = r.tp_defect <= tol;
    return r;
}

/// A validated completely positive trace-preserving LinearMap.
class Channel {
public:
    static std::optional<Channel> try_make(LinearMap m, double tol = 1e-9) {
        ValidationReport rep = validate(m, tol);
        if (!rep.ok()) return std::nullopt;
        return Channel(std::move(m), rep);
    }

    static Channel make(LinearMap m, double tol = 1e-9) {
        ValidationReport rep = validate(m, tol);
        if (!rep.ok()) throw std::invalid_argument("Channel: " + rep.violated());
        return Channel(std::move(m), rep);
    }

    /// For maps that are CPTP by construction (compositions, tensor products
    /// of channels); skips the eigensolve.
    static Channel trusted(LinearMap m) { return Channel(std::move(m), ValidationReport{true, true, 0.0, 0.0}); }

    const LinearMap& map() const { return map_; }
    const Matrix& choi() const { return map_.choi; }
    int dim_in() const { return map_.dim_in; }
    int dim_out() const { return map_.dim_out; }
    int dim() const { return map_.dim_in; }
    const ValidationReport& report() const { return report_; }

private:
    Channel(LinearMap m, ValidationReport rep) : map_(std::move(m)), report_(rep) {}
    LinearMap map_;
    ValidationReport report_;
};

inline Channel compose(const Channel& f, const Channel& g) {
    return Channel::trusted(compose(f.map(), g.map()));
}
inline Channel tensor(const Channel& f, const Channel& g) {
    return Channel::trusted(tensor(f.map(), g.map()));
}
inline Matrix apply(const Channel& f, const Matrix& rho) { return apply(f.map(), rho); }

inline Channel identity_channel(int d) { return Channel::trusted(identity_map(d)); }

inline Channel unitary_channel(const Matrix& u) {
    if (!u.square()) throw std::invalid_argument("unitary_channel: non-square");
    const int d = u.rows();
    LinearMap m = map_from_action(d, d, [&](const Matrix& x) { return u * x * u.dagger(); });
    return Channel::trusted(std::move(m));
}

struct KrausSet {
    std::vector<Matrix> operators;
};

inline LinearMap choi_from_kraus(const KrausSet& k) {
    if (k.operators.empty()) throw std::invalid_argument("choi_from_kraus: empty set");
    const int dout = k.operators.front().rows();
    const int din = k.operators.front().cols();
    Matrix c(dout * din, dout * din);
    for (const Matrix& m : k.operators) {
        if (m.rows() != dout || m.cols() != din)
            throw std::invalid_argument("choi_from_kraus: inconsistent operator shapes");
        // vec(M) as a column of the out (x) in space, row-major
        for (int a = 0; a < dout; ++a)
            for (int i = 0; i < din; ++i)
                for (int b = 0; b < dout; ++b)
                    for (int j = 0; j < din; ++j)
                        c(a * din + i, b * din + j) += m(a, i) * std::conj(m(b, j)) / static_cast<double>(din);
    }
    return LinearMap(din, dout, std::move(c));
}

/// Canonical (minimal) Kraus set via eigendecomposition of the Choi matrix;
/// eigenvalues below 1e-10 are dropped.
inline KrausSet kraus_from_choi(const LinearMap& m, double psd_tol = 1e-9) {
    const Matrix sym = (m.choi + m.choi.dagger()) * 0.5;
    Spectrum s = herm_eig(sym);
    const double scale = 1.0 + m.choi.maxabs();
    if (s.eigenvalues.back() < -psd_tol * scale)
        throw std::invalid_argument("kraus_from_choi: Choi not positive semidefinite");
    KrausSet out;
    for (std::size_t idx = 0; idx < s.eigenvalues.size(); ++idx) {
        const double lam = s.eigenvalues[idx];
        if (lam <= 1e-10) continue;
        Matrix op(m.dim_out, m.dim_in);
        const double w = std::sqrt(lam * m.dim_in);
        for (int a = 0; a < m.dim_out; ++a)
            for (int i = 0; i < m.dim_in; ++i)
                op(a, i) = w * s.eigenvectors(a * m.dim_in + i, static_cast<int>(idx));
        out.operators.push_back(std::move(op));
    }
    return out;
}

inline bool kraus_trace_preserving(const KrausSet& k, double tol = 1e-9) {
    if (k.operators.empty()) return false;
    const int din = k.operators.front().cols();
    Matrix s(din, din);
    for (const Matrix& m : k.operators) s += m.dagger() * m;
    return max_entry_distance(s, Matrix::identity(din)) <= tol;
}

// ---------------------------------------------------------------------------
// JSON interchange: {dim_in, dim_out, choi_re: [[..]], choi_im: [[..]]}
// ---------------------------------------------------------------------------

inline nlohmann::json to_json(const LinearMap& m) {
    nlohmann::json re = nlohmann::json::array(), im = nlohmann::json::array();
    for (int i = 0; i < m.choi.rows(); ++i) {
        nlohmann::json rrow = nlohmann::json::array(), irow = nlohmann::json::array();
        for (int j = 0; j < m.choi.cols(); ++j) {
            rrow.push_back(m.choi(i, j).real());
            irow.push_back(m.choi(i, j).imag());
        }
        re.push_back(std::move(rrow));
        im.push_back(std::move(irow));
    }
    return nlohmann::json{{"dim_in", m.dim_in}, {"dim_out", m.dim_out},
                          {"choi_re", std::move(re)}, {"choi_im", std::move(im)}};
}

inline LinearMap linear_map_from_json(const nlohmann::json& j) {
    const int din = j.at("dim_in").get<int>();
    const int dout = j.at("dim_out").get<int>();
    const auto& re = j.at("choi_re");
    const auto& im = j.at("choi_im");
    const int n = din * dout;
    if (static_cast<int>(re.size()) != n || static_cast<int>(im.size()) != n)
        throw std::invalid_argument("linear_map_from_json: Choi size mismatch");
    Matrix c(n, n);
    for (int i = 0; i < n; ++i)
        for (int k = 0; k < n; ++k)
            c(i, k) = cplx(re[i][k].get<double>(), im[i][k].get<double>());
    return LinearMap(din, dout, std::move(c));
}

}  // namespace ebi
