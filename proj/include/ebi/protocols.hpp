#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "ebi/filters.hpp"
#include "ebi/separability.hpp"

namespace ebi {

// ---------------------------------------------------------------------------
// Stinespring dilation of filtered chains
// ---------------------------------------------------------------------------

/// Unitary U on system (x) environment (env = d^2) with U(|x>|0>) = sum_e (M_e|x>)|e>,
/// so that psi(X) = Tr_E[U (X (x) |0><0|) U^dag].
inline Matrix stinespring_unitary(const Channel& psi) {
    const int d = psi.dim();
    const int env = d * d;
    KrausSet k = kraus_from_choi(psi.map());
    while (k.operators.size() < static_cast<std::size_t>(env))
        k.operators.push_back(Matrix::zero(d, d));

    const int total = d * env;
    Matrix u(total, total);
    for (int x = 0; x < d; ++x)
        for (int e = 0; e < env; ++e)
            for (int a = 0; a < d; ++a) u(a * env + e, x * env + 0) = k.operators[e](a, x);

    // complete the remaining columns by projecting canonical basis vectors
    // onto the orthogonal complement of what is already built
    std::vector<int> filled;
    for (int x = 0; x < d; ++x) filled.push_back(x * env);
    for (int col = 0; col < total; ++col) {
        if (col % env == 0 && col / env < d) continue;
        Matrix best(total, 1);
        double best_norm = -1.0;
        for (int cand = 0; cand < total; ++cand) {
            Matrix vec(total, 1);
            vec(cand, 0) = 1.0;
            for (int fc : filled) {
                cplx inner = 0.0;
                for (int i = 0; i < total; ++i) inner += std::conj(u(i, fc)) * vec(i, 0);
                for (int i = 0; i < total; ++i) vec(i, 0) -= inner * u(i, fc);
            }
            double n = 0.0;
            for (int i = 0; i < total; ++i) n += std::norm(vec(i, 0));
            n = std::sqrt(n);
            if (n > best_norm) {
                best_norm = n;
                best = vec;
            }
        }
        if (best_norm < 1e-8) throw std::runtime_error("stinespring_unitary: completion failed");
        for (int i = 0; i < total; ++i) u(i, col) = best(i, 0) / best_norm;
        filled.push_back(col);
    }
    return u;
}

struct StinespringCheck {
    double choi_distance = 0.0;
    bool holds = false;
};

/// Verifies phi psi_1 phi ... psi_{n-1} phi (x) D0 against the dilated chain
/// (phi (x) D0) U_1 (phi (x) D0) ... U_{n-1} (phi (x) D0) at the Choi level.
inline StinespringCheck stinespring_identity_check(const Channel& noise,
                                                   const std::vector<Channel>& filters,
                                                   double tol = 1e-8) {
    const int d = noise.dim();
    const Channel d0 = completely_depolarizing_to_ground(d * d);

    std::vector<LinearMap> fs;
    for (const Channel& f : filters) fs.push_back(f.map());
    const LinearMap lhs = tensor(compose_chain_map(noise.map(), fs), d0.map());

    const LinearMap big = tensor(noise.map(), d0.map());
    Matrix s = superop_from_choi(big);
    const Matrix sn = s;
    for (const Channel& f : filters) {
        const Matrix u = stinespring_unitary(f);
        s = s * superop_from_choi(unitary_channel(u).map()) * sn;
    }
    const LinearMap rhs = map_from_superop(s, d * d * d, d * d * d);

    StinespringCheck out;
    out.choi_distance = max_entry_distance(lhs.choi, rhs.choi);
    out.holds = out.choi_distance <= tol;
    return out;
}

// ---------------------------------------------------------------------------
// Convex decomposition of depolarizing-interleaved chains (two-qubit, local
// noise on the first factor)
// ---------------------------------------------------------------------------

enum class TermShape { PLAIN, P_CONJUGATED, RIGHT_DEGENERATE, LEFT_DEGENERATE };

inline const char* to_string(TermShape s) {
    switch (s) {
        case TermShape::PLAIN: return "PLAIN";
        case TermShape::P_CONJUGATED: return "P_CONJUGATED";
        case TermShape::RIGHT_DEGENERATE: return "RIGHT_DEGENERATE";
        default: return "LEFT_DEGENERATE";
    }
}

struct DecompositionTerm {
    double weight = 0.0;
    LinearMap map;
    TermShape shape = TermShape::PLAIN;
};

namespace detail {

inline LinearMap delta_on_first(double lambda) {
    return tensor(depolarizing(lambda, 2).map(), identity_map(2));
}

inline LinearMap p_conjugate(const LinearMap& psi) {
    const LinearMap p = reduction_map();
    return compose(p, compose(psi, p));
}

/// Symbolic chain term: tilde flags for the filters left of the depolarizing
/// factor; filters with index >= split sit to its right, untilded.
struct SymbolicTerm {
    int split = 0;
    std::vector<bool> pconj;  // size == split
};

inline bool operator<(const SymbolicTerm& a, const SymbolicTerm& b) {
    if (a.split != b.split) return a.split < b.split;
    return a.pconj < b.pconj;
}

}  // namespace detail

/// Three-term identity for (Delta_lambda (x) I) Psi (Delta_mu (x) I) on two
/// qubits; the weights are the exact rational coefficients of the split.
inline std::array<double, 3> dpd_weights(double lambda, double mu) {
    const double t = lambda * mu;
    return {(1.0 + lambda) * (1.0 - mu) / (2.0 * (1.0 - t)),
            (1.0 - lambda) * (1.0 - mu) / (2.0 * (1.0 + t)),
            mu * (1.0 - lambda * lambda) / (1.0 - t * t)};
}

inline std::vector<DecompositionTerm> decompose_dpd(double lambda, double mu,
                                                    const LinearMap& psi) {
    if (!(lambda >= 0.0 && lambda <= 1.0 && mu >= 0.0 && mu <= 1.0))
        throw std::invalid_argument("decompose_dpd: parameters must lie in [0,1]");
    if (psi.dim_in != 4 || psi.dim_out != 4)
        throw std::invalid_argument("decompose_dpd: expects a two-qubit map");

    std::vector<DecompositionTerm> out;
    if (lambda * mu >= 1.0) {  // lambda = mu = 1: both factors are the identity
        out.push_back({1.0, psi, TermShape::PLAIN});
        return out;
    }
    const auto w = dpd_weights(lambda, mu);
    const LinearMap delta = detail::delta_on_first(lambda * mu);
    if (w[0] >= 1e-15) out.push_back({w[0], compose(psi, delta), TermShape::RIGHT_DEGENERATE});
    if (w[1] >= 1e-15) out.push_back({w[1], compose(detail::p_conjugate(psi), delta), TermShape::P_CONJUGATED});
    if (w[2] >= 1e-15) out.push_back({w[2], compose(delta, psi), TermShape::LEFT_DEGENERATE});
    return out;
}

/// Recursive expansion of (Delta_l1 (x) I) Psi_1 ... Psi_{n-1} (Delta_ln (x) I)
/// into weighted terms tPsi_1 ... tPsi_i (Delta_{l1..ln} (x) I) Psi_{i+1} ... Psi_{n-1},
/// each tilde factor being Psi_j or P Psi_j P.
inline std::vector<DecompositionTerm> decompose_chain(const std::vector<double>& lambdas,
                                                      const std::vector<LinearMap>& psis) {
    const int n = static_cast<int>(lambdas.size());
    if (n < 1 || psis.size() + 1 != lambdas.size())
        throw std::invalid_argument("decompose_chain: need n lambdas and n-1 maps");
    for (double l : lambdas)
        if (!(l >= 0.0 && l <= 1.0)) throw std::invalid_argument("decompose_chain: lambdas in [0,1]");

    std::map<detail::SymbolicTerm, double> terms;
    terms[detail::SymbolicTerm{}] = 1.0;
    double prefix = lambdas[0];

    for (int j = 1; j < n; ++j) {
        const double mu = lambdas[j];
        std::map<detail::SymbolicTerm, double> next;
        if (prefix * mu >= 1.0) {  // identity factor, nothing to split
            for (const auto& [sym, w] : terms) next[sym] += w;
        } else {
            const auto w3 = dpd_weights(prefix, mu);
            for (const auto& [sym, w] : terms) {
                // psi_{split+1} .. psi_j move left of the depolarizing factor
                detail::SymbolicTerm plain = sym;
                plain.pconj.resize(j, false);
                plain.split = j;
                if (w * w3[0] >= 1e-15) next[plain] += w * w3[0];

                detail::SymbolicTerm conj = sym;
                conj.pconj.resize(j, true);
                conj.split = j;
                if (w * w3[1] >= 1e-15) next[conj] += w * w3[1];

                if (w * w3[2] >= 1e-15) next[sym] += w * w3[2];
            }
        }
        terms = std::move(next);
        prefix *= mu;
    }

    const LinearMap delta = detail::delta_on_first(prefix);
    std::vector<DecompositionTerm> out;
    for (const auto& [sym, w] : terms) {
        LinearMap acc = delta;
        for (int j = sym.split; j <= n - 2; ++j) acc = compose(acc, psis[j]);
        for (int j = sym.split - 1; j >= 0; --j) {
            const LinearMap factor = sym.pconj[j] ? detail::p_conjugate(psis[j]) : psis[j];
            acc = compose(factor, acc);
        }
        TermShape shape = TermShape::PLAIN;
        bool any_p = false;
        for (bool b : sym.pconj) any_p |= b;
        if (any_p)
            shape = TermShape::P_CONJUGATED;
        else if (sym.split == 0)
            shape = TermShape::LEFT_DEGENERATE;
        else if (sym.split == n - 1)
            shape = TermShape::RIGHT_DEGENERATE;
        out.push_back({w, std::move(acc), shape});
    }
    return out;
}

inline nlohmann::json decomposition_to_json(const std::vector<DecompositionTerm>& terms) {
    nlohmann::json arr = nlohmann::json::array();
    for (const auto& t : terms) {
        // digest: FNV-1a over the Choi entries rounded at 1e-12
        std::uint64_t h = 1469598103934665603ull;
        auto mix = [&h](double x) {
            const long long q = static_cast<long long>(std::llround(x * 1e12));
            const auto* bytes = reinterpret_cast<const unsigned char*>(&q);
            for (std::size_t b = 0; b < sizeof(q); ++b) {
                h ^= bytes[b];
                h *= 1099511628211ull;
            }
        };
        for (int i = 0; i < t.map.choi.rows(); ++i)
            for (int j = 0; j < t.map.choi.cols(); ++j) {
                mix(t.map.choi(i, j).real());
                mix(t.map.choi(i, j).imag());
            }
        char buf[20];
        std::snprintf(buf, sizeof(buf), "%016llx", static_cast<unsigned long long>(h));
        arr.push_back({{"weight", t.weight}, {"shape", to_string(t.shape)}, {"choi_digest", buf}});
    }
    return arr;
}

// ---------------------------------------------------------------------------
// Entanglement-annihilation probing
// ---------------------------------------------------------------------------

struct EaReport {
    bool pass = false;
    int samples = 0;
    std::optional<Matrix> witness;  // offending input state
    std::string diagnostic;
};

inline nlohmann::json to_json(const EaReport& r) {
    nlohmann::json j{{"pass", r.pass}, {"samples", r.samples}};
    if (r.witness) j["witness"] = true;
    if (!r.diagnostic.empty()) j["diagnostic"] = r.diagnostic;
    return j;
}

/// Applies a two-qubit map to sampled states (half Haar-pure, a third mixed,
/// the rest within trace distance 0.05 of the maximally entangled state) and
/// checks every renormalized output for PPT separability. Branches of trace
/// below 1e-12 are skipped.
inline EaReport ea_probe(const LinearMap& map, int samples, std::uint64_t seed) {
    if (map.dim_in != 4 || map.dim_out != 4)
        throw std::invalid_argument("ea_probe: expects a two-qubit map");
    EaReport rep;
    rep.samples = samples;
    Rng rng(seed);
    const Matrix eps = max_ent_state(2);
    for (int i = 0; i < samples; ++i) {
        Matrix rho;
        const double u = rng.uniform();
        if (u < 0.5) {
            rho = random_pure_state(4, rng);
        } else if (u < 0.8) {
            rho = random_mixed_state(4, rng);
        } else {
            const double x = rng.uniform(0.0, 0.05);
            rho = (1.0 - x) * eps + x * random_mixed_state(4, rng);
        }
        Matrix out = apply(map, rho);
        const double tr = out.trace().real();
        if (tr < 1e-12) continue;
        out *= cplx(1.0 / tr, 0.0);
        const Matrix sym = (out + out.dagger()) * 0.5;
        const double scale = 1.0 + sym.maxabs();
        if (min_eigenvalue(sym) < -1e-9 * scale) {
            rep.pass = false;
            rep.witness = rho;
            rep.diagnostic = "output not positive semidefinite";
            return rep;
        }
        if (min_pt_eigenvalue(sym, 2, 2) < -1e-9 * scale) {
            rep.pass = false;
            rep.witness = rho;
            rep.diagnostic = "entangled output";
            return rep;
        }
    }
    rep.pass = true;
    return rep;
}

/// Random separable two-qubit map with product Kraus operators A_i (x) B_i.
/// Trace-preserving: a mixture of product channels. Otherwise a random subset
/// of such a mixture's Kraus terms, modelling a post-selected branch.
inline LinearMap random_separable_map(std::uint64_t seed, bool trace_preserving) {
    Rng rng(seed);
    const int components = rng.uniform_int(1, 3);
    std::vector<double> weights(components);
    double wsum = 0.0;
    for (double& w : weights) {
        w = 0.1 + rng.uniform();
        wsum += w;
    }
    KrausSet full;
    for (int c = 0; c < components; ++c) {
        const double p = weights[c] / wsum;
        const Channel a = random_channel(2, 2, rng.raw());
        const Channel b = random_channel(2, 2, rng.raw());
        const KrausSet ka = kraus_from_choi(a.map());
        const KrausSet kb = kraus_from_choi(b.map());
        for (const Matrix& ma : ka.operators)
            for (const Matrix& mb : kb.operators) full.operators.push_back(std::sqrt(p) * kron(ma, mb));
    }
    if (!trace_preserving) {
        KrausSet subset;
        for (const Matrix& op : full.operators)
            if (rng.uniform() < 0.6) subset.operators.push_back(op);
        if (subset.operators.empty()) subset.operators.push_back(full.operators.front());
        return choi_from_kraus(subset);
    }
    return choi_from_kraus(full);
}

// ---------------------------------------------------------------------------
// Majorization and LOCC pure-state transformability
// ---------------------------------------------------------------------------

/// True iff p is majorized by q: descending partial sums of p never exceed
/// those of q, with equal totals (1e-12 slack).
inline bool majorizes(std::vector<double> p, std::vector<double> q) {
    if (p.size() != q.size()) throw std::invalid_argument("majorizes: length mismatch");
    std::sort(p.begin(), p.end(), std::greater<double>());
    std::sort(q.begin(), q.end(), std::greater<double>());
    double sp = 0.0, sq = 0.0;
    for (std::size_t k = 0; k < p.size(); ++k) {
        sp += p[k];
        sq += q[k];
        if (sp > sq + 1e-12) return false;
    }
    return std::abs(sp - sq) <= 1e-12;
}

/// Nielsen criterion: a LOCC protocol maps |alpha> to |beta> iff the reduced
/// spectrum of alpha is majorized by that of beta.
inline bool nielsen_transformable(const Matrix& alpha, const Matrix& beta, int d1, int d2) {
    auto reduced_spectrum = [&](const Matrix& rho) {
        if (std::abs((rho * rho).trace().real() - 1.0) > 1e-10)
            throw std::invalid_argument("nielsen_transformable: state not pure");
        return herm_eig((partial_trace(rho, d1, d2, Sub::first) +
                         partial_trace(rho, d1, d2, Sub::first).dagger()) *
                        0.5)
            .eigenvalues;
    };
    return majorizes(reduced_spectrum(alpha), reduced_spectrum(beta));
}

// ---------------------------------------------------------------------------
// Numerical existence check for the SO(3) alignment lemma
// ---------------------------------------------------------------------------

struct AlignmentResult {
    double residual = 1.0;
    Mat3 rotation = mat3_identity();
};

/// Searches for O in SO(3) making [O v] and the row norms of O A linearly
/// dependent; residual is 1 - cos of the angle between the two vectors.
inline AlignmentResult so3_alignment_search(const Vec3& v, const Mat3& a, std::uint64_t seed,
                                            int restarts = 12, int evals = 600) {
    auto residual = [&](const Mat3& o) {
        const Vec3 ov = o * v;
        const Mat3 oa = o * a;
        Vec3 u{std::abs(ov[0]), std::abs(ov[1]), std::abs(ov[2])};
        Vec3 w{norm(Vec3{oa[0][0], oa[0][1], oa[0][2]}), norm(Vec3{oa[1][0], oa[1][1], oa[1][2]}),
               norm(Vec3{oa[2][0], oa[2][1], oa[2][2]})};
        const double nu = norm(u), nw = norm(w);
        if (nu < 1e-14 || nw < 1e-14) return 0.0;
        return 1.0 - dot(u, w) / (nu * nw);
    };
    AlignmentResult best;
    best.residual = residual(mat3_identity());
    for (int r = 0; r < restarts; ++r) {
        Rng rng(seed + 1000003ull * static_cast<std::uint64_t>(r));
        std::vector<double> x0{rng.uniform(-3.14, 3.14), rng.uniform(-3.14, 3.14),
                               rng.uniform(-3.14, 3.14)};
        NelderMeadResult nm = nelder_mead(
            [&](const std::vector<double>& x) { return residual(so3_exp(Vec3{x[0], x[1], x[2]})); },
            x0, 0.5, evals, 1e-14);
        if (nm.f < best.residual) {
            best.residual = nm.f;
            best.rotation = so3_exp(Vec3{nm.x[0], nm.x[1], nm.x[2]});
        }
    }
    return best;
}

}  // namespace ebi
