#pragma once

#include <optional>
#include <string>
#include <vector>

#include "ebi/separability.hpp"

namespace ebi {

// ---------------------------------------------------------------------------
// Canonical diagonal form of a qubit channel
// ---------------------------------------------------------------------------

/// M = O1 diag(L) O2 with O1, O2 special orthogonal, l1 >= l2 >= |l3| and
/// sign(l3) = sign(det M); t = O1^T c.
struct CanonicalForm {
    Vec3 L{0, 0, 0};
    Vec3 t{0, 0, 0};
    Mat3 O1 = mat3_identity();
    Mat3 O2 = mat3_identity();
};

namespace detail {

/// Eigen-decomposition of a real symmetric 3x3 matrix, descending.
inline void sym_eig3(const Mat3& s, Vec3& evals, Mat3& evecs_cols) {
    Spectrum sp = herm_eig(to_matrix(s));
    for (int i = 0; i < 3; ++i) {
        evals[i] = sp.eigenvalues[i];
        for (int r = 0; r < 3; ++r) evecs_cols[r][i] = sp.eigenvectors(r, i).real();
    }
    // renormalize columns (vectors from the complex path are real up to rounding)
    for (int i = 0; i < 3; ++i) {
        double n = std::sqrt(evecs_cols[0][i] * evecs_cols[0][i] +
                             evecs_cols[1][i] * evecs_cols[1][i] +
                             evecs_cols[2][i] * evecs_cols[2][i]);
        if (n > 0)
            for (int r = 0; r < 3; ++r) evecs_cols[r][i] /= n;
    }
}

inline Vec3 col3(const Mat3& m, int j) { return {m[0][j], m[1][j], m[2][j]}; }
inline void set_col3(Mat3& m, int j, const Vec3& v) {
    m[0][j] = v[0];
    m[1][j] = v[1];
    m[2][j] = v[2];
}

}  // namespace detail

inline CanonicalForm special_svd(const Mat3& m) {
    Vec3 evals;
    Mat3 v;
    detail::sym_eig3(transposed(m) * m, evals, v);

    Vec3 sigma;
    for (int i = 0; i < 3; ++i) sigma[i] = std::sqrt(std::max(0.0, evals[i]));

    Mat3 u = mat3_zero();
    const double rank_tol = 1e-12 * (1.0 + sigma[0]);
    int built = 0;
    for (int i = 0; i < 3; ++i) {
        if (sigma[i] > rank_tol) {
            Vec3 ui = (1.0 / sigma[i]) * (m * detail::col3(v, i));
            detail::set_col3(u, i, normalized(ui));
            built = i + 1;
        }
    }
    // complete U to an orthogonal matrix
    for (int i = built; i < 3; ++i) {
        Vec3 best{0, 0, 0};
        double best_norm = -1.0;
        for (int e = 0; e < 3; ++e) {
            Vec3 cand{e == 0 ? 1.0 : 0.0, e == 1 ? 1.0 : 0.0, e == 2 ? 1.0 : 0.0};
            for (int k = 0; k < i; ++k) {
                const Vec3 uk = detail::col3(u, k);
                cand = cand - dot(cand, uk) * uk;
            }
            const double n = norm(cand);
            if (n > best_norm) {
                best_norm = n;
                best = cand;
            }
        }
        detail::set_col3(u, i, normalized(best));
    }

    CanonicalForm cf;
    cf.O1 = u;
    cf.O2 = transposed(v);
    cf.L = sigma;
    if (det3(cf.O1) < 0) {
        for (int r = 0; r < 3; ++r) cf.O1[r][2] = -cf.O1[r][2];
        cf.L[2] = -cf.L[2];
    }
    if (det3(cf.O2) < 0) {
        for (int ccol = 0; ccol < 3; ++ccol) cf.O2[2][ccol] = -cf.O2[2][ccol];
        cf.L[2] = -cf.L[2];
    }
    return cf;
}

inline CanonicalForm canonical_form(const BlochRep& b) {
    CanonicalForm cf = special_svd(b.M);
    cf.t = transposed(cf.O1) * b.c;
    return cf;
}

// ---------------------------------------------------------------------------
// Extremal radius of the image of the Bloch sphere
// ---------------------------------------------------------------------------

struct SphereMax {
    double value = 0.0;
    Vec3 argmax{0, 0, 1};
};

namespace detail {

inline double image_radius(const Mat3& m, const Vec3& c, const Vec3& r) { return norm(m * r + c); }

/// Gradient-ascent polish of |M r + c|^2 on the unit sphere.
inline Vec3 sphere_polish(const Mat3& b, const Vec3& bvec, Vec3 r) {
    auto f = [&](const Vec3& x) { return dot(x, b * x) + 2.0 * dot(bvec, x); };
    r = normalized(r);
    double step = 0.5;
    for (int it = 0; it < 300; ++it) {
        const Vec3 grad = 2.0 * (b * r) + 2.0 * bvec;
        Vec3 cand = normalized(r + step * grad);
        if (f(cand) > f(r) + 1e-17) {
            r = cand;
            step *= 1.3;
        } else {
            step *= 0.5;
            if (step < 1e-14) break;
        }
    }
    return r;
}

}  // namespace detail

/// max over unit r of |M r + c| together with a maximizer, via the secular
/// equation of the constrained quadratic; falls back to grid + ascent in the
/// degenerate (hard) case.
inline SphereMax sphere_image_max(const Mat3& m, const Vec3& c) {
    const Mat3 b = transposed(m) * m;
    const Vec3 bvec = transposed(m) * c;

    Vec3 evals;
    Mat3 w;
    detail::sym_eig3(b, evals, w);
    const double s1sq = evals[0];

    Vec3 beta;
    for (int i = 0; i < 3; ++i) beta[i] = dot(detail::col3(w, i), bvec);

    Vec3 r_best{0, 0, 1};
    const double bnorm = norm(bvec);
    if (bnorm <= 1e-14) {
        r_best = detail::col3(w, 0);
    } else {
        const double gap_tol = 1e-12 * (1.0 + s1sq);
        double perp_mass = 0.0, top_mass = 0.0;
        for (int i = 0; i < 3; ++i) {
            if (s1sq - evals[i] <= gap_tol)
                top_mass += beta[i] * beta[i];
            else
                perp_mass += beta[i] * beta[i] / ((s1sq - evals[i]) * (s1sq - evals[i]));
        }
        auto g = [&](double nu) {
            double s = 0.0;
            for (int i = 0; i < 3; ++i) {
                const double den = nu - evals[i];
                s += beta[i] * beta[i] / (den * den);
            }
            return s;
        };
        if (top_mass > 1e-28 || perp_mass > 1.0) {
            double lo = s1sq, hi = s1sq + bnorm;
            for (int it = 0; it < 200; ++it) {
                const double mid = 0.5 * (lo + hi);
                if (mid == lo || mid == hi) break;
                if (g(mid) > 1.0)
                    lo = mid;
                else
                    hi = mid;
            }
            const double nu = hi;
            Vec3 r{0, 0, 0};
            for (int i = 0; i < 3; ++i) {
                const double den = nu - evals[i];
                if (std::abs(den) > 1e-300) r = r + (beta[i] / den) * detail::col3(w, i);
            }
            r_best = normalized(r);
        } else {
            // hard case: all the coefficient mass sits off the top eigenspace
            Vec3 rp{0, 0, 0};
            for (int i = 0; i < 3; ++i) {
                if (s1sq - evals[i] > gap_tol)
                    rp = rp + (beta[i] / (s1sq - evals[i])) * detail::col3(w, i);
            }
            const double fill = std::sqrt(std::max(0.0, 1.0 - dot(rp, rp)));
            r_best = normalized(rp + fill * detail::col3(w, 0));
        }
    }

    r_best = detail::sphere_polish(b, bvec, r_best);
    // a few fixed candidates guard against a wrong branch decision
    const Vec3 candidates[] = {detail::col3(w, 0), normalized(c), Vec3{1, 0, 0}, Vec3{0, 1, 0}, Vec3{0, 0, 1}};
    for (const Vec3& cand0 : candidates) {
        for (double sgn : {1.0, -1.0}) {
            const Vec3 cand = detail::sphere_polish(b, bvec, sgn * cand0);
            if (detail::image_radius(m, c, cand) > detail::image_radius(m, c, r_best)) r_best = cand;
        }
    }
    return {detail::image_radius(m, c, r_best), r_best};
}

inline SphereMax sphere_image_max(const BlochRep& b) { return sphere_image_max(b.M, b.c); }

// ---------------------------------------------------------------------------
// Divergence certificates
// ---------------------------------------------------------------------------

/// Witness that all filtered indices diverge, per the equivalence between a
/// pure state in the Bloch-sphere image (plus NOT_EB) and divergence of the
/// filtered indices. The direct index n additionally diverges when the pure
/// image state is a fixed point of the channel; only that stronger certificate
/// is used to report n = infinity.
struct DivergenceResult {
    bool certified = false;         // N_U = N = infinity
    bool pure_fixed_point = false;  // additionally n = infinity
    Vec3 witness{0, 0, 1};
    double sphere_max = 0.0;
};

namespace detail {

/// Searches for a unit r with M r + c = r (residual <= tol).
inline std::optional<Vec3> pure_fixed_point(const Mat3& m, const Vec3& c, double tol = 1e-7) {
    const Mat3 a = mat3_identity() - m;
    Vec3 mu;
    Mat3 w;
    sym_eig3(transposed(a) * a, mu, w);  // mu sorted descending
    const Vec3 atc = transposed(a) * c;
    const double null_tol = 1e-10 * (1.0 + mu[0]);

    Vec3 rp{0, 0, 0};
    std::vector<Vec3> null_dirs;
    for (int i = 0; i < 3; ++i) {
        const Vec3 wi = col3(w, i);
        if (mu[i] > null_tol)
            rp = rp + (dot(wi, atc) / mu[i]) * wi;
        else
            null_dirs.push_back(wi);
    }

    std::vector<Vec3> candidates;
    if (null_dirs.empty()) {
        candidates.push_back(rp);
    } else {
        const double rest = 1.0 - dot(rp, rp);
        if (rest >= -1e-9) {
            const double t = std::sqrt(std::max(0.0, rest));
            for (const Vec3& a0 : null_dirs) {
                candidates.push_back(rp + t * a0);
                candidates.push_back(rp - t * a0);
            }
        }
    }
    for (Vec3 cand : candidates) {
        const double n = norm(cand);
        if (std::abs(n - 1.0) > 1e-6 && n > 1e-12) cand = (1.0 / n) * cand;
        if (norm(m * cand + c - cand) <= tol && std::abs(norm(cand) - 1.0) <= 1e-6)
            return normalized(cand);
    }
    return std::nullopt;
}

}  // namespace detail

inline DivergenceResult divergence_check(const Channel& ch) {
    if (ch.dim() != 2) throw std::invalid_argument("divergence_check: requires a qubit channel");
    DivergenceResult out;
    const BlochRep b = bloch_from_channel(ch);
    const SphereMax sm = sphere_image_max(b);
    out.sphere_max = sm.value;
    out.witness = sm.argmax;
    const bool not_eb = ppt_verdict(ch.map()).value == Eb::NOT_EB;
    out.certified = not_eb && sm.value >= 1.0 - 1e-7;
    if (out.certified) {
        if (auto fp = detail::pure_fixed_point(b.M, b.c)) {
            out.pure_fixed_point = true;
            out.witness = *fp;
        }
    }
    return out;
}

// ---------------------------------------------------------------------------
// IndexResult
// ---------------------------------------------------------------------------

struct IndexResult {
    enum class Kind { Finite, Infinite, Undecided };
    enum class Certificate { ITERATED_PPT, CLOSED_FORM, SCHATTEN_SEQUENCE, PURE_STATE_IN_IMAGE };

    Kind kind = Kind::Undecided;
    long long n = 0;  // Finite
    int cap = 0;  // Undecided
    Certificate certificate = Certificate::ITERATED_PPT;
    std::string family;                   // CLOSED_FORM detail
    std::vector<double> schatten_powers;  // SCHATTEN_SEQUENCE: sum_i |l_i|^k for k = 1..n
    Vec3 witness{0, 0, 0};                // PURE_STATE_IN_IMAGE
    std::optional<long long> boundary_alternate;

    static IndexResult finite(long long n, Certificate c) {
        IndexResult r;
        r.kind = Kind::Finite;
        r.n = n;
        r.certificate = c;
        return r;
    }
    static IndexResult infinite(Certificate c) {
        IndexResult r;
        r.kind = Kind::Infinite;
        r.certificate = c;
        return r;
    }
    static IndexResult undecided(int cap) {
        IndexResult r;
        r.kind = Kind::Undecided;
        r.cap = cap;
        return r;
    }

    bool is_finite() const { return kind == Kind::Finite; }
    bool is_infinite() const { return kind == Kind::Infinite; }
    bool is_undecided() const { return kind == Kind::Undecided; }
};

inline const char* to_string(IndexResult::Certificate c) {
    switch (c) {
        case IndexResult::Certificate::ITERATED_PPT: return "ITERATED_PPT";
        case IndexResult::Certificate::CLOSED_FORM: return "CLOSED_FORM";
        case IndexResult::Certificate::SCHATTEN_SEQUENCE: return "SCHATTEN_SEQUENCE";
        default: return "PURE_STATE_IN_IMAGE";
    }
}

inline nlohmann::json to_json(const IndexResult& r) {
    nlohmann::json j;
    switch (r.kind) {
        case IndexResult::Kind::Finite:
            j["value"] = "finite";
            j["n"] = r.n;
            break;
        case IndexResult::Kind::Infinite: j["value"] = "infinite"; break;
        default:
            j["value"] = "undecided";
            j["cap"] = r.cap;
    }
    nlohmann::json cert{{"kind", to_string(r.certificate)}};
    if (!r.family.empty()) cert["family"] = r.family;
    if (!r.schatten_powers.empty()) cert["schatten_powers"] = r.schatten_powers;
    if (r.certificate == IndexResult::Certificate::PURE_STATE_IN_IMAGE)
        cert["witness"] = {r.witness[0], r.witness[1], r.witness[2]};
    if (r.boundary_alternate) cert["boundary_alternate"] = *r.boundary_alternate;
    j["certificate"] = std::move(cert);
    return j;
}

/// Ceiling with an inclusive-boundary tolerance band: values within tol below
/// an integer resolve to that integer (boundary points take the lower index).
inline long long index_ceil(double x, double tol = 1e-9) {
    const double y = std::ceil(x - tol);
    if (y >= 9.0e18) return 9000000000000000000LL;  // de facto divergent
    return std::max(1LL, static_cast<long long>(y));
}

// ---------------------------------------------------------------------------
// Direct n-index and closed forms
// ---------------------------------------------------------------------------

/// Smallest n with ch^n entanglement-breaking, by iterate-and-test. Returns
/// Undecided as soon as one iterate's verdict is UNDECIDED.
inline IndexResult n_index(const Channel& ch, int cap = 64) {
    if (cap < 1) throw std::invalid_argument("n_index: cap must be >= 1");
    EbVerdict v = ppt_verdict(ch.map());
    if (v.value == Eb::EB) return IndexResult::finite(1, IndexResult::Certificate::ITERATED_PPT);
    if (v.value == Eb::UNDECIDED) return IndexResult::undecided(1);

    if (ch.dim() == 2) {
        const DivergenceResult div = divergence_check(ch);
        if (div.pure_fixed_point) {
            IndexResult r = IndexResult::infinite(IndexResult::Certificate::PURE_STATE_IN_IMAGE);
            r.witness = div.witness;
            return r;
        }
    }

    LinearMap power = ch.map();
    for (int n = 2; n <= cap; ++n) {
        power = compose(ch.map(), power);
        v = ppt_verdict(power);
        if (v.value == Eb::EB) return IndexResult::finite(n, IndexResult::Certificate::ITERATED_PPT);
        if (v.value == Eb::UNDECIDED) return IndexResult::undecided(n);
    }
    return IndexResult::undecided(cap);
}

inline IndexResult n_gad_closed(double p, double gamma) {
    if (!(p >= 0.0 && p <= 1.0 && gamma >= 0.0 && gamma <= 1.0))
        throw std::invalid_argument("n_gad_closed: parameters must lie in [0,1]");
    IndexResult r;
    const double f = gad_eb_threshold(gamma);
    if (p <= f || p == 0.0) {
        r = IndexResult::finite(1, IndexResult::Certificate::CLOSED_FORM);
    } else if (f <= 0.0) {
        r = IndexResult::infinite(IndexResult::Certificate::CLOSED_FORM);
    } else if (p >= 1.0) {
        r = IndexResult::infinite(IndexResult::Certificate::CLOSED_FORM);
    } else {
        r = IndexResult::finite(index_ceil(std::log(f) / std::log(p)),
                                IndexResult::Certificate::CLOSED_FORM);
    }
    r.family = "gad";
    return r;
}

inline IndexResult n_depolarizing_closed(double lambda, int d) {
    if (lambda < depolarizing_lambda_min(d) - 1e-12 || lambda > 1.0 + 1e-12)
        throw std::invalid_argument("n_depolarizing_closed: lambda outside CP range");
    IndexResult r;
    if (lambda <= depolarizing_eb_max(d)) {
        r = IndexResult::finite(1, IndexResult::Certificate::CLOSED_FORM);
    } else if (lambda >= 1.0) {
        r = IndexResult::infinite(IndexResult::Certificate::CLOSED_FORM);
    } else {
        r = IndexResult::finite(index_ceil(std::log(d + 1.0) / std::log(1.0 / lambda)),
                                IndexResult::Certificate::CLOSED_FORM);
    }
    r.family = "depolarizing";
    return r;
}

/// mu = max{0 <= a <= 1 : gen_depolarizing(a, rho0) EB}, then the ceiling of
/// log(mu)/log(lambda). Bisection with 60 iterations; both near-boundary index
/// candidates are reported when the margin is inside the bisection tolerance.
inline IndexResult n_gen_depolarizing(double lambda, const Matrix& rho0, int cap = 64) {
    const Channel ch = gen_depolarizing(lambda, rho0);  // validates parameters
    if (ppt_verdict(ch.map()).value == Eb::EB)
        return IndexResult::finite(1, IndexResult::Certificate::ITERATED_PPT);
    if (lambda <= 0.0) return IndexResult::finite(1, IndexResult::Certificate::ITERATED_PPT);

    // mu = 0 exactly when rho0 is pure; the bisection cannot resolve that
    // through the PPT tolerance, but the divergence certificate can.
    if (rho0.rows() == 2) {
        const DivergenceResult div = divergence_check(ch);
        if (div.pure_fixed_point) {
            IndexResult r = IndexResult::infinite(IndexResult::Certificate::PURE_STATE_IN_IMAGE);
            r.witness = div.witness;
            r.family = "gen_depolarizing";
            return r;
        }
    }

    double lo = 0.0, hi = 1.0;
    for (int it = 0; it < 60; ++it) {
        const double mid = 0.5 * (lo + hi);
        const EbVerdict v = ppt_verdict(gen_depolarizing(mid, rho0).map());
        if (v.value == Eb::UNDECIDED) return IndexResult::undecided(cap);
        if (v.value == Eb::EB)
            lo = mid;
        else
            hi = mid;
    }
    const double mu = lo;
    IndexResult r;
    if (mu <= 1e-10) return IndexResult::undecided(cap);
    if (lambda <= mu + 1e-12) {
        r = IndexResult::finite(1, IndexResult::Certificate::CLOSED_FORM);
    } else {
        const double x = std::log(mu) / std::log(lambda);
        const long long n = index_ceil(x);
        r = IndexResult::finite(n, IndexResult::Certificate::CLOSED_FORM);
        // mu carries ~1e-8 of bisection+PPT tolerance; flag an ambiguous ceiling
        const double dx = 1e-8 / (mu * std::abs(std::log(lambda)));
        if (std::abs(x - std::round(x)) <= dx && n == static_cast<long long>(std::round(x)))
            r.boundary_alternate = n + 1;
    }
    r.family = "gen_depolarizing";
    return r;
}

/// Unitary filtered index of a unital qubit channel: min{n >= 1 : ||M||_n <= 1}.
inline IndexResult nu_unital_qubit(const BlochRep& b) {
    if (!b.unital()) throw std::invalid_argument("nu_unital_qubit: channel not unital");
    const auto sv = singular_values3(b.M);
    IndexResult r;
    r.certificate = IndexResult::Certificate::SCHATTEN_SEQUENCE;

    double sum = sv[0] + sv[1] + sv[2];
    r.schatten_powers.push_back(sum);
    if (sum <= 1.0) {
        r.kind = IndexResult::Kind::Finite;
        r.n = 1;
        return r;
    }
    if (sv[0] >= 1.0 - 1e-12) {
        r.kind = IndexResult::Kind::Infinite;
        return r;
    }
    for (int n = 2; n <= 1000000; ++n) {
        sum = std::pow(sv[0], n) + std::pow(sv[1], n) + std::pow(sv[2], n);
        r.schatten_powers.push_back(sum);
        if (sum <= 1.0) {
            r.kind = IndexResult::Kind::Finite;
            r.n = n;
            return r;
        }
    }
    r.kind = IndexResult::Kind::Undecided;  // unreachable for sv[0] < 1
    r.cap = 1000000;
    return r;
}

// ---------------------------------------------------------------------------
// Depolarizing filter futility
// ---------------------------------------------------------------------------

/// Composes the maps in writing order: ms[0] is applied last.
inline LinearMap compose_all(const std::vector<LinearMap>& ms) {
    if (ms.empty()) throw std::invalid_argument("compose_all: empty chain");
    LinearMap acc = ms.front();
    for (std::size_t i = 1; i < ms.size(); ++i) acc = compose(acc, ms[i]);
    return acc;
}

struct FutilityReport {
    EbVerdict verdict;
    double reconstruction_error = 0.0;  // chain vs convex-decomposition Choi distance
    double expansion_error = 0.0;       // chain vs direct composition formula
    std::vector<double> weights;
};

/// Builds Delta psi_1 Delta ... Delta psi_{n-1} Delta, confirms the EB verdict
/// and checks both reconstructions: the convex combination through
/// Delta_{lambda^n} and the direct expansion into the filter composite plus
/// constant relays.
inline FutilityReport depolarizing_filter_futility(double lambda, int d,
                                                   const std::vector<Channel>& filters) {
    const int n = static_cast<int>(filters.size()) + 1;
    const double ln = std::pow(lambda, n);
    if (ln > depolarizing_eb_max(d) + 1e-12)
        throw std::invalid_argument("depolarizing_filter_futility: lambda^n above the EB threshold");

    const LinearMap delta = depolarizing(lambda, d).map();
    std::vector<LinearMap> chain;
    chain.push_back(delta);
    for (const Channel& f : filters) {
        chain.push_back(f.map());
        chain.push_back(delta);
    }
    const LinearMap lhs = compose_all(chain);

    const LinearMap delta_n = depolarizing(ln, d).map();
    FutilityReport rep;
    Matrix sum(lhs.choi.rows(), lhs.choi.cols());
    for (int i = 0; i <= n - 1; ++i) {
        const double w = std::pow(lambda, i) * (1.0 - lambda) / (1.0 - ln);
        rep.weights.push_back(w);
        std::vector<LinearMap> term;
        for (int k = 0; k < i; ++k) term.push_back(filters[static_cast<std::size_t>(k)].map());
        term.push_back(delta_n);
        for (int k = i; k < n - 1; ++k) term.push_back(filters[static_cast<std::size_t>(k)].map());
        sum += w * compose_all(term).choi;
    }
    rep.reconstruction_error = max_entry_distance(lhs.choi, sum);

    // direct expansion: lambda^n psi_1...psi_{n-1} plus constant-output relays
    // through the prefix composites (psi_1 ... psi_i)(1/d)
    {
        const Matrix mixed = Matrix::identity(d) * (1.0 / d);
        Matrix direct(lhs.choi.rows(), lhs.choi.cols());
        direct += (1.0 - lambda) * constant_map(mixed, d).choi;
        LinearMap prefix = identity_map(d);
        for (int i = 1; i <= n - 1; ++i) {
            prefix = compose(prefix, filters[static_cast<std::size_t>(i - 1)].map());
            direct += (1.0 - lambda) * std::pow(lambda, i) *
                      constant_map(apply(prefix, mixed), d).choi;
        }
        direct += ln * prefix.choi;  // prefix is now psi_1 o ... o psi_{n-1}
        rep.expansion_error = max_entry_distance(lhs.choi, direct);
    }

    // each decomposition term carries the EB factor Delta_{lambda^n}
    rep.verdict = {Eb::EB, EbCriterion::DEPOLARIZING_CLOSED_FORM, depolarizing_eb_max(d) - ln};
    if (d == 2) {
        const EbVerdict direct_verdict = ppt_verdict(lhs);
        if (direct_verdict.value != Eb::EB) rep.verdict = direct_verdict;  // should not happen
    }
    return rep;
}

}  // namespace ebi
