#pragma once

#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "ebi/protocols.hpp"
#include "ebi/threading.hpp"

namespace ebi {

struct CheckResult {
    std::string name;
    bool pass = false;
    std::string detail;
};

inline nlohmann::json to_json(const std::vector<CheckResult>& checks) {
    nlohmann::json failures = nlohmann::json::array();
    int passed = 0;
    for (const auto& c : checks) {
        if (c.pass)
            ++passed;
        else
            failures.push_back({{"name", c.name}, {"detail", c.detail}});
    }
    return {{"checks", static_cast<int>(checks.size())}, {"passed", passed}, {"failures", failures}};
}

// ---------------------------------------------------------------------------
// Random-channel helpers shared by the suites and tests
// ---------------------------------------------------------------------------

inline Channel random_qubit_channel(Rng& rng) { return random_channel(2, 4, rng.raw()); }

/// Random valid unital qubit channel, uniform over canonical L inside the CP
/// tetrahedron with random SO(3) frames.
inline Channel random_unital_qubit_channel(Rng& rng) {
    while (true) {
        Vec3 l{rng.uniform(-1.0, 1.0), rng.uniform(-1.0, 1.0), rng.uniform(-1.0, 1.0)};
        const Mat3 m = random_so3(rng) * mat3_diag(l[0], l[1], l[2]) * random_so3(rng);
        if (auto ch = Channel::try_make(map_from_bloch(m, Vec3{0, 0, 0}))) return *ch;
    }
}

namespace verify_detail {

struct Harness {
    std::vector<CheckResult> results;

    void add(const std::string& name, bool pass, const std::string& detail = "") {
        results.push_back({name, pass, detail});
    }

    template <typename F>
    void sampled(const std::string& name, int trials, F&& body) {
        double worst = 0.0;
        int bad = 0;
        std::string first_bad;
        for (int t = 0; t < trials; ++t) {
            const double violation = body(t);  // <= 0 means pass
            if (violation > worst) worst = violation;
            if (violation > 0.0 && bad++ == 0) {
                std::ostringstream os;
                os << "violation " << violation << " at trial " << t;
                first_bad = os.str();
            }
        }
        std::ostringstream os;
        if (bad)
            os << bad << "/" << trials << " violations; " << first_bad;
        else
            os << trials << " trials, worst slack " << worst;
        add(name, bad == 0, os.str());
    }
};

}  // namespace verify_detail

// ---------------------------------------------------------------------------
// Suites
// ---------------------------------------------------------------------------

inline std::vector<CheckResult> verify_algebra(std::uint64_t seed,
                                               const std::optional<LinearMap>& fixture = {}) {
    verify_detail::Harness h;
    Rng rng(seed);

    h.sampled("eig_reconstruction_orthonormality", 1000, [&](int) {
        const int n = rng.uniform_int(2, 64);
        Matrix a = rng.ginibre(n, n);
        a = (a + a.dagger()) * 0.5;
        const Spectrum s = herm_eig(a);
        Matrix rec(n, n);
        for (int k = 0; k < n; ++k)
            for (int i = 0; i < n; ++i)
                for (int j = 0; j < n; ++j)
                    rec(i, j) += s.eigenvalues[k] * s.eigenvectors(i, k) * std::conj(s.eigenvectors(j, k));
        const double drec = max_entry_distance(rec, a) - 1e-10 * (1.0 + a.maxabs());
        const double dorth =
            max_entry_distance(s.eigenvectors.dagger() * s.eigenvectors, Matrix::identity(n)) - 1e-10;
        return std::max(drec, dorth);
    });

    h.sampled("schatten_hoelder", 400, [&](int t) {
        const int n = rng.uniform_int(2, 8);
        const Matrix a = rng.ginibre(n, n), b = rng.ginibre(n, n);
        const double p = (t % 3 == 0) ? 1.0 : (t % 3 == 1 ? 2.0 : 3.0);
        const double r = (t % 2 == 0) ? 2.0 : 3.0;
        const double s = r / (r - 1.0);
        const double lhs = schatten_norm(a * b, p);
        const double rhs = schatten_norm(a, r * p) * schatten_norm(b, s * p);
        return lhs - rhs - 1e-9 * (1.0 + rhs);
    });

    h.sampled("schatten_diagonal_power", 300, [&](int) {
        const int n = rng.uniform_int(2, 6);
        std::vector<double> d(n);
        for (double& x : d) x = rng.uniform(-1.0, 1.0);
        const Matrix l = Matrix::diag(d);
        const double p = rng.uniform(1.0, 3.0);
        const int k = rng.uniform_int(1, 5);
        Matrix lk = Matrix::identity(n);
        for (int i = 0; i < k; ++i) lk = lk * l;
        return std::abs(schatten_norm(l, k * p) - std::pow(schatten_norm(lk, p), 1.0 / k)) - 1e-10;
    });

    {
        Matrix m = rng.ginibre(6, 6);
        const Matrix once = partial_transpose(m, 2, 3, Sub::second);
        const Matrix twice = partial_transpose(once, 2, 3, Sub::second);
        bool exact = true;
        for (int i = 0; i < 6 && exact; ++i)
            for (int j = 0; j < 6; ++j)
                if (twice(i, j) != m(i, j)) {
                    exact = false;
                    break;
                }
        h.add("partial_transpose_involution_bitexact", exact);
    }

    h.sampled("compose_associativity", 100, [&](int t) {
        const int d = (t % 2) ? 2 : 3;
        const Channel f = random_channel(d, d * d, rng.raw());
        const Channel g = random_channel(d, d * d, rng.raw());
        const Channel k = random_channel(d, d * d, rng.raw());
        const LinearMap lhs = compose(compose(f.map(), g.map()), k.map());
        const LinearMap rhs = compose(f.map(), compose(g.map(), k.map()));
        return max_entry_distance(lhs.choi, rhs.choi) - 1e-11;
    });

    h.sampled("bloch_composition_rule", 200, [&](int) {
        const Channel f = random_qubit_channel(rng), g = random_qubit_channel(rng);
        const BlochRep bf = bloch_from_channel(f), bg = bloch_from_channel(g);
        const BlochRep bc = bloch_from_map(compose(f.map(), g.map()));
        const Mat3 m = bf.M * bg.M;
        const Vec3 c = bf.M * bg.c + bf.c;
        return std::max(mat3_maxabs(bc.M - m), norm(bc.c - c)) - 1e-10;
    });

    h.sampled("gad_composition_law", 100, [&](int) {
        const double p1 = rng.uniform(), g1 = rng.uniform();
        const double p2 = rng.uniform(), g2 = rng.uniform();
        const double p3 = p1 * p2;
        if (1.0 - p3 < 1e-12) return 0.0;
        const double g3 = (p1 * (1.0 - p2) * g2 + (1.0 - p1) * g1) / (1.0 - p3);
        return max_entry_distance(compose(gad(p1, g1), gad(p2, g2)).choi(), gad(p3, g3).choi()) - 1e-10;
    });

    h.sampled("unitary_conjugation_validates", 100, [&](int) {
        const Channel ch = random_qubit_channel(rng);
        const Matrix u = random_unitary_matrix(2, rng.raw());
        const LinearMap conjugated = compose(
            unitary_channel(u).map(), compose(ch.map(), unitary_channel(u.dagger()).map()));
        return Channel::try_make(conjugated) ? 0.0 : 1.0;
    });

    h.sampled("choi_linearity", 50, [&](int) {
        const int d = 3;
        const Channel ch = random_channel(d, d * d, rng.raw());
        Matrix x = rng.ginibre(d, d);
        Matrix sum(d, d);
        for (int i = 0; i < d; ++i)
            for (int j = 0; j < d; ++j) sum += x(i, j) * apply(ch.map(), Matrix::unit(d, i, j));
        return max_entry_distance(apply(ch.map(), x), sum) - 1e-10;
    });

    if (fixture) {
        const ValidationReport rep = validate(*fixture);
        h.add("fixture_channel_cp", rep.cp,
              "min Choi eigenvalue " + std::to_string(rep.min_choi_eig));
        h.add("fixture_channel_tp", rep.tp, "defect " + std::to_string(rep.tp_defect));
        if (rep.cp) {
            const KrausSet k = kraus_from_choi(*fixture);
            h.add("fixture_kraus_roundtrip",
                  max_entry_distance(choi_from_kraus(k).choi, fixture->choi) <= 1e-9);
        }
    }
    return h.results;
}

inline std::vector<CheckResult> verify_eb_criteria(std::uint64_t seed) {
    verify_detail::Harness h;
    Rng rng(seed);

    h.sampled("eb_absorption", 200, [&](int t) {
        const Channel eb = depolarizing(rng.uniform(0.0, 1.0 / 3.0), 2);
        const Channel any = random_qubit_channel(rng);
        const LinearMap chain = (t % 2) ? compose(eb.map(), any.map()) : compose(any.map(), eb.map());
        return ppt_verdict(chain).value == Eb::EB ? 0.0 : 1.0;
    });

    h.sampled("eb_convexity", 200, [&](int) {
        const Channel a = depolarizing(rng.uniform(-1.0 / 3.0, 1.0 / 3.0), 2);
        const Channel b = gad(rng.uniform(0.0, 0.17), 0.5);
        const double w = rng.uniform();
        const LinearMap mix(2, 2, w * a.choi() + (1.0 - w) * b.choi());
        return ppt_verdict(mix).value == Eb::EB ? 0.0 : 1.0;
    });

    h.sampled("sufficient_implies_ppt", 1000, [&](int) {
        Channel ch = random_qubit_channel(rng);
        // shrink towards the EB region so the criterion fires for many draws
        const Channel shrunk = compose(depolarizing(rng.uniform(), 2), ch);
        const BlochRep b = bloch_from_channel(shrunk);
        if (eb_sufficient_qubit(b).value != Eb::EB) return 0.0;
        return ppt_verdict(shrunk.map()).value == Eb::EB ? 0.0 : 1.0;
    });

    h.sampled("unital_matches_ppt_exactly", 1000, [&](int) {
        const Channel ch = random_unital_qubit_channel(rng);
        const Eb lhs = eb_unital_qubit(bloch_from_channel(ch)).value;
        const Eb rhs = ppt_verdict(ch.map()).value;
        return lhs == rhs ? 0.0 : 1.0;
    });

    return h.results;
}

inline std::vector<CheckResult> verify_indices(std::uint64_t seed) {
    verify_detail::Harness h;
    Rng rng(seed);

    h.sampled("special_svd_roundtrip", 1000, [&](int) {
        Mat3 m;
        for (int i = 0; i < 3; ++i)
            for (int j = 0; j < 3; ++j) m[i][j] = rng.normal();
        const CanonicalForm cf = special_svd(m);
        const double rec = mat3_maxabs(cf.O1 * mat3_diag(cf.L[0], cf.L[1], cf.L[2]) * cf.O2 - m);
        const double dets = std::max(std::abs(det3(cf.O1) - 1.0), std::abs(det3(cf.O2) - 1.0));
        return std::max(rec - 1e-10, dets - 1e-12);
    });

    h.sampled("n_unitary_conjugation_invariance", 60, [&](int) {
        const Channel ch = compose(depolarizing(rng.uniform(0.3, 0.75), 2), random_qubit_channel(rng));
        const IndexResult base = n_index(ch, 8);
        if (!base.is_finite() || base.n > 6) return 0.0;
        const Matrix u = random_unitary_matrix(2, rng.raw());
        const LinearMap conj = compose(unitary_channel(u).map(),
                                       compose(ch.map(), unitary_channel(u.dagger()).map()));
        const IndexResult rot = n_index(Channel::trusted(conj), 8);
        return (rot.is_finite() && rot.n == base.n) ? 0.0 : 1.0;
    });

    h.sampled("nu_unital_upper_bounds_n", 1000, [&](int) {
        const Channel ch = random_unital_qubit_channel(rng);
        const IndexResult nu = nu_unital_qubit(bloch_from_channel(ch));
        if (nu.is_infinite()) return 0.0;
        const IndexResult n = n_index(ch, nu.n + 1);
        return (n.is_finite() && n.n <= nu.n) ? 0.0 : 1.0;
    });

    h.sampled("chain_norm_bound", 10000, [&](int) {
        Vec3 l;
        while (true) {
            l = Vec3{rng.uniform(-1, 1), rng.uniform(-1, 1), rng.uniform(-1, 1)};
            if (std::abs(l[0] + l[1]) <= 1.0 + l[2] + 1e-12 &&
                std::abs(l[0] - l[1]) <= 1.0 - l[2] + 1e-12)
                break;
        }
        const Mat3 lm = mat3_diag(l[0], l[1], l[2]);
        const int n = rng.uniform_int(1, 4);
        Mat3 prod = lm;
        for (int i = 0; i < n; ++i) prod = prod * random_so3(rng) * lm;
        Mat3 lpow = lm;
        for (int i = 0; i < n; ++i) lpow = lpow * lm;
        return trace_norm3(prod) - trace_norm3(lpow) - 1e-9;
    });

    h.sampled("gad_closed_form_vs_oracle", 441, [&](int t) {
        const double gamma = (t / 21) / 20.0;
        const double p = (t % 21) / 20.0;
        const IndexResult closed = n_gad_closed(p, gamma);
        const IndexResult oracle = n_index(gad(p, gamma), 16);
        if (oracle.is_undecided()) return 0.0;
        if (closed.is_infinite() || oracle.is_infinite())
            return closed.is_infinite() == oracle.is_infinite() ? 0.0 : 1.0;
        if (closed.n == oracle.n) return 0.0;
        // near-threshold points may legitimately differ by one
        const double f = gad_eb_threshold(gamma);
        if (f > 0 && p > 0 && p < 1) {
            const double x = std::log(f) / std::log(p);
            if (std::abs(x - std::round(x)) < 1e-7) return std::abs(closed.n - oracle.n) <= 1 ? 0.0 : 1.0;
        }
        return 1.0;
    });

    h.sampled("depolarizing_closed_form_vs_oracle", 200, [&](int t) {
        const int d = (t % 2) ? 2 : 3;
        const double lambda = depolarizing_lambda_min(d) +
                              (1.0 - 0.02 - depolarizing_lambda_min(d)) * rng.uniform();
        const IndexResult closed = n_depolarizing_closed(lambda, d);
        const IndexResult oracle = n_index(depolarizing(lambda, d), 40);
        if (oracle.is_undecided() || closed.is_infinite()) return 0.0;
        return closed.n == oracle.n ? 0.0 : 1.0;
    });

    h.sampled("lemma_final_inequality", 10000, [&](int) {
        Mat3 k;
        for (int i = 0; i < 3; ++i)
            for (int j = 0; j < 3; ++j) k[i][j] = rng.normal();
        const BlochRep b = bloch_from_channel(random_qubit_channel(rng));
        const double lhs = norm(k * b.c) + frobenius3(k * b.M);
        return lhs - frobenius3(k) - 1e-9;
    });

    h.sampled("nu2_implies_filtered_chain_eb", 120, [&](int) {
        Channel ch = random_unital_qubit_channel(rng);
        BlochRep b = bloch_from_channel(ch);
        for (int tries = 0; tries < 200; ++tries) {
            const IndexResult nu = nu_unital_qubit(b);
            if (nu.is_finite() && nu.n == 2) break;
            ch = random_unital_qubit_channel(rng);
            b = bloch_from_channel(ch);
        }
        if (!(nu_unital_qubit(b).is_finite() && nu_unital_qubit(b).n == 2)) return 0.0;
        const Channel psi = random_qubit_channel(rng);
        const LinearMap chain = compose(ch.map(), compose(psi.map(), ch.map()));
        return ppt_verdict(chain).value == Eb::EB ? 0.0 : 1.0;
    });

    return h.results;
}

inline std::vector<CheckResult> verify_filters(std::uint64_t seed) {
    verify_detail::Harness h;
    Rng rng(seed);

    h.sampled("negativity_iff_not_eb", 400, [&](int t) {
        LinearMap m = (t % 3 == 0) ? depolarizing(rng.uniform(-1.0 / 3.0, 1.0), 2).map()
                                   : (t % 3 == 1 ? gad(rng.uniform(), rng.uniform()).map()
                                                 : random_qubit_channel(rng).map());
        const bool not_eb = ppt_verdict(m).value == Eb::NOT_EB;
        const double scale = 1.0 + m.choi.maxabs();
        const Matrix pt = partial_transpose(m.choi, 2, 2, Sub::second);
        double neg = 0.0;
        for (double lam : herm_eig((pt + pt.dagger()) * 0.5).eigenvalues)
            if (lam < -1e-9 * scale) neg -= lam;
        return (neg > 0.0) == not_eb ? 0.0 : 1.0;
    });

    {
        bool ok = true;
        std::string detail;
        for (int d : {3, 4})
            for (int k = 0; k <= 5 && ok; ++k) {
                const MinorCheck mc = choi_minor_check(counterexample_chain(d, k));
                if (!(mc.matches && mc.not_eb)) {
                    ok = false;
                    detail = "d=" + std::to_string(d) + " k=" + std::to_string(k);
                }
            }
        h.add("counterexample_minor_survival", ok, detail);
    }

    {
        const Channel noise = depolarizing(0.7, 2);
        const SearchReport a = unitary_filter_search(noise, 2, 4, seed, 300);
        const SearchReport b = unitary_filter_search(noise, 2, 4, seed, 300);
        h.add("search_determinism", to_json(a).dump() == to_json(b).dump());
    }

    h.sampled("single_unitary_within_nu", 12, [&](int) {
        const Channel ch = random_unital_qubit_channel(rng);
        const IndexResult nu = nu_unital_qubit(bloch_from_channel(ch));
        if (!nu.is_finite()) return 0.0;
        const UnitaryIndexMax um = single_unitary_index_max(ch, 3, nu.n + 2);
        return (!um.infinite && um.best_n <= nu.n) ? 0.0 : 1.0;
    });

    {
        const WernerFutilityReport rep = werner_unitary_futility(0.5, 3, 25, seed);
        h.add("werner_unitary_futility", rep.identity_holds && rep.chains_eb,
              "identity deviation " + std::to_string(rep.worst_identity_dev));
    }

    return h.results;
}

inline std::vector<CheckResult> verify_protocols(std::uint64_t seed) {
    verify_detail::Harness h;
    Rng rng(seed);

    h.sampled("stinespring_identity", 10, [&](int) {
        const Channel noise = random_qubit_channel(rng);
        const Channel f = random_qubit_channel(rng);
        return stinespring_identity_check(noise, {f}).holds ? 0.0 : 1.0;
    });

    h.sampled("dpd_reconstruction", 60, [&](int) {
        const double l = rng.uniform(), m = rng.uniform();
        const LinearMap psi = random_separable_map(rng.raw(), true);
        const auto terms = decompose_dpd(l, m, psi);
        double wsum = 0.0;
        Matrix sum(16, 16);
        for (const auto& t : terms) {
            if (t.weight < -1e-12 || t.weight > 1.0 + 1e-12) return 1.0;
            wsum += t.weight;
            sum += t.weight * t.map.choi;
        }
        const LinearMap chain = compose(
            detail::delta_on_first(l), compose(psi, detail::delta_on_first(m)));
        return std::max(std::abs(wsum - 1.0) - 1e-12,
                        max_entry_distance(sum, chain.choi) - 1e-10);
    });

    h.sampled("chain_weights_boundaries", 50, [&](int t) {
        std::vector<double> ls(3);
        for (double& l : ls) {
            const double u = rng.uniform();
            l = (t % 5 == 0) ? (u < 0.5 ? 0.0 : 1.0) : u;
        }
        std::vector<LinearMap> psis{random_separable_map(rng.raw(), true),
                                    random_separable_map(rng.raw(), true)};
        const auto terms = decompose_chain(ls, psis);
        double wsum = 0.0;
        for (const auto& tm : terms) {
            if (tm.weight < -1e-12 || tm.weight > 1.0 + 1e-12) return 1.0;
            wsum += tm.weight;
        }
        return std::abs(wsum - 1.0) - 1e-10;
    });

    h.sampled("p_sandwich_preserves_ea", 25, [&](int) {
        // EA instance: (EB (x) I) followed by a separable map
        const LinearMap ea = compose(random_separable_map(rng.raw(), true),
                                     tensor(depolarizing(rng.uniform(0.0, 1.0 / 3.0), 2).map(),
                                            identity_map(2)));
        const LinearMap p = reduction_map();
        const EaReport rep = ea_probe(compose(p, ea), 40, rng.raw());
        return rep.pass ? 0.0 : 1.0;
    });

    h.sampled("separable_after_ea", 25, [&](int) {
        const LinearMap ea = tensor(depolarizing(rng.uniform(0.0, 1.0 / 3.0), 2).map(), identity_map(2));
        const LinearMap chained = compose(random_separable_map(rng.raw(), rng.uniform() < 0.5), ea);
        const EaReport rep = ea_probe(chained, 40, rng.raw());
        return rep.pass ? 0.0 : 1.0;
    });

    h.sampled("positive_precomposition_preserves_ea", 25, [&](int t) {
        const LinearMap ea = tensor(depolarizing(rng.uniform(0.0, 1.0 / 3.0), 2).map(), identity_map(2));
        // positive inputs: global transposition (= T (x) T) or a unitary conjugation
        const LinearMap positive = (t % 2) ? transposition(4)
                                           : unitary_channel(haar_unitary(4, rng)).map();
        const EaReport rep = ea_probe(compose(ea, positive), 40, rng.raw());
        return rep.pass ? 0.0 : 1.0;
    });

    h.sampled("depolarizing_chain_annihilation", 150, [&](int) {
        std::vector<double> ls(3);
        while (true) {
            for (double& l : ls) l = rng.uniform();
            if (ls[0] * ls[1] * ls[2] <= 1.0 / 3.0) break;
        }
        Matrix s = superop_from_choi(detail::delta_on_first(ls[0]));
        for (int i = 1; i < 3; ++i)
            s = s * superop_from_choi(random_separable_map(rng.raw(), rng.uniform() < 0.5)) *
                superop_from_choi(detail::delta_on_first(ls[i]));
        const EaReport rep = ea_probe(map_from_superop(s, 4, 4), 25, rng.raw());
        return rep.pass ? 0.0 : 1.0;
    });

    h.sampled("so3_alignment_existence", 15, [&](int) {
        Vec3 v{rng.normal(), rng.normal(), rng.normal()};
        Mat3 a;
        for (int i = 0; i < 3; ++i)
            for (int j = 0; j < 3; ++j) a[i][j] = rng.normal();
        return so3_alignment_search(v, a, rng.raw()).residual - 1e-6;
    });

    h.sampled("majorization_permutation_invariance", 100, [&](int) {
        std::vector<double> p(4), q(4);
        double sp = 0, sq = 0;
        for (auto& x : p) sp += (x = rng.uniform());
        for (auto& x : q) sq += (x = rng.uniform());
        for (double& x : p) x /= sp;
        for (double& x : q) x /= sq;
        const bool base = majorizes(p, q);
        const std::vector<double> pp{p[2], p[0], p[3], p[1]}, qq{q[1], q[3], q[0], q[2]};
        return majorizes(pp, qq) == base ? 0.0 : 1.0;
    });

    return h.results;
}

inline std::vector<CheckResult> run_suite(const std::string& suite, std::uint64_t seed,
                                          const std::optional<LinearMap>& fixture = {}) {
    std::vector<CheckResult> out;
    auto append = [&](std::vector<CheckResult> v) {
        for (auto& c : v) out.push_back(std::move(c));
    };
    if (suite == "algebra" || suite == "all") append(verify_algebra(seed, fixture));
    if (suite == "eb-criteria" || suite == "all") append(verify_eb_criteria(seed));
    if (suite == "indices" || suite == "all") append(verify_indices(seed));
    if (suite == "filters" || suite == "all") append(verify_filters(seed));
    if (suite == "protocols" || suite == "all") append(verify_protocols(seed));
    if (out.empty()) throw std::invalid_argument("run_suite: unknown suite '" + suite + "'");
    return out;
}

}  // namespace ebi
