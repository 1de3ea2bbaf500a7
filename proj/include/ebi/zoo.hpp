#pragma once

#include <variant>

#include "ebi/bloch.hpp"
#include "ebi/linear_map.hpp"
#include "ebi/rng.hpp"
#include "json.hpp"

namespace ebi {

// ---------------------------------------------------------------------------
// Named channel families
// ---------------------------------------------------------------------------

/// Generalized amplitude damping on a qubit; p is the retention strength,
/// gamma the environment temperature parameter.
inline Channel gad(double p, double gamma) {
    if (!(p >= 0.0 && p <= 1.0 && gamma >= 0.0 && gamma <= 1.0))
        throw std::invalid_argument("gad: parameters must lie in [0,1]");
    const double sp = std::sqrt(p);
    LinearMap m = map_from_action(2, 2, [&](const Matrix& x) {
        const cplx a = x(0, 0), b = x(0, 1), bp = x(1, 0), cc = x(1, 1);
        Matrix out(2, 2);
        out(0, 0) = p * a + gamma * (1.0 - p) * (a + cc);
        out(0, 1) = sp * b;
        out(1, 0) = sp * bp;
        out(1, 1) = -p * a + (1.0 - (1.0 - p) * gamma) * (a + cc);
        return out;
    });
    return Channel::make(std::move(m));
}

inline double depolarizing_lambda_min(int d) { return -1.0 / (d * d - 1); }

inline Channel depolarizing(double lambda, int d) {
    if (d < 2) throw std::invalid_argument("depolarizing: d must be >= 2");
    if (lambda < depolarizing_lambda_min(d) - 1e-12 || lambda > 1.0 + 1e-12)
        throw std::invalid_argument("depolarizing: lambda outside CP range");
    Matrix choi = lambda * max_ent_state(d) + ((1.0 - lambda) / (d * d)) * Matrix::identity(d * d);
    return Channel::make(LinearMap(d, d, std::move(choi)));
}

inline Channel gen_depolarizing(double lambda, const Matrix& rho0) {
    if (!rho0.square()) throw std::invalid_argument("gen_depolarizing: rho0 not square");
    const int d = rho0.rows();
    if (std::abs(rho0.trace().real() - 1.0) > 1e-9 || !is_hermitian(rho0, 1e-9))
        throw std::invalid_argument("gen_depolarizing: rho0 not a density matrix");
    Matrix choi = lambda * max_ent_state(d) +
                  ((1.0 - lambda) / d) * kron(rho0, Matrix::identity(d));
    return Channel::make(LinearMap(d, d, std::move(choi)));
}

inline double werner_eta_min(int d) { return -1.0 / (d + 1); }
inline double werner_eta_max(int d) { return 1.0 / (d - 1); }

/// Werner channel V_eta = -eta T + (1+eta) (1/d) Tr; its Choi is the Werner state.
inline Channel werner(double eta, int d) {
    if (d < 2) throw std::invalid_argument("werner: d must be >= 2");
    if (eta < werner_eta_min(d) - 1e-12 || eta > werner_eta_max(d) + 1e-12)
        throw std::invalid_argument("werner: eta outside CP range");
    Matrix choi = (-eta / d) * swap_operator(d) +
                  ((1.0 + eta) / (d * d)) * Matrix::identity(d * d);
    return Channel::make(LinearMap(d, d, std::move(choi)));
}

inline KrausSet cex_filter_kraus(int d) {
    if (d < 3) throw std::invalid_argument("cex_filter: requires d >= 3");
    KrausSet k;
    Matrix x01(d, d);
    x01(0, 1) = 1.0;
    x01(1, 0) = 1.0;
    k.operators.push_back(std::move(x01));
    for (int i = 2; i < d; ++i) k.operators.push_back(Matrix::unit(d, 0, i));
    return k;
}

/// Block-form filter from the d >= 3 counterexample: conjugates the top-left
/// 2x2 block by Pauli X and funnels the bottom block's population into |0><0|.
inline Channel cex_filter(int d) {
    return Channel::make(choi_from_kraus(cex_filter_kraus(d)));
}

/// Transposition map (not CP).
inline LinearMap transposition(int d) {
    return LinearMap(d, d, (1.0 / d) * swap_operator(d));
}

/// Two-qubit reduction map P = 1 (x) Tr_1 - I (trace preserving, not positive).
inline LinearMap reduction_map() {
    return map_from_action(4, 4, [](const Matrix& x) {
        Matrix out = kron(Matrix::identity(2), partial_trace(x, 2, 2, Sub::first));
        out -= x;
        return out;
    });
}

/// Completely depolarizing channel X -> |0><0| Tr X on dimension d.
inline Channel completely_depolarizing_to_ground(int d) {
    Matrix choi = kron(Matrix::unit(d, 0, 0), Matrix::identity(d) * (1.0 / d));
    return Channel::trusted(LinearMap(d, d, std::move(choi)));
}

/// Conjugation by the second Pauli matrix.
inline Channel y_conjugation() { return unitary_channel(pauli(2)); }

// ---------------------------------------------------------------------------
// Seeded random generators
// ---------------------------------------------------------------------------

inline Matrix random_unitary_matrix(int d, std::uint64_t seed) {
    Rng rng(seed);
    return haar_unitary(d, rng);
}

inline Channel random_unitary(int d, std::uint64_t seed) {
    return unitary_channel(random_unitary_matrix(d, seed));
}

/// Random isometry into system (x) environment followed by the environment
/// trace-out. Environment dimension defaults to d^2.
inline Channel random_channel(int d, int env_dim, std::uint64_t seed) {
    if (env_dim < 1) throw std::invalid_argument("random_channel: env_dim must be >= 1");
    Rng rng(seed);
    const Matrix v = orthonormalize_columns(rng.ginibre(d * env_dim, d));
    KrausSet k;
    for (int e = 0; e < env_dim; ++e) {
        Matrix op(d, d);
        for (int a = 0; a < d; ++a)
            for (int j = 0; j < d; ++j) op(a, j) = v(a * env_dim + e, j);
        k.operators.push_back(std::move(op));
    }
    return Channel::make(choi_from_kraus(k));
}

inline Channel random_channel(int d, std::uint64_t seed) { return random_channel(d, d * d, seed); }

inline Mat3 random_so3(std::uint64_t seed) {
    Rng rng(seed);
    const Vec3 axis = rng.unit_vec3();
    const double angle = rng.uniform(0.0, 2.0 * 3.14159265358979323846);
    return so3_exp(angle * axis);
}

inline Mat3 random_so3(Rng& rng) {
    const Vec3 axis = rng.unit_vec3();
    const double angle = rng.uniform(0.0, 2.0 * 3.14159265358979323846);
    return so3_exp(angle * axis);
}

// ---------------------------------------------------------------------------
// FamilyTag: discriminated family descriptor used by the CLI and fixtures
// ---------------------------------------------------------------------------

struct GadTag { double p, gamma; };
struct DepolarizingTag { double lambda; int d; };
struct GenDepolarizingTag { double lambda; Matrix rho0; };
struct WernerTag { double eta; int d; };
struct CexFilterTag { int d; };
struct ReductionTag {};
struct TranspositionTag { int d; };
struct UnitaryTag { Matrix u; };
struct RandomTag { int d; int env_dim; std::uint64_t seed; };

using FamilyTag = std::variant<GadTag, DepolarizingTag, GenDepolarizingTag, WernerTag,
                               CexFilterTag, ReductionTag, TranspositionTag, UnitaryTag, RandomTag>;

inline LinearMap realize(const FamilyTag& tag) {
    return std::visit(
        [](const auto& t) -> LinearMap {
            using T = std::decay_t<decltype(t)>;
            if constexpr (std::is_same_v<T, GadTag>) return gad(t.p, t.gamma).map();
            else if constexpr (std::is_same_v<T, DepolarizingTag>) return depolarizing(t.lambda, t.d).map();
            else if constexpr (std::is_same_v<T, GenDepolarizingTag>) return gen_depolarizing(t.lambda, t.rho0).map();
            else if constexpr (std::is_same_v<T, WernerTag>) return werner(t.eta, t.d).map();
            else if constexpr (std::is_same_v<T, CexFilterTag>) return cex_filter(t.d).map();
            else if constexpr (std::is_same_v<T, ReductionTag>) return reduction_map();
            else if constexpr (std::is_same_v<T, TranspositionTag>) return transposition(t.d);
            else if constexpr (std::is_same_v<T, UnitaryTag>) return unitary_channel(t.u).map();
            else return random_channel(t.d, t.env_dim, t.seed).map();
        },
        tag);
}

namespace detail {
inline nlohmann::json matrix_to_json_pair(const Matrix& m, const char* re_key, const char* im_key) {
    nlohmann::json re = nlohmann::json::array(), im = nlohmann::json::array();
    for (int i = 0; i < m.rows(); ++i) {
        nlohmann::json rrow = nlohmann::json::array(), irow = nlohmann::json::array();
        for (int j = 0; j < m.cols(); ++j) {
            rrow.push_back(m(i, j).real());
            irow.push_back(m(i, j).imag());
        }
        re.push_back(std::move(rrow));
        im.push_back(std::move(irow));
    }
    return nlohmann::json{{re_key, std::move(re)}, {im_key, std::move(im)}};
}

inline Matrix matrix_from_json_pair(const nlohmann::json& j, const char* re_key, const char* im_key) {
    const auto& re = j.at(re_key);
    const auto& im = j.at(im_key);
    const int rows = static_cast<int>(re.size());
    const int cols = rows > 0 ? static_cast<int>(re[0].size()) : 0;
    Matrix m(rows, cols);
    for (int i = 0; i < rows; ++i)
        for (int k = 0; k < cols; ++k)
            m(i, k) = cplx(re[i][k].get<double>(), im[i][k].get<double>());
    return m;
}
}  // namespace detail

inline nlohmann::json to_json(const FamilyTag& tag) {
    return std::visit(
        [](const auto& t) -> nlohmann::json {
            using T = std::decay_t<decltype(t)>;
            if constexpr (std::is_same_v<T, GadTag>)
                return {{"family", "gad"}, {"p", t.p}, {"gamma", t.gamma}};
            else if constexpr (std::is_same_v<T, DepolarizingTag>)
                return {{"family", "depolarizing"}, {"lambda", t.lambda}, {"d", t.d}};
            else if constexpr (std::is_same_v<T, GenDepolarizingTag>) {
                nlohmann::json j{{"family", "gen_depolarizing"}, {"lambda", t.lambda}};
                j.update(detail::matrix_to_json_pair(t.rho0, "rho0_re", "rho0_im"));
                return j;
            } else if constexpr (std::is_same_v<T, WernerTag>)
                return {{"family", "werner"}, {"eta", t.eta}, {"d", t.d}};
            else if constexpr (std::is_same_v<T, CexFilterTag>)
                return {{"family", "cex_filter"}, {"d", t.d}};
            else if constexpr (std::is_same_v<T, ReductionTag>)
                return {{"family", "reduction"}};
            else if constexpr (std::is_same_v<T, TranspositionTag>)
                return {{"family", "transposition"}, {"d", t.d}};
            else if constexpr (std::is_same_v<T, UnitaryTag>) {
                nlohmann::json j{{"family", "unitary"}};
                j.update(detail::matrix_to_json_pair(t.u, "u_re", "u_im"));
                return j;
            } else
                return {{"family", "random"}, {"d", t.d}, {"env_dim", t.env_dim}, {"seed", t.seed}};
        },
        tag);
}

inline FamilyTag family_from_json(const nlohmann::json& j) {
    const std::string f = j.at("family").get<std::string>();
    if (f == "gad") return GadTag{j.at("p").get<double>(), j.at("gamma").get<double>()};
    if (f == "depolarizing") return DepolarizingTag{j.at("lambda").get<double>(), j.at("d").get<int>()};
    if (f == "gen_depolarizing")
        return GenDepolarizingTag{j.at("lambda").get<double>(),
                                  detail::matrix_from_json_pair(j, "rho0_re", "rho0_im")};
    if (f == "werner") return WernerTag{j.at("eta").get<double>(), j.at("d").get<int>()};
    if (f == "cex_filter") return CexFilterTag{j.at("d").get<int>()};
    if (f == "reduction") return ReductionTag{};
    if (f == "transposition") return TranspositionTag{j.at("d").get<int>()};
    if (f == "unitary") return UnitaryTag{detail::matrix_from_json_pair(j, "u_re", "u_im")};
    if (f == "random")
        return RandomTag{j.at("d").get<int>(), j.at("env_dim").get<int>(),
                         j.at("seed").get<std::uint64_t>()};
    throw std::invalid_argument("family_from_json: unknown family '" + f + "'");
}

}  // namespace ebi
