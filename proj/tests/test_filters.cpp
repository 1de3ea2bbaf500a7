#include <catch2/catch_amalgamated.hpp>

#include "ebi/filters.hpp"
#include "ebi/verify.hpp"

using namespace ebi;

TEST_CASE("negativity") {
    CHECK(negativity(max_ent_state(2), 2, 2) == Catch::Approx(0.5).margin(1e-10));
    CHECK(negativity(Matrix::identity(4) * 0.25, 2, 2) == 0.0);
    SECTION("EB channel Choi has zero negativity") {
        CHECK(negativity(depolarizing(0.3, 2).choi(), 2, 2) == 0.0);
    }
    SECTION("invalid state is rejected") {
        CHECK_THROWS_AS(negativity(Matrix::identity(4), 2, 2), std::invalid_argument);
        Matrix m = max_ent_state(2);
        m(0, 3) = 2.0;
        m(3, 0) = 2.0;
        CHECK_THROWS_AS(negativity(m, 2, 2), std::invalid_argument);
    }
}

TEST_CASE("filter chains recompose from their parts") {
    Rng rng(3);
    const Channel noise = random_qubit_channel(rng);
    const FilterChain chain = build_chain(noise, {random_qubit_channel(rng), random_qubit_channel(rng)});
    CHECK(chain.chain_length == 3);
    const LinearMap redo = compose(
        noise.map(),
        compose(chain.filters[0].map(),
                compose(noise.map(), compose(chain.filters[1].map(), noise.map()))));
    CHECK(max_entry_distance(chain.composed.choi(), redo.choi) < 1e-10);
}

TEST_CASE("unitary_filter_search") {
    SECTION("depolarizing noise admits no helpful unitary filter") {
        const SearchReport r = unitary_filter_search(depolarizing(0.6, 2), 3, 8, 7, 600);
        CHECK(r.best_objective <= 1e-7);
        CHECK_FALSE(r.flag_not_eb);
    }
    SECTION("extreme qutrit Werner noise closes at two despite unitary filters") {
        const SearchReport r = unitary_filter_search(werner(0.5, 3), 2, 8, 7, 600);
        CHECK(r.best_objective <= 1e-7);
    }
    SECTION("the Schatten index matches search behavior on both sides") {
        // channels with ||M||_2 comfortably above 1 and ||M||_3 <= 1: a filter
        // violating chain length 2 must exist, and none may exist at length 3
        Rng rng(83);
        int found = 0;
        while (found < 8) {
            const Channel ch = random_unital_qubit_channel(rng);
            const auto sv = singular_values3(bloch_from_channel(ch).M);
            const double s2 = sv[0] * sv[0] + sv[1] * sv[1] + sv[2] * sv[2];
            const double s3 = std::pow(sv[0], 3) + std::pow(sv[1], 3) + std::pow(sv[2], 3);
            if (s2 < 1.05 || s3 > 1.0) continue;
            ++found;
            REQUIRE(nu_unital_qubit(bloch_from_channel(ch)).n == 3);
            const SearchReport below = unitary_filter_search(ch, 2, 10, rng.raw(), 700);
            const SearchReport at = unitary_filter_search(ch, 3, 6, rng.raw(), 500);
            CHECK(below.best_objective > 1e-7);
            CHECK(at.best_objective <= 1e-7);
        }
    }
    SECTION("an amendable channel survives past its direct index") {
        // rotated diagonal channel: direct index 2, Schatten index 3
        const Channel lam = channel_from_bloch(mat3_diag(0.92, 0.4, 0.33), Vec3{0, 0, 0});
        const Channel noise = compose(rotation_channel(so3_exp(Vec3{0, 0, 1.5707963267948966})), lam);
        REQUIRE(n_index(noise).n == 2);
        REQUIRE(nu_unital_qubit(bloch_from_channel(noise)).n == 3);
        const SearchReport r = unitary_filter_search(noise, 2, 12, 11, 800);
        CHECK(r.best_objective > 1e-7);
        CHECK(r.flag_not_eb);
    }
    CHECK_THROWS_AS(unitary_filter_search(depolarizing(0.5, 2), 1, 2, 3), std::invalid_argument);
}

TEST_CASE("general_filter_search") {
    SECTION("qutrit Werner noise at length three: non-unitary beats unitary") {
        const Channel noise = werner(0.5, 3);
        const std::vector<Channel> warm{cex_filter(3), cex_filter(3)};
        const SearchReport gen = general_filter_search(noise, 3, 2, 5, 300, warm);
        const SearchReport uni = unitary_filter_search(noise, 3, 6, 5, 500);
        CHECK(gen.best_objective > 1e-7);
        CHECK(uni.best_objective <= 1e-7);
    }
    SECTION("depolarizing qubit noise: nothing helps") {
        const SearchReport r = general_filter_search(depolarizing(0.6, 2), 3, 2, 5, 250);
        CHECK(r.best_objective <= 1e-7);
        CHECK(r.best_unitary_objective >= 0.0);
        CHECK_FALSE(r.flag_conjecture_counterevidence);
    }
    SECTION("EB noise keeps every chain at zero objective") {
        const SearchReport r = general_filter_search(depolarizing(0.3, 2), 2, 2, 5, 250);
        CHECK(r.best_objective == 0.0);
    }
}

TEST_CASE("single_unitary_index_max") {
    SECTION("depolarizing noise commutes the unitary out") {
        const UnitaryIndexMax r = single_unitary_index_max(depolarizing(0.6, 2), 4, 16);
        CHECK_FALSE(r.infinite);
        CHECK(r.best_n == 3);
    }
    SECTION("unital noise reaches the Schatten index") {
        Rng rng(19);
        for (int t = 0; t < 5; ++t) {
            const Channel lam = channel_from_bloch(mat3_diag(0.92, 0.4, 0.33), Vec3{0, 0, 0});
            const Channel noise = compose(rotation_channel(random_so3(rng)),
                                          compose(lam, rotation_channel(random_so3(rng))));
            const UnitaryIndexMax r = single_unitary_index_max(noise, 4, 16);
            CHECK_FALSE(r.infinite);
            CHECK(r.best_n == 3);
        }
    }
    SECTION("amplitude damping diverges") {
        CHECK(single_unitary_index_max(gad(0.5, 1.0), 3, 16).infinite);
    }
    CHECK_THROWS_AS(single_unitary_index_max(depolarizing(0.5, 3), 3, 16), std::invalid_argument);
}

TEST_CASE("counterexample_chain") {
    SECTION("k = 0 is the bare Werner channel") {
        const FilterChain c = counterexample_chain(3, 0);
        CHECK(c.chain_length == 1);
        CHECK(ppt_verdict(c.composed.map()).value == Eb::NOT_EB);
        CHECK(max_entry_distance(c.composed.choi(), werner(0.5, 3).choi()) < 1e-12);
    }
    SECTION("k = 1 interleaves two filters") {
        const FilterChain c = counterexample_chain(3, 1);
        CHECK(c.chain_length == 3);
        CHECK(c.filters.size() == 2);
    }
    SECTION("identity filters collapse to an EB power for k >= 1") {
        const Channel v = werner(0.5, 3);
        const FilterChain c = build_chain(v, {identity_channel(3), identity_channel(3)});
        CHECK(max_entry_distance(c.composed.choi(), werner(std::pow(0.5, 3), 3).choi()) < 1e-10);
        CHECK(ppt_verdict(depolarizing(std::pow(0.5, 2), 3).map()).value == Eb::EB);
    }
    CHECK_THROWS_AS(counterexample_chain(2, 1), std::invalid_argument);
}

TEST_CASE("choi_minor_check") {
    SECTION("frozen minor values") {
        CHECK(choi_minor_check(counterexample_chain(3, 1)).expected ==
              Catch::Approx(-1.0 / 24).margin(1e-15));
        CHECK(choi_minor_check(counterexample_chain(3, 2)).expected ==
              Catch::Approx(-1.0 / 96).margin(1e-15));
        CHECK(choi_minor_check(counterexample_chain(4, 1)).expected ==
              Catch::Approx(-1.0 / 108).margin(1e-15));
    }
    SECTION("computed entries match and certify NOT_EB") {
        for (int d : {3, 4})
            for (int k : {0, 1, 2}) {
                const MinorCheck mc = choi_minor_check(counterexample_chain(d, k));
                INFO("d=" << d << " k=" << k);
                CHECK(std::abs(mc.entry00) <= 1e-10);
                CHECK(std::abs(mc.entry0011 - cplx(mc.expected, 0)) <= 1e-10);
                CHECK(mc.matches);
                CHECK(mc.not_eb);
            }
    }
}

TEST_CASE("Werner chains expand through transposed filter relays") {
    // V psi_1 V ... psi_{k-1} V equals (-eta)^k T psi_1 T ... T psi_{k-1} T plus
    // constant relays (1+eta) (-eta)^i (T psi_1 ... T psi_i)(1/d) Tr and the
    // maximally mixing tail.
    Rng rng(61);
    for (int d : {3, 4}) {
        const double eta = rng.uniform(werner_eta_min(d), werner_eta_max(d));
        const Channel v = werner(eta, d);
        const LinearMap t = transposition(d);
        const std::vector<Channel> psis{random_channel(d, d * d, rng.raw()),
                                        random_channel(d, d * d, rng.raw())};
        const int k = 3;  // three Werner factors, two filters

        std::vector<LinearMap> chain{v.map()};
        for (const Channel& psi : psis) {
            chain.push_back(psi.map());
            chain.push_back(v.map());
        }
        const LinearMap lhs = compose_all(chain);

        const Matrix mixed = Matrix::identity(d) * (1.0 / d);
        Matrix rhs(d * d, d * d);
        rhs += (1.0 + eta) * constant_map(mixed, d).choi;
        LinearMap prefix = identity_map(d);  // T psi_1 T psi_2 ... alternating
        for (int i = 1; i <= k - 1; ++i) {
            prefix = compose(prefix, compose(t, psis[static_cast<std::size_t>(i - 1)].map()));
            rhs += (1.0 + eta) * std::pow(-eta, i) *
                   constant_map(apply(prefix, mixed), d).choi;
        }
        const LinearMap main_term = compose(prefix, t);  // trailing transposition
        rhs += std::pow(-eta, k) * main_term.choi;
        INFO("d=" << d << " eta=" << eta);
        CHECK(max_entry_distance(lhs.choi, rhs) < 1e-10);
    }
}

TEST_CASE("werner_unitary_futility") {
    SECTION("identity and EB verdict at the extreme point") {
        const WernerFutilityReport rep = werner_unitary_futility(0.5, 3, 100, 17);
        CHECK(rep.identity_holds);
        CHECK(rep.worst_identity_dev <= 1e-10);
        CHECK(rep.chains_eb);
        CHECK(rep.eb_margin == Catch::Approx(0.0).margin(1e-12));
    }
    SECTION("identity with the identity filter is the exact composition law") {
        const Channel v = werner(0.4, 3);
        CHECK(max_entry_distance(compose(v, v).choi(), depolarizing(0.16, 3).choi()) < 1e-12);
    }
    CHECK_THROWS_AS(werner_unitary_futility(0.3, 2, 10, 1), std::invalid_argument);
}

TEST_CASE("search reports serialize deterministically") {
    const SearchReport a = unitary_filter_search(depolarizing(0.7, 2), 2, 3, 99, 200);
    const SearchReport b = unitary_filter_search(depolarizing(0.7, 2), 2, 3, 99, 200);
    CHECK(to_json(a).dump() == to_json(b).dump());
    const SearchReport ga = general_filter_search(depolarizing(0.7, 2), 2, 2, 99, 150);
    const SearchReport gb = general_filter_search(depolarizing(0.7, 2), 2, 2, 99, 150);
    CHECK(to_json(ga).dump() == to_json(gb).dump());
    const nlohmann::json j = to_json(a);
    CHECK(j.contains("best_objective"));
    CHECK(j.contains("best_parameters"));
    CHECK(j.contains("restarts"));
    CHECK(j.contains("evaluations"));
    CHECK(j.contains("seed"));
    CHECK(j.contains("flag_not_eb"));
}

TEST_CASE("filters property suite") {
    for (const CheckResult& c : verify_filters(555)) {
        INFO(c.name << ": " << c.detail);
        CHECK(c.pass);
    }
}
