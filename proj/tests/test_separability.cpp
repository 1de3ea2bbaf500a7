#include <catch2/catch_amalgamated.hpp>

#include "ebi/verify.hpp"

using namespace ebi;

TEST_CASE("ppt_verdict") {
    SECTION("identity qubit channel is maximally entangling") {
        const EbVerdict v = ppt_verdict(identity_map(2));
        CHECK(v.value == Eb::NOT_EB);
        CHECK(v.criterion == EbCriterion::PPT_VIOLATION);
        CHECK(v.margin == Catch::Approx(-0.5).margin(1e-10));
    }
    SECTION("boundary depolarizing qubit channel is EB") {
        const EbVerdict v = ppt_verdict(depolarizing(1.0 / 3.0, 2).map());
        CHECK(v.value == Eb::EB);
        CHECK(v.criterion == EbCriterion::PPT_2x2);
    }
    SECTION("extreme qutrit Werner channel is not EB") {
        CHECK(ppt_verdict(werner(0.5, 3).map()).value == Eb::NOT_EB);
    }
    SECTION("qutrit closed forms decide PPT-positive cases") {
        CHECK(ppt_verdict(depolarizing(0.25, 3).map()).value == Eb::EB);
        CHECK(ppt_verdict(depolarizing(0.25, 3).map()).criterion ==
              EbCriterion::DEPOLARIZING_CLOSED_FORM);
        CHECK(ppt_verdict(werner(0.125, 3).map()).value == Eb::EB);
        CHECK(ppt_verdict(werner(0.125, 3).map()).criterion == EbCriterion::WERNER_CLOSED_FORM);
    }
    SECTION("measure-and-reprepare structure is recognized as a Holevo form") {
        // qutrit dephasing-to-diagonal followed by re-preparation
        Rng rng(3);
        std::vector<Matrix> prep;
        for (int i = 0; i < 3; ++i) prep.push_back(random_mixed_state(3, rng));
        const LinearMap m = map_from_action(3, 3, [&](const Matrix& x) {
            Matrix out(3, 3);
            for (int i = 0; i < 3; ++i) out += x(i, i) * prep[i];
            return out;
        });
        const EbVerdict v = ppt_verdict(m);
        CHECK(v.value == Eb::EB);
        CHECK(v.criterion == EbCriterion::HOLEVO_FORM_WITNESS);
    }
    SECTION("PPT-positive without structure stays undecided for d >= 3") {
        // mix a qutrit random channel with heavy depolarizing: PPT holds but no
        // closed form applies
        const Channel ch = random_channel(3, 9, 5);
        const LinearMap mixed(3, 3, 0.85 * depolarizing(0.1, 3).choi() + 0.15 * ch.choi());
        const EbVerdict v = ppt_verdict(mixed);
        CHECK(v.value != Eb::NOT_EB);
    }
    SECTION("non-PSD Choi is rejected") {
        CHECK_THROWS_AS(ppt_verdict(transposition(2)), std::invalid_argument);
    }
}

TEST_CASE("eb_unital_qubit") {
    BlochRep b;
    b.M = mat3_diag(1.0 / 3.0, 1.0 / 3.0, 1.0 / 3.0);
    EbVerdict v = eb_unital_qubit(b);
    CHECK(v.value == Eb::EB);
    CHECK(v.margin == Catch::Approx(0.0).margin(1e-12));

    b.M = mat3_identity();
    v = eb_unital_qubit(b);
    CHECK(v.value == Eb::NOT_EB);
    CHECK(v.margin == Catch::Approx(-2.0).margin(1e-12));

    b.c = Vec3{0, 0, 0.1};
    CHECK_THROWS_AS(eb_unital_qubit(b), std::invalid_argument);
}

TEST_CASE("eb_sufficient_qubit") {
    SECTION("constant maps are EB with the trivial Holevo form") {
        BlochRep b;
        b.c = Vec3{0, 0, 0.9};
        const EbVerdict v = eb_sufficient_qubit(b);
        CHECK(v.value == Eb::EB);
    }
    SECTION("fires on weak generalized amplitude damping") {
        const BlochRep b = bloch_from_channel(gad(0.05, 0.5));
        CHECK(2.0 * std::sqrt(0.05) + 0.05 == Catch::Approx(0.497).margin(1e-3));
        CHECK(eb_sufficient_qubit(b).value == Eb::EB);
        CHECK(ppt_verdict(gad(0.05, 0.5).map()).value == Eb::EB);
    }
    SECTION("stays undecided above the threshold") {
        BlochRep b;
        b.M = mat3_diag(0.6, 0.3, 0.2);
        b.c = Vec3{0, 0, 0.1};
        const EbVerdict v = eb_sufficient_qubit(b);
        CHECK(v.value == Eb::UNDECIDED);
        CHECK(v.margin == Catch::Approx(-0.2).margin(1e-12));
    }
}

TEST_CASE("closed_form_eb") {
    SECTION("depolarizing") {
        CHECK(closed_form_eb(DepolarizingTag{0.25, 3}).value == Eb::EB);
        CHECK(closed_form_eb(DepolarizingTag{0.25, 3}).margin == Catch::Approx(0.0).margin(1e-12));
        CHECK(closed_form_eb(DepolarizingTag{0.26, 3}).value == Eb::NOT_EB);
    }
    SECTION("werner boundary") {
        const EbVerdict v = closed_form_eb(WernerTag{0.125, 3});
        CHECK(v.value == Eb::EB);
        CHECK(v.margin == Catch::Approx(0.0).margin(1e-12));
    }
    SECTION("gad") {
        CHECK(closed_form_eb(GadTag{0.2, 0.5}).value == Eb::NOT_EB);
        CHECK(closed_form_eb(GadTag{0.17, 0.5}).value == Eb::EB);
    }
    CHECK_THROWS_AS(closed_form_eb(FamilyTag{ReductionTag{}}), std::invalid_argument);
}

TEST_CASE("verdicts serialize with value, criterion and margin") {
    const nlohmann::json j = to_json(ppt_verdict(depolarizing(0.2, 2).map()));
    CHECK(j["value"] == "EB");
    CHECK(j["criterion"] == "PPT_2x2");
    CHECK(j["margin"].is_number());
    const nlohmann::json k = to_json(closed_form_eb(WernerTag{0.2, 3}));
    CHECK(k["value"] == "NOT_EB");
    CHECK(k["criterion"] == "WERNER_CLOSED_FORM");
}

TEST_CASE("state_separable_2x2") {
    CHECK_FALSE(state_separable_2x2(max_ent_state(2)));
    CHECK(state_separable_2x2(Matrix::identity(4) * 0.25));
    SECTION("Werner state at eta = 0.4 is entangled") {
        CHECK_FALSE(state_separable_2x2(werner(0.4, 2).choi()));
        CHECK(state_separable_2x2(werner(1.0 / 3.0, 2).choi()));
    }
    CHECK_THROWS_AS(state_separable_2x2(Matrix::identity(4)), std::invalid_argument);
}

TEST_CASE("criteria never contradict each other") {
    // EB and NOT_EB must not both be derivable for one channel
    Rng rng(41);
    SECTION("closed forms against PPT for the qubit families") {
        for (int t = 0; t < 60; ++t) {
            const double lambda = rng.uniform(-1.0 / 3.0, 1.0);
            const Eb closed = closed_form_eb(DepolarizingTag{lambda, 2}).value;
            const Eb ppt = ppt_verdict(depolarizing(lambda, 2).map()).value;
            if (std::abs(lambda - 1.0 / 3.0) > 1e-7) CHECK(closed == ppt);

            const double p = rng.uniform(), g = rng.uniform();
            const Eb gclosed = closed_form_eb(GadTag{p, g}).value;
            const Eb gppt = ppt_verdict(gad(p, g).map()).value;
            if (std::abs(p - gad_eb_threshold(g)) > 1e-7) CHECK(gclosed == gppt);
        }
    }
    SECTION("closed forms against PPT for Werner channels in d = 2, 3") {
        for (int t = 0; t < 60; ++t) {
            const int d = (t % 2) ? 2 : 3;
            const double eta = rng.uniform(werner_eta_min(d), werner_eta_max(d));
            const Eb closed = closed_form_eb(WernerTag{eta, d}).value;
            const Eb ppt = ppt_verdict(werner(eta, d).map()).value;
            if (closed == Eb::EB) CHECK(ppt != Eb::NOT_EB);
            if (ppt == Eb::NOT_EB) CHECK(closed == Eb::NOT_EB);
            if (d == 2 && std::abs(eta - werner_eb_max(d)) > 1e-7) CHECK(closed == ppt);
        }
    }
    SECTION("sufficient criterion never opposes the unital trace-norm form") {
        for (int t = 0; t < 200; ++t) {
            const Channel ch = random_unital_qubit_channel(rng);
            const BlochRep b = bloch_from_channel(ch);
            if (eb_sufficient_qubit(b).value == Eb::EB)
                CHECK(eb_unital_qubit(b).value == Eb::EB);
        }
    }
}

TEST_CASE("eb-criteria property suite") {
    for (const CheckResult& c : verify_eb_criteria(99)) {
        INFO(c.name << ": " << c.detail);
        CHECK(c.pass);
    }
}
