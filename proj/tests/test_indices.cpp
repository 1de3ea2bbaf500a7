#include <catch2/catch_amalgamated.hpp>

#include "ebi/verify.hpp"

using namespace ebi;

TEST_CASE("special_svd") {
    SECTION("identity") {
        const CanonicalForm cf = special_svd(mat3_identity());
        CHECK(cf.L[0] == Catch::Approx(1.0).margin(1e-12));
        CHECK(cf.L[2] == Catch::Approx(1.0).margin(1e-12));
        CHECK(mat3_maxabs(cf.O1 * mat3_diag(cf.L[0], cf.L[1], cf.L[2]) * cf.O2 - mat3_identity()) <
              1e-12);
    }
    SECTION("negative determinant flips the smallest value") {
        const CanonicalForm cf = special_svd(mat3_diag(1.0, 1.0, -1.0));
        CHECK(cf.L[0] == Catch::Approx(1.0).margin(1e-12));
        CHECK(cf.L[2] == Catch::Approx(-1.0).margin(1e-12));
        CHECK(det3(cf.O1) == Catch::Approx(1.0).margin(1e-12));
        CHECK(det3(cf.O2) == Catch::Approx(1.0).margin(1e-12));
    }
    SECTION("round trip on random matrices") {
        Rng rng(15);
        for (int t = 0; t < 1000; ++t) {
            Mat3 m;
            for (int i = 0; i < 3; ++i)
                for (int j = 0; j < 3; ++j) m[i][j] = rng.normal();
            const CanonicalForm cf = special_svd(m);
            CHECK(mat3_maxabs(cf.O1 * mat3_diag(cf.L[0], cf.L[1], cf.L[2]) * cf.O2 - m) < 1e-10);
            CHECK(cf.L[0] >= cf.L[1]);
            CHECK(cf.L[1] >= std::abs(cf.L[2]) - 1e-12);
            if (std::abs(det3(m)) > 1e-9) CHECK((det3(m) > 0) == (cf.L[2] > 0));
        }
    }
    SECTION("canonical form carries the rotated translation") {
        Rng rng(16);
        const Channel ch = random_qubit_channel(rng);
        const BlochRep b = bloch_from_channel(ch);
        const CanonicalForm cf = canonical_form(b);
        CHECK(norm(cf.t - transposed(cf.O1) * b.c) < 1e-12);
    }
}

TEST_CASE("sphere_image_max") {
    SECTION("fixed cases") {
        CHECK(sphere_image_max(mat3_identity(), Vec3{0, 0, 0}).value ==
              Catch::Approx(1.0).margin(1e-9));
        CHECK(sphere_image_max(mat3_zero(), Vec3{0, 0, 0.3}).value ==
              Catch::Approx(0.3).margin(1e-9));
    }
    SECTION("amplitude damping touches the pole") {
        const SphereMax sm = sphere_image_max(bloch_from_channel(gad(0.5, 1.0)));
        CHECK(sm.value == Catch::Approx(1.0).margin(1e-9));
        CHECK(sm.argmax[2] == Catch::Approx(1.0).margin(1e-6));
    }
    SECTION("axially symmetric cases against a one-dimensional oracle") {
        // for M = diag(m1, m2, m3) and c along z the maximization reduces to a
        // scalar problem in z, solved here by golden-section to 1e-12
        Rng rng(35);
        for (int t = 0; t < 200; ++t) {
            const double m1 = rng.uniform(-1, 1), m2 = (t % 3 == 0) ? m1 : rng.uniform(-1, 1);
            const double m3 = rng.uniform(-1, 1), c3 = rng.uniform(-1, 1);
            const double a = std::max(m1 * m1, m2 * m2);
            auto f = [&](double z) { return a * (1.0 - z * z) + (m3 * z + c3) * (m3 * z + c3); };
            const double gr = 0.6180339887498949;
            double best = 0.0;
            for (double lo0 : {-1.0, 0.0}) {  // two brackets cover interior maxima and edges
                double lo = lo0, hi = lo0 + 1.0;
                // golden-section on -f
                double x1 = hi - gr * (hi - lo), x2 = lo + gr * (hi - lo);
                for (int it = 0; it < 100; ++it) {
                    if (f(x1) > f(x2))
                        hi = x2, x2 = x1, x1 = hi - gr * (hi - lo);
                    else
                        lo = x1, x1 = x2, x2 = lo + gr * (hi - lo);
                }
                best = std::max({best, f(0.5 * (lo + hi)), f(lo0), f(lo0 + 1.0)});
            }
            const double oracle = std::sqrt(best);
            const double got = sphere_image_max(mat3_diag(m1, m2, m3), Vec3{0, 0, c3}).value;
            CHECK(got == Catch::Approx(oracle).margin(1e-9));
        }
    }

    SECTION("never below a dense grid oracle") {
        Rng rng(21);
        for (int t = 0; t < 200; ++t) {
            const BlochRep b = bloch_from_channel(random_qubit_channel(rng));
            const SphereMax sm = sphere_image_max(b);
            double grid_best = 0.0;
            for (int k = 0; k < 1500; ++k) {
                const double z = 1.0 - 2.0 * (k + 0.5) / 1500;
                const double phi = 2.39996322972865332 * k;
                const double r = std::sqrt(1.0 - z * z);
                grid_best = std::max(grid_best,
                                     norm(b.M * Vec3{r * std::cos(phi), r * std::sin(phi), z} + b.c));
            }
            CHECK(sm.value >= grid_best - 1e-9);
            CHECK(sm.value <= 1.0 + 1e-9);  // positivity bound for channels
            CHECK(norm(b.M * sm.argmax + b.c) == Catch::Approx(sm.value).margin(1e-12));
        }
    }
}

TEST_CASE("divergence_check") {
    SECTION("amplitude damping family") {
        const DivergenceResult dv = divergence_check(gad(0.5, 1.0));
        CHECK(dv.certified);
        CHECK(dv.pure_fixed_point);
        CHECK(dv.witness[2] == Catch::Approx(1.0).margin(1e-6));
    }
    SECTION("noisy depolarizing is not certified") {
        CHECK_FALSE(divergence_check(depolarizing(0.9, 2)).certified);
    }
    SECTION("unitary channels are certified with a fixed axis") {
        const DivergenceResult dv = divergence_check(random_unitary(2, 31));
        CHECK(dv.certified);
        CHECK(dv.pure_fixed_point);
    }
    SECTION("rotated amplitude damping: filtered indices diverge, n does not") {
        const Channel rot = rotation_channel(so3_exp(Vec3{3.14159265358979323846, 0, 0}));
        const Channel ch = compose(rot, gad(0.5, 1.0));
        const DivergenceResult dv = divergence_check(ch);
        CHECK(dv.certified);
        CHECK_FALSE(dv.pure_fixed_point);
        const IndexResult n = n_index(ch, 16);
        REQUIRE(n.is_finite());
        CHECK(n.n == 3);
    }
    CHECK_THROWS_AS(divergence_check(depolarizing(0.5, 3)), std::invalid_argument);
}

TEST_CASE("n_index") {
    SECTION("depolarizing qubit at lambda = 0.6 needs three applications") {
        // iterate + closed-form oracle: 0.6^2 = 0.36 > 1/3 >= 0.6^3 = 0.216
        const IndexResult r = n_index(depolarizing(0.6, 2));
        REQUIRE(r.is_finite());
        CHECK(r.n == 3);
        CHECK(r.certificate == IndexResult::Certificate::ITERATED_PPT);
    }
    SECTION("amplitude damping diverges") {
        const IndexResult r = n_index(gad(0.5, 1.0));
        CHECK(r.is_infinite());
        CHECK(r.certificate == IndexResult::Certificate::PURE_STATE_IN_IMAGE);
    }
    SECTION("EB channels have index one") {
        CHECK(n_index(depolarizing(0.2, 2)).n == 1);
        CHECK(n_index(gad(0.1, 0.5)).n == 1);
    }
    SECTION("cap exhaustion reports undecided") {
        const IndexResult r = n_index(depolarizing(0.995, 2), 8);
        CHECK(r.is_undecided());
        CHECK(r.cap == 8);
    }
    SECTION("qutrit Werner channel closes at two") {
        const IndexResult r = n_index(werner(0.5, 3));
        REQUIRE(r.is_finite());
        CHECK(r.n == 2);
    }
}

TEST_CASE("n_gad_closed") {
    SECTION("interior point") {
        const IndexResult r = n_gad_closed(0.5, 0.5);
        REQUIRE(r.is_finite());
        CHECK(r.n == 3);  // log f / log p = 2.5431
    }
    SECTION("zero-temperature limit diverges") { CHECK(n_gad_closed(0.7, 1.0).is_infinite()); }
    SECTION("EB region") { CHECK(n_gad_closed(0.1, 0.5).n == 1); }
    SECTION("p = 0 is instantly EB") { CHECK(n_gad_closed(0.0, 1.0).n == 1); }
    CHECK_THROWS_AS(n_gad_closed(-0.1, 0.5), std::invalid_argument);
}

TEST_CASE("GAD index region is symmetric in the temperature parameter") {
    // f(gamma) = f(1 - gamma), so the whole region plot mirrors about 1/2
    for (int gi = 0; gi <= 20; ++gi)
        for (int pi = 0; pi <= 20; ++pi) {
            const double gamma = gi / 20.0, p = pi / 20.0;
            const IndexResult a = n_gad_closed(p, gamma);
            const IndexResult b = n_gad_closed(p, 1.0 - gamma);
            CHECK(a.kind == b.kind);
            if (a.is_finite()) CHECK(a.n == b.n);
        }
}

TEST_CASE("n_depolarizing_closed") {
    CHECK(n_depolarizing_closed(0.6, 2).n == 3);  // log 3 / log(1/0.6) = 2.1507
    CHECK(n_depolarizing_closed(0.5, 3).n == 2);  // boundary: log 4 / log 2 = 2 exactly
    CHECK(n_depolarizing_closed(1.0, 2).is_infinite());
    CHECK(n_depolarizing_closed(-0.2, 2).n == 1);
    CHECK_THROWS_AS(n_depolarizing_closed(1.5, 2), std::invalid_argument);
}

TEST_CASE("n_gen_depolarizing") {
    SECTION("maximally mixed target recovers the depolarizing closed form") {
        const IndexResult r = n_gen_depolarizing(0.5, Matrix::identity(2) * 0.5);
        REQUIRE(r.is_finite());
        CHECK(r.n == n_depolarizing_closed(0.5, 2).n);
    }
    SECTION("below the bisected threshold the channel is already EB") {
        CHECK(n_gen_depolarizing(0.3, Matrix::identity(2) * 0.5).n == 1);
    }
    SECTION("pure target matches the iterate oracle (both diverge)") {
        const Matrix rho0 = Matrix::unit(2, 0, 0);
        const IndexResult closed = n_gen_depolarizing(0.5, rho0);
        const IndexResult oracle = n_index(gen_depolarizing(0.5, rho0));
        CHECK(closed.is_infinite());
        CHECK(oracle.is_infinite());
    }
    SECTION("threshold-grazing lambda reports both ceiling candidates") {
        // mu = 1/3 for the maximally mixed target; lambda = (1/3)^{1/2} puts
        // log mu / log lambda exactly on the integer 2
        const IndexResult r = n_gen_depolarizing(std::sqrt(1.0 / 3.0), Matrix::identity(2) * 0.5);
        REQUIRE(r.is_finite());
        CHECK(r.n == 2);
        REQUIRE(r.boundary_alternate.has_value());
        CHECK(*r.boundary_alternate == 3);
    }
    SECTION("nearly mixed target matches the iterate oracle") {
        Matrix rho0(2, 2);
        rho0(0, 0) = 0.62;
        rho0(1, 1) = 0.38;
        const IndexResult closed = n_gen_depolarizing(0.55, rho0);
        const IndexResult oracle = n_index(gen_depolarizing(0.55, rho0));
        REQUIRE(closed.is_finite());
        REQUIRE(oracle.is_finite());
        CHECK(closed.n == oracle.n);
    }
}

TEST_CASE("nu_unital_qubit") {
    SECTION("frozen Schatten sequence") {
        BlochRep b;
        b.M = mat3_diag(0.9, 0.8, 0.7);
        const IndexResult r = nu_unital_qubit(b);
        REQUIRE(r.is_finite());
        CHECK(r.n == 6);
        CHECK(r.certificate == IndexResult::Certificate::SCHATTEN_SEQUENCE);
        REQUIRE(r.schatten_powers.size() == 6);
        CHECK(r.schatten_powers[4] == Catch::Approx(1.08624).margin(1e-5));
        CHECK(r.schatten_powers[5] == Catch::Approx(0.91123).margin(1e-5));
    }
    SECTION("scalar Bloch matrix matches the depolarizing closed form") {
        for (double lambda : {0.4, 0.6, 0.8, 0.95}) {
            BlochRep b;
            b.M = mat3_diag(lambda, lambda, lambda);
            CHECK(nu_unital_qubit(b).n == n_depolarizing_closed(lambda, 2).n);
        }
    }
    SECTION("unit singular value with residual noise diverges") {
        BlochRep b;
        b.M = mat3_diag(1.0, 0.3, 0.3);
        CHECK(nu_unital_qubit(b).is_infinite());
    }
    SECTION("non-unital input is rejected") {
        BlochRep b;
        b.c = Vec3{0, 0, 0.2};
        CHECK_THROWS_AS(nu_unital_qubit(b), std::invalid_argument);
    }
    SECTION("invariant under pre- and post-rotations") {
        Rng rng(77);
        for (int t = 0; t < 20; ++t) {
            const Channel lam = random_unital_qubit_channel(rng);
            const IndexResult base = nu_unital_qubit(bloch_from_channel(lam));
            const Channel rotated = compose(rotation_channel(random_so3(rng)),
                                            compose(lam, rotation_channel(random_so3(rng))));
            const IndexResult rot = nu_unital_qubit(bloch_from_channel(rotated));
            CHECK(base.kind == rot.kind);
            if (base.is_finite()) CHECK(base.n == rot.n);
        }
    }
}

TEST_CASE("depolarizing_filter_futility") {
    SECTION("qubit chain with two random filters") {
        const std::vector<Channel> fs{random_channel(2, 4, 101), random_channel(2, 4, 102)};
        const FutilityReport rep = depolarizing_filter_futility(0.6, 2, fs);
        CHECK(rep.verdict.value == Eb::EB);
        CHECK(rep.reconstruction_error < 1e-9);
        CHECK(rep.expansion_error < 1e-9);
        double wsum = 0.0;
        for (std::size_t i = 0; i < rep.weights.size(); ++i) {
            CHECK(rep.weights[i] ==
                  Catch::Approx(std::pow(0.6, i) * 0.4 / (1.0 - std::pow(0.6, 3))).margin(1e-12));
            wsum += rep.weights[i];
        }
        CHECK(wsum == Catch::Approx(1.0).margin(1e-12));
    }
    SECTION("qutrit chain avoids the PPT blind spot through the reconstruction") {
        const std::vector<Channel> fs{random_channel(3, 9, 103)};
        const FutilityReport rep = depolarizing_filter_futility(0.5, 3, fs);
        CHECK(rep.verdict.value == Eb::EB);
        CHECK(rep.reconstruction_error < 1e-9);
        CHECK(rep.expansion_error < 1e-9);
    }
    SECTION("identity filters collapse the chain") {
        const LinearMap delta = depolarizing(0.6, 2).map();
        const std::vector<LinearMap> chain{delta, identity_map(2), delta, identity_map(2), delta};
        CHECK(max_entry_distance(compose_all(chain).choi, depolarizing(0.216, 2).choi()) < 1e-10);
    }
    SECTION("precondition violation is rejected") {
        CHECK_THROWS_AS(depolarizing_filter_futility(0.9, 2, {random_channel(2, 4, 1)}),
                        std::invalid_argument);
    }
}

TEST_CASE("iterated-PPT certificates are tight") {
    // Finite(n) with ITERATED_PPT means ch^n is EB and ch^{n-1} is not (n >= 2)
    Rng rng(51);
    int checked = 0;
    for (int t = 0; t < 80 && checked < 25; ++t) {
        const Channel ch = random_qubit_channel(rng);
        const IndexResult r = n_index(ch, 16);
        if (!r.is_finite() || r.n < 2) continue;
        ++checked;
        LinearMap power = ch.map();
        for (int i = 2; i <= r.n - 1; ++i) power = compose(ch.map(), power);
        CHECK(ppt_verdict(power).value == Eb::NOT_EB);
        power = compose(ch.map(), power);
        CHECK(ppt_verdict(power).value == Eb::EB);
    }
    CHECK(checked >= 25);
}

TEST_CASE("indices property suite") {
    for (const CheckResult& c : verify_indices(333)) {
        INFO(c.name << ": " << c.detail);
        CHECK(c.pass);
    }
}
