#include <catch2/catch_amalgamated.hpp>

#include <atomic>
#include <cstdlib>

#include "ebi/eig.hpp"
#include "ebi/rng.hpp"
#include "ebi/threading.hpp"

using namespace ebi;

TEST_CASE("parallel_for visits every index once and honors the thread cap") {
    setenv("EBINDEX_THREADS", "2", 1);
    CHECK(thread_budget() <= 2);
    std::vector<std::atomic<int>> hits(997);
    parallel_for(997, [&](int i) { ++hits[static_cast<std::size_t>(i)]; });
    bool once = true;
    for (const auto& h : hits) once = once && h.load() == 1;
    CHECK(once);
    unsetenv("EBINDEX_THREADS");
}

TEST_CASE("herm_eig on fixed inputs") {
    const Spectrum id4 = herm_eig(Matrix::identity(4));
    for (double lam : id4.eigenvalues) CHECK(lam == Catch::Approx(1.0).margin(1e-14));

    const Spectrum z = herm_eig(pauli(3));
    CHECK(z.eigenvalues[0] == Catch::Approx(1.0).margin(1e-14));
    CHECK(z.eigenvalues[1] == Catch::Approx(-1.0).margin(1e-14));
}

TEST_CASE("herm_eig recovers a planted spectrum") {
    // A = V D V^dag for a random orthonormal V and D = diag(3, 1, -2)
    Rng rng(11);
    const Matrix v = haar_unitary(3, rng);
    Matrix d(3, 3);
    d(0, 0) = 3.0;
    d(1, 1) = 1.0;
    d(2, 2) = -2.0;
    const Matrix a = v * d * v.dagger();
    const Spectrum s = herm_eig((a + a.dagger()) * 0.5);
    CHECK(s.eigenvalues[0] == Catch::Approx(3.0).margin(1e-10));
    CHECK(s.eigenvalues[1] == Catch::Approx(1.0).margin(1e-10));
    CHECK(s.eigenvalues[2] == Catch::Approx(-2.0).margin(1e-10));
}

TEST_CASE("herm_eig rejects bad input") {
    CHECK_THROWS_AS(herm_eig(Matrix(2, 3)), std::invalid_argument);
    Matrix m(2, 2);
    m(0, 1) = 1.0;  // not Hermitian: m(1,0) = 0
    CHECK_THROWS_AS(herm_eig(m), std::invalid_argument);
}

TEST_CASE("herm_eig edge shapes") {
    const Spectrum one = herm_eig(Matrix::identity(1) * 4.2);
    REQUIRE(one.eigenvalues.size() == 1);
    CHECK(one.eigenvalues[0] == Catch::Approx(4.2));

    const Spectrum zero = herm_eig(Matrix::zero(3, 3));
    for (double lam : zero.eigenvalues) CHECK(lam == 0.0);

    // degenerate spectrum still yields an orthonormal basis
    Rng rng(2);
    const Matrix v = haar_unitary(4, rng);
    Matrix d(4, 4);
    d(0, 0) = 2.0;
    d(1, 1) = 2.0;
    d(2, 2) = 2.0;
    d(3, 3) = -1.0;
    const Matrix a = v * d * v.dagger();
    const Spectrum s = herm_eig((a + a.dagger()) * 0.5);
    CHECK(s.eigenvalues[2] == Catch::Approx(2.0).margin(1e-10));
    CHECK(max_entry_distance(s.eigenvectors.dagger() * s.eigenvectors, Matrix::identity(4)) < 1e-10);
}

TEST_CASE("herm_eig is deterministic") {
    Rng rng(5);
    Matrix a = rng.ginibre(16, 16);
    a = (a + a.dagger()) * 0.5;
    const Spectrum s1 = herm_eig(a);
    const Spectrum s2 = herm_eig(a);
    CHECK(s1.eigenvalues == s2.eigenvalues);
    CHECK(max_entry_distance(s1.eigenvectors, s2.eigenvectors) == 0.0);
}

TEST_CASE("schatten norms on fixed inputs") {
    CHECK(schatten_norm(Matrix::diag({0.9, 0.8, 0.7}), 1.0) == Catch::Approx(2.4).margin(1e-12));
    CHECK(schatten_norm(Matrix::identity(3) * 0.4, 1.0) == Catch::Approx(1.2).margin(1e-12));
    CHECK(schatten_norm(pauli(3), schatten_inf) == Catch::Approx(1.0).margin(1e-12));
    CHECK_THROWS_AS(schatten_norm(pauli(3), 0.5), std::invalid_argument);
}

TEST_CASE("bipartite operations on fixed inputs") {
    Rng rng(3);
    const Matrix a = random_mixed_state(2, rng);
    const Matrix b = random_mixed_state(2, rng);

    SECTION("partial transpose of a product state transposes the factor") {
        const Matrix lhs = partial_transpose(kron(a, b), 2, 2, Sub::second);
        CHECK(max_entry_distance(lhs, kron(a, b.transpose())) < 1e-14);
    }

    SECTION("partial transpose of the maximally entangled projector") {
        // eigensolve the explicit 4x4 matrix
        Matrix eps(4, 4);
        for (int i = 0; i < 2; ++i)
            for (int j = 0; j < 2; ++j) eps(i * 2 + i, j * 2 + j) = 0.5;
        const Spectrum s = herm_eig(partial_transpose(eps, 2, 2, Sub::second));
        CHECK(s.eigenvalues[0] == Catch::Approx(0.5).margin(1e-12));
        CHECK(s.eigenvalues[1] == Catch::Approx(0.5).margin(1e-12));
        CHECK(s.eigenvalues[2] == Catch::Approx(0.5).margin(1e-12));
        CHECK(s.eigenvalues[3] == Catch::Approx(-0.5).margin(1e-12));
    }

    SECTION("partial traces sum to the total trace") {
        const Matrix r = kron(a, b);
        const cplx t1 = partial_trace(r, 2, 2, Sub::first).trace();
        const cplx t2 = partial_trace(r, 2, 2, Sub::second).trace();
        CHECK(std::abs(t1 - r.trace()) < 1e-14);
        CHECK(std::abs(t2 - r.trace()) < 1e-14);
    }

    SECTION("dimension mismatch is rejected") {
        CHECK_THROWS_AS(partial_trace(Matrix::identity(6), 2, 2, Sub::first), std::invalid_argument);
    }
}

TEST_CASE("partial_transpose is a bit-exact involution") {
    Rng rng(7);
    const Matrix m = rng.ginibre(12, 12);
    for (Sub which : {Sub::first, Sub::second}) {
        const Matrix twice = partial_transpose(partial_transpose(m, 3, 4, which), 3, 4, which);
        bool exact = true;
        for (int i = 0; i < 12 && exact; ++i)
            for (int j = 0; j < 12; ++j)
                if (twice(i, j) != m(i, j)) {
                    exact = false;
                    break;
                }
        CHECK(exact);
    }
}

TEST_CASE("Hoelder inequality on random samples") {
    Rng rng(13);
    for (int t = 0; t < 200; ++t) {
        const int n = rng.uniform_int(2, 6);
        const Matrix a = rng.ginibre(n, n), b = rng.ginibre(n, n);
        const double p = 1.0 + rng.uniform(0.0, 2.0);
        for (double r : {2.0, 3.0}) {
            const double s = r / (r - 1.0);
            const double lhs = schatten_norm(a * b, p);
            const double rhs = schatten_norm(a, r * p) * schatten_norm(b, s * p);
            CHECK(lhs <= rhs * (1.0 + 1e-9));
        }
    }
}

TEST_CASE("diagonal Schatten power identity") {
    Rng rng(17);
    for (int t = 0; t < 100; ++t) {
        const int n = rng.uniform_int(2, 6);
        std::vector<double> d(n);
        for (double& x : d) x = rng.uniform(-1.0, 1.0);
        const Matrix l = Matrix::diag(d);
        const int k = rng.uniform_int(1, 4);
        const double p = 1.0 + rng.uniform(0.0, 2.0);
        Matrix lk = Matrix::identity(n);
        for (int i = 0; i < k; ++i) lk = lk * l;
        CHECK(schatten_norm(l, k * p) ==
              Catch::Approx(std::pow(schatten_norm(lk, p), 1.0 / k)).margin(1e-10));
    }
}

TEST_CASE("eigensolver bounds over random Hermitian matrices") {
    Rng rng(23);
    for (int t = 0; t < 250; ++t) {
        const int n = rng.uniform_int(2, 64);
        Matrix a = rng.ginibre(n, n);
        a = (a + a.dagger()) * 0.5;
        const Spectrum s = herm_eig(a);
        Matrix lam(n, n);
        for (int i = 0; i < n; ++i) lam(i, i) = s.eigenvalues[i];
        CHECK(max_entry_distance(s.eigenvectors * lam * s.eigenvectors.dagger(), a) <=
              1e-10 * (1.0 + a.maxabs()));
        CHECK(max_entry_distance(s.eigenvectors.dagger() * s.eigenvectors, Matrix::identity(n)) <=
              1e-10);
    }
}
