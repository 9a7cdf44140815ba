#include <doctest.h>

#include <random>

#include "hopflab/core_model.hpp"
#include "hopflab/errors.hpp"
#include "oracles.hpp"
#include "support.hpp"

using namespace hopflab;

TEST_CASE("coefficients match direct trig on random momenta") {
    std::mt19937_64 rng(7);
    std::uniform_real_distribution<double> u(-kPi, kPi), par(-2, 2);
    for (int i = 0; i < 500; ++i) {
        ModelParams p{par(rng) - 2, par(rng), par(rng)};
        const double x = u(rng), y = u(rng), z = u(rng);
        const CoeffVector a = coeffs(Momentum(x, y, z), p);
        const oracle::A o = oracle::coeffs(x, y, z, support::op(p));
        CHECK(a.a1 == doctest::Approx(o.a1).epsilon(1e-12));
        CHECK(a.a2 == 0.0);
        CHECK(a.a3 == doctest::Approx(o.a3).epsilon(1e-12));
        CHECK(eigensystem(Momentum(x, y, z), p).gap ==
              doctest::Approx(oracle::gap(x, y, z, support::op(p))).epsilon(1e-9));
    }
}

TEST_CASE("hamiltonian is periodic and hermitian") {
    ModelParams p{-3, 0.4, 0.2};
    std::mt19937_64 rng(11);
    std::uniform_real_distribution<double> u(-kPi, kPi);
    for (int i = 0; i < 100; ++i) {
        const double x = u(rng), y = u(rng), z = u(rng);
        const Matrix2 h = hamiltonian(Momentum(x, y, z), p);
        const Matrix2 g = hamiltonian(Momentum(x + kTwoPi, y - 2 * kTwoPi, z + kTwoPi), p);
        for (int r = 0; r < 2; ++r)
            for (int c = 0; c < 2; ++c) {
                CHECK(std::abs(h[r][c] - g[r][c]) < 1e-12);
                CHECK(std::abs(h[r][c] - std::conj(h[c][r])) < 1e-15);
            }
    }
}

TEST_CASE("eigenvectors satisfy H v = E v in the real gauge") {
    ModelParams p;
    std::mt19937_64 rng(3);
    std::uniform_real_distribution<double> u(-kPi, kPi);
    for (int i = 0; i < 200; ++i) {
        const Momentum k(u(rng), u(rng), u(rng));
        const EigenPair e = eigensystem(k, p);
        const Matrix2 h = hamiltonian(k, p);
        for (auto [v, E] : {std::pair{e.v_minus, e.e_minus}, std::pair{e.v_plus, e.e_plus}}) {
            CHECK(std::abs(h[0][0] * v[0] + h[0][1] * v[1] - E * v[0]) < 1e-10);
            CHECK(std::abs(h[1][0] * v[0] + h[1][1] * v[1] - E * v[1]) < 1e-10);
            CHECK(std::norm(v[0]) + std::norm(v[1]) == doctest::Approx(1.0));
            CHECK(v[0].imag() == 0.0);
        }
        CHECK(e.e_plus - e.e_minus == doctest::Approx(e.gap));
    }
}

TEST_CASE("nodes are flagged degenerate") {
    const EigenPair e = eigensystem(Momentum(kPi / 3, 0, 0), ModelParams{});
    CHECK(e.degenerate);
    CHECK(e.gap < 1e-10);
    CHECK_FALSE(eigensystem(Momentum(0, 0, 0), ModelParams{}).degenerate);
}

TEST_CASE("momentum wraps into the zone") {
    const Momentum k(kPi + 0.1, -kPi - 0.1, 3 * kTwoPi);
    CHECK(k.kx == doctest::Approx(-kPi + 0.1));
    CHECK(k.ky == doctest::Approx(kPi - 0.1));
    CHECK(k.kz == doctest::Approx(0.0).epsilon(1e-12));
    CHECK(Momentum(kPi, 0, 0) == Momentum(-kPi, 0, 0));
    CHECK(torus_distance(Momentum(3.1, 0, 0), Momentum(-3.1, 0, 0)) == doctest::Approx(kTwoPi - 6.2));
    CHECK(wrap_angle(kPi) == doctest::Approx(-kPi));
}

TEST_CASE("PT holds while P and T break separately") {
    std::mt19937_64 rng(5);
    std::uniform_real_distribution<double> u(-kPi, kPi);
    std::vector<Momentum> ks;
    for (int i = 0; i < 256; ++i) ks.emplace_back(u(rng), u(rng), u(rng));
    for (double eta : {-0.5, 0.0, 0.5, 1.5}) {
        const SymmetryReport r = symmetry_report(ModelParams{-3, 0, eta}, ks);
        CHECK(r.pt_holds);
        CHECK(r.max_imag == 0.0);
        CHECK(r.p_witness.deviation > 1e-3);
        CHECK(r.t_witness.deviation > 1e-3);
        // witnesses are genuine: recompute the deviation at the reported momentum
        const Matrix2 a = hamiltonian(-r.p_witness.k, ModelParams{-3, 0, eta});
        const Matrix2 b = hamiltonian(r.p_witness.k, ModelParams{-3, 0, eta});
        double dev = 0;
        for (int i = 0; i < 2; ++i)
            for (int j = 0; j < 2; ++j) dev += std::norm(a[i][j] - b[i][j]);
        CHECK(std::sqrt(dev) == doctest::Approx(r.p_witness.deviation));
    }
    CHECK_THROWS_AS(symmetry_report(ModelParams{}, {}), ValidationError);
}

TEST_CASE("parameter validation") {
    CHECK_THROWS_AS((ModelParams{-3, 0, 0, -1}).validate(), ValidationError);
    CHECK_THROWS_AS((ModelParams{NAN, 0, 0, 10}).validate(), ValidationError);
    CHECK_NOTHROW(ModelParams{}.validate());
}
