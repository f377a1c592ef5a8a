#include <doctest.h>

#include "handsoff/solver.hpp"
#include "oracles.hpp"

using namespace handsoff;

TEST_CASE("prox_l1 closed form") {
    Eigen::VectorXd v(3);
    v << 3, -0.5, 0;
    const Eigen::VectorXd p = prox_l1(v, 1.0);
    CHECK(p(0) == 2.0);
    CHECK(p(1) == 0.0);
    CHECK(p(2) == 0.0);
    CHECK((prox_l1(v, 0.0) - v).norm() == 0.0);  // identity at kappa = 0
    // the kink |v| = kappa maps to zero
    Eigen::VectorXd w(1);
    w << 1.0;
    CHECK(prox_l1(w, 1.0)(0) == 0.0);
}

TEST_CASE("prox_en closed form") {
    Eigen::VectorXd v(1);
    v << 2.0;
    CHECK(prox_en(v, 1.0, 0.5)(0) == doctest::Approx(0.5).epsilon(1e-15));
    Eigen::VectorXd r = oracle::random_vector(6, 3.0);
    CHECK((prox_en(r, 0.7, 0.0) - prox_l1(r, 0.7)).norm() == 0.0);  // reduces to soft threshold
}

TEST_CASE("prox_clot closed form edge cases") {
    const Eigen::VectorXd z = Eigen::VectorXd::Zero(4);
    CHECK(prox_clot(z, 0.3, 0.2).norm() == 0.0);
    // small vectors are killed by the block shrink when kappa1 = 0
    Eigen::VectorXd small(3);
    small << 0.1, -0.1, 0.05;
    CHECK(prox_clot(small, 0.0, small.norm() + 0.01).norm() == 0.0);
}

TEST_CASE("prox oracle suite: 200 random instances per operator") {
    std::uniform_real_distribution<double> kdist(0.05, 1.5);
    int checked = 0;
    for (int trial = 0; trial < 200; ++trial) {
        const int n = 1 + trial % 7;
        const Eigen::VectorXd v = oracle::random_vector(n, 4.0);
        const double k1 = kdist(oracle::rng());
        const double k2 = kdist(oracle::rng());

        const Eigen::VectorXd l1 = prox_l1(v, k1);
        const Eigen::VectorXd en = prox_en(v, k1, k2);
        for (int i = 0; i < n; ++i) {
            CHECK(l1(i) == doctest::Approx(oracle::prox_abs_1d(v(i), k1)).epsilon(1e-5));
            CHECK(en(i) == doctest::Approx(oracle::prox_en_1d(v(i), k1, k2)).epsilon(1e-5));
        }
        const Eigen::VectorXd clot = prox_clot(v, k1, k2);
        const Eigen::VectorXd ref = oracle::prox_clot_nd(v, k1, k2);
        CHECK((clot - ref).lpNorm<Eigen::Infinity>() < 1e-5);
        ++checked;
    }
    CHECK(checked == 200);
}

TEST_CASE("prox operators on 5-vectors with the benchmark kappa grid") {
    // the composition rule behind prox_clot, exercised where it matters
    for (const double k1 : {0.1, 1.0}) {
        for (const double k2 : {0.1, 1.0}) {
            for (int trial = 0; trial < 10; ++trial) {
                const Eigen::VectorXd v = oracle::random_vector(5, 2.0);
                const Eigen::VectorXd got = prox_clot(v, k1, k2);
                const Eigen::VectorXd want = oracle::prox_clot_nd(v, k1, k2);
                CHECK((got - want).lpNorm<Eigen::Infinity>() < 1e-5);
            }
        }
    }
}

TEST_CASE("prox variational inequality") {
    // kappa g(z) - kappa g(p) + <p - v, z - p> >= 0 for the returned p
    auto check_vi = [](const Eigen::VectorXd& v, const Eigen::VectorXd& p,
                       const std::function<double(const Eigen::VectorXd&)>& g) {
        for (int trial = 0; trial < 20; ++trial) {
            const Eigen::VectorXd z = oracle::random_vector(static_cast<int>(v.size()), 5.0);
            const double lhs = g(z) - g(p) + (p - v).dot(z - p);
            CHECK(lhs >= -1e-8);
        }
    };
    const Eigen::VectorXd v = oracle::random_vector(6, 3.0);
    const double k1 = 0.4, k2 = 0.9;
    check_vi(v, prox_l1(v, k1), [&](const Eigen::VectorXd& z) { return k1 * z.lpNorm<1>(); });
    check_vi(v, prox_en(v, k1, k2), [&](const Eigen::VectorXd& z) {
        return k1 * z.lpNorm<1>() + k2 * z.squaredNorm();
    });
    check_vi(v, prox_clot(v, k1, k2), [&](const Eigen::VectorXd& z) {
        return k1 * z.lpNorm<1>() + k2 * z.norm();
    });
}

TEST_CASE("project_box") {
    Eigen::VectorXd v(3);
    v << 2, -3, 0.5;
    const Eigen::VectorXd p = project_box(v, 1.0);
    CHECK(p(0) == 1.0);
    CHECK(p(1) == -1.0);
    CHECK(p(2) == 0.5);
    CHECK((project_box(p, 1.0) - p).norm() == 0.0);  // idempotent
    Eigen::VectorXd inside(2);
    inside << 0.2, -0.7;
    CHECK((project_box(inside, 1.0) - inside).norm() == 0.0);
}
