#include <doctest.h>

#include <complex>

#include <Eigen/Eigenvalues>

#include "handsoff/plant.hpp"

using namespace handsoff;
using cd = std::complex<double>;

TEST_CASE("poly_from_roots expands known root sets") {
    SUBCASE("quadruple pole at the origin") {
        const auto c = poly_from_roots({cd(0), cd(0), cd(0), cd(0)});
        const std::vector<double> want{1, 0, 0, 0, 0};
        REQUIRE(c.size() == want.size());
        for (size_t i = 0; i < c.size(); ++i) CHECK(c[i] == want[i]);
    }
    SUBCASE("damped conjugate pair") {
        const auto c = poly_from_roots({cd(-0.025, 1), cd(-0.025, -1)});
        REQUIRE(c.size() == 3);
        CHECK(c[0] == 1.0);
        CHECK(c[1] == doctest::Approx(0.05).epsilon(1e-15));
        CHECK(c[2] == doctest::Approx(1.000625).epsilon(1e-15));
    }
    SUBCASE("empty product") {
        const auto c = poly_from_roots({});
        REQUIRE(c.size() == 1);
        CHECK(c[0] == 1.0);
    }
}

TEST_CASE("poly_from_roots rejects an unpaired complex root") {
    CHECK_THROWS_AS(poly_from_roots({cd(1, 2)}), std::invalid_argument);
    CHECK_THROWS_WITH_AS(poly_from_roots({cd(0, 1), cd(0, 1)}),
                         doctest::Contains("no conjugate partner"), std::invalid_argument);
}

TEST_CASE("roots round-trip through the polynomial for well-separated sets") {
    const std::vector<cd> roots{cd(-1, 2), cd(-1, -2), cd(-3), cd(0.5)};
    const auto c = poly_from_roots(roots);
    // companion matrix eigenvalues recover the multiset
    const int n = static_cast<int>(c.size()) - 1;
    Eigen::MatrixXd comp = Eigen::MatrixXd::Zero(n, n);
    for (int j = 0; j < n; ++j) comp(0, j) = -c[j + 1];
    for (int i = 1; i < n; ++i) comp(i, i - 1) = 1.0;
    const auto eig = comp.eigenvalues();
    for (const auto& r : roots) {
        double best = 1e9;
        for (int i = 0; i < eig.size(); ++i) best = std::min(best, std::abs(eig(i) - r));
        CHECK(best < 1e-6);
    }
}

TEST_CASE("realize produces the pinned companion forms") {
    SUBCASE("quadruple integrator") {
        const StateSpace ss = realize({{cd(0), cd(0), cd(0), cd(0)}, {}, 1.0});
        REQUIRE(ss.n() == 4);
        CHECK(ss.A.row(0).norm() == 0.0);
        for (int i = 1; i < 4; ++i) CHECK(ss.A(i, i - 1) == 1.0);
        CHECK(ss.B(0) == 1.0);
        CHECK(ss.B.tail(3).norm() == 0.0);
    }
    SUBCASE("damped oscillator") {
        const StateSpace ss = realize({{cd(-0.025, 1), cd(-0.025, -1)}, {}, 1.0});
        CHECK(ss.A(0, 0) == doctest::Approx(-0.05).epsilon(1e-15));
        CHECK(ss.A(0, 1) == doctest::Approx(-1.000625).epsilon(1e-15));
        CHECK(ss.A(1, 0) == 1.0);
        CHECK(ss.A(1, 1) == 0.0);
        CHECK(ss.B(0) == 1.0);
        CHECK(ss.B(1) == 0.0);
    }
}

TEST_CASE("realize: zeros with equal magnitude product give identical systems") {
    // the two six-pole benchmark plants differ only in zeros
    const std::vector<cd> poles{cd(0), cd(0), cd(0), cd(0), cd(0, 1), cd(0, -1)};
    const StateSpace a = realize({poles, {cd(2)}, 1.0});
    const StateSpace b = realize({poles, {cd(1), cd(2)}, 1.0});
    CHECK((a.A - b.A).norm() == 0.0);
    CHECK((a.B - b.B).norm() == 0.0);
    // and zeros never touch A at all
    const StateSpace c = realize({poles, {}, 1.0});
    CHECK((a.A - c.A).norm() == 0.0);
}

TEST_CASE("realize keeps the characteristic polynomial") {
    const std::vector<cd> poles{cd(-1, 0.2), cd(-1, -0.2), cd(0, 1), cd(0, -1)};
    const auto want = poly_from_roots(poles);
    const StateSpace ss = realize({poles, {cd(-2)}, 1.0});
    // coefficients from eigenvalues of A
    Eigen::VectorXcd eig = ss.A.eigenvalues();
    std::vector<cd> r(eig.data(), eig.data() + eig.size());
    // pair them back into a real polynomial via the same expansion
    std::vector<cd> paired;
    for (const auto& x : r) paired.push_back(x);
    const auto got = poly_from_roots(paired);
    REQUIRE(got.size() == want.size());
    for (size_t i = 0; i < got.size(); ++i) {
        CHECK(got[i] == doctest::Approx(want[i]).epsilon(1e-9));
    }
}

TEST_CASE("realize rejects degenerate specs") {
    CHECK_THROWS_AS(realize({{}, {}, 1.0}), std::invalid_argument);
    CHECK_THROWS_AS(realize({{cd(-1)}, {cd(-2)}, 1.0}), std::invalid_argument);  // not proper
    CHECK_THROWS_AS(realize({{cd(-1), cd(-2)}, {}, 0.0}), std::invalid_argument);
}

TEST_CASE("controllability rank") {
    SUBCASE("companion forms are controllable") {
        const StateSpace ss = realize({{cd(0), cd(0), cd(0), cd(0)}, {}, 1.0});
        CHECK(controllability_rank(ss) == 4);
    }
    SUBCASE("zero dynamics never grow the span") {
        StateSpace ss;
        ss.A = Eigen::MatrixXd::Zero(2, 2);
        ss.B = Eigen::VectorXd::Zero(2);
        ss.B(0) = 1.0;
        CHECK(controllability_rank(ss) == 1);
    }
    SUBCASE("sixth-order benchmark plant") {
        const double s8 = 2.0 * std::sqrt(2.0);
        const StateSpace ss = realize(
            {{cd(-5, 1), cd(-5, -1), cd(-0.3, 2), cd(-0.3, -2), cd(-1, s8), cd(-1, -s8)},
             {},
             1.0});
        CHECK(controllability_rank(ss) == 6);
    }
}

TEST_CASE("normality needs controllability and a nonsingular A") {
    CHECK(is_normal(realize({{cd(-0.025, 1), cd(-0.025, -1)}, {}, 1.0})));
    CHECK_FALSE(is_normal(realize({{cd(0), cd(0), cd(0), cd(0)}, {}, 1.0})));
    CHECK_FALSE(is_normal(
        realize({{cd(0), cd(0), cd(0), cd(0), cd(0, 1), cd(0, -1)}, {cd(2)}, 1.0})));
}

TEST_CASE("every companion realization is controllable; normality tracks poles at zero") {
    struct Row {
        std::vector<cd> poles;
        std::vector<cd> zeros;
        bool normal;
    };
    const double s8 = 2.0 * std::sqrt(2.0);
    const std::vector<Row> plants{
        {{cd(0), cd(0), cd(0), cd(0)}, {}, false},
        {{cd(-0.025, 1), cd(-0.025, -1)}, {}, true},
        {{cd(-1, 0.2), cd(-1, -0.2), cd(0, 1), cd(0, -1)}, {cd(-2)}, true},
        {{cd(-1, 0.2), cd(-1, -0.2), cd(-0.3, 1), cd(-0.3, -1)}, {}, true},
        {{cd(-5, 1), cd(-5, -1), cd(-0.3, 2), cd(-0.3, -2), cd(-1, s8), cd(-1, -s8)}, {}, true},
        {{cd(0), cd(0), cd(0), cd(0), cd(0, 1), cd(0, -1)}, {cd(2)}, false},
        {{cd(0), cd(0), cd(0), cd(0), cd(0, 1), cd(0, -1)}, {cd(1), cd(2)}, false},
    };
    for (const auto& row : plants) {
        const StateSpace ss = realize({row.poles, row.zeros, 1.0});
        CHECK(controllability_rank(ss) == ss.n());
        CHECK(is_normal(ss) == row.normal);
    }
}
