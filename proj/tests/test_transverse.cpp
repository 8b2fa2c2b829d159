#include <catch2/catch_amalgamated.hpp>

#include <cmath>

#include "loopspec/transverse_well.hpp"

using namespace loopspec;

TEST_CASE("dirichlet delta well ground state") {
    // beta = 20, a = 1: tanh(k) = k/10 has its root near k = 10
    const auto z = zeta_plus(1.0, 20.0);
    REQUIRE(z.has_value());
    CHECK(*z == Catch::Approx(-99.99999917553849).margin(1e-6));
    const double k = std::sqrt(-*z);
    CHECK(std::abs(matching_residual(k, {1.0, 20.0, 0.0, TransverseSide::plus})) < 1e-12);
    // strictly above the leading term
    CHECK(*z > -100.0);
}

TEST_CASE("dirichlet well binds only for beta a > 2") {
    CHECK_FALSE(zeta_plus(0.1, 20.0).has_value());   // beta a = 2 exactly
    CHECK_FALSE(zeta_plus(0.09, 20.0).has_value());
    CHECK(zeta_plus(0.11, 20.0).has_value());
}

TEST_CASE("strong coupling pushes zeta+ toward -beta^2/4") {
    // gap is beta^2 exp(-beta a) asymptotically
    const auto z = zeta_plus(1.0, 30.0);
    REQUIRE(z.has_value());
    const double gap = *z + 225.0;
    CHECK(gap > 0.0);
    CHECK(gap < 2.0 * 900.0 * std::exp(-15.0));  // scaled envelope
    CHECK(gap == Catch::Approx(4.0 * 225.0 * std::exp(-30.0)).epsilon(0.05));
}

TEST_CASE("robin well ground state and monotonicity in gamma_plus") {
    const auto r0 = zeta_minus(1.0, 20.0, 0.0);
    const auto r1 = zeta_minus(1.0, 20.0, 1.0);
    CHECK(r1.zeta == Catch::Approx(-100.000001007675).margin(1e-6));
    CHECK(r1.uniqueness_guaranteed);

    // Neumann-end well already lies below the Dirichlet-end well
    const auto zp = zeta_plus(1.0, 20.0);
    REQUIRE(zp.has_value());
    CHECK(r0.zeta <= *zp);
    // and below the leading term
    CHECK(r0.zeta < -100.0);
    CHECK(r1.zeta < -100.0);
    // growing the boundary attraction lowers the eigenvalue
    const auto r05 = zeta_minus(1.0, 20.0, 0.5);
    CHECK(r05.zeta < r0.zeta);
    CHECK(r1.zeta < r05.zeta);
}

TEST_CASE("zeta+ is non-increasing in beta and in a") {
    double prev = 0.0;
    bool first = true;
    for (double beta : {21.0, 24.0, 28.0, 33.0}) {
        const auto z = zeta_plus(0.5, beta);
        REQUIRE(z.has_value());
        if (!first) CHECK(*z <= prev + 1e-13);
        prev = *z;
        first = false;
    }
    first = true;
    for (double a : {0.15, 0.2, 0.3, 0.5}) {
        const auto z = zeta_plus(a, 20.0);
        REQUIRE(z.has_value());
        if (!first) CHECK(*z <= prev + 1e-13);
        prev = *z;
        first = false;
    }
}

TEST_CASE("est2 bound report at beta = 20, a = 1") {
    const Est2Report r = est2_check(1.0, 20.0, 1.0);
    CHECK(r.hypothesis_a);
    CHECK(r.hypothesis_b);
    CHECK(r.zeta_plus_exists);
    CHECK(r.strict_lower_plus);
    CHECK(r.strict_upper_minus);
    // at a = 1 > 1/2 both exponent readings envelope the gap
    CHECK(r.upper_plus_literal);
    CHECK(r.upper_plus_scaled);
    CHECK(r.lower_minus_literal);
    CHECK(r.lower_minus_scaled);
}

TEST_CASE("est2 under the width schedule: the two exponent readings differ") {
    // a(50) = 6 ln(50)/50 < 1/2: the literal exp(-beta/2) envelope is tighter
    // than the true gap ~ beta^2 exp(-beta a) and fails; the scaled one holds
    const double beta = 50.0, a = 6.0 * std::log(50.0) / 50.0;
    const Est2Report r = est2_check(a, beta, 1.0);
    CHECK(r.zeta_plus_exists);
    CHECK(r.strict_lower_plus);
    CHECK(r.strict_upper_minus);
    CHECK_FALSE(r.upper_plus_literal);
    CHECK(r.upper_plus_scaled);
    CHECK(r.lower_minus_literal);  // lower envelope is generous either way
    CHECK(r.lower_minus_scaled);
}

TEST_CASE("transverse low spectrum, dirichlet side") {
    const auto sp = transverse_low_spectrum(1.0, 20.0, 0.0, TransverseSide::plus, 4);
    REQUIRE(sp.values.size() == 4);
    CHECK(sp.negative_count == 1);
    CHECK(sp.values[0] == Catch::Approx(-99.99999917553849).margin(1e-6));
    CHECK(sp.parity[0] == 'e');
    // first excited state: odd box mode (pi/a)^2, blind to the delta
    CHECK(sp.values[1] == Catch::Approx(M_PI * M_PI).margin(1e-10));
    CHECK(sp.parity[1] == 'o');
    CHECK(sp.xi2 >= 0.0);
    CHECK(sp.decay_rate[0] == Catch::Approx(std::sqrt(-sp.values[0])));
}

TEST_CASE("odd modes are independent of the coupling") {
    const auto s1 = transverse_low_spectrum(0.7, 20.0, 0.0, TransverseSide::plus, 6);
    const auto s2 = transverse_low_spectrum(0.7, 35.0, 0.0, TransverseSide::plus, 6);
    std::vector<double> odd1, odd2;
    for (std::size_t i = 0; i < s1.values.size(); ++i)
        if (s1.parity[i] == 'o') odd1.push_back(s1.values[i]);
    for (std::size_t i = 0; i < s2.values.size(); ++i)
        if (s2.parity[i] == 'o') odd2.push_back(s2.values[i]);
    REQUIRE(odd1.size() >= 2);
    for (std::size_t i = 0; i < std::min(odd1.size(), odd2.size()); ++i) {
        CHECK(odd1[i] == Catch::Approx(odd2[i]).margin(1e-12));
        const double k = (i + 1) * M_PI / 0.7;
        CHECK(odd1[i] == Catch::Approx(k * k).margin(1e-9));
    }
}

TEST_CASE("zero coupling gives the dirichlet box") {
    const double a = 0.8;
    const auto sp = transverse_low_spectrum(a, 0.0, 0.0, TransverseSide::plus, 5);
    REQUIRE(sp.values.size() == 5);
    CHECK(sp.negative_count == 0);
    for (int k = 1; k <= 5; ++k) {
        const double expect = std::pow(k * M_PI / (2.0 * a), 2);
        CHECK(sp.values[static_cast<std::size_t>(k - 1)] == Catch::Approx(expect).margin(1e-9));
    }
}

TEST_CASE("robin side low spectrum in the theorem regime") {
    const auto sp = transverse_low_spectrum(0.075, 50.0, 1.0, TransverseSide::minus, 3);
    REQUIRE(sp.values.size() >= 2);
    CHECK(sp.negative_count == 1);
    CHECK(sp.values[0] < -625.0);
    CHECK(sp.values[1] >= 0.0);  // xi_2 >= 0 as the proof requires
}
