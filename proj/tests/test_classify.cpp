#include <doctest.h>

#include <cmath>
#include <random>
#include <stdexcept>

#include "classify.hpp"

using namespace dyadic;

namespace {

// Independent float check that the witness really breaks conservation:
// evaluate 2 sum a_j F_j directly.
double energy_derivative(const GenericModelCoefficients& c, double lambda,
                         const std::vector<double>& a) {
    const int n = static_cast<int>(a.size());
    auto at = [&](int j) { return (j >= 0 && j < n) ? a[static_cast<size_t>(j)] : 0.0; };
    double total = 0.0;
    for (int j = 0; j <= n; ++j) {
        double fj = c.c_mm * at(j - 1) * at(j - 1) + c.c_m0 * at(j - 1) * at(j) +
                    c.c_mp * at(j - 1) * at(j + 1) + c.c_00 * at(j) * at(j) +
                    c.c_0p * at(j) * at(j + 1) + c.c_pp * at(j + 1) * at(j + 1);
        total += 2.0 * at(j) * fj * std::pow(lambda, j);
    }
    return total;
}

}  // namespace

TEST_CASE("the two-parameter family classifies to its own (alpha, beta)") {
    const auto kp = GenericModelCoefficients::standard_form(1.0, 0.0, 2.0);
    auto res = classify_conservative_model(kp, 2.0);
    REQUIRE(res.conservative);
    CHECK(res.alpha == 1.0);
    CHECK(res.beta == 0.0);

    const auto mixed = GenericModelCoefficients::standard_form(1.0, 1.0, 2.0);
    res = classify_conservative_model(mixed, 2.0);
    REQUIRE(res.conservative);
    CHECK(res.alpha == 1.0);
    CHECK(res.beta == 1.0);

    const auto obukhov = GenericModelCoefficients::standard_form(0.0, 1.0, 2.0);
    res = classify_conservative_model(obukhov, 2.0);
    REQUIRE(res.conservative);
    CHECK(res.alpha == 0.0);
    CHECK(res.beta == 1.0);
}

TEST_CASE("pure self-coupling is rejected with the one-shell witness") {
    GenericModelCoefficients c;
    c.c_00 = 1.0;
    const auto res = classify_conservative_model(c, 2.0);
    REQUIRE_FALSE(res.conservative);
    REQUIRE(res.witness.size() == 1);
    CHECK(res.witness[0] == 1.0);
    CHECK(res.witness_derivative == 2.0);  // 2 * C00 * a_0^3 at a_0 = 1
    CHECK(res.witness_derivative_exact == "2");
}

TEST_CASE("random conservative pairs recover exactly, bit for bit") {
    std::mt19937 rng(2024);
    std::uniform_real_distribution<double> coin(0.0, 3.0);
    for (int trial = 0; trial < 50; ++trial) {
        const double alpha = coin(rng);
        const double beta = coin(rng);
        const auto c = GenericModelCoefficients::standard_form(alpha, beta, 2.0);
        const auto res = classify_conservative_model(c, 2.0);
        REQUIRE(res.conservative);
        CHECK(res.alpha == alpha);
        CHECK(res.beta == beta);
    }
}

TEST_CASE("single-coefficient perturbations are rejected with a working witness") {
    std::mt19937 rng(99);
    std::uniform_real_distribution<double> coin(0.0, 2.0);
    std::uniform_int_distribution<int> which(0, 5);
    for (int trial = 0; trial < 50; ++trial) {
        auto c = GenericModelCoefficients::standard_form(coin(rng), coin(rng), 2.0);
        double* slots[6] = {&c.c_mm, &c.c_m0, &c.c_mp, &c.c_00, &c.c_0p, &c.c_pp};
        *slots[which(rng)] += 1e-3;
        const auto res = classify_conservative_model(c, 2.0);
        REQUIRE_FALSE(res.conservative);
        REQUIRE_FALSE(res.witness.empty());
        // Witness entries are small integers and the derivative is nonzero
        // when re-evaluated independently.
        const double check = energy_derivative(c, 2.0, res.witness);
        CHECK(std::abs(check) > 1e-6);
        CHECK(check == doctest::Approx(res.witness_derivative).epsilon(1e-9));
    }
}

TEST_CASE("non-nearest interactions encoded via C(-1,+1) are caught") {
    GenericModelCoefficients c = GenericModelCoefficients::standard_form(1.0, 0.0, 2.0);
    c.c_mp = 0.5;
    const auto res = classify_conservative_model(c, 2.0);
    REQUIRE_FALSE(res.conservative);
    CHECK(std::abs(energy_derivative(c, 2.0, res.witness)) > 1e-9);
}

TEST_CASE("lambda at or below 1 is a parameter error") {
    CHECK_THROWS_AS(classify_conservative_model(GenericModelCoefficients{}, 1.0),
                    std::invalid_argument);
    CHECK_THROWS_AS(classify_conservative_model(GenericModelCoefficients{}, 0.5),
                    std::invalid_argument);
}

TEST_CASE("classification is exact for non-dyadic lambda too") {
    const double lambda = 2.5;
    const auto c = GenericModelCoefficients::standard_form(0.3, 0.7, lambda);
    const auto res = classify_conservative_model(c, lambda);
    REQUIRE(res.conservative);
    CHECK(res.alpha == 0.3);
    CHECK(res.beta == 0.7);
}
