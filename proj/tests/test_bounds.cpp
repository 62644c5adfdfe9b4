#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>

#include "ddcert/bounds.hpp"
#include "ddcert/rng.hpp"
#include "bound_oracle.hpp"

using namespace ddcert;

TEST_CASE("direct bound with no violations") {
    CHECK(std::abs(epsilon_direct(0, 1e-5, 1000) - 0.01825) <= 1e-4);
    for (std::size_t n : {10, 100, 1000, 5000}) {
        for (double beta : {1e-2, 1e-5, 1e-9}) {
            const double closed = 1.0 - std::pow(beta / static_cast<double>(n), 1.0 / static_cast<double>(n));
            CHECK(std::abs(epsilon_direct(0, beta, n) - closed) <= 1e-9);
        }
    }
}

TEST_CASE("full-cardinality boundary") {
    for (std::size_t n : {1, 10, 100, 1000}) {
        CHECK(epsilon_compression(n, 1e-5, n) == 1.0);
        CHECK(epsilon_direct(n, 1e-5, n) == 1.0);
    }
}

TEST_CASE("argument checks") {
    CHECK_THROWS(epsilon_compression(5, 1e-5, 4));
    CHECK_THROWS(epsilon_compression(1, 0.0, 4));
    CHECK_THROWS(epsilon_direct(1, 1.0, 4));
    CHECK_THROWS(epsilon_direct(0, 0.1, 0));
    CHECK_THROWS(compression_lhs(4, 0.1, 4, 0.5));
}

TEST_CASE("compression root satisfies the defining equation") {
    for (std::size_t k : {0, 1, 2, 8, 50}) {
        const double e = epsilon_compression(k, 1e-5, 1000);
        CHECK(std::abs(oracle::compression_lhs(k, 1e-5, 1000, e) - 1.0) <= 1e-6);
        CHECK(std::abs(compression_lhs(k, 1e-5, 1000, e) - 1.0) <= 1e-9);
    }
}

TEST_CASE("direct root satisfies the defining equation") {
    for (std::size_t r : {0, 1, 6, 40}) {
        const double e = epsilon_direct(r, 1e-5, 1000);
        const double target = 1e-5 / 1000;
        CHECK(std::abs(oracle::binomial_tail(r, 1000, e) - target) <= 1e-6 * target);
    }
}

TEST_CASE("range and monotonicity") {
    for (std::size_t n : {20, 100, 1000}) {
        double prev = 0.0;
        for (std::size_t k = 0; k < n; k += std::max<std::size_t>(1, n / 10)) {
            const double e = epsilon_compression(k, 1e-5, n);
            CHECK(e >= static_cast<double>(k) / static_cast<double>(n));
            CHECK(e <= 1.0);
            CHECK(e >= prev);
            prev = e;
        }
    }
    CHECK(epsilon_compression(5, 1e-5, 1000) > epsilon_compression(1, 1e-5, 1000));
    CHECK(epsilon_compression(3, 1e-5, 2000) < epsilon_compression(3, 1e-5, 1000));
    CHECK(epsilon_compression(3, 1e-8, 1000) > epsilon_compression(3, 1e-3, 1000));
    for (std::size_t r = 0; r < 50; ++r) {
        const double e = epsilon_direct(r, 1e-5, 500);
        CHECK(e > 0.0);
        CHECK(e < 1.0);
        CHECK(epsilon_direct(r + 1, 1e-5, 500) > e);
    }
}

TEST_CASE("frozen values") {
    CHECK(epsilon_compression(2, 1e-5, 1000) == doctest::Approx(0.0203871).epsilon(1e-5));
    CHECK(epsilon_direct(0, 1e-5, 1000) == doctest::Approx(0.0182521).epsilon(1e-5));
}

TEST_CASE("comparison table") {
    const auto rows = bound_comparison_table(1e-5, {100, 250, 500, 1000}, 1);
    REQUIRE(rows.size() == 4);
    CHECK(rows[3].eps_direct == doctest::Approx(epsilon_direct(0, 1e-5, 1000)));
    for (std::size_t i = 1; i < rows.size(); ++i) {
        CHECK(rows[i].eps_compression <= rows[i - 1].eps_compression);
        CHECK(rows[i].eps_direct <= rows[i - 1].eps_direct);
    }
    // The two bounds stay close; neither dominates at every N.
    for (const auto& r : rows) CHECK(std::abs(r.eps_compression - r.eps_direct) <= 0.15 * r.eps_direct);
    for (std::size_t i = 1; i < rows.size(); ++i) {
        CHECK(std::abs(rows[i].eps_compression - rows[i].eps_direct) <
              std::abs(rows[i - 1].eps_compression - rows[i - 1].eps_direct));
    }
}

TEST_CASE("tail is a probability") {
    CHECK(log_binomial_tail(3, 10, 0.0) == 0.0);
    CHECK(std::isinf(log_binomial_tail(3, 10, 1.0)));
    CHECK(log_binomial_tail(10, 10, 0.4) == 0.0);
    CHECK(std::exp(log_binomial_tail(1, 2, 0.5)) == doctest::Approx(0.75));
}
