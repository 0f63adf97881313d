#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <set>
#include <sstream>

#include "mvts/environment.hpp"
#include "mvts/errors.hpp"
#include "support/test_support.hpp"

using namespace mvts;
using mvts::testing::moments;

TEST_CASE("gen_contexts respects the box and the norm bound") {
    RngSampler sampler(1);
    for (int round = 0; round < 2000; ++round) {
        const auto contexts = gen_contexts(10, 8, sampler);
        REQUIRE(contexts.arms() == 10);
        REQUIRE(contexts.dim() == 8);
        for (std::size_t i = 0; i < 10; ++i) {
            const auto x = contexts.row(i);
            REQUIRE(norm(x) <= 1.0 + 1e-12);
            for (double v : x) REQUIRE(std::abs(v) <= 1.0);
        }
    }
}

TEST_CASE("context entries are centred") {
    // After scaling by a positive factor the sign pattern is unchanged, so the
    // scaled mean stays within the same tolerance around zero.
    RngSampler sampler(2);
    std::vector<double> entries;
    for (int round = 0; round < 1250; ++round) {
        const auto contexts = gen_contexts(10, 8, sampler);
        for (std::size_t i = 0; i < 10; ++i) {
            for (double v : contexts.row(i)) entries.push_back(v);
        }
    }
    REQUIRE(entries.size() == 100000);
    CHECK(std::abs(moments(entries).mean) < 0.01);
}

TEST_CASE("built-in portfolio table") {
    const auto truths = builtin_portfolio_truths();
    REQUIRE(truths.size() == 10);
    for (const auto& t : truths) {
        CHECK(t.mu.size() == 8);
        CHECK(t.sigma2 > 0.0);
    }
    CHECK(truths[0].mu[0] == 0.15);
    CHECK(truths[0].sigma2 == 0.89);
    CHECK(truths[9].mu[7] == 0.33);
    CHECK(truths[9].sigma2 == 0.66);
    CHECK(truths[4].mu == Vector{0.47, 0.22, 0.32, 0.09, 0.31, 0.40, -0.09, 0.35});
}

TEST_CASE("draw_reward") {
    const auto truths = builtin_portfolio_truths();
    const Vector e1{1, 0, 0, 0, 0, 0, 0, 0};

    SUBCASE("noiseless stub returns x^T mu") {
        mvts::testing::StubSampler stub;
        const Vector x{0.1, 0.2, 0.3, 0.4, -0.1, -0.2, 0.0, 0.5};
        double expected = 0.0;
        for (std::size_t i = 0; i < 8; ++i) expected += x[i] * truths[1].mu[i];
        CHECK(draw_reward(truths[1], x, stub) == doctest::Approx(expected).epsilon(1e-15));
    }
    SUBCASE("portfolio 1 moments along the first basis vector") {
        RngSampler sampler(3);
        std::vector<double> rewards(100000);
        for (double& r : rewards) r = draw_reward(truths[0], e1, sampler);
        const auto m = moments(rewards);
        CHECK(std::abs(m.mean - 0.15) < 0.01);
        CHECK(std::abs(m.variance - 0.89) < 0.03);
    }
    SUBCASE("uniform noise stays within sqrt(3) sigma") {
        const auto uniform = builtin_portfolio_truths(NoiseKind::uniform());
        RngSampler sampler(4);
        const double half_width = std::sqrt(3.0 * uniform[0].sigma2);
        for (int i = 0; i < 100000; ++i) {
            const double r = draw_reward(uniform[0], e1, sampler);
            REQUIRE(std::abs(r - 0.15) <= half_width + 1e-12);
        }
    }
}

TEST_CASE("mv_value") {
    const Vector x{1.0, 0.0};
    const Vector mu{0.5, 7.0};
    CHECK(mv_value(x, mu, 0.2, 0.0) == 0.5);
    CHECK(mv_value(x, mu, 0.2, 1.0) == doctest::Approx(0.3));

    const auto truths = builtin_portfolio_truths();
    const Vector e1{1, 0, 0, 0, 0, 0, 0, 0};
    CHECK(mv_value(e1, truths[0].mu, truths[0].sigma2, 0.1) == doctest::Approx(0.061));
}

TEST_CASE("regret") {
    SUBCASE("two arms with MV (0.3, 0.1)") {
        ContextMatrix contexts(2, 1);
        contexts.row(0)[0] = 1.0;
        contexts.row(1)[0] = 1.0;
        const std::vector<ArmTruth> truths{make_arm_truth({0.5}, 0.2, NoiseKind::gaussian()),
                                           make_arm_truth({0.3}, 0.2, NoiseKind::gaussian())};
        CHECK(regret(contexts, truths, 1.0, 0) == 0.0);
        CHECK(regret(contexts, truths, 1.0, 1) == doctest::Approx(0.2));
        CHECK(optimal_arm(contexts, truths, 1.0) == 0);
        CHECK_THROWS_AS(regret(contexts, truths, 1.0, 2), InvalidParameter);
    }
    SUBCASE("brute-force enumeration on the portfolio table") {
        const auto truths = builtin_portfolio_truths();
        RngSampler sampler(5);
        for (int round = 0; round < 200; ++round) {
            const auto contexts = gen_contexts(10, 8, sampler);
            for (double rho : {0.1, 1.0, 10.0}) {
                // Enumerate every MV value independently of mv_values.
                std::vector<double> mv(10);
                for (std::size_t i = 0; i < 10; ++i) {
                    double m = 0.0;
                    for (std::size_t j = 0; j < 8; ++j) m += contexts.row(i)[j] * truths[i].mu[j];
                    mv[i] = m - rho * truths[i].sigma2;
                }
                const double best = *std::max_element(mv.begin(), mv.end());
                for (std::size_t chosen = 0; chosen < 10; ++chosen) {
                    const double r = regret(contexts, truths, rho, chosen);
                    CHECK(r >= 0.0);
                    CHECK(r == doctest::Approx(best - mv[chosen]).epsilon(1e-12));
                }
                CHECK(regret(contexts, truths, rho, optimal_arm(contexts, truths, rho)) == 0.0);
            }
        }
    }
}

TEST_CASE("the optimal arm depends on the contexts") {
    const auto truths = builtin_portfolio_truths();
    RngSampler sampler(6);
    std::set<std::size_t> optimal;
    for (int round = 0; round < 1000; ++round) optimal.insert(optimal_arm(gen_contexts(10, 8, sampler), truths, 1.0));
    CHECK(optimal.size() >= 2);
}

TEST_CASE("arm truth validation") {
    CHECK_THROWS_AS(make_arm_truth({0.1}, 0.0, NoiseKind::gaussian()), InvalidParameter);
    CHECK_THROWS_AS(make_arm_truth({}, 1.0, NoiseKind::gaussian()), InvalidParameter);
    CHECK_THROWS_AS(make_arm_truth({0.9, 0.9}, 1.0, NoiseKind::gaussian()), InvalidParameter);
    CHECK_NOTHROW(make_arm_truth({0.9, 0.9}, 1.0, NoiseKind::gaussian(), true));
    for (const auto& t : builtin_portfolio_truths()) CHECK(norm(t.mu) <= 1.0);
}

TEST_CASE("truth tables round-trip through text") {
    const auto truths = builtin_portfolio_truths();
    std::ostringstream out;
    write_truths(out, truths);
    std::istringstream in("# header comment\n\n" + out.str());
    const auto parsed = read_truths(in, NoiseKind::gaussian(), false);
    REQUIRE(parsed.size() == truths.size());
    for (std::size_t i = 0; i < truths.size(); ++i) {
        CHECK(parsed[i].mu == truths[i].mu);
        CHECK(parsed[i].sigma2 == truths[i].sigma2);
    }
    CHECK(out.str().find(" 1  0.15  0.33 -0.10") != std::string::npos);
}

TEST_CASE("malformed truth tables") {
    auto parse = [](const std::string& text, bool allow_large = false) {
        std::istringstream in(text);
        return read_truths(in, NoiseKind::gaussian(), allow_large);
    };
    CHECK_THROWS_AS(parse("2 0.1 0.5\n"), ConfigError);
    CHECK_THROWS_AS(parse("1 0.1 0.5\n2 0.1 0.2 0.5\n"), ConfigError);
    CHECK_THROWS_AS(parse("1 0.1 abc\n"), ConfigError);
    CHECK_THROWS_AS(parse("1 0.5\n"), ConfigError);
    CHECK_THROWS_AS(parse("1 0.9 0.9 0.5\n"), ConfigError);
    CHECK(parse("1 0.9 0.9 0.5\n", true).size() == 1);
    CHECK_THROWS_AS(load_truths("/nonexistent/truths.txt", NoiseKind::gaussian(), false), IoError);
}
