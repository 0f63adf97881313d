#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <random>

#include "mvts/environment.hpp"
#include "mvts/errors.hpp"
#include "mvts/policies.hpp"
#include "support/test_support.hpp"

using namespace mvts;
using mvts::testing::CountingSampler;
using mvts::testing::StubSampler;

namespace {

ArmPosterior scalar_arm(double x, double r) {
    ArmPosterior arm(1);
    const double xs[] = {x};
    arm.observe(xs, r);
    return arm;
}

ContextMatrix scalar_contexts(std::initializer_list<double> values) {
    ContextMatrix contexts(values.size(), 1);
    std::size_t i = 0;
    for (double v : values) contexts.row(i++)[0] = v;
    return contexts;
}

StubSampler pinned_lambda_one() {
    StubSampler stub;
    stub.gamma_fn = [](double, double) { return 1.0; };
    return stub;
}

// K arms with d-dimensional states, each fed `pulls` random observations.
std::vector<ArmPosterior> random_states(std::mt19937_64& gen, std::size_t arms, std::size_t d, int pulls) {
    std::normal_distribution<double> reward(0.0, 1.0);
    std::vector<ArmPosterior> states(arms, ArmPosterior(d));
    for (auto& state : states) {
        for (int i = 0; i < pulls; ++i) state.observe(mvts::testing::random_context(gen, d), reward(gen));
    }
    return states;
}

ContextMatrix random_contexts(std::uint64_t seed, std::size_t arms, std::size_t d) {
    RngSampler sampler(seed);
    return gen_contexts(arms, d, sampler);
}

}  // namespace

TEST_CASE("dn_constants") {
    // Oracle evaluated in long double from the closed form.
    const long double log_term = std::log(400.0L);
    const long double v = std::sqrt(4.0L / 0.25L * 8.0L * log_term);
    const long double u = 8.0L * 8.0L * log_term * std::sqrt(1.0L / 0.25L);
    const auto c = dn_constants(1.0, 0.25, 0.1, 8, 10);
    CHECK(c.v == doctest::Approx(static_cast<double>(v)).epsilon(1e-14));
    CHECK(c.u == doctest::Approx(static_cast<double>(u)).epsilon(1e-14));
    CHECK(c.v == doctest::Approx(27.69).epsilon(1e-3));
    CHECK(c.u == doctest::Approx(766.9).epsilon(1e-4));

    CHECK_THROWS_AS(dn_constants(1.0, 0.6, 0.1, 8, 10), InvalidParameter);
    CHECK_THROWS_AS(dn_constants(1.0, 0.25, 1.0, 8, 10), InvalidParameter);
    CHECK_THROWS_AS(dn_constants(0.0, 0.25, 0.1, 8, 10), InvalidParameter);
    CHECK_THROWS_AS(dn_constants(1.0, 0.25, 0.1, 0, 10), InvalidParameter);

    const long double ts = std::sqrt(24.0L / 0.25L * 8.0L * std::log(10.0L));
    CHECK(ts_a_constant(1.0, 0.25, 0.1, 8) == doctest::Approx(static_cast<double>(ts)).epsilon(1e-14));
    CHECK_THROWS_AS(ts_a_constant(1.0, 1.0, 0.1, 8), InvalidParameter);
}

TEST_CASE("argmax_lowest breaks ties toward the lowest index") {
    const double a[] = {0.1, 0.3, 0.3, 0.2};
    CHECK(argmax_lowest(a) == 1);
    const double b[] = {-1.0, -1.0};
    CHECK(argmax_lowest(b) == 0);
}

TEST_CASE("choose_mvts_d under a stub sampler") {
    SUBCASE("pinned lambda = 1 and zero perturbation: scores 0.5 and 0.3") {
        // Both arms: A = 2, b = 2, mean estimate 1. sigma~^2 = 1, rho = 0.5.
        const std::vector<ArmPosterior> arms{scalar_arm(1.0, 2.0), scalar_arm(1.0, 2.0)};
        StubSampler stub = pinned_lambda_one();
        const auto decision = choose_mvts_d(arms, scalar_contexts({1.0, 0.8}), 0.5, stub);
        CHECK(decision.arm == 0);
        REQUIRE(decision.sampled_scores.size() == 2);
        CHECK(decision.sampled_scores[0] == doctest::Approx(0.5));
        CHECK(decision.sampled_scores[1] == doctest::Approx(0.3));
        CHECK(decision.sampled_variances == std::vector<double>{1.0, 1.0});
    }
    SUBCASE("gamma pinned at its mean gives x^T mu_hat - rho D / C") {
        // D / C = 1 / 0.5 = 2.
        const std::vector<ArmPosterior> arms{scalar_arm(1.0, 2.0), scalar_arm(1.0, 2.0)};
        StubSampler stub;
        const auto decision = choose_mvts_d(arms, scalar_contexts({0.5, 0.9}), 0.1, stub);
        CHECK(decision.sampled_scores[0] == doctest::Approx(0.5 - 0.2));
        CHECK(decision.sampled_scores[1] == doctest::Approx(0.9 - 0.2));
        CHECK(decision.arm == 1);
    }
    SUBCASE("equal scores choose arm 0") {
        const std::vector<ArmPosterior> arms(3, scalar_arm(1.0, 2.0));
        StubSampler stub;
        CHECK(choose_mvts_d(arms, scalar_contexts({0.4, 0.4, 0.4}), 1.0, stub).arm == 0);
    }
    SUBCASE("K = 1") {
        const std::vector<ArmPosterior> arms{scalar_arm(0.3, -5.0)};
        RngSampler sampler(1);
        CHECK(choose_mvts_d(arms, scalar_contexts({1.0}), 3.0, sampler).arm == 0);
    }
    SUBCASE("uninitialized arm") {
        const std::vector<ArmPosterior> arms{scalar_arm(1.0, 1.0), ArmPosterior(1)};
        StubSampler stub;
        CHECK_THROWS_AS(choose_mvts_d(arms, scalar_contexts({1.0, 1.0}), 1.0, stub), PolicyStateError);
    }
}

TEST_CASE("choose_mvts_dn under a stub sampler") {
    SUBCASE("zero perturbations: scores 0.2 and 0.4") {
        // Mean estimate 1, D / C = 2, rho = 0.1.
        const std::vector<ArmPosterior> arms{scalar_arm(1.0, 2.0), scalar_arm(1.0, 2.0)};
        StubSampler stub;
        const auto decision = choose_mvts_dn(arms, scalar_contexts({0.4, 0.6}), 0.1, 1.0, 1.0, stub);
        CHECK(decision.sampled_scores[0] == doctest::Approx(0.2));
        CHECK(decision.sampled_scores[1] == doctest::Approx(0.4));
        CHECK(decision.arm == 1);
    }
    SUBCASE("variance draw shifts by u / sqrt(n) and may go negative") {
        const std::vector<ArmPosterior> arms{scalar_arm(1.0, 2.0)};
        StubSampler stub;
        stub.normal_value = -3.0;
        const auto decision = choose_mvts_dn(arms, scalar_contexts({0.0}), 1.0, 1.0, 1e-9, stub);
        CHECK(decision.sampled_variances[0] == doctest::Approx(2.0 - 3.0));
        CHECK(decision.sampled_scores[0] == doctest::Approx(1.0).epsilon(1e-6));
    }
    SUBCASE("K = 3 identical states and contexts choose arm 0") {
        const std::vector<ArmPosterior> arms(3, scalar_arm(0.5, 1.0));
        StubSampler stub;
        CHECK(choose_mvts_dn(arms, scalar_contexts({0.7, 0.7, 0.7}), 1.0, 1.0, 1.0, stub).arm == 0);
    }
    SUBCASE("nonpositive u or v is rejected") {
        const std::vector<ArmPosterior> arms{scalar_arm(1.0, 2.0)};
        StubSampler stub;
        CHECK_THROWS_AS(choose_mvts_dn(arms, scalar_contexts({1.0}), 1.0, 0.0, 1.0, stub), InvalidParameter);
        CHECK_THROWS_AS(choose_mvts_dn(arms, scalar_contexts({1.0}), 1.0, 1.0, -1.0, stub), InvalidParameter);
        CHECK_THROWS_AS(make_policy({PolicyKind::mvts_dn, 1.0, 0.0, 1.0}, 2, 1), InvalidParameter);
    }
}

TEST_CASE("choose_ts_a") {
    SUBCASE("stub sampler gives the argmax of x^T mu_hat") {
        // Arm 0 mean estimate 1, arm 1 mean estimate 2.
        const std::vector<ArmPosterior> arms{scalar_arm(1.0, 2.0), scalar_arm(1.0, 4.0)};
        StubSampler stub;
        const auto decision = choose_ts_a(arms, scalar_contexts({0.9, 0.5}), 1.0, stub);
        CHECK(decision.sampled_scores[0] == doctest::Approx(0.9));
        CHECK(decision.sampled_scores[1] == doctest::Approx(1.0));
        CHECK(decision.arm == 1);
        CHECK(decision.sampled_variances.empty());
    }
    SUBCASE("K = 1") {
        const std::vector<ArmPosterior> arms{scalar_arm(1.0, 2.0)};
        RngSampler sampler(3);
        CHECK(choose_ts_a(arms, scalar_contexts({-1.0}), 1.0, sampler).arm == 0);
    }
    SUBCASE("rho never changes the decision") {
        std::mt19937_64 gen(4);
        const auto contexts = random_contexts(5, 6, 4);
        for (double rho : {0.5, 10.0, 1000.0}) {
            auto low = std::make_unique<LinearPolicy>(PolicyParams{PolicyKind::ts_a, 0.0}, 6, 4);
            auto high = std::make_unique<LinearPolicy>(PolicyParams{PolicyKind::ts_a, rho}, 6, 4);
            for (std::size_t arm = 0; arm < 6; ++arm) {
                for (int k = 0; k < 3; ++k) {
                    const auto x = mvts::testing::random_context(gen, 4);
                    low->update(arm, x, 0.1 * k);
                    high->update(arm, x, 0.1 * k);
                }
            }
            RngSampler a(77);
            RngSampler b(77);
            const auto da = low->choose(contexts, a);
            const auto db = high->choose(contexts, b);
            CHECK(da.arm == db.arm);
            CHECK(da.sampled_scores == db.sampled_scores);
        }
    }
}

TEST_CASE("choose_cf_mvts") {
    SUBCASE("tau = 1, theta = mu_hat: scores (0, -1)") {
        std::vector<CfArmPosterior> arms(2);
        arms[0].observe(1.0);
        arms[1].observe(0.0);
        StubSampler stub = pinned_lambda_one();
        const auto decision = choose_cf_mvts(arms, 1.0, stub);
        CHECK(decision.arm == 0);
        CHECK(decision.sampled_scores[0] == doctest::Approx(0.0));
        CHECK(decision.sampled_scores[1] == doctest::Approx(-1.0));
    }
    SUBCASE("K = 1") {
        std::vector<CfArmPosterior> arms(1);
        arms[0].observe(-2.0);
        RngSampler sampler(2);
        CHECK(choose_cf_mvts(arms, 1.0, sampler).arm == 0);
    }
    SUBCASE("contexts are ignored") {
        CfMvtsPolicy policy(1.0, 4);
        for (std::size_t arm = 0; arm < 4; ++arm) {
            const double x[] = {0.0, 0.0};
            policy.update(arm, x, 0.1 * static_cast<double>(arm));
            policy.update(arm, x, -0.2 * static_cast<double>(arm));
        }
        auto contexts = random_contexts(8, 4, 2);
        ContextMatrix permuted(4, 2);
        for (std::size_t i = 0; i < 4; ++i) std::copy_n(contexts.row(3 - i).begin(), 2, permuted.row(i).begin());
        RngSampler a(5);
        RngSampler b(5);
        CHECK(policy.choose(contexts, a).sampled_scores == policy.choose(permuted, b).sampled_scores);
    }
    SUBCASE("uninitialized arm") {
        std::vector<CfArmPosterior> arms(2);
        arms[0].observe(1.0);
        StubSampler stub;
        CHECK_THROWS_AS(choose_cf_mvts(arms, 1.0, stub), PolicyStateError);
    }
}

TEST_CASE("choose_uniform") {
    RngSampler one(1);
    CHECK(choose_uniform(1, one).arm == 0);

    RngSampler sampler(2024);
    std::vector<int> counts(10, 0);
    for (int i = 0; i < 100000; ++i) ++counts[choose_uniform(10, sampler).arm];
    for (int c : counts) CHECK(std::abs(c / 100000.0 - 0.1) < 0.01);

    RngSampler a(9);
    RngSampler b(9);
    for (int i = 0; i < 100; ++i) CHECK(choose_uniform(7, a).arm == choose_uniform(7, b).arm);
}

TEST_CASE("property: rho = 0 scores equal the sampled means") {
    std::mt19937_64 gen(12);
    for (int trial = 0; trial < 50; ++trial) {
        const auto states = random_states(gen, 10, 8, 3);
        const auto contexts = random_contexts(100 + trial, 10, 8);
        RngSampler s1(trial);
        RngSampler s2(trial);
        for (const auto& decision : {choose_mvts_d(states, contexts, 0.0, s1),
                                     choose_mvts_dn(states, contexts, 0.0, 1.0, 1.0, s2)}) {
            CHECK(decision.sampled_scores == decision.sampled_means);
            CHECK(decision.arm == argmax_lowest(decision.sampled_means));
        }
    }
}

TEST_CASE("property: score gap is monotone in rho at fixed draws") {
    std::mt19937_64 gen(13);
    const double rhos[] = {0.0, 0.1, 1.0, 2.5, 10.0};
    for (int trial = 0; trial < 30; ++trial) {
        const auto states = random_states(gen, 5, 3, 4);
        const auto contexts = random_contexts(200 + trial, 5, 3);
        std::vector<Decision> by_rho;
        std::vector<Decision> by_rho_dn;
        for (double rho : rhos) {
            RngSampler s(trial);
            by_rho.push_back(choose_mvts_d(states, contexts, rho, s));
            RngSampler s_dn(trial);
            by_rho_dn.push_back(choose_mvts_dn(states, contexts, rho, 1.0, 1.0, s_dn));
        }
        for (const auto* series : {&by_rho, &by_rho_dn}) {
            const auto& variances = series->front().sampled_variances;
            for (std::size_t i = 0; i < variances.size(); ++i) {
                for (std::size_t j = 0; j < variances.size(); ++j) {
                    if (!(variances[i] > variances[j])) continue;
                    for (std::size_t k = 1; k < series->size(); ++k) {
                        const auto& lo = (*series)[k - 1].sampled_scores;
                        const auto& hi = (*series)[k].sampled_scores;
                        CHECK(hi[i] - hi[j] <= lo[i] - lo[j] + 1e-9);
                    }
                }
            }
        }
    }
}

TEST_CASE("draw-count accounting per round") {
    std::mt19937_64 gen(14);
    const std::size_t k = 10;
    const std::size_t d = 8;
    const auto states = random_states(gen, k, d, 2);
    const auto contexts = random_contexts(3, k, d);

    RngSampler inner(1);
    CountingSampler counting(inner);
    choose_mvts_d(states, contexts, 1.0, counting);
    CHECK(counting.gammas == k);
    CHECK(counting.normals == k * d);

    CountingSampler ts(inner);
    choose_ts_a(states, contexts, 1.0, ts);
    CHECK(ts.gammas == 0);
    CHECK(ts.normals == k * d);

    CountingSampler dn(inner);
    choose_mvts_dn(states, contexts, 1.0, 1.0, 1.0, dn);
    CHECK(dn.gammas == 0);
    CHECK(dn.normals == k * (d + 1));
}

TEST_CASE("identical inputs give bit-identical decisions") {
    std::mt19937_64 gen(15);
    const auto states = random_states(gen, 10, 8, 6);
    const auto contexts = random_contexts(4, 10, 8);
    RngSampler a(31);
    RngSampler b(31);
    for (int i = 0; i < 20; ++i) {
        const auto da = choose_mvts_d(states, contexts, 1.0, a);
        const auto db = choose_mvts_d(states, contexts, 1.0, b);
        CHECK(da.arm == db.arm);
        CHECK(da.sampled_scores == db.sampled_scores);
        CHECK(da.sampled_variances == db.sampled_variances);
    }
}

TEST_CASE("policy update only touches the pulled arm") {
    LinearPolicy policy({PolicyKind::mvts_d, 1.0}, 3, 2);
    const double x0[] = {0.3, 0.4};
    for (std::size_t arm = 0; arm < 3; ++arm) policy.update(arm, x0, 0.5 * static_cast<double>(arm));
    const std::vector<ArmPosterior> before(policy.states().begin(), policy.states().end());

    const double x[] = {-0.6, 0.2};
    policy.update(1, x, 0.9);
    CHECK(policy.states()[0] == before[0]);
    CHECK(policy.states()[2] == before[2]);

    ArmPosterior expected = before[1];
    expected.observe(x, 0.9);
    CHECK(policy.states()[1] == expected);

    CHECK_THROWS_AS(policy.update(3, x, 0.0), InvalidParameter);

    CfMvtsPolicy cf(1.0, 2);
    cf.update(0, x, 1.0);
    CHECK(cf.states()[0] == CfArmPosterior{1.0, 1.0, 0.5, 0.5});
    CHECK_FALSE(cf.states()[1].initialized());

    UniformPolicy uniform(2);
    CHECK_NOTHROW(uniform.update(1, x, 1.0));
    CHECK_THROWS_AS(uniform.update(2, x, 1.0), InvalidParameter);
}

TEST_CASE("make_policy validation and kinds") {
    CHECK_THROWS_AS(make_policy({PolicyKind::mvts_d, -1.0}, 2, 2), InvalidParameter);
    CHECK_THROWS_AS(make_policy({PolicyKind::mvts_d, 1.0}, 0, 2), InvalidParameter);
    CHECK_THROWS_AS(make_policy({PolicyKind::mvts_d, 1.0}, 2, 0), InvalidParameter);
    for (auto kind : {PolicyKind::mvts_d, PolicyKind::mvts_dn, PolicyKind::ts_a, PolicyKind::cf_mvts,
                      PolicyKind::uniform}) {
        const auto policy = make_policy({kind, 1.0}, 4, 3);
        CHECK(policy->kind() == kind);
        CHECK(policy->arms() == 4);
        CHECK(parse_policy_kind(to_string(kind)) == kind);
    }
    CHECK_THROWS_AS(parse_policy_kind("linucb"), InvalidParameter);
}
