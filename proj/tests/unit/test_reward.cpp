#include "nitrogym/errors.hpp"
#include "nitrogym/reward.hpp"

#include <doctest.h>

#include <limits>
#include <random>
#include <vector>

using namespace nitrogym;

TEST_CASE("quiet day is worth nothing")
{
    const RewardConfig cfg;
    const auto b = daily_reward(0.0, 0.0, 0.0, false, 0.0, cfg);
    CHECK(b.total == 0.0);
    CHECK(b.yield_term == 0.0);
}

TEST_CASE("fertilizer and leaching costs")
{
    const RewardConfig cfg;
    const auto b = daily_reward(40.0, 0.01, 40.0, false, 0.0, cfg);
    CHECK(b.fert_term == doctest::Approx(4.0));
    CHECK(b.leach_term == doctest::Approx(0.001));
    CHECK(b.total == doctest::Approx(-4.001).epsilon(1e-14));
}

TEST_CASE("overage is charged on application days only")
{
    RewardConfig cfg;
    cfg.threshold = 240.0;
    CHECK(daily_reward(40.0, 0.0, 280.0, false, 0.0, cfg).overage_term == doctest::Approx(40.0));
    CHECK(daily_reward(0.0, 0.0, 280.0, false, 0.0, cfg).overage_term == 0.0);
    CHECK(daily_reward(40.0, 0.0, 200.0, false, 0.0, cfg).overage_term == 0.0); // clamped
    cfg.clamp_overage = false;
    CHECK(daily_reward(40.0, 0.0, 200.0, false, 0.0, cfg).overage_term == doctest::Approx(-40.0));
    cfg.threshold = std::numeric_limits<double>::infinity();
    CHECK(daily_reward(40.0, 0.0, 1e6, false, 0.0, cfg).overage_term == 0.0);
}

TEST_CASE("harvest day collects the yield term")
{
    const RewardConfig cfg;
    const auto b = daily_reward(0.0, 0.0, 160.0, true, 21133.3, cfg);
    CHECK(b.yield_term == doctest::Approx(2113.33));
    CHECK(daily_reward(0.0, 0.0, 0.0, false, 21133.3, cfg).yield_term == 0.0);
}

TEST_CASE("breakdown total is exact")
{
    const RewardConfig cfg;
    const auto b = daily_reward(120.0, 3.7, 300.0, true, 15000.0, cfg);
    CHECK(b.total == b.yield_term - b.fert_term - b.leach_term - b.overage_term);
}

TEST_CASE("negative inputs are rejected")
{
    const RewardConfig cfg;
    CHECK_THROWS_AS(daily_reward(-1.0, 0.0, 0.0, false, 0.0, cfg), DomainError);
    CHECK_THROWS_AS(daily_reward(0.0, -1.0, 0.0, false, 0.0, cfg), DomainError);
    CHECK_THROWS_AS(daily_reward(0.0, 0.0, -1.0, false, 0.0, cfg), DomainError);
    CHECK_THROWS_AS(daily_reward(0.0, 0.0, 0.0, true, -1.0, cfg), DomainError);
}

TEST_CASE("config validation")
{
    RewardConfig cfg;
    cfg.w3 = -0.1;
    CHECK_THROWS_AS(cfg.validate(), ConfigError);
    cfg = RewardConfig{};
    cfg.threshold = -5.0;
    CHECK_THROWS_AS(cfg.validate(), ConfigError);
}

TEST_CASE("episode reward of an empty list is an error")
{
    CHECK_THROWS_AS(episode_reward({}), DomainError);
    const std::vector<RewardBreakdown> zeros(4);
    CHECK(episode_reward(zeros) == 0.0);
}

TEST_CASE("episode reward matches the closed form for random sequences")
{
    std::mt19937_64 rng(31);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    for (int trial = 0; trial < 200; ++trial) {
        RewardConfig cfg;
        cfg.threshold = 100.0 + 200.0 * u(rng);
        cfg.clamp_overage = trial % 2 == 0;
        const int days = 20 + static_cast<int>(150 * u(rng));
        std::vector<RewardBreakdown> per_day;
        double cum = 0.0, total_n = 0.0, total_leach = 0.0, total_p = 0.0;
        const double y = 20000.0 * u(rng);
        for (int d = 0; d < days; ++d) {
            const double a = u(rng) < 0.1 ? 40.0 * static_cast<int>(5 * u(rng)) : 0.0;
            const double leach = u(rng) < 0.3 ? 2.0 * u(rng) : 0.0;
            cum += a;
            total_n += a;
            total_leach += leach;
            if (a != 0.0) total_p += cfg.clamp_overage ? std::max(0.0, cum - cfg.threshold) : cum - cfg.threshold;
            per_day.push_back(daily_reward(a, leach, cum, d == days - 1, y, cfg));
        }
        const double closed = 0.1 * y - 0.1 * total_n - 0.1 * total_leach - 1.0 * total_p;
        CHECK(episode_reward(per_day) == doctest::Approx(closed).epsilon(1e-12));
        CHECK(reward_identity(y, total_n, total_leach, total_p, cfg) == doctest::Approx(closed).epsilon(1e-12));
        if (total_n == 0.0)
            for (const auto& b : per_day) CHECK(b.fert_term + b.overage_term == 0.0);
        if (cfg.clamp_overage)
            for (const auto& b : per_day) CHECK(b.overage_term >= 0.0);
    }
}

TEST_CASE("reference table rows satisfy the identity")
{
    const RewardConfig cfg;
    CHECK(reward_identity(21133.3, 160, 0.11, 0, cfg) == doctest::Approx(2097.3).epsilon(0.15 / 2097.3));
    CHECK(reward_identity(4393.3, 40, 46, 0, cfg) == doctest::Approx(430.7).epsilon(0.15 / 430.7));
    CHECK(reward_identity(21711.8, 240, 0.12, 0, cfg) == doctest::Approx(2147.168).epsilon(1e-9));
    CHECK(reward_identity(6310.8, 80, 33, 0, cfg) == doctest::Approx(619.78).epsilon(1e-9));
}
