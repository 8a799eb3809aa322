#include <doctest.h>

#include <cmath>

#include "drql/dr_oracle.hpp"
#include "drql/environments.hpp"
#include "drql/q_learning.hpp"
#include "support/models.hpp"

using namespace drql;

TEST_SUITE("q_learning") {

TEST_CASE("stepsize schedules") {
    const auto c = StepsizeSchedule::constant(0.008);
    CHECK(c.at(0, 0.7) == 0.008);
    CHECK(c.at(100000, 0.7) == 0.008);
    const auto r = StepsizeSchedule::rescaled_linear();
    CHECK(r.at(0, 0.7) == 1.0);
    CHECK(r.at(10, 0.7) == doctest::Approx(1.0 / 4.0));
    const auto ab = StepsizeSchedule::rescaled_linear(2.0, 4.0);
    CHECK(ab.at(5, 0.5) == doctest::Approx(2.0 / 6.5));
    for (std::int64_t k : {0, 1, 10, 1000, 1000000}) {
        const double x = ab.at(k, 0.9);
        CHECK(x > 0.0);
        CHECK(x <= 1.0);
    }
    CHECK_THROWS_AS(StepsizeSchedule::constant(0.0), std::invalid_argument);
    CHECK_THROWS_AS(StepsizeSchedule::constant(1.5), std::invalid_argument);
    CHECK_THROWS_AS(StepsizeSchedule::rescaled_linear(2.0, 1.0), std::invalid_argument);
    CHECK_THROWS_AS(StepsizeSchedule::rescaled_linear(0.0, 1.0), std::invalid_argument);
    CHECK_THROWS_AS(r.at(-1, 0.7), std::invalid_argument);
}

TEST_CASE("deterministic chain reproduces value iteration") {
    const auto model = testing::single_state_model(1.0, 0.5);
    const QTable star = solve_q_star(model, 0.2, 1e-12).q;
    RunOptions opts;
    opts.delta = 0.2;
    opts.schedule = StepsizeSchedule::constant(1.0);
    opts.iterations = 4;
    RngStream rng(1, 0);
    const auto rec = run(model, opts, rng, &star);
    const std::vector<double> iterates{0.0, 1.0, 1.5, 1.75, 1.875};
    REQUIRE(rec.errors.size() == 5);
    for (std::size_t k = 0; k < iterates.size(); ++k) {
        CHECK(rec.errors[k] == doctest::Approx(std::abs(2.0 - iterates[k])).epsilon(1e-11));
    }
    CHECK(rec.final_q(0, 0) == 1.875);
}

TEST_CASE("zero iterations records the initial error only") {
    const auto model = make_hard_mdp({});
    const QTable star = solve_q_star(model, 0.1, 1e-10).q;
    RunOptions opts;
    opts.iterations = 0;
    RngStream rng(1, 0);
    const auto rec = run(model, opts, rng, &star);
    REQUIRE(rec.errors.size() == 1);
    CHECK(rec.errors[0] == sup_norm(star));
    CHECK(rec.cumulative_draws == std::vector<std::uint64_t>{0});
    CHECK(rec.call_draws.empty());
}

TEST_CASE("record bookkeeping") {
    const auto model = make_inventory_mdp({});
    RunOptions opts;
    opts.delta = 0.5;
    opts.iterations = 50;
    RngStream rng(4, 0);
    const auto rec = run(model, opts, rng);
    CHECK(rec.errors.empty());
    REQUIRE(rec.cumulative_draws.size() == 51);
    std::uint64_t calls = 0;
    std::uint64_t draws = 0;
    for (const auto& [count, times] : rec.call_draws) {
        CHECK(count >= 4);
        calls += times;
        draws += count * times;
    }
    CHECK(calls == 50 * 36);
    CHECK(draws == rec.cumulative_draws.back());
    for (std::size_t k = 1; k < rec.cumulative_draws.size(); ++k) {
        // each iteration makes 36 calls of at least 4 draws
        CHECK(rec.cumulative_draws[k] >= rec.cumulative_draws[k - 1] + 36 * 4);
    }
    CHECK(rec.final_q.values.allFinite());
}

TEST_CASE("batches are deterministic and independent of workers") {
    const auto model = make_hard_mdp({});
    const QTable star = solve_q_star(model, 0.1, 1e-10).q;
    BatchOptions opts;
    opts.run.iterations = 200;
    opts.trajectories = 4;
    opts.seed = 17;
    opts.workers = 1;
    const auto a = run_batch(model, opts, &star);
    opts.workers = 3;
    const auto b = run_batch(model, opts, &star);
    REQUIRE(a.size() == 4);
    for (std::size_t i = 0; i < a.size(); ++i) {
        CHECK(a[i].errors == b[i].errors);
        CHECK(a[i].cumulative_draws == b[i].cumulative_draws);
        CHECK(a[i].final_q.values == b[i].final_q.values);
    }
    CHECK(a[0].errors != a[1].errors);

    // trajectory i is exactly run() on stream (seed, i)
    RngStream rng(17, 2);
    const auto direct = run(model, opts.run, rng, &star);
    CHECK(direct.errors == a[2].errors);
}

TEST_CASE("iterates stay finite over full benchmark runs") {
    struct Case {
        MdpModel model;
        double delta;
    };
    const std::vector<Case> cases{{make_hard_mdp({}), 0.1}, {make_hard_mdp({0.9, std::nullopt}), 0.1},
                                  {make_inventory_mdp({}), 0.5}};
    for (const auto& c : cases) {
        for (const auto& schedule : {StepsizeSchedule::rescaled_linear(), StepsizeSchedule::constant(0.008)}) {
            RunOptions opts;
            opts.delta = c.delta;
            opts.schedule = schedule;
            opts.iterations = 5000;
            RngStream rng(23, 0);
            TrajectoryRecord rec;
            CHECK_NOTHROW(rec = run(c.model, opts, rng));
            CHECK(rec.final_q.values.allFinite());
        }
    }
}

TEST_CASE("argument validation") {
    const auto model = make_hard_mdp({});
    RunOptions opts;
    opts.iterations = -1;
    RngStream rng(1, 0);
    CHECK_THROWS_AS(run(model, opts, rng), std::invalid_argument);
    BatchOptions batch;
    batch.trajectories = 0;
    CHECK_THROWS_AS(run_batch(model, batch), std::invalid_argument);
    opts.iterations = 5;
    opts.g = 0.01;
    CHECK_THROWS_AS(run(model, opts, rng), std::invalid_argument);
}

}  // TEST_SUITE
