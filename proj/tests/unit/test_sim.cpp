// Copyright 2026 The SliceGraph Authors
// SPDX-License-Identifier: Apache-2.0

#include <doctest.h>

#include <algorithm>
#include <random>
#include <sstream>

#include "slicegraph/optimizer.hpp"
#include "slicegraph/sim.hpp"
#include "support/fixtures.hpp"

using namespace slicegraph;
using namespace slicegraph::sim;
using doctest::Approx;

namespace {

const SliceConfigs kSlices = case_study_slices();

RunOptions mock_options() {
    RunOptions o;
    o.backend = reference_mock_factory(kSlices);
    return o;
}

std::vector<PoolRequest> pool() { return load_request_pool(fixtures::data_dir() / "request_pool.json"); }

Scenario case_study() { return load_scenario(fixtures::data_dir() / "case_study.json"); }

// 15 eMBB users that need exactly bw_min and 30 URLLC users that need exactly 1 MHz.
std::vector<UserProfile> exact_fit_users() {
    std::vector<UserProfile> users;
    UserId id = 1;
    for (int i = 0; i < 15; ++i) users.push_back(fixtures::user(id++, 60.0, SliceKind::Embb, 100.0, 50.0, "video"));
    for (int i = 0; i < 30; ++i) users.push_back(fixtures::user(id++, 30.0, SliceKind::Urllc, 5.0, 5.0, "control"));
    return users;
}

}  // namespace

TEST_SUITE("sim") {
    TEST_CASE("method names") {
        for (Method m : kAllMethods) CHECK(parse_method(to_string(m)) == m);
        CHECK_THROWS_AS(parse_method("oracle"), ValidationError);
        CHECK(metric_names().size() == metric_values(Metrics{}).size());
    }

    TEST_CASE("rule method fills both slices exactly") {
        const auto r = run_users(kSlices, RadioParams{}, exact_fit_users(), Method::Rule, RunOptions{});
        CHECK(r.metrics.supported_users == 45.0);
        CHECK(r.metrics.users_processed == 45.0);
        CHECK(r.metrics.final_utilization == Approx(1.0).epsilon(1e-12));
        CHECK(r.metrics.intent_accuracy == 1.0);
        CHECK(r.trace.empty());
    }

    TEST_CASE("half-used network") {
        std::vector<UserProfile> users;
        for (UserId id = 1; id <= 3; ++id) users.push_back(fixtures::user(id, 60.0, SliceKind::Embb, 100.0, 50.0));
        const auto r = run_users(kSlices, RadioParams{}, users, Method::Rule, RunOptions{});
        CHECK(r.metrics.final_utilization == Approx(0.5).epsilon(1e-12));
        CHECK(r.metrics.utilization_overall == Approx((20.0 + 40.0 + 60.0) / 3.0 / 120.0).epsilon(1e-12));
        CHECK(r.metrics.utilization_embb == Approx((20.0 + 40.0 + 60.0) / 3.0 / 90.0).epsilon(1e-12));
        CHECK(r.metrics.utilization_urllc == 0.0);
        CHECK(r.metrics.idle_rate == Approx(1.0 - r.metrics.utilization_overall).epsilon(1e-15));
        // Each user is capped at the slice rate ceiling.
        const double c = radio::spectral_coefficient(kShannonAlpha, 60.0);
        CHECK(r.metrics.throughput_mbps == Approx(3 * std::min(400.0, 20.0 * c)).epsilon(1e-12));
    }

    TEST_CASE("agent with a perfect backend on an uncontended network") {
        auto users = fixtures::walkthrough_users();
        users.pop_back();
        const auto r = run_users(kSlices, RadioParams{}, users, Method::Agent, mock_options());
        CHECK(r.metrics.intent_accuracy == 1.0);
        CHECK(r.network.rejected.empty());
        CHECK(r.metrics.supported_users == 5.0);
        CHECK(r.trace.size() == 20);
        CHECK(r.trace.front().slot == 1);
        CHECK(r.trace.back().slot == 5);
    }

    TEST_CASE("all methods keep per-slot bookkeeping consistent") {
        const auto sc = case_study();
        const auto p = pool();
        for (Method m : kAllMethods) {
            CAPTURE(to_string(m));
            const auto r = run_scenario(sc, m, mock_options(), p);
            const auto& slots = r.metrics.per_slot;
            REQUIRE(slots.size() == 30);
            std::size_t previous = 0;
            for (std::size_t i = 0; i < slots.size(); ++i) {
                CHECK(slots[i].slot == i + 1);
                CHECK(slots[i].embb_allocated_mhz + slots[i].embb_idle_mhz == Approx(90.0).epsilon(1e-12));
                CHECK(slots[i].urllc_allocated_mhz + slots[i].urllc_idle_mhz == Approx(30.0).epsilon(1e-12));
                CHECK(slots[i].embb_allocated_mhz <= 90.0);
                CHECK(slots[i].urllc_allocated_mhz <= 30.0);
                CHECK(slots[i].admitted >= previous);
                CHECK(slots[i].admitted <= i + 1);
                previous = slots[i].admitted;
            }
            CHECK(r.metrics.users_processed == 30.0);
            CHECK(r.network.processed_count() == 30);
            CHECK(r.metrics.idle_rate == Approx(1.0 - r.metrics.utilization_overall).epsilon(1e-15));
            const auto users = scenario_users(sc, sc.seed, p);
            CHECK(optimizer::check_network_state(r.network, sc.radio.alpha, users).empty());
        }
    }

    TEST_CASE("user generation") {
        const auto p = pool();
        const auto a = generate_users(30, 42, RadioParams{}, p);
        const auto b = generate_users(30, 42, RadioParams{}, p);
        CHECK(a == b);
        CHECK(a != generate_users(30, 43, RadioParams{}, p));
        for (std::size_t i = 0; i < a.size(); ++i) {
            CHECK(a[i].id == i + 1);
            CHECK(a[i].snr_db >= 6.0 - 1e-9);
            CHECK(a[i].snr_db <= 96.0 + 1e-9);
            CHECK(std::any_of(p.begin(), p.end(), [&](const PoolRequest& r) {
                return r.text == a[i].request_text && r.label == a[i].ground_truth;
            }));
        }
        CHECK_THROWS_AS(generate_users(0, 1, RadioParams{}, p), ValidationError);
        CHECK_THROWS_AS(generate_users(3, 1, RadioParams{}, {}), ValidationError);
        const auto near = generate_users(50, 1, RadioParams{}, p, UserGeneratorConfig{50, 10.0, 20.0});
        for (const auto& u : near) {
            CHECK(u.snr_db <= radio::snr_from_geometry(RadioParams{}, 10.0) + 1e-9);
            CHECK(u.snr_db >= radio::snr_from_geometry(RadioParams{}, 20.0) - 1e-9);
        }
        CHECK(unit_uniform(0) == 0.0);
        CHECK(unit_uniform(~0ULL) < 1.0);
    }

    TEST_CASE("explicit scenario users win over generation") {
        auto sc = case_study();
        sc.users = fixtures::walkthrough_users();
        CHECK(scenario_users(sc, 7, pool()) == sc.users);
    }

    TEST_CASE("Monte Carlo aggregates") {
        const auto sc = case_study();
        const auto p = pool();
        const auto one = monte_carlo(sc, Method::Rule, 1, 5, RunOptions{}, p);
        REQUIRE(one.trials.size() == 1);
        for (double v : metric_values(one.stddev)) CHECK(v == 0.0);
        CHECK(one.mean.throughput_mbps == one.trials[0].result.metrics.throughput_mbps);

        const auto many = monte_carlo(sc, Method::Agent, 4, 100, mock_options(), p);
        REQUIRE(many.trials.size() == 4);
        double sum = 0.0;
        double lo = 1e300;
        double hi = -1e300;
        for (std::size_t i = 0; i < 4; ++i) {
            CHECK(many.trials[i].seed == 100 + i);
            const auto separate = run_users(sc.slices, sc.radio, scenario_users(sc, 100 + i, p), Method::Agent,
                                            mock_options());
            CHECK(separate.metrics == many.trials[i].result.metrics);
            const double t = separate.metrics.throughput_mbps;
            sum += t;
            lo = std::min(lo, t);
            hi = std::max(hi, t);
        }
        CHECK(many.mean.throughput_mbps == Approx(sum / 4).epsilon(1e-12));
        CHECK(many.mean.throughput_mbps >= lo);
        CHECK(many.mean.throughput_mbps <= hi);
        CHECK_THROWS_AS(monte_carlo(sc, Method::Rule, 0, 1, RunOptions{}, p), ValidationError);

        std::vector<Metrics> runs(2);
        runs[0].supported_users = 2;
        runs[1].supported_users = 4;
        const auto [mean, sd] = aggregate(runs);
        CHECK(mean.supported_users == 3.0);
        CHECK(sd.supported_users == Approx(std::sqrt(2.0)).epsilon(1e-15));
    }

    TEST_CASE("rule outcome ignores arrival order of the input list") {
        auto users = exact_fit_users();
        const auto base = run_users(kSlices, RadioParams{}, users, Method::Rule, RunOptions{});
        std::mt19937_64 rng(9);
        std::shuffle(users.begin(), users.end(), rng);
        CHECK(run_users(kSlices, RadioParams{}, users, Method::Rule, RunOptions{}).metrics == base.metrics);
    }

    TEST_CASE("backend failures abort the run with the partial trace") {
        RunOptions broken;
        int calls = 0;
        broken.backend = [&](std::span<const UserProfile>) {
            auto mock = std::make_shared<llm::MockBackend>();
            mock->on(
                [&](std::string_view) { return ++calls <= 2; },
                [](std::string_view) { return std::string(R"({"slice":"eMBB","required_rate_mbps":150,"required_latency_ms":50})"); });
            return mock;
        };
        auto users = fixtures::walkthrough_users();
        try {
            (void)run_users(kSlices, RadioParams{}, users, Method::Agent, broken);
            FAIL("expected the run to abort");
        } catch (const RunAborted& e) {
            CHECK(e.completed_users() == 2);
            CHECK(e.trace().size() == 8);
            CHECK_THROWS_AS(std::rethrow_exception(e.cause()), llm::MockError);
        }
        calls = 100;
        CHECK_THROWS_AS(run_users(kSlices, RadioParams{}, users, Method::Prompt, broken), RunAborted);
        CHECK_THROWS_AS(run_users(kSlices, RadioParams{}, {users[0], users[0]}, Method::Rule, RunOptions{}),
                        ValidationError);
    }

    TEST_CASE("compare rows replay growing prefixes") {
        auto users = fixtures::walkthrough_users();
        const auto rows = compare(kSlices, RadioParams{}, users, mock_options());
        REQUIRE(rows.size() == users.size());
        for (std::size_t n = 0; n < rows.size(); ++n) {
            CHECK(rows[n].users == n + 1);
            const auto rule = run_users(kSlices, RadioParams{}, {users.begin(), users.begin() + n + 1}, Method::Rule,
                                        RunOptions{});
            CHECK(rows[n].throughput[0] == rule.metrics.throughput_mbps);
            CHECK(rows[n].idle[0] == Approx(1.0 - rule.metrics.final_utilization).epsilon(1e-15));
            CHECK(rows[n].throughput[0] >= rows[n].throughput[1] * (1 - 1e-12));
        }
        CHECK_THROWS_AS(compare(kSlices, RadioParams{}, {}, mock_options()), ValidationError);
    }

    TEST_CASE("CSV output") {
        std::ostringstream out;
        write_metrics_csv_header(out);
        Trial t;
        t.seed = 7;
        t.method = Method::Agent;
        t.result.metrics.supported_users = 3;
        t.result.metrics.throughput_mbps = 0.1 + 0.2;
        write_metrics_csv_row(out, 1, t);
        const auto text = out.str();
        CHECK(text.rfind("trial,seed,method,utilization_overall,", 0) == 0);
        CHECK(text.find("\r\n1,7,agent,") != std::string::npos);
        CHECK(text.find(",0.3,") != std::string::npos);

        std::ostringstream cmp;
        CompareRow row;
        row.users = 2;
        row.throughput[0] = 10;
        write_compare_csv(cmp, std::span<const CompareRow>(&row, 1));
        CHECK(cmp.str() ==
              "users,throughput_rule,throughput_agent,throughput_prompt,idle_rule,idle_agent,idle_prompt\r\n"
              "2,10,0,0,0,0,0\r\n");
    }
}
