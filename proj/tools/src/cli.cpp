// Copyright 2026 The SliceGraph Authors
// SPDX-License-Identifier: Apache-2.0

#include "slicegraph/cli.hpp"

#include <CLI11.hpp>

#include <algorithm>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <optional>

#include "slicegraph/agent.hpp"
#include "slicegraph/knowledge.hpp"
#include "slicegraph/llm.hpp"
#include "slicegraph/optimizer.hpp"
#include "slicegraph/radio.hpp"
#include "slicegraph/sim.hpp"

#ifndef SLICEGRAPH_DATA_DIR
#define SLICEGRAPH_DATA_DIR "data"
#endif

namespace slicegraph::cli {

namespace fs = std::filesystem;

namespace {

struct Config {
    std::string scenario;
    std::string method = "all";
    std::string backend = "mock";
    std::string base_url;
    std::string model;
    std::string cassette;
    double timeout_s = 60.0;
    int max_retries = 2;
    std::size_t trials = 10;
    std::optional<std::uint64_t> seed;
    std::string out = "out";
    std::string kb = std::string(SLICEGRAPH_DATA_DIR) + "/kb.json";
    std::string pool = std::string(SLICEGRAPH_DATA_DIR) + "/request_pool.json";
    std::string prompts;
    std::string snr_overrides;
    std::size_t n = 30;
    double min_radius_m = 1.0;
    double max_radius_m = 1000.0;
    std::size_t instances = 200;
    double grid = 0.25;
    int verbose = 0;
};

// Everything a run needs, loaded up front so validation errors surface before any work.
struct Setup {
    Scenario scenario;
    std::vector<sim::PoolRequest> pool;
    knowledge::KnowledgeBase kb;
    sim::RunOptions options;
    std::shared_ptr<llm::Backend> shared_backend;
    std::unique_ptr<llm::Backend> inner_backend;
};

std::vector<sim::Method> methods_of(const std::string& name) {
    if (name == "all") return {std::begin(sim::kAllMethods), std::end(sim::kAllMethods)};
    return {sim::parse_method(name)};
}

void load_common(Setup& s, const Config& c, bool needs_backend) {
    if (c.scenario.empty()) throw ValidationError("--scenario is required");
    if (!fs::exists(c.scenario)) throw ValidationError("scenario file not found: " + c.scenario);
    s.scenario = load_scenario(c.scenario);
    if (c.seed) s.scenario.seed = *c.seed;
    if (!c.snr_overrides.empty())
        radio::apply_snr_overrides(s.scenario.users, radio::load_snr_overrides(c.snr_overrides));
    if (s.scenario.users.empty()) s.pool = sim::load_request_pool(c.pool);
    s.kb = knowledge::load_kb(c.kb);
    s.options.kb = &s.kb;
    if (!c.prompts.empty()) s.options.templates = agent::load_prompt_templates(c.prompts);
    if (!needs_backend) return;

    const auto kind = llm::parse_backend_kind(c.backend);
    if (kind == llm::BackendConfig::Kind::Mock) {
        s.options.backend = sim::reference_mock_factory(s.scenario.slices);
        return;
    }
    llm::BackendConfig config;
    config.kind = kind;
    config.base_url = c.base_url;
    config.model = c.model;
    config.timeout_s = c.timeout_s;
    config.max_retries = c.max_retries;
    config.cassette_path = c.cassette;
    if (kind == llm::BackendConfig::Kind::Http && !c.cassette.empty()) {
        s.inner_backend = llm::make_backend({llm::BackendConfig::Kind::Http, c.base_url, c.model, c.timeout_s,
                                             c.max_retries, {}});
        s.shared_backend = std::make_shared<llm::RecordingBackend>(*s.inner_backend, c.cassette);
    } else {
        s.shared_backend = llm::make_backend(config);
    }
    s.options.backend = [b = s.shared_backend](std::span<const UserProfile>) { return b; };
}

void check_invariants(const sim::RunResult& r, const std::vector<UserProfile>& users, double alpha) {
    const auto problems = optimizer::check_network_state(r.network, alpha, users);
    if (!problems.empty()) throw InvariantError("ledger invariant violated: " + problems.front());
}

void write_trace(const fs::path& path, const std::vector<graphflow::TraceEntry>& trace) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw ValidationError("cannot write " + path.string());
    graphflow::write_trace_jsonl(trace, out);
}

std::ofstream open_output(const fs::path& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw ValidationError("cannot write " + path.string());
    return out;
}

int cmd_run(const Config& c, std::ostream& out, std::ostream& err) {
    if (c.trials == 0) throw ValidationError("--trials must be at least 1");
    const auto methods = methods_of(c.method);
    const bool needs_backend = std::any_of(methods.begin(), methods.end(), [](auto m) { return m != sim::Method::Rule; });
    Setup s;
    load_common(s, c, needs_backend);

    std::vector<sim::Trial> trials;
    for (auto m : methods) {
        auto mc = sim::monte_carlo(s.scenario, m, c.trials, s.scenario.seed, s.options, s.pool);
        for (auto& t : mc.trials) {
            check_invariants(t.result, sim::scenario_users(s.scenario, t.seed, s.pool), s.scenario.radio.alpha);
            trials.push_back(std::move(t));
        }
        if (c.verbose > 0) {
            char line[160];
            std::snprintf(line, sizeof line, "%-6s utilization %.4f (sd %.4f)  throughput %.2f Mbps  supported %.2f\n",
                          std::string(sim::to_string(m)).c_str(), mc.mean.utilization_overall,
                          mc.stddev.utilization_overall, mc.mean.throughput_mbps, mc.mean.supported_users);
            err << line;
        }
    }

    const fs::path dir(c.out);
    fs::create_directories(dir / "traces");
    auto csv = open_output(dir / "metrics.csv");
    sim::write_metrics_csv_header(csv);
    for (const auto& t : trials) {
        sim::write_metrics_csv_row(csv, static_cast<std::size_t>(t.seed - s.scenario.seed), t);
        if (t.method == sim::Method::Agent)
            write_trace(dir / "traces" / ("agent_seed" + std::to_string(t.seed) + ".jsonl"), t.result.trace);
    }
    csv.close();
    out << (dir / "metrics.csv").string() << "\n";
    return kOk;
}

int cmd_compare(const Config& c, std::ostream& out, std::ostream&) {
    Setup s;
    load_common(s, c, true);
    const auto users = sim::scenario_users(s.scenario, s.scenario.seed, s.pool);
    const auto rows = sim::compare(s.scenario.slices, s.scenario.radio, users, s.options);
    const fs::path dir(c.out);
    fs::create_directories(dir);
    auto csv = open_output(dir / "compare.csv");
    sim::write_compare_csv(csv, rows);
    csv.close();
    out << (dir / "compare.csv").string() << "\n";
    return kOk;
}

int cmd_gen_users(const Config& c, std::ostream& out, std::ostream&) {
    RadioParams radio;
    UserGeneratorConfig geometry{c.n, c.min_radius_m, c.max_radius_m};
    std::uint64_t seed = c.seed.value_or(0);
    if (!c.scenario.empty()) {
        const auto scenario = load_scenario(c.scenario);
        radio = scenario.radio;
        if (!c.seed) seed = scenario.seed;
    }
    const auto pool = sim::load_request_pool(c.pool);
    const auto users = sim::generate_users(c.n, seed, radio, pool, geometry);
    const fs::path path = c.out == "out" ? fs::path("users.jsonl") : fs::path(c.out);
    if (path.has_parent_path()) fs::create_directories(path.parent_path());
    save_users_jsonl(users, path);
    out << path.string() << "\n";
    return kOk;
}

int cmd_oracle_check(const Config& c, std::ostream& out, std::ostream&) {
    const auto report = optimizer::oracle_check(c.instances, c.grid, c.seed.value_or(0));
    char line[200];
    std::snprintf(line, sizeof line, "instances=%zu within_grid=%zu max_deviation=%.6f worst_shortfall_mbps=%.6f\n",
                  report.instances, report.within_grid, report.max_deviation, report.worst_shortfall);
    out << line;
    if (!report.all_within_bound) throw InvariantError("greedy fell below the grid oracle by more than c_max * grid");
    return kOk;
}

void add_scenario_flags(CLI::App* cmd, Config& c) {
    cmd->add_option("--scenario", c.scenario, "Scenario JSON file")->required();
    cmd->add_option("--backend", c.backend, "mock | replay | http")->check(CLI::IsMember({"mock", "replay", "http"}));
    cmd->add_option("--base-url", c.base_url, "OpenAI-compatible endpoint, e.g. http://localhost:8000/v1");
    cmd->add_option("--model", c.model, "Model name for the http backend");
    cmd->add_option("--cassette", c.cassette, "Replay source, or recording target with --backend http");
    cmd->add_option("--timeout", c.timeout_s, "Per-request timeout in seconds");
    cmd->add_option("--retries", c.max_retries, "Retries after a failed request");
    cmd->add_option("--seed", c.seed, "Base seed (defaults to the scenario's)");
    cmd->add_option("--out", c.out, "Output directory");
    cmd->add_option("--kb", c.kb, "Knowledge-base JSON");
    cmd->add_option("--pool", c.pool, "Request pool JSON for generated users");
    cmd->add_option("--prompts", c.prompts, "Prompt template file");
    cmd->add_option("--snr-overrides", c.snr_overrides, "JSON object mapping user id to SNR in dB");
}

}  // namespace

int main(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
    Config c;
    CLI::App app{"Network slicing simulator: rule-based, agent workflow and single-prompt allocation", "slicegraph"};
    app.require_subcommand(1);
    app.add_flag("-v,--verbose", c.verbose, "Print summaries to stderr");

    auto* run = app.add_subcommand("run", "Monte Carlo trials; writes metrics.csv and agent traces");
    add_scenario_flags(run, c);
    run->add_option("--method", c.method, "rule | agent | prompt | all")
        ->check(CLI::IsMember({"rule", "agent", "prompt", "all"}));
    run->add_option("--trials", c.trials, "Number of trials");

    auto* cmp = app.add_subcommand("compare", "All methods on growing prefixes of one user sequence");
    add_scenario_flags(cmp, c);

    auto* gen = app.add_subcommand("gen-users", "Write generated users as JSON Lines");
    gen->add_option("--n", c.n, "Number of users");
    gen->add_option("--seed", c.seed, "Generator seed");
    gen->add_option("--scenario", c.scenario, "Take radio parameters and seed from this scenario");
    gen->add_option("--pool", c.pool, "Request pool JSON");
    gen->add_option("--min-radius", c.min_radius_m, "Closest distance in m");
    gen->add_option("--max-radius", c.max_radius_m, "Farthest distance in m");
    gen->add_option("--out", c.out, "Output file");

    auto* oracle = app.add_subcommand("oracle-check", "Greedy solver against the grid brute force");
    oracle->add_option("--instances", c.instances, "Random instances");
    oracle->add_option("--grid", c.grid, "Grid step in MHz");
    oracle->add_option("--seed", c.seed, "Instance seed");

    std::vector<std::string> reversed(args.rbegin(), args.rend());
    if (!reversed.empty()) reversed.pop_back();
    try {
        app.parse(reversed);
    } catch (const CLI::CallForHelp&) {
        out << app.help();
        return kOk;
    } catch (const CLI::CallForAllHelp&) {
        out << app.help("", CLI::AppFormatMode::All);
        return kOk;
    } catch (const CLI::ParseError& e) {
        err << "slicegraph: " << e.what() << "\n";
        return kValidation;
    }

    try {
        if (*run) return cmd_run(c, out, err);
        if (*cmp) return cmd_compare(c, out, err);
        if (*gen) return cmd_gen_users(c, out, err);
        if (*oracle) return cmd_oracle_check(c, out, err);
    } catch (const ValidationError& e) {
        err << "slicegraph: " << e.what() << "\n";
        return kValidation;
    } catch (const ParseError& e) {
        err << "slicegraph: " << e.what() << "\n";
        return kValidation;
    } catch (const llm::BackendError& e) {
        err << "slicegraph: backend: " << e.what() << "\n";
        return kBackend;
    } catch (const sim::RunAborted& e) {
        err << "slicegraph: run aborted: " << e.what() << "\n";
        return kBackend;
    } catch (const sim::MonteCarloAborted& e) {
        err << "slicegraph: " << e.what() << "\n";
        return kBackend;
    } catch (const InvariantError& e) {
        err << "slicegraph: invariant violated: " << e.what() << "\n";
        return kInvariant;
    } catch (const fs::filesystem_error& e) {
        err << "slicegraph: " << e.what() << "\n";
        return kValidation;
    } catch (const std::exception& e) {
        err << "slicegraph: internal error: " << e.what() << "\n";
        return kInvariant;
    }
    return kValidation;
}

}  // namespace slicegraph::cli
