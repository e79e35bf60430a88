// Copyright 2026 The SliceGraph Authors
// SPDX-License-Identifier: Apache-2.0

#include <doctest.h>

#include <sstream>

#include "slicegraph/digest.hpp"
#include "slicegraph/graphflow.hpp"
#include "support/fixtures.hpp"

using namespace slicegraph;
using namespace slicegraph::graphflow;

namespace {

NodeHandler bump_slot() {
    return [](GlobalState s) {
        s.kb_hits.push_back(s.kb_hits.size());
        return s;
    };
}

std::string compile_error(const WorkflowGraph& g) {
    try {
        (void)compile(g);
    } catch (const GraphError& e) {
        return e.what();
    }
    return {};
}

WorkflowGraph linear_chain() {
    WorkflowGraph g;
    g.add_node("a", bump_slot()).add_node("b", bump_slot()).add_node("c", bump_slot());
    g.add_edge("a", "b").add_edge("b", "c").add_edge("c", kEnd).set_entry("a");
    return g;
}

WorkflowGraph forced_loop() {
    WorkflowGraph g;
    g.add_node("ping", bump_slot()).add_node("pong", bump_slot());
    g.add_edge("ping", "pong");
    g.add_conditional_edges("pong", [](const GlobalState&) { return std::string("ping"); }, {"ping", kEnd});
    g.set_entry("ping");
    return g;
}

}  // namespace

TEST_SUITE("graphflow") {
    TEST_CASE("FNV-1a digests") {
        CHECK(fnv1a64("") == 0xcbf29ce484222325ULL);
        CHECK(fnv1a64("a") == 0xaf63dc4c8601ec8cULL);
        CHECK(to_hex(0xabcULL) == "0000000000000abc");
        CHECK(json_digest(nlohmann::json::parse(R"({"b":1,"a":2})")) ==
              json_digest(nlohmann::json::parse(R"({"a":2,"b":1})")));
    }

    TEST_CASE("linear chain runs to END") {
        const auto graph = compile(linear_chain());
        GlobalState s;
        s.network.slot = 3;
        const auto out = graph.run(s, 10);
        REQUIRE(out.trace.size() == 3);
        CHECK(out.trace[0].node == "a");
        CHECK(out.trace[1].node == "b");
        CHECK(out.trace[2].node == "c");
        CHECK(out.trace[2].slot == 3);
        CHECK(out.kb_hits.size() == 3);
        CHECK(out.trace[2].digest == state_digest(out));
        CHECK(out.trace[0].delta == nlohmann::json::parse(R"({"kb_hits":[0]})"));
    }

    TEST_CASE("forced loop hits the step limit with its trace") {
        const auto graph = compile(forced_loop());
        try {
            (void)graph.run(GlobalState{}, 8);
            FAIL("expected a cycle error");
        } catch (const CycleError& e) {
            CHECK(std::string(e.what()).find("possible cycle") != std::string::npos);
            CHECK(e.trace().size() == 8);
        }
        CHECK_THROWS_AS((void)graph.run(GlobalState{}, 0), GraphError);
    }

    TEST_CASE("compile rejects malformed graphs") {
        auto typo = linear_chain();
        typo.add_node("d", bump_slot()).add_edge("d", "qos_evla");
        CHECK(compile_error(typo).find("qos_evla") != std::string::npos);

        WorkflowGraph both;
        both.add_node("a", bump_slot()).add_edge("a", kEnd);
        both.add_conditional_edges("a", [](const GlobalState&) { return kEnd; }, {kEnd});
        both.set_entry("a");
        CHECK(compile_error(both).find("both a static and a conditional edge") != std::string::npos);

        WorkflowGraph no_entry;
        no_entry.add_node("a", bump_slot()).add_edge("a", kEnd);
        CHECK(compile_error(no_entry) == "missing entry");

        WorkflowGraph bad_entry = linear_chain();
        bad_entry.set_entry("zzz");
        CHECK(compile_error(bad_entry).find("zzz") != std::string::npos);

        WorkflowGraph island = linear_chain();
        island.add_node("lonely", bump_slot()).add_edge("lonely", kEnd);
        CHECK(compile_error(island).find("unreachable") != std::string::npos);

        WorkflowGraph dead_end;
        dead_end.add_node("a", bump_slot()).set_entry("a");
        CHECK(compile_error(dead_end).find("no outgoing edge") != std::string::npos);

        WorkflowGraph stray;
        stray.add_node("a", bump_slot()).add_edge("a", kEnd).add_edge("ghost", "a").set_entry("a");
        CHECK(compile_error(stray).find("ghost") != std::string::npos);

        WorkflowGraph twice;
        twice.add_node("a", bump_slot()).add_node("a", bump_slot()).add_edge("a", kEnd).set_entry("a");
        CHECK(compile_error(twice).find("duplicate node") != std::string::npos);

        WorkflowGraph bad_target;
        bad_target.add_node("a", bump_slot());
        bad_target.add_conditional_edges("a", [](const GlobalState&) { return kEnd; }, {kEnd, "nowhere"});
        bad_target.set_entry("a");
        CHECK(compile_error(bad_target).find("nowhere") != std::string::npos);
    }

    TEST_CASE("compiling twice yields equal graphs") {
        const auto g = linear_chain();
        const auto a = compile(g);
        const auto b = compile(g);
        CHECK(a.node_names() == b.node_names());
        CHECK(a.entry() == b.entry());
        for (const auto& n : a.node_names()) CHECK(a.successors(n) == b.successors(n));
        CHECK(a.run(GlobalState{}).trace == b.run(GlobalState{}).trace);
    }

    TEST_CASE("node and router failures carry the node and trace") {
        WorkflowGraph g;
        g.add_node("ok", bump_slot()).add_node("boom", [](GlobalState) -> GlobalState {
            throw std::runtime_error("handler broke");
        });
        g.add_edge("ok", "boom").add_edge("boom", kEnd).set_entry("ok");
        try {
            (void)compile(g).run(GlobalState{});
            FAIL("expected a node error");
        } catch (const NodeError& e) {
            CHECK(e.node() == "boom");
            CHECK(e.trace().size() == 1);
            CHECK_THROWS_WITH_AS(std::rethrow_exception(e.cause()), "handler broke", std::runtime_error);
        }

        WorkflowGraph liar;
        liar.add_node("a", bump_slot());
        liar.add_conditional_edges("a", [](const GlobalState&) { return std::string("elsewhere"); }, {kEnd});
        liar.set_entry("a");
        CHECK_THROWS_AS((void)compile(liar).run(GlobalState{}), NodeError);
    }

    TEST_CASE("identical inputs give identical traces") {
        const auto graph = compile(linear_chain());
        GlobalState s;
        s.current_user = fixtures::walkthrough_users()[0];
        const auto first = graph.run(s);
        const auto second = graph.run(s);
        CHECK(first == second);
        CHECK(first.trace.size() <= kDefaultStepLimit);
    }

    TEST_CASE("trace JSON Lines round trip") {
        const auto out = compile(linear_chain()).run(GlobalState{});
        std::stringstream buffer;
        write_trace_jsonl(out.trace, buffer);
        CHECK(read_trace_jsonl(buffer) == out.trace);

        std::stringstream broken("{\"slot\":1}\n");
        CHECK_THROWS_AS(read_trace_jsonl(broken), ParseError);
    }

    TEST_CASE("digest ignores the trace but sees every other field") {
        GlobalState s;
        const auto base = state_digest(s);
        s.trace.push_back({1, "x", "y", nlohmann::json::object()});
        CHECK(state_digest(s) == base);
        s.proposed_bw_mhz = 20.0;
        CHECK(state_digest(s) != base);
        CHECK(base.size() == 16);
    }

    TEST_CASE("evaluation JSON") {
        const auto e = Evaluation::reject("capacity");
        const nlohmann::json j = e;
        CHECK(j.dump() == R"({"kind":"reject","reason":"capacity"})");
        CHECK(j.get<Evaluation>() == e);
        CHECK(nlohmann::json(Evaluation::need_adjust()).get<Evaluation>() == Evaluation::need_adjust());
        CHECK(to_string(Evaluation::Kind::NeedHandover) == "need_handover");
    }
}
