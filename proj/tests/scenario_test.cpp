/*
 * Copyright 2026 The ibnsim Authors
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 * http://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

#include "support.hpp"

#include "ibnsim/error.hpp"
#include "ibnsim/scenario.hpp"

#include <gtest/gtest.h>

using namespace ibnsim;
using namespace ibnsim::testing;

namespace {

constexpr const char* kMinimal = R"({
  "schema": "ibnsim/scenario-v1",
  "domains": [{"id": 1, "nodes": [{"name": "a"}, {"name": "b"}], "links": [{"a": "a", "b": "b", "length": 10}]}]
})";

Error error_of(std::string_view doc)
{
    try {
        parse_scenario(doc);
    } catch (const Error& e) {
        return e;
    }
    ADD_FAILURE() << "accepted: " << doc;
    return Error(ErrorCode::kParseError, "none");
}

std::string with(std::string_view from, std::string_view to)
{
    std::string doc = kMinimal;
    auto pos = doc.find(from);
    EXPECT_NE(pos, std::string::npos) << from;
    doc.replace(pos, from.size(), to);
    return doc;
}

} // namespace

TEST(ParseScenario, MinimalUsesDefaults)
{
    Scenario s = parse_scenario(kMinimal);
    EXPECT_EQ(s.grid_size, 80u);
    EXPECT_EQ(s.k_paths, 3u);
    EXPECT_EQ(s.recovery, RecoveryPolicy::kAutoRecompile);
    EXPECT_EQ(s.modes, default_mode_table());
    ASSERT_EQ(s.domains.size(), 1u);
    EXPECT_EQ(s.domains[0].nodes[0].ports, 64u);
    EXPECT_FALSE(s.traffic);
    EXPECT_EQ(s.node_ids().at("b"), n(1, 2));
    EXPECT_EQ(s.resolve("a"), n(1, 1));
    EXPECT_FALSE(s.resolve("zz"));
}

TEST(ParseScenario, ValidationErrors)
{
    Error e = error_of(with(R"("b", "length")", R"("c", "length")"));
    EXPECT_EQ(e.code(), ErrorCode::kValidationError);
    EXPECT_NE(std::string(e.what()).find("unknown node 'c'"), std::string::npos);

    e = error_of(R"({"schema": "ibnsim/scenario-v1", "domains": [
        {"id": 1, "nodes": [{"name": "a"}]}, {"id": 2, "nodes": [{"name": "a"}]}]})");
    EXPECT_EQ(e.code(), ErrorCode::kValidationError);
    EXPECT_NE(std::string(e.what()).find("already owned"), std::string::npos);

    EXPECT_EQ(error_of(with(R"("length": 10)", R"("length": 0)")).code(), ErrorCode::kValidationError);
    EXPECT_EQ(error_of(with(R"("b", "length")", R"("a", "length")")).code(), ErrorCode::kValidationError);
    EXPECT_EQ(error_of(with(R"("domains")", R"("grid_slots": 0, "domains")")).code(), ErrorCode::kValidationError);
    EXPECT_EQ(error_of(with(R"("domains")", R"("events": [{"type": "departure", "time": 1, "arrival": 0}], "domains")"))
                  .code(),
              ErrorCode::kValidationError);
    EXPECT_EQ(error_of(with(R"("domains")", R"("events": [{"type": "link_down", "time": 1, "a": "a", "b": "a"}], "domains")"))
                  .code(),
              ErrorCode::kValidationError);
}

TEST(ParseScenario, ParseErrorsNameLineOrField)
{
    Error e = error_of("{\n  \"schema\": \"ibnsim/scenario-v1\",\n  \"domains\": [,]\n}");
    EXPECT_EQ(e.code(), ErrorCode::kParseError);
    EXPECT_NE(std::string(e.what()).find("line 3"), std::string::npos) << e.what();

    e = error_of(with(R"("domains")", R"("colour": 1, "domains")"));
    EXPECT_EQ(e.code(), ErrorCode::kParseError);
    EXPECT_NE(std::string(e.what()).find("colour"), std::string::npos);

    e = error_of(with(R"("length": 10)", R"("length": "far")"));
    EXPECT_EQ(e.code(), ErrorCode::kParseError);
    EXPECT_NE(std::string(e.what()).find("domains[0].links[0].length"), std::string::npos) << e.what();

    EXPECT_EQ(error_of(with("ibnsim/scenario-v1", "ibnsim/scenario-v9")).code(), ErrorCode::kValidationError);
    EXPECT_EQ(error_of(with(R"("domains")", R"("recovery": "pray", "domains")")).code(), ErrorCode::kParseError);
}

TEST(ParseScenario, RoundTripIsStable)
{
    for (const char* name : {"reference", "triangle", "single-link", "three-domain-line"}) {
        Scenario first = load_scenario(std::string(IBNSIM_SCENARIO_DIR) + "/" + name + ".json");
        std::string rendered = render_scenario(first);
        Scenario second = parse_scenario(rendered);
        EXPECT_EQ(first, second) << name;
        EXPECT_EQ(render_scenario(second), rendered) << name;
    }
}

TEST(ParseScenario, RoundTripOnRandomDocuments)
{
    std::mt19937_64 rng(8);
    for (int trial = 0; trial < 100; ++trial) {
        Scenario s;
        s.grid_size = 8 + static_cast<std::uint32_t>(rng() % 80);
        s.k_paths = 1 + rng() % 5;
        s.recovery = rng() % 2 ? RecoveryPolicy::kNone : RecoveryPolicy::kAutoRecompile;
        s.seed = rng();
        std::size_t domains = 1 + rng() % 3;
        std::vector<std::string> names;
        for (std::size_t d = 0; d < domains; ++d) {
            DomainSpec spec;
            spec.id = static_cast<DomainId>(d + 1);
            std::size_t count = 2 + rng() % 3;
            for (std::size_t i = 0; i < count; ++i) {
                NodeSpec node;
                node.name = fmt::format("d{}n{}", d + 1, i);
                node.ports = 1 + static_cast<std::uint32_t>(rng() % 100);
                node.port_rate = 25.0 * static_cast<double>(1 + rng() % 8);
                spec.nodes.push_back(node);
                if (i > 0) {
                    spec.links.push_back({fmt::format("d{}n{}", d + 1, i - 1), node.name,
                                          0.5 + static_cast<double>(rng() % 1000)});
                }
            }
            names.push_back(spec.nodes.front().name);
            s.domains.push_back(spec);
        }
        for (std::size_t d = 1; d < domains; ++d) {
            s.border_links.push_back({names[d - 1], names[d], 1.25});
        }
        if (rng() % 2) {
            TrafficSpec t;
            t.count = rng() % 50;
            t.arrival_rate = 0.125 * static_cast<double>(1 + rng() % 20);
            t.rates = {100, 400};
            s.traffic = t;
        }
        EventSpec e;
        e.kind = ScenarioEventKind::kArrival;
        e.time = 1.5;
        e.src = s.domains[0].nodes[0].name;
        e.dst = s.domains[0].nodes[1].name;
        e.rate = 100;
        s.events.push_back(e);
        Scenario parsed = parse_scenario(render_scenario(s));
        ASSERT_EQ(parsed, s) << render_scenario(s);
        ASSERT_EQ(parse_scenario(render_scenario(parsed)), parsed);
    }
}

TEST(LoadScenario, MissingFileIsParseError)
{
    try {
        load_scenario("/nonexistent/ibnsim.json");
        FAIL();
    } catch (const Error& e) {
        EXPECT_EQ(e.code(), ErrorCode::kParseError);
    }
}

TEST(BuildDomains, NodeCapacitiesAndConfig)
{
    Scenario s = parse_scenario(R"({
      "schema": "ibnsim/scenario-v1", "grid_slots": 16, "k_paths": 2, "recovery": "none",
      "modes": [{"rate": 100, "reach": 900, "slots": 3}],
      "domains": [{"id": 4, "nodes": [{"name": "p", "ports": 2, "port_rate": 50, "add_drop": 1}, {"name": "q"}],
                   "links": [{"a": "p", "b": "q", "length": 10}]}]
    })");
    auto ds = build_domains(s);
    ASSERT_EQ(ds.size(), 1u);
    EXPECT_EQ(ds[0].id(), 4u);
    EXPECT_EQ(ds[0].graph().grid_size(), 16u);
    EXPECT_EQ(ds[0].graph().router(n(4, 1)).port_count, 2u);
    EXPECT_EQ(ds[0].graph().router(n(4, 1)).port_rate, 50.0);
    EXPECT_EQ(ds[0].graph().oxc(n(4, 1)).add_drop_capacity, 1u);
    EXPECT_EQ(ds[0].config().k_paths, 2u);
    EXPECT_EQ(ds[0].config().recovery, RecoveryPolicy::kNone);
    EXPECT_EQ(ds[0].config().modes.size(), 1u);
    EXPECT_EQ(ds[0].node_names().at(n(4, 2)), "q");
}
