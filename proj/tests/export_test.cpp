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
#include "ibnsim/export.hpp"
#include "ibnsim/multidomain.hpp"
#include "ibnsim/scenario.hpp"
#include "ibnsim/simulator.hpp"

#include <cctype>
#include <sstream>

#include <gtest/gtest.h>

#include "json.hpp"

using namespace ibnsim;
using namespace ibnsim::testing;

namespace {

/// Recursive-descent checker for the Graphviz DOT language (without
/// subgraphs and ports, which the exporter never emits).
class DotChecker {
public:
    explicit DotChecker(std::string_view text)
        : s_(text)
    { }

    struct Summary {
        std::set<std::string> nodes;
        std::vector<std::pair<std::string, std::string>> edges;
        std::map<std::string, std::string> labels;
    };

    Summary parse()
    {
        ws();
        if (keyword("strict")) {
            ws();
        }
        if (keyword("digraph")) {
            directed_ = true;
        } else if (!keyword("graph")) {
            fail("expected graph or digraph");
        }
        ws();
        if (peek() != '{') {
            id();
            ws();
        }
        expect('{');
        stmt_list();
        expect('}');
        ws();
        if (pos_ != s_.size()) {
            fail("trailing input");
        }
        return out_;
    }

private:
    [[noreturn]] void fail(const std::string& what) const
    {
        throw std::runtime_error("DOT error at " + std::to_string(pos_) + ": " + what);
    }

    char peek() const { return pos_ < s_.size() ? s_[pos_] : '\0'; }

    void ws()
    {
        while (pos_ < s_.size() && std::isspace(static_cast<unsigned char>(s_[pos_]))) {
            ++pos_;
        }
    }

    void expect(char c)
    {
        ws();
        if (peek() != c) {
            fail(std::string("expected '") + c + "'");
        }
        ++pos_;
        ws();
    }

    bool keyword(std::string_view k)
    {
        if (s_.substr(pos_, k.size()) != k) {
            return false;
        }
        char next = pos_ + k.size() < s_.size() ? s_[pos_ + k.size()] : ' ';
        if (std::isalnum(static_cast<unsigned char>(next)) || next == '_') {
            return false;
        }
        pos_ += k.size();
        return true;
    }

    std::string id()
    {
        ws();
        std::string out;
        char c = peek();
        if (c == '"') {
            ++pos_;
            while (peek() != '"') {
                if (pos_ >= s_.size()) {
                    fail("unterminated string");
                }
                if (peek() == '\\' && pos_ + 1 < s_.size() && s_[pos_ + 1] == '"') {
                    ++pos_;
                }
                out += s_[pos_++];
            }
            ++pos_;
        } else if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') {
            while (std::isalnum(static_cast<unsigned char>(peek())) || peek() == '_') {
                out += s_[pos_++];
            }
        } else if (std::isdigit(static_cast<unsigned char>(c)) || c == '-' || c == '.') {
            while (std::isdigit(static_cast<unsigned char>(peek())) || peek() == '-' || peek() == '.') {
                out += s_[pos_++];
            }
        } else {
            fail("expected ID");
        }
        ws();
        return out;
    }

    std::map<std::string, std::string> attr_list()
    {
        std::map<std::string, std::string> attrs;
        while (peek() == '[') {
            expect('[');
            while (peek() != ']') {
                std::string k = id();
                expect('=');
                attrs[k] = id();
                if (peek() == ',' || peek() == ';') {
                    expect(peek());
                }
            }
            expect(']');
        }
        return attrs;
    }

    void stmt_list()
    {
        while (peek() != '}' && pos_ < s_.size()) {
            stmt();
            if (peek() == ';') {
                expect(';');
            }
        }
    }

    void stmt()
    {
        std::size_t save = pos_;
        if (keyword("node") || keyword("edge") || keyword("graph")) {
            ws();
            attr_list();
            return;
        }
        pos_ = save;
        std::string first = id();
        if (peek() == '=') {
            expect('=');
            id();
            return;
        }
        std::vector<std::string> chain{first};
        while (peek() == '-') {
            ++pos_;
            char op = peek();
            if ((directed_ && op != '>') || (!directed_ && op != '-')) {
                fail("wrong edge operator");
            }
            ++pos_;
            chain.push_back(id());
        }
        auto attrs = attr_list();
        if (chain.size() == 1) {
            out_.nodes.insert(first);
            if (attrs.contains("label")) {
                out_.labels[first] = attrs["label"];
            }
        } else {
            for (std::size_t i = 0; i + 1 < chain.size(); ++i) {
                out_.edges.emplace_back(chain[i], chain[i + 1]);
            }
        }
    }

    std::string_view s_;
    std::size_t pos_ = 0;
    bool directed_ = false;
    Summary out_;
};

std::size_t count_lines(const std::string& text)
{
    return static_cast<std::size_t>(std::count(text.begin(), text.end(), '\n'));
}

} // namespace

TEST(DotChecker, RejectsMalformedDocuments)
{
    EXPECT_THROW(DotChecker("digraph { a -- b }").parse(), std::runtime_error);
    EXPECT_THROW(DotChecker("digraph { \"a }").parse(), std::runtime_error);
    EXPECT_THROW(DotChecker("digraph { a [label=] }").parse(), std::runtime_error);
    EXPECT_THROW(DotChecker("tree { }").parse(), std::runtime_error);
    EXPECT_NO_THROW(DotChecker("strict digraph G { rankdir=LR; a -> b -> c [color=red]; }").parse());
}

TEST(ExportDag, EmptyDag)
{
    IntentDAG dag(1);
    std::string dot = export_dag(dag);
    auto summary = DotChecker(dot).parse();
    EXPECT_TRUE(summary.nodes.empty());
    EXPECT_TRUE(summary.edges.empty());
}

TEST(ExportDag, SingleIntent)
{
    IntentDAG dag(1);
    dag.add_intent(ConnectivityIntent{n(1, 1), n(1, 2), 100, {}});
    auto summary = DotChecker(export_dag(dag)).parse();
    EXPECT_EQ(summary.nodes, (std::set<std::string>{"1#1"}));
    EXPECT_TRUE(summary.edges.empty());
    EXPECT_EQ(summary.labels.at("1#1"), "connectivity / 1#1 / uncompiled");
}

TEST(ExportDag, ParentWithTwoChildren)
{
    DomainController dc = make_domain(make_graph(2, {{1, 2, 100}}));
    IntentId id = dc.dag().add_intent(ConnectivityIntent{n(1, 1), n(1, 2), 100, {}});
    IntentId a = dc.dag().add_child(id, RouterPortIntent{n(1, 1), 100});
    IntentId b = dc.dag().add_child(id, RouterPortIntent{n(1, 2), 100});
    dc.dag().transition(a, IntentState::kCompiled);
    auto summary = DotChecker(export_dag(dc.dag())).parse();
    EXPECT_EQ(summary.nodes.size(), 3u);
    ASSERT_EQ(summary.edges.size(), 2u);
    EXPECT_EQ(summary.edges[0], (std::pair<std::string, std::string>{"1#1", "1#2"}));
    EXPECT_EQ(summary.edges[1], (std::pair<std::string, std::string>{"1#1", "1#3"}));
    EXPECT_EQ(summary.labels.at(to_string(a)), "router-port / 1#2 / compiled");
    EXPECT_EQ(summary.labels.at(to_string(b)), "router-port / 1#3 / uncompiled");
    EXPECT_EQ(summary.labels.at(to_string(id)), "connectivity / 1#1 / uncompiled");
}

TEST(ExportDag, EqualDagsGiveEqualBytes)
{
    auto build = [] {
        auto ds = build_domains(load_scenario(IBNSIM_SCENARIO_DIR "/three-domain-line.json"));
        for (int i = 0; i < 4; ++i) {
            IntentId id = ds[0].dag().add_intent(ConnectivityIntent{n(1, 1), n(3, 3), 100, {}});
            compile_crossdomain(ds[0], id);
            deliver_messages(ds);
        }
        return ds;
    };
    auto x = build();
    auto y = build();
    for (std::size_t i = 0; i < x.size(); ++i) {
        std::string dot = export_dag(x[i].dag());
        EXPECT_EQ(dot, export_dag(y[i].dag()));
        auto summary = DotChecker(dot).parse();
        EXPECT_EQ(summary.nodes.size(), x[i].dag().size());
        EXPECT_EQ(summary.edges.size(), x[i].dag().edges().size());
    }
}

TEST(ExportTopology, EmptyNetwork)
{
    auto doc = nlohmann::json::parse(export_topology({}));
    EXPECT_TRUE(doc.at("domains").empty());
    DomainController dc(1, NetworkGraph(8));
    std::vector<DomainController> one{dc};
    doc = nlohmann::json::parse(export_topology(one));
    EXPECT_TRUE(doc["domains"][0]["nodes"].empty());
    EXPECT_TRUE(doc["domains"][0]["links"].empty());
}

TEST(ExportTopology, OverlayMatchesLedgerAndFailureIsFlagged)
{
    auto ds = build_domains(load_scenario(IBNSIM_SCENARIO_DIR "/triangle.json"));
    ds[0].set_config([&] {
        DomainConfig c = ds[0].config();
        c.recovery = RecoveryPolicy::kNone;
        return c;
    }());
    IntentId id = ds[0].dag().add_intent(ConnectivityIntent{n(1, 1), n(1, 2), 100, {}});
    compile_connectivity(ds[0], id);
    install_intent(ds[0], id);
    auto doc = nlohmann::json::parse(export_topology(ds));
    const auto& overlays = doc["domains"][0]["overlays"];
    ASSERT_EQ(overlays.size(), 1u);
    EXPECT_EQ(overlays[0]["path"], (nlohmann::json{"1:1", "1:2"}));
    EXPECT_EQ(overlays[0]["slot_range"], (nlohmann::json{1, 4}));
    EXPECT_EQ(overlays[0]["roots"], (nlohmann::json{"1#1"}));
    std::string lp = overlays[0]["lightpath"];
    for (const auto& [key, holder] : ds[0].ledger().spectrum_holdings()) {
        EXPECT_EQ(to_string(holder), lp);
        EXPECT_LE(key.second, 4u);
    }
    for (const auto& link : doc["domains"][0]["links"]) {
        if (link["a"] == "1:1" && link["b"] == "1:2") {
            EXPECT_EQ(link["slots"][0], lp);
            EXPECT_TRUE(link["slots"][4].is_null());
        }
    }

    monitor_failure(ds, LinkKey::of(n(1, 1), n(1, 2)));
    doc = nlohmann::json::parse(export_topology(ds));
    bool flagged = false;
    for (const auto& link : doc["domains"][0]["links"]) {
        if (link["a"] == "1:1" && link["b"] == "1:2") {
            flagged = link["operational"] == false;
        }
    }
    EXPECT_TRUE(flagged);
    EXPECT_EQ(doc["domains"][0]["overlays"][0]["state"], "failed");
}

TEST(MetricsCsv, RowCountAndLayout)
{
    RunResult r = run(load_scenario(IBNSIM_SCENARIO_DIR "/single-link.json"));
    std::string csv = metrics_csv(r.metrics);
    EXPECT_EQ(count_lines(csv), r.metrics.offered + kMetricsSummaryRows + 2);
    EXPECT_EQ(csv.substr(0, csv.find('\n')), "metric,value");
    EXPECT_NE(csv.find("\nintent_id,outcome,compile_time,install_time\n"), std::string::npos);
    EXPECT_NE(csv.find("\noffered,3\nblocked,1\ninstalled_ok,2\n"), std::string::npos);
    EXPECT_NE(csv.find("blocked-no-spectrum,,\n"), std::string::npos);

    RunResult big = run(load_scenario(IBNSIM_SCENARIO_DIR "/three-domain-line.json"));
    EXPECT_EQ(count_lines(metrics_csv(big.metrics)), big.metrics.offered + kMetricsSummaryRows + 2);
}

TEST(Snapshot, RestoresDagsAndReservations)
{
    Scenario s = load_scenario(IBNSIM_SCENARIO_DIR "/three-domain-line.json");
    // Explicit arrivals without holding times never depart.
    s.traffic.reset();
    const char* pairs[][2] = {{"d1n1", "d3n3"}, {"d3n2", "d1n2"}, {"d1n2", "d2n2"}, {"d2n1", "d3n3"}};
    double t = 1.0;
    for (const auto& p : pairs) {
        EventSpec a;
        a.kind = ScenarioEventKind::kArrival;
        a.time = t++;
        a.src = p[0];
        a.dst = p[1];
        a.rate = 100;
        s.events.push_back(a);
    }
    EventSpec down;
    down.kind = ScenarioEventKind::kLinkDown;
    down.time = 5.0;
    down.a = "d2n1";
    down.b = "d2n2";
    s.events.push_back(down);
    RunResult r = run(s);
    std::string snap = save_snapshot(s, r.domains);
    auto restored = restore_snapshot(snap);
    ASSERT_EQ(restored.size(), r.domains.size());
    for (std::size_t i = 0; i < restored.size(); ++i) {
        EXPECT_EQ(restored[i].dag(), r.domains[i].dag());
        EXPECT_EQ(restored[i].ledger(), r.domains[i].ledger());
        EXPECT_EQ(restored[i].graph().fiber_links(), r.domains[i].graph().fiber_links());
        EXPECT_EQ(restored[i].graph().routers(), r.domains[i].graph().routers());
    }
    EXPECT_EQ(export_topology(restored), export_topology(r.domains));
    EXPECT_FALSE(r.domains[0].dag().empty());
}

TEST(Snapshot, MalformedInput)
{
    EXPECT_THROW(restore_snapshot("{"), Error);
    EXPECT_THROW(restore_snapshot(R"({"format": "other"})"), Error);
    EXPECT_THROW(restore_snapshot(R"({"format": "ibnsim/snapshot-v1"})"), Error);
}
