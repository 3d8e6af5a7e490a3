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

#include "ibnsim/error.hpp"
#include "ibnsim/export.hpp"
#include "ibnsim/scenario.hpp"
#include "ibnsim/simulator.hpp"

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>

#include <fmt/format.h>
#include <spdlog/sinks/stdout_color_sinks.h>
#include <spdlog/spdlog.h>

#include "CLI11.hpp"

namespace fs = std::filesystem;
using namespace ibnsim;

namespace {

constexpr int kExitUsage = 1;
constexpr int kExitInput = 2;
constexpr int kExitRuntime = 3;

void setup_logging()
{
    auto logger = spdlog::stderr_color_mt("ibnsim");
    spdlog::set_default_logger(logger);
    spdlog::set_level(spdlog::level::warn);
    if (const char* env = std::getenv("IBNSIM_LOG")) {
        auto level = spdlog::level::from_str(env);
        if (level == spdlog::level::off && std::string(env) != "off") {
            spdlog::warn("IBNSIM_LOG: unknown level '{}'", env);
        } else {
            spdlog::set_level(level);
        }
    }
}

void write_file(const fs::path& path, const std::string& content)
{
    std::ofstream out(path, std::ios::binary);
    out << content;
    if (!out) {
        throw Error(ErrorCode::kInvalidConfig, "cannot write " + path.string());
    }
}

std::string read_file(const fs::path& path)
{
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        throw Error(ErrorCode::kParseError, "cannot read " + path.string());
    }
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

int exit_code_for(ErrorCode code)
{
    switch (code) {
    case ErrorCode::kParseError:
    case ErrorCode::kValidationError:
    case ErrorCode::kInvalidConfig:
        return kExitInput;
    default:
        return kExitRuntime;
    }
}

int cmd_run(const std::string& scenario_path, const std::optional<std::string>& out_dir,
            const std::optional<std::uint64_t>& seed)
{
    Scenario scenario = load_scenario(scenario_path);
    spdlog::info("loaded {} ({} domains, {} explicit events)", scenario_path, scenario.domains.size(),
                 scenario.events.size());
    RunResult result = run(scenario, seed);
    const Metrics& m = result.metrics;
    std::cout << fmt::format("offered={} blocked={} installed_ok={} failures_recovered={} "
                             "mean_slot_utilization={:.6f}\n",
                             m.offered, m.blocked, m.installed_ok, m.failures_recovered, m.mean_slot_utilization());
    if (!out_dir) {
        return 0;
    }
    fs::path dir(*out_dir);
    std::error_code ec;
    fs::create_directories(dir, ec);
    if (ec) {
        throw Error(ErrorCode::kInvalidConfig, "cannot create " + dir.string() + ": " + ec.message());
    }
    if (seed) {
        scenario.seed = *seed;
    }
    write_file(dir / "metrics.csv", metrics_csv(m));
    write_file(dir / "events.log", render_log(result.log));
    write_file(dir / "topology.json", export_topology(result.domains));
    for (const auto& d : result.domains) {
        write_file(dir / fmt::format("dag-{}.dot", d.id()), export_dag(d.dag()));
    }
    write_file(dir / "snapshot.json", save_snapshot(scenario, result.domains));
    spdlog::info("artifacts written to {}", dir.string());
    return 0;
}

std::vector<DomainController> load_run(const std::string& run_dir)
{
    return restore_snapshot(read_file(fs::path(run_dir) / "snapshot.json"));
}

} // namespace

int main(int argc, char** argv)
{
    setup_logging();

    CLI::App app{"Intent-driven multi-domain IP-optical network simulator"};
    app.require_subcommand(1);

    std::string scenario_path;
    std::optional<std::string> out_dir;
    std::optional<std::uint64_t> seed;
    auto* run_cmd = app.add_subcommand("run", "Simulate a scenario");
    run_cmd->add_option("scenario", scenario_path, "Scenario JSON file")->required();
    run_cmd->add_option("--out", out_dir, "Directory for metrics, log and exports");
    run_cmd->add_option("--seed", seed, "Override the scenario seed");

    std::string validate_path;
    auto* validate_cmd = app.add_subcommand("validate", "Check a scenario without running it");
    validate_cmd->add_option("scenario", validate_path, "Scenario JSON file")->required();

    std::string dag_dir;
    std::optional<DomainId> dag_domain;
    auto* dag_cmd = app.add_subcommand("export-dag", "Print the intent DAGs of a saved run as DOT");
    dag_cmd->add_option("run-dir", dag_dir, "Output directory of a previous run")->required();
    dag_cmd->add_option("--domain", dag_domain, "Only this domain");

    std::string topo_dir;
    auto* topo_cmd = app.add_subcommand("export-topology", "Print the topology of a saved run as JSON");
    topo_cmd->add_option("run-dir", topo_dir, "Output directory of a previous run")->required();

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        int rc = app.exit(e);
        return rc == 0 ? 0 : kExitUsage;
    }

    try {
        if (*run_cmd) {
            return cmd_run(scenario_path, out_dir, seed);
        }
        if (*validate_cmd) {
            Scenario s = load_scenario(validate_path);
            std::cout << fmt::format("{}: ok ({} domains)\n", validate_path, s.domains.size());
            return 0;
        }
        if (*dag_cmd) {
            auto domains = load_run(dag_dir);
            bool found = false;
            for (const auto& d : domains) {
                if (!dag_domain || *dag_domain == d.id()) {
                    std::cout << export_dag(d.dag());
                    found = true;
                }
            }
            if (!found) {
                std::cerr << "ibnsim: no domain " << *dag_domain << "\n";
                return kExitUsage;
            }
            return 0;
        }
        if (*topo_cmd) {
            auto domains = load_run(topo_dir);
            std::cout << export_topology(domains);
            return 0;
        }
    } catch (const Error& e) {
        std::cerr << "ibnsim: " << e.what() << "\n";
        return exit_code_for(e.code());
    } catch (const std::exception& e) {
        std::cerr << "ibnsim: " << e.what() << "\n";
        return kExitRuntime;
    }
    return kExitUsage;
}
