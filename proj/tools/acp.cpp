/*
 * Copyright (c) 2026 The acp-aoi Authors.
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at:
 *
 *     http://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

// acp: simulation sweeps, controlled simulation runs, live UDP endpoints and
// CSV analysis.

#include <CLI11.hpp>
#include <atomic>
#include <csignal>
#include <fmt/format.h>
#include <iostream>

#include "acp/app/analyze.hpp"
#include "acp/app/commands.hpp"
#include "acp/app/config.hpp"

namespace {

std::atomic<bool> g_stop{false};

void on_signal(int) { g_stop = true; }

struct CommonFlags {
  std::string config_path;
  std::vector<std::string> overrides;
  std::vector<std::uint64_t> seeds;
  std::string out_dir;
};

void add_common(CLI::App* cmd, CommonFlags& f) {
  cmd->add_option("-c,--config", f.config_path, "configuration file (key = value)");
  cmd->add_option("-s,--set", f.overrides, "override a config key, key=value")
      ->take_all();
  cmd->add_option("--seeds", f.seeds, "seed list, overrides the config")
      ->delimiter(',');
  cmd->add_option("-o,--out", f.out_dir, "output directory, overrides the config");
}

acp::app::ExperimentConfig resolve(const CommonFlags& f) {
  auto cfg = f.config_path.empty() ? acp::app::ExperimentConfig{}
                                   : acp::app::load_config(f.config_path);
  for (const auto& o : f.overrides) acp::app::apply_override(cfg, o);
  if (!f.seeds.empty()) cfg.seeds = f.seeds;
  if (!f.out_dir.empty()) cfg.output_dir = f.out_dir;
  return cfg;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Age Control Protocol tools"};
  app.require_subcommand(1);

  CommonFlags sweep_f, run_f, source_f, monitor_f;
  auto* sweep = app.add_subcommand("sim-sweep", "open-loop age versus rate sweep");
  add_common(sweep, sweep_f);
  auto* run = app.add_subcommand("sim-run", "simulate ACP, Lazy or a fixed rate");
  add_common(run, run_f);
  auto* source = app.add_subcommand("source", "live source over UDP");
  add_common(source, source_f);
  auto* monitor = app.add_subcommand("monitor", "live monitor over UDP");
  add_common(monitor, monitor_f);

  std::vector<std::string> inputs;
  std::string analyze_out = ".";
  auto* analyze = app.add_subcommand("analyze", "summarise and compare runs CSVs");
  analyze->add_option("files", inputs, "runs.csv files; the first is compared "
                                       "against each of the others")
      ->required();
  analyze->add_option("-o,--out", analyze_out, "output directory");

  auto* keys = app.add_subcommand("config-keys", "list configuration keys");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? acp::app::kExitOk : acp::app::kExitConfig;
  }

  try {
    if (*sweep) {
      acp::app::cmd_sim_sweep(resolve(sweep_f), std::cout);
    } else if (*run) {
      acp::app::cmd_sim_run(resolve(run_f), std::cout);
    } else if (*source) {
      acp::app::cmd_source(resolve(source_f), std::cout);
    } else if (*monitor) {
      const auto cfg = resolve(monitor_f);
      std::signal(SIGINT, on_signal);
      std::signal(SIGTERM, on_signal);
      acp::app::cmd_monitor(cfg, &g_stop, std::cout);
    } else if (*analyze) {
      acp::app::cmd_analyze(inputs, analyze_out, std::cout);
    } else if (*keys) {
      for (const auto& k : acp::app::config_keys()) std::cout << k << '\n';
    }
  } catch (const acp::Error& e) {
    std::cerr << fmt::format("acp: {}: {}\n", acp::to_string(e.code()), e.what());
    return acp::app::exit_code(e.code());
  } catch (const std::exception& e) {
    std::cerr << fmt::format("acp: {}\n", e.what());
    return acp::app::kExitRuntime;
  }
  return acp::app::kExitOk;
}
