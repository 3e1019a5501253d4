// Copyright 2026 The optoreadout Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

// Command-line front end. Talks to the library only through the C API.

#include <CLI11.hpp>
#include <cstdint>
#include <cstdio>
#include <ctime>
#include <filesystem>
#include <map>
#include <memory>
#include <sstream>
#include <string>
#include <vector>

#include "optoreadout/optoreadout.h"

namespace {

struct CliError {
  int code;
  std::string message;
};

void check(orx_status s) {
  if (s != ORX_OK) throw CliError{static_cast<int>(s), orx_last_error()};
}

struct ConfigDeleter {
  void operator()(orx_config* c) const { orx_config_free(c); }
};
struct ScenarioDeleter {
  void operator()(orx_scenario* s) const { orx_scenario_free(s); }
};
struct ShotsDeleter {
  void operator()(orx_shot_run* r) const { orx_shots_free(r); }
};
struct BudgetDeleter {
  void operator()(orx_budget_table* t) const { orx_budget_free(t); }
};

// Everything needed to reproduce a run. `out` and the timestamp are not
// part of the identity.
struct Run {
  std::string subcommand;
  std::string config;
  std::string scheme = "mw-mw";
  std::string state = "ge";
  std::uint64_t shots = 0;  // 0 keeps the config value
  std::uint64_t seed = 0;
  bool seed_set = false;
  std::string sweep;
  std::string format = "csv";
  unsigned threads = 0;
  std::string out;
};

std::string identity_text(const Run& r, const std::string& config_hash) {
  std::ostringstream os;
  os << "subcommand = " << r.subcommand << '\n'
     << "config = " << r.config << '\n'
     << "config_hash = " << config_hash << '\n'
     << "scheme = " << r.scheme << '\n'
     << "state = " << r.state << '\n'
     << "shots = " << r.shots << '\n'
     << "seed = " << (r.seed_set ? std::to_string(r.seed) : std::string("config")) << '\n'
     << "sweep = " << r.sweep << '\n'
     << "format = " << r.format << '\n';
  return os.str();
}

std::string utc_timestamp() {
  const std::time_t now = std::time(nullptr);
  std::tm tm{};
  gmtime_r(&now, &tm);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

std::vector<double> parse_sweep(const std::string& spec, std::string& variable) {
  std::vector<std::string> parts;
  std::stringstream ss(spec);
  for (std::string p; std::getline(ss, p, ':');) parts.push_back(p);
  if (parts.size() != 4)
    throw CliError{ORX_ERR_ARGUMENT, "--sweep expects var:start:stop:steps, got '" + spec + "'"};
  variable = parts[0];
  double start = 0, stop = 0;
  long long steps = 0;
  try {
    std::size_t used = 0;
    start = std::stod(parts[1], &used);
    if (used != parts[1].size()) throw std::invalid_argument("start");
    stop = std::stod(parts[2], &used);
    if (used != parts[2].size()) throw std::invalid_argument("stop");
    steps = std::stoll(parts[3], &used);
    if (used != parts[3].size()) throw std::invalid_argument("steps");
  } catch (const std::exception&) {
    throw CliError{ORX_ERR_ARGUMENT, "--sweep: cannot parse numbers in '" + spec + "'"};
  }
  if (steps < 0) throw CliError{ORX_ERR_ARGUMENT, "--sweep: steps must be >= 0"};
  std::vector<double> v(static_cast<std::size_t>(steps));
  for (long long k = 0; k < steps; ++k)
    v[static_cast<std::size_t>(k)] =
        steps == 1 ? start : start + (stop - start) * static_cast<double>(k) / static_cast<double>(steps - 1);
  return v;
}

int execute(Run run) {
  if (run.config.empty()) throw CliError{ORX_ERR_ARGUMENT, "--config is required"};
  if (run.out.empty()) throw CliError{ORX_ERR_ARGUMENT, "--out is required"};
  orx_format format{};
  check(orx_format_parse(run.format.c_str(), &format));
  orx_scheme scheme{};
  check(orx_scheme_parse(run.scheme.c_str(), &scheme));

  run.config = std::filesystem::absolute(run.config).lexically_normal().string();
  orx_config* raw = nullptr;
  check(orx_config_load(run.config.c_str(), &raw));
  std::unique_ptr<orx_config, ConfigDeleter> cfg(raw);
  char hash[65];
  check(orx_config_hash(cfg.get(), hash));
  if (run.seed_set) check(orx_config_set_seed(cfg.get(), run.seed));
  if (run.shots != 0) check(orx_config_set_shots(cfg.get(), run.shots));
  check(orx_config_set_threads(cfg.get(), run.threads));

  const std::string identity = identity_text(run, hash);
  char id[65];
  check(orx_sha256_hex(identity.data(), identity.size(), id));
  const std::string manifest_id(id, 16);
  std::ostringstream header;
  header << "manifest_id = " << manifest_id << '\n'
         << "config_hash = " << hash << '\n'
         << "subcommand = " << run.subcommand << '\n';

  if (run.subcommand == "simulate") {
    if (run.state != "g" && run.state != "e" && run.state != "ge")
      throw CliError{ORX_ERR_ARGUMENT, "--state must be g or e"};
    header << "scheme = " << run.scheme << '\n';
    orx_scenario* s = nullptr;
    check(orx_scenario_run(cfg.get(), scheme, &s));
    std::unique_ptr<orx_scenario, ScenarioDeleter> sc(s);
    check(orx_scenario_write(sc.get(), run.out.c_str(), run.state.c_str(), header.str().c_str(), format));
  } else if (run.subcommand == "shots") {
    std::uint64_t seed = 0;
    check(orx_config_get_seed(cfg.get(), &seed));
    header << "scheme = " << run.scheme << '\n' << "seed = " << seed << '\n';
    orx_shot_run* r = nullptr;
    check(orx_shots_run(cfg.get(), scheme, &r));
    std::unique_ptr<orx_shot_run, ShotsDeleter> shots(r);
    check(orx_shots_write(shots.get(), run.out.c_str(), header.str().c_str(), format));
    orx_fidelity f{};
    check(orx_shots_report(shots.get(), &f));
    std::printf("F = %.6f  P(e|g) = %.6f  P(g|e) = %.6f  eps_ol = %.3g%s\n", f.fidelity,
                f.p_e_given_g, f.p_g_given_e, f.eps_ol,
                f.meaningful ? "" : "  (fewer than 100 scores: fit not statistically meaningful)");
  } else if (run.subcommand == "budget") {
    if (run.sweep.empty()) throw CliError{ORX_ERR_ARGUMENT, "--sweep is required for budget"};
    std::string variable;
    const std::vector<double> values = parse_sweep(run.sweep, variable);
    header << "sweep = " << run.sweep << '\n';
    orx_budget_table* t = nullptr;
    check(orx_budget_sweep(cfg.get(), variable.c_str(), values.data(), values.size(), &t));
    std::unique_ptr<orx_budget_table, BudgetDeleter> table(t);
    check(orx_budget_write(table.get(), run.out.c_str(), header.str().c_str(), format));
  } else {
    throw CliError{ORX_ERR_ARGUMENT, "unknown subcommand '" + run.subcommand + "'"};
  }

  const std::string manifest = "optoreadout_manifest = 1\nmanifest_id = " + manifest_id + "\n" +
                               identity + "out = " + run.out + "\ntimestamp = " + utc_timestamp() + "\n";
  check(orx_write_text((std::filesystem::path(run.out) / "manifest.txt").string().c_str(),
                       manifest.c_str()));
  return 0;
}

Run load_manifest(const std::string& path) {
  char* raw = nullptr;
  check(orx_read_text(path.c_str(), &raw));
  const std::string text(raw);
  orx_string_free(raw);
  std::map<std::string, std::string> kv;
  std::istringstream in(text);
  for (std::string line; std::getline(in, line);) {
    const auto eq = line.find(" = ");
    if (eq == std::string::npos) continue;
    kv[line.substr(0, eq)] = line.substr(eq + 3);
  }
  if (kv["optoreadout_manifest"] != "1")
    throw CliError{ORX_ERR_ARGUMENT, path + " is not an optoreadout manifest"};
  Run r;
  r.subcommand = kv["subcommand"];
  r.config = kv["config"];
  r.scheme = kv["scheme"];
  r.state = kv["state"];
  r.sweep = kv["sweep"];
  r.format = kv["format"];
  r.out = kv["out"];
  try {
    r.shots = std::stoull(kv["shots"]);
    if (kv["seed"] != "config") {
      r.seed = std::stoull(kv["seed"]);
      r.seed_set = true;
    }
  } catch (const std::exception&) {
    throw CliError{ORX_ERR_ARGUMENT, path + ": malformed shots/seed entry"};
  }
  // The config must be byte-for-byte the same model as when recorded.
  orx_config* raw_cfg = nullptr;
  check(orx_config_load(r.config.c_str(), &raw_cfg));
  std::unique_ptr<orx_config, ConfigDeleter> cfg(raw_cfg);
  char hash[65];
  check(orx_config_hash(cfg.get(), hash));
  if (kv["config_hash"] != hash)
    throw CliError{ORX_ERR_CONFIG, "config " + r.config + " changed since the manifest was written"};
  return r;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"All-optical dispersive readout simulator"};
  app.require_subcommand(1);
  Run run;
  std::string seed_text;

  auto common = [&](CLI::App* sub) {
    sub->add_option("--config", run.config, "YAML device/run config")->required();
    sub->add_option("--out", run.out, "Output directory")->required();
    sub->add_option("--format", run.format, "csv or bin")->capture_default_str();
    sub->add_option("--threads", run.threads, "Worker threads (0 = all cores)");
  };
  auto* simulate = app.add_subcommand("simulate", "Averaged readout traces for |g> and |e>");
  common(simulate);
  simulate->add_option("--scheme", run.scheme, "mw-mw, mw-opt or opt-opt")->capture_default_str();
  simulate->add_option("--state", run.state, "g or e (default both)");

  auto* shots = app.add_subcommand("shots", "Single-shot Monte Carlo and fidelity report");
  common(shots);
  shots->add_option("--scheme", run.scheme, "mw-mw, mw-opt or opt-opt")->capture_default_str();
  shots->add_option("--shots", run.shots, "Shots per state");
  shots->add_option("--seed", seed_text, "RNG seed (u64)");

  auto* budget = app.add_subcommand("budget", "Coherence and fidelity budget sweep");
  common(budget);
  budget->add_option("--sweep", run.sweep, "var:start:stop:steps")->required();

  std::string manifest_path, replay_out;
  auto* replay = app.add_subcommand("replay", "Re-run a recorded manifest");
  replay->add_option("manifest", manifest_path, "manifest.txt")->required();
  replay->add_option("--out", replay_out, "Output directory (default: the recorded one)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? 0 : ORX_ERR_ARGUMENT;
  }

  try {
    if (replay->parsed()) {
      Run r = load_manifest(manifest_path);
      if (!replay_out.empty()) r.out = replay_out;
      return execute(r);
    }
    run.subcommand = app.get_subcommands().front()->get_name();
    if (!seed_text.empty()) {
      std::size_t used = 0;
      try {
        run.seed = std::stoull(seed_text, &used);
      } catch (const std::exception&) {
        used = 0;
      }
      if (used == 0 || used != seed_text.size() || seed_text[0] == '-')
        throw CliError{ORX_ERR_ARGUMENT, "--seed must be an unsigned 64-bit integer"};
      run.seed_set = true;
    }
    if (shots->parsed() && shots->count("--shots") && run.shots < 2)
      throw CliError{ORX_ERR_ARGUMENT, "--shots must be >= 2"};
    return execute(run);
  } catch (const CliError& e) {
    std::fprintf(stderr, "error: %s\n", e.message.c_str());
    return e.code;
  }
}
