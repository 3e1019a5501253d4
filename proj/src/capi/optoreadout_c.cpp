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

#include "optoreadout/optoreadout.h"

#include <cstdlib>
#include <cstring>
#include <filesystem>
#include <memory>
#include <new>
#include <sstream>
#include <string>
#include <vector>

#include "optoreadout/budget.hpp"
#include "optoreadout/config.hpp"
#include "optoreadout/detection.hpp"
#include "optoreadout/dynamics.hpp"
#include "optoreadout/error.hpp"
#include "optoreadout/io.hpp"

using namespace optoreadout;

struct orx_config {
  RunConfig cfg;
};

struct orx_scenario {
  dynamics::ScenarioResult g, e;
};

struct orx_shot_run {
  detection::ShotRunResult run;
};

struct orx_budget_table {
  budget::SweepVariable variable;
  std::vector<double> values;
  std::vector<budget::Prediction> rows;
};

namespace {

thread_local std::string g_last_error;

template <class F>
orx_status guard(F&& body) {
  try {
    g_last_error.clear();
    body();
    return ORX_OK;
  } catch (const Error& e) {
    g_last_error = e.what();
    return static_cast<orx_status>(static_cast<int>(e.kind()));
  } catch (const std::bad_alloc&) {
    g_last_error = "out of memory";
    return ORX_ERR_INTERNAL;
  } catch (const std::exception& e) {
    g_last_error = std::string("internal error: ") + e.what();
    return ORX_ERR_INTERNAL;
  } catch (...) {
    g_last_error = "internal error";
    return ORX_ERR_INTERNAL;
  }
}

template <class T>
void require(const T* p, const char* what) {
  if (p == nullptr) fail(ErrorKind::argument, std::string(what) + " must not be NULL");
}

dynamics::Scheme to_scheme(orx_scheme s) {
  switch (s) {
    case ORX_SCHEME_MW_MW: return dynamics::Scheme::mw_mw;
    case ORX_SCHEME_MW_OPT: return dynamics::Scheme::mw_opt;
    case ORX_SCHEME_OPT_OPT: return dynamics::Scheme::opt_opt;
  }
  fail(ErrorKind::argument, "invalid scheme value " + std::to_string(static_cast<int>(s)));
}

io::Format to_format(orx_format f) {
  if (f == ORX_FORMAT_CSV) return io::Format::csv;
  if (f == ORX_FORMAT_BIN) return io::Format::bin;
  fail(ErrorKind::argument, "invalid format value");
}

std::vector<std::string> header_lines(const char* header) {
  std::vector<std::string> lines;
  if (header == nullptr) return lines;
  std::istringstream in(header);
  for (std::string line; std::getline(in, line);)
    if (!line.empty()) lines.push_back(line);
  return lines;
}

const dynamics::ScenarioResult& branch(const orx_scenario* s, char state) {
  if (state == 'g') return s->g;
  if (state == 'e') return s->e;
  fail(ErrorKind::argument, std::string("state must be 'g' or 'e', got '") + state + "'");
}

void copy_hex(const std::string& hex, char* out) { std::memcpy(out, hex.c_str(), hex.size() + 1); }

}  // namespace

extern "C" {

const char* orx_version(void) { return "0.1.0"; }

const char* orx_last_error(void) { return g_last_error.c_str(); }

orx_status orx_sha256_hex(const void* data, size_t size, char* out) {
  return guard([&] {
    require(out, "out");
    if (size > 0) require(data, "data");
    copy_hex(sha256_hex({static_cast<const char*>(data), size}), out);
  });
}

orx_status orx_scheme_parse(const char* text, orx_scheme* out) {
  return guard([&] {
    require(text, "text");
    require(out, "out");
    *out = static_cast<orx_scheme>(static_cast<int>(dynamics::parse_scheme(text)));
  });
}

const char* orx_scheme_name(orx_scheme scheme) {
  switch (scheme) {
    case ORX_SCHEME_MW_MW: return "mw-mw";
    case ORX_SCHEME_MW_OPT: return "mw-opt";
    case ORX_SCHEME_OPT_OPT: return "opt-opt";
  }
  return "?";
}

orx_status orx_format_parse(const char* text, orx_format* out) {
  return guard([&] {
    require(text, "text");
    require(out, "out");
    *out = io::parse_format(text) == io::Format::csv ? ORX_FORMAT_CSV : ORX_FORMAT_BIN;
  });
}

orx_status orx_config_load(const char* path, orx_config** out) {
  return guard([&] {
    require(path, "path");
    require(out, "out");
    *out = nullptr;
    auto c = std::make_unique<orx_config>();
    c->cfg = load_run_config(path);
    *out = c.release();
  });
}

orx_status orx_config_parse(const char* yaml_text, orx_config** out) {
  return guard([&] {
    require(yaml_text, "yaml_text");
    require(out, "out");
    *out = nullptr;
    auto c = std::make_unique<orx_config>();
    c->cfg = parse_run_config(yaml_text);
    *out = c.release();
  });
}

void orx_config_free(orx_config* config) { delete config; }

orx_status orx_config_hash(const orx_config* config, char* out) {
  return guard([&] {
    require(config, "config");
    require(out, "out");
    copy_hex(config_hash(config->cfg), out);
  });
}

orx_status orx_config_set_seed(orx_config* config, uint64_t seed) {
  return guard([&] {
    require(config, "config");
    config->cfg.detection.seed = seed;
  });
}

orx_status orx_config_set_shots(orx_config* config, uint64_t shots_per_state) {
  return guard([&] {
    require(config, "config");
    if (shots_per_state < 2) fail(ErrorKind::argument, "shots per state must be >= 2");
    config->cfg.detection.shots_per_state = shots_per_state;
  });
}

orx_status orx_config_set_threads(orx_config* config, unsigned threads) {
  return guard([&] {
    require(config, "config");
    config->cfg.detection.threads = threads;
  });
}

orx_status orx_config_get_seed(const orx_config* config, uint64_t* out) {
  return guard([&] {
    require(config, "config");
    require(out, "out");
    *out = config->cfg.detection.seed;
  });
}

orx_status orx_config_get_shots(const orx_config* config, uint64_t* out) {
  return guard([&] {
    require(config, "config");
    require(out, "out");
    *out = config->cfg.detection.shots_per_state;
  });
}

orx_status orx_config_derived(const orx_config* config, orx_derived* out) {
  return guard([&] {
    require(config, "config");
    require(out, "out");
    const auto& p = config->cfg.device;
    const double g = dynamics::coupling_for_cooperativity(p, config->cfg.scenario.target_cooperativity);
    const DerivedQuantities d = derived_quantities(p, g);
    *out = {d.eta_c, d.eta_e, d.eta_o, d.microwave_reflectivity, d.cooperativity};
  });
}

orx_status orx_scenario_run(const orx_config* config, orx_scheme scheme, orx_scenario** out) {
  return guard([&] {
    require(config, "config");
    require(out, "out");
    *out = nullptr;
    const auto s = to_scheme(scheme);
    auto r = std::make_unique<orx_scenario>();
    r->g = dynamics::readout_scenario(s, config->cfg.device, QubitState::ground, config->cfg.scenario);
    r->e = dynamics::readout_scenario(s, config->cfg.device, QubitState::excited, config->cfg.scenario);
    *out = r.release();
  });
}

void orx_scenario_free(orx_scenario* scenario) { delete scenario; }

orx_status orx_scenario_size(const orx_scenario* scenario, size_t* out) {
  return guard([&] {
    require(scenario, "scenario");
    require(out, "out");
    *out = scenario->g.time.size();
  });
}

orx_status orx_scenario_trace(const orx_scenario* scenario, char state, double* time, double* re,
                              double* im, size_t n) {
  return guard([&] {
    require(scenario, "scenario");
    const auto& r = branch(scenario, state);
    if (n > r.time.size()) fail(ErrorKind::argument, "requested more samples than the trace holds");
    for (size_t k = 0; k < n; ++k) {
      if (time) time[k] = r.time[k];
      if (re) re[k] = r.envelope[k].real();
      if (im) im[k] = r.envelope[k].imag();
    }
  });
}

orx_status orx_scenario_steady_power(const orx_scenario* scenario, char state, double* out) {
  return guard([&] {
    require(scenario, "scenario");
    require(out, "out");
    *out = branch(scenario, state).steady_power;
  });
}

orx_status orx_scenario_background_power(const orx_scenario* scenario, double* out) {
  return guard([&] {
    require(scenario, "scenario");
    require(out, "out");
    *out = scenario->g.background_power;
  });
}

orx_status orx_scenario_write(const orx_scenario* scenario, const char* dir, const char* states,
                              const char* header, orx_format format) {
  return guard([&] {
    require(scenario, "scenario");
    require(dir, "dir");
    const std::string which = states ? states : "ge";
    if (which.empty() || which.find_first_not_of("ge") != std::string::npos)
      fail(ErrorKind::argument, "states must be g, e or ge");
    const auto f = to_format(format);
    const auto lines = header_lines(header);
    for (char s : std::string("ge")) {
      if (which.find(s) == std::string::npos) continue;
      io::Table t = io::trajectory_table(branch(scenario, s));
      t.header = lines;
      t.header.push_back(std::string("state = ") + s);
      io::write_table(t, dir, std::string("trace_") + s, f);
    }
    std::string report;
    for (const auto& l : lines) report += "# " + l + "\n";
    report += io::steady_state_report(scenario->g, scenario->e);
    io::write_text(std::filesystem::path(dir) / "steady_state.txt", report);
  });
}

orx_status orx_shots_run(const orx_config* config, orx_scheme scheme, orx_shot_run** out) {
  return guard([&] {
    require(config, "config");
    require(out, "out");
    *out = nullptr;
    const auto s = to_scheme(scheme);
    const auto& c = config->cfg;
    const auto g = dynamics::readout_scenario(s, c.device, QubitState::ground, c.scenario);
    const auto e = dynamics::readout_scenario(s, c.device, QubitState::excited, c.scenario);
    const double n_sqrt =
        s == dynamics::Scheme::opt_opt ? c.scenario.n_meas_sqrt_opt : c.scenario.n_meas_sqrt_mw;
    auto r = std::make_unique<orx_shot_run>();
    r->run = detection::run_shots(g, e, c.scenario.integration_start, c.scenario.integration_time,
                                  n_sqrt, c.detection);
    *out = r.release();
  });
}

void orx_shots_free(orx_shot_run* run) { delete run; }

orx_status orx_shots_report(const orx_shot_run* run, orx_fidelity* out) {
  return guard([&] {
    require(run, "run");
    require(out, "out");
    const auto& r = run->run;
    orx_fidelity f{};
    f.fidelity = r.report.fidelity;
    f.p_e_given_g = r.report.p_e_given_g;
    f.p_g_given_e = r.report.p_g_given_e;
    f.eps_g = r.report.eps_g;
    f.eps_e = r.report.eps_e;
    f.eps_ol = r.report.eps_ol;
    f.integration_time = r.report.integration_time;
    f.threshold = r.fit.threshold;
    f.snr = r.snr;
    f.sigma_det = r.sigma_det;
    f.eta_det = r.eta_det;
    f.shots = r.shots.size();
    f.empirical_overlap_errors = r.empirical_overlap_errors;
    f.empirical_overlap_shots = r.empirical_overlap_shots;
    f.meaningful = r.fit.meaningful ? 1 : 0;
    f.degenerate = r.fit.degenerate ? 1 : 0;
    *out = f;
  });
}

orx_status orx_shots_scores(const orx_shot_run* run, double* scores, size_t n) {
  return guard([&] {
    require(run, "run");
    require(scores, "scores");
    if (n > run->run.shots.size()) fail(ErrorKind::argument, "requested more scores than shots");
    for (size_t k = 0; k < n; ++k) scores[k] = run->run.shots[k].score;
  });
}

orx_status orx_shots_write(const orx_shot_run* run, const char* dir, const char* header,
                           orx_format format) {
  return guard([&] {
    require(run, "run");
    require(dir, "dir");
    const auto f = to_format(format);
    const auto lines = header_lines(header);
    io::Table shots = io::shots_table(run->run);
    shots.header = lines;
    io::write_table(shots, dir, "shots", f);
    io::Table hist = io::histogram_table(run->run);
    hist.header = lines;
    io::write_table(hist, dir, "histogram", f);
    std::string report;
    for (const auto& l : lines) report += "# " + l + "\n";
    report += io::fidelity_report(run->run);
    io::write_text(std::filesystem::path(dir) / "report.txt", report);
  });
}

orx_status orx_budget_sweep(const orx_config* config, const char* variable, const double* values,
                            size_t n, orx_budget_table** out) {
  return guard([&] {
    require(config, "config");
    require(variable, "variable");
    require(out, "out");
    *out = nullptr;
    if (n > 0) require(values, "values");
    auto t = std::make_unique<orx_budget_table>();
    t->variable = budget::parse_sweep_variable(variable);
    t->values.assign(values, values + n);
    t->rows = budget::sweep(t->variable, t->values, config->cfg.device, config->cfg.budget,
                            config->cfg.detection.threads);
    *out = t.release();
  });
}

void orx_budget_free(orx_budget_table* table) { delete table; }

orx_status orx_budget_size(const orx_budget_table* table, size_t* out) {
  return guard([&] {
    require(table, "table");
    require(out, "out");
    *out = table->rows.size();
  });
}

orx_status orx_budget_row_at(const orx_budget_table* table, size_t index, orx_budget_row* out) {
  return guard([&] {
    require(table, "table");
    require(out, "out");
    if (index >= table->rows.size()) fail(ErrorKind::argument, "row index out of range");
    const auto& p = table->rows[index];
    *out = {table->values[index], p.rep_rate,      p.thermal.p_avg, p.thermal.t_qubit,
            p.thermal.t_cavity,   p.budget.t1,     p.budget.t2,     p.p_thermal,
            p.fidelity,           p.q,             p.cooperativity, p.eta_eo};
  });
}

orx_status orx_budget_write(const orx_budget_table* table, const char* dir, const char* header,
                            orx_format format) {
  return guard([&] {
    require(table, "table");
    require(dir, "dir");
    io::Table t = io::budget_table(table->variable, table->values, table->rows);
    t.header = header_lines(header);
    io::write_table(t, dir, "budget", to_format(format));
  });
}

orx_status orx_write_text(const char* path, const char* text) {
  return guard([&] {
    require(path, "path");
    require(text, "text");
    io::write_text(path, text);
  });
}

orx_status orx_read_text(const char* path, char** out) {
  return guard([&] {
    require(path, "path");
    require(out, "out");
    *out = nullptr;
    const std::string s = io::read_text(path);
    char* buf = static_cast<char*>(std::malloc(s.size() + 1));
    if (!buf) throw std::bad_alloc();
    std::memcpy(buf, s.c_str(), s.size() + 1);
    *out = buf;
  });
}

void orx_string_free(char* s) { std::free(s); }

}  // extern "C"
