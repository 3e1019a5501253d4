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

#include "optoreadout/config.hpp"

#include <openssl/evp.h>
#include <yaml-cpp/yaml.h>

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <fstream>
#include <set>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include "optoreadout/constants.hpp"
#include "optoreadout/error.hpp"

namespace optoreadout {

namespace {

enum class Kind { frequency, time, energy, power, temperature, rate, number, count, seed, flag };

struct Unit {
  const char* suffix;
  double scale;
};

std::vector<Unit> units_for(Kind kind) {
  using constants::two_pi;
  switch (kind) {
    case Kind::frequency:
      return {{"rad_per_s", 1.0}, {"GHz", two_pi * 1e9}, {"MHz", two_pi * 1e6},
              {"kHz", two_pi * 1e3}, {"Hz", two_pi}};
    case Kind::time: return {{"s", 1.0}, {"ms", 1e-3}, {"us", 1e-6}, {"ns", 1e-9}};
    case Kind::energy:
      return {{"J", 1.0}, {"eV", constants::electron_volt}, {"meV", 1e-3 * constants::electron_volt},
              {"ueV", 1e-6 * constants::electron_volt}};
    case Kind::power: return {{"W", 1.0}, {"mW", 1e-3}, {"uW", 1e-6}};
    case Kind::temperature: return {{"K", 1.0}, {"mK", 1e-3}};
    case Kind::rate: return {{"per_s", 1.0}};
    default: return {};
  }
}

struct Field {
  std::string name;
  Kind kind;
  bool required = false;
  double* number = nullptr;
  bool* flag = nullptr;
  std::size_t* count = nullptr;
  std::uint64_t* seed = nullptr;
  unsigned* small = nullptr;
};

struct PulseBinding {
  std::string path;
  PulseEnvelope* pulse;
};

struct Section {
  std::string path;
  std::vector<Field> fields;
  std::vector<std::string> subtables;
};

Field num(std::string name, Kind kind, double* target, bool required = false) {
  Field f{std::move(name), kind};
  f.required = required;
  f.number = target;
  return f;
}

Field flag(std::string name, bool* target) {
  Field f{std::move(name), Kind::flag};
  f.flag = target;
  return f;
}

struct Schema {
  std::vector<Section> sections;
  std::vector<PulseBinding> pulses;
};

Schema schema(RunConfig& c) {
  DeviceParams& d = c.device;
  auto& sc = c.scenario;
  auto& de = c.detection;
  auto& bu = c.budget;
  Schema s;
  s.sections.push_back({"qubit",
                        {num("omega_q", Kind::frequency, &d.omega_q, true),
                         num("nu", Kind::frequency, &d.nu, true),
                         num("g_qc", Kind::frequency, &d.g_qc, true),
                         num("chi", Kind::frequency, &d.chi, true),
                         num("chi0", Kind::frequency, &d.chi0, true),
                         num("delta_gap", Kind::energy, &d.delta_gap),
                         num("T1_ref", Kind::time, &d.T1_ref),
                         num("T2_ref", Kind::time, &d.T2_ref)},
                        {}});
  s.sections.push_back({"cqed_cavity",
                        {num("omega", Kind::frequency, &d.omega_c, true),
                         num("kappa", Kind::frequency, &d.kappa_c, true),
                         num("kappa_ext", Kind::frequency, &d.kappa_c_ext, true)},
                        {}});
  s.sections.push_back({"transceiver",
                        {num("omega_e", Kind::frequency, &d.omega_e, true),
                         num("kappa_e", Kind::frequency, &d.kappa_e, true),
                         num("kappa_e_ext", Kind::frequency, &d.kappa_e_ext, true),
                         num("omega_o", Kind::frequency, &d.omega_o, true),
                         num("kappa_o", Kind::frequency, &d.kappa_o, true),
                         num("kappa_o_ext", Kind::frequency, &d.kappa_o_ext, true),
                         num("kappa_s", Kind::frequency, &d.kappa_s),
                         num("delta_s", Kind::frequency, &d.delta_s),
                         num("kappa_tm", Kind::frequency, &d.kappa_tm),
                         num("delta_tm", Kind::frequency, &d.delta_tm),
                         num("J", Kind::frequency, &d.J),
                         num("kappa_p", Kind::frequency, &d.kappa_p),
                         num("delta_p", Kind::frequency, &d.delta_p),
                         num("eta_p", Kind::number, &d.eta_p),
                         num("g0", Kind::frequency, &d.g0, true)},
                        {}});
  s.sections.push_back({"link",
                        {num("eta_ec", Kind::number, &d.eta_ec),
                         num("eta_ce", Kind::number, &d.eta_ce),
                         num("tau", Kind::time, &d.tau)},
                        {}});
  s.sections.push_back({"scenario",
                        {num("t_end", Kind::time, &sc.t_end),
                         num("output_dt", Kind::time, &sc.output_dt),
                         num("integration_start", Kind::time, &sc.integration_start),
                         num("integration_time", Kind::time, &sc.integration_time),
                         flag("pump_in_mw_mw", &sc.pump_in_mw_mw),
                         flag("stokes", &sc.stokes),
                         num("n_meas_sqrt_mw", Kind::number, &sc.n_meas_sqrt_mw),
                         num("n_meas_sqrt_opt", Kind::number, &sc.n_meas_sqrt_opt),
                         num("target_cooperativity", Kind::number, &sc.target_cooperativity)},
                        {"readout_mw", "readout_opt", "pump"}});
  s.pulses = {{"scenario.readout_mw", &sc.readout_mw},
              {"scenario.readout_opt", &sc.readout_opt},
              {"scenario.pump", &sc.pump}};

  Field shots{"shots_per_state", Kind::count};
  shots.count = &de.shots_per_state;
  Field seed{"seed", Kind::seed};
  seed.seed = &de.seed;
  Field threads{"threads", Kind::count};
  threads.small = &de.threads;
  s.sections.push_back({"detection",
                        {shots, seed,
                         num("snr_mw_mw", Kind::number, &de.snr_mw_mw),
                         num("snr_mw_opt", Kind::number, &de.snr_mw_opt),
                         num("snr_opt_opt", Kind::number, &de.snr_opt_opt),
                         num("eta_det_mw_mw", Kind::number, &de.eta_det_mw_mw),
                         num("eta_det_mw_opt", Kind::number, &de.eta_det_mw_opt),
                         num("eta_det_opt_opt", Kind::number, &de.eta_det_opt_opt),
                         num("t1", Kind::time, &de.t1),
                         num("thermal_excitation", Kind::number, &de.thermal_excitation),
                         num("readout_flip_probability", Kind::number, &de.readout_flip_probability),
                         num("qnd_delay", Kind::time, &de.qnd_delay),
                         flag("keep_iq", &de.keep_iq), threads},
                        {}});
  s.sections.push_back({"budget",
                        {num("pulse_power", Kind::power, &bu.pulse_power),
                         num("pulse_duration", Kind::time, &bu.pulse_duration),
                         num("t1_dark", Kind::time, &bu.t1_dark),
                         num("measurement_time", Kind::time, &bu.measurement_time),
                         num("qnd_delay", Kind::time, &bu.qnd_delay),
                         num("fidelity_residual", Kind::number, &bu.fidelity_residual),
                         num("mode_matching", Kind::number, &bu.mode_matching),
                         num("cooperativity", Kind::number, &bu.cooperativity),
                         num("x_neq", Kind::number, &bu.t1.x_neq),
                         num("purcell_factor", Kind::number, &bu.t1.purcell_factor),
                         num("purcell_slope", Kind::number, &bu.t1.purcell_slope),
                         num("n_dark", Kind::number, &bu.t1.n_dark),
                         num("rad_coefficient", Kind::rate, &bu.t1.rad_coefficient)},
                        {"temperature"}});
  s.sections.push_back({"budget.temperature", {}, {"eo", "mxc", "qubit", "cavity"}});
  const std::pair<const char*, budget::PowerLaw*> laws[] = {{"eo", &bu.thermal.eo},
                                                           {"mxc", &bu.thermal.mxc},
                                                           {"qubit", &bu.thermal.qubit},
                                                           {"cavity", &bu.thermal.cavity}};
  for (const auto& [name, law] : laws)
    s.sections.push_back({std::string("budget.temperature.") + name,
                          {num("T0", Kind::temperature, &law->t0),
                           num("coeff", Kind::number, &law->coeff),
                           num("exponent", Kind::number, &law->exponent)},
                          {}});
  return s;
}

[[noreturn]] void config_error(std::string_view origin, const std::string& what) {
  fail(ErrorKind::config, std::string(origin) + ": " + what);
}

double as_double(const YAML::Node& node, std::string_view origin, const std::string& key) {
  if (!node.IsScalar()) config_error(origin, key + " must be a number");
  try {
    return node.as<double>();
  } catch (const YAML::Exception&) {
    config_error(origin, key + " must be a number, got '" + node.Scalar() + "'");
  }
}

YAML::Node child(const YAML::Node& root, const std::string& path) {
  if (!root.IsMap()) return YAML::Node(YAML::NodeType::Undefined);
  const std::size_t dot = path.find('.');
  const YAML::Node next = root[path.substr(0, dot)];
  if (!next) return YAML::Node(YAML::NodeType::Undefined);
  if (dot == std::string::npos) return next;
  return child(next, path.substr(dot + 1));
}

// Matches `key` against `name` plus an allowed unit suffix.
bool match_key(const std::string& key, const Field& f, double& scale) {
  if (f.kind == Kind::number || f.kind == Kind::count || f.kind == Kind::seed || f.kind == Kind::flag) {
    scale = 1.0;
    return key == f.name;
  }
  for (const Unit& u : units_for(f.kind)) {
    if (key == f.name + "_" + u.suffix) {
      scale = u.scale;
      return true;
    }
  }
  return false;
}

void read_section(const YAML::Node& node, const Section& sec, std::string_view origin,
                  std::set<std::string>& present) {
  if (!node.IsMap()) config_error(origin, sec.path + " must be a table");
  for (const auto& kv : node) {
    const std::string key = kv.first.as<std::string>();
    const std::string where = sec.path + "." + key;
    bool known = false;
    for (const auto& sub : sec.subtables)
      if (key == sub) known = true;
    if (known) continue;
    for (const Field& f : sec.fields) {
      double scale = 1.0;
      if (!match_key(key, f, scale)) continue;
      known = true;
      const std::string id = sec.path + "." + f.name;
      if (!present.insert(id).second) config_error(origin, "duplicate value for " + id);
      const YAML::Node& v = kv.second;
      switch (f.kind) {
        case Kind::flag:
          try {
            *f.flag = v.as<bool>();
          } catch (const YAML::Exception&) {
            config_error(origin, where + " must be true or false");
          }
          break;
        case Kind::count:
        case Kind::seed: {
          const double x = as_double(v, origin, where);
          if (x < 0 || x != std::floor(x)) config_error(origin, where + " must be a non-negative integer");
          if (f.seed) {
            try {
              *f.seed = v.as<std::uint64_t>();
            } catch (const YAML::Exception&) {
              config_error(origin, where + " must be an unsigned 64-bit integer");
            }
          } else if (f.count) {
            *f.count = static_cast<std::size_t>(x);
          } else {
            *f.small = static_cast<unsigned>(x);
          }
          break;
        }
        default: {
          const double x = as_double(v, origin, where) * scale;
          if (!std::isfinite(x)) config_error(origin, where + " must be finite");
          *f.number = x;
        }
      }
    }
    if (!known) config_error(origin, "unknown key " + where);
  }
}

std::vector<cdouble> read_table(const YAML::Node& node, std::string_view origin, const std::string& path) {
  const YAML::Node re = node["table_re"];
  const YAML::Node im = node["table_im"];
  if (!re || !re.IsSequence()) config_error(origin, path + ".table_re must be a list");
  if (im && (!im.IsSequence() || im.size() != re.size()))
    config_error(origin, path + ".table_im must be a list as long as table_re");
  std::vector<cdouble> out(re.size());
  for (std::size_t k = 0; k < re.size(); ++k) {
    const double r = as_double(re[k], origin, path + ".table_re");
    const double i = im ? as_double(im[k], origin, path + ".table_im") : 0.0;
    out[k] = {r, i};
  }
  return out;
}

void read_pulse(const YAML::Node& node, PulseEnvelope& p, std::string_view origin,
                const std::string& path) {
  if (!node.IsMap()) config_error(origin, path + " must be a table");
  Section sec{path,
              {num("amplitude", Kind::number, nullptr), num("amplitude_re", Kind::number, nullptr),
               num("amplitude_im", Kind::number, nullptr), num("start", Kind::time, &p.start),
               num("duration", Kind::time, &p.duration), num("rise", Kind::time, &p.rise),
               num("carrier_detuning", Kind::frequency, &p.carrier_detuning),
               num("table_t0", Kind::time, &p.table_t0), num("table_dt", Kind::time, &p.table_dt)},
              {"shape", "domain", "table_re", "table_im"}};
  double amp = 0.0, amp_re = p.amplitude.real(), amp_im = p.amplitude.imag();
  sec.fields[0].number = &amp;
  sec.fields[1].number = &amp_re;
  sec.fields[2].number = &amp_im;
  std::set<std::string> present;
  read_section(node, sec, origin, present);
  const bool plain = present.count(path + ".amplitude") > 0;
  const bool parts = present.count(path + ".amplitude_re") || present.count(path + ".amplitude_im");
  if (plain && parts) config_error(origin, path + ": give amplitude or amplitude_re/amplitude_im, not both");
  if (plain) p.amplitude = amp;
  if (parts) p.amplitude = {amp_re, amp_im};
  if (node["shape"]) {
    try {
      p.shape = parse_pulse_shape(node["shape"].as<std::string>());
    } catch (const Error& e) {
      config_error(origin, path + ".shape: " + e.what());
    }
  }
  if (node["domain"]) {
    const auto d = node["domain"].as<std::string>();
    if (d == "microwave") p.domain = PulseDomain::microwave;
    else if (d == "optical") p.domain = PulseDomain::optical;
    else config_error(origin, path + ".domain must be microwave or optical");
  }
  if (node["table_re"] || node["table_im"]) p.table = read_table(node, origin, path);
  try {
    p.validate();
  } catch (const Error& e) {
    config_error(origin, path + ": " + e.what());
  }
}

void check_settings(const RunConfig& c, std::string_view origin) {
  const auto& s = c.scenario;
  if (!(s.t_end > 0.0)) config_error(origin, "scenario.t_end must be positive");
  if (!(s.output_dt > 0.0) || s.output_dt > s.t_end)
    config_error(origin, "scenario.output_dt must be positive and below t_end");
  if (s.integration_start < 0.0 || !(s.integration_time > 0.0) ||
      s.integration_start + s.integration_time > s.t_end * (1 + 1e-12))
    config_error(origin, "scenario integration window must lie inside [0, t_end]");
  if (s.n_meas_sqrt_mw < 0.0 || s.n_meas_sqrt_opt < 0.0 || s.target_cooperativity < 0.0)
    config_error(origin, "scenario calibration targets must be >= 0");
  const auto& d = c.detection;
  auto prob = [&](double v, const char* key) {
    if (v < 0.0 || v > 1.0) config_error(origin, std::string("detection.") + key + " must lie in [0, 1]");
  };
  prob(d.thermal_excitation, "thermal_excitation");
  prob(d.readout_flip_probability, "readout_flip_probability");
  for (double v : {d.snr_mw_mw, d.snr_mw_opt, d.snr_opt_opt})
    if (!(v > 0.0)) config_error(origin, "detection.snr_* must be positive");
  for (double v : {d.eta_det_mw_mw, d.eta_det_mw_opt, d.eta_det_opt_opt})
    if (v < 0.0 || v > 1.0) config_error(origin, "detection.eta_det_* must lie in [0, 1]");
  if (d.t1 < 0.0 || d.qnd_delay < 0.0) config_error(origin, "detection times must be >= 0");
  const auto& b = c.budget;
  if (b.pulse_power < 0.0 || b.pulse_duration < 0.0) config_error(origin, "budget pulse must be >= 0");
  if (!(b.t1_dark > 0.0) || b.measurement_time < 0.0 || b.qnd_delay < 0.0)
    config_error(origin, "budget times must be positive");
  if (b.fidelity_residual < 0.0 || b.fidelity_residual > 0.01)
    config_error(origin, "budget.fidelity_residual must lie in [0, 0.01]");
  if (b.mode_matching < 0.0 || b.mode_matching > 1.0)
    config_error(origin, "budget.mode_matching must lie in [0, 1]");
  if (b.t1.x_neq < 0.0 || b.t1.purcell_factor < 0.0 || b.t1.purcell_slope < 0.0 ||
      b.t1.n_dark < 0.0 || b.t1.rad_coefficient < 0.0 || b.cooperativity < 0.0)
    config_error(origin, "budget T1 model parameters must be >= 0");
  for (const auto* law : {&b.thermal.eo, &b.thermal.mxc, &b.thermal.qubit, &b.thermal.cavity})
    if (!(law->t0 > 0.0) || law->coeff < 0.0 || !(law->exponent > 0.0))
      config_error(origin, "budget.temperature laws need T0 > 0, coeff >= 0, exponent > 0");
}

std::string fmt(double v) {
  std::array<char, 40> buf{};
  std::snprintf(buf.data(), buf.size(), "%.17g", v);
  return buf.data();
}

const char* si_suffix(Kind kind) {
  switch (kind) {
    case Kind::frequency: return "_rad_per_s";
    case Kind::time: return "_s";
    case Kind::energy: return "_J";
    case Kind::power: return "_W";
    case Kind::temperature: return "_K";
    case Kind::rate: return "_per_s";
    default: return "";
  }
}

void emit_pulse(std::ostringstream& os, const std::string& indent, const std::string& name,
                const PulseEnvelope& p) {
  os << indent << name << ":\n";
  const std::string in = indent + "  ";
  os << in << "shape: " << pulse_shape_name(p.shape) << "\n";
  os << in << "domain: " << (p.domain == PulseDomain::microwave ? "microwave" : "optical") << "\n";
  os << in << "amplitude_re: " << fmt(p.amplitude.real()) << "\n";
  os << in << "amplitude_im: " << fmt(p.amplitude.imag()) << "\n";
  os << in << "start_s: " << fmt(p.start) << "\n";
  os << in << "duration_s: " << fmt(p.duration) << "\n";
  os << in << "rise_s: " << fmt(p.rise) << "\n";
  os << in << "carrier_detuning_rad_per_s: " << fmt(p.carrier_detuning) << "\n";
  if (p.shape == PulseShape::tabulated || !p.table.empty()) {
    os << in << "table_t0_s: " << fmt(p.table_t0) << "\n";
    os << in << "table_dt_s: " << fmt(p.table_dt) << "\n";
    os << in << "table_re: [";
    for (std::size_t k = 0; k < p.table.size(); ++k) os << (k ? ", " : "") << fmt(p.table[k].real());
    os << "]\n" << in << "table_im: [";
    for (std::size_t k = 0; k < p.table.size(); ++k) os << (k ? ", " : "") << fmt(p.table[k].imag());
    os << "]\n";
  }
}

}  // namespace

RunConfig parse_run_config(std::string_view text, std::string_view origin) {
  YAML::Node root;
  try {
    root = YAML::Load(std::string(text));
  } catch (const YAML::Exception& e) {
    config_error(origin, std::string("parse error: ") + e.what());
  }
  if (!root.IsMap()) config_error(origin, "top level must be a table");

  RunConfig c;
  Schema s = schema(c);
  std::set<std::string> present;
  std::set<std::string> tables;
  for (const auto& sec : s.sections) tables.insert(sec.path.substr(0, sec.path.find('.')));
  for (const auto& kv : root) {
    const auto key = kv.first.as<std::string>();
    if (!tables.count(key)) config_error(origin, "unknown table " + key);
  }
  for (const auto& sec : s.sections) {
    const YAML::Node node = child(root, sec.path);
    if (!node.IsDefined()) continue;
    read_section(node, sec, origin, present);
  }
  for (const auto& sec : s.sections)
    for (const auto& f : sec.fields)
      if (f.required && !present.count(sec.path + "." + f.name))
        config_error(origin, "missing mandatory field " + sec.path + "." + f.name);
  for (const auto& pb : s.pulses) {
    const YAML::Node node = child(root, pb.path);
    if (node.IsDefined()) read_pulse(node, *pb.pulse, origin, pb.path);
  }

  DeviceParams& d = c.device;
  auto has = [&](const char* id) { return present.count(id) > 0; };
  if (!has("transceiver.kappa_s")) d.kappa_s = d.kappa_o;
  if (!has("transceiver.kappa_tm")) d.kappa_tm = d.kappa_s;
  if (!has("transceiver.kappa_p")) d.kappa_p = d.kappa_o;
  if (!has("transceiver.eta_p") && d.kappa_o > 0.0) d.eta_p = d.kappa_o_ext / d.kappa_o;
  if (!has("qubit.delta_gap")) d.delta_gap = 205e-6 * constants::electron_volt;
  if (!has("budget.measurement_time")) c.budget.measurement_time = c.scenario.integration_time;

  try {
    d.validate();
  } catch (const Error& e) {
    config_error(origin, e.what());
  }
  check_settings(c, origin);
  return c;
}

RunConfig load_run_config(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) fail(ErrorKind::io, "cannot open config file " + path);
  std::ostringstream buf;
  buf << in.rdbuf();
  if (in.bad()) fail(ErrorKind::io, "cannot read config file " + path);
  return parse_run_config(buf.str(), path);
}

DeviceParams load_config(const std::string& path) { return load_run_config(path).device; }

std::string serialize(const RunConfig& config) {
  RunConfig c = config;
  Schema s = schema(c);
  std::ostringstream os;
  for (const auto& sec : s.sections) {
    const auto depth = static_cast<std::size_t>(std::count(sec.path.begin(), sec.path.end(), '.'));
    const std::string indent(2 * depth, ' ');
    const std::string leaf = sec.path.substr(sec.path.rfind('.') == std::string::npos ? 0 : sec.path.rfind('.') + 1);
    os << indent << leaf << ":\n";
    const std::string in = indent + "  ";
    for (const auto& f : sec.fields) {
      os << in << f.name << si_suffix(f.kind) << ": ";
      if (f.flag) os << (*f.flag ? "true" : "false");
      else if (f.seed) os << *f.seed;
      else if (f.count) os << *f.count;
      else if (f.small) os << *f.small;
      else os << fmt(*f.number);
      os << "\n";
    }
    if (sec.path == "scenario") {
      emit_pulse(os, in, "readout_mw", c.scenario.readout_mw);
      emit_pulse(os, in, "readout_opt", c.scenario.readout_opt);
      emit_pulse(os, in, "pump", c.scenario.pump);
    }
  }
  return os.str();
}

std::string sha256_hex(std::string_view text) {
  std::array<unsigned char, EVP_MAX_MD_SIZE> md{};
  unsigned int len = 0;
  if (EVP_Digest(text.data(), text.size(), md.data(), &len, EVP_sha256(), nullptr) != 1)
    fail(ErrorKind::numeric, "SHA-256 digest failed");
  static constexpr char hex[] = "0123456789abcdef";
  std::string out;
  out.reserve(2 * len);
  for (unsigned int i = 0; i < len; ++i) {
    out.push_back(hex[md[i] >> 4]);
    out.push_back(hex[md[i] & 0xF]);
  }
  return out;
}

std::string config_hash(const RunConfig& config) { return sha256_hex(serialize(config)); }

}  // namespace optoreadout
