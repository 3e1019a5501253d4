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

#include <algorithm>
#include <cmath>
#include <sstream>
#include <string>

#include "optoreadout/constants.hpp"
#include "optoreadout/error.hpp"
#include "optoreadout/io.hpp"

namespace optoreadout::io {

namespace {

class Report {
 public:
  Report& kv(std::string_view key, double v) {
    os_ << key << " = " << format_double(v) << '\n';
    return *this;
  }
  Report& kv(std::string_view key, std::string_view v) {
    os_ << key << " = " << v << '\n';
    return *this;
  }
  Report& kv_u(std::string_view key, std::uint64_t v) {
    os_ << key << " = " << v << '\n';
    return *this;
  }
  std::string str() const { return os_.str(); }

 private:
  std::ostringstream os_;
};

double normal_pdf(double x, double mu, double sigma) {
  if (!(sigma > 0.0)) return 0.0;
  const double z = (x - mu) / sigma;
  return std::exp(-0.5 * z * z) / (sigma * std::sqrt(constants::two_pi));
}

}  // namespace

Table trajectory_table(const dynamics::ScenarioResult& r) {
  Table t;
  const std::size_t n = r.time.size();
  std::vector<double> re(n), im(n);
  for (std::size_t k = 0; k < n; ++k) {
    re[k] = r.envelope[k].real();
    im[k] = r.envelope[k].imag();
  }
  t.add("time_s", r.time);
  t.add("envelope_re", std::move(re));
  t.add("envelope_im", std::move(im));
  t.add("power", r.power);
  t.add("background_power", std::vector<double>(n, r.background_power));
  const auto& tr = r.trajectory;
  if (tr.size() != n) return t;
  auto complex_cols = [&](const std::string& name, auto get) {
    std::vector<double> a(n), b(n);
    for (std::size_t k = 0; k < n; ++k) {
      const cdouble z = get(k);
      a[k] = z.real();
      b[k] = z.imag();
    }
    t.add(name + "_re", std::move(a));
    t.add(name + "_im", std::move(b));
  };
  complex_cols("a_c", [&](std::size_t k) { return tr.modes[k].a_c; });
  complex_cols("a_e", [&](std::size_t k) { return tr.modes[k].a_e; });
  complex_cols("a_o", [&](std::size_t k) { return tr.modes[k].a_o; });
  complex_cols("a_s", [&](std::size_t k) { return tr.modes[k].a_s; });
  complex_cols("a_tm", [&](std::size_t k) { return tr.modes[k].a_tm; });
  complex_cols("a_p_bar", [&](std::size_t k) { return tr.modes[k].a_p_bar; });
  complex_cols("a_c_out", [&](std::size_t k) { return tr.a_c_out[k]; });
  complex_cols("a_e_out", [&](std::size_t k) { return tr.a_e_out[k]; });
  complex_cols("a_o_out", [&](std::size_t k) { return tr.a_o_out[k]; });
  return t;
}

Table shots_table(const detection::ShotRunResult& r) {
  Table t;
  const std::size_t n = r.shots.size();
  std::vector<std::uint64_t> index(n), seed(n);
  std::vector<std::uint8_t> label(n), start(n), flip(n), assigned(n);
  std::vector<double> score(n);
  const bool e_above = r.fit.mu_e >= r.fit.mu_g;
  for (std::size_t k = 0; k < n; ++k) {
    const auto& s = r.shots[k];
    index[k] = k;
    seed[k] = s.seed;
    label[k] = s.label == QubitState::excited ? 1 : 0;
    start[k] = s.started_excited ? 1 : 0;
    flip[k] = s.flipped ? 1 : 0;
    score[k] = s.score;
    assigned[k] = (e_above ? s.score > r.fit.threshold : s.score < r.fit.threshold) ? 1 : 0;
  }
  t.add("index", std::move(index));
  t.add("prepared_e", std::move(label));
  t.add("seed", std::move(seed));
  t.add("started_excited", std::move(start));
  t.add("flipped", std::move(flip));
  t.add("score", std::move(score));
  t.add("assigned_e", std::move(assigned));
  return t;
}

Table histogram_table(const detection::ShotRunResult& r, std::size_t bins) {
  if (bins == 0) fail(ErrorKind::argument, "histogram: bins must be positive");
  if (r.shots.empty()) fail(ErrorKind::argument, "histogram: no shots");
  double lo = r.shots.front().score, hi = lo;
  for (const auto& s : r.shots) {
    lo = std::min(lo, s.score);
    hi = std::max(hi, s.score);
  }
  if (hi == lo) hi = lo + 1.0;
  const double width = (hi - lo) / static_cast<double>(bins);
  std::vector<double> centre(bins), fit_g(bins), fit_e(bins);
  std::vector<std::uint64_t> count_g(bins, 0), count_e(bins, 0);
  for (const auto& s : r.shots) {
    auto b = static_cast<std::size_t>((s.score - lo) / width);
    b = std::min(b, bins - 1);
    (s.label == QubitState::ground ? count_g : count_e)[b]++;
  }
  const double total = static_cast<double>(r.shots.size());
  for (std::size_t b = 0; b < bins; ++b) {
    centre[b] = lo + (static_cast<double>(b) + 0.5) * width;
    fit_g[b] = total * width * r.fit.w_g * normal_pdf(centre[b], r.fit.mu_g, r.fit.sigma_g);
    fit_e[b] = total * width * r.fit.w_e * normal_pdf(centre[b], r.fit.mu_e, r.fit.sigma_e);
  }
  Table t;
  t.add("bin_centre", std::move(centre));
  t.add("count_g", std::move(count_g));
  t.add("count_e", std::move(count_e));
  t.add("fit_g", std::move(fit_g));
  t.add("fit_e", std::move(fit_e));
  return t;
}

Table budget_table(budget::SweepVariable var, std::span<const double> values,
                   std::span<const budget::Prediction> rows) {
  if (values.size() != rows.size()) fail(ErrorKind::argument, "budget table: length mismatch");
  Table t;
  auto col = [&](const char* name, auto get) {
    std::vector<double> v(rows.size());
    for (std::size_t k = 0; k < rows.size(); ++k) v[k] = get(rows[k]);
    t.add(name, std::move(v));
  };
  t.add(std::string(budget::sweep_variable_name(var)), std::vector<double>(values.begin(), values.end()));
  using P = budget::Prediction;
  col("rep_rate_hz", [](const P& p) { return p.rep_rate; });
  col("p_avg_w", [](const P& p) { return p.thermal.p_avg; });
  col("t_mxc_k", [](const P& p) { return p.thermal.t_mxc; });
  col("t_eo_k", [](const P& p) { return p.thermal.t_eo; });
  col("t_cavity_k", [](const P& p) { return p.thermal.t_cavity; });
  col("t_qubit_k", [](const P& p) { return p.thermal.t_qubit; });
  col("x_qp", [](const P& p) { return p.budget.x_qp; });
  col("gamma_qp_per_s", [](const P& p) { return p.budget.gamma_qp; });
  col("gamma_purcell_per_s", [](const P& p) { return p.budget.gamma_purcell; });
  col("gamma_rad_per_s", [](const P& p) { return p.budget.gamma_rad; });
  col("n_th_cavity", [](const P& p) { return p.budget.n_th_cavity; });
  col("kappa_c_eff_rad_per_s", [](const P& p) { return p.budget.kappa_c_eff; });
  col("gamma_phi_per_s", [](const P& p) { return p.budget.gamma_phi; });
  col("t1_s", [](const P& p) { return p.budget.t1; });
  col("t2_s", [](const P& p) { return p.budget.t2; });
  col("p_thermal", [](const P& p) { return p.p_thermal; });
  col("eps_g", [](const P& p) { return p.eps_g; });
  col("eps_e", [](const P& p) { return p.eps_e; });
  col("fidelity", [](const P& p) { return p.fidelity; });
  col("p_g2_given_g1", [](const P& p) { return p.p_g2_given_g1; });
  col("p_e2_given_e1", [](const P& p) { return p.p_e2_given_e1; });
  col("qnd", [](const P& p) { return p.q; });
  col("cooperativity", [](const P& p) { return p.cooperativity; });
  col("eta_eo", [](const P& p) { return p.eta_eo; });
  return t;
}

std::string steady_state_report(const dynamics::ScenarioResult& g,
                                const dynamics::ScenarioResult& e) {
  Report r;
  r.kv("scheme", dynamics::scheme_name(g.scheme));
  r.kv("steady_power_g", g.steady_power);
  r.kv("steady_power_e", e.steady_power);
  r.kv("steady_envelope_g_re", g.steady_envelope.real());
  r.kv("steady_envelope_g_im", g.steady_envelope.imag());
  r.kv("steady_envelope_e_re", e.steady_envelope.real());
  r.kv("steady_envelope_e_im", e.steady_envelope.imag());
  r.kv("background_power", g.background_power);
  r.kv("drive_scale", g.drive_scale);
  r.kv("plateau_coupling_rad_per_s", std::abs(g.plateau_coupling));
  r.kv("integration_dt_s", g.integration_dt);
  return r.str();
}

std::string fidelity_report(const detection::ShotRunResult& s) {
  Report r;
  r.kv("scheme", dynamics::scheme_name(s.scheme));
  r.kv_u("shots", s.shots.size());
  r.kv("fidelity", s.report.fidelity);
  r.kv("p_e_given_g", s.report.p_e_given_g);
  r.kv("p_g_given_e", s.report.p_g_given_e);
  r.kv("eps_g", s.report.eps_g);
  r.kv("eps_e", s.report.eps_e);
  r.kv("eps_ol", s.report.eps_ol);
  r.kv("integration_time_s", s.report.integration_time);
  r.kv("threshold", s.fit.threshold);
  r.kv("mu_g", s.fit.mu_g);
  r.kv("mu_e", s.fit.mu_e);
  r.kv("sigma_g", s.fit.sigma_g);
  r.kv("sigma_e", s.fit.sigma_e);
  r.kv("w_g", s.fit.w_g);
  r.kv("w_e", s.fit.w_e);
  r.kv_u("em_iterations", static_cast<std::uint64_t>(s.fit.iterations));
  r.kv("fit_meaningful", s.fit.meaningful ? "true" : "false");
  r.kv("fit_degenerate", s.fit.degenerate ? "true" : "false");
  r.kv("snr", s.snr);
  r.kv("separation", s.separation);
  r.kv("sigma_score", s.sigma_score);
  r.kv("weight_theta", s.weight.theta);
  r.kv("sigma_det", s.sigma_det);
  r.kv("eta_det", s.eta_det);
  r.kv_u("empirical_overlap_errors", s.empirical_overlap_errors);
  r.kv_u("empirical_overlap_shots", s.empirical_overlap_shots);
  return r.str();
}

}  // namespace optoreadout::io
