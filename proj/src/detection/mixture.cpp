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
#include <limits>
#include <sstream>
#include <string>
#include <vector>

#include "optoreadout/constants.hpp"
#include "optoreadout/detection.hpp"
#include "optoreadout/error.hpp"

namespace optoreadout::detection {

namespace {

constexpr std::size_t kMinMeaningful = 100;

struct Moments {
  double mean = 0.0;
  double sigma = 0.0;
};

Moments moments(std::span<const double> x) {
  Moments m;
  if (x.empty()) return m;
  for (double v : x) m.mean += v;
  m.mean /= static_cast<double>(x.size());
  double ss = 0.0;
  for (double v : x) ss += (v - m.mean) * (v - m.mean);
  m.sigma = std::sqrt(ss / static_cast<double>(x.size()));
  return m;
}

double log_normal_pdf(double x, double mu, double sigma) {
  const double z = (x - mu) / sigma;
  return -0.5 * z * z - std::log(sigma) - 0.5 * std::log(constants::two_pi);
}

struct EmResult {
  GaussianComponent a, b;
  double ll = 0.0;
  int iterations = 0;
  bool converged = true;
  std::vector<double> trace;
};

[[noreturn]] void not_converged(const EmResult& r) {
  std::ostringstream os;
  os << "EM did not converge in " << r.iterations << " iterations; log-likelihood trace tail:";
  const std::size_t from = r.trace.size() > 5 ? r.trace.size() - 5 : 0;
  os.precision(12);
  for (std::size_t k = from; k < r.trace.size(); ++k) os << ' ' << r.trace[k];
  fail(ErrorKind::numeric, os.str());
}

// Overlapping components are not identifiable and EM only creeps towards the
// single-Gaussian solution; such a fit is returned flagged as degenerate.
EmResult checked(EmResult r) {
  if (!r.converged && !(std::abs(r.a.mean - r.b.mean) < 0.5 * (r.a.sigma + r.b.sigma))) not_converged(r);
  return r;
}

EmResult run_em(std::span<const double> x, GaussianComponent a, GaussianComponent b, double floor,
                const EmOptions& opt) {
  const std::size_t n = x.size();
  std::vector<double> ra(n);
  EmResult r;
  double prev = -std::numeric_limits<double>::infinity();
  for (int it = 1; it <= opt.max_iterations; ++it) {
    // E step.
    double ll = 0.0;
    const double lwa = std::log(a.weight), lwb = std::log(b.weight);
    for (std::size_t k = 0; k < n; ++k) {
      const double la = lwa + log_normal_pdf(x[k], a.mean, a.sigma);
      const double lb = lwb + log_normal_pdf(x[k], b.mean, b.sigma);
      const double m = std::max(la, lb);
      const double lse = m + std::log(std::exp(la - m) + std::exp(lb - m));
      ra[k] = std::exp(la - lse);
      ll += lse;
    }
    ll /= static_cast<double>(n);
    r.trace.push_back(ll);
    r.iterations = it;
    if (!std::isfinite(ll)) fail(ErrorKind::numeric, "EM: non-finite log-likelihood");
    if (std::abs(ll - prev) < opt.tolerance) {
      r.a = a;
      r.b = b;
      r.ll = ll;
      return r;
    }
    prev = ll;
    // M step.
    double na = 0.0, sa = 0.0;
    for (std::size_t k = 0; k < n; ++k) {
      na += ra[k];
      sa += ra[k] * x[k];
    }
    const double nb = static_cast<double>(n) - na;
    if (na <= 1e-9 || nb <= 1e-9) {
      // One component emptied: the data is effectively unimodal.
      r.a = a;
      r.b = b;
      r.ll = ll;
      return r;
    }
    double sb = 0.0;
    for (std::size_t k = 0; k < n; ++k) sb += (1.0 - ra[k]) * x[k];
    a.mean = sa / na;
    b.mean = sb / nb;
    double va = 0.0, vb = 0.0;
    for (std::size_t k = 0; k < n; ++k) {
      va += ra[k] * (x[k] - a.mean) * (x[k] - a.mean);
      vb += (1.0 - ra[k]) * (x[k] - b.mean) * (x[k] - b.mean);
    }
    a.sigma = std::max(std::sqrt(va / na), floor);
    b.sigma = std::max(std::sqrt(vb / nb), floor);
    a.weight = na / static_cast<double>(n);
    b.weight = nb / static_cast<double>(n);
  }
  r.a = a;
  r.b = b;
  r.ll = r.trace.empty() ? 0.0 : r.trace.back();
  r.converged = false;
  return r;
}

double sigma_floor(std::span<const double> x) {
  const auto [lo, hi] = std::minmax_element(x.begin(), x.end());
  const double scale = std::max({std::abs(*lo), std::abs(*hi), *hi - *lo});
  return std::max(1e-9 * scale, std::numeric_limits<double>::min());
}

}  // namespace

double DoubleGaussianFit::overlap_error() const {
  double mg = mu_g, me = mu_e, sg = sigma_g, se = sigma_e;
  if (core_g && core_e) {
    mg = core_g->mean;
    me = core_e->mean;
    sg = core_g->sigma;
    se = core_e->sigma;
  }
  const double sbar = 0.5 * (sg + se);
  if (!(sbar > 0.0)) return me == mg ? 0.5 : 0.0;
  return 0.5 * std::erfc(std::abs(me - mg) / (2.0 * std::sqrt(2.0) * sbar));
}

double equal_likelihood_threshold(const GaussianComponent& g, const GaussianComponent& e) {
  const double lo = std::min(g.mean, e.mean);
  const double hi = std::max(g.mean, e.mean);
  const double mid = 0.5 * (g.mean + e.mean);
  if (!(g.sigma > 0.0) || !(e.sigma > 0.0) || !(g.weight > 0.0) || !(e.weight > 0.0)) return mid;
  const double ig = 1.0 / (g.sigma * g.sigma);
  const double ie = 1.0 / (e.sigma * e.sigma);
  const double a = 0.5 * (ie - ig);
  const double b = g.mean * ig - e.mean * ie;
  const double c = 0.5 * (e.mean * e.mean * ie - g.mean * g.mean * ig) +
                   std::log(g.weight / g.sigma) - std::log(e.weight / e.sigma);
  std::vector<double> roots;
  if (std::abs(a) <= 1e-12 * std::max(ig, ie)) {
    if (b != 0.0) roots.push_back(-c / b);
  } else {
    const double disc = b * b - 4.0 * a * c;
    if (disc >= 0.0) {
      const double sq = std::sqrt(disc);
      // Numerically stable pair.
      const double q = -0.5 * (b + std::copysign(sq, b));
      if (q != 0.0) roots.push_back(c / q);
      roots.push_back(q / a);
    }
  }
  double best = mid;
  double best_dist = std::numeric_limits<double>::infinity();
  for (double r : roots) {
    if (r < lo || r > hi || !std::isfinite(r)) continue;
    if (std::abs(r - mid) < best_dist) {
      best = r;
      best_dist = std::abs(r - mid);
    }
  }
  return best;
}

DoubleGaussianFit fit_mixture_from(std::span<const double> scores, double mu_a, double mu_b,
                                   double sigma0, const EmOptions& options) {
  if (scores.size() < 2) fail(ErrorKind::argument, "mixture fit needs at least 2 scores");
  const double floor = sigma_floor(scores);
  const double s0 = std::max(sigma0, floor);
  const EmResult r = checked(run_em(scores, {mu_a, s0, 0.5}, {mu_b, s0, 0.5}, floor, options));
  DoubleGaussianFit f;
  f.mu_g = r.a.mean;
  f.sigma_g = r.a.sigma;
  f.w_g = r.a.weight;
  f.mu_e = r.b.mean;
  f.sigma_e = r.b.sigma;
  f.w_e = r.b.weight;
  f.log_likelihood = r.ll;
  f.iterations = r.iterations;
  f.log_likelihood_trace = r.trace;
  f.threshold = equal_likelihood_threshold(r.a, r.b);
  f.degenerate = std::abs(f.mu_e - f.mu_g) < f.sigma_mean();
  f.meaningful = scores.size() >= kMinMeaningful;
  return f;
}

DoubleGaussianFit fit_double_gaussian(std::span<const double> scores,
                                      std::span<const QubitState> labels, const EmOptions& options) {
  if (scores.size() < 2) fail(ErrorKind::argument, "fit_double_gaussian: need at least 2 scores");
  if (!labels.empty() && labels.size() != scores.size())
    fail(ErrorKind::argument, "fit_double_gaussian: labels and scores differ in length");
  for (double v : scores)
    if (!std::isfinite(v)) fail(ErrorKind::numeric, "fit_double_gaussian: non-finite score");

  std::vector<double> sorted(scores.begin(), scores.end());
  std::sort(sorted.begin(), sorted.end());
  const std::size_t half = sorted.size() / 2;
  const Moments lower = moments(std::span<const double>(sorted).first(half));
  const Moments upper = moments(std::span<const double>(sorted).subspan(half));
  const double floor = sigma_floor(scores);

  std::vector<double> xg, xe;
  if (!labels.empty()) {
    for (std::size_t k = 0; k < scores.size(); ++k)
      (labels[k] == QubitState::ground ? xg : xe).push_back(scores[k]);
  }
  const Moments mg = moments(xg);
  const Moments me = moments(xe);
  const bool labeled = !xg.empty() && !xe.empty();

  DoubleGaussianFit f;
  GaussianComponent a{lower.mean, std::max(lower.sigma, floor), 0.5};
  GaussianComponent b{upper.mean, std::max(upper.sigma, floor), 0.5};
  if (scores.size() >= kMinMeaningful) {
    const EmResult r = checked(run_em(scores, a, b, floor, options));
    a = r.a;
    b = r.b;
    f.log_likelihood = r.ll;
    f.iterations = r.iterations;
    f.log_likelihood_trace = r.trace;
    f.meaningful = true;
  } else {
    f.meaningful = false;
    if (labeled) {
      a = {mg.mean, std::max(mg.sigma, floor), 0.5};
      b = {me.mean, std::max(me.sigma, floor), 0.5};
    }
  }

  // Canonical order: by labels when available, else mu_g < mu_e.
  bool swap = a.mean > b.mean;
  if (labeled)
    swap = std::abs(a.mean - mg.mean) + std::abs(b.mean - me.mean) >
           std::abs(b.mean - mg.mean) + std::abs(a.mean - me.mean);
  if (swap) std::swap(a, b);
  f.mu_g = a.mean;
  f.sigma_g = a.sigma;
  f.w_g = a.weight;
  f.mu_e = b.mean;
  f.sigma_e = b.sigma;
  f.w_e = b.weight;
  f.degenerate = std::abs(f.mu_e - f.mu_g) < f.sigma_mean();
  f.threshold = f.meaningful ? equal_likelihood_threshold(a, b) : 0.5 * (a.mean + b.mean);

  if (labeled) {
    f.class_g = GaussianComponent{mg.mean, mg.sigma, 1.0};
    f.class_e = GaussianComponent{me.mean, me.sigma, 1.0};
    f.core_g = f.class_g;
    f.core_e = f.class_e;
    if (f.meaningful && xg.size() >= kMinMeaningful && xe.size() >= kMinMeaningful) {
      // Main component of a two-component fit per class, started at the
      // class's own centre and at the other class's centre.
      auto core = [&](const std::vector<double>& x, double own, double other,
                      double sigma0) -> std::optional<GaussianComponent> {
        try {
          const DoubleGaussianFit c = fit_mixture_from(x, own, other, sigma0, options);
          const GaussianComponent main{c.mu_g, c.sigma_g, c.w_g};
          if (!std::isfinite(main.mean) || !(main.sigma > 0.0) || main.weight < 0.5) return std::nullopt;
          return main;
        } catch (const Error&) {
          return std::nullopt;
        }
      };
      if (auto c = core(xg, f.mu_g, f.mu_e, f.sigma_g)) f.core_g = c;
      if (auto c = core(xe, f.mu_e, f.mu_g, f.sigma_e)) f.core_e = c;
    }
  }
  return f;
}

}  // namespace optoreadout::detection
