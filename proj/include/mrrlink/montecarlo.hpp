// SPDX-License-Identifier: Apache-2.0
//
// Reproducible trial engine and density utilities. Trials are independent
// streams derived from (master_seed, trial_index); workers fill disjoint
// slots of a preallocated result vector and all reductions run in trial
// order, so the output is identical for any worker count.
#pragma once

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdint>
#include <functional>
#include <stdexcept>
#include <thread>
#include <vector>

#include "mrrlink/rng.hpp"

namespace mrrlink {

struct RngSpec {
  std::uint64_t master_seed = 1;
};

inline std::uint64_t trial_seed(const RngSpec& spec, std::uint64_t trial_index) {
  return derive_stream_seed(spec.master_seed, trial_index);
}

inline unsigned default_workers() {
  const unsigned hw = std::thread::hardware_concurrency();
  return hw == 0 ? 1 : hw;
}

// Runs fn(trial_index, stream) for every trial. Results land in a vector
// indexed by trial, independent of scheduling.
template <typename T, typename Fn>
std::vector<T> run_trials(std::size_t n_trials, const RngSpec& spec,
                          unsigned workers, Fn&& fn) {
  if (n_trials == 0) throw std::invalid_argument("run_trials: trial count must be >= 1");
  if (workers == 0) workers = 1;
  workers = static_cast<unsigned>(
      std::min<std::size_t>(workers, n_trials));
  std::vector<T> results(n_trials);
  if (workers == 1) {
    for (std::size_t i = 0; i < n_trials; ++i) {
      RandomStream rng(trial_seed(spec, i));
      results[i] = fn(i, rng);
    }
    return results;
  }
  std::atomic<std::size_t> next{0};
  const std::size_t chunk = std::max<std::size_t>(1, n_trials / (8 * workers));
  auto worker = [&]() {
    for (;;) {
      const std::size_t begin = next.fetch_add(chunk);
      if (begin >= n_trials) break;
      const std::size_t end = std::min(begin + chunk, n_trials);
      for (std::size_t i = begin; i < end; ++i) {
        RandomStream rng(trial_seed(spec, i));
        results[i] = fn(i, rng);
      }
    }
  };
  std::vector<std::thread> pool;
  pool.reserve(workers);
  for (unsigned t = 0; t < workers; ++t) pool.emplace_back(worker);
  for (auto& t : pool) t.join();
  return results;
}

// Streaming count/mean/M2 accumulator (Welford), mergeable in fixed order.
struct RunningStats {
  std::size_t n = 0;
  double mean = 0.0;
  double m2 = 0.0;

  void add(double x) {
    ++n;
    const double d = x - mean;
    mean += d / static_cast<double>(n);
    m2 += d * (x - mean);
  }

  void merge(const RunningStats& o) {
    if (o.n == 0) return;
    if (n == 0) {
      *this = o;
      return;
    }
    const double d = o.mean - mean;
    const double total = static_cast<double>(n + o.n);
    m2 += o.m2 + d * d * static_cast<double>(n) * static_cast<double>(o.n) / total;
    mean += d * static_cast<double>(o.n) / total;
    n += o.n;
  }

  double variance() const { return n > 1 ? m2 / static_cast<double>(n - 1) : 0.0; }
  double variance_population() const { return n > 0 ? m2 / static_cast<double>(n) : 0.0; }
};

inline RunningStats accumulate_stats(const std::vector<double>& xs) {
  RunningStats s;
  for (double x : xs) s.add(x);
  return s;
}

// ----- density estimation ----------------------------------------------------

struct Histogram {
  double lo = 0.0;
  double width = 0.0;
  std::vector<double> density;  // integrates to 1 over the covered range
  std::size_t n_samples = 0;

  double center(std::size_t i) const { return lo + (i + 0.5) * width; }
  double edge(std::size_t i) const { return lo + i * width; }
};

// Binned density with the Freedman-Diaconis default bin width. Degenerate
// samples (zero spread) produce a single unit-mass bin.
inline Histogram empirical_pdf(std::vector<double> samples,
                               double bin_width = 0.0) {
  if (samples.empty()) throw std::invalid_argument("empirical_pdf: no samples");
  std::sort(samples.begin(), samples.end());
  const std::size_t n = samples.size();
  const double lo_v = samples.front(), hi_v = samples.back();
  Histogram h;
  h.n_samples = n;
  if (bin_width <= 0.0) {
    auto quantile = [&](double q) {
      const double pos = q * static_cast<double>(n - 1);
      const std::size_t i = static_cast<std::size_t>(pos);
      const double frac = pos - static_cast<double>(i);
      return (i + 1 < n) ? samples[i] * (1.0 - frac) + samples[i + 1] * frac
                         : samples[i];
    };
    const double iqr = quantile(0.75) - quantile(0.25);
    bin_width = 2.0 * iqr / std::cbrt(static_cast<double>(n));
  }
  if (!(bin_width > 0.0) || hi_v - lo_v <= 0.0) {
    h.lo = lo_v - 0.5;
    h.width = 1.0;
    h.density.assign(1, 1.0);
    return h;
  }
  std::size_t bins = static_cast<std::size_t>(
      std::ceil((hi_v - lo_v) / bin_width));
  bins = std::clamp<std::size_t>(bins, 1, 4096);
  h.lo = lo_v;
  h.width = (hi_v - lo_v) / static_cast<double>(bins);
  h.density.assign(bins, 0.0);
  for (double x : samples) {
    std::size_t b = static_cast<std::size_t>((x - h.lo) / h.width);
    if (b >= bins) b = bins - 1;
    h.density[b] += 1.0;
  }
  const double norm = 1.0 / (static_cast<double>(n) * h.width);
  for (double& d : h.density) d *= norm;
  return h;
}

struct DensityDistance {
  double sup_norm_rel_peak = 0.0;  // max |emp - ana| / max(ana)
  double l1 = 0.0;                 // integral of |emp - ana|, in [0, 2]
};

// Compares a binned empirical density against an analytic one. The analytic
// density is bin-averaged (5-point Gauss-Legendre) so binning itself does not
// register as disagreement; analytic mass outside the histogram range counts
// toward the L1 distance.
inline DensityDistance compare_density(const Histogram& h,
                                       const std::function<double(double)>& analytic) {
  static const double gl_x[5] = {-0.9061798459386640, -0.5384693101056831, 0.0,
                                 0.5384693101056831, 0.9061798459386640};
  static const double gl_w[5] = {0.2369268850561891, 0.4786286704993665,
                                 0.5688888888888889, 0.4786286704993665,
                                 0.2369268850561891};
  DensityDistance d;
  double peak = 0.0, covered_mass = 0.0;
  for (std::size_t i = 0; i < h.density.size(); ++i) {
    const double a = h.edge(i), b = h.edge(i + 1);
    double avg = 0.0;
    for (int g = 0; g < 5; ++g) {
      avg += gl_w[g] * analytic(0.5 * (a + b) + 0.5 * (b - a) * gl_x[g]);
    }
    avg *= 0.5;
    peak = std::max(peak, avg);
    covered_mass += avg * h.width;
    d.sup_norm_rel_peak = std::max(d.sup_norm_rel_peak,
                                   std::fabs(h.density[i] - avg));
    d.l1 += std::fabs(h.density[i] - avg) * h.width;
  }
  d.l1 += std::max(0.0, 1.0 - covered_mass);
  d.sup_norm_rel_peak = (peak > 0.0)
                            ? d.sup_norm_rel_peak / peak
                            : (d.sup_norm_rel_peak > 0.0 ? 2.0 : 0.0);
  return d;
}

} // namespace mrrlink
