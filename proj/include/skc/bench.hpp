// Copyright 2026 The skc Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

#include <cmath>
#include <cstdint>
#include <string>
#include <vector>

#include <json.hpp>

#include "skc/gates.hpp"
#include "skc/rng.hpp"
#include "skc/sk.hpp"

namespace skc {

/// One (target, depth) measurement of the scaling experiment.
struct BenchRecord {
  int target_id = 0;
  int depth = 0;
  double predicted_eps = 0.0;
  double measured_eps = 0.0;
  std::uint64_t raw_length = 0;
  std::uint64_t simplified_length = 0;
  std::vector<double> level_seconds;
};

struct BenchResult {
  std::vector<BenchRecord> records;
  /// Slope of ln(simplified_length) against ln ln(1/measured_eps); the
  /// recursion's asymptote is ln5/ln(3/2) ≈ 3.97, biased upward at small
  /// depth.
  double length_exponent = 0.0;
  /// Same fit against the unsimplified lengths.
  double raw_length_exponent = 0.0;
  /// Mean of ln(ε_n)/ln(ε_{n-1}) over usable consecutive levels (→ 3/2).
  double mean_order = 0.0;
  std::size_t order_count = 0;
};

namespace detail {

inline double fit_slope(const std::vector<double>& xs,
                        const std::vector<double>& ys) {
  if (xs.size() < 2) return 0.0;
  const auto n = static_cast<double>(xs.size());
  double sx = 0.0, sy = 0.0, sxx = 0.0, sxy = 0.0;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    sx += xs[i];
    sy += ys[i];
    sxx += xs[i] * xs[i];
    sxy += xs[i] * ys[i];
  }
  const double denom = n * sxx - sx * sx;
  return denom == 0.0 ? 0.0 : (n * sxy - sx * sy) / denom;
}

}  // namespace detail

/// Compiles `targets` Haar-random targets at every depth up to n_max and
/// fits the scaling exponents.  Fully deterministic for a fixed seed.
inline BenchResult run_bench(const BasicNet& net, const SkConstants& consts,
                             Eps0Mode mode, int targets, int n_max,
                             std::uint64_t seed) {
  if (targets < 1) throw UsageError("bench: need at least one target");
  if (n_max < 0) throw UsageError("bench: n_max must be non-negative");
  validate_net_for_compile(net, consts, mode);
  BenchResult out;
  Rng rng(seed);
  std::vector<double> fit_x, fit_y, fit_y_raw;
  std::vector<double> prev_eps(targets, -1.0);
  for (int t = 0; t < targets; ++t) {
    const Unitary target = haar_su(rng, net.dim());
    for (int n = 0; n <= n_max; ++n) {
      CompileReport rep = compile_target(target, n, net, consts, mode);
      BenchRecord rec;
      rec.target_id = t;
      rec.depth = n;
      rec.predicted_eps = rep.predicted_eps;
      rec.measured_eps = rep.measured_eps;
      rec.raw_length = rep.raw_length;
      rec.simplified_length = rep.simplified_length;
      rec.level_seconds = std::move(rep.level_seconds);
      if (rec.measured_eps > 1e-13 && rec.measured_eps < 0.3678794411714423 &&
          rec.simplified_length >= 1) {
        fit_x.push_back(std::log(std::log(1.0 / rec.measured_eps)));
        fit_y.push_back(std::log(static_cast<double>(rec.simplified_length)));
        fit_y_raw.push_back(std::log(static_cast<double>(rec.raw_length)));
      }
      if (n > 0 && prev_eps[t] > 1e-10 && prev_eps[t] < 0.9999 &&
          rec.measured_eps > 1e-10) {
        out.mean_order += std::log(rec.measured_eps) / std::log(prev_eps[t]);
        ++out.order_count;
      }
      prev_eps[t] = rec.measured_eps;
      out.records.push_back(std::move(rec));
    }
  }
  out.length_exponent = detail::fit_slope(fit_x, fit_y);
  out.raw_length_exponent = detail::fit_slope(fit_x, fit_y_raw);
  if (out.order_count > 0) out.mean_order /= static_cast<double>(out.order_count);
  return out;
}

inline std::string bench_to_tsv(const BenchResult& res, bool with_times) {
  std::string out =
      "target\tdepth\tpredicted_eps\tmeasured_eps\traw_length\t"
      "simplified_length";
  if (with_times) out += "\tlevel_seconds";
  out += '\n';
  for (const BenchRecord& r : res.records) {
    out += std::to_string(r.target_id) + '\t' + std::to_string(r.depth) + '\t' +
           detail::format_double(r.predicted_eps) + '\t' +
           detail::format_double(r.measured_eps) + '\t' +
           std::to_string(r.raw_length) + '\t' +
           std::to_string(r.simplified_length);
    if (with_times) {
      out += '\t';
      for (std::size_t i = 0; i < r.level_seconds.size(); ++i) {
        if (i > 0) out += ',';
        out += detail::format_double(r.level_seconds[i]);
      }
    }
    out += '\n';
  }
  out += "# length_exponent\t" + detail::format_double(res.length_exponent) +
         '\n';
  out += "# raw_length_exponent\t" +
         detail::format_double(res.raw_length_exponent) + '\n';
  out += "# mean_order\t" + detail::format_double(res.mean_order) + '\n';
  return out;
}

inline nlohmann::json bench_to_json(const BenchResult& res, bool with_times) {
  nlohmann::json records = nlohmann::json::array();
  for (const BenchRecord& r : res.records) {
    nlohmann::json rec = {
        {"target", r.target_id},
        {"depth", r.depth},
        {"predicted_eps", r.predicted_eps},
        {"measured_eps", r.measured_eps},
        {"raw_length", r.raw_length},
        {"simplified_length", r.simplified_length},
    };
    if (with_times) rec["level_seconds"] = r.level_seconds;
    records.push_back(std::move(rec));
  }
  return {{"records", std::move(records)},
          {"length_exponent", res.length_exponent},
          {"raw_length_exponent", res.raw_length_exponent},
          {"mean_order", res.mean_order}};
}

}  // namespace skc
