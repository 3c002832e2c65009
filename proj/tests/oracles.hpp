// Copyright 2026 The ilsim Authors
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
//
// Test-side reference implementations. Everything here recomputes results
// through a path independent of the library internals (linear-space
// products, exhaustive scans), so the main code can be checked against it.

#ifndef ILSIM_TESTS_ORACLES_HPP_
#define ILSIM_TESTS_ORACLES_HPP_

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <vector>

#include "ilsim/bayes.hpp"

namespace ilsim::testing {

// Plain linear-space posterior: prior * product of likelihoods, normalized.
inline std::vector<double> direct_posterior(const MappingSpace& space,
                                            const std::vector<double>& prior,
                                            const std::vector<Example>& data,
                                            double epsilon) {
  std::vector<double> post(prior);
  const double miss =
      epsilon / static_cast<double>(space.num_outputs() - 1);
  for (std::size_t h = 0; h < post.size(); ++h)
    for (const Example& d : data)
      post[h] *= space.apply(h, d.x) == d.y ? 1.0 - epsilon : miss;
  double total = 0.0;
  for (double p : post) total += p;
  for (double& p : post) p /= total;
  return post;
}

// Exhaustive restricted argmax with lowest-index tie-breaking.
inline std::size_t scan_argmax(const std::vector<double>& values,
                               const std::vector<bool>* admissible = nullptr) {
  std::size_t best = values.size();
  for (std::size_t i = 0; i < values.size(); ++i) {
    if (admissible && !(*admissible)[i]) continue;
    if (best == values.size() || values[i] > values[best]) best = i;
  }
  return best;
}

// True when an observed count is within z sigmas of a binomial(n, p).
inline bool binomial_within(std::size_t count, std::size_t n, double p,
                            double z = 3.0) {
  const double mean = static_cast<double>(n) * p;
  const double sd = std::sqrt(static_cast<double>(n) * p * (1.0 - p));
  return std::abs(static_cast<double>(count) - mean) <= z * sd;
}

inline double median(std::vector<double> v) {
  std::sort(v.begin(), v.end());
  const std::size_t n = v.size();
  return n % 2 == 1 ? v[n / 2] : 0.5 * (v[n / 2 - 1] + v[n / 2]);
}

}  // namespace ilsim::testing

#endif  // ILSIM_TESTS_ORACLES_HPP_
