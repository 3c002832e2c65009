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

#ifndef ILSIM_RNG_HPP_
#define ILSIM_RNG_HPP_

#include <array>
#include <cstdint>
#include <span>

namespace ilsim {

// One step of the splitmix64 sequence; advances `state`.
std::uint64_t splitmix64(std::uint64_t& state);

// Deterministic per-run seed derived from a master seed and a run index.
// Every sweep and multi-seed experiment uses this so that results are
// reproducible independent of execution order.
std::uint64_t derive_seed(std::uint64_t master, std::uint64_t index);

// xoshiro256** generator. Hand-rolled (rather than <random> distributions)
// so that sampled sequences are identical across standard libraries and
// platforms for a given seed.
class Rng {
 public:
  explicit Rng(std::uint64_t seed);

  std::uint64_t next_u64();

  // Uniform double in [0, 1) with 53 random bits.
  double next_unit();

  // Uniform index in [0, n); rejection sampling, no modulo bias.
  std::size_t next_index(std::size_t n);

  bool bernoulli(double p);

  // Draws an index proportional to `probs` (assumed normalized; a trailing
  // guard returns the last positive entry on floating-point shortfall).
  std::size_t categorical(std::span<const double> probs);

 private:
  std::array<std::uint64_t, 4> state_;
};

}  // namespace ilsim

#endif  // ILSIM_RNG_HPP_
