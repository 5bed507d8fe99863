// Copyright 2026 The dmipt Authors
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

#ifndef DMIPT_RNG_H
#define DMIPT_RNG_H

#include <cstdint>
#include <random>

namespace dmipt {

/// Per-trajectory random stream. mt19937_64 output is fixed by the C++ standard, so streams are
/// reproducible across platforms as long as only raw draws are used (never std distributions).
using Rng = std::mt19937_64;

/// splitmix64 finalizer.
constexpr uint64_t mix64(uint64_t z) {
    z += 0x9e3779b97f4a7c15ULL;
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

/// Seed of trajectory `index` under `master_seed`. A bijection of `index` for a fixed master seed
/// and of `master_seed` for a fixed index, so neither axis can collide.
constexpr uint64_t trajectory_seed(uint64_t master_seed, uint64_t index) {
    return mix64(mix64(master_seed) ^ mix64(index + 0x5851f42d4c957f2dULL));
}

/// True with probability p (p outside [0,1] saturates). Consumes exactly one draw.
inline bool bernoulli(Rng &rng, double p) {
    double u = static_cast<double>(rng() >> 11) * 0x1p-53;
    return u < p;
}

/// Uniform integer in [0, n) by rejection; n > 0.
inline uint64_t uniform_below(Rng &rng, uint64_t n) {
    uint64_t limit = UINT64_MAX - (UINT64_MAX % n + 1) % n;
    for (;;) {
        uint64_t v = rng();
        if (v <= limit) return v % n;
    }
}

}  // namespace dmipt

#endif
