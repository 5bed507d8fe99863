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

#ifndef DMIPT_BITS_H
#define DMIPT_BITS_H

#include <bit>
#include <cstddef>
#include <cstdint>
#include <span>

namespace dmipt {

inline constexpr size_t kWordBits = 64;

inline constexpr size_t words_for_bits(size_t n) { return (n + kWordBits - 1) / kWordBits; }

inline bool get_bit(std::span<const uint64_t> v, size_t k) { return (v[k / kWordBits] >> (k % kWordBits)) & 1; }

inline void set_bit(std::span<uint64_t> v, size_t k, bool value) {
    uint64_t m = uint64_t{1} << (k % kWordBits);
    if (value) {
        v[k / kWordBits] |= m;
    } else {
        v[k / kWordBits] &= ~m;
    }
}

inline void flip_bit(std::span<uint64_t> v, size_t k) { v[k / kWordBits] ^= uint64_t{1} << (k % kWordBits); }

/// All-ones when `b` is true, zero otherwise.
inline constexpr uint64_t broadcast(bool b) { return uint64_t{0} - static_cast<uint64_t>(b); }

inline size_t popcount_all(std::span<const uint64_t> v) {
    size_t c = 0;
    for (uint64_t w : v) c += static_cast<size_t>(std::popcount(w));
    return c;
}

/// Inclusive prefix parity within a word: bit i of the result is the xor of bits 0..i.
inline constexpr uint64_t prefix_parity(uint64_t v) {
    v ^= v << 1;
    v ^= v << 2;
    v ^= v << 4;
    v ^= v << 8;
    v ^= v << 16;
    v ^= v << 32;
    return v;
}

}  // namespace dmipt

#endif
