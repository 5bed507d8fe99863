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

#include "dmipt/gf2.h"

#include <algorithm>
#include <bit>
#include <cstring>
#include <stdexcept>

#include "dmipt/bits.h"

namespace dmipt {

BitMatrix::BitMatrix(size_t rows, size_t cols)
    : rows_(rows), cols_(cols), words_(words_for_bits(cols)), data_(rows * words_for_bits(cols), 0) {}

bool BitMatrix::get(size_t r, size_t c) const { return get_bit(row(r), c); }

void BitMatrix::set(size_t r, size_t c, bool v) { set_bit(row(r), c, v); }

BitMatrix BitMatrix::from_rows(std::initializer_list<const char *> rows) {
    size_t cols = rows.size() ? std::strlen(*rows.begin()) : 0;
    BitMatrix m(rows.size(), cols);
    size_t r = 0;
    for (const char *text : rows) {
        if (std::strlen(text) != cols) throw std::invalid_argument("BitMatrix::from_rows: ragged rows");
        for (size_t c = 0; c < cols; c++) m.set(r, c, text[c] == '1');
        r++;
    }
    return m;
}

size_t gf2_rank(const BitMatrix &m) {
    Gf2Basis basis(m.cols());
    for (size_t r = 0; r < m.rows(); r++) basis.insert(m.row(r));
    return basis.rank();
}

Gf2Basis::Gf2Basis(size_t bits)
    : words_(words_for_bits(bits)), vectors_(bits * words_, 0), occupied_(bits, 0), scratch_(words_, 0) {}

bool Gf2Basis::insert(std::span<const uint64_t> v) {
    std::copy(v.begin(), v.begin() + static_cast<std::ptrdiff_t>(words_), scratch_.begin());
    size_t w = 0;
    while (w < words_) {
        if (scratch_[w] == 0) {
            w++;
            continue;
        }
        size_t bit = w * kWordBits + static_cast<size_t>(std::countr_zero(scratch_[w]));
        uint64_t *slot = vectors_.data() + bit * words_;
        if (!occupied_[bit]) {
            std::copy(scratch_.begin(), scratch_.end(), slot);
            occupied_[bit] = 1;
            rank_++;
            return true;
        }
        // Slot vectors have no bits below `bit`, so words before w are untouched.
        for (size_t k = w; k < words_; k++) scratch_[k] ^= slot[k];
    }
    return false;
}

void Gf2Basis::clear() {
    std::fill(occupied_.begin(), occupied_.end(), 0);
    rank_ = 0;
}

}  // namespace dmipt
