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

#ifndef DMIPT_GF2_H
#define DMIPT_GF2_H

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

namespace dmipt {

/// Dense binary matrix, one bit-packed vector per row.
class BitMatrix {
  public:
    BitMatrix() = default;
    BitMatrix(size_t rows, size_t cols);

    size_t rows() const { return rows_; }
    size_t cols() const { return cols_; }
    size_t words_per_row() const { return words_; }

    bool get(size_t r, size_t c) const;
    void set(size_t r, size_t c, bool v);
    std::span<uint64_t> row(size_t r) { return {data_.data() + r * words_, words_}; }
    std::span<const uint64_t> row(size_t r) const { return {data_.data() + r * words_, words_}; }

    /// Rows given as strings of '0'/'1', column 0 first.
    static BitMatrix from_rows(std::initializer_list<const char *> rows);

  private:
    size_t rows_ = 0;
    size_t cols_ = 0;
    size_t words_ = 0;
    std::vector<uint64_t> data_;
};

/// Rank over GF(2). The argument is not modified.
size_t gf2_rank(const BitMatrix &m);

/// Incrementally built row space over GF(2), keyed by each basis vector's lowest set bit.
class Gf2Basis {
  public:
    explicit Gf2Basis(size_t bits);

    /// Reduces `v` against the basis and keeps it if independent. Returns true when the rank grew.
    bool insert(std::span<const uint64_t> v);
    size_t rank() const { return rank_; }
    void clear();

  private:
    size_t words_;
    size_t rank_ = 0;
    std::vector<uint64_t> vectors_;  // bits x words, slot b holds the vector whose lowest bit is b
    std::vector<uint8_t> occupied_;
    std::vector<uint64_t> scratch_;
};

}  // namespace dmipt

#endif
