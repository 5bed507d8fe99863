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

#ifndef DMIPT_TABLEAU_H
#define DMIPT_TABLEAU_H

#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "dmipt/clifford2q.h"
#include "dmipt/pauli.h"
#include "dmipt/rng.h"

namespace dmipt {

struct MeasurementOutcome {
    int value = +1;  // Z eigenvalue, +1 or -1
    bool was_random = false;
    bool operator==(const MeasurementOutcome &) const = default;
};

enum class FixtureGate { kH, kS, kCnot, kSwap };

FixtureGate parse_fixture_gate(std::string_view name);

/// Stabilizer/destabilizer tableau of an n-qubit pure stabilizer state.
///
/// Storage is qubit-major: for every qubit there is an x column and a z column holding one bit
/// per tableau row, so a gate touches only the columns of its qubits and an anticommuting-row
/// update is a masked xor down each column. Destabilizer i lives at row bit i; stabilizer i
/// lives at row bit 64*W + i, where W = ceil(n/64) is the number of words per half.
class Tableau {
  public:
    /// |0...0>: stabilizer i = +Z_i, destabilizer i = +X_i. Rejects n == 0.
    static Tableau zero_state(size_t n);

    size_t num_qubits() const { return n_; }

    PauliString stabilizer(size_t i) const;
    PauliString destabilizer(size_t i) const;

    void apply(const GateKernel &kernel, size_t qa, size_t qb);
    void apply(const CliffordGate2Q &gate, size_t qa, size_t qb);

    void h(size_t q);
    void s(size_t q);
    void cnot(size_t control, size_t target);
    void swap(size_t a, size_t b);
    void apply_fixture(FixtureGate gate, std::span<const size_t> targets);

    /// Projective Z measurement following the Born rule. Consumes exactly one draw whether or not
    /// the outcome is random, so the draw sequence does not depend on the state.
    MeasurementOutcome measure_z(size_t q, Rng &rng);

    /// Same state update and rng consumption as measure_z, but skips computing the sign of a
    /// deterministic outcome. Returns whether the outcome was random.
    bool collapse_z(size_t q, Rng &rng);

    /// Whether Z_q is (up to sign) in the stabilizer group.
    bool is_deterministic_z(size_t q) const;

    /// The same state tensored with one extra qubit in |0>, appended at index n.
    Tableau with_appended_qubit() const;

    /// Stabilizer half of qubit q's x / z column: bit i is set iff stabilizer i has X / Z on q.
    std::span<const uint64_t> stabilizer_x_column(size_t q) const;
    std::span<const uint64_t> stabilizer_z_column(size_t q) const;
    size_t words_per_half() const { return half_words_; }

    /// Checks symplectic orthonormality and full rank. On failure, writes the reason.
    bool validate(std::string *why = nullptr) const;

    /// Bit-identical storage (same stabilizer and destabilizer rows, including signs).
    bool operator==(const Tableau &other) const;

  private:
    explicit Tableau(size_t n);

    std::span<uint64_t> xcol(size_t q) { return {xs_.data() + q * stride_, stride_}; }
    std::span<uint64_t> zcol(size_t q) { return {zs_.data() + q * stride_, stride_}; }
    std::span<const uint64_t> xcol(size_t q) const { return {xs_.data() + q * stride_, stride_}; }
    std::span<const uint64_t> zcol(size_t q) const { return {zs_.data() + q * stride_, stride_}; }

    size_t stab_row(size_t i) const { return half_words_ * 64 + i; }
    PauliString row(size_t bit) const;
    void check_qubit(size_t q, const char *what) const;

    // Multiplies row `pivot` into every row selected by `mask`. All selected rows must commute
    // with the pivot.
    void multiply_rows_by(size_t pivot, std::span<const uint64_t> mask);
    int deterministic_sign(size_t q) const;
    void collapse_random(size_t q, size_t pivot_stab, bool outcome_bit);

    size_t n_ = 0;
    size_t half_words_ = 0;
    size_t stride_ = 0;
    std::vector<uint64_t> xs_;
    std::vector<uint64_t> zs_;
    std::vector<uint64_t> signs_;
    std::vector<uint64_t> scratch_;
};

}  // namespace dmipt

#endif
