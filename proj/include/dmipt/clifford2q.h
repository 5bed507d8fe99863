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

#ifndef DMIPT_CLIFFORD2Q_H
#define DMIPT_CLIFFORD2Q_H

#include <array>
#include <cstddef>
#include <cstdint>
#include <vector>

#include "dmipt/rng.h"

namespace dmipt {

/// Signed Hermitian Pauli on two qubits. Bit 0 of x/z is the first qubit, bit 1 the second.
struct Pauli2 {
    uint8_t x = 0;
    uint8_t z = 0;
    bool sign = false;
    bool operator==(const Pauli2 &) const = default;
};

/// A two-qubit Clifford, modulo global phase, as its conjugation images of X⊗I, Z⊗I, I⊗X, I⊗Z.
struct CliffordGate2Q {
    std::array<Pauli2, 4> images{};

    static CliffordGate2Q identity();

    /// Symplectic: (X_k, Z_k) images anticommute, every other pair of images commutes.
    bool is_valid() const;
    bool operator==(const CliffordGate2Q &) const = default;
};

/// Image of a signed Pauli under conjugation by `gate`.
Pauli2 conjugate(const CliffordGate2Q &gate, Pauli2 p);

/// The gate that applies `first` and then `second`.
CliffordGate2Q compose(const CliffordGate2Q &first, const CliffordGate2Q &second);

/// 20-bit serialization (5 bits per image). decode(encode(g)) == g.
uint32_t encode(const CliffordGate2Q &gate);
CliffordGate2Q decode(uint32_t key);

/// Word-parallel form of a gate. Inputs/outputs are ordered (x_a, z_a, x_b, z_b).
/// Output bit k is the parity of the inputs selected by linear[k]; the sign flips by the
/// polynomial whose monomials (subsets of the four inputs) are the set bits of sign_anf.
struct GateKernel {
    std::array<uint8_t, 4> linear{};
    uint16_t sign_anf = 0;
};

GateKernel compile(const CliffordGate2Q &gate);

enum class Generator : uint8_t { kH0, kH1, kS0, kS1, kCnot01, kCnot10 };

inline constexpr std::array<Generator, 6> kGenerators = {Generator::kH0,    Generator::kH1,    Generator::kS0,
                                                         Generator::kS1,    Generator::kCnot01, Generator::kCnot10};

CliffordGate2Q generator_gate(Generator g);

/// The full 11520-element two-qubit Clifford group, built once by breadth-first closure over the
/// generators. Index 0 is the identity; the order is fixed by the generator order above.
class CliffordGroup2Q {
  public:
    static constexpr size_t kOrder = 11520;

    static const CliffordGroup2Q &instance();

    size_t size() const { return gates_.size(); }
    const CliffordGate2Q &gate(size_t index) const { return gates_[index]; }
    const GateKernel &kernel(size_t index) const { return kernels_[index]; }
    const std::vector<CliffordGate2Q> &gates() const { return gates_; }

    /// Generator sequence (in application order) that produces gate `index` from the identity.
    std::vector<Generator> word(size_t index) const;

    /// Throws std::invalid_argument for a table that is not a group element.
    size_t index_of(const CliffordGate2Q &gate) const;

  private:
    CliffordGroup2Q();

    std::vector<CliffordGate2Q> gates_;
    std::vector<GateKernel> kernels_;
    std::vector<uint16_t> parent_;
    std::vector<Generator> via_;
    std::vector<uint16_t> index_by_key_;
};

std::vector<CliffordGate2Q> enumerate_2q_group();

/// Position of `gate` in the enumeration; identity maps to 0.
size_t canonical_index(const CliffordGate2Q &gate);

/// Uniform group index; one rejection-sampled draw.
size_t sample_uniform_2q_index(Rng &rng);

CliffordGate2Q sample_uniform_2q(Rng &rng);

}  // namespace dmipt

#endif
