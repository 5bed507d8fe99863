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

#include "dmipt/clifford2q.h"

#include <bit>
#include <stdexcept>

namespace dmipt {
namespace {

constexpr uint16_t kNoIndex = 0xFFFF;

// i^phase X^x Z^z, the non-Hermitian product form used for phase bookkeeping.
struct PhasedPauli2 {
    uint8_t x = 0;
    uint8_t z = 0;
    int phase = 0;
};

PhasedPauli2 to_phased(Pauli2 p) {
    return {p.x, p.z, (2 * p.sign + std::popcount(static_cast<unsigned>(p.x & p.z))) & 3};
}

PhasedPauli2 multiply(PhasedPauli2 a, PhasedPauli2 b) {
    // Z^z1 X^x2 = (-1)^{z1.x2} X^x2 Z^z1
    int phase = a.phase + b.phase + 2 * std::popcount(static_cast<unsigned>(a.z & b.x));
    return {static_cast<uint8_t>(a.x ^ b.x), static_cast<uint8_t>(a.z ^ b.z), phase & 3};
}

Pauli2 to_hermitian(PhasedPauli2 p) {
    int e = (p.phase - std::popcount(static_cast<unsigned>(p.x & p.z))) & 3;
    if (e & 1) throw std::logic_error("conjugation produced a non-Hermitian Pauli");
    return {p.x, p.z, e == 2};
}

}  // namespace

CliffordGate2Q CliffordGate2Q::identity() {
    CliffordGate2Q g;
    g.images = {Pauli2{1, 0, false}, Pauli2{0, 1, false}, Pauli2{2, 0, false}, Pauli2{0, 2, false}};
    return g;
}

bool CliffordGate2Q::is_valid() const {
    auto inner = [](Pauli2 a, Pauli2 b) {
        return std::popcount(static_cast<unsigned>((a.x & b.z) ^ (a.z & b.x))) & 1;
    };
    for (const Pauli2 &p : images) {
        if (p.x > 3 || p.z > 3) return false;
    }
    for (int i = 0; i < 4; i++) {
        for (int j = i + 1; j < 4; j++) {
            // Pairs (0,1) and (2,3) are the conjugate X/Z pairs.
            int expected = (i / 2 == j / 2) ? 1 : 0;
            if (inner(images[i], images[j]) != expected) return false;
        }
    }
    return true;
}

Pauli2 conjugate(const CliffordGate2Q &gate, Pauli2 p) {
    PhasedPauli2 acc{0, 0, (2 * p.sign + std::popcount(static_cast<unsigned>(p.x & p.z))) & 3};
    // X_a^xa Z_a^za X_b^xb Z_b^zb, in that order.
    const bool bits[4] = {bool(p.x & 1), bool(p.z & 1), bool(p.x & 2), bool(p.z & 2)};
    for (int k = 0; k < 4; k++) {
        if (bits[k]) acc = multiply(acc, to_phased(gate.images[k]));
    }
    return to_hermitian(acc);
}

CliffordGate2Q compose(const CliffordGate2Q &first, const CliffordGate2Q &second) {
    CliffordGate2Q out;
    for (int k = 0; k < 4; k++) out.images[k] = conjugate(second, first.images[k]);
    return out;
}

uint32_t encode(const CliffordGate2Q &gate) {
    uint32_t key = 0;
    for (int k = 0; k < 4; k++) {
        const Pauli2 &p = gate.images[k];
        uint32_t chunk = (p.x & 3u) | ((p.z & 3u) << 2) | (uint32_t(p.sign) << 4);
        key |= chunk << (5 * k);
    }
    return key;
}

CliffordGate2Q decode(uint32_t key) {
    CliffordGate2Q g;
    for (int k = 0; k < 4; k++) {
        uint32_t chunk = (key >> (5 * k)) & 31u;
        g.images[k] = Pauli2{static_cast<uint8_t>(chunk & 3), static_cast<uint8_t>((chunk >> 2) & 3), bool(chunk >> 4)};
    }
    return g;
}

GateKernel compile(const CliffordGate2Q &gate) {
    GateKernel k;
    for (int in = 0; in < 4; in++) {
        const Pauli2 &img = gate.images[in];
        const bool out_bits[4] = {bool(img.x & 1), bool(img.z & 1), bool(img.x & 2), bool(img.z & 2)};
        for (int out = 0; out < 4; out++) {
            if (out_bits[out]) k.linear[out] |= static_cast<uint8_t>(1u << in);
        }
    }
    // Truth table of the sign flip over input patterns, then Moebius transform to monomials.
    std::array<uint8_t, 16> f{};
    for (unsigned pattern = 0; pattern < 16; pattern++) {
        Pauli2 p{static_cast<uint8_t>((pattern & 1) | ((pattern >> 1) & 2)),
                 static_cast<uint8_t>(((pattern >> 1) & 1) | ((pattern >> 2) & 2)), false};
        f[pattern] = conjugate(gate, p).sign;
    }
    for (unsigned bit = 1; bit < 16; bit <<= 1) {
        for (unsigned m = 0; m < 16; m++) {
            if (m & bit) f[m] ^= f[m ^ bit];
        }
    }
    for (unsigned m = 0; m < 16; m++) {
        if (f[m]) k.sign_anf |= static_cast<uint16_t>(1u << m);
    }
    return k;
}

CliffordGate2Q generator_gate(Generator g) {
    CliffordGate2Q c = CliffordGate2Q::identity();
    auto &im = c.images;
    switch (g) {
        case Generator::kH0:
            im[0] = {0, 1, false};
            im[1] = {1, 0, false};
            break;
        case Generator::kH1:
            im[2] = {0, 2, false};
            im[3] = {2, 0, false};
            break;
        case Generator::kS0:
            im[0] = {1, 1, false};
            break;
        case Generator::kS1:
            im[2] = {2, 2, false};
            break;
        case Generator::kCnot01:
            im[0] = {3, 0, false};
            im[3] = {0, 3, false};
            break;
        case Generator::kCnot10:
            im[2] = {3, 0, false};
            im[1] = {0, 3, false};
            break;
    }
    return c;
}

CliffordGroup2Q::CliffordGroup2Q() : index_by_key_(size_t{1} << 20, kNoIndex) {
    gates_.reserve(kOrder);
    CliffordGate2Q id = CliffordGate2Q::identity();
    gates_.push_back(id);
    parent_.push_back(kNoIndex);
    via_.push_back(Generator::kH0);
    index_by_key_[encode(id)] = 0;
    std::array<CliffordGate2Q, kGenerators.size()> gens;
    for (size_t i = 0; i < kGenerators.size(); i++) gens[i] = generator_gate(kGenerators[i]);

    for (size_t head = 0; head < gates_.size(); head++) {
        for (size_t i = 0; i < gens.size(); i++) {
            CliffordGate2Q next = compose(gates_[head], gens[i]);
            uint32_t key = encode(next);
            if (index_by_key_[key] != kNoIndex) continue;
            index_by_key_[key] = static_cast<uint16_t>(gates_.size());
            gates_.push_back(next);
            parent_.push_back(static_cast<uint16_t>(head));
            via_.push_back(kGenerators[i]);
        }
    }
    if (gates_.size() != kOrder) throw std::logic_error("two-qubit Clifford closure has unexpected order");
    kernels_.reserve(gates_.size());
    for (const auto &g : gates_) kernels_.push_back(compile(g));
}

const CliffordGroup2Q &CliffordGroup2Q::instance() {
    static const CliffordGroup2Q group;
    return group;
}

std::vector<Generator> CliffordGroup2Q::word(size_t index) const {
    std::vector<Generator> reversed;
    while (parent_.at(index) != kNoIndex) {
        reversed.push_back(via_[index]);
        index = parent_[index];
    }
    return {reversed.rbegin(), reversed.rend()};
}

size_t CliffordGroup2Q::index_of(const CliffordGate2Q &gate) const {
    for (const Pauli2 &p : gate.images) {
        if (p.x > 3 || p.z > 3) throw std::invalid_argument("canonical_index: malformed Clifford table");
    }
    uint16_t idx = index_by_key_[encode(gate)];
    if (idx == kNoIndex) throw std::invalid_argument("canonical_index: table is not a two-qubit Clifford");
    return idx;
}

std::vector<CliffordGate2Q> enumerate_2q_group() { return CliffordGroup2Q::instance().gates(); }

size_t canonical_index(const CliffordGate2Q &gate) { return CliffordGroup2Q::instance().index_of(gate); }

size_t sample_uniform_2q_index(Rng &rng) { return static_cast<size_t>(uniform_below(rng, CliffordGroup2Q::kOrder)); }

CliffordGate2Q sample_uniform_2q(Rng &rng) { return CliffordGroup2Q::instance().gate(sample_uniform_2q_index(rng)); }

}  // namespace dmipt
