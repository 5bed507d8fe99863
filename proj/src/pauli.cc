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

#include "dmipt/pauli.h"

#include <bit>
#include <stdexcept>

#include "dmipt/bits.h"

namespace dmipt {

PauliString::PauliString(size_t n) : num_qubits(n), xs(words_for_bits(n), 0), zs(words_for_bits(n), 0) {}

PauliString PauliString::from_str(std::string_view text) {
    bool sign = false;
    if (!text.empty() && (text.front() == '+' || text.front() == '-')) {
        sign = text.front() == '-';
        text.remove_prefix(1);
    }
    PauliString p(text.size());
    p.sign = sign;
    for (size_t q = 0; q < text.size(); q++) {
        switch (text[q]) {
            case '_':
            case 'I':
                break;
            case 'X':
                p.set(q, true, false);
                break;
            case 'Y':
                p.set(q, true, true);
                break;
            case 'Z':
                p.set(q, false, true);
                break;
            default:
                throw std::invalid_argument("unrecognized Pauli character '" + std::string(1, text[q]) + "'");
        }
    }
    return p;
}

bool PauliString::x(size_t q) const { return get_bit(xs, q); }
bool PauliString::z(size_t q) const { return get_bit(zs, q); }

void PauliString::set(size_t q, bool x, bool z) {
    set_bit(xs, q, x);
    set_bit(zs, q, z);
}

std::string PauliString::str() const {
    std::string out(1, sign ? '-' : '+');
    for (size_t q = 0; q < num_qubits; q++) out += "_XZY"[x(q) + 2 * z(q)];
    return out;
}

int symplectic_inner(const PauliString &a, const PauliString &b) {
    if (a.num_qubits != b.num_qubits) {
        throw std::invalid_argument("symplectic_inner: length mismatch");
    }
    uint64_t acc = 0;
    for (size_t w = 0; w < a.xs.size(); w++) acc ^= (a.xs[w] & b.zs[w]) ^ (a.zs[w] & b.xs[w]);
    return std::popcount(acc) & 1;
}

}  // namespace dmipt
