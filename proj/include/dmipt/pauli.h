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

#ifndef DMIPT_PAULI_H
#define DMIPT_PAULI_H

#include <cstddef>
#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

namespace dmipt {

/// A Hermitian Pauli string (+/-) P_0 ... P_{n-1}, bit-packed. A qubit with both x and z set is Y.
struct PauliString {
    size_t num_qubits = 0;
    std::vector<uint64_t> xs;
    std::vector<uint64_t> zs;
    bool sign = false;  // true means -1

    PauliString() = default;
    explicit PauliString(size_t n);

    /// Parses "+XZ_Y" / "-IIZ" style strings; '_' and 'I' both mean identity.
    static PauliString from_str(std::string_view text);

    bool x(size_t q) const;
    bool z(size_t q) const;
    void set(size_t q, bool x, bool z);

    std::string str() const;
    bool operator==(const PauliString &other) const = default;
};

/// Parity of x_a.z_b + z_a.x_b; 0 iff the two strings commute. Throws on a length mismatch.
int symplectic_inner(const PauliString &a, const PauliString &b);

}  // namespace dmipt

#endif
