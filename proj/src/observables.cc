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

#include "dmipt/observables.h"

#include <stdexcept>
#include <string>

#include "dmipt/gf2.h"

namespace dmipt {

Region::Region(size_t start, size_t size, size_t ring_size) : start_(start), size_(size), ring_(ring_size) {
    if (size == 0) throw std::invalid_argument("Region: empty region");
    if (size > ring_size) throw std::invalid_argument("Region: larger than the ring");
    if (start >= ring_size) throw std::invalid_argument("Region: start out of range");
}

std::vector<size_t> Region::qubits() const {
    std::vector<size_t> out(size_);
    for (size_t k = 0; k < size_; k++) out[k] = (start_ + k) % ring_;
    return out;
}

size_t entanglement_entropy(const Tableau &state, std::span<const size_t> qubits) {
    if (qubits.empty()) throw std::invalid_argument("entanglement_entropy: empty region");
    const size_t n = state.num_qubits();
    std::vector<uint8_t> seen(n, 0);
    Gf2Basis basis(n);
    for (size_t q : qubits) {
        if (q >= n) throw std::out_of_range("entanglement_entropy: qubit " + std::to_string(q) + " out of range");
        if (seen[q]++) throw std::invalid_argument("entanglement_entropy: repeated qubit " + std::to_string(q));
        basis.insert(state.stabilizer_x_column(q));
        basis.insert(state.stabilizer_z_column(q));
    }
    return basis.rank() - qubits.size();
}

size_t entanglement_entropy(const Tableau &state, const Region &region) {
    if (region.ring_size() > state.num_qubits())
        throw std::invalid_argument("entanglement_entropy: region ring exceeds the state");
    auto qs = region.qubits();
    return entanglement_entropy(state, qs);
}

std::vector<size_t> prefix_entropies(const Tableau &state, size_t max_size) {
    if (max_size > state.num_qubits()) throw std::invalid_argument("prefix_entropies: size exceeds the state");
    Gf2Basis basis(state.num_qubits());
    std::vector<size_t> out;
    out.reserve(max_size);
    for (size_t q = 0; q < max_size; q++) {
        basis.insert(state.stabilizer_x_column(q));
        basis.insert(state.stabilizer_z_column(q));
        out.push_back(basis.rank() - (q + 1));
    }
    return out;
}

size_t half_chain_entropy(const Tableau &state, size_t system_size) {
    const size_t L = system_size ? system_size : state.num_qubits();
    if (L % 2) throw std::invalid_argument("half_chain_entropy: odd system size");
    if (L > state.num_qubits()) throw std::invalid_argument("half_chain_entropy: system larger than the state");
    return entanglement_entropy(state, Region(0, L / 2, L));
}

int tripartite_mutual_information(const Tableau &state, size_t system_size) {
    const size_t L = system_size ? system_size : state.num_qubits();
    if (L == 0 || L % 4) throw std::invalid_argument("tripartite_mutual_information: size not divisible by 4");
    if (L > state.num_qubits())
        throw std::invalid_argument("tripartite_mutual_information: system larger than the state");
    const size_t quarter = L / 4;
    auto S = [&](std::initializer_list<size_t> parts) {
        std::vector<size_t> qs;
        for (size_t part : parts) {
            for (size_t k = 0; k < quarter; k++) qs.push_back(part * quarter + k);
        }
        return static_cast<int>(entanglement_entropy(state, qs));
    };
    return S({0}) + S({1}) + S({2}) - S({0, 1}) - S({0, 2}) - S({1, 2}) + S({0, 1, 2});
}

size_t ancilla_entropy(const Tableau &state, size_t ancilla) {
    if (ancilla >= state.num_qubits()) throw std::out_of_range("ancilla_entropy: ancilla index out of range");
    const size_t qs[1] = {ancilla};
    return entanglement_entropy(state, qs);
}

}  // namespace dmipt
