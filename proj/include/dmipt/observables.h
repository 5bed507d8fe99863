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

#ifndef DMIPT_OBSERVABLES_H
#define DMIPT_OBSERVABLES_H

#include <cstddef>
#include <span>
#include <vector>

#include "dmipt/tableau.h"

namespace dmipt {

/// A contiguous interval on a ring of `ring_size` sites, starting at `start` and wrapping.
class Region {
  public:
    Region(size_t start, size_t size, size_t ring_size);

    size_t start() const { return start_; }
    size_t size() const { return size_; }
    size_t ring_size() const { return ring_; }
    std::vector<size_t> qubits() const;

  private:
    size_t start_;
    size_t size_;
    size_t ring_;
};

/// Entropy in bits of the qubit set `qubits`: rank of the stabilizer generators restricted to
/// those qubits' X and Z columns, minus the set size. Any set of distinct in-range qubits.
size_t entanglement_entropy(const Tableau &state, std::span<const size_t> qubits);
size_t entanglement_entropy(const Tableau &state, const Region &region);

/// S of [0, k) for every k = 1..max_size, from one incremental elimination pass.
std::vector<size_t> prefix_entropies(const Tableau &state, size_t max_size);

/// Entropy of [0, L/2) where L is the system size (defaults to all qubits). Rejects odd L.
size_t half_chain_entropy(const Tableau &state, size_t system_size = 0);

/// I3 over the four contiguous quarters of the first `system_size` qubits (default: all).
int tripartite_mutual_information(const Tableau &state, size_t system_size = 0);

/// Entropy of the single qubit `ancilla`, 0 or 1.
size_t ancilla_entropy(const Tableau &state, size_t ancilla);

}  // namespace dmipt

#endif
