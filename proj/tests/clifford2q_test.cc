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

#include <cmath>
#include <set>

#include "gtest/gtest.h"

#include "support/statevector.h"

using namespace dmipt;
using dmipt::testing::StateVector;

namespace {

Eigen::Matrix4cd pauli_matrix(Pauli2 p) {
    Eigen::Matrix4cd m = Eigen::Matrix4cd::Zero();
    const int y = __builtin_popcount(p.x & p.z);
    const std::complex<double> iy = std::pow(std::complex<double>(0, 1), y);
    for (int i = 0; i < 4; i++) {
        const int zs = __builtin_popcount(i & p.z) & 1;
        m(i ^ p.x, i) = iy * (zs ? -1.0 : 1.0) * (p.sign ? -1.0 : 1.0);
    }
    return m;
}

Eigen::Matrix4cd unitary_of(size_t index) {
    Eigen::Matrix4cd u;
    for (int c = 0; c < 4; c++) {
        StateVector sv(2, c);
        sv.apply_group_element(index, 0, 1);
        u.col(c) = sv.amplitudes();
    }
    return u;
}

}  // namespace

TEST(clifford2q, identity_is_valid_and_fixed_by_conjugation) {
    CliffordGate2Q id = CliffordGate2Q::identity();
    ASSERT_TRUE(id.is_valid());
    Pauli2 p{3, 1, true};
    ASSERT_EQ(conjugate(id, p), p);
}

TEST(clifford2q, enumeration_has_11520_distinct_valid_elements) {
    auto all = enumerate_2q_group();
    ASSERT_EQ(all.size(), 11520u);
    std::set<size_t> indices;
    std::set<uint32_t> keys;
    for (const auto &g : all) {
        ASSERT_TRUE(g.is_valid());
        indices.insert(canonical_index(g));
        keys.insert(encode(g));
    }
    ASSERT_EQ(indices.size(), 11520u);
    ASSERT_EQ(keys.size(), 11520u);
}

TEST(clifford2q, identity_has_index_zero) {
    ASSERT_EQ(canonical_index(CliffordGate2Q::identity()), 0u);
    ASSERT_EQ(enumerate_2q_group()[0], CliffordGate2Q::identity());
}

TEST(clifford2q, sign_and_symplectic_counts) {
    // 720 symplectic parts, each with all 16 sign patterns.
    std::set<uint32_t> unsigned_parts;
    for (const auto &g : enumerate_2q_group()) {
        CliffordGate2Q u = g;
        for (auto &im : u.images) im.sign = false;
        unsigned_parts.insert(encode(u));
    }
    ASSERT_EQ(unsigned_parts.size(), 720u);
}

TEST(clifford2q, closed_under_composition) {
    const auto &group = CliffordGroup2Q::instance();
    Rng rng(11);
    for (int k = 0; k < 20000; k++) {
        const auto &a = group.gate(sample_uniform_2q_index(rng));
        const auto &b = group.gate(sample_uniform_2q_index(rng));
        ASSERT_NO_THROW(group.index_of(compose(a, b)));
    }
}

TEST(clifford2q, compose_matches_sequential_conjugation) {
    const auto &group = CliffordGroup2Q::instance();
    Rng rng(12);
    for (int k = 0; k < 2000; k++) {
        const auto &a = group.gate(sample_uniform_2q_index(rng));
        const auto &b = group.gate(sample_uniform_2q_index(rng));
        Pauli2 p{static_cast<uint8_t>(rng() & 3), static_cast<uint8_t>(rng() & 3), (rng() & 1) != 0};
        ASSERT_EQ(conjugate(compose(a, b), p), conjugate(b, conjugate(a, p)));
    }
}

TEST(clifford2q, encode_round_trip) {
    for (const auto &g : enumerate_2q_group()) {
        ASSERT_EQ(decode(encode(g)), g);
        ASSERT_EQ(canonical_index(decode(encode(g))), canonical_index(g));
    }
}

TEST(clifford2q, invalid_table_rejected) {
    CliffordGate2Q g = CliffordGate2Q::identity();
    g.images[1] = g.images[0];  // X and Z images equal: not symplectic
    ASSERT_FALSE(g.is_valid());
    ASSERT_THROW(canonical_index(g), std::invalid_argument);
}

TEST(clifford2q, generator_words_reproduce_the_conjugation_tables) {
    // U P U^dagger computed from dense matrices must equal the stored image for every element.
    const auto &group = CliffordGroup2Q::instance();
    const Pauli2 basis[4] = {{1, 0, false}, {0, 1, false}, {2, 0, false}, {0, 2, false}};
    for (size_t i = 0; i < group.size(); i++) {
        const Eigen::Matrix4cd u = unitary_of(i);
        ASSERT_TRUE((u.adjoint() * u).isIdentity(1e-12));
        for (int k = 0; k < 4; k++) {
            const Eigen::Matrix4cd lhs = u * pauli_matrix(basis[k]) * u.adjoint();
            ASSERT_TRUE(lhs.isApprox(pauli_matrix(group.gate(i).images[k]), 1e-12)) << "element " << i << " image " << k;
        }
    }
}

TEST(clifford2q, sampler_is_deterministic_and_valid) {
    Rng a(99), b(99);
    for (int k = 0; k < 1000; k++) {
        CliffordGate2Q ga = sample_uniform_2q(a);
        ASSERT_EQ(ga, sample_uniform_2q(b));
        ASSERT_TRUE(ga.is_valid());
    }
}

TEST(clifford2q, sampler_chi_square_small) {
    // 2e5 draws over 11520 cells; the full 1e6-draw test lives in the acceptance suite.
    Rng rng(5);
    const size_t draws = 200000;
    std::vector<size_t> counts(CliffordGroup2Q::kOrder);
    for (size_t k = 0; k < draws; k++) counts[sample_uniform_2q_index(rng)]++;
    const double expected = double(draws) / double(counts.size());
    double chi2 = 0;
    for (size_t c : counts) chi2 += (double(c) - expected) * (double(c) - expected) / expected;
    // dof = 11519; mean 11519, sd about 152. 4.5 sd bound.
    ASSERT_LT(std::abs(chi2 - 11519.0), 4.5 * std::sqrt(2.0 * 11519.0));
}
