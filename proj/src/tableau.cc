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

#include "dmipt/tableau.h"

#include <algorithm>
#include <bit>
#include <stdexcept>

#include "dmipt/bits.h"
#include "dmipt/gf2.h"

namespace dmipt {

FixtureGate parse_fixture_gate(std::string_view name) {
    if (name == "H") return FixtureGate::kH;
    if (name == "S") return FixtureGate::kS;
    if (name == "CNOT" || name == "CX") return FixtureGate::kCnot;
    if (name == "SWAP") return FixtureGate::kSwap;
    throw std::invalid_argument("unknown fixture gate '" + std::string(name) + "'");
}

Tableau::Tableau(size_t n)
    : n_(n),
      half_words_(words_for_bits(n)),
      stride_(2 * words_for_bits(n)),
      xs_(n * 2 * words_for_bits(n), 0),
      zs_(n * 2 * words_for_bits(n), 0),
      signs_(2 * words_for_bits(n), 0),
      scratch_(3 * 2 * words_for_bits(n), 0) {}

Tableau Tableau::zero_state(size_t n) {
    if (n == 0) throw std::invalid_argument("Tableau::zero_state: need at least one qubit");
    Tableau t(n);
    for (size_t q = 0; q < n; q++) {
        set_bit(t.xcol(q), q, true);
        set_bit(t.zcol(q), t.stab_row(q), true);
    }
    return t;
}

void Tableau::check_qubit(size_t q, const char *what) const {
    if (q >= n_) {
        throw std::out_of_range(std::string(what) + ": qubit " + std::to_string(q) + " out of range for " +
                                std::to_string(n_) + " qubits");
    }
}

PauliString Tableau::row(size_t bit) const {
    PauliString p(n_);
    for (size_t q = 0; q < n_; q++) p.set(q, get_bit(xcol(q), bit), get_bit(zcol(q), bit));
    p.sign = get_bit(signs_, bit);
    return p;
}

PauliString Tableau::stabilizer(size_t i) const {
    check_qubit(i, "Tableau::stabilizer");
    return row(stab_row(i));
}

PauliString Tableau::destabilizer(size_t i) const {
    check_qubit(i, "Tableau::destabilizer");
    return row(i);
}

void Tableau::apply(const GateKernel &kernel, size_t qa, size_t qb) {
    check_qubit(qa, "Tableau::apply");
    check_qubit(qb, "Tableau::apply");
    if (qa == qb) throw std::invalid_argument("Tableau::apply: two-qubit gate needs distinct qubits");

    uint8_t monomials[16];
    int num_monomials = 0;
    for (unsigned m = 1; m < 16; m++) {
        if (kernel.sign_anf >> m & 1) monomials[num_monomials++] = static_cast<uint8_t>(m);
    }
    uint64_t *cols[4] = {xcol(qa).data(), zcol(qa).data(), xcol(qb).data(), zcol(qb).data()};
    for (size_t w = 0; w < stride_; w++) {
        const uint64_t in[4] = {cols[0][w], cols[1][w], cols[2][w], cols[3][w]};
        uint64_t flip = 0;
        for (int k = 0; k < num_monomials; k++) {
            uint64_t t = ~uint64_t{0};
            for (int j = 0; j < 4; j++) {
                if (monomials[k] >> j & 1) t &= in[j];
            }
            flip ^= t;
        }
        signs_[w] ^= flip;
        for (int out = 0; out < 4; out++) {
            uint64_t v = 0;
            for (int j = 0; j < 4; j++) v ^= in[j] & broadcast(kernel.linear[out] >> j & 1);
            cols[out][w] = v;
        }
    }
}

void Tableau::apply(const CliffordGate2Q &gate, size_t qa, size_t qb) {
    if (!gate.is_valid()) throw std::invalid_argument("Tableau::apply: gate table is not symplectic");
    apply(compile(gate), qa, qb);
}

void Tableau::h(size_t q) {
    check_qubit(q, "Tableau::h");
    auto x = xcol(q);
    auto z = zcol(q);
    for (size_t w = 0; w < stride_; w++) {
        signs_[w] ^= x[w] & z[w];
        std::swap(x[w], z[w]);
    }
}

void Tableau::s(size_t q) {
    check_qubit(q, "Tableau::s");
    auto x = xcol(q);
    auto z = zcol(q);
    for (size_t w = 0; w < stride_; w++) {
        signs_[w] ^= x[w] & z[w];
        z[w] ^= x[w];
    }
}

void Tableau::cnot(size_t control, size_t target) {
    check_qubit(control, "Tableau::cnot");
    check_qubit(target, "Tableau::cnot");
    if (control == target) throw std::invalid_argument("Tableau::cnot: control equals target");
    auto xc = xcol(control);
    auto zc = zcol(control);
    auto xt = xcol(target);
    auto zt = zcol(target);
    for (size_t w = 0; w < stride_; w++) {
        signs_[w] ^= xc[w] & zt[w] & ~(xt[w] ^ zc[w]);
        xt[w] ^= xc[w];
        zc[w] ^= zt[w];
    }
}

void Tableau::swap(size_t a, size_t b) {
    check_qubit(a, "Tableau::swap");
    check_qubit(b, "Tableau::swap");
    if (a == b) throw std::invalid_argument("Tableau::swap: qubits must differ");
    std::swap_ranges(xcol(a).begin(), xcol(a).end(), xcol(b).begin());
    std::swap_ranges(zcol(a).begin(), zcol(a).end(), zcol(b).begin());
}

void Tableau::apply_fixture(FixtureGate gate, std::span<const size_t> targets) {
    size_t arity = (gate == FixtureGate::kH || gate == FixtureGate::kS) ? 1 : 2;
    if (targets.size() != arity) throw std::invalid_argument("Tableau::apply_fixture: wrong number of targets");
    switch (gate) {
        case FixtureGate::kH:
            h(targets[0]);
            break;
        case FixtureGate::kS:
            s(targets[0]);
            break;
        case FixtureGate::kCnot:
            cnot(targets[0], targets[1]);
            break;
        case FixtureGate::kSwap:
            swap(targets[0], targets[1]);
            break;
    }
}

void Tableau::multiply_rows_by(size_t pivot, std::span<const uint64_t> mask) {
    std::span<uint64_t> acc_lo(scratch_.data() + stride_, stride_);
    std::span<uint64_t> acc_hi(scratch_.data() + 2 * stride_, stride_);
    std::fill(acc_lo.begin(), acc_lo.end(), 0);
    std::fill(acc_hi.begin(), acc_hi.end(), 0);

    // Per column, the i-power contributed by (row * pivot) in X^x Z^z form, accumulated mod 4
    // as a two-bit counter per row. Only columns where the pivot is non-identity contribute.
    for (size_t j = 0; j < n_; j++) {
        auto x = xcol(j);
        auto z = zcol(j);
        const bool a = get_bit(x, pivot);
        const bool b = get_bit(z, pivot);
        if (!a && !b) continue;
        for (size_t w = 0; w < stride_; w++) {
            const uint64_t m = mask[w];
            if (!m) continue;
            const uint64_t xw = x[w];
            const uint64_t zw = z[w];
            uint64_t lo, hi;
            if (a && !b) {
                lo = zw;
                hi = zw & xw;
            } else if (!a) {
                lo = xw;
                hi = xw & ~zw;
            } else {
                lo = xw ^ zw;
                hi = zw & ~xw;
            }
            lo &= m;
            hi &= m;
            const uint64_t carry = acc_lo[w] & lo;
            acc_lo[w] ^= lo;
            acc_hi[w] ^= hi ^ carry;
            if (a) x[w] ^= m;
            if (b) z[w] ^= m;
        }
    }
    const uint64_t pivot_sign = broadcast(get_bit(signs_, pivot));
    for (size_t w = 0; w < stride_; w++) {
        if (acc_lo[w] & mask[w]) throw std::logic_error("Tableau: row product of anticommuting rows");
        signs_[w] ^= mask[w] & (pivot_sign ^ acc_hi[w]);
    }
}

void Tableau::collapse_random(size_t q, size_t pivot_stab, bool outcome_bit) {
    const size_t pivot = stab_row(pivot_stab);
    std::span<uint64_t> mask(scratch_.data(), stride_);
    auto xq = xcol(q);
    std::copy(xq.begin(), xq.end(), mask.begin());
    set_bit(mask, pivot, false);
    set_bit(mask, pivot_stab, false);  // the paired destabilizer is overwritten below
    multiply_rows_by(pivot, mask);

    for (size_t j = 0; j < n_; j++) {
        auto x = xcol(j);
        auto z = zcol(j);
        set_bit(x, pivot_stab, get_bit(x, pivot));
        set_bit(z, pivot_stab, get_bit(z, pivot));
        set_bit(x, pivot, false);
        set_bit(z, pivot, false);
    }
    set_bit(signs_, pivot_stab, get_bit(signs_, pivot));
    set_bit(zcol(q), pivot, true);
    set_bit(signs_, pivot, outcome_bit);
}

int Tableau::deterministic_sign(size_t q) const {
    // Z_q is the product of the stabilizers whose destabilizer anticommutes with Z_q.
    const uint64_t *sel = xcol(q).data();
    const size_t W = half_words_;
    uint64_t y_count = 0;
    uint64_t pairs = 0;
    for (size_t k = 0; k < n_; k++) {
        const uint64_t *xs = xcol(k).data() + W;
        const uint64_t *zs = zcol(k).data() + W;
        bool carry = false;
        for (size_t w = 0; w < W; w++) {
            const uint64_t d = sel[w];
            if (!d) continue;
            const uint64_t zsel = zs[w] & d;
            const uint64_t xsel = xs[w] & d;
            y_count += static_cast<uint64_t>(std::popcount(xsel & zs[w]));
            const uint64_t before = (prefix_parity(zsel) << 1) ^ broadcast(carry);
            pairs ^= static_cast<uint64_t>(std::popcount(before & xsel));
            carry ^= std::popcount(zsel) & 1;
        }
    }
    uint64_t sign_sum = 0;
    for (size_t w = 0; w < W; w++) sign_sum += static_cast<uint64_t>(std::popcount(sel[w] & signs_[W + w]));
    if (y_count & 1) throw std::logic_error("Tableau: deterministic product is not Hermitian");
    return static_cast<int>(((y_count >> 1) + sign_sum + pairs) & 1);
}

bool Tableau::is_deterministic_z(size_t q) const {
    check_qubit(q, "Tableau::is_deterministic_z");
    auto x = xcol(q);
    for (size_t w = half_words_; w < stride_; w++) {
        if (x[w]) return false;
    }
    return true;
}

MeasurementOutcome Tableau::measure_z(size_t q, Rng &rng) {
    check_qubit(q, "Tableau::measure_z");
    const bool bit = rng() >> 63;
    auto x = xcol(q);
    for (size_t w = half_words_; w < stride_; w++) {
        if (x[w]) {
            size_t p = (w - half_words_) * kWordBits + static_cast<size_t>(std::countr_zero(x[w]));
            collapse_random(q, p, bit);
            return {bit ? -1 : +1, true};
        }
    }
    return {deterministic_sign(q) ? -1 : +1, false};
}

bool Tableau::collapse_z(size_t q, Rng &rng) {
    check_qubit(q, "Tableau::collapse_z");
    const bool bit = rng() >> 63;
    auto x = xcol(q);
    for (size_t w = half_words_; w < stride_; w++) {
        if (x[w]) {
            size_t p = (w - half_words_) * kWordBits + static_cast<size_t>(std::countr_zero(x[w]));
            collapse_random(q, p, bit);
            return true;
        }
    }
    return false;
}

Tableau Tableau::with_appended_qubit() const {
    Tableau t = zero_state(n_ + 1);
    for (size_t q = 0; q < n_; q++) {
        auto sx = xcol(q);
        auto sz = zcol(q);
        auto dx = t.xcol(q);
        auto dz = t.zcol(q);
        for (size_t i = 0; i < n_; i++) {
            set_bit(dx, i, get_bit(sx, i));
            set_bit(dz, i, get_bit(sz, i));
            set_bit(dx, t.stab_row(i), get_bit(sx, stab_row(i)));
            set_bit(dz, t.stab_row(i), get_bit(sz, stab_row(i)));
        }
    }
    for (size_t i = 0; i < n_; i++) {
        set_bit(t.signs_, i, get_bit(signs_, i));
        set_bit(t.signs_, t.stab_row(i), get_bit(signs_, stab_row(i)));
    }
    return t;
}

std::span<const uint64_t> Tableau::stabilizer_x_column(size_t q) const {
    check_qubit(q, "Tableau::stabilizer_x_column");
    return xcol(q).subspan(half_words_, half_words_);
}

std::span<const uint64_t> Tableau::stabilizer_z_column(size_t q) const {
    check_qubit(q, "Tableau::stabilizer_z_column");
    return zcol(q).subspan(half_words_, half_words_);
}

bool Tableau::operator==(const Tableau &other) const {
    return n_ == other.n_ && xs_ == other.xs_ && zs_ == other.zs_ && signs_ == other.signs_;
}

bool Tableau::validate(std::string *why) const {
    auto fail = [&](std::string msg) {
        if (why) *why = std::move(msg);
        return false;
    };
    // Padding rows must stay empty.
    for (size_t q = 0; q < n_; q++) {
        for (size_t half = 0; half < 2; half++) {
            for (size_t i = n_; i < half_words_ * kWordBits; i++) {
                size_t bit = half * half_words_ * kWordBits + i;
                if (get_bit(xcol(q), bit) || get_bit(zcol(q), bit)) return fail("padding row is non-zero");
            }
        }
    }
    std::vector<PauliString> stabs, destabs;
    for (size_t i = 0; i < n_; i++) {
        stabs.push_back(stabilizer(i));
        destabs.push_back(destabilizer(i));
    }
    for (size_t i = 0; i < n_; i++) {
        for (size_t j = 0; j < n_; j++) {
            if (j > i && symplectic_inner(stabs[i], stabs[j]))
                return fail("stabilizers " + std::to_string(i) + " and " + std::to_string(j) + " anticommute");
            if (j > i && symplectic_inner(destabs[i], destabs[j]))
                return fail("destabilizers " + std::to_string(i) + " and " + std::to_string(j) + " anticommute");
            if (symplectic_inner(destabs[i], stabs[j]) != (i == j ? 1 : 0))
                return fail("destabilizer " + std::to_string(i) + " / stabilizer " + std::to_string(j) +
                            " break symplectic pairing");
        }
    }
    BitMatrix m(2 * n_, 2 * n_);
    for (size_t i = 0; i < n_; i++) {
        for (size_t q = 0; q < n_; q++) {
            m.set(i, q, destabs[i].x(q));
            m.set(i, n_ + q, destabs[i].z(q));
            m.set(n_ + i, q, stabs[i].x(q));
            m.set(n_ + i, n_ + q, stabs[i].z(q));
        }
    }
    if (gf2_rank(m) != 2 * n_) return fail("rows are linearly dependent");
    return true;
}

}  // namespace dmipt
