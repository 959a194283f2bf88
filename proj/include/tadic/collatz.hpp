#pragma once

// The generalized Collatz map x -> x/2 (even) or (m*x + r)/2 (odd) on the
// odd-denominator rationals, its orbits, and the parity-vector encoding.

#include <cstddef>
#include <cstdint>
#include <map>
#include <optional>
#include <utility>
#include <vector>

#include "tadic/bits.hpp"
#include "tadic/rational.hpp"

namespace tadic {

/// The odd pair (m, r). Degenerate values (m = 1, negatives) are legal.
struct MapParams {
    BigInt m;
    BigInt r;

    MapParams(BigInt m_, BigInt r_) : m(std::move(m_)), r(std::move(r_)) {
        if (!bit_test(abs(m), 0) || !bit_test(abs(r), 0))
            throw std::invalid_argument("m and r must both be odd");
    }
};

/// One step of the map.
inline Rat t_apply(const MapParams& p, const Rat& x) {
    if (parity(x) == 0) return x / 2;
    return (Rat(p.m) * x + Rat(p.r)) / 2;
}

/// One step on a residue: precision k >= 1 in, precision k-1 out.
inline TwoAdicWord t_apply_word(const MapParams& p, const TwoAdicWord& w) {
    if (w.precision == 0) throw std::invalid_argument("t_apply_word: precision must be >= 1");
    BigInt mod = BigInt(1) << w.precision;
    BigInt next;
    if (!bit_test(w.residue, 0)) {
        next = w.residue >> 1;
    } else {
        next = ((p.m * w.residue + p.r) % mod + mod) % mod;
        next >>= 1;
    }
    return TwoAdicWord(std::move(next), w.precision - 1);
}

/// Orbit record: states[i+1] = T(states[i]), parity_bits[i] = parity(states[i]).
/// Exactly one of cycle / budget_exhausted holds.
struct OrbitResult {
    std::vector<Rat> states;
    std::vector<bool> parity_bits;
    struct Cycle {
        std::size_t entry_index;
        std::size_t cycle_length;
    };
    std::optional<Cycle> cycle;
    bool budget_exhausted = false;
};

/// Iterates up to budget steps; the first revisited state (found by exact
/// lookup) closes the cycle. Budget exhaustion is a result, not an error.
inline OrbitResult orbit(const MapParams& p, const Rat& x, std::size_t budget) {
    if (budget < 1) throw std::invalid_argument("orbit: budget must be >= 1");
    OrbitResult out;
    std::map<Rat, std::size_t> seen;
    Rat state = x;
    for (std::size_t i = 0; i <= budget; ++i) {
        auto it = seen.find(state);
        if (it != seen.end()) {
            out.cycle = OrbitResult::Cycle{it->second, i - it->second};
            return out;
        }
        if (i == budget) break;
        seen.emplace(state, i);
        out.states.push_back(state);
        out.parity_bits.push_back(parity(state) != 0);
        state = t_apply(p, state);
    }
    out.budget_exhausted = true;
    return out;
}

/// First k parity bits packed as a residue mod 2^k.
inline TwoAdicWord q_truncated(const MapParams& p, const Rat& x, unsigned k) {
    BigInt res = 0;
    Rat state = x;
    for (unsigned i = 0; i < k; ++i) {
        if (parity(state) != 0) bit_set(res, i);
        state = t_apply(p, state);
    }
    return TwoAdicWord(std::move(res), k);
}

/// Word-level parity vector: k bits of Q from x mod 2^k. Well defined since
/// the i-th parity depends only on x mod 2^(i+1).
inline TwoAdicWord q_truncated_word(const MapParams& p, const TwoAdicWord& w) {
    BigInt res = 0;
    TwoAdicWord state = w;
    for (unsigned i = 0; i < w.precision; ++i) {
        if (bit_test(state.residue, 0)) bit_set(res, i);
        state = t_apply_word(p, state);
    }
    return TwoAdicWord(std::move(res), w.precision);
}

/// Exact parity vector as an eventually periodic expansion, when the orbit
/// cycles within budget; nullopt otherwise.
inline std::optional<EventuallyPeriodicBits> q_exact(const MapParams& p, const Rat& x,
                                                     std::size_t budget) {
    OrbitResult orb = orbit(p, x, budget);
    if (!orb.cycle) return std::nullopt;
    auto& bits = orb.parity_bits;
    std::size_t e = orb.cycle->entry_index, len = orb.cycle->cycle_length;
    return EventuallyPeriodicBits(std::vector<bool>(bits.begin(), bits.begin() + e),
                                  std::vector<bool>(bits.begin() + e, bits.begin() + e + len));
}

/// Density of even iterates. For a cyclic orbit the liminf is exact (zeros
/// per period); otherwise the window average over k steps is only a proxy.
struct NuResult {
    Rat value;
    bool exact = false;
};

inline NuResult nu_estimate(const MapParams& p, const Rat& x, std::size_t k) {
    if (k < 1) throw std::invalid_argument("nu_estimate: window must be >= 1");
    OrbitResult orb = orbit(p, x, k);
    if (orb.cycle) {
        std::size_t e = orb.cycle->entry_index, len = orb.cycle->cycle_length;
        std::size_t zeros = 0;
        for (std::size_t i = e; i < e + len; ++i)
            if (!orb.parity_bits[i]) ++zeros;
        return {Rat(BigInt(zeros), BigInt(len)), true};
    }
    std::size_t zeros = 0;
    for (std::size_t i = 0; i < k; ++i)
        if (!orb.parity_bits[i]) ++zeros;
    return {Rat(BigInt(zeros), BigInt(k)), false};
}

} // namespace tadic
