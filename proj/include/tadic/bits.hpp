#pragma once

// Eventually periodic 2-adic expansions, truncated 2-adic words, and the
// conversions between them and odd-denominator rationals.

#include <cstddef>
#include <map>
#include <optional>
#include <vector>

#include "tadic/rational.hpp"

namespace tadic {

/// A 2-adic integer with eventually periodic expansion: bit i is
/// preperiod[i] for i < |preperiod|, then cycles through period.
/// Canonical form: primitive (minimal) period, then minimal preperiod,
/// so equality is structural.
class EventuallyPeriodicBits {
public:
    EventuallyPeriodicBits(std::vector<bool> preperiod, std::vector<bool> period)
        : pre_(std::move(preperiod)), per_(std::move(period)) {
        if (per_.empty()) throw std::invalid_argument("period must be nonempty");
        canonicalize();
    }

    const std::vector<bool>& preperiod() const { return pre_; }
    const std::vector<bool>& period() const { return per_; }

    bool bit(std::size_t i) const {
        if (i < pre_.size()) return pre_[i];
        return per_[(i - pre_.size()) % per_.size()];
    }

    friend bool operator==(const EventuallyPeriodicBits& a, const EventuallyPeriodicBits& b) {
        return a.pre_ == b.pre_ && a.per_ == b.per_;
    }

private:
    void canonicalize() {
        // primitive period: smallest divisor d of |per| with per[i] = per[i mod d]
        for (std::size_t d = 1; d < per_.size(); ++d) {
            if (per_.size() % d != 0) continue;
            bool ok = true;
            for (std::size_t i = d; i < per_.size() && ok; ++i)
                ok = per_[i] == per_[i % d];
            if (ok) {
                per_.resize(d);
                break;
            }
        }
        // absorb preperiod bits that match the rotated period
        while (!pre_.empty() && pre_.back() == per_.back()) {
            pre_.pop_back();
            per_.insert(per_.begin(), per_.back());
            per_.pop_back();
        }
    }

    std::vector<bool> pre_;
    std::vector<bool> per_;
};

/// A value known modulo 2^precision.
struct TwoAdicWord {
    BigInt residue;
    unsigned precision = 0;

    TwoAdicWord(BigInt r, unsigned k) : residue(std::move(r)), precision(k) {
        if (residue < 0 || (residue >> precision) != 0)
            throw std::invalid_argument("residue out of range for precision");
    }

    bool bit(unsigned i) const { return bit_test(residue, i); }

    friend bool operator==(const TwoAdicWord& a, const TwoAdicWord& b) {
        return a.precision == b.precision && a.residue == b.residue;
    }
};

/// Digit expansion of x: emit b = parity(x), replace x <- (x - b)/2 until a
/// state repeats. States share the (odd) denominator of x, so the walk is
/// finite and detected by exact lookup.
inline EventuallyPeriodicBits rational_to_bits(const Rat& x) {
    require_two_adic(x);
    std::map<Rat, std::size_t> seen;
    std::vector<bool> bits;
    Rat state = x;
    for (;;) {
        auto it = seen.find(state);
        if (it != seen.end()) {
            std::size_t entry = it->second;
            return EventuallyPeriodicBits(
                std::vector<bool>(bits.begin(), bits.begin() + entry),
                std::vector<bool>(bits.begin() + entry, bits.end()));
        }
        seen.emplace(state, bits.size());
        int b = parity(state);
        bits.push_back(b != 0);
        state = (state - b) / 2;
    }
}

/// Exact value: preperiod sum plus 2^|pre| * (period value) / (1 - 2^|per|).
inline Rat bits_to_rational(const EventuallyPeriodicBits& b) {
    BigInt pre_val = 0;
    for (std::size_t i = 0; i < b.preperiod().size(); ++i)
        if (b.preperiod()[i]) bit_set(pre_val, static_cast<unsigned>(i));
    BigInt per_val = 0;
    for (std::size_t i = 0; i < b.period().size(); ++i)
        if (b.period()[i]) bit_set(per_val, static_cast<unsigned>(i));
    BigInt one_minus = 1 - (BigInt(1) << b.period().size());
    Rat tail = frac(per_val, one_minus) * Rat(BigInt(1) << b.preperiod().size());
    return Rat(pre_val) + tail;
}

/// First k bits as a residue mod 2^k.
inline TwoAdicWord truncate(const EventuallyPeriodicBits& b, unsigned k) {
    BigInt res = 0;
    for (unsigned i = 0; i < k; ++i)
        if (b.bit(i)) bit_set(res, i);
    return TwoAdicWord(std::move(res), k);
}

/// Recovers a/b with |a|, b <= bound, b odd, a = residue * b (mod 2^k), by
/// scanning the convergents of the half-extended Euclidean algorithm on
/// (2^k, residue). Unique when 2 * bound^2 < 2^k; that precondition is
/// enforced. Returns nullopt when no such fraction exists.
inline std::optional<Rat> rational_reconstruct(const TwoAdicWord& w, const BigInt& bound) {
    if (w.precision < 2) throw std::invalid_argument("rational_reconstruct: precision must be >= 2");
    if (bound < 1) throw std::invalid_argument("rational_reconstruct: bound must be positive");
    BigInt mod = BigInt(1) << w.precision;
    if (2 * bound * bound >= mod)
        throw std::invalid_argument("rational_reconstruct: bound too large for precision");

    // invariant: r_i = t_i * residue (mod 2^k)
    BigInt r0 = mod, r1 = w.residue;
    BigInt t0 = 0, t1 = 1;
    auto admit = [&](const BigInt& r, const BigInt& t) -> std::optional<Rat> {
        if (t == 0 || abs(r) > bound || abs(t) > bound) return std::nullopt;
        if (!bit_test(abs(t), 0)) return std::nullopt;
        if (gcd(abs(r), abs(t)) != 1) return std::nullopt;
        if (((r - t * w.residue) % mod) != 0) return std::nullopt;
        return t < 0 ? Rat(-r, -t) : Rat(r, t);
    };
    if (auto hit = admit(r1, t1)) return hit;
    while (r1 != 0) {
        BigInt q = r0 / r1;
        BigInt r2 = r0 - q * r1;
        BigInt t2 = t0 - q * t1;
        r0 = r1; r1 = r2;
        t0 = t1; t1 = t2;
        if (auto hit = admit(r1, t1)) return hit;
    }
    return std::nullopt;
}

inline Rat v_complement(const Rat& x) { return -1 - x; }

/// V flips every bit of the expansion.
inline EventuallyPeriodicBits v_complement(const EventuallyPeriodicBits& b) {
    std::vector<bool> pre = b.preperiod(), per = b.period();
    pre.flip();
    per.flip();
    return EventuallyPeriodicBits(std::move(pre), std::move(per));
}

inline TwoAdicWord v_complement(const TwoAdicWord& w) {
    BigInt full = (BigInt(1) << w.precision) - 1;
    return TwoAdicWord(full - w.residue, w.precision);
}

/// Shift map: drops bit 0, i.e. (x - b0)/2.
inline EventuallyPeriodicBits sigma_shift(const EventuallyPeriodicBits& b) {
    std::vector<bool> pre = b.preperiod(), per = b.period();
    if (!pre.empty()) {
        pre.erase(pre.begin());
    } else {
        per.push_back(per.front());
        per.erase(per.begin());
    }
    return EventuallyPeriodicBits(std::move(pre), std::move(per));
}

} // namespace tadic
