#pragma once

// Exact rational arithmetic restricted to the odd-denominator rationals,
// i.e. the rationals that are 2-adic integers.

#include <optional>
#include <sstream>
#include <stdexcept>
#include <string>

#include <boost/multiprecision/cpp_int.hpp>

namespace tadic {

using BigInt = boost::multiprecision::cpp_int;
using Rat = boost::multiprecision::cpp_rational;

inline BigInt num(const Rat& x) { return boost::multiprecision::numerator(x); }
inline BigInt den(const Rat& x) { return boost::multiprecision::denominator(x); }

/// True iff x has odd denominator in lowest terms (x is a 2-adic integer).
inline bool is_two_adic(const Rat& x) { return bit_test(den(x), 0); }

inline void require_two_adic(const Rat& x) {
    if (!is_two_adic(x))
        throw std::domain_error("not a 2-adic integer: even denominator");
}

/// Lowest 2-adic digit of x. For odd b, a/b = a * b^-1 = a (mod 2).
inline int parity(const Rat& x) {
    require_two_adic(x);
    return bit_test(num(x), 0) ? 1 : 0;
}

/// 2-adic valuation; nullopt for x = 0 (valuation +infinity).
inline std::optional<unsigned> valuation2(const Rat& x) {
    require_two_adic(x);
    if (x == 0) return std::nullopt;
    return lsb(abs(num(x)));
}

/// n/d with the sign moved to the numerator (the backend rejects negative
/// denominators).
inline Rat frac(BigInt n, BigInt d) {
    if (d < 0) {
        n = -n;
        d = -d;
    }
    return Rat(std::move(n), std::move(d));
}

/// x^n for n >= 0.
inline Rat rat_pow(const Rat& x, unsigned n) {
    Rat acc = 1, base = x;
    while (n) {
        if (n & 1) acc *= base;
        base *= base;
        n >>= 1;
    }
    return acc;
}

/// Inverse of odd a modulo 2^k (k >= 1).
inline BigInt inverse_mod_pow2(const BigInt& a, unsigned k) {
    if (!bit_test(a, 0)) throw std::domain_error("even value has no inverse mod 2^k");
    BigInt mod = BigInt(1) << k;
    BigInt b = ((a % mod) + mod) % mod;
    if (k == 1) return 1;
    // a^(2^(k-1) - 1) mod 2^k, since the unit group has exponent 2^(k-2) | 2^(k-1)
    BigInt e = (BigInt(1) << (k - 1)) - 1;
    return powm(b, e, mod);
}

/// x mod 2^k as an integer in [0, 2^k), using the modular inverse of the
/// (odd) denominator. k = 0 gives 0.
inline BigInt residue_mod_pow2(const Rat& x, unsigned k) {
    require_two_adic(x);
    if (k == 0) return 0;
    BigInt mod = BigInt(1) << k;
    BigInt n = ((num(x) % mod) + mod) % mod;
    BigInt d = den(x);
    if (d == 1) return n;
    return (n * inverse_mod_pow2(d, k)) % mod;
}

/// Parses "a", "-a", "a/b" or "-a/b". Throws std::invalid_argument on
/// malformed input or zero denominator.
inline Rat parse_rational(const std::string& s) {
    auto bad = [&] { throw std::invalid_argument("malformed rational literal: '" + s + "'"); };
    if (s.empty()) bad();
    auto slash = s.find('/');
    auto is_int = [&](const std::string& t, bool allow_sign) {
        if (t.empty()) return false;
        size_t i = (allow_sign && (t[0] == '-' || t[0] == '+')) ? 1 : 0;
        if (i == t.size()) return false;
        for (; i < t.size(); ++i)
            if (t[i] < '0' || t[i] > '9') return false;
        return true;
    };
    if (slash == std::string::npos) {
        if (!is_int(s, true)) bad();
        return Rat(BigInt(s));
    }
    std::string a = s.substr(0, slash), b = s.substr(slash + 1);
    if (!is_int(a, true) || !is_int(b, false)) bad();
    BigInt denom(b);
    if (denom == 0) bad();
    return Rat(BigInt(a), denom);
}

/// "num/den", or just "num" for integers. Never a float.
inline std::string to_string(const Rat& x) {
    std::ostringstream os;
    os << num(x);
    if (den(x) != 1) os << '/' << den(x);
    return os.str();
}

} // namespace tadic
