#pragma once

// The inverse encoding phi (series form), the autoconjugacy omega = phi.V.Q,
// its truncations (always exact rationals), and the real-metric limit.

#include <cmath>
#include <cstddef>
#include <optional>
#include <vector>

#include <boost/multiprecision/cpp_bin_float.hpp>

#include "tadic/collatz.hpp"

namespace tadic {

using Real = boost::multiprecision::cpp_bin_float_100;

/// phi of an eventually periodic expansion, exactly. With one-positions
/// d_0 < d_1 < ..., phi = -r * sum_j m^-(j+1) 2^(d_j); the periodic part is
/// a geometric series with ratio 2^P / m^p (P = period length, p = ones per
/// period), never equal to 1 for odd m. A period with no ones leaves the
/// finite preperiod sum.
inline Rat phi_exact(const MapParams& p, const EventuallyPeriodicBits& b) {
    Rat minv = frac(1, p.m);
    Rat sum = 0;
    Rat scale = minv; // m^-(j+1) for the next one-position
    for (std::size_t i = 0; i < b.preperiod().size(); ++i) {
        if (!b.preperiod()[i]) continue;
        sum += scale * Rat(BigInt(1) << i);
        scale *= minv;
    }
    std::size_t P = b.period().size();
    std::size_t ones = 0;
    Rat first_period = 0;
    Rat s = scale;
    for (std::size_t t = 0; t < P; ++t) {
        if (!b.period()[t]) continue;
        first_period += s * Rat(BigInt(1) << (b.preperiod().size() + t));
        s *= minv;
        ++ones;
    }
    if (ones > 0) {
        Rat ratio = Rat(BigInt(1) << P) * rat_pow(minv, static_cast<unsigned>(ones));
        sum += first_period / (1 - ratio);
    }
    return -Rat(p.r) * sum;
}

/// phi on the first k bits, reduced mod 2^k via the modular inverse of m.
inline TwoAdicWord phi_truncated(const MapParams& p, const TwoAdicWord& w) {
    unsigned k = w.precision;
    if (k == 0) return TwoAdicWord(0, 0);
    BigInt mod = BigInt(1) << k;
    BigInt minv = inverse_mod_pow2(p.m, k);
    BigInt rr = ((p.r % mod) + mod) % mod;
    BigInt res = 0;
    BigInt mp = minv;
    for (unsigned d = 0; d < k; ++d) {
        if (w.bit(d)) {
            res = ((res - ((rr * mp) % mod) * (BigInt(1) << d)) % mod + mod) % mod;
            mp = (mp * minv) % mod;
        }
    }
    return TwoAdicWord(std::move(res), k);
}

/// omega mod 2^k, from x mod 2^k alone.
inline TwoAdicWord omega_word(const MapParams& p, const TwoAdicWord& w) {
    return phi_truncated(p, v_complement(q_truncated_word(p, w)));
}

/// omega(x) as an exact rational, when the orbit cycles within budget.
inline std::optional<Rat> omega_exact(const MapParams& p, const Rat& x, std::size_t budget) {
    auto q = q_exact(p, x, budget);
    if (!q) return std::nullopt;
    return phi_exact(p, v_complement(*q));
}

/// The k-th truncation of omega as an exact rational: with i_0 < ... <
/// i_(j-1) the even-iterate positions below k,
///   -(r/m) [ sum_l m^-l 2^(i_l) + (2^k / m^j) (1 - 2/m)^-1 ].
inline Rat omega_truncated(const MapParams& p, const Rat& x, unsigned k) {
    if (k < 1) throw std::invalid_argument("omega_truncated: k must be >= 1");
    Rat minv = frac(1, p.m);
    Rat sum = 0;
    Rat scale = 1; // m^-l
    std::size_t j = 0;
    Rat state = x;
    for (unsigned i = 0; i < k; ++i) {
        if (parity(state) == 0) {
            sum += scale * Rat(BigInt(1) << i);
            scale *= minv;
            ++j;
        }
        state = t_apply(p, state);
    }
    Rat mid = Rat(BigInt(1) << k) * scale / (1 - 2 * minv);
    return -Rat(p.r) * minv * (sum + mid);
}

/// omega(2^n x) from omega(x): (2/m)^n (r/(m-2) + omega_x) - r/(m-2).
inline Rat theorem1_scale(const MapParams& p, const Rat& omega_x, unsigned n) {
    Rat c = frac(p.r, p.m - 2);
    return rat_pow(frac(2, p.m), n) * (c + omega_x) - c;
}

struct OmegaHatOptions {
    double tolerance = 1e-6;
    std::size_t max_terms = 10000;     // budget, counted in series terms
    std::size_t max_steps = 100000;    // hard cap on orbit steps
    std::size_t divergence_window = 64; // consecutive growing terms
    double blowup_log2 = 64.0;         // term magnitude threshold, in bits
    std::size_t cycle_detect_steps = 4096;
    std::size_t exact_bits_threshold = 4096; // switch to floats past this
    std::size_t min_terms_for_certificate = 16;
};

struct OmegaHatResult {
    enum class Status { converged, diverged, unknown };
    Status status = Status::unknown;
    std::optional<Real> value;      // set when converged
    std::optional<Rat> exact_value; // set when converged via a cyclic orbit
    double error_bound = 0.0;       // <= tolerance when converged
    std::size_t terms_used = 0;
    Rat density_seen = 0;           // even-iterate density over the steps taken
    bool density_exact = false;
    std::optional<std::size_t> divergence_witness; // term index past threshold
};

namespace detail {

/// Certified-if-density-persists tail bound after j terms, last even
/// position i_last, current orbit step k. rho_hat is the smallest running
/// density over the summed tail; the bound is the geometric majorant with
/// ratio 2^(1/rho_hat)/|m| plus the vanishing (2^k / m^j) middle term.
inline std::optional<double> omega_hat_tail_bound(const MapParams& p, double rho_hat,
                                                  std::size_t j, std::size_t k) {
    double log_m = std::log(std::abs(p.m.convert_to<double>()));
    double log2 = std::log(2.0);
    if (log_m <= 0.0) return std::nullopt; // |m| = 1: no convergence test
    if (rho_hat <= log2 / log_m) return std::nullopt;
    double log_q = log2 / rho_hat - log_m;
    double q = std::exp(log_q);
    double log_rm = std::log(std::abs((Rat(p.r) / Rat(p.m)).convert_to<double>()));
    double tail = log_rm + static_cast<double>(j) * log_q - std::log1p(-q);
    double mid = log_rm + static_cast<double>(k) * log2 - static_cast<double>(j) * log_m -
                 std::log(std::abs((1 - frac(2, p.m)).convert_to<double>()));
    double bound = std::exp(tail) + std::exp(mid);
    if (!std::isfinite(bound)) return std::nullopt;
    return bound;
}

} // namespace detail

/// Streams the even-iterate positions of the orbit and decides whether the
/// real limit of the omega truncations exists. Partial sums are exact
/// rationals until they outgrow a size threshold, then guarded 100-digit
/// floats with a tracked rounding bound. Outcomes:
///   converged -- the conditional tail bound fell below tolerance, or the
///                orbit cycled with enough even iterates (exact rational);
///   diverged  -- terms grew past the blow-up threshold for a full window,
///                or the orbit cycled with too few even iterates;
///   unknown   -- budget exhausted first. Never an exception.
inline OmegaHatResult omega_hat(const MapParams& p, const Rat& x,
                                const OmegaHatOptions& opt = {}) {
    OmegaHatResult out;
    if (opt.tolerance <= 0) throw std::invalid_argument("omega_hat: tolerance must be positive");

    // m = 1: omega_k = r (1 + (Q mod 2^k)), constant iff Q = -x/r is a
    // nonnegative integer, in which case the limit is r - x.
    if (p.m == 1) {
        Rat q = -x / Rat(p.r);
        if (den(q) == 1 && q >= 0) {
            out.status = OmegaHatResult::Status::converged;
            out.exact_value = Rat(p.r) - x;
            out.value = Real(*out.exact_value);
            out.density_exact = true;
            out.density_seen = 1; // iterates reach a fixed point or all-even tail
        } else {
            out.status = OmegaHatResult::Status::diverged;
            out.divergence_witness = 0;
        }
        return out;
    }

    const double log_m = std::log(std::abs(p.m.convert_to<double>()));
    const double log2 = std::log(2.0);
    const Rat r_over_m = Rat(p.r) / Rat(p.m);
    const Rat minv = frac(1, p.m);

    std::map<Rat, std::size_t> seen;
    std::vector<bool> parities;
    std::vector<std::size_t> even_pos; // i_l
    Rat state = x;
    Rat sum_exact = 0;
    Real sum_real = 0;
    bool exact_mode = true;
    Rat scale = 1; // m^-l
    std::size_t j = 0;
    double prev_log_term = -std::numeric_limits<double>::infinity();
    std::size_t growth_streak = 0;
    double rounding = 0.0;

    auto finish_density = [&](std::size_t steps) {
        std::size_t zeros = 0;
        for (std::size_t i = 0; i < steps; ++i)
            if (!parities[i]) ++zeros;
        out.density_seen = steps ? Rat(BigInt(zeros), BigInt(steps)) : Rat(0);
    };

    for (std::size_t k = 0; k < opt.max_steps; ++k) {
        if (k < opt.cycle_detect_steps) {
            auto it = seen.find(state);
            if (it != seen.end()) {
                // cyclic orbit: outcome is decided exactly
                std::size_t entry = it->second;
                std::size_t len = k - entry;
                std::size_t zeros = 0;
                for (std::size_t i = entry; i < k; ++i)
                    if (!parities[i]) ++zeros;
                out.density_seen = Rat(BigInt(zeros), BigInt(len));
                out.density_exact = true;
                out.terms_used = j;
                // converges iff 2^len < |m|^zeros (equality impossible)
                bool conv = Rat(BigInt(1) << len) <
                            rat_pow(Rat(abs(p.m)), static_cast<unsigned>(zeros));
                if (zeros == 0) conv = true; // finitely many terms in total
                if (conv) {
                    auto q = EventuallyPeriodicBits(
                        std::vector<bool>(parities.begin(), parities.begin() + entry),
                        std::vector<bool>(parities.begin() + entry, parities.end()));
                    out.exact_value = phi_exact(p, v_complement(q));
                    out.value = Real(*out.exact_value);
                    out.status = OmegaHatResult::Status::converged;
                    out.error_bound = 0.0;
                } else {
                    out.status = OmegaHatResult::Status::diverged;
                    out.divergence_witness = j;
                }
                return out;
            }
            seen.emplace(state, k);
        }

        int par = parity(state);
        parities.push_back(par != 0);
        if (par == 0) {
            double log_term = static_cast<double>(k) * log2 - static_cast<double>(j) * log_m;
            if (exact_mode) {
                sum_exact += scale * Rat(BigInt(1) << k);
                if (msb(abs(num(sum_exact)) + 1) + msb(den(sum_exact)) >
                    opt.exact_bits_threshold) {
                    sum_real = Real(sum_exact);
                    exact_mode = false;
                }
            } else {
                Real term = pow(Real(2), static_cast<unsigned>(k)) /
                            pow(Real(p.m), static_cast<unsigned>(j));
                sum_real += term;
                rounding += 1e-90 * std::abs(log_term < 700 ? std::exp(log_term) : 1e300);
            }
            scale *= minv;
            even_pos.push_back(k);
            ++j;

            // divergence: sustained growth past the blow-up threshold
            growth_streak = (log_term > prev_log_term) ? growth_streak + 1 : 0;
            prev_log_term = log_term;
            if (growth_streak >= opt.divergence_window &&
                log_term > opt.blowup_log2 * log2) {
                out.status = OmegaHatResult::Status::diverged;
                out.divergence_witness = j - 1;
                out.terms_used = j;
                finish_density(k + 1);
                return out;
            }

            // convergence: conditional geometric tail bound from the
            // smallest running density over the summed tail
            if (j >= opt.min_terms_for_certificate) {
                double rho_hat = 1.0;
                std::size_t from = j / 2;
                for (std::size_t l = from; l < j; ++l) {
                    double d = static_cast<double>(l + 1) / static_cast<double>(even_pos[l] + 1);
                    rho_hat = std::min(rho_hat, d);
                }
                auto bound = detail::omega_hat_tail_bound(p, rho_hat, j, k + 1);
                if (bound && *bound + rounding <= opt.tolerance) {
                    out.status = OmegaHatResult::Status::converged;
                    out.value = -Real(r_over_m) * (exact_mode ? Real(sum_exact) : sum_real);
                    out.error_bound = *bound + rounding;
                    out.terms_used = j;
                    finish_density(k + 1);
                    return out;
                }
            }
            if (j >= opt.max_terms) break;
        }
        state = t_apply(p, state);
    }
    out.status = OmegaHatResult::Status::unknown;
    out.terms_used = j;
    finish_density(parities.size());
    return out;
}

} // namespace tadic
