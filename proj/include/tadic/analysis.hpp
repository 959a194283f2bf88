#pragma once

// Batch experiments: permutation tables of the truncated parity vector,
// identity suites over sampled inputs, conjecture scanners, and the
// reference value table for (m, r) = (5, 1).

#include <cstdint>
#include <numeric>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "tadic/conjugacy.hpp"

namespace tadic {

/// The permutation x -> Q_k(x) on Z/2^k.
struct PermutationTable {
    unsigned k = 0;
    std::vector<std::uint32_t> mapping;
    std::uint64_t order = 0;
    bool bijective = false;
};

inline PermutationTable qbar_table(const MapParams& p, unsigned k) {
    if (k < 1 || k > 24) throw std::invalid_argument("qbar_table: k must be in [1, 24]");
    PermutationTable t;
    t.k = k;
    std::size_t n = std::size_t(1) << k;
    t.mapping.resize(n);
    for (std::size_t x = 0; x < n; ++x)
        t.mapping[x] = q_truncated_word(p, TwoAdicWord(BigInt(x), k))
                           .residue.convert_to<std::uint32_t>();
    std::vector<bool> hit(n, false);
    t.bijective = true;
    for (auto v : t.mapping) {
        if (hit[v]) { t.bijective = false; break; }
        hit[v] = true;
    }
    if (t.bijective) {
        // order = lcm of cycle lengths
        std::vector<bool> done(n, false);
        std::uint64_t order = 1;
        for (std::size_t s = 0; s < n; ++s) {
            if (done[s]) continue;
            std::uint64_t len = 0;
            std::size_t c = s;
            while (!done[c]) {
                done[c] = true;
                c = t.mapping[c];
                ++len;
            }
            order = std::lcm(order, len);
        }
        t.order = order;
    }
    return t;
}

/// Three-valued scan outcome. Budget exhaustion is never a refutation.
struct ScanReport {
    std::string description;
    BigInt m, r;
    std::size_t confirmed = 0, refuted = 0, unknown = 0;
    struct Witness {
        std::string input;
        std::string kind;
        std::string evidence;
    };
    std::vector<Witness> witnesses;
};

namespace detail {

inline Rat sample_rational(std::mt19937_64& rng, long num_cap, long den_cap) {
    std::uniform_int_distribution<long> nd(-num_cap, num_cap);
    std::uniform_int_distribution<long> dd(0, (den_cap - 1) / 2);
    return Rat(BigInt(nd(rng)), BigInt(2 * dd(rng) + 1));
}

inline EventuallyPeriodicBits sample_bits(std::mt19937_64& rng) {
    std::uniform_int_distribution<int> pre_len(0, 8), per_len(1, 8), coin(0, 1);
    std::vector<bool> pre(pre_len(rng)), per(per_len(rng));
    for (auto&& b : pre) b = coin(rng);
    for (auto&& b : per) b = coin(rng);
    return EventuallyPeriodicBits(std::move(pre), std::move(per));
}

} // namespace detail

/// Checks the proved identities over sampled (x, k): the conjugacy relation
/// Q T = sigma Q, the inverse pair phi Q = id, omega^2 = 1 and
/// omega T = T omega (mod 2^k, plus exactly on cyclic orbits), r-linearity
/// of phi, the Q-complement relation, norm preservation, the scaling law,
/// and the m = 1 closed forms. Any refutation is an implementation bug.
inline ScanReport identity_suite(const MapParams& p, std::size_t sample_count,
                                 unsigned k_max, std::uint64_t seed,
                                 std::size_t orbit_budget = 512) {
    ScanReport rep;
    rep.description = "identity_suite";
    rep.m = p.m;
    rep.r = p.r;
    std::mt19937_64 rng(seed);
    std::uniform_int_distribution<unsigned> kd(1, k_max);
    MapParams p1(p.m, 1);

    auto check = [&](bool ok, const Rat& x, const char* kind, const std::string& ev) {
        if (ok) {
            ++rep.confirmed;
        } else {
            ++rep.refuted;
            rep.witnesses.push_back({to_string(x), kind, ev});
        }
    };

    for (std::size_t s = 0; s < sample_count; ++s) {
        Rat x = detail::sample_rational(rng, 9999, 199);
        unsigned k = kd(rng);
        BigInt mod = BigInt(1) << k;

        // Q T = sigma Q (mod 2^k)
        TwoAdicWord qk1 = q_truncated(p, x, k + 1);
        check(q_truncated(p, t_apply(p, x), k).residue == (qk1.residue >> 1), x,
              "QT=sigmaQ", "k=" + std::to_string(k));

        // phi(Q(x)) = x (mod 2^k)
        TwoAdicWord qk(qk1.residue & (mod - 1), k);
        check(phi_truncated(p, qk).residue == residue_mod_pow2(x, k), x,
              "phiQ=id", "k=" + std::to_string(k));

        // omega^2 = 1 (mod 2^k)
        TwoAdicWord xw(residue_mod_pow2(x, k), k);
        TwoAdicWord ow = omega_word(p, xw);
        check(omega_word(p, ow) == xw, x, "omega^2=1", "k=" + std::to_string(k));

        // omega T = T omega (mod 2^k)
        TwoAdicWord lhs = omega_word(p, TwoAdicWord(residue_mod_pow2(t_apply(p, x), k), k));
        TwoAdicWord rhs = t_apply_word(
            p, omega_word(p, TwoAdicWord(residue_mod_pow2(x, k + 1), k + 1)));
        check(lhs == rhs, x, "omegaT=Tomega", "k=" + std::to_string(k));

        // Q(omega(x)) = -1 - Q(x) (mod 2^k)
        check(q_truncated_word(p, ow) == v_complement(qk), x, "Q(omega)=V(Q)",
              "k=" + std::to_string(k));

        // phi_{m,r} = r phi_{m,1} on random expansions
        auto bits = detail::sample_bits(rng);
        check(phi_exact(p, bits) == Rat(p.r) * phi_exact(p1, bits), x, "phi r-linear", "");

        // exact-route identities require a cyclic orbit
        auto q = q_exact(p, x, orbit_budget);
        if (!q) {
            ++rep.unknown;
        } else {
            Rat qv = bits_to_rational(*q);
            Rat w = phi_exact(p, v_complement(*q)); // omega(x), exact
            bool ok = true;
            std::ostringstream ev;
            auto qw = q_exact(p, w, orbit_budget);
            if (!qw) {
                ++rep.unknown;
            } else {
                // omega^2 = 1 and Q(omega) = -1 - Q, exactly
                if (phi_exact(p, v_complement(*qw)) != x) { ok = false; ev << "omega^2 "; }
                if (bits_to_rational(*qw) != -1 - qv) { ok = false; ev << "Qcomplement "; }
                // norm preservation
                if (valuation2(qv) != valuation2(x)) { ok = false; ev << "norm "; }
                // scaling law, n <= 4
                for (unsigned n = 1; n <= 4 && ok; ++n) {
                    auto w2 = omega_exact(p, x * Rat(BigInt(1) << n), orbit_budget);
                    if (!w2) break;
                    if (*w2 != theorem1_scale(p, w, n)) { ok = false; ev << "scaling "; }
                }
                check(ok, x, "exact-route", ev.str());
            }
            if (p.m == 1) {
                check(qv == -x / Rat(p.r) && w == Rat(p.r) - x, x, "m=1 closed forms", "");
            }
        }
    }
    return rep;
}

/// Looks for the shape a counterexample to the rational-pairs conjecture
/// must take: rational x whose orbit does not visibly cycle (so Q(x)
/// rationality is unknown) while the omega truncations stabilize on a small
/// fraction, i.e. {x, omega(x)} plausibly both rational. Candidates are
/// reported as witnesses for deeper budgets, never as refutations.
inline ScanReport scan_rational_pairs(const MapParams& p, const std::vector<Rat>& xs,
                                      std::size_t orbit_budget, unsigned k_probe,
                                      const BigInt& recon_bound) {
    ScanReport rep;
    rep.description = "scan_rational_pairs";
    rep.m = p.m;
    rep.r = p.r;
    for (const Rat& x : xs) {
        auto q = q_exact(p, x, orbit_budget);
        if (q) {
            // orbit cycles: hypothesis and conclusion both hold
            ++rep.confirmed;
            continue;
        }
        // require the same reconstruction at two precisions
        unsigned k1 = k_probe / 2, k2 = k_probe;
        auto probe = [&](unsigned k) {
            TwoAdicWord w = phi_truncated(p, v_complement(q_truncated(p, x, k)));
            return rational_reconstruct(w, recon_bound);
        };
        auto a = probe(k1), b = probe(k2);
        ++rep.unknown;
        if (a && b && *a == *b) {
            rep.witnesses.push_back({to_string(x), "candidate-pair",
                                     "omega ~ " + to_string(*a) + ", Q rationality unknown"});
        }
    }
    return rep;
}

/// Existence survey for the real limit: converged / diverged / unknown per
/// input, plus the observed even-iterate densities.
struct OmegaHatScan {
    ScanReport report;
    std::vector<OmegaHatResult> results;
    Rat min_density = 1;
};

inline OmegaHatScan scan_omega_hat(const MapParams& p, const std::vector<Rat>& xs,
                                   double tolerance, std::size_t budget) {
    OmegaHatScan scan;
    scan.report.description = "scan_omega_hat";
    scan.report.m = p.m;
    scan.report.r = p.r;
    OmegaHatOptions opt;
    opt.tolerance = tolerance;
    opt.max_terms = budget;
    for (const Rat& x : xs) {
        OmegaHatResult res = omega_hat(p, x, opt);
        switch (res.status) {
        case OmegaHatResult::Status::converged:
            ++scan.report.confirmed;
            break;
        case OmegaHatResult::Status::diverged:
            ++scan.report.refuted;
            scan.report.witnesses.push_back(
                {to_string(x), "diverged",
                 "term index " + std::to_string(res.divergence_witness.value_or(0)) +
                     " past blow-up threshold; density " + to_string(res.density_seen)});
            break;
        case OmegaHatResult::Status::unknown:
            ++scan.report.unknown;
            break;
        }
        if (res.density_seen < scan.min_density) scan.min_density = res.density_seen;
        scan.results.push_back(std::move(res));
    }
    return scan;
}

/// "2^v(1 + 2^a + 2^b + ...)": the 2-adic valuation factored out, then the
/// first three one-positions of the unit part.
inline std::string two_adic_prefix(const MapParams& p, const Rat& x, unsigned probe_bits = 40) {
    TwoAdicWord w = phi_truncated(p, v_complement(q_truncated(p, x, probe_bits)));
    if (w.residue == 0) return "0 (mod 2^" + std::to_string(probe_bits) + ")";
    unsigned v = lsb(w.residue);
    BigInt unit = w.residue >> v;
    std::ostringstream os;
    os << "2^" << v << "(1";
    unsigned shown = 0;
    for (unsigned i = 1; i < probe_bits - v && shown < 2; ++i) {
        if (bit_test(unit, i)) {
            os << " + 2^" << i;
            ++shown;
        }
    }
    os << " + ...)";
    return os.str();
}

struct Table1Row {
    Rat x;
    std::optional<Rat> omega;  // exact, when the orbit cycles
    std::string two_adic;      // fraction, or prefix in 2^v(1 + ...) form
    OmegaHatResult hat;
};

/// Values of omega and its real limit for (m, r) = (5, 1) on the reference
/// grid of small integers.
inline std::vector<Table1Row> table1(double tolerance = 1e-6, std::size_t orbit_budget = 4096) {
    MapParams p(5, 1);
    OmegaHatOptions opt;
    opt.tolerance = tolerance;
    std::vector<Table1Row> rows;
    for (long xi : {-9, -7, -5, -3, -1, 0, 1, 3, 5, 7, 9}) {
        Table1Row row;
        row.x = xi;
        row.omega = omega_exact(p, row.x, orbit_budget);
        row.two_adic = row.omega ? to_string(*row.omega) : two_adic_prefix(p, row.x);
        row.hat = omega_hat(p, row.x, opt);
        rows.push_back(std::move(row));
    }
    return rows;
}

} // namespace tadic
