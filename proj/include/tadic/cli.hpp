#pragma once

// Command-line front end. Every library operation is exposed as a
// subcommand; results go to stdout as json (one record per line), csv, or
// text. Exit codes: 0 success, 2 usage error, 3 precondition violation.

#include <fstream>
#include <iomanip>
#include <iostream>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "tadic/analysis.hpp"

namespace tadic::cli {

struct UsageError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// Flat record; serialized per --format. Rationals are "num/den" strings,
/// never floats. Field names are pinned in docs/output-schema.md.
struct OutputRecord {
    std::string command;
    std::string m, r;
    std::vector<std::pair<std::string, std::string>> inputs;
    std::vector<std::pair<std::string, std::string>> results;
    std::string status = "ok";
};

inline std::string csv_quote(const std::string& s) {
    if (s.find_first_of(",\"\n") == std::string::npos) return s;
    std::string out = "\"";
    for (char c : s) {
        if (c == '"') out += '"';
        out += c;
    }
    return out + "\"";
}

inline void emit(std::ostream& os, const OutputRecord& rec, const std::string& format) {
    if (format == "json") {
        nlohmann::ordered_json j;
        j["command"] = rec.command;
        j["params"] = {{"m", rec.m}, {"r", rec.r}};
        nlohmann::ordered_json in = nlohmann::ordered_json::object();
        for (auto& [k, v] : rec.inputs) in[k] = v;
        nlohmann::ordered_json res = nlohmann::ordered_json::object();
        for (auto& [k, v] : rec.results) res[k] = v;
        j["inputs"] = in;
        j["results"] = res;
        j["status"] = rec.status;
        os << j.dump() << '\n';
    } else if (format == "csv") {
        auto join = [](const std::vector<std::pair<std::string, std::string>>& kv) {
            std::string s;
            for (auto& [k, v] : kv) {
                if (!s.empty()) s += ';';
                s += k + "=" + v;
            }
            return s;
        };
        os << csv_quote(rec.command) << ',' << rec.m << ',' << rec.r << ','
           << csv_quote(join(rec.inputs)) << ',' << csv_quote(join(rec.results)) << ','
           << rec.status << '\n';
    } else {
        os << rec.command << " (m=" << rec.m << ", r=" << rec.r << ")";
        for (auto& [k, v] : rec.inputs) os << ' ' << k << '=' << v;
        os << "\n";
        for (auto& [k, v] : rec.results) os << "  " << k << ": " << v << '\n';
        os << "  status: " << rec.status << '\n';
    }
}

inline Rat parse_rat_arg(const std::string& s) {
    try {
        return parse_rational(s);
    } catch (const std::invalid_argument& e) {
        throw UsageError(e.what());
    }
}

inline std::string bits_string(const std::vector<bool>& v) {
    std::string s;
    for (bool b : v) s += b ? '1' : '0';
    return s;
}

inline std::string real_string(const Real& v, int digits = 15) {
    std::ostringstream os;
    os << std::setprecision(digits) << v;
    return os.str();
}

inline std::string hat_status(const OmegaHatResult& res) {
    switch (res.status) {
    case OmegaHatResult::Status::converged: return "converged";
    case OmegaHatResult::Status::diverged: return "diverged";
    default: return "unknown";
    }
}

inline void fill_hat(OutputRecord& rec, const OmegaHatResult& res) {
    rec.results.emplace_back("hat_status", hat_status(res));
    if (res.exact_value) rec.results.emplace_back("exact_value", to_string(*res.exact_value));
    if (res.value) {
        rec.results.emplace_back("value", real_string(*res.value));
        std::ostringstream eb;
        eb << std::scientific << std::setprecision(3) << res.error_bound;
        rec.results.emplace_back("error_bound", eb.str());
    }
    rec.results.emplace_back("terms_used", std::to_string(res.terms_used));
    rec.results.emplace_back("density_seen", to_string(res.density_seen));
    rec.results.emplace_back("density_exact", res.density_exact ? "true" : "false");
    if (res.divergence_witness)
        rec.results.emplace_back("divergence_witness", std::to_string(*res.divergence_witness));
}

inline void fill_report(OutputRecord& rec, const ScanReport& rep) {
    rec.results.emplace_back("confirmed", std::to_string(rep.confirmed));
    rec.results.emplace_back("refuted", std::to_string(rep.refuted));
    rec.results.emplace_back("unknown", std::to_string(rep.unknown));
    std::size_t i = 0;
    for (auto& w : rep.witnesses) {
        rec.results.emplace_back("witness_" + std::to_string(i++),
                                 w.input + " [" + w.kind + "] " + w.evidence);
    }
}

inline int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
    CLI::App app{"exact 2-adic machinery for generalized Collatz maps"};
    app.require_subcommand(1);

    std::string m_str = "3", r_str = "1";
    std::vector<std::string> x_strs;
    unsigned k = 0;
    bool has_k = false;
    std::size_t budget = 100000;
    double tolerance = 1e-6;
    std::string bound_str = "1000000";
    std::uint64_t seed = 1;
    std::size_t samples = 1000;
    std::string format = "json";
    std::string out_path;

    app.add_option("--format", format)->check(CLI::IsMember({"json", "csv", "text"}));
    app.add_option("--out", out_path, "write records to a file instead of stdout");

    auto add_common = [&](CLI::App* sub, bool with_x = true, bool with_params = true) {
        if (with_params) {
            sub->add_option("--m", m_str);
            sub->add_option("--r", r_str);
        }
        if (with_x) sub->add_option("--x", x_strs, "rational 'a/b' or integer");
        sub->add_option("--budget", budget);
        sub->add_option("--format", format)->check(CLI::IsMember({"json", "csv", "text"}));
        sub->add_option("--out", out_path);
        return sub;
    };
    auto add_k = [&](CLI::App* sub) {
        sub->add_option("--k", k)->each([&](const std::string&) { has_k = true; });
    };

    auto* c_orbit = add_common(app.add_subcommand("orbit", "iterate the map, detect cycles"));
    auto* c_q = add_common(app.add_subcommand("q", "parity vector, truncated or exact"));
    add_k(c_q);
    auto* c_phi = add_common(app.add_subcommand("phi", "inverse encoding, exact or mod 2^k"));
    add_k(c_phi);
    auto* c_omega = add_common(app.add_subcommand("omega", "autoconjugacy, exact rational"));
    auto* c_omega_k = add_common(app.add_subcommand("omega-k", "k-th truncation of omega"));
    add_k(c_omega_k);
    auto* c_hat = add_common(app.add_subcommand("omega-hat", "real limit of the truncations"));
    c_hat->add_option("--tolerance", tolerance);
    auto* c_nu = add_common(app.add_subcommand("nu", "even-iterate density"));
    add_k(c_nu);
    auto* c_qbar = add_common(app.add_subcommand("qbar", "permutation table on Z/2^k"), false);
    add_k(c_qbar);
    auto* c_table1 =
        add_common(app.add_subcommand("table1", "reference values for (5,1)"), false, false);
    c_table1->add_option("--tolerance", tolerance);
    auto* c_ident = add_common(app.add_subcommand("identities", "identity test suite"), false);
    add_k(c_ident);
    c_ident->add_option("--seed", seed);
    c_ident->add_option("--samples", samples);
    auto* c_pairs = add_common(app.add_subcommand("scan-pairs", "rational-pairs scanner"));
    add_k(c_pairs);
    c_pairs->add_option("--bound", bound_str);
    auto* c_shat = add_common(app.add_subcommand("scan-hat", "omega-hat existence scanner"));
    c_shat->add_option("--tolerance", tolerance);

    try {
        std::vector<std::string> rev(args.rbegin(), args.rend());
        app.parse(rev);
    } catch (const CLI::ParseError& e) {
        if (e.get_exit_code() == 0) {
            out << app.help();
            return 0;
        }
        err << "usage error: " << e.what() << '\n';
        return 2;
    }

    if (*c_table1) {
        // the reference table is defined for (5,1) only
        m_str = "5";
        r_str = "1";
    }

    std::ofstream file;
    std::ostream* sink = &out;
    if (!out_path.empty()) {
        file.open(out_path);
        if (!file) {
            err << "cannot open output file: " << out_path << '\n';
            return 2;
        }
        sink = &file;
    }

    try {
        MapParams p{BigInt(m_str), BigInt(r_str)};
        auto need_x = [&]() -> std::vector<Rat> {
            if (x_strs.empty()) throw UsageError("--x is required");
            std::vector<Rat> xs;
            for (auto& s : x_strs) xs.push_back(parse_rat_arg(s));
            return xs;
        };
        auto base_record = [&](const std::string& cmd) {
            OutputRecord rec;
            rec.command = cmd;
            std::ostringstream ms, rs;
            ms << p.m;
            rs << p.r;
            rec.m = ms.str();
            rec.r = rs.str();
            return rec;
        };

        if (*c_orbit) {
            for (const Rat& x : need_x()) {
                OrbitResult res = orbit(p, x, budget);
                OutputRecord rec = base_record("orbit");
                rec.inputs.emplace_back("x", to_string(x));
                rec.inputs.emplace_back("budget", std::to_string(budget));
                std::string states;
                for (std::size_t i = 0; i < res.states.size() && i < 64; ++i) {
                    if (i) states += ' ';
                    states += to_string(res.states[i]);
                }
                if (res.states.size() > 64) states += " ...";
                rec.results.emplace_back("steps", std::to_string(res.states.size()));
                rec.results.emplace_back("states", states);
                rec.results.emplace_back("parities", bits_string(res.parity_bits));
                if (res.cycle) {
                    rec.results.emplace_back("cycle_entry", std::to_string(res.cycle->entry_index));
                    rec.results.emplace_back("cycle_length", std::to_string(res.cycle->cycle_length));
                    rec.status = "cycle";
                } else {
                    rec.status = "budget-exhausted";
                }
                emit(*sink, rec, format);
            }
        } else if (*c_q) {
            for (const Rat& x : need_x()) {
                OutputRecord rec = base_record("q");
                rec.inputs.emplace_back("x", to_string(x));
                if (has_k) {
                    rec.inputs.emplace_back("k", std::to_string(k));
                    TwoAdicWord w = q_truncated(p, x, k);
                    rec.results.emplace_back("residue", w.residue.str());
                    rec.results.emplace_back("precision", std::to_string(w.precision));
                } else {
                    auto b = q_exact(p, x, budget);
                    if (b) {
                        rec.results.emplace_back("preperiod", bits_string(b->preperiod()));
                        rec.results.emplace_back("period", bits_string(b->period()));
                        rec.results.emplace_back("value", to_string(bits_to_rational(*b)));
                        rec.status = "exact";
                    } else {
                        rec.status = "budget-exhausted";
                    }
                }
                emit(*sink, rec, format);
            }
        } else if (*c_phi) {
            for (const Rat& x : need_x()) {
                OutputRecord rec = base_record("phi");
                rec.inputs.emplace_back("x", to_string(x));
                if (has_k) {
                    rec.inputs.emplace_back("k", std::to_string(k));
                    TwoAdicWord w = phi_truncated(p, TwoAdicWord(residue_mod_pow2(x, k), k));
                    rec.results.emplace_back("residue", w.residue.str());
                    rec.results.emplace_back("precision", std::to_string(w.precision));
                } else {
                    rec.results.emplace_back("value", to_string(phi_exact(p, rational_to_bits(x))));
                    rec.status = "exact";
                }
                emit(*sink, rec, format);
            }
        } else if (*c_omega) {
            for (const Rat& x : need_x()) {
                OutputRecord rec = base_record("omega");
                rec.inputs.emplace_back("x", to_string(x));
                auto w = omega_exact(p, x, budget);
                if (w) {
                    rec.results.emplace_back("value", to_string(*w));
                    rec.status = "exact";
                } else {
                    rec.status = "budget-exhausted";
                }
                emit(*sink, rec, format);
            }
        } else if (*c_omega_k) {
            if (!has_k) throw UsageError("--k is required");
            for (const Rat& x : need_x()) {
                OutputRecord rec = base_record("omega-k");
                rec.inputs.emplace_back("x", to_string(x));
                rec.inputs.emplace_back("k", std::to_string(k));
                rec.results.emplace_back("value", to_string(omega_truncated(p, x, k)));
                emit(*sink, rec, format);
            }
        } else if (*c_hat) {
            OmegaHatOptions opt;
            opt.tolerance = tolerance;
            opt.max_terms = budget;
            for (const Rat& x : need_x()) {
                OutputRecord rec = base_record("omega-hat");
                rec.inputs.emplace_back("x", to_string(x));
                rec.inputs.emplace_back("tolerance", std::to_string(tolerance));
                OmegaHatResult res = omega_hat(p, x, opt);
                fill_hat(rec, res);
                rec.status = hat_status(res);
                emit(*sink, rec, format);
            }
        } else if (*c_nu) {
            if (!has_k) throw UsageError("--k is required");
            for (const Rat& x : need_x()) {
                OutputRecord rec = base_record("nu");
                rec.inputs.emplace_back("x", to_string(x));
                rec.inputs.emplace_back("k", std::to_string(k));
                NuResult res = nu_estimate(p, x, k);
                rec.results.emplace_back("value", to_string(res.value));
                rec.results.emplace_back("exact", res.exact ? "true" : "false");
                rec.status = res.exact ? "exact" : "window-average";
                emit(*sink, rec, format);
            }
        } else if (*c_qbar) {
            if (!has_k) throw UsageError("--k is required");
            PermutationTable t = qbar_table(p, k);
            OutputRecord rec = base_record("qbar");
            rec.inputs.emplace_back("k", std::to_string(k));
            rec.results.emplace_back("bijective", t.bijective ? "true" : "false");
            rec.results.emplace_back("order", std::to_string(t.order));
            if (k <= 12) {
                std::string map;
                for (std::size_t i = 0; i < t.mapping.size(); ++i) {
                    if (i) map += ' ';
                    map += std::to_string(t.mapping[i]);
                }
                rec.results.emplace_back("mapping", map);
            }
            emit(*sink, rec, format);
        } else if (*c_table1) {
            auto rows = table1(tolerance);
            if (format == "text") {
                *sink << std::left << std::setw(6) << "x" << std::setw(28) << "omega(x) in Z_2"
                      << "omega-hat(x) in R\n";
                for (auto& row : rows) {
                    std::string hat;
                    if (row.hat.exact_value) {
                        hat = to_string(*row.hat.exact_value);
                    } else if (row.hat.value) {
                        std::ostringstream os;
                        os << std::scientific << std::setprecision(3)
                           << row.hat.value->convert_to<double>();
                        hat = os.str();
                    } else {
                        hat = hat_status(row.hat);
                    }
                    *sink << std::left << std::setw(6) << to_string(row.x) << std::setw(28)
                          << row.two_adic << hat << '\n';
                }
            } else {
                for (auto& row : rows) {
                    OutputRecord rec = base_record("table1");
                    rec.inputs.emplace_back("x", to_string(row.x));
                    rec.results.emplace_back("two_adic", row.two_adic);
                    if (row.omega) rec.results.emplace_back("omega", to_string(*row.omega));
                    fill_hat(rec, row.hat);
                    rec.status = hat_status(row.hat);
                    emit(*sink, rec, format);
                }
            }
        } else if (*c_ident) {
            unsigned k_max = has_k ? k : 64;
            ScanReport rep = identity_suite(p, samples, k_max, seed);
            OutputRecord rec = base_record("identities");
            rec.inputs.emplace_back("samples", std::to_string(samples));
            rec.inputs.emplace_back("k_max", std::to_string(k_max));
            rec.inputs.emplace_back("seed", std::to_string(seed));
            fill_report(rec, rep);
            rec.status = rep.refuted == 0 ? "ok" : "refuted";
            emit(*sink, rec, format);
        } else if (*c_pairs) {
            unsigned k_probe = has_k ? k : 128;
            BigInt bound(bound_str);
            ScanReport rep = scan_rational_pairs(p, need_x(), budget, k_probe, bound);
            OutputRecord rec = base_record("scan-pairs");
            rec.inputs.emplace_back("k_probe", std::to_string(k_probe));
            rec.inputs.emplace_back("bound", bound.str());
            rec.inputs.emplace_back("budget", std::to_string(budget));
            fill_report(rec, rep);
            emit(*sink, rec, format);
        } else if (*c_shat) {
            OmegaHatScan scan = scan_omega_hat(p, need_x(), tolerance, budget);
            OutputRecord rec = base_record("scan-hat");
            rec.inputs.emplace_back("tolerance", std::to_string(tolerance));
            rec.inputs.emplace_back("budget", std::to_string(budget));
            fill_report(rec, scan.report);
            rec.results.emplace_back("min_density", to_string(scan.min_density));
            emit(*sink, rec, format);
        }
    } catch (const UsageError& e) {
        err << "usage error: " << e.what() << '\n';
        return 2;
    } catch (const std::domain_error& e) {
        err << "error: " << e.what() << '\n';
        return 3;
    } catch (const std::invalid_argument& e) {
        err << "error: " << e.what() << '\n';
        return 3;
    } catch (const std::runtime_error& e) {
        err << "usage error: " << e.what() << '\n';
        return 2;
    }
    return 0;
}

inline int run_main(int argc, char** argv) {
    std::vector<std::string> args(argv + 1, argv + argc);
    return run(args, std::cout, std::cerr);
}

} // namespace tadic::cli
