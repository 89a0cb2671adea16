#pragma once

// Command-line front end: list, describe, verify, check.
// Exit codes: 0 success, 1 verification failure, 2 usage or configuration error.

#include <wsym/harness.hpp>

#include <CLI11.hpp>

#include <filesystem>
#include <fstream>
#include <iomanip>
#include <iostream>

namespace wsym::cli {

enum ExitCode : int { ok = 0, failed = 1, usage = 2 };

/// Writes `content` to a sibling temp file, then renames it over `path`.
inline void write_atomic(const std::filesystem::path& path, const std::string& content) {
    std::filesystem::path tmp = path;
    tmp += ".tmp";
    {
        std::ofstream f(tmp, std::ios::binary | std::ios::trunc);
        if (!f) {
            throw std::runtime_error("cannot open " + tmp.string() + " for writing");
        }
        f << content;
        f.flush();
        if (!f) {
            throw std::runtime_error("write failed: " + tmp.string());
        }
    }
    std::error_code ec;
    std::filesystem::rename(tmp, path, ec);
    if (ec) {
        std::filesystem::remove(tmp);
        throw std::runtime_error("cannot rename onto " + path.string() + ": " + ec.message());
    }
}

inline int cmd_list(std::ostream& out) {
    out << std::left << std::setw(28) << "id" << std::setw(8) << "family" << std::setw(10) << "G" << std::setw(18)
        << "H" << std::setw(26) << "constraints" << std::setw(12) << "defaults"
        << "status\n";
    for (const auto& e : list_pairs()) {
        std::string defaults;
        for (const auto& p : e.params) {
            defaults += (defaults.empty() ? "" : ",") + p.name + "=" + std::to_string(p.default_value);
        }
        std::string status = to_string(e.status);
        if (e.status == PairStatus::excluded) {
            status += ": no desk-scale model";
        }
        out << std::setw(28) << e.id << std::setw(8) << to_string(e.family) << std::setw(10) << e.group
            << std::setw(18) << e.subgroup << std::setw(26) << (e.constraint.empty() ? "-" : e.constraint)
            << std::setw(12) << (defaults.empty() ? "-" : defaults) << status << '\n';
    }
    return ok;
}

inline int cmd_describe(const SphericalPair& pair, std::ostream& out) {
    out << "pair: " << pair.id << '\n';
    out << "params: " << (pair.params.empty() ? "-" : params_label(pair.params)) << '\n';
    out << "family: " << to_string(pair.family) << '\n';
    out << "status: " << to_string(pair.status) << '\n';
    out << "g dim: " << pair.g.dim() << '\n';
    out << "h dim: " << pair.h.dim() << '\n';
    out << "q dim: " << pair.q.dim() << '\n';
    out << "matrix size: " << pair.ambient_size() << '\n';
    out << "involution: " << pair.involution.name() << '\n';
    out << "isotropy blocks: " << detail::blocks_label(isotropy_decomposition(pair)) << '\n';
    if (pair.hermitian) {
        const HermitianStructure hs = hermitian_structure(pair);
        out << "k dim: " << hs.k.dim() << '\n';
        out << "k_s dim: " << hs.k_s.dim() << '\n';
        out << "p dim: " << hs.p.dim() << '\n';
        out << "rank (dim a): " << hs.a.dim() << '\n';
        try {
            const TubeTypeVerdict v = tube_type_check(pair);
            out << "tube type: " << (v.nontube ? "nontube" : "tube") << " (|Z'| = " << v.zprime_norm << ")\n";
        } catch (const StructuralError& e) {
            out << "tube type: inconsistent (" << e.what() << ")\n";
        }
    }
    return ok;
}

inline int cmd_check(const SphericalPair& pair, std::ostream& out, std::uint64_t seed = 42) {
    const auto suite = invariant_suite(pair, seed);
    bool all = true;
    for (const auto& inv : suite) {
        all = all && inv.pass;
        out << (inv.pass ? "PASS " : "FAIL ") << inv.name << ": ";
        if (!inv.note.empty()) {
            out << inv.note << " ";
        }
        out << "(value " << std::setprecision(6) << inv.value << ")\n";
    }
    out << (all ? "all checks pass" : "some checks failed") << '\n';
    return all ? ok : failed;
}

inline int cmd_verify(const SphericalPair& pair, const VerifyConfig& cfg, const std::string& report,
                      const std::string& format, std::ostream& out) {
    const VerificationReport rep = verify_pair(pair, cfg);
    const std::string body = format == "csv" ? report_csv_string(rep) : report_json_string(rep);
    if (report.empty()) {
        out << body;
    } else {
        write_atomic(report, body);
        out << pair.id << ": " << rep.aggregate.successes << "/" << rep.aggregate.total
            << " reversed, max residual " << std::setprecision(3) << rep.aggregate.max_residual << ", invariants "
            << (rep.all_invariants_pass() ? "pass" : "FAIL") << "; report written to " << report << '\n';
    }
    return rep.all_pass() ? ok : failed;
}

/// Parses argv and dispatches. Never throws; every error maps to an exit code.
inline int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
    CLI::App app{"Weak-symmetry verification engine for compact spherical pairs"};
    app.require_subcommand(1);

    std::string id;
    std::optional<int> n;
    std::optional<int> m;
    VerifyConfig cfg;
    std::string report;
    std::string format = "json";

    auto add_pair = [&](CLI::App* sub) {
        sub->add_option("pair", id, "pair id (see `list`)")->required();
        sub->add_option("--n", n, "parameter n");
        sub->add_option("--m", m, "parameter m");
    };
    app.add_subcommand("list", "list catalog pairs");
    CLI::App* describe = app.add_subcommand("describe", "print dimensions and structure of a pair");
    add_pair(describe);
    CLI::App* check = app.add_subcommand("check", "run the structural invariant suite");
    add_pair(check);
    check->add_option("--seed", cfg.seed, "random seed")->capture_default_str();
    CLI::App* verify = app.add_subcommand("verify", "sample tangent vectors and certify reversals");
    add_pair(verify);
    verify->add_option("--samples", cfg.samples, "number of tangent samples")->capture_default_str();
    verify->add_option("--tol", cfg.tol, "residual tolerance")->capture_default_str();
    verify->add_option("--restarts", cfg.restarts, "optimizer restarts")->capture_default_str();
    verify->add_option("--max-iters", cfg.max_iterations, "optimizer iterations per restart")->capture_default_str();
    verify->add_option("--seed", cfg.seed, "random seed")->capture_default_str();
    verify->add_option("--threads", cfg.threads, "worker threads (does not affect results)")->capture_default_str();
    verify->add_option("--report", report, "write the report to PATH instead of stdout");
    verify->add_option("--format", format, "report format")
        ->check(CLI::IsMember({"json", "csv"}))
        ->capture_default_str();

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp&) {
        out << app.help();
        return ok;
    } catch (const CLI::CallForAllHelp&) {
        out << app.help("", CLI::AppFormatMode::All);
        return ok;
    } catch (const CLI::ParseError& e) {
        err << "error: " << e.what() << '\n';
        return usage;
    }

    try {
        if (app.got_subcommand("list")) {
            return cmd_list(out);
        }
        std::map<std::string, int> overrides;
        if (n) {
            overrides["n"] = *n;
        }
        if (m) {
            overrides["m"] = *m;
        }
        SphericalPair pair;
        try {
            pair = build_pair(id, overrides);
            if (app.got_subcommand("verify")) {
                cfg.validate();
            }
        } catch (const std::invalid_argument& e) {
            err << "error: " << e.what() << '\n';
            return usage;
        }
        if (app.got_subcommand("describe")) {
            return cmd_describe(pair, out);
        }
        if (app.got_subcommand("check")) {
            return cmd_check(pair, out, cfg.seed);
        }
        return cmd_verify(pair, cfg, report, format, out);
    } catch (const InvolutionError& e) {
        err << "verification failed: " << e.what() << '\n';
        return failed;
    } catch (const StructuralError& e) {
        err << "verification failed: " << e.what() << '\n';
        return failed;
    } catch (const std::exception& e) {
        err << "error: " << e.what() << '\n';
        return usage;
    }
}

} // namespace wsym::cli
