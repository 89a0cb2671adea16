#pragma once

// Verification driver: samples tangent vectors, dispatches each to the
// matching reverser, runs the structural invariant suite, and serializes
// reports.

#include <wsym/reversal.hpp>

#include <json.hpp>

#include <atomic>
#include <sstream>
#include <thread>

namespace wsym {

inline constexpr const char* kVersion = "0.1.0";

struct VerifyConfig {
    std::size_t samples = 100;
    double tol = 1e-8;
    std::size_t restarts = 20;
    std::size_t max_iterations = 500;
    std::uint64_t seed = 42;
    std::size_t threads = 1; // not part of the report: results do not depend on it

    ReversalConfig reversal() const { return {tol, restarts, max_iterations}; }
    void validate() const {
        if (samples < 1) {
            throw std::invalid_argument("samples must be at least 1");
        }
        if (!(tol > 0)) {
            throw std::invalid_argument("tol must be positive");
        }
        if (restarts < 1 || max_iterations < 1) {
            throw std::invalid_argument("restarts and max-iters must be at least 1");
        }
    }
};

struct SampleRecord {
    std::size_t index = 0;
    std::string method;
    double residual = 0.0;
    bool success = false;
    bool fallback = false;
    std::string route;
};

struct InvariantResult {
    std::string name;
    bool pass = false;
    double value = 0.0;
    std::string note;
};

struct Aggregate {
    std::size_t successes = 0;
    std::size_t total = 0;
    double max_residual = 0.0;
    std::size_t fallbacks = 0;
    std::map<std::string, std::size_t> routes;
};

struct VerificationReport {
    std::string pair;
    std::map<std::string, int> params;
    VerifyConfig config;
    std::vector<SampleRecord> samples;
    Aggregate aggregate;
    std::vector<InvariantResult> invariants;
    std::string involution;
    std::string version = kVersion;

    bool all_invariants_pass() const {
        return std::all_of(invariants.begin(), invariants.end(), [](const auto& r) { return r.pass; });
    }
    bool all_pass() const { return aggregate.successes == aggregate.total && all_invariants_pass(); }
};

/// Unit Gaussian element of q, a function of (seed, index) only.
inline CMatrix sample_tangent(const SphericalPair& pair, std::size_t index, std::uint64_t seed) {
    if (pair.q.dim() == 0) {
        throw std::invalid_argument(pair.id + ": q is trivial");
    }
    std::mt19937_64 rng(mix_seed(seed, index));
    return pair.q.random_unit(rng);
}

/// Dimensions of the isotropy-irreducible blocks of q, sorted. Computed by
/// eigen-splitting q under a random symmetric element of the commutant of
/// {ad(E)|_q : E in h}; the symmetric part suffices because the action is
/// orthogonal, so the commutant is closed under transposition.
inline std::vector<std::size_t> isotropy_decomposition(const SphericalPair& pair, std::uint64_t seed = 1) {
    const std::size_t d = pair.q.dim();
    if (d == 0) {
        return {};
    }
    std::vector<RMatrix> rho;
    for (const auto& e : pair.h.basis()) {
        rho.push_back(restricted_ad(e, pair.q));
    }
    // Unknowns: upper triangle of a symmetric d x d matrix.
    std::vector<std::pair<std::size_t, std::size_t>> slots;
    for (std::size_t i = 0; i < d; ++i) {
        for (std::size_t j = i; j < d; ++j) {
            slots.emplace_back(i, j);
        }
    }
    RMatrix sys(std::max<std::size_t>(rho.size(), 1) * d * d, slots.size());
    for (std::size_t a = 0; a < rho.size(); ++a) {
        const RMatrix& r = rho[a];
        for (std::size_t s = 0; s < slots.size(); ++s) {
            const auto [p, q] = slots[s];
            // Basis element S = E_pq + E_qp (or E_pp); row (i, j) of S r - r S.
            auto add = [&](std::size_t u, std::size_t v) {
                for (std::size_t j = 0; j < d; ++j) {
                    sys(a * d * d + u * d + j, s) += r(v, j); // (E_uv r)_{u j}
                }
                for (std::size_t i = 0; i < d; ++i) {
                    sys(a * d * d + i * d + v, s) -= r(i, u); // (r E_uv)_{i v}
                }
            };
            add(p, q);
            if (p != q) {
                add(q, p);
            }
        }
    }
    const auto null = rho.empty() ? std::vector<std::vector<double>>{} : nullspace(sys, 1e-9);
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> gauss(0.0, 1.0);
    RMatrix c(d, d);
    if (rho.empty()) {
        // Trivial isotropy: every symmetric matrix commutes; q splits into lines.
        return std::vector<std::size_t>(d, 1);
    }
    for (const auto& v : null) {
        const double w = gauss(rng);
        for (std::size_t s = 0; s < slots.size(); ++s) {
            const auto [p, q] = slots[s];
            c(p, q) += w * v[s];
            if (p != q) {
                c(q, p) += w * v[s];
            }
        }
    }
    const auto eig = hermitian_eig(c);
    const double spread = std::max(1e-300, eig.values.back() - eig.values.front());
    const double gap = std::max(1e-7 * spread, 1e-9 * c.max_abs());
    std::vector<std::size_t> blocks{1};
    for (std::size_t k = 1; k < d; ++k) {
        if (eig.values[k] - eig.values[k - 1] > gap) {
            blocks.push_back(1);
        } else {
            ++blocks.back();
        }
    }
    std::sort(blocks.begin(), blocks.end());
    return blocks;
}

/// i(E_{j,2n} + E_{2n,j}) and its real partner: the complex line a_j of p.
inline Subspace complex_line(std::size_t n, std::size_t j) {
    const std::size_t N = 2 * n + 1;
    return Subspace::span(N, {a_line(n, j), unit(N, j, N - 1) - unit(N, N - 1, j)});
}

/// Worst subspace residual of Ad(L_j)(a_j) = a_{j+1}, Ad(L_j)(a_{n+j}) = a_{n+j+1}
/// and Ad(L~_j)(a_j) = a_{n+j}, over all j.
inline double normalizer_line_residual(std::size_t n) {
    const auto gens = normalizer_generators(n);
    auto moved = [&](const CMatrix& g, std::size_t from, std::size_t to) {
        const Subspace src = complex_line(n, from);
        const Subspace dst = complex_line(n, to);
        double w = 0.0;
        for (const auto& x : src.basis()) {
            w = std::max(w, dst.residual(adjoint_action(g, x)));
        }
        return w;
    };
    double worst = 0.0;
    for (std::size_t j = 0; j + 1 < n; ++j) {
        worst = std::max({worst, moved(gens.L[j], j, j + 1), moved(gens.L[j], n + j, n + j + 1)});
    }
    for (std::size_t j = 0; j < n; ++j) {
        worst = std::max(worst, moved(gens.L_tilde[j], j, n + j));
    }
    return worst;
}

namespace detail {

inline InvariantResult check(std::string name, double value, double tol, std::string note = {}) {
    return {std::move(name), value <= tol, value, std::move(note)};
}

inline double max_over(const std::vector<CMatrix>& xs, const std::function<double(const CMatrix&)>& f) {
    double worst = 0.0;
    for (const auto& x : xs) {
        worst = std::max(worst, f(x));
    }
    return worst;
}

inline std::string blocks_label(const std::vector<std::size_t>& b) {
    std::string s = "[";
    for (std::size_t k = 0; k < b.size(); ++k) {
        s += (k ? "," : "") + std::to_string(b[k]);
    }
    return s + "]";
}

inline void involution_checks(const SphericalPair& pair, std::vector<InvariantResult>& out) {
    const auto& gb = pair.g.basis();
    out.push_back(check("theta_squared_identity",
                        max_over(gb, [&](const CMatrix& x) { return max_abs_diff(d_theta(pair, d_theta(pair, x)), x); }),
                        1e-12));
    out.push_back(check("theta_preserves_h", max_over(pair.h.basis(), [&](const CMatrix& x) {
                            return pair.h.space.residual(d_theta(pair, x));
                        }), 1e-10));
    out.push_back(check("theta_preserves_q", max_over(pair.q.basis(), [&](const CMatrix& x) {
                            return pair.q.residual(d_theta(pair, x));
                        }), 1e-10));
}

inline void hermitian_checks(const SphericalPair& pair, std::vector<InvariantResult>& out) {
    const HermitianStructure hs = hermitian_structure(pair);
    auto minus = [&](const CMatrix& x) { return max_abs_diff(d_theta(pair, x), x * cplx{-1.0}); };
    out.push_back(check("theta_minus_identity_on_a", max_over(hs.a.basis(), minus), 1e-12));
    out.push_back(check("theta_minus_identity_on_zk", max_over(hs.z_k.basis(), minus), 1e-12));
    out.push_back(check("theta_preserves_ks", max_over(hs.k_s.basis(), [&](const CMatrix& x) {
                            return hs.k_s.space.residual(d_theta(pair, x));
                        }), 1e-12));
    out.push_back(check("zj_central_in_k",
                        max_over(hs.k.basis(), [&](const CMatrix& x) { return bracket(hs.ZJ, x).max_abs(); }), 1e-10));
    const RMatrix m = restricted_ad(hs.ZJ, hs.p);
    out.push_back(check("zj_complex_structure", (m * m + RMatrix::identity(hs.p.dim())).max_abs(), 1e-9));
    out.push_back(check("zprime_centralizes_a",
                        max_over(hs.a.basis(), [&](const CMatrix& x) { return bracket(hs.Zprime, x).max_abs(); }),
                        1e-10));
    double abelian = 0.0;
    for (const auto& x : hs.a.basis()) {
        for (const auto& y : hs.a.basis()) {
            abelian = std::max(abelian, bracket(x, y).max_abs());
        }
    }
    out.push_back(check("a_abelian", abelian, 1e-12));
    InvariantResult tube{"tube_type", false, 0.0, ""};
    try {
        const TubeTypeVerdict v = tube_type_check(pair);
        tube.value = v.zprime_norm;
        tube.pass = v.nontube;
        tube.note = v.nontube ? "nontube" : "tube";
    } catch (const StructuralError& e) {
        tube.note = e.what();
    }
    out.push_back(tube);
}

inline void family3_checks(const SphericalPair& pair, std::vector<InvariantResult>& out) {
    const std::size_t n = pair.family3->n;
    const auto gens = normalizer_generators(n);
    const double worst = normalizer_line_residual(n);
    out.push_back(check("normalizer_moves_a", worst, 1e-10));
    double member = 0.0;
    for (const auto& m : gens.L) {
        member = std::max(member, pair.group_membership(m));
    }
    for (const auto& m : gens.L_tilde) {
        member = std::max(member, pair.group_membership(m));
    }
    out.push_back(check("normalizer_in_h", member, 1e-12));
}

inline void family4_checks(const SphericalPair& pair, std::vector<InvariantResult>& out, std::uint64_t seed) {
    // Rank of {[E, v] : E in h} at a random unit v: dim q - 1 iff the
    // isotropy action is transitive on the unit sphere of q.
    std::mt19937_64 rng(seed);
    const CMatrix v = pair.q.random_unit(rng);
    RMatrix m(pair.h.dim(), pair.q.dim());
    for (std::size_t a = 0; a < pair.h.dim(); ++a) {
        const auto c = pair.q.coords(bracket(pair.h.basis()[a], v));
        for (std::size_t i = 0; i < pair.q.dim(); ++i) {
            m(a, i) = c[i];
        }
    }
    const double r = double(rank(m, 1e-9));
    out.push_back({"isotropy_transitive", r == double(pair.q.dim() - 1), r, ""});
}

inline void so10_checks(const SphericalPair& pair, std::vector<InvariantResult>& out) {
    // q = R^7 + (R^8 x R^2): rows/cols 0..7 against 8..9 carry the 16-block,
    // and the 7-block is the complement of spin(7) in so(8).
    const CMatrix z = unit(10, 8, 9) - unit(10, 9, 8);
    std::vector<CMatrix> seven;
    std::vector<CMatrix> sixteen;
    const Subspace so8(Subspace::span(10, embed_all(so_generators(8), 10, 0)));
    const Subspace s7 = so8.complement(Subspace::span(10, embed_all(spin7_in_so8().basis(), 10, 0)));
    for (std::size_t i = 0; i < 8; ++i) {
        for (std::size_t j = 8; j < 10; ++j) {
            sixteen.push_back(unit(10, i, j) - unit(10, j, i));
        }
    }
    const Subspace s16 = Subspace::span(10, sixteen);
    double so2_on_7 = 0.0;
    for (const auto& x : s7.basis()) {
        so2_on_7 = std::max(so2_on_7, bracket(z, x).max_abs());
    }
    out.push_back(check("so2_trivial_on_7", so2_on_7, 1e-12));
    const CMatrix e = mat_exp(z * cplx{std::numbers::pi});
    double minus = 0.0;
    for (const auto& x : s16.basis()) {
        minus = std::max(minus, max_abs_diff(adjoint_action(e, x), x * cplx{-1.0}));
    }
    out.push_back(check("so2_pi_minus_one_on_16", minus, 1e-12));
    out.push_back(check("q_is_7_plus_16",
                        std::max(pair.q.containment_residual(s7), pair.q.containment_residual(s16)) +
                            double(s7.dim() + s16.dim() != pair.q.dim()),
                        1e-10));
}

} // namespace detail

/// Named structural checks for a pair, each with its measured value.
inline std::vector<InvariantResult> invariant_suite(const SphericalPair& pair, std::uint64_t seed = 42) {
    using detail::check;
    std::vector<InvariantResult> out;
    out.push_back(check("g_closure", closure_residual(pair.g.space), 1e-10));
    out.push_back(check("h_closure", closure_residual(pair.h.space), 1e-10));
    out.push_back(check("h_in_g", pair.g.space.containment_residual(pair.h.space), 1e-10));
    out.push_back(check("q_invariance", invariance_residual(pair.h.space, pair.q), 1e-10));
    out.push_back({"q_dimension", pair.q.dim() == pair.expected_q_dim, double(pair.q.dim()), ""});

    const bool nontrivial_theta = pair.involution.kind != InvolutionDescriptor::Kind::identity;
    if (nontrivial_theta) {
        detail::involution_checks(pair, out);
    }
    if (pair.symmetric_conjugator) {
        out.push_back(check("theta_minus_identity_on_q", detail::max_over(pair.q.basis(), [&](const CMatrix& x) {
                                return max_abs_diff(d_theta(pair, x), x * cplx{-1.0});
                            }), 1e-12));
    }
    if (pair.id == "I-so8-su2sp2") {
        double w = 0.0;
        for (const auto& x : pair.q.basis()) {
            for (const auto& y : pair.q.basis()) {
                const CMatrix b = bracket(x, y);
                w = std::max(w, (b - pair.h.space.project(b)).norm());
            }
        }
        out.push_back(check("q_bracket_in_h", w, 1e-10));
    }
    if (pair.hermitian && (pair.family == Family::II || pair.family == Family::III)) {
        detail::hermitian_checks(pair, out);
    }
    if (pair.family3) {
        detail::family3_checks(pair, out);
    }
    if (pair.family == Family::IV) {
        detail::family4_checks(pair, out, seed);
    }
    const auto blocks = isotropy_decomposition(pair, seed);
    std::size_t total = 0;
    for (auto b : blocks) {
        total += b;
    }
    out.push_back({"isotropy_blocks", total == pair.q.dim(), double(blocks.size()), detail::blocks_label(blocks)});
    if (pair.id == "V-so10-so2spin7") {
        out.push_back({"so10_blocks_7_16", blocks == std::vector<std::size_t>{7, 16}, double(blocks.size()),
                       detail::blocks_label(blocks)});
        detail::so10_checks(pair, out);
    }
    return out;
}

namespace detail {

struct SampleOutcome {
    SampleRecord record;
    double membership = 0.0;
    double recompute = 0.0;
    double norm_gap = 0.0;
};

inline SampleOutcome run_sample(const SphericalPair& pair, const std::optional<HermitianStructure>& hs,
                                const VerifyConfig& cfg, std::size_t index) {
    const CMatrix x = sample_tangent(pair, index, cfg.seed);
    const std::uint64_t sub = mix_seed(cfg.seed ^ 0xa5a5a5a5ULL, index);
    ReversalCertificate c;
    if (pair.family == Family::I && pair.symmetric_conjugator) {
        c = reverse_symmetric(pair, x, cfg.reversal());
    } else if (pair.family == Family::II && hs) {
        c = reverse_hermitian(pair, *hs, x, cfg.reversal(), sub);
    } else if (pair.family == Family::III && hs && pair.family3) {
        c = reverse_family3(pair, *hs, x, cfg.reversal(), sub);
    } else {
        c = reverse_generic(pair, x, cfg.reversal(), sub);
    }
    SampleOutcome o;
    o.record = {index, to_string(c.method), c.residual, c.success, c.fallback, c.route};
    o.membership = membership_residual(pair, c);
    o.recompute = std::abs(residual(pair, c.h, x) - c.residual);
    o.norm_gap = std::abs(adjoint_action(c.h, d_theta(pair, x)).norm() - x.norm());
    return o;
}

} // namespace detail

/// Runs cfg.samples reversals and the invariant suite. Failures are recorded,
/// never thrown. Results are independent of cfg.threads.
inline VerificationReport verify_pair(const SphericalPair& pair, const VerifyConfig& cfg) {
    cfg.validate();
    VerificationReport rep;
    rep.pair = pair.id;
    rep.params = pair.params;
    rep.config = cfg;
    rep.involution = pair.involution.name();

    std::optional<HermitianStructure> hs;
    if (pair.hermitian && (pair.family == Family::II || pair.family == Family::III)) {
        hs = hermitian_structure(pair);
    }
    std::vector<detail::SampleOutcome> outcomes(cfg.samples);
    const std::size_t threads = std::clamp<std::size_t>(cfg.threads, 1, cfg.samples);
    if (threads == 1) {
        for (std::size_t i = 0; i < cfg.samples; ++i) {
            outcomes[i] = detail::run_sample(pair, hs, cfg, i);
        }
    } else {
        std::atomic<std::size_t> next{0};
        std::vector<std::thread> pool;
        for (std::size_t t = 0; t < threads; ++t) {
            pool.emplace_back([&] {
                for (std::size_t i = next++; i < cfg.samples; i = next++) {
                    outcomes[i] = detail::run_sample(pair, hs, cfg, i);
                }
            });
        }
        for (auto& th : pool) {
            th.join();
        }
    }

    double member = 0.0;
    double recompute = 0.0;
    double norm_gap = 0.0;
    for (const auto& o : outcomes) {
        rep.samples.push_back(o.record);
        rep.aggregate.total += 1;
        rep.aggregate.successes += o.record.success ? 1 : 0;
        rep.aggregate.max_residual = std::max(rep.aggregate.max_residual, o.record.residual);
        rep.aggregate.fallbacks += o.record.fallback ? 1 : 0;
        if (!o.record.route.empty()) {
            rep.aggregate.routes[o.record.route] += 1;
        }
        member = std::max(member, std::isnan(o.membership) ? 1.0 : o.membership);
        recompute = std::max(recompute, o.recompute);
        norm_gap = std::max(norm_gap, o.norm_gap);
    }
    rep.invariants = invariant_suite(pair, cfg.seed);
    rep.invariants.push_back(detail::check("certificates_in_h", member, 1e-7));
    rep.invariants.push_back(detail::check("residual_recomputable", recompute, 1e-12));
    rep.invariants.push_back(detail::check("reversal_norm_compatible", norm_gap, 1e-9));
    return rep;
}

// Serialization.

using json = nlohmann::ordered_json;

inline json to_json(const VerificationReport& r) {
    json j;
    j["pair"] = r.pair;
    j["params"] = json::object();
    for (const auto& [k, v] : r.params) {
        j["params"][k] = v;
    }
    j["config"] = {{"samples", r.config.samples},
                   {"tol", r.config.tol},
                   {"restarts", r.config.restarts},
                   {"max_iterations", r.config.max_iterations},
                   {"seed", r.config.seed}};
    j["samples"] = json::array();
    for (const auto& s : r.samples) {
        json e = {{"index", s.index}, {"method", s.method}, {"residual", s.residual}, {"success", s.success},
                  {"fallback", s.fallback}};
        if (!s.route.empty()) {
            e["route"] = s.route;
        }
        j["samples"].push_back(std::move(e));
    }
    j["aggregate"] = {{"successes", r.aggregate.successes},
                      {"total", r.aggregate.total},
                      {"max_residual", r.aggregate.max_residual},
                      {"fallbacks", r.aggregate.fallbacks}};
    if (!r.aggregate.routes.empty()) {
        j["aggregate"]["routes"] = json::object();
        for (const auto& [k, v] : r.aggregate.routes) {
            j["aggregate"]["routes"][k] = v;
        }
    }
    j["invariants"] = json::array();
    for (const auto& inv : r.invariants) {
        json e = {{"name", inv.name}, {"pass", inv.pass}, {"value", inv.value}};
        if (!inv.note.empty()) {
            e["note"] = inv.note;
        }
        j["invariants"].push_back(std::move(e));
    }
    j["involution"] = r.involution;
    j["version"] = r.version;
    j["seed"] = r.config.seed;
    return j;
}

inline VerificationReport report_from_json(const json& j) {
    VerificationReport r;
    r.pair = j.at("pair").get<std::string>();
    for (const auto& [k, v] : j.at("params").items()) {
        r.params[k] = v.get<int>();
    }
    const auto& c = j.at("config");
    r.config.samples = c.at("samples").get<std::size_t>();
    r.config.tol = c.at("tol").get<double>();
    r.config.restarts = c.at("restarts").get<std::size_t>();
    r.config.max_iterations = c.at("max_iterations").get<std::size_t>();
    r.config.seed = c.at("seed").get<std::uint64_t>();
    for (const auto& s : j.at("samples")) {
        SampleRecord rec;
        rec.index = s.at("index").get<std::size_t>();
        rec.method = s.at("method").get<std::string>();
        rec.residual = s.at("residual").get<double>();
        rec.success = s.at("success").get<bool>();
        rec.fallback = s.value("fallback", false);
        rec.route = s.value("route", std::string{});
        r.samples.push_back(std::move(rec));
    }
    const auto& a = j.at("aggregate");
    r.aggregate.successes = a.at("successes").get<std::size_t>();
    r.aggregate.total = a.at("total").get<std::size_t>();
    r.aggregate.max_residual = a.at("max_residual").get<double>();
    r.aggregate.fallbacks = a.at("fallbacks").get<std::size_t>();
    if (a.contains("routes")) {
        for (const auto& [k, v] : a.at("routes").items()) {
            r.aggregate.routes[k] = v.get<std::size_t>();
        }
    }
    for (const auto& inv : j.at("invariants")) {
        r.invariants.push_back({inv.at("name").get<std::string>(), inv.at("pass").get<bool>(),
                                inv.at("value").get<double>(), inv.value("note", std::string{})});
    }
    r.involution = j.at("involution").get<std::string>();
    r.version = j.at("version").get<std::string>();
    return r;
}

inline std::string report_json_string(const VerificationReport& r) { return to_json(r).dump(2) + "\n"; }

/// One row per sample: pair, index, method, residual, success.
inline std::string report_csv_string(const VerificationReport& r) {
    std::ostringstream os;
    os.precision(17);
    os << "pair,index,method,residual,success\n";
    for (const auto& s : r.samples) {
        os << r.pair << ',' << s.index << ',' << s.method << ',' << s.residual << ',' << (s.success ? "true" : "false")
           << '\n';
    }
    return os.str();
}

} // namespace wsym
