#pragma once

// Reversal certificates: group elements h in H with Ad(h) d theta(X) = -X.
//
// Constructive reversers all rest on one identity: if g in H moves X into the
// -1 eigenspace E of d theta (X = Ad(g) X', d theta X' = -X') and theta
// preserves H, then k = g theta(g)^{-1} lies in H and reverses X.

#include <wsym/hermitian.hpp>

#include <cmath>
#include <limits>
#include <numbers>
#include <random>
#include <stdexcept>
#include <string>

namespace wsym {

enum class ReversalMethod { symmetric, constructive_II, constructive_III, optimizer };

inline std::string to_string(ReversalMethod m) {
    switch (m) {
    case ReversalMethod::symmetric: return "symmetric";
    case ReversalMethod::constructive_II: return "constructive-II";
    case ReversalMethod::constructive_III: return "constructive-III";
    case ReversalMethod::optimizer: return "optimizer";
    }
    return "?";
}

struct ReversalConfig {
    double tol = 1e-8;
    std::size_t restarts = 20;
    std::size_t max_iterations = 500;
};

struct ReversalCertificate {
    CMatrix h;
    double residual = std::numeric_limits<double>::infinity();
    ReversalMethod method = ReversalMethod::optimizer;
    std::size_t restarts_used = 0;
    std::size_t iterations = 0;
    bool success = false;
    bool fallback = false;        // a constructive path stalled and the optimizer took over
    std::vector<CMatrix> factors; // h = exp(f_m) ... exp(f_1), each f_i in h (optimizer only)
    std::string route;            // family III: where the p-component landed ("a" or "imaginary-p")
};

/// |Ad(h) d theta(X) + X| / |X|.
inline double residual(const SphericalPair& pair, const CMatrix& h, const CMatrix& x) {
    const double nx = x.norm();
    if (nx == 0.0) {
        throw std::invalid_argument("residual: X = 0");
    }
    return (adjoint_action(h, d_theta(pair, x)) + x).norm() / nx;
}

/// theta(g)^{-1} on group elements.
inline CMatrix theta_inverse(const SphericalPair& pair, const CMatrix& g) {
    return pair.involution.apply_group(g.adjoint());
}

/// Lower bound 2|Z|/|X| on the residual of any h fixing z_k pointwise when
/// d theta is the identity; Z is the z_k-component of X.
inline double center_floor(const Subspace& z_k, const CMatrix& x) { return 2.0 * z_k.project(x).norm() / x.norm(); }

/// f(X) = w2^T V w1 for X = [[V, W], [-W^T, 0]] in so(10), W = [w1 w2] the
/// 8x2 block. Invariant under SO(8) x SO(2) (V is skew, so f is alternating
/// in w1, w2), and odd in X.
inline double cayley_invariant(const CMatrix& x) {
    if (x.rows() != 10 || x.cols() != 10) {
        throw std::invalid_argument("cayley_invariant: expects a 10x10 matrix");
    }
    double f = 0.0;
    for (std::size_t i = 0; i < 8; ++i) {
        for (std::size_t j = 0; j < 8; ++j) {
            f += x(i, 9).real() * x(i, j).real() * x(j, 8).real();
        }
    }
    return f;
}

/// Lower bound on the residual of every h in SO(8) x SO(2) under the identity
/// involution: f(Ad(h)X) = f(X) while f(-X) = -f(X), and f is 3/4-Lipschitz
/// on the unit ball of q, so |Ad(h)X + X| >= (8/3)|f(X)| for |X| = 1.
inline double cayley_floor(const CMatrix& x) {
    const double nx = x.norm();
    return (8.0 / 3.0) * std::abs(cayley_invariant(x)) / (nx * nx * nx);
}

/// Residual of h lying in H. Optimizer certificates are checked factor by
/// factor; constructive ones through the pair's closed-form predicate.
inline double membership_residual(const SphericalPair& pair, const ReversalCertificate& cert) {
    const std::size_t n = pair.ambient_size();
    if (!cert.factors.empty()) {
        double worst = 0.0;
        CMatrix prod = CMatrix::identity(n);
        for (const auto& f : cert.factors) {
            worst = std::max(worst, pair.h.space.residual(f));
            prod = mat_exp(f) * prod;
        }
        return std::max(worst, (prod - cert.h).max_abs());
    }
    if ((cert.h - CMatrix::identity(n)).max_abs() == 0.0) {
        return 0.0;
    }
    if (pair.group_membership) {
        return pair.group_membership(cert.h);
    }
    return std::numeric_limits<double>::quiet_NaN();
}

namespace detail {

inline void finish(const SphericalPair& pair, const CMatrix& x, const ReversalConfig& cfg, ReversalCertificate& c) {
    c.residual = residual(pair, c.h, x);
    c.success = c.residual < cfg.tol;
}

inline std::vector<double> flatten(const CMatrix& m, double scale) {
    std::vector<double> v(2 * m.rows() * m.cols());
    for (std::size_t k = 0; k < m.rows() * m.cols(); ++k) {
        v[2 * k] = m.data()[k].real() * scale;
        v[2 * k + 1] = m.data()[k].imag() * scale;
    }
    return v;
}

inline double sq(const std::vector<double>& v) {
    double s = 0.0;
    for (double e : v) {
        s += e * e;
    }
    return s;
}

} // namespace detail

/// Minimizes |Ad(exp(sum t_a E_a) h0) d theta(X) + X|^2 / |X|^2 over exponential
/// coordinates in the h-basis. Restart 0 starts at the identity, later ones at
/// random points; the best certificate found is always returned.
inline ReversalCertificate reverse_generic(const SphericalPair& pair, const CMatrix& x, const ReversalConfig& cfg,
                                           std::uint64_t seed) {
    const std::size_t n = pair.ambient_size();
    const Subspace& hs = pair.h.space;
    const std::size_t d = hs.dim();
    const double nx = x.norm();
    if (nx == 0.0) {
        throw std::invalid_argument("reverse_generic: X = 0");
    }
    const CMatrix target = d_theta(pair, x);
    auto resid = [&](const CMatrix& g) {
        return detail::flatten(g * target * g.adjoint() + x, 1.0 / nx);
    };
    const double goal = 1e-2 * cfg.tol;
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> angle(-std::numbers::pi, std::numbers::pi);

    ReversalCertificate best;
    best.method = ReversalMethod::optimizer;
    best.h = CMatrix::identity(n);
    double best_f = std::numeric_limits<double>::infinity();
    std::size_t total_iters = 0;

    // Chart h = exp(sum t_a E_a) g, recentered after every accepted step, so
    // the Jacobian at t = 0 is exact: column a is [E_a, Ad(g) d theta(X)].
    for (std::size_t restart = 0; restart < std::max<std::size_t>(cfg.restarts, 1); ++restart) {
        std::vector<CMatrix> factors;
        CMatrix base = CMatrix::identity(n);
        if (restart > 0 && d > 0) {
            std::vector<double> t0(d);
            for (auto& v : t0) {
                v = angle(rng);
            }
            factors.push_back(hs.from_coords(t0));
            base = mat_exp(factors.back());
        }
        auto r = resid(base);
        double f = detail::sq(r);
        double lambda = 1e-3;
        std::size_t slow = 0;
        for (std::size_t it = 0; it < cfg.max_iterations && d > 0; ++it) {
            if (std::sqrt(f) < goal) {
                break;
            }
            ++total_iters;
            const CMatrix moved = base * target * base.adjoint();
            RMatrix jac(r.size(), d);
            for (std::size_t a = 0; a < d; ++a) {
                const auto col = detail::flatten(bracket(hs[a], moved), 1.0 / nx);
                for (std::size_t i = 0; i < r.size(); ++i) {
                    jac(i, a) = col[i];
                }
            }
            bool accepted = false;
            while (!accepted && lambda <= 1e8) {
                const auto delta = damped_step(jac, r, lambda);
                // Directional derivative of f along delta: 2 r^T J delta.
                double slope = 0.0;
                for (std::size_t i = 0; i < r.size(); ++i) {
                    double jd = 0.0;
                    for (std::size_t a = 0; a < d; ++a) {
                        jd += jac(i, a) * delta[a];
                    }
                    slope += 2.0 * r[i] * jd;
                }
                if (!(slope < 0)) {
                    lambda *= 10.0;
                    continue;
                }
                double alpha = 1.0;
                for (int bt = 0; bt < 12; ++bt, alpha *= 0.5) {
                    std::vector<double> step(d);
                    for (std::size_t a = 0; a < d; ++a) {
                        step[a] = alpha * delta[a];
                    }
                    const CMatrix factor = hs.from_coords(step);
                    const CMatrix next = mat_exp(factor) * base;
                    auto rn = resid(next);
                    const double fn = detail::sq(rn);
                    if (fn <= f + 1e-4 * alpha * slope) {
                        slow = (f - fn) < 1e-9 * f ? slow + 1 : 0;
                        factors.push_back(factor);
                        base = next;
                        r = std::move(rn);
                        f = fn;
                        accepted = true;
                        break;
                    }
                }
                if (accepted) {
                    lambda = std::max(lambda * 0.1, 1e-12);
                } else {
                    lambda *= 10.0;
                }
            }
            if (!accepted || slow >= 8) {
                break;
            }
        }
        if (f < best_f) {
            best_f = f;
            best.h = base;
            best.factors = factors;
        }
        best.restarts_used = restart + 1;
        if (std::sqrt(best_f) < cfg.tol) {
            break;
        }
    }
    best.iterations = total_iters;
    detail::finish(pair, x, cfg, best);
    return best;
}

/// h = identity; valid when d theta = -Id on q by construction.
inline ReversalCertificate reverse_symmetric(const SphericalPair& pair, const CMatrix& x,
                                             const ReversalConfig& cfg = {}) {
    if (!pair.symmetric_conjugator) {
        throw std::logic_error(pair.id + ": reverse_symmetric needs a symmetric involution");
    }
    ReversalCertificate c;
    c.method = ReversalMethod::symmetric;
    c.h = CMatrix::identity(pair.ambient_size());
    detail::finish(pair, x, cfg, c);
    return c;
}

/// Family II: X = Z + Y with Z in z_k, Y in p. Y = Ad(h) W with h in K_s and
/// W in a, and k = h theta(h)^{-1} reverses X.
inline ReversalCertificate reverse_hermitian(const SphericalPair& pair, const HermitianStructure& hs,
                                             const CMatrix& x, const ReversalConfig& cfg, std::uint64_t seed) {
    if (pair.family != Family::II) {
        throw std::logic_error(pair.id + ": reverse_hermitian needs a family II pair");
    }
    const std::size_t n = pair.ambient_size();
    ReversalCertificate c;
    c.method = ReversalMethod::constructive_II;
    c.h = CMatrix::identity(n);
    const CMatrix y = hs.p.project(x);
    bool stage_ok = true;
    if (y.norm() > 1e-14 * x.norm()) {
        CartanOptions opt;
        opt.restarts = cfg.restarts;
        opt.max_iterations = cfg.max_iterations;
        opt.seed = seed;
        const CartanResult cr = conjugate_to_cartan(hs, y, true, opt);
        c.restarts_used = cr.restarts_used;
        c.iterations = cr.iterations;
        stage_ok = cr.success;
        c.h = cr.k * theta_inverse(pair, cr.k);
    }
    detail::finish(pair, x, cfg, c);
    if (!stage_ok || !c.success) {
        ReversalCertificate g = reverse_generic(pair, x, cfg, seed);
        g.fallback = true;
        return g;
    }
    return c;
}

inline ReversalCertificate reverse_hermitian(const SphericalPair& pair, const CMatrix& x,
                                             const ReversalConfig& cfg = {}, std::uint64_t seed = 0) {
    return reverse_hermitian(pair, hermitian_structure(pair), x, cfg, seed);
}

/// Generators from the normalizer of a in Sp(n), as (2n+1)-dimensional
/// matrices. Indices are 0-based: L[j] swaps coordinates j and j+1 in both
/// halves (j < n-1); L_tilde[j] sends e_j to -e_{n+j}.
struct NormalizerGenerators {
    std::vector<CMatrix> torus;    // Lie algebra: i(E_jj - E_{n+j,n+j})
    std::vector<CMatrix> rotation; // Lie algebra: E_{j,n+j} - E_{n+j,j}; exp(pi/2 .) = L_tilde[j]
    std::vector<CMatrix> L;
    std::vector<CMatrix> L_tilde;
};

inline NormalizerGenerators normalizer_generators(std::size_t n) {
    if (n < 1) {
        throw std::invalid_argument("normalizer_generators: n >= 1 required");
    }
    const std::size_t N = 2 * n + 1;
    const cplx i1{0.0, 1.0};
    NormalizerGenerators g;
    for (std::size_t j = 0; j < n; ++j) {
        g.torus.push_back(unit(N, j, j, i1) - unit(N, n + j, n + j, i1));
        g.rotation.push_back(unit(N, j, n + j) - unit(N, n + j, j));
        // [[I - E_jj, E_jj], [-E_jj, I - E_jj]] on the upper 2n block.
        CMatrix lt = CMatrix::identity(N);
        lt(j, j) = 0.0;
        lt(n + j, n + j) = 0.0;
        lt(j, n + j) = 1.0;
        lt(n + j, j) = -1.0;
        g.L_tilde.push_back(lt);
    }
    for (std::size_t j = 0; j + 1 < n; ++j) {
        // exp(diag(i pi P, -i pi P)) with P the projector onto (e_j - e_{j+1})/sqrt 2.
        CMatrix p(N, N);
        for (std::size_t off : {std::size_t{0}, n}) {
            p(off + j, off + j) = 0.5;
            p(off + j + 1, off + j + 1) = 0.5;
            p(off + j, off + j + 1) = -0.5;
            p(off + j + 1, off + j) = -0.5;
        }
        g.L.push_back(CMatrix::identity(N) - p * cplx{2.0});
    }
    return g;
}

/// i(E_{j,2n} + E_{2n,j}): the imaginary line at coordinate j of p.
inline CMatrix a_line(std::size_t n, std::size_t j) {
    const std::size_t N = 2 * n + 1;
    const cplx i1{0.0, 1.0};
    return unit(N, j, N - 1, i1) + unit(N, N - 1, j, i1);
}

namespace detail {

/// Element of the block-j Sp(1) mapping (v_j, v_{n+j}) to (i r, 0), built as
/// exp(alpha T_j) exp(beta G_j) exp(gamma T_j) from the normalizer generators.
inline CMatrix block_rotation(const NormalizerGenerators& gens, std::size_t j, cplx z1, cplx z2) {
    const double r = std::hypot(std::abs(z1), std::abs(z2));
    const std::size_t N = gens.torus[j].rows();
    if (r == 0.0) {
        return CMatrix::identity(N);
    }
    const cplx i1{0.0, 1.0};
    const cplx a = i1 * std::conj(z1) / r;
    const cplx b = i1 * std::conj(z2) / r;
    const double beta = std::atan2(std::abs(b), std::abs(a));
    const double sum = std::arg(a);
    const double diff = std::arg(b);
    const double alpha = 0.5 * (sum + diff);
    const double gamma = 0.5 * (sum - diff);
    return mat_exp(gens.torus[j] * cplx{alpha}) * mat_exp(gens.rotation[j] * cplx{beta}) *
           mat_exp(gens.torus[j] * cplx{gamma});
}

} // namespace detail

/// Family III: X = V + Z + W (V in q_sub, Z in z_k, W in p).
/// Stage 1 moves V into b by the symmetric pair su(2n)/sp(n). Stage 2 uses the
/// Sp(1)^n centralizing b to make W purely imaginary, and the L_j to reach a
/// when W sits in a single block. Then k = g^{-1} theta(g) with g the total move.
inline ReversalCertificate reverse_family3(const SphericalPair& pair, const HermitianStructure& hs,
                                           const CMatrix& x, const ReversalConfig& cfg, std::uint64_t seed) {
    if (!pair.family3) {
        throw std::logic_error(pair.id + ": reverse_family3 needs a family III pair");
    }
    const Family3Data& f3 = *pair.family3;
    const std::size_t n = f3.n;
    const std::size_t N = 2 * n + 1;
    ReversalCertificate c;
    c.method = ReversalMethod::constructive_III;

    CMatrix g = CMatrix::identity(N);
    bool stage_ok = true;
    const CMatrix v = f3.q_sub.project(x);
    if (f3.q_sub.dim() > 0 && v.norm() > 1e-14 * x.norm()) {
        CartanOptions opt;
        opt.restarts = cfg.restarts;
        opt.max_iterations = cfg.max_iterations;
        opt.seed = seed;
        const CartanResult cr = detail::cartan_reduce(f3.sp.space, f3.q_sub, f3.b, v, opt);
        c.restarts_used = cr.restarts_used;
        c.iterations = cr.iterations;
        stage_ok = cr.success;
        g = cr.k.adjoint();
    }

    const CMatrix w = adjoint_action(g, hs.p.project(x));
    const NormalizerGenerators gens = normalizer_generators(n);
    CMatrix m = CMatrix::identity(N);
    std::vector<double> radius(n);
    for (std::size_t j = 0; j < n; ++j) {
        const cplx z1 = w(j, N - 1);
        const cplx z2 = w(n + j, N - 1);
        radius[j] = std::hypot(std::abs(z1), std::abs(z2));
        m = detail::block_rotation(gens, j, z1, z2) * m;
    }
    const double wn = w.norm();
    std::size_t occupied = 0;
    std::size_t last = 0;
    for (std::size_t j = 0; j < n; ++j) {
        if (radius[j] > 1e-12 * std::max(wn, 1e-300)) {
            ++occupied;
            last = j;
        }
    }
    if (occupied <= 1) {
        for (std::size_t j = last; j-- > 0;) {
            m = gens.L[j] * m;
        }
        c.route = "a";
    } else {
        c.route = "imaginary-p";
    }
    g = m * g;
    c.h = g.adjoint() * pair.involution.apply_group(g);
    detail::finish(pair, x, cfg, c);
    if (!stage_ok || !c.success) {
        ReversalCertificate gcert = reverse_generic(pair, x, cfg, seed);
        gcert.fallback = true;
        gcert.route = c.route;
        return gcert;
    }
    return c;
}

inline ReversalCertificate reverse_family3(const SphericalPair& pair, const CMatrix& x,
                                           const ReversalConfig& cfg = {}, std::uint64_t seed = 0) {
    return reverse_family3(pair, hermitian_structure(pair), x, cfg, seed);
}

struct GridFloor {
    double grid_min = 0.0;
    double lipschitz = 0.0;
    double spacing = 0.0;
    double floor = 0.0; // grid_min - lipschitz * (max distance to the grid)
};

/// Dense scan of the residual over the maximal torus
/// diag(e^{i p}, e^{i q}, e^{-i(p+q)}) of SU(3) with d theta = conjugation.
/// Closed form per off-diagonal entry x_jk: |e^{i psi_jk} conj(x_jk) + x_jk|
/// with psi = (p - q, 2p + q, p + 2q). The residual is sqrt(5)-Lipschitz in
/// (p, q), which turns the grid minimum into a certified floor.
inline GridFloor negative_control_grid(const SphericalPair& pair, const CMatrix& x, double spacing = 1e-3) {
    if (pair.id != "negative-control-su3-torus") {
        throw std::invalid_argument("negative_control_grid: only for the SU(3) torus control");
    }
    const std::array<std::pair<int, int>, 3> idx{{{0, 1}, {0, 2}, {1, 2}}};
    const std::array<std::array<int, 2>, 3> dpsi{{{1, -1}, {2, 1}, {1, 2}}};
    std::array<double, 3> w{};
    std::array<double, 3> phase{};
    double total = 0.0;
    for (std::size_t e = 0; e < 3; ++e) {
        const cplx v = x(idx[e].first, idx[e].second);
        w[e] = std::norm(v);
        phase[e] = 2.0 * std::arg(v);
        total += w[e];
    }
    if (total == 0.0) {
        throw std::invalid_argument("negative_control_grid: X has no off-diagonal part");
    }
    for (auto& v : w) {
        v /= total;
    }
    const double two_pi = 2.0 * std::numbers::pi;
    const std::size_t steps = std::size_t(std::ceil(two_pi / spacing));
    const double h = two_pi / double(steps);
    double best = std::numeric_limits<double>::infinity();
    for (std::size_t a = 0; a < steps; ++a) {
        const double p = h * double(a);
        for (std::size_t b = 0; b < steps; ++b) {
            const double q = h * double(b);
            double s = 0.0;
            for (std::size_t e = 0; e < 3; ++e) {
                const double psi = dpsi[e][0] * p + dpsi[e][1] * q;
                // |e^{i psi} conj(x) + x|^2 = 2|x|^2 (1 + cos(psi - 2 arg x)).
                s += w[e] * 2.0 * (1.0 + std::cos(psi - phase[e]));
            }
            best = std::min(best, s);
        }
    }
    GridFloor gf;
    gf.grid_min = std::sqrt(std::max(best, 0.0));
    gf.lipschitz = std::sqrt(5.0);
    gf.spacing = h;
    gf.floor = gf.grid_min - gf.lipschitz * h / std::sqrt(2.0);
    return gf;
}

/// Ad(h) on the torus point (p, q), for cross-checking the closed form.
inline CMatrix torus_element(double p, double q) {
    CMatrix t(3, 3);
    t(0, 0) = std::polar(1.0, p);
    t(1, 1) = std::polar(1.0, q);
    t(2, 2) = std::polar(1.0, -(p + q));
    return t;
}

} // namespace wsym
