#pragma once

// Hermitian symmetric structure G/K underlying families II and III: the
// complex-structure generator Z^J, its component Z' centralizing a, the tube
// type test, conjugation of p into a, and the factorization K = K_s S'.

#include <wsym/catalog.hpp>

#include <cmath>
#include <numbers>
#include <random>
#include <stdexcept>

namespace wsym {

class StructuralError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

struct HermitianStructure {
    LieAlgebraBasis k;
    LieAlgebraBasis k_s;
    Subspace z_k;
    Subspace p;
    Subspace a;
    CMatrix ZJ;
    CMatrix Zprime;
    Subspace centralizer_a; // centralizer of a in k
    CMatrix cartan_conjugator;
    std::function<cplx(const CMatrix&)> central_character;
    std::function<double(const CMatrix&)> ks_membership;
};

namespace detail {

inline const HermitianData& require_hermitian(const SphericalPair& pair) {
    if (!pair.hermitian) {
        throw StructuralError(pair.id + " carries no hermitian data");
    }
    return *pair.hermitian;
}

} // namespace detail

/// Generator of z_k scaled so that ad(Z^J)^2 = -Id on p. Sign: positive
/// inner product with the model's orientation element.
inline CMatrix complex_structure_generator(const SphericalPair& pair) {
    const HermitianData& hd = detail::require_hermitian(pair);
    if (hd.z_k.dim() != 1) {
        throw StructuralError(pair.id + ": center of k is " + std::to_string(hd.z_k.dim()) + "-dimensional");
    }
    const CMatrix z = hd.z_k[0];
    const RMatrix m = restricted_ad(z, hd.p);
    const RMatrix m2 = m * m;
    const std::size_t d = hd.p.dim();
    double tr = 0.0;
    for (std::size_t i = 0; i < d; ++i) {
        tr += m2(i, i);
    }
    const double c2 = -tr / double(d);
    if (!(c2 > 0) || (m2 + RMatrix::identity(d) * c2).max_abs() > 1e-9 * c2) {
        throw StructuralError(pair.id + ": ad(z)^2 on p is not a negative multiple of the identity");
    }
    CMatrix zj = z * cplx{1.0 / std::sqrt(c2)};
    if (inner(zj, hd.center_orientation) < 0) {
        zj = zj * cplx{-1.0};
    }
    return zj;
}

/// Orthogonal projection of Z^J onto the centralizer of a in k.
inline CMatrix z_prime(const SphericalPair& pair, const CMatrix& zj) {
    const HermitianData& hd = detail::require_hermitian(pair);
    return centralizer(hd.a, hd.k).project(zj);
}

inline HermitianStructure hermitian_structure(const SphericalPair& pair) {
    const HermitianData& hd = detail::require_hermitian(pair);
    HermitianStructure s;
    s.k = hd.k;
    s.k_s = hd.k_s;
    s.z_k = hd.z_k;
    s.p = hd.p;
    s.a = hd.a;
    s.ZJ = complex_structure_generator(pair);
    s.centralizer_a = centralizer(hd.a, hd.k);
    s.Zprime = s.centralizer_a.project(s.ZJ);
    s.cartan_conjugator = hd.cartan_conjugator;
    s.central_character = hd.central_character;
    s.ks_membership = hd.ks_membership;
    return s;
}

struct TubeTypeVerdict {
    bool nontube = false;     // Z' != 0
    bool span_criterion = false;
    double zprime_norm = 0.0;
};

/// Nontube iff Z' != 0, cross-checked against span Ad(K_s)a = p. The two
/// must agree; disagreement means the embedding is wrong.
inline TubeTypeVerdict tube_type_check(const SphericalPair& pair, std::uint64_t seed = 7) {
    const HermitianStructure s = hermitian_structure(pair);
    TubeTypeVerdict v;
    v.zprime_norm = s.Zprime.norm();
    v.nontube = v.zprime_norm > 1e-6 * s.ZJ.norm();
    std::mt19937_64 rng(seed);
    v.span_criterion = ad_span_test(s.k_s.space, s.a, s.p, 2 * s.p.dim() + 4, rng);
    if (v.nontube != v.span_criterion) {
        throw StructuralError(pair.id + ": Z' criterion and Ad(K_s)a span test disagree");
    }
    return v;
}

struct CartanOptions {
    std::size_t restarts = 20;
    std::size_t max_iterations = 500;
    double tol = 1e-10;
    std::uint64_t seed = 0x2545f491;
};

/// Ad(k) w = y with w in the Cartan subspace.
struct CartanResult {
    CMatrix k;
    CMatrix w;
    double residual = 0.0;
    bool success = false;
    std::size_t restarts_used = 0;
    std::size_t iterations = 0;
};

namespace detail {

/// Regular element sum_j c_j a_j with distinct, nonzero, non-summing weights.
inline CMatrix regular_element(const Subspace& a) {
    CMatrix r(a.ambient_size(), a.ambient_size());
    for (std::size_t j = 0; j < a.dim(); ++j) {
        r += a[j] * cplx{std::pow(double(j + 1), 1.5)};
    }
    return r;
}

inline double off_cartan(const Subspace& a, const CMatrix& y) { return (y - a.project(y)).norm(); }

/// Gauss-Newton on the component of Ad(g)y orthogonal to a, with g moving
/// in exp(group) g. Returns the refined g.
inline CMatrix cartan_polish(const Subspace& group, const Subspace& p, const Subspace& a, const CMatrix& y, CMatrix g,
                             std::size_t& iterations) {
    for (int it = 0; it < 30; ++it) {
        const CMatrix yg = adjoint_action(g, y);
        const CMatrix off = yg - a.project(yg);
        const double f = off.norm();
        if (f <= 1e-15 * std::max(1.0, y.norm())) {
            break;
        }
        const auto r = p.coords(off);
        RMatrix jac(p.dim(), group.dim());
        for (std::size_t b = 0; b < group.dim(); ++b) {
            const CMatrix col = bracket(group[b], yg);
            const auto c = p.coords(col - a.project(col));
            for (std::size_t i = 0; i < p.dim(); ++i) {
                jac(i, b) = c[i];
            }
        }
        const auto step = damped_step(jac, r, 1e-12);
        const CMatrix g_new = mat_exp(group.from_coords(step)) * g;
        ++iterations;
        if (off_cartan(a, adjoint_action(g_new, y)) >= f) {
            break;
        }
        g = g_new;
    }
    return g;
}

/// Finds g in exp(group) with Ad(g) y in a, by Riemannian ascent of
/// <Ad(g) y, R> for a regular R in a, then a Gauss-Newton polish.
inline CartanResult cartan_reduce(const Subspace& group, const Subspace& p, const Subspace& a, const CMatrix& y,
                                  const CartanOptions& opt) {
    const std::size_t n = y.rows();
    CartanResult out;
    out.k = CMatrix::identity(n);
    const double ny = y.norm();
    if (ny == 0.0 || a.residual(y) <= 1e-14) {
        out.w = a.project(y);
        out.residual = ny == 0.0 ? 0.0 : (out.w - y).norm() / ny;
        out.success = true;
        return out;
    }
    const CMatrix rr = regular_element(a);
    const double nr = rr.norm();
    std::mt19937_64 rng(opt.seed);

    double best = std::numeric_limits<double>::infinity();
    CMatrix best_g = out.k;
    for (std::size_t restart = 0; restart < std::max<std::size_t>(opt.restarts, 1); ++restart) {
        CMatrix g = CMatrix::identity(n);
        if (restart > 0 && group.dim() > 0) {
            g = mat_exp(group.random_unit(rng) * cplx{3.0});
        }
        double step = 1.0 / (ny * nr);
        for (std::size_t it = 0; it < opt.max_iterations; ++it) {
            const CMatrix yg = adjoint_action(g, y);
            if (off_cartan(a, yg) <= 1e-4 * ny) {
                break;
            }
            const CMatrix grad = group.project(bracket(yg, rr));
            const double g2 = inner(grad, grad);
            if (g2 <= 1e-24 * ny * ny * nr * nr) {
                break;
            }
            const double f = inner(yg, rr);
            bool accepted = false;
            for (int bt = 0; bt < 40; ++bt) {
                const CMatrix cand = mat_exp(grad * cplx{step}) * g;
                if (inner(adjoint_action(cand, y), rr) >= f + 1e-4 * step * g2) {
                    g = cand;
                    accepted = true;
                    break;
                }
                step *= 0.5;
            }
            ++out.iterations;
            if (!accepted) {
                break;
            }
            step *= 2.0;
        }
        g = cartan_polish(group, p, a, y, g, out.iterations);
        const double off = off_cartan(a, adjoint_action(g, y)) / ny;
        out.restarts_used = restart + 1;
        if (off < best) {
            best = off;
            best_g = g;
        }
        if (best <= opt.tol) {
            break;
        }
    }
    out.k = best_g.adjoint();
    out.w = a.project(adjoint_action(best_g, y));
    out.residual = (adjoint_action(out.k, out.w) - y).norm() / ny;
    out.success = out.residual <= opt.tol;
    return out;
}

} // namespace detail

struct KsFactorization {
    CMatrix k_s;
    CMatrix s;   // exp(t Z')
    double t = 0.0;
};

/// k = k_s * exp(t Z') with k_s in K_s, solving the central-character
/// equation chi(k exp(-t Z')) = 1.
inline KsFactorization project_to_ks(const HermitianStructure& hs, const CMatrix& k) {
    const double zn = hs.Zprime.norm();
    if (zn <= 1e-6 * hs.ZJ.norm()) {
        throw StructuralError("project_to_ks: Z' vanishes (tube type), factorization unavailable");
    }
    // chi(exp(t Z')) = exp(i c t); read c off a short step.
    const double delta = 1e-3;
    const double c = std::arg(hs.central_character(mat_exp(hs.Zprime * cplx{delta}))) / delta;
    if (std::abs(c) < 1e-12) {
        throw StructuralError("project_to_ks: central character is trivial on S'");
    }
    KsFactorization f;
    f.t = std::arg(hs.central_character(k)) / c;
    f.s = mat_exp(hs.Zprime * cplx{f.t});
    f.k_s = k * mat_exp(hs.Zprime * cplx{-f.t});
    return f;
}

/// Finds k and W in a with Ad(k) W = Y. With use_ks_only, k is moved into
/// K_s via K = K_s S' (S' centralizes a); this needs Z' != 0.
inline CartanResult conjugate_to_cartan(const HermitianStructure& hs, const CMatrix& y, bool use_ks_only,
                                        const CartanOptions& opt = {}) {
    if (hs.p.residual(y) > 1e-9) {
        throw std::invalid_argument("conjugate_to_cartan: Y is not in p");
    }
    CartanResult r = detail::cartan_reduce(hs.k.space, hs.p, hs.a, y, opt);
    if (use_ks_only) {
        r.k = project_to_ks(hs, r.k).k_s;
        const double ny = y.norm();
        r.residual = ny == 0.0 ? 0.0 : (adjoint_action(r.k, r.w) - y).norm() / ny;
        r.success = r.residual <= opt.tol && hs.ks_membership(r.k) <= 1e-9;
    }
    return r;
}

/// Closed form for the SU(n+m) block model: Y = [[0, C], [-C^*, 0]] with
/// C = U S V^* gives k = diag(-iU, V) in S(U(n) x U(m)) and W = i S embedded
/// in a; phases are then adjusted so both blocks have determinant 1.
inline CartanResult cartan_by_svd(const SphericalPair& pair, const CMatrix& y) {
    if (pair.id != "II-su") {
        throw std::invalid_argument("cartan_by_svd: only the SU(n+m) block model has a closed form");
    }
    const std::size_t n = std::size_t(pair.params.at("n"));
    const std::size_t m = std::size_t(pair.params.at("m"));
    if (n <= m) {
        throw std::invalid_argument("cartan_by_svd: needs n > m for the determinant fix");
    }
    const std::size_t big = n + m;
    const CMatrix c = detail::block(y, 0, n, n, m);
    const auto eig = hermitian_eig(c.adjoint() * c); // ascending
    CMatrix v(m, m);
    std::vector<double> sigma(m);
    for (std::size_t j = 0; j < m; ++j) {
        const std::size_t src = m - 1 - j;
        sigma[j] = std::sqrt(std::max(eig.values[src], 0.0));
        for (std::size_t i = 0; i < m; ++i) {
            v(i, j) = eig.vectors(i, src);
        }
    }
    // Left singular vectors, completed to a unitary basis of C^n.
    std::vector<CMatrix> cols;
    for (std::size_t j = 0; j < m; ++j) {
        CMatrix vj(m, 1);
        for (std::size_t i = 0; i < m; ++i) {
            vj(i, 0) = v(i, j);
        }
        cols.push_back(sigma[j] > 1e-12 ? (c * vj) * cplx{1.0 / sigma[j]} : CMatrix(n, 1));
    }
    for (std::size_t i = 0; i < n; ++i) {
        CMatrix e(n, 1);
        e(i, 0) = 1.0;
        cols.push_back(e);
    }
    auto cinner = [](const CMatrix& x, const CMatrix& z) { return (x.adjoint() * z)(0, 0); };
    std::vector<CMatrix> basis;
    for (const auto& col : cols) {
        CMatrix w = col;
        for (int pass = 0; pass < 2; ++pass) {
            for (const auto& e : basis) {
                w -= e * cinner(e, w);
            }
        }
        const double nw = w.norm();
        if (nw > 1e-8 && basis.size() < n) {
            basis.push_back(w * cplx{1.0 / nw});
        }
    }
    CMatrix u(n, n);
    for (std::size_t j = 0; j < n; ++j) {
        for (std::size_t i = 0; i < n; ++i) {
            u(i, j) = basis[j](i, 0);
        }
    }
    CMatrix a_blk = u * cplx{0.0, -1.0};
    CMatrix b_blk = v;
    // Same phase on column 0 of both blocks leaves A (iS) B^* unchanged.
    const cplx phase_b = std::exp(cplx{0.0, -std::arg(detail::det(b_blk))});
    for (std::size_t i = 0; i < n; ++i) {
        a_blk(i, 0) *= phase_b;
    }
    for (std::size_t i = 0; i < m; ++i) {
        b_blk(i, 0) *= phase_b;
    }
    // Column n-1 of A is free when n > m.
    const cplx phase_a = std::exp(cplx{0.0, -std::arg(detail::det(a_blk))});
    for (std::size_t i = 0; i < n; ++i) {
        a_blk(i, n - 1) *= phase_a;
    }
    CartanResult r;
    r.k = CMatrix(big, big);
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = 0; j < n; ++j) {
            r.k(i, j) = a_blk(i, j);
        }
    }
    for (std::size_t i = 0; i < m; ++i) {
        for (std::size_t j = 0; j < m; ++j) {
            r.k(n + i, n + j) = b_blk(i, j);
        }
    }
    r.w = CMatrix(big, big);
    for (std::size_t j = 0; j < m; ++j) {
        r.w(j, n + j) = cplx{0.0, sigma[j]};
        r.w(n + j, j) = cplx{0.0, sigma[j]};
    }
    const double ny = y.norm();
    r.residual = ny == 0.0 ? 0.0 : (adjoint_action(r.k, r.w) - y).norm() / ny;
    r.success = r.residual <= 1e-10;
    r.restarts_used = 0;
    return r;
}

} // namespace wsym
