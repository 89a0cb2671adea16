#pragma once

// Matrix Lie algebras of compact type: brackets, the trace form, adjoint
// action, orthonormal subspaces, reductive complements and centralizers.

#include <wsym/numerics.hpp>

#include <cstdint>
#include <random>
#include <span>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace wsym {

class ContainmentError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

inline void require_same_size(const CMatrix& x, const CMatrix& y, const char* what) {
    if (x.rows() != y.rows() || x.cols() != y.cols() || !x.is_square()) {
        throw DimensionError(std::string(what) + ": operands must be square matrices of the same size");
    }
}

inline CMatrix bracket(const CMatrix& x, const CMatrix& y) {
    require_same_size(x, y, "bracket");
    return x * y - y * x;
}

/// Invariant form -Re tr(XY). Equals the Frobenius inner product on
/// skew-Hermitian matrices.
inline double inner(const CMatrix& x, const CMatrix& y) {
    require_same_size(x, y, "inner");
    const std::size_t n = x.rows();
    double s = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t k = 0; k < n; ++k) {
            s += (x(i, k) * y(k, i)).real();
        }
    }
    return -s;
}

/// g X g^{-1}. For unitary g the inverse is taken as the adjoint; anything
/// else is rejected.
inline CMatrix adjoint_action(const CMatrix& g, const CMatrix& x) {
    require_same_size(g, x, "adjoint");
    const CMatrix gstar = g.adjoint();
    const double defect = (g * gstar - CMatrix::identity(g.rows())).max_abs();
    if (defect > 1e-8) {
        throw DimensionError("adjoint: group element is not unitary (defect " + std::to_string(defect) + ")");
    }
    return g * x * gstar;
}

/// Orthonormal (under the trace form) list of matrices of one ambient size.
class Subspace {
public:
    Subspace() = default;
    explicit Subspace(std::size_t ambient) : ambient_(ambient) {}

    /// Orthonormalizes `vectors`, dropping dependent ones.
    static Subspace span(std::size_t ambient, const std::vector<CMatrix>& vectors) {
        for (const auto& v : vectors) {
            if (v.rows() != ambient || v.cols() != ambient) {
                throw DimensionError("Subspace::span: vector of wrong ambient size");
            }
        }
        Subspace s(ambient);
        s.basis_ = orthonormalize(vectors, [](const CMatrix& a, const CMatrix& b) { return inner(a, b); });
        return s;
    }

    std::size_t dim() const noexcept { return basis_.size(); }
    std::size_t ambient_size() const noexcept { return ambient_; }
    const std::vector<CMatrix>& basis() const noexcept { return basis_; }
    const CMatrix& operator[](std::size_t k) const { return basis_[k]; }

    std::vector<double> coords(const CMatrix& x) const {
        std::vector<double> c(basis_.size());
        for (std::size_t a = 0; a < basis_.size(); ++a) {
            c[a] = inner(basis_[a], x);
        }
        return c;
    }
    CMatrix from_coords(std::span<const double> c) const {
        if (c.size() != basis_.size()) {
            throw DimensionError("Subspace::from_coords: coordinate count mismatch");
        }
        CMatrix x(ambient_, ambient_);
        for (std::size_t a = 0; a < basis_.size(); ++a) {
            x += basis_[a] * cplx{c[a]};
        }
        return x;
    }
    CMatrix project(const CMatrix& x) const { return from_coords(coords(x)); }

    /// |x - P x| / |x| (absolute when x vanishes).
    double residual(const CMatrix& x) const {
        const double nx = x.norm();
        const double r = (x - project(x)).norm();
        return nx > 0 ? r / nx : r;
    }
    /// Largest residual of `other`'s basis against this subspace.
    double containment_residual(const Subspace& other) const {
        double worst = 0.0;
        for (const auto& e : other.basis()) {
            worst = std::max(worst, residual(e));
        }
        return worst;
    }
    bool contains(const Subspace& other, double tol = 1e-9) const { return containment_residual(other) <= tol; }

    /// Orthogonal complement of `sub` inside this subspace.
    Subspace complement(const Subspace& sub) const {
        std::vector<CMatrix> rest;
        rest.reserve(basis_.size());
        for (const auto& e : basis_) {
            rest.push_back(e - sub.project(e));
        }
        Subspace out(ambient_);
        out.basis_ = orthonormalize(rest, [](const CMatrix& a, const CMatrix& b) { return inner(a, b); }, 1e-8);
        return out;
    }

    /// Gaussian combination of the basis normalized to unit length.
    template <typename Rng>
    CMatrix random_unit(Rng& rng) const {
        std::normal_distribution<double> gauss(0.0, 1.0);
        std::vector<double> c(basis_.size());
        for (auto& v : c) {
            v = gauss(rng);
        }
        CMatrix x = from_coords(c);
        const double n = x.norm();
        return n > 0 ? x * cplx{1.0 / n} : x;
    }

private:
    std::size_t ambient_ = 0;
    std::vector<CMatrix> basis_;
};

/// Named compact matrix Lie algebra.
struct LieAlgebraBasis {
    std::string name;
    Subspace space;

    LieAlgebraBasis() = default;
    LieAlgebraBasis(std::string n, std::size_t ambient, const std::vector<CMatrix>& generators)
        : name(std::move(n)), space(Subspace::span(ambient, generators)) {}
    LieAlgebraBasis(std::string n, Subspace s) : name(std::move(n)), space(std::move(s)) {}

    std::size_t dim() const noexcept { return space.dim(); }
    std::size_t ambient_size() const noexcept { return space.ambient_size(); }
    const std::vector<CMatrix>& basis() const noexcept { return space.basis(); }
};

/// Largest relative residual of [E_a, E_b] against the span.
inline double closure_residual(const Subspace& s) {
    double worst = 0.0;
    const auto& b = s.basis();
    for (std::size_t i = 0; i < b.size(); ++i) {
        for (std::size_t j = i + 1; j < b.size(); ++j) {
            const CMatrix c = bracket(b[i], b[j]);
            // Relative to |E_a||E_b| = 1.
            worst = std::max(worst, (c - s.project(c)).norm());
        }
    }
    return worst;
}

/// Largest deviation from skew-Hermitian among basis elements.
inline double skew_residual(const Subspace& s) {
    double worst = 0.0;
    for (const auto& e : s.basis()) {
        worst = std::max(worst, (e + e.adjoint()).max_abs());
    }
    return worst;
}

/// q = orthogonal complement of h in g.
inline Subspace reductive_split(const LieAlgebraBasis& g, const LieAlgebraBasis& h, double tol = 1e-9) {
    if (g.ambient_size() != h.ambient_size()) {
        throw DimensionError("reductive_split: ambient sizes differ");
    }
    const double c = g.space.containment_residual(h.space);
    if (c > tol) {
        throw ContainmentError("reductive_split: " + h.name + " not contained in " + g.name +
                               " (residual " + std::to_string(c) + ")");
    }
    Subspace q = g.space.complement(h.space);
    if (q.dim() + h.dim() != g.dim()) {
        throw ContainmentError("reductive_split: dimension defect");
    }
    return q;
}

/// Largest |P_h [E_h, E_q]| over basis pairs: zero iff [h, q] lies in q.
inline double invariance_residual(const Subspace& h, const Subspace& q) {
    double worst = 0.0;
    for (const auto& x : h.basis()) {
        for (const auto& y : q.basis()) {
            worst = std::max(worst, h.project(bracket(x, y)).norm());
        }
    }
    return worst;
}

/// Real linear map from coordinates to a stacked real vector of complex
/// matrix entries: column a is realify(f(E_a)).
template <typename F>
RMatrix realified_system(const Subspace& domain, std::size_t blocks, F f) {
    const std::size_t n = domain.ambient_size();
    const std::size_t rows_per = 2 * n * n;
    RMatrix m(rows_per * blocks, domain.dim());
    for (std::size_t a = 0; a < domain.dim(); ++a) {
        for (std::size_t b = 0; b < blocks; ++b) {
            const CMatrix v = f(domain[a], b);
            for (std::size_t k = 0; k < n * n; ++k) {
                m(b * rows_per + 2 * k, a) = v.data()[k].real();
                m(b * rows_per + 2 * k + 1, a) = v.data()[k].imag();
            }
        }
    }
    return m;
}

/// Elements of `k` commuting with every basis element of `a`.
inline Subspace centralizer(const Subspace& a, const Subspace& k, double tol = kRankTol) {
    if (k.dim() == 0) {
        return Subspace(k.ambient_size());
    }
    if (a.dim() == 0) {
        return k;
    }
    const RMatrix sys =
        realified_system(k, a.dim(), [&](const CMatrix& e, std::size_t b) { return bracket(e, a[b]); });
    std::vector<CMatrix> out;
    for (const auto& v : nullspace(sys, tol)) {
        out.push_back(k.from_coords(v));
    }
    return Subspace::span(k.ambient_size(), out);
}

inline Subspace centralizer(const Subspace& a, const LieAlgebraBasis& k, double tol = kRankTol) {
    return centralizer(a, k.space, tol);
}

/// True iff span{Ad(exp xi_i) A} over random xi_i in `group` and A in the
/// a-basis has the dimension of p.
template <typename Rng>
bool ad_span_test(const Subspace& group, const Subspace& a, const Subspace& p, std::size_t samples, Rng& rng) {
    if (p.dim() == 0) {
        return true;
    }
    if (samples < p.dim()) {
        throw std::invalid_argument("ad_span_test: samples must be at least dim p");
    }
    std::normal_distribution<double> gauss(0.0, 1.0);
    std::vector<std::vector<double>> cols;
    for (std::size_t s = 0; s < samples; ++s) {
        CMatrix g = CMatrix::identity(p.ambient_size());
        if (group.dim() > 0) {
            std::vector<double> c(group.dim());
            for (auto& v : c) {
                v = 2.0 * gauss(rng);
            }
            g = mat_exp(group.from_coords(c));
        }
        for (const auto& e : a.basis()) {
            cols.push_back(p.coords(adjoint_action(g, e)));
        }
    }
    if (cols.empty()) {
        return false;
    }
    RMatrix m(p.dim(), cols.size());
    for (std::size_t j = 0; j < cols.size(); ++j) {
        for (std::size_t i = 0; i < p.dim(); ++i) {
            m(i, j) = cols[j][i];
        }
    }
    return rank(m.transpose(), 1e-8) == p.dim();
}

/// Matrix of ad(x) restricted to an invariant subspace, in its coordinates.
inline RMatrix restricted_ad(const CMatrix& x, const Subspace& q) {
    RMatrix m(q.dim(), q.dim());
    for (std::size_t b = 0; b < q.dim(); ++b) {
        const auto c = q.coords(bracket(x, q[b]));
        for (std::size_t a = 0; a < q.dim(); ++a) {
            m(a, b) = c[a];
        }
    }
    return m;
}

// Standard matrix units and common algebras.

inline CMatrix unit(std::size_t n, std::size_t i, std::size_t j, cplx v = 1.0) {
    CMatrix m(n, n);
    m(i, j) = v;
    return m;
}

/// so(n) spanned by E_ij - E_ji.
inline std::vector<CMatrix> so_generators(std::size_t n) {
    std::vector<CMatrix> out;
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = i + 1; j < n; ++j) {
            out.push_back(unit(n, i, j) - unit(n, j, i));
        }
    }
    return out;
}

/// u(n) (include_trace) or su(n), embedded at `offset` in an ambient of size `ambient`.
inline std::vector<CMatrix> unitary_generators(std::size_t n, bool include_trace, std::size_t ambient = 0,
                                               std::size_t offset = 0) {
    if (ambient == 0) {
        ambient = n;
    }
    const cplx i1{0.0, 1.0};
    std::vector<CMatrix> out;
    for (std::size_t a = 0; a < n; ++a) {
        for (std::size_t b = a + 1; b < n; ++b) {
            out.push_back(unit(ambient, offset + a, offset + b) - unit(ambient, offset + b, offset + a));
            out.push_back(unit(ambient, offset + a, offset + b, i1) + unit(ambient, offset + b, offset + a, i1));
        }
    }
    for (std::size_t a = 0; a + 1 < n; ++a) {
        out.push_back(unit(ambient, offset + a, offset + a, i1) - unit(ambient, offset + a + 1, offset + a + 1, i1));
    }
    if (include_trace && n > 0) {
        CMatrix t(ambient, ambient);
        for (std::size_t a = 0; a < n; ++a) {
            t(offset + a, offset + a) = i1;
        }
        out.push_back(t);
    }
    return out;
}

/// Places a square block into a larger zero matrix.
inline CMatrix embed(const CMatrix& block, std::size_t ambient, std::size_t offset) {
    CMatrix m(ambient, ambient);
    for (std::size_t i = 0; i < block.rows(); ++i) {
        for (std::size_t j = 0; j < block.cols(); ++j) {
            m(offset + i, offset + j) = block(i, j);
        }
    }
    return m;
}

inline std::vector<CMatrix> embed_all(const std::vector<CMatrix>& blocks, std::size_t ambient, std::size_t offset) {
    std::vector<CMatrix> out;
    out.reserve(blocks.size());
    for (const auto& b : blocks) {
        out.push_back(embed(b, ambient, offset));
    }
    return out;
}

/// Realification of an n x n complex matrix into 2n x 2n with interleaved
/// coordinates: entry a + ib becomes the block [[a, -b], [b, a]].
inline CMatrix realify(const CMatrix& m) {
    CMatrix r(2 * m.rows(), 2 * m.cols());
    for (std::size_t i = 0; i < m.rows(); ++i) {
        for (std::size_t j = 0; j < m.cols(); ++j) {
            const double a = m(i, j).real();
            const double b = m(i, j).imag();
            r(2 * i, 2 * j) = a;
            r(2 * i, 2 * j + 1) = -b;
            r(2 * i + 1, 2 * j) = b;
            r(2 * i + 1, 2 * j + 1) = a;
        }
    }
    return r;
}

/// Inverse of realify for complex-linear real matrices (no check).
inline CMatrix derealify(const CMatrix& r) {
    CMatrix m(r.rows() / 2, r.cols() / 2);
    for (std::size_t i = 0; i < m.rows(); ++i) {
        for (std::size_t j = 0; j < m.cols(); ++j) {
            m(i, j) = cplx{r(2 * i, 2 * j).real(), r(2 * i + 1, 2 * j).real()};
        }
    }
    return m;
}

/// Per-sample seed derived from the run seed and the sample index.
inline std::uint64_t mix_seed(std::uint64_t seed, std::uint64_t index) {
    // splitmix64 finalizer over the pair.
    std::uint64_t z = seed + 0x9e3779b97f4a7c15ULL * (index + 1);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

} // namespace wsym
