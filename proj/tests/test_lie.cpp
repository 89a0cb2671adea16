#include <wsym/lie.hpp>

#include <gtest/gtest.h>

#include <random>

using namespace wsym;

namespace {

const cplx I{0.0, 1.0};

LieAlgebraBasis su(std::size_t n) { return {"su(" + std::to_string(n) + ")", n, unitary_generators(n, false)}; }

CMatrix random_unitary(std::size_t n, std::mt19937_64& rng) {
    const LieAlgebraBasis u{"u", n, unitary_generators(n, true)};
    return mat_exp(u.space.random_unit(rng) * cplx{3.0});
}

} // namespace

TEST(Bracket, SelfBracketVanishes) {
    std::mt19937_64 rng(1);
    const auto g = su(4);
    const CMatrix x = g.space.random_unit(rng);
    EXPECT_EQ(bracket(x, x).max_abs(), 0.0);
}

TEST(Bracket, DirectExpansion) {
    const CMatrix h{{I, 0.0}, {0.0, -I}};
    const CMatrix r{{0.0, 1.0}, {-1.0, 0.0}};
    const CMatrix expected{{0.0, 2.0 * I}, {2.0 * I, 0.0}};
    EXPECT_LT(max_abs_diff(bracket(h, r), expected), 1e-15);
}

TEST(Bracket, ShapeMismatchThrows) {
    EXPECT_THROW(bracket(CMatrix(2, 2), CMatrix(3, 3)), DimensionError);
}

TEST(Bracket, JacobiIdentityOnSu4) {
    std::mt19937_64 rng(2);
    const auto g = su(4);
    for (int t = 0; t < 50; ++t) {
        const CMatrix x = g.space.random_unit(rng);
        const CMatrix y = g.space.random_unit(rng);
        const CMatrix z = g.space.random_unit(rng);
        const CMatrix j = bracket(x, bracket(y, z)) + bracket(y, bracket(z, x)) + bracket(z, bracket(x, y));
        EXPECT_LT(j.norm(), 1e-12);
    }
}

TEST(Inner, DiagonalExample) {
    const CMatrix d{{I, 0.0, 0.0}, {0.0, -I, 0.0}, {0.0, 0.0, 0.0}};
    EXPECT_NEAR(inner(d, d), 2.0, 1e-15);
}

TEST(Inner, PositiveOnSo7Basis) {
    const LieAlgebraBasis so7{"so(7)", 7, so_generators(7)};
    ASSERT_EQ(so7.dim(), 21u);
    for (const auto& raw : so_generators(7)) {
        EXPECT_GT(inner(raw, raw), 0.0);
    }
    for (const auto& e : so7.basis()) {
        EXPECT_NEAR(inner(e, e), 1.0, 1e-14);
    }
}

TEST(Inner, AdInvariantOnSu4) {
    std::mt19937_64 rng(3);
    const auto g = su(4);
    for (int t = 0; t < 50; ++t) {
        const CMatrix x = g.space.random_unit(rng);
        const CMatrix y = g.space.random_unit(rng);
        const CMatrix z = g.space.random_unit(rng);
        EXPECT_LT(std::abs(inner(bracket(z, x), y) + inner(x, bracket(z, y))), 1e-12);
    }
}

TEST(Adjoint, IdentityActsTrivially) {
    std::mt19937_64 rng(4);
    const CMatrix x = su(3).space.random_unit(rng);
    EXPECT_LT(max_abs_diff(adjoint_action(CMatrix::identity(3), x), x), 1e-15);
}

TEST(Adjoint, CommutingDiagonal) {
    CMatrix g = CMatrix::identity(4);
    g(0, 0) = I;
    g(1, 1) = -I;
    CMatrix x(4, 4);
    x(0, 0) = 0.3 * I;
    x(2, 2) = -0.3 * I;
    EXPECT_LT(max_abs_diff(adjoint_action(g, x), x), 1e-15);
}

TEST(Adjoint, PreservesNorm) {
    std::mt19937_64 rng(5);
    const auto g = su(5);
    for (int t = 0; t < 20; ++t) {
        const CMatrix u = random_unitary(5, rng);
        const CMatrix x = g.space.random_unit(rng);
        EXPECT_NEAR(adjoint_action(u, x).norm(), x.norm(), 1e-10);
    }
}

TEST(Adjoint, RejectsNonUnitary) {
    CMatrix g = CMatrix::identity(2) * cplx{2.0};
    EXPECT_THROW(adjoint_action(g, CMatrix(2, 2)), DimensionError);
}

TEST(ReductiveSplit, Su2OverDiagonalU1) {
    const auto g = su(2);
    const LieAlgebraBasis h{"u(1)", 2, {CMatrix{{I, 0.0}, {0.0, -I}}}};
    const Subspace q = reductive_split(g, h);
    EXPECT_EQ(q.dim(), 2u);
    EXPECT_LT(invariance_residual(h.space, q), 1e-12);
    // Symmetric pair: [q, q] lies in h.
    for (const auto& x : q.basis()) {
        for (const auto& y : q.basis()) {
            EXPECT_LT(h.space.residual(bracket(x, y)) * bracket(x, y).norm(), 1e-12);
        }
    }
}

TEST(ReductiveSplit, ContainmentFailure) {
    const auto g = LieAlgebraBasis{"so(3)", 3, so_generators(3)};
    const LieAlgebraBasis h{"bad", 3, {unit(3, 0, 0, I) - unit(3, 1, 1, I)}};
    EXPECT_THROW(reductive_split(g, h), ContainmentError);
}

TEST(Centralizer, AbelianAlgebraCentralizesItself) {
    const LieAlgebraBasis t{"t", 3, {unit(3, 0, 0, I) - unit(3, 1, 1, I), unit(3, 1, 1, I) - unit(3, 2, 2, I)}};
    EXPECT_EQ(centralizer(t.space, t).dim(), 2u);
}

TEST(Centralizer, OutputCommutes) {
    const auto g = su(4);
    // a = span of a single diagonal element with a repeated eigenvalue.
    const Subspace a = Subspace::span(4, {unit(4, 0, 0, I) + unit(4, 1, 1, I) - unit(4, 2, 2, I) - unit(4, 3, 3, I)});
    const Subspace c = centralizer(a, g);
    // s(u(2) + u(2)) has dimension 4 + 4 - 1 = 7.
    EXPECT_EQ(c.dim(), 7u);
    for (const auto& x : c.basis()) {
        EXPECT_LE(bracket(x, a[0]).max_abs(), 1e-9);
    }
}

TEST(Realify, ProductsCommute) {
    std::mt19937_64 rng(6);
    const CMatrix a = random_unitary(3, rng);
    const CMatrix b = random_unitary(3, rng);
    EXPECT_LT(max_abs_diff(realify(a * b), realify(a) * realify(b)), 1e-13);
    EXPECT_LT(max_abs_diff(derealify(realify(a)), a), 1e-15);
}

TEST(Seeds, MixIsDeterministicAndSpreads) {
    EXPECT_EQ(mix_seed(42, 3), mix_seed(42, 3));
    EXPECT_NE(mix_seed(42, 3), mix_seed(42, 4));
    EXPECT_NE(mix_seed(42, 3), mix_seed(43, 3));
}
