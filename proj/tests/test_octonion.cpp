#include <wsym/octonion.hpp>

#include <gtest/gtest.h>

#include <random>

using namespace wsym;

namespace {

Octonion random_octonion(std::mt19937_64& rng, bool imaginary = false) {
    std::normal_distribution<double> g(0.0, 1.0);
    Octonion o;
    for (std::size_t k = imaginary ? 1 : 0; k < 8; ++k) {
        o.c[k] = g(rng);
    }
    return o;
}

double dist(const Octonion& a, const Octonion& b) { return (a - b).norm(); }

} // namespace

TEST(Octonion, UnitIsNeutral) {
    std::mt19937_64 rng(1);
    const Octonion x = random_octonion(rng);
    EXPECT_EQ(dist(oct_mul(Octonion::unit(0), x), x), 0.0);
    EXPECT_EQ(dist(oct_mul(x, Octonion::unit(0)), x), 0.0);
}

TEST(Octonion, ImaginaryUnitsSquareToMinusOne) {
    for (std::size_t i = 1; i <= 7; ++i) {
        EXPECT_EQ(dist(oct_mul(Octonion::unit(i), Octonion::unit(i)), -1.0 * Octonion::unit(0)), 0.0) << i;
    }
}

TEST(Octonion, CyclicConvention) {
    for (std::size_t i = 1; i <= 7; ++i) {
        const std::size_t j = i % 7 + 1;
        const std::size_t k = (i + 2) % 7 + 1;
        EXPECT_EQ(dist(oct_mul(Octonion::unit(i), Octonion::unit(j)), Octonion::unit(k)), 0.0) << i;
    }
}

TEST(Octonion, NormMultiplicative) {
    std::mt19937_64 rng(2);
    for (int t = 0; t < 200; ++t) {
        const Octonion x = random_octonion(rng);
        const Octonion y = random_octonion(rng);
        EXPECT_LT(std::abs(oct_mul(x, y).norm() - x.norm() * y.norm()), 1e-12 * x.norm() * y.norm());
    }
}

TEST(Octonion, Alternative) {
    std::mt19937_64 rng(3);
    for (int t = 0; t < 200; ++t) {
        const Octonion x = random_octonion(rng);
        const Octonion y = random_octonion(rng);
        EXPECT_LT(dist(oct_mul(x, oct_mul(x, y)), oct_mul(oct_mul(x, x), y)), 1e-12 * x.norm() * x.norm() * y.norm());
        EXPECT_LT(dist(oct_mul(oct_mul(y, x), x), oct_mul(y, oct_mul(x, x))), 1e-12 * x.norm() * x.norm() * y.norm());
    }
}

TEST(Octonion, NotAssociative) {
    const Octonion a = oct_mul(oct_mul(Octonion::unit(1), Octonion::unit(2)), Octonion::unit(3));
    const Octonion b = oct_mul(Octonion::unit(1), oct_mul(Octonion::unit(2), Octonion::unit(3)));
    EXPECT_GT(dist(a, b), 1.0);
}

TEST(LeftMult, MapsUnitToGenerator) {
    const auto l = left_mult_operators();
    ASSERT_EQ(l.size(), 7u);
    for (std::size_t i = 0; i < 7; ++i) {
        for (std::size_t k = 0; k < 8; ++k) {
            EXPECT_EQ(l[i](k, 0), k == i + 1 ? 1.0 : 0.0);
        }
    }
}

TEST(LeftMult, AntisymmetricAndClifford) {
    const auto l = left_mult_operators();
    for (std::size_t i = 0; i < 7; ++i) {
        EXPECT_EQ(max_abs_diff(l[i].transpose(), -l[i]), 0.0);
        for (std::size_t j = 0; j < 7; ++j) {
            const RMatrix ac = l[i] * l[j] + l[j] * l[i];
            const RMatrix expected = RMatrix::identity(8) * (i == j ? -2.0 : 0.0);
            EXPECT_LT(max_abs_diff(ac, expected), 1e-15) << i << "," << j;
        }
    }
}

TEST(Spin7, DimensionClosureAndIrreducibility) {
    const auto s = spin7_in_so8();
    EXPECT_EQ(s.dim(), 21u);
    EXPECT_LT(closure_residual(s.space), 1e-9);
    EXPECT_LT(skew_residual(s.space), 1e-14);

    // Rank oracle: the 21 raw products are independent.
    const auto l = left_mult_operators();
    RMatrix raw(64, 21);
    std::size_t col = 0;
    for (std::size_t i = 0; i < 7; ++i) {
        for (std::size_t j = i + 1; j < 7; ++j, ++col) {
            const RMatrix p = l[i] * l[j];
            for (std::size_t k = 0; k < 64; ++k) {
                raw(k, col) = p.data()[k];
            }
        }
    }
    EXPECT_EQ(rank(raw), 21u);

    // Commutant of the action on R^8 is one-dimensional (scalars).
    RMatrix sys(64 * 21, 64);
    for (std::size_t a = 0; a < 21; ++a) {
        const CMatrix& e = s.basis()[a];
        for (std::size_t u = 0; u < 64; ++u) {
            CMatrix c(8, 8);
            c.data()[u] = 1.0;
            const CMatrix b = bracket(e, c);
            for (std::size_t k = 0; k < 64; ++k) {
                sys(a * 64 + k, u) = b.data()[k].real();
            }
        }
    }
    EXPECT_EQ(nullspace(sys).size(), 1u);
}

TEST(Spin7, CommutatorsOfGeneratorsCloseAt21) {
    const auto l = left_mult_operators();
    std::vector<CMatrix> gens;
    for (std::size_t i = 0; i < 7; ++i) {
        for (std::size_t j = 0; j < 7; ++j) {
            gens.push_back(to_complex(l[i] * l[j] - l[j] * l[i]));
        }
    }
    Subspace s = Subspace::span(8, gens);
    EXPECT_EQ(s.dim(), 21u);
    // One more closure round adds nothing.
    std::vector<CMatrix> more = s.basis();
    for (const auto& x : s.basis()) {
        for (const auto& y : s.basis()) {
            more.push_back(bracket(x, y));
        }
    }
    EXPECT_EQ(Subspace::span(8, more).dim(), 21u);
}

TEST(G2, DerivationSystemNullity) {
    const RMatrix sys = derivation_system();
    EXPECT_EQ(sys.rows(), 343u);
    EXPECT_EQ(sys.cols(), 49u);
    // Frozen from an independent dense-rank computation of the same system.
    EXPECT_EQ(rank(sys), 35u);
    EXPECT_EQ(nullspace(sys).size(), 14u);
}

TEST(G2, BasisProperties) {
    const auto g2 = g2_basis();
    EXPECT_EQ(g2.dim(), 14u);
    EXPECT_LT(closure_residual(g2.space), 1e-9);
    for (const auto& d : g2.basis()) {
        EXPECT_LT(max_abs_diff(d.transpose(), -d), 1e-12);
    }
    const Subspace so7 = Subspace::span(7, so_generators(7));
    EXPECT_LT(so7.containment_residual(g2.space), 1e-10);
}

TEST(G2, LeibnizOnRandomImaginaryPairs) {
    const auto g2 = g2_basis();
    std::mt19937_64 rng(4);
    for (int t = 0; t < 50; ++t) {
        const CMatrix d = g2.space.random_unit(rng);
        const Octonion x = random_octonion(rng, true);
        const Octonion y = random_octonion(rng, true);
        const Octonion xy = oct_mul(x, y);
        // D acts on the imaginary part; D(1) = 0.
        Octonion lhs = apply_derivation(d, xy);
        const Octonion rhs = oct_mul(apply_derivation(d, x), y) + oct_mul(x, apply_derivation(d, y));
        EXPECT_LT(dist(lhs, rhs), 1e-10);
    }
}

TEST(Su3InG2, StabilizerOfE1) {
    const auto su3 = su3_in_g2(Octonion::unit(1));
    EXPECT_EQ(su3.dim(), 8u);
    EXPECT_LT(closure_residual(su3.space), 1e-9);
    for (const auto& d : su3.basis()) {
        EXPECT_LT(apply_derivation(d, Octonion::unit(1)).norm(), 1e-12);
    }
    EXPECT_LT(g2_basis().space.containment_residual(su3.space), 1e-10);
}

TEST(Su3InG2, RejectsBadAxis) {
    EXPECT_THROW(su3_in_g2(2.0 * Octonion::unit(1)), std::invalid_argument);
    EXPECT_THROW(su3_in_g2(Octonion::unit(0)), std::invalid_argument);
}
