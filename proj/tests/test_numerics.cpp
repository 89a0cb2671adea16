#include <wsym/numerics.hpp>

#include <gtest/gtest.h>

#include <numbers>
#include <random>

using namespace wsym;

namespace {

CMatrix random_complex(std::size_t n, std::mt19937_64& rng) {
    std::normal_distribution<double> g(0.0, 1.0);
    CMatrix m(n, n);
    for (auto& v : m.data()) {
        v = cplx{g(rng), g(rng)};
    }
    return m;
}

CMatrix random_skew_hermitian(std::size_t n, std::mt19937_64& rng) {
    const CMatrix m = random_complex(n, rng);
    return (m - m.adjoint()) * cplx{0.5};
}

RMatrix random_real(std::size_t r, std::size_t c, std::mt19937_64& rng) {
    std::normal_distribution<double> g(0.0, 1.0);
    RMatrix m(r, c);
    for (auto& v : m.data()) {
        v = g(rng);
    }
    return m;
}

} // namespace

TEST(MatExp, ZeroGivesIdentity) {
    EXPECT_EQ(mat_exp(CMatrix::zeros(4, 4)), CMatrix::identity(4));
}

TEST(MatExp, RotationByPi) {
    const double pi = std::numbers::pi;
    const RMatrix a{{0.0, -pi}, {pi, 0.0}};
    const RMatrix e = mat_exp(a);
    EXPECT_LT(max_abs_diff(e, RMatrix{{-1.0, 0.0}, {0.0, -1.0}}), 1e-14);
}

TEST(MatExp, RejectsNonSquare) {
    EXPECT_THROW(mat_exp(CMatrix(2, 3)), DimensionError);
}

TEST(MatExp, SkewHermitianIsUnitary) {
    std::mt19937_64 rng(7);
    for (int trial = 0; trial < 20; ++trial) {
        const std::size_t n = 2 + trial % 9;
        const CMatrix a = random_skew_hermitian(n, rng) * cplx{1.0 + trial % 4};
        const CMatrix u = mat_exp(a);
        EXPECT_LT((u * u.adjoint() - CMatrix::identity(n)).norm(), 1e-12) << "n=" << n;
    }
}

TEST(MatExp, InverseIsExpOfNegative) {
    std::mt19937_64 rng(11);
    for (int trial = 0; trial < 20; ++trial) {
        const std::size_t n = 2 + trial % 7;
        CMatrix a = random_complex(n, rng);
        a *= cplx{10.0 / a.norm()}; // |A| = 10
        const CMatrix p = mat_exp(a) * mat_exp(-a);
        EXPECT_LT((p - CMatrix::identity(n)).norm(), 1e-12 * std::sqrt(double(n)) * 10) << "n=" << n;
    }
}

// Independent route: exp(A) = V exp(D) V^* from the eigendecomposition of the
// Hermitian matrix iA.
TEST(MatExp, AgreesWithEigendecompositionRoute) {
    std::mt19937_64 rng(3);
    for (int trial = 0; trial < 20; ++trial) {
        const std::size_t n = 2 + trial % 10;
        const CMatrix a = random_skew_hermitian(n, rng) * cplx{2.0};
        const auto eig = hermitian_eig(CMatrix(a * cplx{0.0, 1.0}));
        CMatrix d(n, n);
        for (std::size_t k = 0; k < n; ++k) {
            d(k, k) = std::exp(cplx{0.0, -eig.values[k]});
        }
        const CMatrix via_eig = eig.vectors * d * eig.vectors.adjoint();
        const CMatrix direct = mat_exp(a);
        EXPECT_LT((via_eig - direct).norm() / direct.norm(), 1e-12);
    }
}

TEST(HermitianEig, ReconstructsAndOrthonormal) {
    std::mt19937_64 rng(5);
    for (int trial = 0; trial < 10; ++trial) {
        const std::size_t n = 3 + trial;
        const CMatrix m = random_complex(n, rng);
        const CMatrix h = m + m.adjoint();
        const auto eig = hermitian_eig(h);
        CMatrix d(n, n);
        for (std::size_t k = 0; k < n; ++k) {
            d(k, k) = eig.values[k];
            if (k > 0) {
                EXPECT_LE(eig.values[k - 1], eig.values[k]);
            }
        }
        EXPECT_LT((eig.vectors * d * eig.vectors.adjoint() - h).norm(), 1e-12 * h.norm());
        EXPECT_LT((eig.vectors.adjoint() * eig.vectors - CMatrix::identity(n)).norm(), 1e-12);
    }
}

TEST(Svd, SingularValuesOfKnownMatrix) {
    const RMatrix m{{3.0, 0.0}, {0.0, -4.0}, {0.0, 0.0}};
    const auto s = svd(m);
    ASSERT_EQ(s.singular_values.size(), 2u);
    EXPECT_NEAR(s.singular_values[0], 4.0, 1e-14);
    EXPECT_NEAR(s.singular_values[1], 3.0, 1e-14);
}

TEST(Nullspace, IdentityHasNone) {
    EXPECT_TRUE(nullspace(RMatrix::identity(5), 1e-9).empty());
}

TEST(Nullspace, ZeroHasFullSpace) {
    EXPECT_EQ(nullspace(RMatrix::zeros(7, 7), 1e-9).size(), 7u);
}

TEST(Nullspace, RejectsNonPositiveTolerance) {
    EXPECT_THROW(nullspace(RMatrix::identity(2), 0.0), std::invalid_argument);
}

TEST(Nullspace, PlantedKernelIsRecovered) {
    // M = A * B with B of rank r; nullity = n - r.
    std::mt19937_64 rng(17);
    for (std::size_t r : {1u, 4u, 9u}) {
        const std::size_t n = 12;
        const RMatrix m = random_real(40, r, rng) * random_real(r, n, rng);
        const auto ns = nullspace(m, 1e-9);
        ASSERT_EQ(ns.size(), n - r);
        const double mnorm = svd(m).singular_values.front();
        for (std::size_t a = 0; a < ns.size(); ++a) {
            RMatrix v(n, 1, ns[a]);
            EXPECT_LE((m * v).norm(), 10 * 1e-9 * mnorm);
            for (std::size_t b = 0; b < ns.size(); ++b) {
                double dot = 0;
                for (std::size_t k = 0; k < n; ++k) {
                    dot += ns[a][k] * ns[b][k];
                }
                EXPECT_NEAR(dot, a == b ? 1.0 : 0.0, 1e-12);
            }
        }
    }
}

TEST(Nullspace, ComplexInput) {
    std::mt19937_64 rng(23);
    const CMatrix a = random_complex(6, rng);
    CMatrix m(6, 6);
    // Zero out a 2-dimensional right kernel by projecting columns.
    m = a;
    for (std::size_t i = 0; i < 6; ++i) {
        m(i, 4) = m(i, 0) + cplx{0, 2} * m(i, 1);
        m(i, 5) = m(i, 2) - m(i, 3);
    }
    EXPECT_EQ(nullspace(m, 1e-9).size(), 2u);
}

TEST(Orthonormalize, DropsDuplicates) {
    const RMatrix e1{{1.0}, {0.0}, {0.0}};
    const RMatrix e2{{0.0}, {1.0}, {0.0}};
    auto dot = [](const RMatrix& a, const RMatrix& b) {
        double s = 0;
        for (std::size_t k = 0; k < a.rows(); ++k) {
            s += a(k, 0) * b(k, 0);
        }
        return s;
    };
    const auto out = orthonormalize(std::vector<RMatrix>{e1, e1, e2}, dot);
    ASSERT_EQ(out.size(), 2u);
    EXPECT_LT(max_abs_diff(out[0], e1), 1e-15);
    EXPECT_LT(max_abs_diff(out[1], e2), 1e-15);
}

TEST(Orthonormalize, SpansSamePlane) {
    const RMatrix a{{1.0}, {1.0}};
    const RMatrix b{{1.0}, {-1.0}};
    auto dot = [](const RMatrix& x, const RMatrix& y) { return x(0, 0) * y(0, 0) + x(1, 0) * y(1, 0); };
    const auto out = orthonormalize(std::vector<RMatrix>{a, b}, dot);
    ASSERT_EQ(out.size(), 2u);
    EXPECT_NEAR(dot(out[0], out[0]), 1.0, 1e-15);
    EXPECT_NEAR(dot(out[1], out[1]), 1.0, 1e-15);
    EXPECT_NEAR(dot(out[0], out[1]), 0.0, 1e-15);
}

TEST(SolveSpd, SmallSystem) {
    const RMatrix a{{4.0, 1.0}, {1.0, 3.0}};
    const std::vector<double> b{1.0, 2.0};
    const auto x = solve_spd(a, b);
    EXPECT_NEAR(4 * x[0] + x[1], 1.0, 1e-14);
    EXPECT_NEAR(x[0] + 3 * x[1], 2.0, 1e-14);
}
