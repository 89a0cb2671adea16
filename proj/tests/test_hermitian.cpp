#include <wsym/hermitian.hpp>

#include <gtest/gtest.h>

#include <algorithm>
#include <random>

using namespace wsym;

namespace {

const cplx kI{0.0, 1.0};

CMatrix random_in(const Subspace& s, std::mt19937_64& rng, double scale = 1.0) {
    return s.random_unit(rng) * cplx{scale};
}

std::vector<double> sorted_abs_coords(const Subspace& a, const CMatrix& w) {
    auto c = a.coords(w);
    for (auto& v : c) {
        v = std::abs(v);
    }
    std::sort(c.begin(), c.end());
    return c;
}

} // namespace

TEST(ComplexStructure, SuBlockModelClosedForm) {
    for (auto [n, m] : std::vector<std::pair<int, int>>{{2, 1}, {3, 2}, {4, 1}}) {
        const SphericalPair pair = build_pair("II-su", {{"n", n}, {"m", m}});
        const CMatrix zj = complex_structure_generator(pair);
        CMatrix expect(std::size_t(n + m), std::size_t(n + m));
        for (int k = 0; k < n + m; ++k) {
            expect(k, k) = k < n ? kI * (double(m) / (n + m)) : -kI * (double(n) / (n + m));
        }
        EXPECT_LT(max_abs_diff(zj, expect), 1e-14) << n << "," << m;
    }
}

TEST(ComplexStructure, SquaresToMinusIdentityOnP) {
    for (const std::string id : {"II-su", "II-so2n-sun", "III-su-sp"}) {
        const SphericalPair pair = build_pair(id);
        const HermitianStructure hs = hermitian_structure(pair);
        const RMatrix m = restricted_ad(hs.ZJ, hs.p);
        EXPECT_LT((m * m + RMatrix::identity(hs.p.dim())).max_abs(), 1e-9) << id;
        for (const auto& e : hs.k.basis()) {
            EXPECT_LT(bracket(hs.ZJ, e).max_abs(), 1e-10) << id;
        }
        for (const auto& e : hs.k_s.basis()) {
            EXPECT_LT(std::abs(inner(hs.ZJ, e)), 1e-12) << id;
        }
    }
}

TEST(ComplexStructure, RejectsPairsWithoutHermitianData) {
    EXPECT_THROW(complex_structure_generator(build_pair("IV-so7-g2")), StructuralError);
}

TEST(ZPrime, NontubeValueForSu21) {
    const SphericalPair pair = build_pair("II-su");
    const HermitianStructure hs = hermitian_structure(pair);
    // Frozen: Z' = -(1/6) i diag(1, -2, 1).
    CMatrix expect(3, 3);
    expect(0, 0) = -kI / 6.0;
    expect(1, 1) = kI / 3.0;
    expect(2, 2) = -kI / 6.0;
    EXPECT_LT(max_abs_diff(hs.Zprime, expect), 1e-12);
    EXPECT_GT(hs.Zprime.norm(), 0.1);
    EXPECT_LT(std::abs(inner(hs.Zprime, hs.ZJ - hs.Zprime)), 1e-10);
    EXPECT_LT(max_abs_diff(z_prime(pair, hs.ZJ), hs.Zprime), 1e-14);
}

TEST(ZPrime, DiscardedPartIsOrthogonalToCentralizer) {
    for (const std::string id : {"II-su", "II-so2n-sun", "III-su-sp"}) {
        const HermitianStructure hs = hermitian_structure(build_pair(id));
        const CMatrix z0 = hs.ZJ - hs.Zprime;
        for (const auto& c : hs.centralizer_a.basis()) {
            EXPECT_LT(std::abs(inner(z0, c)), 1e-10) << id;
        }
        for (const auto& x : hs.a.basis()) {
            EXPECT_LT(bracket(hs.Zprime, x).max_abs(), 1e-10) << id;
            const CMatrix s = mat_exp(hs.Zprime * cplx{0.83});
            EXPECT_LT(max_abs_diff(adjoint_action(s, x), x), 1e-10) << id;
        }
    }
}

TEST(ZPrime, VanishesOnTubeControl) {
    const SphericalPair tube = su_hermitian_model(1, 1);
    const HermitianStructure hs = hermitian_structure(tube);
    EXPECT_LT(hs.Zprime.norm(), 1e-9);
    const TubeTypeVerdict v = tube_type_check(tube);
    EXPECT_FALSE(v.nontube);
    EXPECT_FALSE(v.span_criterion);
}

TEST(TubeType, CatalogFamilyTwoIsNontube) {
    for (const auto& [id, params] : std::vector<std::pair<std::string, std::map<std::string, int>>>{
             {"II-su", {}}, {"II-su", {{"n", 3}, {"m", 2}}}, {"II-so2n-sun", {}}, {"III-su-sp", {{"n", 1}}},
             {"III-su-sp", {}}}) {
        const TubeTypeVerdict v = tube_type_check(build_pair(id, params));
        EXPECT_TRUE(v.nontube) << id;
        EXPECT_TRUE(v.span_criterion) << id;
    }
}

TEST(TubeType, DisagreementSignalsBrokenEmbedding) {
    SphericalPair pair = build_pair("II-su");
    // Shrink k_s to a single torus direction: Z' is unchanged but the span fails.
    pair.hermitian->k_s = LieAlgebraBasis("t1", 3, {pair.hermitian->k_s.basis().back()});
    EXPECT_THROW(tube_type_check(pair), StructuralError);
}

TEST(ConjugateToCartan, ElementOfAIsFixed) {
    const HermitianStructure hs = hermitian_structure(build_pair("II-su"));
    const CMatrix y = hs.a[0] * cplx{0.7};
    const CartanResult r = conjugate_to_cartan(hs, y, false);
    EXPECT_LT(max_abs_diff(r.k, CMatrix::identity(3)), 1e-15);
    EXPECT_LT(max_abs_diff(r.w, y), 1e-15);
}

TEST(ConjugateToCartan, RandomVectorsAcrossModels) {
    std::mt19937_64 rng(5);
    for (const auto& [id, params] : std::vector<std::pair<std::string, std::map<std::string, int>>>{
             {"II-su", {}}, {"II-su", {{"n", 3}, {"m", 2}}}, {"II-so2n-sun", {}}, {"II-so2n-sun", {{"n", 5}}},
             {"III-su-sp", {}}}) {
        const HermitianStructure hs = hermitian_structure(build_pair(id, params));
        for (int s = 0; s < 10; ++s) {
            const CMatrix y = random_in(hs.p, rng, 1.7);
            const CartanResult r = conjugate_to_cartan(hs, y, false);
            EXPECT_TRUE(r.success) << id;
            EXPECT_LT(r.residual, 1e-9) << id;
            EXPECT_LT(hs.a.residual(r.w), 1e-12) << id;
            EXPECT_NEAR(r.w.norm(), y.norm(), 1e-10) << id;
            EXPECT_LT(max_abs_diff(adjoint_action(r.k, r.w), y), 1e-9 * y.norm()) << id;
        }
    }
}

TEST(ConjugateToCartan, KsOnlySucceedsOnHundredSamples) {
    std::mt19937_64 rng(17);
    const HermitianStructure hs = hermitian_structure(build_pair("II-su"));
    int ok = 0;
    for (int s = 0; s < 100; ++s) {
        const CMatrix y = random_in(hs.p, rng);
        const CartanResult r = conjugate_to_cartan(hs, y, true);
        ok += (r.residual < 1e-8 && hs.ks_membership(r.k) < 1e-9) ? 1 : 0;
    }
    EXPECT_EQ(ok, 100);
}

TEST(ConjugateToCartan, KsOnlyOnOtherModels) {
    std::mt19937_64 rng(23);
    for (const std::string id : {"II-so2n-sun", "III-su-sp"}) {
        const HermitianStructure hs = hermitian_structure(build_pair(id));
        for (int s = 0; s < 10; ++s) {
            const CartanResult r = conjugate_to_cartan(hs, random_in(hs.p, rng), true);
            EXPECT_TRUE(r.success) << id;
            EXPECT_LT(hs.ks_membership(r.k), 1e-9) << id;
        }
    }
}

TEST(ConjugateToCartan, KsOnlyUnavailableOnTube) {
    std::mt19937_64 rng(1);
    const HermitianStructure hs = hermitian_structure(su_hermitian_model(1, 1));
    EXPECT_THROW(conjugate_to_cartan(hs, random_in(hs.p, rng), true), StructuralError);
}

TEST(ConjugateToCartan, RejectsInputOutsideP) {
    const HermitianStructure hs = hermitian_structure(build_pair("II-su"));
    EXPECT_THROW(conjugate_to_cartan(hs, hs.ZJ, false), std::invalid_argument);
}

TEST(ConjugateToCartan, SvdClosedFormAgreesWithAscent) {
    std::mt19937_64 rng(31);
    for (auto [n, m] : std::vector<std::pair<int, int>>{{2, 1}, {3, 2}, {4, 2}}) {
        const SphericalPair pair = build_pair("II-su", {{"n", n}, {"m", m}});
        const HermitianStructure hs = hermitian_structure(pair);
        for (int s = 0; s < 5; ++s) {
            const CMatrix y = random_in(hs.p, rng);
            const CartanResult closed = cartan_by_svd(pair, y);
            const CartanResult ascent = conjugate_to_cartan(hs, y, false);
            EXPECT_LT(closed.residual, 1e-10);
            EXPECT_LT(hs.ks_membership(closed.k), 1e-10);
            const auto c1 = sorted_abs_coords(hs.a, closed.w);
            const auto c2 = sorted_abs_coords(hs.a, ascent.w);
            for (std::size_t j = 0; j < c1.size(); ++j) {
                EXPECT_NEAR(c1[j], c2[j], 1e-9);
            }
        }
    }
}

TEST(ProjectToKs, FixesElementsOfKs) {
    std::mt19937_64 rng(41);
    const HermitianStructure hs = hermitian_structure(build_pair("II-su"));
    const CMatrix k = mat_exp(random_in(hs.k_s.space, rng, 2.0));
    const KsFactorization f = project_to_ks(hs, k);
    EXPECT_LT(max_abs_diff(f.k_s, k), 1e-12);
    EXPECT_LT(max_abs_diff(f.s, CMatrix::identity(3)), 1e-12);
}

TEST(ProjectToKs, PureSPrimeElement) {
    const HermitianStructure hs = hermitian_structure(build_pair("II-su"));
    const CMatrix k = mat_exp(hs.Zprime * cplx{1.1});
    const KsFactorization f = project_to_ks(hs, k);
    EXPECT_LT(hs.ks_membership(f.k_s), 1e-12);
    // Up to the period of the central character, which lands in K_s.
    EXPECT_LT(max_abs_diff(f.k_s * f.s, k), 1e-12);
    EXPECT_LT(hs.ks_membership(f.s * mat_exp(hs.Zprime * cplx{1.1}).adjoint()), 1e-12);
}

TEST(ProjectToKs, ReconstructsRandomElementsOfK) {
    std::mt19937_64 rng(43);
    for (const std::string id : {"II-su", "II-so2n-sun", "III-su-sp"}) {
        const HermitianStructure hs = hermitian_structure(build_pair(id));
        for (int s = 0; s < 10; ++s) {
            const CMatrix k = mat_exp(random_in(hs.k.space, rng, 3.0));
            const KsFactorization f = project_to_ks(hs, k);
            EXPECT_LT(max_abs_diff(f.k_s * f.s, k), 1e-10) << id;
            EXPECT_LT(hs.ks_membership(f.k_s), 1e-9) << id;
        }
    }
}

TEST(ProjectToKs, TubeTypeHasNoFactorization) {
    const HermitianStructure hs = hermitian_structure(su_hermitian_model(1, 1));
    EXPECT_THROW(project_to_ks(hs, CMatrix::identity(2)), StructuralError);
}
