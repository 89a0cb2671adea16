#pragma once

// Catalog of compact spherical pairs (G, H) realized as explicit matrix Lie
// algebras, each with the involution used for tangent-vector reversal.

#include <wsym/lie.hpp>
#include <wsym/octonion.hpp>

#include <algorithm>
#include <functional>
#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace wsym {

class ConstraintError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

class InvolutionError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

enum class Family { I, II, III, IV, V, VI, none };

inline std::string to_string(Family f) {
    switch (f) {
    case Family::I: return "I";
    case Family::II: return "II";
    case Family::III: return "III";
    case Family::IV: return "IV";
    case Family::V: return "V";
    case Family::VI: return "VI";
    case Family::none: return "-";
    }
    return "?";
}

enum class PairStatus { verifiable, excluded, negative_control };

inline std::string to_string(PairStatus s) {
    switch (s) {
    case PairStatus::verifiable: return "verifiable";
    case PairStatus::excluded: return "excluded";
    case PairStatus::negative_control: return "negative-control";
    }
    return "?";
}

/// Differential of the involution theta on matrices, plus its group form.
struct InvolutionDescriptor {
    enum class Kind { identity, entrywise_conjugation, conjugation_by_matrix };

    Kind kind = Kind::identity;
    std::optional<CMatrix> conjugator; // S, unitary with S^2 = +-I

    static InvolutionDescriptor identity() { return {}; }
    static InvolutionDescriptor entrywise_conjugation() { return {Kind::entrywise_conjugation, std::nullopt}; }
    static InvolutionDescriptor conjugation_by(CMatrix s) {
        const double defect = (s * s.adjoint() - CMatrix::identity(s.rows())).max_abs();
        const CMatrix sq = s * s;
        const std::size_t n = s.rows();
        const double plus = (sq - CMatrix::identity(n)).max_abs();
        const double minus = (sq + CMatrix::identity(n)).max_abs();
        if (defect > 1e-12 || std::min(plus, minus) > 1e-12) {
            throw InvolutionError("conjugator must be unitary with S^2 = +-I");
        }
        return {Kind::conjugation_by_matrix, std::move(s)};
    }

    /// d theta(X).
    CMatrix apply(const CMatrix& x) const {
        switch (kind) {
        case Kind::identity: return x;
        case Kind::entrywise_conjugation: return x.conj();
        case Kind::conjugation_by_matrix: return *conjugator * x * conjugator->adjoint();
        }
        return x;
    }
    /// theta(g) on group elements; same formula as apply for these kinds.
    CMatrix apply_group(const CMatrix& g) const { return apply(g); }

    std::string name() const {
        switch (kind) {
        case Kind::identity: return "identity";
        case Kind::entrywise_conjugation: return "entrywise-conjugation";
        case Kind::conjugation_by_matrix: return "conjugation-by-matrix";
        }
        return "?";
    }
};

/// K-level data for pairs fibred over a hermitian symmetric space G/K.
struct HermitianData {
    LieAlgebraBasis k;
    LieAlgebraBasis k_s;
    Subspace z_k;
    Subspace p;
    Subspace a;                 // maximal abelian in p, with d theta = -Id
    CMatrix cartan_conjugator;  // sigma = Ad(cartan_conjugator), fixes k and negates p
    CMatrix center_orientation; // fixes the sign of Z^J: <Z^J, orientation> > 0
    std::function<cplx(const CMatrix&)> central_character; // K -> U(1), trivial exactly on K_s
    std::function<double(const CMatrix&)> ks_membership;   // residual, 0 on K_s
};

/// Extra structure of the SU(2n+1)/Sp(n) models.
struct Family3Data {
    std::size_t n = 0;
    LieAlgebraBasis sp;   // sp(n) in the upper-left 2n block
    Subspace q_sub;       // su(2n) minus sp(n)
    Subspace b;           // maximal abelian in q_sub, imaginary diagonal
};

struct SphericalPair {
    std::string id;
    Family family = Family::none;
    PairStatus status = PairStatus::verifiable;
    std::map<std::string, int> params;
    LieAlgebraBasis g;
    LieAlgebraBasis h;
    Subspace q;
    InvolutionDescriptor involution;
    bool symmetric_conjugator = false; // d theta = -Id on q holds by construction
    std::size_t expected_q_dim = 0;
    std::optional<HermitianData> hermitian;
    std::optional<Family3Data> family3;
    /// Optional closed-form membership residual for the group H.
    std::function<double(const CMatrix&)> group_membership;

    std::size_t ambient_size() const { return g.ambient_size(); }
};

struct ParamSpec {
    std::string name;
    int default_value;
};

struct CatalogEntry {
    std::string id;
    Family family;
    std::string group;
    std::string subgroup;
    std::string constraint;
    std::vector<ParamSpec> params;
    PairStatus status;
};

inline const std::vector<CatalogEntry>& list_pairs() {
    static const std::vector<CatalogEntry> entries{
        {"I-grassmann", Family::I, "SU(n+m)", "S(U(n)xU(m))", "n>=1, m>=1, n+m<=7", {{"n", 2}, {"m", 1}},
         PairStatus::verifiable},
        {"I-so8-su2sp2", Family::I, "SO(8)", "SU(2).Sp(2)", "", {}, PairStatus::verifiable},
        {"II-su", Family::II, "SU(n+m)", "SU(n)xSU(m)", "n>m>=1, n+m<=7", {{"n", 2}, {"m", 1}},
         PairStatus::verifiable},
        {"II-so2n-sun", Family::II, "SO(2n)", "SU(n)", "n>=3, n odd, n<=5", {{"n", 3}}, PairStatus::verifiable},
        {"II-e6-d5", Family::II, "E6", "D5", "", {}, PairStatus::excluded},
        {"III-su-sp", Family::III, "SU(2n+1)", "Sp(n)", "n>=1, n<=3", {{"n", 2}}, PairStatus::verifiable},
        {"III-su-spu1", Family::III, "SU(2n+1)", "Sp(n).U(1)", "n>=1, n<=3", {{"n", 2}}, PairStatus::verifiable},
        {"IV-so8-spin7", Family::IV, "SO(8)", "Spin(7)", "", {}, PairStatus::verifiable},
        {"IV-so7-g2", Family::IV, "SO(7)", "G2", "", {}, PairStatus::verifiable},
        {"IV-g2-a2", Family::IV, "G2", "A2", "", {}, PairStatus::verifiable},
        {"V-so10-so2spin7", Family::V, "SO(10)", "SO(2)xSpin(7)", "", {}, PairStatus::verifiable},
        {"V-so9-spin7", Family::V, "SO(9)", "Spin(7)", "", {}, PairStatus::verifiable},
        {"V-so8-g2", Family::V, "SO(8)", "G2", "", {}, PairStatus::verifiable},
        {"VI-so2n1-un", Family::VI, "SO(2n+1)", "U(n)", "n>=2, n<=4", {{"n", 2}}, PairStatus::verifiable},
        {"VI-spn-spn1u1", Family::VI, "Sp(n)", "Sp(n-1)xU(1)", "n>=1, n<=4", {{"n", 1}},
         PairStatus::verifiable},
        {"negative-control-su3-torus", Family::none, "SU(3)", "T^2", "", {}, PairStatus::negative_control},
    };
    return entries;
}

inline const CatalogEntry* find_entry(const std::string& id) {
    for (const auto& e : list_pairs()) {
        if (e.id == id) {
            return &e;
        }
    }
    return nullptr;
}

namespace detail {

inline const cplx kI{0.0, 1.0};

/// sp(n) in the form [[V1, V2], [-conj V2, conj V1]], V1 in u(n), V2 complex
/// symmetric, placed on coordinates index[0..2n) of an ambient matrix.
inline std::vector<CMatrix> sp_generators(std::size_t n, std::size_t ambient, const std::vector<std::size_t>& index) {
    std::vector<CMatrix> out;
    auto put = [&](CMatrix& m, std::size_t i, std::size_t j, cplx v) { m(index[i], index[j]) += v; };
    for (std::size_t a = 0; a < n; ++a) {
        for (std::size_t b = a; b < n; ++b) {
            // V1 part.
            if (a == b) {
                CMatrix m(ambient, ambient);
                put(m, a, a, kI);
                put(m, n + a, n + a, -kI);
                out.push_back(m);
            } else {
                CMatrix re(ambient, ambient);
                put(re, a, b, 1.0);
                put(re, b, a, -1.0);
                put(re, n + a, n + b, 1.0);
                put(re, n + b, n + a, -1.0);
                out.push_back(re);
                CMatrix im(ambient, ambient);
                put(im, a, b, kI);
                put(im, b, a, kI);
                put(im, n + a, n + b, -kI);
                put(im, n + b, n + a, -kI);
                out.push_back(im);
            }
            // V2 part: V2 = c (E_ab + E_ba) with c in {1, i}.
            for (cplx c : {cplx{1.0}, kI}) {
                CMatrix m(ambient, ambient);
                put(m, a, n + b, c);
                put(m, n + b, a, -std::conj(c));
                if (a != b) {
                    put(m, b, n + a, c);
                    put(m, n + a, b, -std::conj(c));
                }
                out.push_back(m);
            }
        }
    }
    return out;
}

inline std::vector<std::size_t> iota_index(std::size_t count, std::size_t offset = 0) {
    std::vector<std::size_t> v(count);
    for (std::size_t k = 0; k < count; ++k) {
        v[k] = offset + k;
    }
    return v;
}

inline CMatrix diag(const std::vector<cplx>& d) {
    CMatrix m(d.size(), d.size());
    for (std::size_t k = 0; k < d.size(); ++k) {
        m(k, k) = d[k];
    }
    return m;
}

inline CMatrix block(const CMatrix& m, std::size_t r0, std::size_t c0, std::size_t rows, std::size_t cols) {
    CMatrix b(rows, cols);
    for (std::size_t i = 0; i < rows; ++i) {
        for (std::size_t j = 0; j < cols; ++j) {
            b(i, j) = m(r0 + i, c0 + j);
        }
    }
    return b;
}

/// Complex determinant by partial-pivot LU.
inline cplx det(CMatrix m) {
    const std::size_t n = m.rows();
    cplx d{1.0};
    for (std::size_t k = 0; k < n; ++k) {
        std::size_t piv = k;
        for (std::size_t i = k + 1; i < n; ++i) {
            if (std::abs(m(i, k)) > std::abs(m(piv, k))) {
                piv = i;
            }
        }
        if (std::abs(m(piv, k)) == 0.0) {
            return 0.0;
        }
        if (piv != k) {
            for (std::size_t j = 0; j < n; ++j) {
                std::swap(m(k, j), m(piv, j));
            }
            d = -d;
        }
        d *= m(k, k);
        for (std::size_t i = k + 1; i < n; ++i) {
            const cplx f = m(i, k) / m(k, k);
            for (std::size_t j = k; j < n; ++j) {
                m(i, j) -= f * m(k, j);
            }
        }
    }
    return d;
}

inline double unitarity_defect(const CMatrix& g) {
    return (g * g.adjoint() - CMatrix::identity(g.rows())).max_abs();
}

/// Residual of g being block diagonal with the given block sizes.
inline double off_block_residual(const CMatrix& g, const std::vector<std::size_t>& sizes) {
    std::vector<std::size_t> owner;
    for (std::size_t b = 0; b < sizes.size(); ++b) {
        owner.insert(owner.end(), sizes[b], b);
    }
    double worst = 0.0;
    for (std::size_t i = 0; i < g.rows(); ++i) {
        for (std::size_t j = 0; j < g.cols(); ++j) {
            if (owner[i] != owner[j]) {
                worst = std::max(worst, std::abs(g(i, j)));
            }
        }
    }
    return worst;
}

/// J = [[0, I], [-I, 0]] on 2n coordinates.
inline CMatrix symplectic_form(std::size_t n) {
    CMatrix j(2 * n, 2 * n);
    for (std::size_t k = 0; k < n; ++k) {
        j(k, n + k) = 1.0;
        j(n + k, k) = -1.0;
    }
    return j;
}

/// Residual of u (2n x 2n) lying in Sp(n): unitary and u J = J conj(u).
inline double sp_residual(const CMatrix& u) {
    const std::size_t n = u.rows() / 2;
    const CMatrix j = symplectic_form(n);
    return std::max(unitarity_defect(u), (u * j - j * u.conj()).max_abs());
}

inline void require(bool ok, const std::string& msg) {
    if (!ok) {
        throw ConstraintError(msg);
    }
}

inline int param(const std::map<std::string, int>& params, const std::string& name) { return params.at(name); }

// Quaternions as 4x4 real matrices, basis (1, i, j, k).
inline std::array<std::array<double, 4>, 4> quat_mul(const std::array<double, 4>& x) {
    // Left multiplication matrix of x.
    const double a = x[0], b = x[1], c = x[2], d = x[3];
    return {{{a, -b, -c, -d}, {b, a, -d, c}, {c, d, a, -b}, {d, -c, b, a}}};
}
inline std::array<std::array<double, 4>, 4> quat_right(const std::array<double, 4>& x) {
    const double a = x[0], b = x[1], c = x[2], d = x[3];
    return {{{a, -b, -c, -d}, {b, a, d, -c}, {c, -d, a, b}, {d, c, -b, a}}};
}

inline void put_block(CMatrix& m, std::size_t r, std::size_t c, const std::array<std::array<double, 4>, 4>& b,
                      double s = 1.0) {
    for (std::size_t i = 0; i < 4; ++i) {
        for (std::size_t j = 0; j < 4; ++j) {
            m(4 * r + i, 4 * c + j) += s * b[i][j];
        }
    }
}

} // namespace detail

/// Hermitian model SU(n+m)/(SU(n)xSU(m)) with entrywise conjugation. No
/// parameter constraint is enforced, so tube-type controls can be built.
inline SphericalPair su_hermitian_model(std::size_t n, std::size_t m) {
    using namespace detail;
    const std::size_t N = n + m;
    SphericalPair pair;
    pair.id = "II-su";
    pair.family = Family::II;
    pair.params = {{"n", int(n)}, {"m", int(m)}};
    pair.g = LieAlgebraBasis("su(" + std::to_string(N) + ")", N, unitary_generators(N, false));

    auto ks_gens = unitary_generators(n, false, N, 0);
    const auto lower = unitary_generators(m, false, N, n);
    ks_gens.insert(ks_gens.end(), lower.begin(), lower.end());

    std::vector<cplx> zd(N);
    for (std::size_t k = 0; k < N; ++k) {
        zd[k] = k < n ? kI * double(m) : -kI * double(n);
    }
    const CMatrix zdiag = diag(zd);

    HermitianData hd;
    hd.k_s = LieAlgebraBasis("su(" + std::to_string(n) + ")+su(" + std::to_string(m) + ")", N, ks_gens);
    auto k_gens = ks_gens;
    k_gens.push_back(zdiag);
    hd.k = LieAlgebraBasis("s(u(n)+u(m))", N, k_gens);
    hd.z_k = Subspace::span(N, {zdiag});
    std::vector<CMatrix> p_gens;
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = n; j < N; ++j) {
            p_gens.push_back(unit(N, i, j) - unit(N, j, i));
            p_gens.push_back(unit(N, i, j, kI) + unit(N, j, i, kI));
        }
    }
    hd.p = Subspace::span(N, p_gens);
    std::vector<CMatrix> a_gens;
    for (std::size_t j = 0; j < std::min(n, m); ++j) {
        a_gens.push_back(unit(N, j, n + j, kI) + unit(N, n + j, j, kI));
    }
    hd.a = Subspace::span(N, a_gens);
    std::vector<cplx> ipq(N);
    for (std::size_t k = 0; k < N; ++k) {
        ipq[k] = k < n ? 1.0 : -1.0;
    }
    hd.cartan_conjugator = diag(ipq);
    hd.center_orientation = zdiag;
    hd.central_character = [n](const CMatrix& k) { return det(block(k, 0, 0, n, n)); };
    hd.ks_membership = [n, m](const CMatrix& k) {
        const double upper = std::abs(det(block(k, 0, 0, n, n)) - 1.0);
        const double lower = std::abs(det(block(k, n, n, m, m)) - 1.0);
        return std::max({unitarity_defect(k), off_block_residual(k, {n, m}), upper, lower});
    };

    pair.h = hd.k_s;
    pair.involution = InvolutionDescriptor::entrywise_conjugation();
    pair.expected_q_dim = 2 * n * m + 1;
    pair.group_membership = hd.ks_membership;
    pair.hermitian = std::move(hd);
    return pair;
}

namespace detail {

inline SphericalPair build_grassmann(std::size_t n, std::size_t m) {
    const std::size_t N = n + m;
    SphericalPair pair;
    pair.family = Family::I;
    pair.g = LieAlgebraBasis("su(" + std::to_string(N) + ")", N, unitary_generators(N, false));
    auto gens = unitary_generators(n, false, N, 0);
    const auto lower = unitary_generators(m, false, N, n);
    gens.insert(gens.end(), lower.begin(), lower.end());
    std::vector<cplx> zd(N);
    std::vector<cplx> ipq(N);
    for (std::size_t k = 0; k < N; ++k) {
        zd[k] = k < n ? kI * double(m) : -kI * double(n);
        ipq[k] = k < n ? 1.0 : -1.0;
    }
    gens.push_back(diag(zd));
    pair.h = LieAlgebraBasis("s(u(" + std::to_string(n) + ")+u(" + std::to_string(m) + "))", N, gens);
    pair.involution = InvolutionDescriptor::conjugation_by(diag(ipq));
    pair.symmetric_conjugator = true;
    pair.expected_q_dim = 2 * n * m;
    return pair;
}

inline SphericalPair build_so8_su2sp2() {
    SphericalPair pair;
    pair.family = Family::I;
    pair.g = LieAlgebraBasis("so(8)", 8, so_generators(8));
    // R^8 = H^2. sp(2): left multiplication by quaternionic skew-Hermitian
    // 2x2 matrices. sp(1): right multiplication by imaginary quaternions.
    std::vector<CMatrix> gens;
    const std::array<std::array<double, 4>, 4> units{{{1, 0, 0, 0}, {0, 1, 0, 0}, {0, 0, 1, 0}, {0, 0, 0, 1}}};
    for (std::size_t r = 0; r < 2; ++r) {
        for (std::size_t u = 1; u < 4; ++u) {
            CMatrix m(8, 8);
            put_block(m, r, r, quat_mul(units[u]));
            gens.push_back(m);
        }
    }
    for (std::size_t u = 0; u < 4; ++u) {
        CMatrix m(8, 8);
        put_block(m, 0, 1, quat_mul(units[u]));
        // -conj(x) in the transposed slot.
        auto xc = units[u];
        for (std::size_t k = 1; k < 4; ++k) {
            xc[k] = -xc[k];
        }
        put_block(m, 1, 0, quat_mul(xc), -1.0);
        gens.push_back(m);
    }
    for (std::size_t u = 1; u < 4; ++u) {
        CMatrix m(8, 8);
        put_block(m, 0, 0, quat_right(units[u]));
        put_block(m, 1, 1, quat_right(units[u]));
        gens.push_back(m);
    }
    pair.h = LieAlgebraBasis("sp(1)+sp(2)", 8, gens);
    pair.involution = InvolutionDescriptor::identity();
    pair.expected_q_dim = 15;
    return pair;
}

inline SphericalPair build_so2n_sun(std::size_t n) {
    const std::size_t N = 2 * n;
    SphericalPair pair;
    pair.family = Family::II;
    pair.g = LieAlgebraBasis("so(" + std::to_string(N) + ")", N, so_generators(N));

    std::vector<CMatrix> ks_gens;
    for (const auto& x : unitary_generators(n, false)) {
        ks_gens.push_back(realify(x));
    }
    const CMatrix j = realify(CMatrix::identity(n) * kI);
    HermitianData hd;
    hd.k_s = LieAlgebraBasis("su(" + std::to_string(n) + ")", N, ks_gens);
    auto k_gens = ks_gens;
    k_gens.push_back(j);
    hd.k = LieAlgebraBasis("u(" + std::to_string(n) + ")", N, k_gens);
    hd.z_k = Subspace::span(N, {j});
    hd.p = pair.g.space.complement(hd.k.space);

    // Realified complex conjugation: diag(1, -1, 1, -1, ...).
    std::vector<cplx> sd(N);
    for (std::size_t k = 0; k < N; ++k) {
        sd[k] = k % 2 == 0 ? 1.0 : -1.0;
    }
    const CMatrix s = diag(sd);
    // a: realify(i (E_{2j,2j+1} - E_{2j+1,2j})) composed with conjugation.
    std::vector<CMatrix> a_gens;
    for (std::size_t t = 0; 2 * t + 1 < n; ++t) {
        const CMatrix c = unit(n, 2 * t, 2 * t + 1, kI) - unit(n, 2 * t + 1, 2 * t, kI);
        a_gens.push_back(realify(c) * s);
    }
    hd.a = Subspace::span(N, a_gens);
    hd.cartan_conjugator = j;
    hd.center_orientation = j;
    hd.central_character = [](const CMatrix& k) { return det(derealify(k)); };
    hd.ks_membership = [j](const CMatrix& k) {
        const double linear = (k * j - j * k).max_abs();
        return std::max({unitarity_defect(k), linear, std::abs(det(derealify(k)) - 1.0)});
    };

    pair.h = hd.k_s;
    pair.involution = InvolutionDescriptor::conjugation_by(s);
    pair.expected_q_dim = n * n - n + 1;
    pair.group_membership = hd.ks_membership;
    pair.hermitian = std::move(hd);
    return pair;
}

inline SphericalPair build_family3(std::size_t n, bool with_u1) {
    const std::size_t N = 2 * n + 1;
    SphericalPair pair;
    pair.family = Family::III;
    pair.g = LieAlgebraBasis("su(" + std::to_string(N) + ")", N, unitary_generators(N, false));

    Family3Data f3;
    f3.n = n;
    f3.sp = LieAlgebraBasis("sp(" + std::to_string(n) + ")", N, sp_generators(n, N, iota_index(2 * n)));
    const LieAlgebraBasis su2n("su(" + std::to_string(2 * n) + ")", N, unitary_generators(2 * n, false, N, 0));
    f3.q_sub = su2n.space.complement(f3.sp.space);
    std::vector<CMatrix> b_gens;
    for (std::size_t j = 0; j + 1 < n; ++j) {
        CMatrix d(N, N);
        d(j, j) = kI;
        d(j + 1, j + 1) = -kI;
        d(n + j, n + j) = kI;
        d(n + j + 1, n + j + 1) = -kI;
        b_gens.push_back(d);
    }
    f3.b = Subspace::span(N, b_gens);

    std::vector<cplx> zd(N, kI);
    zd[N - 1] = -kI * double(2 * n);
    const CMatrix zdiag = diag(zd);

    HermitianData hd;
    hd.k_s = su2n;
    auto k_gens = unitary_generators(2 * n, false, N, 0);
    k_gens.push_back(zdiag);
    hd.k = LieAlgebraBasis("s(u(" + std::to_string(2 * n) + ")+u(1))", N, k_gens);
    hd.z_k = Subspace::span(N, {zdiag});
    std::vector<CMatrix> p_gens;
    for (std::size_t i = 0; i < 2 * n; ++i) {
        p_gens.push_back(unit(N, i, N - 1) - unit(N, N - 1, i));
        p_gens.push_back(unit(N, i, N - 1, kI) + unit(N, N - 1, i, kI));
    }
    hd.p = Subspace::span(N, p_gens);
    hd.a = Subspace::span(N, {unit(N, 0, N - 1, kI) + unit(N, N - 1, 0, kI)});
    std::vector<cplx> ipq(N, 1.0);
    ipq[N - 1] = -1.0;
    hd.cartan_conjugator = diag(ipq);
    hd.center_orientation = zdiag;
    const std::size_t two_n = 2 * n;
    hd.central_character = [two_n](const CMatrix& k) { return det(block(k, 0, 0, two_n, two_n)); };
    hd.ks_membership = [two_n](const CMatrix& k) {
        return std::max({unitarity_defect(k), off_block_residual(k, {two_n, 1}),
                         std::abs(det(block(k, 0, 0, two_n, two_n)) - 1.0), std::abs(k(two_n, two_n) - 1.0)});
    };

    auto h_gens = f3.sp.basis();
    if (with_u1) {
        h_gens.push_back(zdiag);
        pair.h = LieAlgebraBasis("sp(" + std::to_string(n) + ")+u(1)", N, h_gens);
        pair.expected_q_dim = 2 * n * n + 3 * n - 1;
        pair.group_membership = [two_n](const CMatrix& k) {
            // k = diag(e^{i phi} u, e^{-2n i phi}) with u in Sp(n); try every
            // admissible phase.
            double best = 1e300;
            const double base = std::arg(k(two_n, two_n));
            for (std::size_t r = 0; r < two_n; ++r) {
                const double phi = -(base + 2.0 * M_PI * double(r)) / double(two_n);
                const CMatrix u = block(k, 0, 0, two_n, two_n) * std::exp(cplx{0.0, -phi});
                const double res = std::max({sp_residual(u), off_block_residual(k, {two_n, 1}),
                                             std::abs(k(two_n, two_n) - std::exp(cplx{0.0, -double(two_n) * phi}))});
                best = std::min(best, res);
            }
            return best;
        };
    } else {
        pair.h = f3.sp;
        pair.expected_q_dim = 2 * n * n + 3 * n;
        pair.group_membership = [two_n](const CMatrix& k) {
            return std::max({sp_residual(block(k, 0, 0, two_n, two_n)), off_block_residual(k, {two_n, 1}),
                             std::abs(k(two_n, two_n) - 1.0)});
        };
    }
    pair.involution = InvolutionDescriptor::entrywise_conjugation();
    pair.hermitian = std::move(hd);
    pair.family3 = std::move(f3);
    return pair;
}

inline SphericalPair build_so2n1_un(std::size_t n) {
    const std::size_t N = 2 * n + 1;
    SphericalPair pair;
    pair.family = Family::VI;
    pair.g = LieAlgebraBasis("so(" + std::to_string(N) + ")", N, so_generators(N));
    std::vector<CMatrix> gens;
    for (const auto& x : unitary_generators(n, true)) {
        gens.push_back(embed(realify(x), N, 0));
    }
    pair.h = LieAlgebraBasis("u(" + std::to_string(n) + ")", N, gens);
    pair.involution = InvolutionDescriptor::identity();
    pair.expected_q_dim = n * n + n;
    return pair;
}

inline SphericalPair build_spn_spn1u1(std::size_t n) {
    const std::size_t N = 2 * n;
    SphericalPair pair;
    pair.family = Family::VI;
    pair.g = LieAlgebraBasis("sp(" + std::to_string(n) + ")", N, sp_generators(n, N, iota_index(N)));
    std::vector<CMatrix> gens;
    gens.push_back(unit(N, 0, 0, kI) - unit(N, n, n, kI));
    if (n > 1) {
        std::vector<std::size_t> index;
        for (std::size_t k = 1; k < n; ++k) {
            index.push_back(k);
        }
        for (std::size_t k = 1; k < n; ++k) {
            index.push_back(n + k);
        }
        const auto sub = sp_generators(n - 1, N, index);
        gens.insert(gens.end(), sub.begin(), sub.end());
    }
    pair.h = LieAlgebraBasis("sp(" + std::to_string(n - 1) + ")+u(1)", N, gens);
    pair.involution = InvolutionDescriptor::identity();
    pair.expected_q_dim = 4 * n - 2;
    return pair;
}

inline SphericalPair build_negative_control() {
    SphericalPair pair;
    pair.family = Family::none;
    pair.status = PairStatus::negative_control;
    pair.g = LieAlgebraBasis("su(3)", 3, unitary_generators(3, false));
    pair.h = LieAlgebraBasis("t2", 3, {unit(3, 0, 0, kI) - unit(3, 1, 1, kI), unit(3, 1, 1, kI) - unit(3, 2, 2, kI)});
    pair.involution = InvolutionDescriptor::entrywise_conjugation();
    pair.expected_q_dim = 6;
    return pair;
}

} // namespace detail

/// Resolves parameter overrides against an entry's defaults. Unknown names
/// are rejected.
inline std::map<std::string, int> resolve_params(const CatalogEntry& entry, const std::map<std::string, int>& overrides) {
    std::map<std::string, int> out;
    for (const auto& p : entry.params) {
        out[p.name] = p.default_value;
    }
    for (const auto& [name, value] : overrides) {
        if (!out.contains(name)) {
            throw ConstraintError("pair " + entry.id + " has no parameter '" + name + "'");
        }
        out[name] = value;
    }
    return out;
}

/// Checks the structural invariants every catalog pair must satisfy.
inline void validate_pair(const SphericalPair& pair) {
    if (pair.q.dim() != pair.expected_q_dim) {
        throw ConstraintError(pair.id + ": dim q = " + std::to_string(pair.q.dim()) + ", expected " +
                              std::to_string(pair.expected_q_dim));
    }
    for (const auto* s : {&pair.g.space, &pair.h.space}) {
        for (const auto& e : s->basis()) {
            const CMatrix t = pair.involution.apply(e);
            if (s->residual(t) > 1e-9) {
                throw InvolutionError(pair.id + ": involution does not preserve " +
                                      (s == &pair.g.space ? pair.g.name : pair.h.name));
            }
        }
    }
}

/// Builds the pair `id` with parameter overrides applied to the defaults.
inline SphericalPair build_pair(const std::string& id, const std::map<std::string, int>& overrides = {}) {
    using detail::require;
    const CatalogEntry* entry = find_entry(id);
    if (entry == nullptr) {
        throw ConstraintError("unknown pair id '" + id + "'");
    }
    if (entry->status == PairStatus::excluded) {
        throw ConstraintError(id + " is excluded: no desk-scale matrix model");
    }
    const auto params = resolve_params(*entry, overrides);
    auto get = [&](const char* name) { return params.at(name); };

    SphericalPair pair;
    if (id == "I-grassmann") {
        require(get("n") >= 1 && get("m") >= 1 && get("n") + get("m") <= 7, id + ": requires n>=1, m>=1, n+m<=7");
        pair = detail::build_grassmann(std::size_t(get("n")), std::size_t(get("m")));
    } else if (id == "I-so8-su2sp2") {
        pair = detail::build_so8_su2sp2();
    } else if (id == "II-su") {
        require(get("n") > get("m") && get("m") >= 1, id + ": requires n>m>=1");
        require(get("n") + get("m") <= 7, id + ": requires n+m<=7 (desk scale)");
        pair = su_hermitian_model(std::size_t(get("n")), std::size_t(get("m")));
    } else if (id == "II-so2n-sun") {
        require(get("n") >= 3 && get("n") % 2 == 1, id + ": requires n>=3, n odd");
        require(get("n") <= 5, id + ": requires n<=5 (desk scale)");
        pair = detail::build_so2n_sun(std::size_t(get("n")));
    } else if (id == "III-su-sp" || id == "III-su-spu1") {
        require(get("n") >= 1, id + ": requires n>=1");
        require(get("n") <= 3, id + ": requires n<=3 (desk scale)");
        pair = detail::build_family3(std::size_t(get("n")), id == "III-su-spu1");
    } else if (id == "IV-so8-spin7") {
        pair.family = Family::IV;
        pair.g = LieAlgebraBasis("so(8)", 8, so_generators(8));
        pair.h = spin7_in_so8();
        pair.expected_q_dim = 7;
    } else if (id == "IV-so7-g2") {
        pair.family = Family::IV;
        pair.g = LieAlgebraBasis("so(7)", 7, so_generators(7));
        pair.h = g2_basis();
        pair.expected_q_dim = 7;
    } else if (id == "IV-g2-a2") {
        pair.family = Family::IV;
        pair.g = g2_basis();
        pair.h = su3_in_g2(Octonion::unit(1));
        pair.expected_q_dim = 6;
    } else if (id == "V-so10-so2spin7") {
        pair.family = Family::V;
        pair.g = LieAlgebraBasis("so(10)", 10, so_generators(10));
        auto gens = embed_all(spin7_in_so8().basis(), 10, 0);
        gens.push_back(unit(10, 8, 9) - unit(10, 9, 8));
        pair.h = LieAlgebraBasis("so(2)+spin(7)", 10, gens);
        pair.expected_q_dim = 23;
    } else if (id == "V-so9-spin7") {
        pair.family = Family::V;
        pair.g = LieAlgebraBasis("so(9)", 9, so_generators(9));
        pair.h = LieAlgebraBasis("spin(7)", 9, embed_all(spin7_in_so8().basis(), 9, 0));
        pair.expected_q_dim = 15;
    } else if (id == "V-so8-g2") {
        pair.family = Family::V;
        pair.g = LieAlgebraBasis("so(8)", 8, so_generators(8));
        pair.h = LieAlgebraBasis("g2", 8, embed_all(g2_basis().basis(), 8, 1));
        pair.expected_q_dim = 14;
    } else if (id == "VI-so2n1-un") {
        require(get("n") >= 2, id + ": requires n>=2");
        require(get("n") <= 4, id + ": requires n<=4 (desk scale)");
        pair = detail::build_so2n1_un(std::size_t(get("n")));
    } else if (id == "VI-spn-spn1u1") {
        require(get("n") >= 1, id + ": requires n>=1");
        require(get("n") <= 4, id + ": requires n<=4 (desk scale)");
        pair = detail::build_spn_spn1u1(std::size_t(get("n")));
    } else if (id == "negative-control-su3-torus") {
        pair = detail::build_negative_control();
    } else {
        throw ConstraintError("no builder for '" + id + "'");
    }
    pair.id = id;
    pair.family = entry->family;
    pair.status = entry->status;
    pair.params = params;
    pair.q = reductive_split(pair.g, pair.h);
    validate_pair(pair);
    return pair;
}

/// d theta(X), checked to stay inside g.
inline CMatrix d_theta(const SphericalPair& pair, const CMatrix& x) {
    const CMatrix t = pair.involution.apply(x);
    if (pair.g.space.residual(t) > 1e-9) {
        throw InvolutionError(pair.id + ": d theta leaves " + pair.g.name);
    }
    return t;
}

inline std::string params_label(const std::map<std::string, int>& params) {
    std::string s;
    for (const auto& [k, v] : params) {
        s += (s.empty() ? "" : ",") + k + "=" + std::to_string(v);
    }
    return s;
}

} // namespace wsym
