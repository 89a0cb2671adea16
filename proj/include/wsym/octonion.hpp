#pragma once

// Octonions and the exceptional algebras built from them: g2 as the
// derivation algebra, spin(7) inside so(8) from left multiplications, and
// the su(3) stabilizer of a unit imaginary octonion inside g2.

#include <wsym/lie.hpp>

#include <array>
#include <cmath>
#include <stdexcept>
#include <vector>

namespace wsym {

/// Coefficients over {1, e1, ..., e7}.
struct Octonion {
    std::array<double, 8> c{};

    static Octonion unit(std::size_t k) {
        Octonion o;
        o.c.at(k) = 1.0;
        return o;
    }
    double norm() const {
        double s = 0.0;
        for (double v : c) {
            s += v * v;
        }
        return std::sqrt(s);
    }
    double real() const { return c[0]; }

    friend Octonion operator+(Octonion a, const Octonion& b) {
        for (std::size_t k = 0; k < 8; ++k) {
            a.c[k] += b.c[k];
        }
        return a;
    }
    friend Octonion operator-(Octonion a, const Octonion& b) {
        for (std::size_t k = 0; k < 8; ++k) {
            a.c[k] -= b.c[k];
        }
        return a;
    }
    friend Octonion operator*(double s, Octonion a) {
        for (auto& v : a.c) {
            v *= s;
        }
        return a;
    }
};

namespace detail {

// Fano convention: e_i e_{i+1} = e_{i+3}, indices 1..7 taken mod 7. The
// seven oriented lines are (1,2,4) (2,3,5) (3,4,6) (4,5,7) (5,6,1) (6,7,2) (7,1,3).
struct OctonionTable {
    std::array<std::array<int, 8>, 8> index{};
    std::array<std::array<int, 8>, 8> sign{};

    OctonionTable() {
        for (int i = 0; i < 8; ++i) {
            index[0][i] = i;
            sign[0][i] = 1;
            index[i][0] = i;
            sign[i][0] = 1;
        }
        for (int i = 1; i < 8; ++i) {
            index[i][i] = 0;
            sign[i][i] = -1;
        }
        auto wrap = [](int k) { return (k - 1) % 7 + 1; };
        for (int i = 1; i <= 7; ++i) {
            const int a = i;
            const int b = wrap(i + 1);
            const int c = wrap(i + 3);
            const std::array<std::array<int, 3>, 3> cyc{{{a, b, c}, {b, c, a}, {c, a, b}}};
            for (const auto& t : cyc) {
                index[t[0]][t[1]] = t[2];
                sign[t[0]][t[1]] = 1;
                index[t[1]][t[0]] = t[2];
                sign[t[1]][t[0]] = -1;
            }
        }
    }
};

inline const OctonionTable& octonion_table() {
    static const OctonionTable table;
    return table;
}

} // namespace detail

inline Octonion oct_mul(const Octonion& x, const Octonion& y) {
    const auto& t = detail::octonion_table();
    Octonion r;
    for (std::size_t i = 0; i < 8; ++i) {
        if (x.c[i] == 0.0) {
            continue;
        }
        for (std::size_t j = 0; j < 8; ++j) {
            r.c[t.index[i][j]] += t.sign[i][j] * x.c[i] * y.c[j];
        }
    }
    return r;
}

inline Octonion oct_conj(Octonion x) {
    for (std::size_t k = 1; k < 8; ++k) {
        x.c[k] = -x.c[k];
    }
    return x;
}

/// L_1..L_7: matrices of x -> e_i x on R^8.
inline std::vector<RMatrix> left_mult_operators() {
    std::vector<RMatrix> out;
    for (std::size_t i = 1; i <= 7; ++i) {
        RMatrix l(8, 8);
        for (std::size_t j = 0; j < 8; ++j) {
            const Octonion col = oct_mul(Octonion::unit(i), Octonion::unit(j));
            for (std::size_t k = 0; k < 8; ++k) {
                l(k, j) = col.c[k];
            }
        }
        out.push_back(std::move(l));
    }
    return out;
}

namespace detail {

inline LieAlgebraBasis build_spin7() {
    const auto l = left_mult_operators();
    std::vector<CMatrix> gens;
    for (std::size_t i = 0; i < 7; ++i) {
        for (std::size_t j = i + 1; j < 7; ++j) {
            gens.push_back(to_complex(l[i] * l[j]));
        }
    }
    return LieAlgebraBasis("spin(7)", 8, gens);
}

} // namespace detail

/// spin(7) in so(8): span of the products L_i L_j, i < j.
inline LieAlgebraBasis spin7_in_so8() {
    static const LieAlgebraBasis cached = detail::build_spin7();
    return cached;
}

/// The 343 x 49 derivation system D(e_i e_j) = D(e_i) e_j + e_i D(e_j),
/// imaginary components only, unknown D a 7 x 7 real matrix stored row-major.
inline RMatrix derivation_system() {
    RMatrix sys(343, 49);
    std::size_t row = 0;
    for (std::size_t i = 1; i <= 7; ++i) {
        for (std::size_t j = 1; j <= 7; ++j) {
            const Octonion p = oct_mul(Octonion::unit(i), Octonion::unit(j));
            for (std::size_t comp = 1; comp <= 7; ++comp, ++row) {
                // D(p): column k of D contributes D(comp-1, k-1) * p_k.
                for (std::size_t k = 1; k <= 7; ++k) {
                    if (p.c[k] != 0.0) {
                        sys(row, (comp - 1) * 7 + (k - 1)) += p.c[k];
                    }
                }
                // -D(e_i) e_j - e_i D(e_j), with D(e_i) = sum_l D(l-1, i-1) e_l.
                for (std::size_t l = 1; l <= 7; ++l) {
                    sys(row, (l - 1) * 7 + (i - 1)) -= oct_mul(Octonion::unit(l), Octonion::unit(j)).c[comp];
                    sys(row, (l - 1) * 7 + (j - 1)) -= oct_mul(Octonion::unit(i), Octonion::unit(l)).c[comp];
                }
            }
        }
    }
    return sys;
}

namespace detail {

inline LieAlgebraBasis build_g2() {
    std::vector<CMatrix> gens;
    for (const auto& v : nullspace(derivation_system())) {
        CMatrix d(7, 7);
        for (std::size_t k = 0; k < 49; ++k) {
            d.data()[k] = v[k];
        }
        gens.push_back(d);
    }
    return LieAlgebraBasis("g2", 7, gens);
}

} // namespace detail

/// g2 on R^7 (the imaginary octonions), as the nullspace of the derivation system.
inline LieAlgebraBasis g2_basis() {
    static const LieAlgebraBasis cached = detail::build_g2();
    return cached;
}

/// Apply a 7 x 7 derivation to the imaginary part of an octonion.
inline Octonion apply_derivation(const CMatrix& d, const Octonion& x) {
    Octonion r;
    for (std::size_t i = 0; i < 7; ++i) {
        double s = 0.0;
        for (std::size_t j = 0; j < 7; ++j) {
            s += d(i, j).real() * x.c[j + 1];
        }
        r.c[i + 1] = s;
    }
    return r;
}

/// su(3) = {D in g2 : D(e) = 0} for a unit imaginary octonion e.
inline LieAlgebraBasis su3_in_g2(const Octonion& e) {
    if (std::abs(e.norm() - 1.0) > 1e-12 || std::abs(e.real()) > 1e-12) {
        throw std::invalid_argument("su3_in_g2: e must be a unit imaginary octonion");
    }
    const LieAlgebraBasis g2 = g2_basis();
    RMatrix sys(7, g2.dim());
    for (std::size_t a = 0; a < g2.dim(); ++a) {
        const Octonion de = apply_derivation(g2.basis()[a], e);
        for (std::size_t k = 0; k < 7; ++k) {
            sys(k, a) = de.c[k + 1];
        }
    }
    std::vector<CMatrix> gens;
    for (const auto& v : nullspace(sys)) {
        gens.push_back(g2.space.from_coords(v));
    }
    return LieAlgebraBasis("su(3)", 7, gens);
}

} // namespace wsym
