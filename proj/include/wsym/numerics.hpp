#pragma once

// Dense matrix kernels for the small (<= ~20x20) real and complex matrices
// used throughout the library: exponential, Hermitian eigendecomposition,
// SVD, nullspace extraction and Gram-Schmidt.
//
// All kernels take their inputs by const reference and return fresh values.

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstddef>
#include <initializer_list>
#include <limits>
#include <numeric>
#include <span>
#include <stdexcept>
#include <string>
#include <type_traits>
#include <utility>
#include <vector>

namespace wsym {

using cplx = std::complex<double>;

class DimensionError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

namespace detail {

template <typename T>
struct is_complex : std::false_type {};
template <typename T>
struct is_complex<std::complex<T>> : std::true_type {};

template <typename T>
inline T conj_of(const T& v) {
    if constexpr (is_complex<T>::value) {
        return std::conj(v);
    } else {
        return v;
    }
}

template <typename T>
inline double abs2(const T& v) {
    if constexpr (is_complex<T>::value) {
        return std::norm(v);
    } else {
        return v * v;
    }
}

template <typename T>
inline double real_of(const T& v) {
    if constexpr (is_complex<T>::value) {
        return v.real();
    } else {
        return v;
    }
}

} // namespace detail

/// Dense row-major matrix over double or std::complex<double>.
template <typename T>
class Matrix {
public:
    using value_type = T;

    Matrix() = default;
    Matrix(std::size_t rows, std::size_t cols) : rows_(rows), cols_(cols), data_(rows * cols, T{}) {}
    Matrix(std::size_t rows, std::size_t cols, std::vector<T> data)
        : rows_(rows), cols_(cols), data_(std::move(data)) {
        if (data_.size() != rows_ * cols_) {
            throw DimensionError("Matrix: data size does not match shape");
        }
    }
    Matrix(std::initializer_list<std::initializer_list<T>> rows) {
        rows_ = rows.size();
        cols_ = rows_ == 0 ? 0 : rows.begin()->size();
        data_.reserve(rows_ * cols_);
        for (const auto& r : rows) {
            if (r.size() != cols_) {
                throw DimensionError("Matrix: ragged initializer");
            }
            data_.insert(data_.end(), r.begin(), r.end());
        }
    }

    static Matrix identity(std::size_t n) {
        Matrix m(n, n);
        for (std::size_t i = 0; i < n; ++i) {
            m(i, i) = T{1};
        }
        return m;
    }
    static Matrix zeros(std::size_t rows, std::size_t cols) { return Matrix(rows, cols); }

    std::size_t rows() const noexcept { return rows_; }
    std::size_t cols() const noexcept { return cols_; }
    bool is_square() const noexcept { return rows_ == cols_; }
    bool empty() const noexcept { return data_.empty(); }

    T& operator()(std::size_t i, std::size_t j) { return data_[i * cols_ + j]; }
    const T& operator()(std::size_t i, std::size_t j) const { return data_[i * cols_ + j]; }

    std::span<T> data() noexcept { return data_; }
    std::span<const T> data() const noexcept { return data_; }

    Matrix& operator+=(const Matrix& o) {
        require_same_shape(o, "+=");
        for (std::size_t k = 0; k < data_.size(); ++k) {
            data_[k] += o.data_[k];
        }
        return *this;
    }
    Matrix& operator-=(const Matrix& o) {
        require_same_shape(o, "-=");
        for (std::size_t k = 0; k < data_.size(); ++k) {
            data_[k] -= o.data_[k];
        }
        return *this;
    }
    Matrix& operator*=(const T& s) {
        for (auto& v : data_) {
            v *= s;
        }
        return *this;
    }

    friend Matrix operator+(Matrix a, const Matrix& b) { return a += b; }
    friend Matrix operator-(Matrix a, const Matrix& b) { return a -= b; }
    friend Matrix operator-(Matrix a) {
        for (auto& v : a.data_) {
            v = -v;
        }
        return a;
    }
    friend Matrix operator*(Matrix a, const T& s) { return a *= s; }
    friend Matrix operator*(const T& s, Matrix a) { return a *= s; }

    friend Matrix operator*(const Matrix& a, const Matrix& b) {
        if (a.cols_ != b.rows_) {
            throw DimensionError("Matrix product: inner dimensions differ (" + std::to_string(a.cols_) +
                                 " vs " + std::to_string(b.rows_) + ")");
        }
        Matrix c(a.rows_, b.cols_);
        for (std::size_t i = 0; i < a.rows_; ++i) {
            T* crow = &c.data_[i * c.cols_];
            for (std::size_t k = 0; k < a.cols_; ++k) {
                const T aik = a.data_[i * a.cols_ + k];
                if (aik == T{}) {
                    continue;
                }
                const T* brow = &b.data_[k * b.cols_];
                for (std::size_t j = 0; j < b.cols_; ++j) {
                    crow[j] += aik * brow[j];
                }
            }
        }
        return c;
    }

    Matrix transpose() const {
        Matrix t(cols_, rows_);
        for (std::size_t i = 0; i < rows_; ++i) {
            for (std::size_t j = 0; j < cols_; ++j) {
                t(j, i) = (*this)(i, j);
            }
        }
        return t;
    }
    /// Conjugate transpose.
    Matrix adjoint() const {
        Matrix t(cols_, rows_);
        for (std::size_t i = 0; i < rows_; ++i) {
            for (std::size_t j = 0; j < cols_; ++j) {
                t(j, i) = detail::conj_of((*this)(i, j));
            }
        }
        return t;
    }
    Matrix conj() const {
        Matrix c(*this);
        for (auto& v : c.data_) {
            v = detail::conj_of(v);
        }
        return c;
    }

    T trace() const {
        T t{};
        for (std::size_t i = 0; i < std::min(rows_, cols_); ++i) {
            t += (*this)(i, i);
        }
        return t;
    }

    /// Frobenius norm.
    double norm() const {
        double s = 0.0;
        for (const auto& v : data_) {
            s += detail::abs2(v);
        }
        return std::sqrt(s);
    }
    double max_abs() const {
        double m = 0.0;
        for (const auto& v : data_) {
            m = std::max(m, std::sqrt(detail::abs2(v)));
        }
        return m;
    }
    bool is_finite() const {
        for (const auto& v : data_) {
            if (!std::isfinite(detail::real_of(v))) {
                return false;
            }
            if constexpr (detail::is_complex<T>::value) {
                if (!std::isfinite(v.imag())) {
                    return false;
                }
            }
        }
        return true;
    }
    /// True when every entry has zero imaginary part (always true for real matrices).
    bool is_real(double tol = 0.0) const {
        if constexpr (detail::is_complex<T>::value) {
            for (const auto& v : data_) {
                if (std::abs(v.imag()) > tol) {
                    return false;
                }
            }
        }
        return true;
    }

    friend bool operator==(const Matrix& a, const Matrix& b) {
        return a.rows_ == b.rows_ && a.cols_ == b.cols_ && a.data_ == b.data_;
    }

private:
    void require_same_shape(const Matrix& o, const char* op) const {
        if (rows_ != o.rows_ || cols_ != o.cols_) {
            throw DimensionError(std::string("Matrix ") + op + ": shape mismatch");
        }
    }

    std::size_t rows_ = 0;
    std::size_t cols_ = 0;
    std::vector<T> data_;
};

using CMatrix = Matrix<cplx>;
using RMatrix = Matrix<double>;

inline CMatrix to_complex(const RMatrix& m) {
    CMatrix c(m.rows(), m.cols());
    for (std::size_t i = 0; i < m.rows(); ++i) {
        for (std::size_t j = 0; j < m.cols(); ++j) {
            c(i, j) = m(i, j);
        }
    }
    return c;
}

/// Largest entry-wise distance, used for "within tol" assertions.
template <typename T>
double max_abs_diff(const Matrix<T>& a, const Matrix<T>& b) {
    return (a - b).max_abs();
}

/// e^A by scaling and squaring with a truncated Taylor series.
template <typename T>
Matrix<T> mat_exp(const Matrix<T>& a) {
    if (!a.is_square()) {
        throw DimensionError("mat_exp: matrix is not square");
    }
    const std::size_t n = a.rows();
    // Scale so that the 1-norm is at most 1/2; 18 Taylor terms then reach
    // double precision.
    double one_norm = 0.0;
    for (std::size_t j = 0; j < n; ++j) {
        double s = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
            s += std::sqrt(detail::abs2(a(i, j)));
        }
        one_norm = std::max(one_norm, s);
    }
    int squarings = 0;
    if (one_norm > 0.5) {
        squarings = static_cast<int>(std::ceil(std::log2(one_norm / 0.5)));
    }
    const Matrix<T> scaled = a * T{std::ldexp(1.0, -squarings)};

    Matrix<T> result = Matrix<T>::identity(n);
    Matrix<T> term = Matrix<T>::identity(n);
    for (int k = 1; k <= 18; ++k) {
        term = term * scaled;
        term *= T{1.0 / k};
        result += term;
        if (term.max_abs() < 1e-18) {
            break;
        }
    }
    for (int s = 0; s < squarings; ++s) {
        result = result * result;
    }
    return result;
}

template <typename T>
struct EigenDecomposition {
    std::vector<double> values; // ascending
    Matrix<T> vectors;          // columns
};

/// Hermitian (or real symmetric) eigendecomposition by cyclic two-sided Jacobi.
template <typename T>
EigenDecomposition<T> hermitian_eig(const Matrix<T>& input) {
    if (!input.is_square()) {
        throw DimensionError("hermitian_eig: matrix is not square");
    }
    const std::size_t n = input.rows();
    Matrix<T> a = input;
    // Symmetrize to remove round-off asymmetry.
    for (std::size_t i = 0; i < n; ++i) {
        a(i, i) = T{detail::real_of(a(i, i))};
        for (std::size_t j = i + 1; j < n; ++j) {
            const T avg = (a(i, j) + detail::conj_of(a(j, i))) * T{0.5};
            a(i, j) = avg;
            a(j, i) = detail::conj_of(avg);
        }
    }
    Matrix<T> v = Matrix<T>::identity(n);
    const double scale = std::max(a.norm(), std::numeric_limits<double>::min());

    for (int sweep = 0; sweep < 100; ++sweep) {
        double off = 0.0;
        for (std::size_t p = 0; p < n; ++p) {
            for (std::size_t q = p + 1; q < n; ++q) {
                off += detail::abs2(a(p, q));
            }
        }
        if (std::sqrt(off) <= 1e-17 * scale) {
            break;
        }
        for (std::size_t p = 0; p < n; ++p) {
            for (std::size_t q = p + 1; q < n; ++q) {
                const double gabs = std::sqrt(detail::abs2(a(p, q)));
                if (gabs <= 1e-300) {
                    continue;
                }
                // Phase that makes the (p,q) entry real and positive.
                T phase{1};
                if constexpr (detail::is_complex<T>::value) {
                    phase = a(p, q) / gabs;
                } else {
                    phase = a(p, q) > 0 ? 1.0 : -1.0;
                }
                const double app = detail::real_of(a(p, p));
                const double aqq = detail::real_of(a(q, q));
                const double theta = (aqq - app) / (2.0 * gabs);
                const double t = (theta >= 0 ? 1.0 : -1.0) / (std::abs(theta) + std::sqrt(theta * theta + 1.0));
                const double c = 1.0 / std::sqrt(t * t + 1.0);
                const double s = t * c;
                // G = diag(1, conj(phase)) * [[c, s], [-s, c]] acting on columns p, q.
                const T g_pp{c};
                const T g_pq{s};
                const T g_qp = -s * detail::conj_of(phase);
                const T g_qq = c * detail::conj_of(phase);
                // A <- A G
                for (std::size_t k = 0; k < n; ++k) {
                    const T akp = a(k, p);
                    const T akq = a(k, q);
                    a(k, p) = akp * g_pp + akq * g_qp;
                    a(k, q) = akp * g_pq + akq * g_qq;
                }
                // A <- G^* A
                for (std::size_t k = 0; k < n; ++k) {
                    const T apk = a(p, k);
                    const T aqk = a(q, k);
                    a(p, k) = detail::conj_of(g_pp) * apk + detail::conj_of(g_qp) * aqk;
                    a(q, k) = detail::conj_of(g_pq) * apk + detail::conj_of(g_qq) * aqk;
                }
                a(p, q) = T{};
                a(q, p) = T{};
                a(p, p) = T{detail::real_of(a(p, p))};
                a(q, q) = T{detail::real_of(a(q, q))};
                for (std::size_t k = 0; k < n; ++k) {
                    const T vkp = v(k, p);
                    const T vkq = v(k, q);
                    v(k, p) = vkp * g_pp + vkq * g_qp;
                    v(k, q) = vkp * g_pq + vkq * g_qq;
                }
            }
        }
    }

    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), 0);
    std::sort(order.begin(), order.end(), [&](std::size_t i, std::size_t j) {
        return detail::real_of(a(i, i)) < detail::real_of(a(j, j));
    });
    EigenDecomposition<T> out;
    out.values.resize(n);
    out.vectors = Matrix<T>(n, n);
    for (std::size_t k = 0; k < n; ++k) {
        out.values[k] = detail::real_of(a(order[k], order[k]));
        for (std::size_t i = 0; i < n; ++i) {
            out.vectors(i, k) = v(i, order[k]);
        }
    }
    return out;
}

template <typename T>
struct SvdResult {
    std::vector<double> singular_values; // descending
    Matrix<T> v;                         // right singular vectors as columns (n x n)
};

namespace detail {

// Column-major working copy: cols[j] is the j-th column.
template <typename T>
using Columns = std::vector<std::vector<T>>;

template <typename T>
Columns<T> to_columns(const Matrix<T>& m) {
    Columns<T> cols(m.cols(), std::vector<T>(m.rows()));
    for (std::size_t i = 0; i < m.rows(); ++i) {
        for (std::size_t j = 0; j < m.cols(); ++j) {
            cols[j][i] = m(i, j);
        }
    }
    return cols;
}

// Householder QR, returning the n x n upper-triangular factor (as columns).
// Only used to shrink tall systems before one-sided Jacobi; the singular
// values and right singular vectors of R equal those of the input.
template <typename T>
Columns<T> householder_r(Columns<T> cols, std::size_t m) {
    const std::size_t n = cols.size();
    const std::size_t steps = std::min(m, n);
    std::vector<T> w(m);
    for (std::size_t k = 0; k < steps; ++k) {
        auto& ck = cols[k];
        double tail = 0.0;
        for (std::size_t i = k; i < m; ++i) {
            tail += abs2(ck[i]);
        }
        const double alpha_abs = std::sqrt(tail);
        if (alpha_abs == 0.0) {
            continue;
        }
        T phase{1};
        const double lead = std::sqrt(abs2(ck[k]));
        if (lead > 0) {
            phase = ck[k] / lead;
        }
        const T alpha = -phase * alpha_abs;
        for (std::size_t i = k; i < m; ++i) {
            w[i] = ck[i];
        }
        w[k] -= alpha;
        double wn = 0.0;
        for (std::size_t i = k; i < m; ++i) {
            wn += abs2(w[i]);
        }
        if (wn == 0.0) {
            continue;
        }
        // Apply (I - 2 w w^* / |w|^2) to columns k..n-1.
        for (std::size_t j = k; j < n; ++j) {
            auto& cj = cols[j];
            T dot{};
            for (std::size_t i = k; i < m; ++i) {
                dot += conj_of(w[i]) * cj[i];
            }
            const T f = dot * T{2.0 / wn};
            for (std::size_t i = k; i < m; ++i) {
                cj[i] -= f * w[i];
            }
        }
    }
    // Truncate to the leading n rows (or fewer when m < n).
    const std::size_t keep = std::min(m, n);
    for (auto& c : cols) {
        c.resize(keep);
    }
    return cols;
}

} // namespace detail

/// Singular values and right singular vectors by one-sided (Hestenes) Jacobi.
/// Tall inputs are first reduced to their triangular QR factor.
template <typename T>
SvdResult<T> svd(const Matrix<T>& m) {
    const std::size_t n = m.cols();
    auto cols = detail::to_columns(m);
    std::size_t len = m.rows();
    if (m.rows() > n) {
        cols = detail::householder_r(std::move(cols), m.rows());
        len = n;
    }
    detail::Columns<T> v(n, std::vector<T>(n, T{}));
    for (std::size_t j = 0; j < n; ++j) {
        v[j][j] = T{1};
    }

    for (int sweep = 0; sweep < 80; ++sweep) {
        bool rotated = false;
        for (std::size_t p = 0; p + 1 < n; ++p) {
            for (std::size_t q = p + 1; q < n; ++q) {
                auto& cp = cols[p];
                auto& cq = cols[q];
                double alpha = 0.0;
                double beta = 0.0;
                T gamma{};
                for (std::size_t i = 0; i < len; ++i) {
                    alpha += detail::abs2(cp[i]);
                    beta += detail::abs2(cq[i]);
                    gamma += detail::conj_of(cp[i]) * cq[i];
                }
                const double gabs = std::sqrt(detail::abs2(gamma));
                if (gabs <= 1e-15 * std::sqrt(alpha * beta) || gabs == 0.0) {
                    continue;
                }
                rotated = true;
                const T phase = gamma / gabs;
                const double zeta = (beta - alpha) / (2.0 * gabs);
                const double t = (zeta >= 0 ? 1.0 : -1.0) / (std::abs(zeta) + std::sqrt(1.0 + zeta * zeta));
                const double c = 1.0 / std::sqrt(1.0 + t * t);
                const double s = c * t;
                // [cp cq] <- [cp cq] * [[c, s*phase], [-s*conj(phase), c]]
                const T g_qp = -s * detail::conj_of(phase);
                const T g_pq = s * phase;
                for (std::size_t i = 0; i < len; ++i) {
                    const T xp = cp[i];
                    const T xq = cq[i];
                    cp[i] = c * xp + xq * g_qp;
                    cq[i] = xp * g_pq + c * xq;
                }
                auto& vp = v[p];
                auto& vq = v[q];
                for (std::size_t i = 0; i < n; ++i) {
                    const T xp = vp[i];
                    const T xq = vq[i];
                    vp[i] = c * xp + xq * g_qp;
                    vq[i] = xp * g_pq + c * xq;
                }
            }
        }
        if (!rotated) {
            break;
        }
    }

    std::vector<double> sv(n);
    for (std::size_t j = 0; j < n; ++j) {
        double s = 0.0;
        for (std::size_t i = 0; i < len; ++i) {
            s += detail::abs2(cols[j][i]);
        }
        sv[j] = std::sqrt(s);
    }
    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return sv[a] > sv[b]; });

    SvdResult<T> out;
    out.singular_values.resize(n);
    out.v = Matrix<T>(n, n);
    for (std::size_t k = 0; k < n; ++k) {
        out.singular_values[k] = sv[order[k]];
        for (std::size_t i = 0; i < n; ++i) {
            out.v(i, k) = v[order[k]][i];
        }
    }
    return out;
}

/// Default relative rank tolerance.
inline constexpr double kRankTol = 1e-9;

/// Orthonormal basis of {v : |Mv| <= tol * |M|}, |M| the spectral norm.
template <typename T>
std::vector<std::vector<T>> nullspace(const Matrix<T>& m, double tol = kRankTol) {
    if (!(tol > 0)) {
        throw std::invalid_argument("nullspace: tol must be positive");
    }
    const std::size_t n = m.cols();
    std::vector<std::vector<T>> out;
    if (n == 0) {
        return out;
    }
    const auto s = svd(m);
    const double top = s.singular_values.front();
    for (std::size_t k = 0; k < n; ++k) {
        if (s.singular_values[k] <= tol * top || top == 0.0) {
            std::vector<T> vec(n);
            for (std::size_t i = 0; i < n; ++i) {
                vec[i] = s.v(i, k);
            }
            out.push_back(std::move(vec));
        }
    }
    return out;
}

/// Numerical rank with a relative singular-value threshold.
template <typename T>
std::size_t rank(const Matrix<T>& m, double tol = kRankTol) {
    if (m.cols() == 0 || m.rows() == 0) {
        return 0;
    }
    const auto s = svd(m);
    const double top = s.singular_values.front();
    if (top == 0.0) {
        return 0;
    }
    return static_cast<std::size_t>(std::count_if(s.singular_values.begin(), s.singular_values.end(),
                                                  [&](double v) { return v > tol * top; }));
}

inline constexpr double kDropTol = 1e-10;

/// Real Gram-Schmidt with one re-orthogonalization pass. Vectors whose
/// residual norm falls to kDropTol or below (relative to their input norm,
/// floored at 1) are dropped.
template <typename V, typename Inner>
std::vector<V> orthonormalize(const std::vector<V>& vectors, Inner inner, double drop_tol = kDropTol) {
    std::vector<V> out;
    for (const auto& input : vectors) {
        V w = input;
        const double in_norm = std::sqrt(std::max(inner(input, input), 0.0));
        for (int pass = 0; pass < 2; ++pass) {
            for (const auto& e : out) {
                const double c = inner(e, w);
                w -= e * c;
            }
        }
        const double nrm = std::sqrt(std::max(inner(w, w), 0.0));
        if (nrm <= drop_tol * std::max(1.0, in_norm)) {
            continue;
        }
        w *= (1.0 / nrm);
        out.push_back(std::move(w));
    }
    return out;
}

/// Solves the symmetric positive definite system A x = b by Cholesky.
inline std::vector<double> solve_spd(const RMatrix& a, std::span<const double> b) {
    const std::size_t n = a.rows();
    if (!a.is_square() || b.size() != n) {
        throw DimensionError("solve_spd: shape mismatch");
    }
    RMatrix l(n, n);
    for (std::size_t j = 0; j < n; ++j) {
        double d = a(j, j);
        for (std::size_t k = 0; k < j; ++k) {
            d -= l(j, k) * l(j, k);
        }
        if (!(d > 0)) {
            throw std::domain_error("solve_spd: matrix not positive definite");
        }
        l(j, j) = std::sqrt(d);
        for (std::size_t i = j + 1; i < n; ++i) {
            double s = a(i, j);
            for (std::size_t k = 0; k < j; ++k) {
                s -= l(i, k) * l(j, k);
            }
            l(i, j) = s / l(j, j);
        }
    }
    std::vector<double> y(n);
    for (std::size_t i = 0; i < n; ++i) {
        double s = b[i];
        for (std::size_t k = 0; k < i; ++k) {
            s -= l(i, k) * y[k];
        }
        y[i] = s / l(i, i);
    }
    std::vector<double> x(n);
    for (std::size_t ii = n; ii-- > 0;) {
        double s = y[ii];
        for (std::size_t k = ii + 1; k < n; ++k) {
            s -= l(k, ii) * x[k];
        }
        x[ii] = s / l(ii, ii);
    }
    return x;
}

/// Levenberg-Marquardt step: minimizes |J d + r|^2 + lambda |D d|^2 with D^2
/// the diagonal of J^T J (floored so rank-deficient columns stay solvable).
inline std::vector<double> damped_step(const RMatrix& jac, std::span<const double> r, double lambda) {
    const std::size_t n = jac.cols();
    if (r.size() != jac.rows()) {
        throw DimensionError("damped_step: shape mismatch");
    }
    RMatrix a(n, n);
    std::vector<double> g(n, 0.0);
    for (std::size_t i = 0; i < jac.rows(); ++i) {
        for (std::size_t p = 0; p < n; ++p) {
            const double jp = jac(i, p);
            if (jp == 0.0) {
                continue;
            }
            g[p] -= jp * r[i];
            for (std::size_t q = p; q < n; ++q) {
                a(p, q) += jp * jac(i, q);
            }
        }
    }
    double scale = 0.0;
    for (std::size_t p = 0; p < n; ++p) {
        scale = std::max(scale, a(p, p));
    }
    const double floor = std::max(scale, 1e-300) * 1e-12;
    for (std::size_t p = 0; p < n; ++p) {
        for (std::size_t q = 0; q < p; ++q) {
            a(p, q) = a(q, p);
        }
        a(p, p) += lambda * std::max(a(p, p), floor) + floor;
    }
    return solve_spd(a, g);
}

} // namespace wsym
