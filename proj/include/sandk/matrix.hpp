#pragma once

#include <algorithm>
#include <cstddef>
#include <optional>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include "sandk/error.hpp"
#include "sandk/integer.hpp"

namespace sandk {

/// Dense integer matrix, row-major, exact entries.
class IntegerMatrix {
public:
    IntegerMatrix() = default;
    IntegerMatrix(std::size_t rows, std::size_t cols) : rows_(rows), cols_(cols), data_(rows * cols) {}

    IntegerMatrix(std::initializer_list<std::initializer_list<long long>> rows) {
        rows_ = rows.size();
        cols_ = rows_ ? rows.begin()->size() : 0;
        for (const auto& r : rows) {
            if (r.size() != cols_) detail::fail(ErrorKind::BadParameters, "ragged matrix literal");
            for (long long x : r) data_.emplace_back(x);
        }
    }

    static IntegerMatrix identity(std::size_t n) {
        IntegerMatrix m(n, n);
        for (std::size_t i = 0; i < n; ++i) m(i, i) = 1;
        return m;
    }

    std::size_t rows() const noexcept { return rows_; }
    std::size_t cols() const noexcept { return cols_; }

    BigInt& operator()(std::size_t i, std::size_t j) { return data_[i * cols_ + j]; }
    const BigInt& operator()(std::size_t i, std::size_t j) const { return data_[i * cols_ + j]; }

    friend IntegerMatrix operator*(const IntegerMatrix& a, const IntegerMatrix& b) {
        if (a.cols_ != b.rows_) detail::fail(ErrorKind::BadParameters, "matrix shapes do not multiply");
        IntegerMatrix out(a.rows_, b.cols_);
        for (std::size_t i = 0; i < a.rows_; ++i)
            for (std::size_t k = 0; k < a.cols_; ++k) {
                const BigInt& x = a(i, k);
                if (x == 0) continue;
                for (std::size_t j = 0; j < b.cols_; ++j) out(i, j) += x * b(k, j);
            }
        return out;
    }

    IntegerMatrix transpose() const {
        IntegerMatrix t(cols_, rows_);
        for (std::size_t i = 0; i < rows_; ++i)
            for (std::size_t j = 0; j < cols_; ++j) t(j, i) = (*this)(i, j);
        return t;
    }

    void swap_rows(std::size_t a, std::size_t b) {
        if (a == b) return;
        for (std::size_t j = 0; j < cols_; ++j) std::swap((*this)(a, j), (*this)(b, j));
    }

    void swap_cols(std::size_t a, std::size_t b) {
        if (a == b) return;
        for (std::size_t i = 0; i < rows_; ++i) std::swap((*this)(i, a), (*this)(i, b));
    }

    /// row[dst] += k * row[src]
    void add_row(std::size_t dst, std::size_t src, const BigInt& k) {
        if (k == 0) return;
        for (std::size_t j = 0; j < cols_; ++j) (*this)(dst, j) += k * (*this)(src, j);
    }

    /// col[dst] += k * col[src]
    void add_col(std::size_t dst, std::size_t src, const BigInt& k) {
        if (k == 0) return;
        for (std::size_t i = 0; i < rows_; ++i) (*this)(i, dst) += k * (*this)(i, src);
    }

    void negate_row(std::size_t r) {
        for (std::size_t j = 0; j < cols_; ++j) (*this)(r, j) = -(*this)(r, j);
    }

    bool operator==(const IntegerMatrix&) const = default;

    /// Rows of space-separated integers.
    std::string to_string() const {
        std::ostringstream out;
        for (std::size_t i = 0; i < rows_; ++i) {
            for (std::size_t j = 0; j < cols_; ++j) out << (j ? " " : "") << (*this)(i, j);
            out << '\n';
        }
        return out.str();
    }

private:
    std::size_t rows_ = 0;
    std::size_t cols_ = 0;
    std::vector<BigInt> data_;
};

/// Exact determinant by fraction-free (Bareiss) elimination.
inline BigInt determinant(IntegerMatrix m) {
    if (m.rows() != m.cols()) detail::fail(ErrorKind::BadParameters, "determinant of a non-square matrix");
    const std::size_t n = m.rows();
    if (n == 0) return 1;
    BigInt sign = 1;
    BigInt prev = 1;
    for (std::size_t k = 0; k + 1 < n; ++k) {
        if (m(k, k) == 0) {
            std::size_t r = k + 1;
            while (r < n && m(r, k) == 0) ++r;
            if (r == n) return 0;
            m.swap_rows(k, r);
            sign = -sign;
        }
        for (std::size_t i = k + 1; i < n; ++i)
            for (std::size_t j = k + 1; j < n; ++j) m(i, j) = (m(i, j) * m(k, k) - m(i, k) * m(k, j)) / prev;
        prev = m(k, k);
    }
    return sign * m(n - 1, n - 1);
}

/// Finitely generated abelian group Z_{d1} x ... x Z_{dr} x Z^f with
/// d1 | d2 | ... | dr and every di >= 2.  Equal fields mean isomorphic groups.
struct AbelianGroupInvariants {
    std::vector<BigInt> torsion;
    std::size_t free_rank = 0;

    bool operator==(const AbelianGroupInvariants&) const = default;

    bool is_trivial() const { return torsion.empty() && free_rank == 0; }

    std::optional<BigInt> order() const {
        if (free_rank) return std::nullopt;
        BigInt n = 1;
        for (const auto& d : torsion) n *= d;
        return n;
    }

    /// `Z2 x Z2`, `Z3 x Z`, `0` for the trivial group.
    std::string to_string() const {
        std::string out;
        for (const auto& d : torsion) out += (out.empty() ? "Z" : " x Z") + d.str();
        for (std::size_t i = 0; i < free_rank; ++i) out += out.empty() ? "Z" : " x Z";
        return out.empty() ? "0" : out;
    }
};

/// Invariant factors of Z_{m1} x ... x Z_{mk} for arbitrary non-negative
/// moduli (0 meaning Z, 1 the trivial group).
inline AbelianGroupInvariants invariants_from_moduli(std::vector<BigInt> moduli) {
    AbelianGroupInvariants out;
    std::vector<BigInt> finite;
    for (auto& m : moduli) {
        if (m < 0) m = -m;
        if (m == 0)
            ++out.free_rank;
        else if (m > 1)
            finite.push_back(m);
    }
    // Repeatedly replace (a, b) by (gcd, lcm) until the chain divides.
    bool changed = true;
    while (changed) {
        changed = false;
        for (std::size_t i = 0; i < finite.size(); ++i)
            for (std::size_t j = i + 1; j < finite.size(); ++j) {
                const BigInt g = boost::multiprecision::gcd(finite[i], finite[j]);
                if (g == finite[i]) continue;
                const BigInt l = finite[i] / g * finite[j];
                finite[i] = g;
                finite[j] = l;
                changed = true;
            }
    }
    for (auto& d : finite)
        if (d > 1) out.torsion.push_back(d);
    std::sort(out.torsion.begin(), out.torsion.end());
    return out;
}

struct SmithForm {
    IntegerMatrix U;
    IntegerMatrix S;
    IntegerMatrix V;

    std::vector<BigInt> diagonal() const {
        std::vector<BigInt> d;
        for (std::size_t i = 0; i < std::min(S.rows(), S.cols()); ++i) d.push_back(S(i, i));
        return d;
    }

    /// U * A * V == S, |det U| = |det V| = 1, S diagonal with d1 | d2 | ...
    bool verify(const IntegerMatrix& a) const {
        if (U * a * V != S) return false;
        if (abs(determinant(U)) != 1 || abs(determinant(V)) != 1) return false;
        for (std::size_t i = 0; i < S.rows(); ++i)
            for (std::size_t j = 0; j < S.cols(); ++j)
                if (i != j && S(i, j) != 0) return false;
        const auto d = diagonal();
        for (std::size_t i = 0; i < d.size(); ++i) {
            if (d[i] < 0) return false;
            if (i + 1 < d.size()) {
                if (d[i] == 0 && d[i + 1] != 0) return false;
                if (d[i] != 0 && d[i + 1] % d[i] != 0) return false;
            }
        }
        return true;
    }
};

namespace detail {

struct SmithWork {
    IntegerMatrix s;
    std::optional<IntegerMatrix> u;
    std::optional<IntegerMatrix> v;

    void swap_rows(std::size_t a, std::size_t b) {
        s.swap_rows(a, b);
        if (u) u->swap_rows(a, b);
    }
    void swap_cols(std::size_t a, std::size_t b) {
        s.swap_cols(a, b);
        if (v) v->swap_cols(a, b);
    }
    void add_row(std::size_t dst, std::size_t src, const BigInt& k) {
        s.add_row(dst, src, k);
        if (u) u->add_row(dst, src, k);
    }
    void add_col(std::size_t dst, std::size_t src, const BigInt& k) {
        s.add_col(dst, src, k);
        if (v) v->add_col(dst, src, k);
    }
    void negate_row(std::size_t r) {
        s.negate_row(r);
        if (u) u->negate_row(r);
    }
};

inline void smith_reduce(SmithWork& w) {
    IntegerMatrix& s = w.s;
    const std::size_t m = s.rows();
    const std::size_t n = s.cols();
    for (std::size_t t = 0; t < std::min(m, n); ++t) {
        // Smallest nonzero |entry| of the trailing block becomes the pivot.
        std::optional<std::pair<std::size_t, std::size_t>> best;
        for (std::size_t i = t; i < m; ++i)
            for (std::size_t j = t; j < n; ++j)
                if (s(i, j) != 0 && (!best || abs(s(i, j)) < abs(s(best->first, best->second)))) best = {i, j};
        if (!best) break;
        w.swap_rows(t, best->first);
        w.swap_cols(t, best->second);

        for (;;) {
            bool clean = true;
            for (std::size_t i = t + 1; i < m; ++i) {
                if (s(i, t) == 0) continue;
                w.add_row(i, t, -(s(i, t) / s(t, t)));
                if (s(i, t) != 0) clean = false;
            }
            for (std::size_t j = t + 1; j < n; ++j) {
                if (s(t, j) == 0) continue;
                w.add_col(j, t, -(s(t, j) / s(t, t)));
                if (s(t, j) != 0) clean = false;
            }
            if (!clean) {
                std::size_t bi = t;
                std::size_t bj = t;
                for (std::size_t i = t + 1; i < m; ++i)
                    if (s(i, t) != 0 && abs(s(i, t)) < abs(s(bi, bj))) bi = i, bj = t;
                for (std::size_t j = t + 1; j < n; ++j)
                    if (s(t, j) != 0 && abs(s(t, j)) < abs(s(bi, bj))) bi = t, bj = j;
                w.swap_rows(t, bi);
                w.swap_cols(t, bj);
                continue;
            }
            std::optional<std::size_t> offender;
            for (std::size_t i = t + 1; i < m && !offender; ++i)
                for (std::size_t j = t + 1; j < n; ++j)
                    if (s(i, j) % s(t, t) != 0) {
                        offender = i;
                        break;
                    }
            if (!offender) break;
            w.add_row(t, *offender, 1);
        }
        if (s(t, t) < 0) w.negate_row(t);
    }
}

}  // namespace detail

/// U * A * V = S with U, V unimodular and S diagonal, d1 | d2 | ..., di >= 0.
inline SmithForm smith_normal_form(const IntegerMatrix& a) {
    detail::SmithWork w{a, IntegerMatrix::identity(a.rows()), IntegerMatrix::identity(a.cols())};
    detail::smith_reduce(w);
    return SmithForm{std::move(*w.u), std::move(w.s), std::move(*w.v)};
}

/// Diagonal of the Smith form without the transforms.
inline std::vector<BigInt> smith_diagonal(const IntegerMatrix& a) {
    detail::SmithWork w{a, std::nullopt, std::nullopt};
    detail::smith_reduce(w);
    std::vector<BigInt> d;
    for (std::size_t i = 0; i < std::min(a.rows(), a.cols()); ++i) d.push_back(w.s(i, i));
    return d;
}

/// Z^rows / A Z^cols.
inline AbelianGroupInvariants cokernel(const IntegerMatrix& a) {
    AbelianGroupInvariants out;
    std::size_t nonzero = 0;
    for (const auto& d : smith_diagonal(a)) {
        if (d == 0) continue;
        ++nonzero;
        if (d > 1) out.torsion.push_back(d);
    }
    out.free_rank = a.rows() - nonzero;
    return out;
}

}  // namespace sandk
