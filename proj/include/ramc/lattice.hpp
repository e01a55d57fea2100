#pragma once

#include <algorithm>
#include <cstddef>
#include <initializer_list>
#include <optional>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include <gmpxx.h>

#include "ramc/real.hpp"

namespace ramc::lattice {

/// Dense matrix over Z.
class IntegerMatrix {
  public:
    IntegerMatrix() = default;
    IntegerMatrix(std::size_t rows, std::size_t cols) : r_(rows), c_(cols), a_(rows * cols) {}
    IntegerMatrix(std::initializer_list<std::initializer_list<long>> rows) {
        r_ = rows.size();
        c_ = r_ ? rows.begin()->size() : 0;
        for (const auto& row : rows) {
            if (row.size() != c_) throw std::invalid_argument("ragged matrix");
            for (long v : row) a_.emplace_back(v);
        }
    }
    static IntegerMatrix from_rows(const std::vector<std::vector<long>>& rows, std::size_t cols = 0) {
        IntegerMatrix m(rows.size(), rows.empty() ? cols : rows.front().size());
        for (std::size_t i = 0; i < rows.size(); ++i) {
            if (rows[i].size() != m.c_) throw std::invalid_argument("ragged matrix");
            for (std::size_t j = 0; j < m.c_; ++j) m(i, j) = rows[i][j];
        }
        return m;
    }
    static IntegerMatrix identity(std::size_t n) {
        IntegerMatrix m(n, n);
        for (std::size_t i = 0; i < n; ++i) m(i, i) = 1;
        return m;
    }

    [[nodiscard]] std::size_t rows() const { return r_; }
    [[nodiscard]] std::size_t cols() const { return c_; }
    mpz_class& operator()(std::size_t i, std::size_t j) { return a_[i * c_ + j]; }
    const mpz_class& operator()(std::size_t i, std::size_t j) const { return a_[i * c_ + j]; }

    [[nodiscard]] std::vector<mpz_class> row(std::size_t i) const {
        return {a_.begin() + static_cast<std::ptrdiff_t>(i * c_), a_.begin() + static_cast<std::ptrdiff_t>((i + 1) * c_)};
    }
    void append_row(const std::vector<mpz_class>& v) {
        if (r_ == 0 && c_ == 0) c_ = v.size();
        if (v.size() != c_) throw std::invalid_argument("row length mismatch");
        a_.insert(a_.end(), v.begin(), v.end());
        ++r_;
    }
    [[nodiscard]] bool row_is_zero(std::size_t i) const {
        for (std::size_t j = 0; j < c_; ++j)
            if ((*this)(i, j) != 0) return false;
        return true;
    }
    /// Copy without zero rows.
    [[nodiscard]] IntegerMatrix nonzero_rows() const {
        IntegerMatrix m(0, c_);
        for (std::size_t i = 0; i < r_; ++i)
            if (!row_is_zero(i)) m.append_row(row(i));
        return m;
    }
    [[nodiscard]] IntegerMatrix transpose() const {
        IntegerMatrix t(c_, r_);
        for (std::size_t i = 0; i < r_; ++i)
            for (std::size_t j = 0; j < c_; ++j) t(j, i) = (*this)(i, j);
        return t;
    }
    [[nodiscard]] bool is_zero() const {
        return std::all_of(a_.begin(), a_.end(), [](const mpz_class& v) { return v == 0; });
    }

    void swap_rows(std::size_t i, std::size_t k) {
        for (std::size_t j = 0; j < c_; ++j) std::swap((*this)(i, j), (*this)(k, j));
    }
    void swap_cols(std::size_t j, std::size_t k) {
        for (std::size_t i = 0; i < r_; ++i) std::swap((*this)(i, j), (*this)(i, k));
    }
    /// row i <- row i + m * row k
    void add_row(std::size_t i, std::size_t k, const mpz_class& m) {
        if (m == 0) return;
        for (std::size_t j = 0; j < c_; ++j) (*this)(i, j) += m * (*this)(k, j);
    }
    void add_col(std::size_t j, std::size_t k, const mpz_class& m) {
        if (m == 0) return;
        for (std::size_t i = 0; i < r_; ++i) (*this)(i, j) += m * (*this)(i, k);
    }
    void negate_row(std::size_t i) {
        for (std::size_t j = 0; j < c_; ++j) (*this)(i, j) = -(*this)(i, j);
    }
    void negate_col(std::size_t j) {
        for (std::size_t i = 0; i < r_; ++i) (*this)(i, j) = -(*this)(i, j);
    }
    /// (row i, row k) <- (a row i + b row k, c row i + d row k)
    void combine_rows(std::size_t i, std::size_t k, const mpz_class& a, const mpz_class& b, const mpz_class& c,
                      const mpz_class& d) {
        for (std::size_t j = 0; j < c_; ++j) {
            mpz_class x = (*this)(i, j), y = (*this)(k, j);
            (*this)(i, j) = a * x + b * y;
            (*this)(k, j) = c * x + d * y;
        }
    }
    void combine_cols(std::size_t i, std::size_t k, const mpz_class& a, const mpz_class& b, const mpz_class& c,
                      const mpz_class& d) {
        for (std::size_t r = 0; r < r_; ++r) {
            mpz_class x = (*this)(r, i), y = (*this)(r, k);
            (*this)(r, i) = a * x + b * y;
            (*this)(r, k) = c * x + d * y;
        }
    }

    friend IntegerMatrix operator*(const IntegerMatrix& A, const IntegerMatrix& B) {
        if (A.c_ != B.r_) throw std::invalid_argument("matrix shape mismatch");
        IntegerMatrix C(A.r_, B.c_);
        for (std::size_t i = 0; i < A.r_; ++i)
            for (std::size_t k = 0; k < A.c_; ++k) {
                if (A(i, k) == 0) continue;
                for (std::size_t j = 0; j < B.c_; ++j) C(i, j) += A(i, k) * B(k, j);
            }
        return C;
    }
    friend bool operator==(const IntegerMatrix& A, const IntegerMatrix& B) {
        return A.r_ == B.r_ && A.c_ == B.c_ && A.a_ == B.a_;
    }

    [[nodiscard]] std::string to_string() const {
        std::string s = "[";
        for (std::size_t i = 0; i < r_; ++i) {
            if (i) s += ",";
            s += "[";
            for (std::size_t j = 0; j < c_; ++j) {
                if (j) s += ",";
                s += (*this)(i, j).get_str();
            }
            s += "]";
        }
        return s + "]";
    }

  private:
    std::size_t r_ = 0, c_ = 0;
    std::vector<mpz_class> a_;
};

/// Exact determinant by fraction-free (Bareiss) elimination.
inline mpz_class determinant(IntegerMatrix M) {
    const std::size_t n = M.rows();
    if (n != M.cols()) throw std::invalid_argument("determinant of a non-square matrix");
    if (n == 0) return 1;
    int sign = 1;
    mpz_class prev = 1;
    for (std::size_t k = 0; k + 1 < n; ++k) {
        if (M(k, k) == 0) {
            std::size_t p = k + 1;
            while (p < n && M(p, k) == 0) ++p;
            if (p == n) return 0;
            M.swap_rows(k, p);
            sign = -sign;
        }
        for (std::size_t i = k + 1; i < n; ++i)
            for (std::size_t j = k + 1; j < n; ++j) {
                mpz_class v = M(i, j) * M(k, k) - M(i, k) * M(k, j);
                mpz_divexact(v.get_mpz_t(), v.get_mpz_t(), prev.get_mpz_t());
                M(i, j) = v;
            }
        prev = M(k, k);
    }
    return sign * M(n - 1, n - 1);
}

struct HermiteResult {
    IntegerMatrix H;  ///< U * M, nonzero rows first
    IntegerMatrix U;  ///< unimodular, rows x rows
    std::size_t rank = 0;
};

/// Row-style Hermite normal form: H = U M is in row echelon form with positive
/// pivots, entries above each pivot reduced into [0, pivot), zero rows last.
/// The nonzero rows of H are canonical for the row lattice of M.
inline HermiteResult hermite_normal_form(const IntegerMatrix& M) {
    HermiteResult res{M, IntegerMatrix::identity(M.rows()), 0};
    IntegerMatrix& H = res.H;
    IntegerMatrix& U = res.U;
    const std::size_t m = H.rows(), n = H.cols();
    std::size_t r = 0;
    for (std::size_t col = 0; col < n && r < m; ++col) {
        // fold every lower entry of this column into row r by extended gcds
        for (std::size_t i = r + 1; i < m; ++i) {
            if (H(i, col) == 0) continue;
            mpz_class a = H(r, col), b = H(i, col), g, s, t;
            mpz_gcdext(g.get_mpz_t(), s.get_mpz_t(), t.get_mpz_t(), a.get_mpz_t(), b.get_mpz_t());
            mpz_class u = -b / g, v = a / g;
            H.combine_rows(r, i, s, t, u, v);
            U.combine_rows(r, i, s, t, u, v);
        }
        if (H(r, col) == 0) continue;
        if (H(r, col) < 0) {
            H.negate_row(r);
            U.negate_row(r);
        }
        for (std::size_t i = 0; i < r; ++i) {
            mpz_class qt;
            mpz_fdiv_q(qt.get_mpz_t(), H(i, col).get_mpz_t(), H(r, col).get_mpz_t());
            H.add_row(i, r, -qt);
            U.add_row(i, r, -qt);
        }
        ++r;
    }
    res.rank = r;
    return res;
}

/// Nonzero rows of the HNF: the canonical basis of the row lattice.
inline IntegerMatrix hnf_basis(const IntegerMatrix& M) { return hermite_normal_form(M).H.nonzero_rows(); }

struct SmithResult {
    std::vector<mpz_class> divisors;  ///< min(rows, cols) entries, d1 | d2 | ..., zeros last
    IntegerMatrix U, V;               ///< U M V = diag(divisors)
};

/// Smith normal form with unimodular transforms.
inline SmithResult smith_normal_form(const IntegerMatrix& M) {
    const std::size_t m = M.rows(), n = M.cols();
    IntegerMatrix A = M, U = IntegerMatrix::identity(m), V = IntegerMatrix::identity(n);
    const std::size_t k = std::min(m, n);
    for (std::size_t t = 0; t < k; ++t) {
        bool empty = false;
        while (true) {
            // pivot: smallest nonzero |entry| of the remaining block
            std::size_t pi = m, pj = n;
            for (std::size_t i = t; i < m; ++i)
                for (std::size_t j = t; j < n; ++j)
                    if (A(i, j) != 0 && (pi == m || abs(A(i, j)) < abs(A(pi, pj)))) { pi = i; pj = j; }
            if (pi == m) { empty = true; break; }
            A.swap_rows(t, pi);
            U.swap_rows(t, pi);
            A.swap_cols(t, pj);
            V.swap_cols(t, pj);
            // division steps leave remainders smaller than the pivot
            bool clean = true;
            for (std::size_t i = t + 1; i < m; ++i) {
                mpz_class qt = A(i, t) / A(t, t);
                A.add_row(i, t, -qt);
                U.add_row(i, t, -qt);
                if (A(i, t) != 0) clean = false;
            }
            for (std::size_t j = t + 1; j < n; ++j) {
                mpz_class qt = A(t, j) / A(t, t);
                A.add_col(j, t, -qt);
                V.add_col(j, t, -qt);
                if (A(t, j) != 0) clean = false;
            }
            if (!clean) continue;
            // the pivot must divide the whole remaining block
            std::size_t bad = m;
            for (std::size_t i = t + 1; i < m && bad == m; ++i)
                for (std::size_t j = t + 1; j < n; ++j)
                    if (A(i, j) % A(t, t) != 0) { bad = i; break; }
            if (bad == m) break;
            A.add_row(t, bad, 1);
            U.add_row(t, bad, 1);
        }
        if (empty) break;
        if (A(t, t) < 0) {
            A.negate_row(t);
            U.negate_row(t);
        }
    }
    SmithResult res;
    for (std::size_t t = 0; t < k; ++t) res.divisors.push_back(A(t, t));
    res.U = std::move(U);
    res.V = std::move(V);
    return res;
}

/// Index of a sublattice of Z^rank; `infinite` when the generators do not
/// span a full-rank lattice.
struct LatticeIndex {
    bool infinite = false;
    mpz_class value = 1;

    [[nodiscard]] std::string to_string() const { return infinite ? "Infinite" : value.get_str(); }
    friend bool operator==(const LatticeIndex&, const LatticeIndex&) = default;
};

inline LatticeIndex sublattice_index(const IntegerMatrix& generators) {
    const std::size_t n = generators.cols();
    if (generators.rows() < n) return {true, 0};
    auto snf = smith_normal_form(generators);
    LatticeIndex idx;
    for (const auto& d : snf.divisors) {
        if (d == 0) return {true, 0};
        idx.value *= d;
    }
    return idx;
}

inline LatticeIndex sublattice_index(const std::vector<std::vector<long>>& generators, std::size_t ambient_rank) {
    for (const auto& g : generators)
        if (g.size() != ambient_rank) throw std::invalid_argument("generator length differs from the ambient rank");
    return sublattice_index(IntegerMatrix::from_rows(generators, ambient_rank));
}

/// Logarithm vector of a unit: one coordinate per real embedding used.
struct UnitLogVector {
    std::string label;
    std::vector<Real> coords;

    UnitLogVector() = default;
    UnitLogVector(std::string l, std::vector<Real> c) : label(std::move(l)), coords(std::move(c)) {}
    UnitLogVector(std::string l, Real v) : label(std::move(l)) { coords.push_back(std::move(v)); }
};

class NoRelationWithinBound : public std::runtime_error {
  public:
    NoRelationWithinBound(const std::string& target, long bound)
        : std::runtime_error("no integer relation for " + target + " with coefficients bounded by " + std::to_string(bound)),
          target_label(target) {}
    std::string target_label;
};

struct SearchOptions {
    long bound = 12;
    double tol = 1e-6;
};

/// max over coordinates |target - sum a_i basis_i|
inline Real relation_residual(const UnitLogVector& target, const std::vector<UnitLogVector>& basis,
                              const std::vector<mpz_class>& a) {
    Real worst = Real::from_bits(target.coords.front().bits());
    for (std::size_t c = 0; c < target.coords.size(); ++c) {
        Real x = target.coords[c];
        for (std::size_t i = 0; i < basis.size(); ++i) {
            Real t = basis[i].coords[c];
            mpfr_mul_z(t.raw(), t.raw(), a[i].get_mpz_t(), MPFR_RNDN);
            x -= t;
        }
        Real ax = abs(x);
        if (worst < ax) worst = ax;
    }
    return worst;
}

namespace detail {

/// First (lexicographic in a_0, a_1, ...) exponent vector in [-B, B]^n with
/// |target - sum a_i basis_i| < tol. The last coordinate is solved for by
/// rounding rather than enumerated, which visits the same candidates.
inline std::optional<std::vector<mpz_class>> box_search(const UnitLogVector& target, const std::vector<UnitLogVector>& basis,
                                                        const SearchOptions& opt) {
    const std::size_t n = basis.size();
    const Real tol(Real::parse(std::to_string(opt.tol), Precision{30}));
    if (n == 0) {
        for (const auto& c : target.coords)
            if (!(abs(c) < tol)) return std::nullopt;
        return std::vector<mpz_class>{};
    }
    std::vector<long> a(n - 1, -opt.bound);
    std::vector<mpz_class> cand(n);
    const Real& last = basis[n - 1].coords.front();
    const bool last_small = abs(last) < tol;
    while (true) {
        Real rest = target.coords.front();
        for (std::size_t i = 0; i + 1 < n; ++i) rest -= basis[i].coords.front() * a[i];
        std::vector<long> lasts;
        if (last_small) {
            for (long c = -opt.bound; c <= opt.bound; ++c) lasts.push_back(c);
        } else {
            mpz_class c = (rest / last).round();
            if (abs(c) <= opt.bound) lasts.push_back(c.get_si());
        }
        for (long c : lasts) {
            for (std::size_t i = 0; i + 1 < n; ++i) cand[i] = a[i];
            cand[n - 1] = c;
            if (relation_residual(target, basis, cand) < tol) return cand;
        }
        std::size_t i = 0;
        while (i + 1 < n && a[i] == opt.bound) a[i++] = -opt.bound;
        if (i + 1 >= n) break;
        ++a[i];
    }
    return std::nullopt;
}

}  // namespace detail

struct RelationResult {
    IntegerMatrix rows;  ///< one exponent row per target, raw
    IntegerMatrix hnf;   ///< canonical basis of the row lattice
    std::vector<Real> residuals;
};

/// For each target, exponents a with |sum a_i basis_i - target| < tol and
/// |a_i| <= bound. Each hit is re-verified by recomputing the residual.
inline RelationResult find_integer_relations(const std::vector<UnitLogVector>& targets, const std::vector<UnitLogVector>& basis,
                                             const SearchOptions& opt = {}) {
    if (opt.bound < 1) throw std::invalid_argument("relation bound must be positive");
    RelationResult res;
    res.rows = IntegerMatrix(0, basis.size());
    for (const auto& t : targets) {
        auto hit = detail::box_search(t, basis, opt);
        if (!hit) throw NoRelationWithinBound(t.label, opt.bound);
        res.residuals.push_back(relation_residual(t, basis, *hit));
        res.rows.append_row(*hit);
    }
    res.hnf = hnf_basis(res.rows);
    return res;
}

struct Dependency {
    std::size_t index;             ///< position in the input list
    std::vector<mpz_class> coeffs;  ///< over the selected basis
};

struct BasisReduction {
    std::vector<std::size_t> basis;
    std::vector<Dependency> dependencies;
};

class InsufficientRank : public std::runtime_error {
  public:
    using std::runtime_error::runtime_error;
};

/// Greedy selection of `rank` independent logs in input order; a log is kept
/// unless it is a bounded integer combination of those already kept. All the
/// remaining logs must then be such combinations.
inline BasisReduction reduce_to_basis(const std::vector<UnitLogVector>& logs, const SearchOptions& opt = {}, std::size_t rank = 3) {
    if (logs.size() < rank) throw InsufficientRank("fewer logs than the unit rank");
    BasisReduction out;
    std::vector<UnitLogVector> kept;
    for (std::size_t i = 0; i < logs.size(); ++i) {
        auto hit = detail::box_search(logs[i], kept, opt);
        if (hit) {
            out.dependencies.push_back({i, *hit});
            continue;
        }
        if (kept.size() == rank) throw NoRelationWithinBound(logs[i].label, opt.bound);
        kept.push_back(logs[i]);
        out.basis.push_back(i);
    }
    if (kept.size() < rank) throw InsufficientRank("only " + std::to_string(kept.size()) + " independent logs at tolerance");
    for (auto& d : out.dependencies) d.coeffs.resize(rank, 0);
    return out;
}

}  // namespace ramc::lattice
