#pragma once

#include <gmpxx.h>

#include <numeric>
#include <random>
#include <vector>

#include "ramc/characters.hpp"
#include "ramc/lattice.hpp"

// Independent oracles shared by the unit tests and the acceptance suite.

namespace oracle {

using ramc::characters::divisors;
using ramc::lattice::IntegerMatrix;

// Independent route to Phi_n: prod_{m | n} (x^m - 1)^mu(n/m) over Z.
inline int mobius(long n) {
    int mu = 1;
    for (long q = 2; q * q <= n; ++q) {
        if (n % q) continue;
        n /= q;
        if (n % q == 0) return 0;
        mu = -mu;
    }
    if (n > 1) mu = -mu;
    return mu;
}

inline std::vector<long long> poly_mul(const std::vector<long long>& a, const std::vector<long long>& b) {
    std::vector<long long> c(a.size() + b.size() - 1, 0);
    for (std::size_t i = 0; i < a.size(); ++i)
        for (std::size_t j = 0; j < b.size(); ++j) c[i + j] += a[i] * b[j];
    return c;
}

inline std::vector<long long> poly_exact_div(std::vector<long long> num, const std::vector<long long>& den) {
    std::vector<long long> q(num.size() - den.size() + 1, 0);
    for (long i = static_cast<long>(num.size()) - 1; i >= static_cast<long>(den.size()) - 1; --i) {
        long long c = num[static_cast<std::size_t>(i)] / den.back();
        std::size_t s = static_cast<std::size_t>(i) - (den.size() - 1);
        q[s] = c;
        for (std::size_t j = 0; j < den.size(); ++j) num[s + j] -= c * den[j];
    }
    return q;
}

inline std::vector<long long> cyclotomic_by_mobius(long n) {
    std::vector<long long> num{1}, den{1};
    for (long m : divisors(n)) {
        std::vector<long long> xm(static_cast<std::size_t>(m) + 1, 0);
        xm[0] = -1;
        xm.back() = 1;
        int mu = mobius(n / m);
        if (mu == 1) num = poly_mul(num, xm);
        if (mu == -1) den = poly_mul(den, xm);
    }
    return poly_exact_div(num, den);
}

inline long ramanujan_sum(long q, long j) {
    long g = std::gcd(q, ((j % q) + q) % q == 0 ? q : ((j % q) + q) % q);
    long s = 0;
    for (long k : divisors(g)) s += mobius(q / k) * k;
    return s;
}

// Independent determinant: Laplace expansion along the first row.
inline mpz_class cofactor_det(const IntegerMatrix& M) {
    const std::size_t n = M.rows();
    if (n == 0) return 1;
    if (n == 1) return M(0, 0);
    mpz_class d = 0;
    for (std::size_t j = 0; j < n; ++j) {
        if (M(0, j) == 0) continue;
        IntegerMatrix minor(n - 1, n - 1);
        for (std::size_t i = 1; i < n; ++i)
            for (std::size_t k = 0, c = 0; k < n; ++k)
                if (k != j) minor(i - 1, c++) = M(i, k);
        mpz_class term = M(0, j) * cofactor_det(minor);
        d += (j % 2) ? -term : term;
    }
    return d;
}

// gcd of all maximal (cols x cols) minors of a rows >= cols matrix
inline mpz_class maximal_minor_gcd(const IntegerMatrix& M) {
    const std::size_t m = M.rows(), n = M.cols();
    mpz_class g = 0;
    std::vector<std::size_t> pick(n);
    std::iota(pick.begin(), pick.end(), 0);
    while (true) {
        IntegerMatrix sub(n, n);
        for (std::size_t i = 0; i < n; ++i)
            for (std::size_t j = 0; j < n; ++j) sub(i, j) = M(pick[i], j);
        mpz_class d = cofactor_det(sub);
        mpz_gcd(g.get_mpz_t(), g.get_mpz_t(), d.get_mpz_t());
        std::size_t i = n;
        while (i > 0 && pick[i - 1] == m - n + i - 1) --i;
        if (i == 0) break;
        ++pick[i - 1];
        for (std::size_t k = i; k < n; ++k) pick[k] = pick[k - 1] + 1;
    }
    return g;
}

inline IntegerMatrix random_matrix(std::mt19937_64& rng, std::size_t r, std::size_t c, long lo = -50, long hi = 50) {
    std::uniform_int_distribution<long> dist(lo, hi);
    IntegerMatrix m(r, c);
    for (std::size_t i = 0; i < r; ++i)
        for (std::size_t j = 0; j < c; ++j) m(i, j) = dist(rng);
    return m;
}

inline IntegerMatrix random_unimodular(std::mt19937_64& rng, std::size_t n) {
    IntegerMatrix u = IntegerMatrix::identity(n);
    std::uniform_int_distribution<long> dist(-3, 3);
    for (int step = 0; step < 12; ++step) {
        std::size_t i = rng() % n, k = rng() % n;
        if (i != k) u.add_row(i, k, dist(rng));
        else if (rng() % 2) u.negate_row(i);
    }
    return u;
}

inline bool is_hnf(const IntegerMatrix& H) {
    long last_pivot = -1;
    bool zero_seen = false;
    for (std::size_t i = 0; i < H.rows(); ++i) {
        std::size_t j = 0;
        while (j < H.cols() && H(i, j) == 0) ++j;
        if (j == H.cols()) { zero_seen = true; continue; }
        if (zero_seen || static_cast<long>(j) <= last_pivot || H(i, j) <= 0) return false;
        for (std::size_t k = 0; k < i; ++k)
            if (H(k, j) < 0 || H(k, j) >= H(i, j)) return false;
        last_pivot = static_cast<long>(j);
    }
    return true;
}

inline IntegerMatrix diag(const std::vector<mpz_class>& d, std::size_t r, std::size_t c) {
    IntegerMatrix m(r, c);
    for (std::size_t i = 0; i < d.size(); ++i) m(i, i) = d[i];
    return m;
}

}  // namespace oracle
