#pragma once

#include <algorithm>
#include <cmath>
#include <compare>
#include <map>
#include <numeric>
#include <optional>
#include <set>
#include <stdexcept>
#include <tuple>
#include <vector>

#include <gmpxx.h>

#include "ramc/abelian_group.hpp"
#include "ramc/characters.hpp"
#include "ramc/lattice.hpp"
#include "ramc/real.hpp"

namespace ramc::quadratic {

inline bool is_squarefree(long n) {
    if (n < 1) return false;
    for (long q = 2; q * q <= n; ++q)
        if (n % (q * q) == 0) return false;
    return true;
}

inline long isqrt(long n) {
    long s = static_cast<long>(std::sqrt(static_cast<double>(n)));
    while (s * s > n) --s;
    while ((s + 1) * (s + 1) <= n) ++s;
    return s;
}

inline void require_field(long f) {
    if (f <= 1) throw std::invalid_argument("real quadratic field needs f > 1");
    long s = isqrt(f);
    if (s * s == f) throw std::invalid_argument("f is a perfect square: " + std::to_string(f));
    if (!is_squarefree(f)) throw std::invalid_argument("f must be squarefree: " + std::to_string(f));
    if (f > (1L << 28)) throw std::invalid_argument("f too large for native form arithmetic");
}

/// Discriminant of Q(sqrt f) for squarefree f.
inline long discriminant(long f) { return f % 4 == 1 ? f : 4 * f; }

/// u = (x + y sqrt(f)) / denominator with denominator 1 or 2.
struct QuadraticUnit {
    long f = 0;
    mpz_class x, y;
    int denominator = 1;

    /// Exact norm x'^2 - f y'^2 in integers.
    [[nodiscard]] mpz_class norm() const {
        mpz_class n = x * x - f * y * y;
        if (denominator == 2) n /= 4;
        return n;
    }

    [[nodiscard]] Real value(Precision prec) const {
        Real r = Real(x, prec) + Real(y, prec) * sqrt(Real(f, prec));
        return denominator == 2 ? r / Real(2, prec) : r;
    }
};

/// Fundamental unit > 1 of the maximal order, from the continued fraction
/// of omega = (1 + sqrt f)/2 (f ≡ 1 mod 4) or sqrt f. The first convergent
/// p/q whose norm form value is ±1 gives the unit.
inline QuadraticUnit fundamental_unit(long f) {
    require_field(f);
    const bool half = f % 4 == 1;
    // omega = (P + sqrt f) / Q with Q | f - P^2
    mpz_class P = half ? 1 : 0, Q = half ? 2 : 1;
    const mpz_class sD = isqrt(f);
    const mpz_class Dz = f;
    mpz_class p_prev = 0, p = 1, q_prev = 1, q = 0;
    const mpz_class c = half ? mpz_class((1 - f) / 4) : mpz_class(-f);
    for (long step = 0; step < 1'000'000; ++step) {
        mpz_class a = (P + sD) / Q;
        mpz_class pn = a * p + p_prev, qn = a * q + q_prev;
        p_prev = p; p = pn;
        q_prev = q; q = qn;
        mpz_class n = half ? mpz_class(p * p - p * q + c * q * q) : mpz_class(p * p + c * q * q);
        if (n == 1 || n == -1) {
            QuadraticUnit u;
            u.f = f;
            if (half) {
                // p - q*omega' with omega' = (1 - sqrt f)/2
                u.x = 2 * p - q;
                u.y = q;
                u.denominator = 2;
            } else {
                u.x = p;
                u.y = q;
            }
            return u;
        }
        mpz_class Pn = a * Q - P;
        Q = (Dz - Pn * Pn) / Q;
        P = Pn;
    }
    throw std::runtime_error("continued fraction did not reach a unit");
}

/// Regulator log(u) of the fundamental unit u > 1.
inline Real fundamental_unit_log(long f, int digits = 150) {
    const Precision prec{digits};
    return log(fundamental_unit(f).value(prec));
}

/// The program prints 2·log|coefficient expression| of the stored unit,
/// which is twice the regulator up to sign. Exposed for comparison with
/// its output.
inline Real program_log_epsilon0(long f, int digits = 150) {
    Real r = fundamental_unit_log(f, digits);
    return r * 2L;
}

// ---------------------------------------------------------------------------
// Indefinite binary quadratic forms a x^2 + b xy + c y^2 of discriminant D.

struct Form {
    long a = 0, b = 0, c = 0;
    [[nodiscard]] long discriminant() const { return b * b - 4 * a * c; }
    friend auto operator<=>(const Form&, const Form&) = default;
};

class FormArithmetic {
  public:
    explicit FormArithmetic(long D) : D_(D), s_(isqrt(D)) {
        if (s_ * s_ == D) throw std::invalid_argument("square discriminant");
        if (D % 4 != 0 && D % 4 != 1) throw std::invalid_argument("not a discriminant");
    }

    [[nodiscard]] long D() const { return D_; }

    [[nodiscard]] Form principal() const {
        long b = D_ % 2;
        return Form{1, b, (b * b - D_) / 4};
    }

    /// Class of (-1, b, c): the quotient of the narrow by the wide group.
    [[nodiscard]] Form negative_principal() const {
        long b = D_ % 2;
        return Form{-1, b, (D_ - b * b) / 4};
    }

    /// |sqrt D - 2|a|| < b < sqrt D.
    [[nodiscard]] bool is_reduced(const Form& g) const {
        long aa = 2 * std::labs(g.a);
        if (g.b <= 0 || g.b > s_) return false;
        // sqrt D - 2|a| < b  and  2|a| - sqrt D < b
        return g.b + aa >= s_ + 1 && aa <= s_ + g.b;
    }

    /// rho(a, b, c) = (c, r, (r^2 - D)/(4c)) with r ≡ -b mod 2c normalized.
    [[nodiscard]] Form rho(const Form& g) const {
        const long c = g.c, m = 2 * std::labs(c);
        long r;
        if (std::labs(c) > s_) {
            // -|c| < r <= |c|
            r = floor_mod(-g.b, m);
            if (r > std::labs(c)) r -= m;
        } else {
            // sqrt D - 2|c| < r < sqrt D: largest r <= s with r ≡ -b
            r = s_ - floor_mod(s_ + g.b, m);
        }
        return Form{c, r, (r * r - D_) / (4 * c)};
    }

    [[nodiscard]] Form reduce(Form g) const {
        check(g);
        for (int i = 0; i < 10'000 && !is_reduced(g); ++i) g = rho(g);
        if (!is_reduced(g)) throw std::runtime_error("form reduction did not terminate");
        return g;
    }

    /// The rho-cycle of a reduced form.
    [[nodiscard]] std::vector<Form> cycle(const Form& reduced) const {
        std::vector<Form> out{reduced};
        for (Form g = rho(reduced); g != reduced; g = rho(g)) {
            out.push_back(g);
            if (out.size() > 1'000'000) throw std::runtime_error("rho cycle too long");
        }
        return out;
    }

    /// Canonical narrow-class key: the smallest form of the cycle.
    [[nodiscard]] Form narrow_key(const Form& g) const {
        auto cyc = cycle(reduce(g));
        return *std::min_element(cyc.begin(), cyc.end());
    }

    /// Composition by solving the united-form congruences.
    [[nodiscard]] Form compose(const Form& f1, const Form& f2) const {
        check(f1);
        check(f2);
        mpz_class a1 = f1.a, b1 = f1.b, a2 = f2.a, b2 = f2.b, c2 = f2.c;
        mpz_class s = (b1 + b2) / 2, n = b2 - s;
        mpz_class d, x1, y1;
        mpz_gcdext(d.get_mpz_t(), x1.get_mpz_t(), y1.get_mpz_t(), a1.get_mpz_t(), a2.get_mpz_t());
        // d = x1 a1 + y1 a2
        mpz_class d1, u, v;
        mpz_gcdext(d1.get_mpz_t(), u.get_mpz_t(), v.get_mpz_t(), s.get_mpz_t(), d.get_mpz_t());
        // d1 = u s + v d
        mpz_class A1 = a1 / d1, A2 = a2 / d1;
        mpz_class r = -v * y1 * n - u * c2;
        mpz_class m = abs(A1);
        r %= m;
        if (r < 0) r += m;
        mpz_class b3 = b2 + 2 * A2 * r;
        mpz_class a3 = A1 * A2;
        mpz_class num = b3 * b3 - D_;
        if (num % (4 * a3) != 0) throw std::logic_error("composition produced a non-integral form");
        mpz_class c3 = num / (4 * a3);
        return reduce(Form{a3.get_si(), b3.get_si(), c3.get_si()});
    }

    [[nodiscard]] Form inverse(const Form& g) const { return reduce(Form{g.a, -g.b, g.c}); }

    [[nodiscard]] Form power(const Form& g, long m) const {
        Form result = reduce(principal());
        Form base = reduce(g);
        if (m < 0) { base = inverse(base); m = -m; }
        while (m) {
            if (m & 1) result = compose(result, base);
            base = compose(base, base);
            m >>= 1;
        }
        return result;
    }

    /// All reduced forms of discriminant D.
    [[nodiscard]] std::vector<Form> reduced_forms() const {
        std::vector<Form> out;
        for (long b = 1; b <= s_; ++b) {
            if ((b - D_) % 2 != 0) continue;
            long ac = (b * b - D_) / 4;  // negative
            // 2|a| in [s + 1 - b, s + b]
            long lo = (s_ + 1 - b + 1) / 2, hi = (s_ + b) / 2;
            for (long aa = std::max(1L, lo); aa <= hi; ++aa) {
                if (ac % aa) continue;
                for (long a : {aa, -aa}) {
                    Form g{a, b, ac / a};
                    if (is_reduced(g)) out.push_back(g);
                }
            }
        }
        return out;
    }

  private:
    static long floor_mod(long x, long m) {
        long r = x % m;
        return r < 0 ? r + m : r;
    }

    void check(const Form& g) const {
        if (g.a == 0 || g.discriminant() != D_) throw std::invalid_argument("form has wrong discriminant");
    }

    long D_;
    long s_;
};

/// Counts #G[p^k] for k = 1, 2, ... until stable, and reads off the
/// p-primary invariants.
inline std::vector<long> primary_from_torsion(long p, const std::vector<long>& count) {
    // count[k-1] = #G[p^k] = p^{sum_i min(e_i, k)}
    std::vector<long> logs{0};
    for (long c : count) {
        long e = 0;
        while (c > 1) {
            if (c % p) throw std::logic_error("torsion count not a prime power");
            c /= p;
            ++e;
        }
        logs.push_back(e);
    }
    // number of cyclic factors with e_i >= k is logs[k] - logs[k-1]
    std::vector<long> out;
    for (std::size_t k = 1; k < logs.size(); ++k) {
        long at_least_k = logs[k] - logs[k - 1];
        long at_least_next = k + 1 < logs.size() ? logs[k + 1] - logs[k] : 0;
        for (long i = 0; i < at_least_k - at_least_next; ++i) out.push_back(characters::ipow(p, static_cast<unsigned>(k)));
    }
    return out;
}

inline std::vector<long> prime_factors(long n) {
    std::vector<long> out;
    for (long q = 2; q * q <= n; ++q)
        if (n % q == 0) {
            out.push_back(q);
            while (n % q == 0) n /= q;
        }
    if (n > 1) out.push_back(n);
    return out;
}

/// Narrow and wide class groups from the full set of reduced forms.
struct FormClassGroup {
    AbelianGroupStructure narrow;
    AbelianGroupStructure wide;
    long narrow_order = 0;
    bool negative_unit = false;  // true iff narrow = wide
};

inline FormClassGroup class_group_by_forms(long f) {
    require_field(f);
    FormArithmetic ar(discriminant(f));
    auto forms = ar.reduced_forms();
    std::map<Form, int> id;
    std::vector<Form> reps;
    for (const Form& g : forms) {
        if (id.count(g)) continue;
        int k = static_cast<int>(reps.size());
        reps.push_back(g);
        for (const Form& h : ar.cycle(g)) id[h] = k;
    }
    const int h = static_cast<int>(reps.size());
    auto class_of = [&](const Form& g) { return id.at(ar.reduce(g)); };
    std::vector<std::vector<int>> table(h, std::vector<int>(h));
    for (int i = 0; i < h; ++i)
        for (int j = i; j < h; ++j) table[i][j] = table[j][i] = class_of(ar.compose(reps[i], reps[j]));
    const int one = class_of(ar.principal());
    const int J = class_of(ar.negative_principal());

    auto power = [&](int x, long m) {
        int r = one;
        for (long i = 0; i < m; ++i) r = table[r][x];
        return r;
    };

    FormClassGroup out;
    out.narrow_order = h;
    out.negative_unit = J == one;
    std::set<int> kernel{one, J};  // <J> has order 1 or 2
    std::vector<long> narrow_f, wide_f;
    for (long p : prime_factors(h)) {
        std::vector<long> cn, cw;
        long pk = 1;
        for (;;) {
            pk *= p;
            long n_count = 0, w_count = 0;
            for (int x = 0; x < h; ++x) {
                int y = power(x, pk);
                n_count += y == one;
                w_count += kernel.count(y) != 0;
            }
            w_count /= static_cast<long>(kernel.size());
            cn.push_back(n_count);
            cw.push_back(w_count);
            if (cn.size() >= 2 && cn[cn.size() - 1] == cn[cn.size() - 2] && cw[cw.size() - 1] == cw[cw.size() - 2]) break;
        }
        for (long d : primary_from_torsion(p, cn)) narrow_f.push_back(d);
        for (long d : primary_from_torsion(p, cw)) wide_f.push_back(d);
    }
    out.narrow = AbelianGroupStructure(narrow_f);
    out.wide = AbelianGroupStructure(wide_f);
    return out;
}

/// Kronecker symbol (D / n) for a discriminant D and n >= 1.
inline int kronecker_symbol(long D, long n) {
    mpz_class d = D, m = n;
    return mpz_kronecker(d.get_mpz_t(), m.get_mpz_t());
}

/// Wide class number from h·R = -sum_{0<a<D/2} chi(a) log sin(pi a / D).
inline long analytic_class_number(long f) {
    require_field(f);
    const long D = discriminant(f);
    const Precision prec{40};
    const Real pi_over_D = pi(prec) / Real(D, prec);
    Real sum(prec);
    for (long a = 1; 2 * a < D; ++a) {
        int chi = kronecker_symbol(D, a);
        if (chi == 0) continue;
        Real t = log(sin(pi_over_D * Real(a, prec)));
        sum = chi > 0 ? sum - t : sum + t;
    }
    Real h = sum / fundamental_unit_log(f, prec.digits);
    return h.round().get_si();
}

/// Wide class group by building up the subgroup generated by prime forms
/// until it reaches the analytic class number; the relations found on the
/// way are put in Smith form.
inline AbelianGroupStructure class_group_by_prime_forms(long f) {
    require_field(f);
    const long D = discriminant(f);
    const long h = analytic_class_number(f);
    FormArithmetic ar(D);
    const Form J = ar.negative_principal();
    // wide key: smaller of the narrow keys of g and J·g
    auto key = [&](const Form& g) { return std::min(ar.narrow_key(g), ar.narrow_key(ar.compose(J, g))); };

    std::vector<Form> gens;
    std::map<Form, std::vector<long>> elements;  // key -> exponent vector
    elements[key(ar.principal())] = {};
    std::vector<std::vector<long>> relations;

    auto pad = [](std::vector<long> v, std::size_t n) { v.resize(n, 0); return v; };

    for (long p = 2; static_cast<long>(elements.size()) < h; ++p) {
        if (p * p > 4 * D) throw std::runtime_error("prime forms exhausted before reaching the class number");
        if (!characters::is_prime(p) || kronecker_symbol(D, p) == -1) continue;
        long b = -1;
        for (long t = 0; t < 2 * p; ++t)
            if (((t * t - D) % (4 * p)) == 0) { b = t; break; }
        if (b < 0) continue;
        Form g = ar.reduce(Form{p, b, (b * b - D) / (4 * p)});
        if (elements.count(key(g))) continue;
        const std::size_t k = gens.size();
        gens.push_back(g);
        // smallest m with g^m in the current subgroup
        std::map<Form, std::vector<long>> old = elements;
        Form gm = ar.reduce(ar.principal());
        long m = 0;
        std::vector<long> hit;
        for (;;) {
            gm = ar.compose(gm, g);
            ++m;
            auto it = old.find(key(gm));
            if (it != old.end()) { hit = it->second; break; }
        }
        std::vector<long> rel = pad(hit, k + 1);
        for (auto& x : rel) x = -x;
        rel[k] = m;
        relations.push_back(rel);
        // extend: every old element times g^j, 0 < j < m
        Form gj = ar.reduce(ar.principal());
        for (long j = 1; j < m; ++j) {
            gj = ar.compose(gj, g);
            for (const auto& [kf, vec] : old) {
                std::vector<long> e = pad(vec, k + 1);
                e[k] = j;
                // the representative of kf is itself a reduced form in its class
                elements.emplace(key(ar.compose(kf, gj)), e);
            }
        }
        for (auto& [kf, vec] : elements) vec = pad(vec, k + 1);
    }
    if (gens.empty()) return AbelianGroupStructure{};
    lattice::IntegerMatrix R(relations.size(), gens.size());
    for (std::size_t i = 0; i < relations.size(); ++i)
        for (std::size_t j = 0; j < gens.size(); ++j)
            R(i, j) = j < relations[i].size() ? relations[i][j] : 0;
    auto snf = lattice::smith_normal_form(R);
    std::vector<long> divisors;
    for (const auto& d : snf.divisors)
        if (d > 1) divisors.push_back(d.get_si());
    return AbelianGroupStructure(divisors);
}

/// Wide ideal class group (the convention the CAS prints).
inline AbelianGroupStructure class_group(long f) { return class_group_by_forms(f).wide; }

struct QuadraticField {
    long f = 0;
    long discriminant = 0;
    Real regulator;
    AbelianGroupStructure class_group;

    [[nodiscard]] mpz_class class_number() const { return class_group.order(); }
};

inline QuadraticField make_field(long f, int digits = 150) {
    QuadraticField k;
    k.f = f;
    k.discriminant = ramc::quadratic::discriminant(f);
    k.regulator = fundamental_unit_log(f, digits);
    k.class_group = class_group(f);
    return k;
}

}  // namespace ramc::quadratic
