#pragma once

#include <algorithm>
#include <functional>
#include <map>
#include <numeric>
#include <optional>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "ramc/modular.hpp"

// Characters of a cyclic group G = gamma x Gamma, |gamma| = d prime to p,
// Gamma = Z/p^e, together with exact arithmetic in (Z/p^N)[G].
//
// Elements of G are indexed 0..d*p^e-1 as powers of a fixed generator
// sigma_chi; tau := sigma_chi^(p^e) generates gamma and sigma := sigma_chi^d
// generates Gamma.
//
// Tame character values are realized as Frobenius-orbit traces. Fix the
// monic p-adic factor g1 of the d'-th cyclotomic polynomial that comes first
// in coefficient order and let zeta be a root of it. The p-adic character
// attached to the orbit a*<p> of (Z/d')^x takes the value
// sum_{b in a*<p>} zeta^(b*j) on tau^j, which is the j*a-th power sum of the
// roots of g1 and so lies in Z/p^N.
namespace ramc::characters {

inline long euler_phi(long n) {
    long result = n;
    for (long q = 2; q * q <= n; ++q)
        if (n % q == 0) {
            while (n % q == 0) n /= q;
            result -= result / q;
        }
    if (n > 1) result -= result / n;
    return result;
}

inline bool is_prime(long n) {
    if (n < 2) return false;
    for (long q = 2; q * q <= n; ++q)
        if (n % q == 0) return false;
    return true;
}

inline long ipow(long b, int e) {
    long r = 1;
    while (e-- > 0) r *= b;
    return r;
}

/// Multiplicative order of a modulo n (gcd(a, n) = 1).
inline long multiplicative_order(long a, long n) {
    if (n == 1) return 1;
    a %= n;
    if (a < 0) a += n;
    long x = a, k = 1;
    while (x != 1 % n) {
        x = static_cast<long>((static_cast<__int128>(x) * a) % n);
        ++k;
        if (k > n) throw std::domain_error("multiplicative_order: element not invertible");
    }
    return k;
}

inline std::vector<long> divisors(long n) {
    std::vector<long> out;
    for (long k = 1; k <= n; ++k)
        if (n % k == 0) out.push_back(k);
    return out;
}

/// The Galois group of a real cyclic field in the form gamma (+) Gamma.
struct CyclicGroupSpec {
    long d = 1;  ///< order of gamma, prime to p
    long p = 3;
    int e = 0;   ///< Gamma = Z/p^e

    CyclicGroupSpec() = default;
    CyclicGroupSpec(long d_, long p_, int e_) : d(d_), p(p_), e(e_) {
        if (d < 1 || e < 0) throw std::invalid_argument("CyclicGroupSpec: need d >= 1, e >= 0");
        if (p < 3 || !is_prime(p)) throw std::invalid_argument("CyclicGroupSpec: p must be an odd prime");
        if (std::gcd(d, p) != 1) throw std::invalid_argument("CyclicGroupSpec: p divides d");
    }

    [[nodiscard]] long p_power() const { return ipow(p, e); }
    [[nodiscard]] long order() const { return d * p_power(); }
    /// index of tau = sigma_chi^(p^e)
    [[nodiscard]] long tau_index() const { return p_power() % order(); }
    /// index of sigma = sigma_chi^d
    [[nodiscard]] long sigma_index() const { return d % order(); }
    /// index of tau^i sigma^j
    [[nodiscard]] long index_of(long tau_exp, long sigma_exp) const {
        long n = order();
        long r = (tau_exp % n * tau_index() + sigma_exp % n * sigma_index()) % n;
        return r < 0 ? r + n : r;
    }

    friend bool operator==(const CyclicGroupSpec&, const CyclicGroupSpec&) = default;
};

enum class CharacterKind { Rational, PAdic, Absolute };

/// Rational, p-adic or absolute character of a cyclic group, identified by
/// the pair (d', e') cutting out K_rho of degree d' p^e' and, for the tame
/// part, the set of exponents a in (Z/d')^x it collects.
struct CharacterData {
    CharacterKind kind = CharacterKind::Rational;
    long p = 3;
    long tame_order = 1;       ///< d'
    int p_exponent = 0;        ///< e'
    std::vector<long> orbit;   ///< exponents a mod d' (all units for a rational character)
    std::optional<long> conductor;

    [[nodiscard]] long order() const { return tame_order * ipow(p, p_exponent); }
    [[nodiscard]] long p_part_degree() const { return euler_phi(ipow(p, p_exponent)); }
    [[nodiscard]] long degree() const {
        if (kind == CharacterKind::Absolute) return 1;
        return static_cast<long>(orbit.size()) * p_part_degree();
    }
    [[nodiscard]] bool trivial() const { return tame_order == 1 && p_exponent == 0; }
    [[nodiscard]] bool tame_trivial() const { return tame_order == 1; }

    [[nodiscard]] std::string label() const {
        std::string k = kind == CharacterKind::Rational ? "chi" : kind == CharacterKind::PAdic ? "phi" : "psi";
        std::string s = k + "(" + std::to_string(tame_order) + "," + std::to_string(p_exponent);
        if (kind != CharacterKind::Rational) {
            s += ";";
            for (std::size_t i = 0; i < orbit.size(); ++i) s += (i ? "," : "") + std::to_string(orbit[i]);
        }
        return s + ")";
    }

    friend bool operator==(const CharacterData&, const CharacterData&) = default;
};

/// Assigns a conductor to the subfield indexed by (d', e'); may return nullopt.
using ConductorMap = std::function<std::optional<long>(long tame_order, int p_exponent)>;

/// Conductor map of K = k K0 with prime conductors f (for the tame field k of
/// prime degree or any d | f - 1 with all subfields of conductor f) and q for
/// the p-part.
inline ConductorMap prime_conductors(long f, long q) {
    return [f, q](long dp, int ep) -> std::optional<long> {
        return (dp > 1 ? f : 1) * (ep > 0 ? q : 1);
    };
}

inline std::vector<long> units_mod(long n) {
    std::vector<long> u;
    if (n == 1) return {0};
    for (long a = 1; a < n; ++a)
        if (std::gcd(a, n) == 1) u.push_back(a);
    return u;
}

/// One rational character per divisor pair (d', e'), ordered by (e', d').
inline std::vector<CharacterData> enumerate_rational_characters(const CyclicGroupSpec& g,
                                                                const ConductorMap& conductors = {}) {
    std::vector<CharacterData> out;
    for (int ep = 0; ep <= g.e; ++ep)
        for (long dp : divisors(g.d)) {
            CharacterData c;
            c.kind = CharacterKind::Rational;
            c.p = g.p;
            c.tame_order = dp;
            c.p_exponent = ep;
            c.orbit = units_mod(dp);
            if (conductors) c.conductor = conductors(dp, ep);
            out.push_back(std::move(c));
        }
    return out;
}

/// chi = chi0 * chi_p: tame part of order d', p-part of order p^e'.
inline std::pair<CharacterData, CharacterData> split_character(const CharacterData& chi,
                                                               const ConductorMap& conductors = {}) {
    if (chi.kind == CharacterKind::Absolute) throw std::invalid_argument("split_character: rational or p-adic only");
    CharacterData tame = chi;
    tame.p_exponent = 0;
    CharacterData wild;
    wild.kind = CharacterKind::Rational;
    wild.p = chi.p;
    wild.tame_order = 1;
    wild.p_exponent = chi.p_exponent;
    wild.orbit = {0};
    if (conductors) {
        tame.conductor = conductors(tame.tame_order, 0);
        wild.conductor = conductors(1, wild.p_exponent);
    } else {
        tame.conductor.reset();
        wild.conductor.reset();
    }
    return {tame, wild};
}

/// The character of order tame_order * p^e' with the given tame and p-parts.
inline CharacterData combine_characters(const CharacterData& tame, const CharacterData& wild) {
    CharacterData c = tame;
    c.p_exponent = wild.p_exponent;
    if (tame.conductor && wild.conductor) c.conductor = *tame.conductor * *wild.conductor;
    else c.conductor.reset();
    return c;
}

/// Orbits of (Z/d')^x under multiplication by p, each as a p-adic character
/// dividing chi0. Orbits are listed by smallest element; each orbit is listed
/// in the order a, a p, a p^2, ...
inline std::vector<CharacterData> padic_orbits(const CharacterData& chi0) {
    long dp = chi0.tame_order;
    if (std::gcd(dp, chi0.p) != 1) throw std::invalid_argument("padic_orbits: tame order must be prime to p");
    std::vector<CharacterData> out;
    std::vector<bool> seen(static_cast<std::size_t>(dp), false);
    for (long a : units_mod(dp)) {
        if (seen[static_cast<std::size_t>(a)]) continue;
        CharacterData phi = chi0;
        phi.kind = CharacterKind::PAdic;
        phi.orbit.clear();
        long b = a;
        do {
            phi.orbit.push_back(b);
            seen[static_cast<std::size_t>(b)] = true;
            b = dp == 1 ? 0 : (b * chi0.p) % dp;
        } while (b != a);
        out.push_back(std::move(phi));
    }
    return out;
}

/// n-th cyclotomic polynomial over Z, by recursive division of x^n - 1.
inline std::vector<long long> cyclotomic_polynomial(long n) {
    std::vector<long long> num(static_cast<std::size_t>(n) + 1, 0);
    num[0] = -1;
    num[static_cast<std::size_t>(n)] = 1;
    for (long m : divisors(n)) {
        if (m == n) continue;
        std::vector<long long> den = cyclotomic_polynomial(m);
        // exact division by a monic polynomial
        std::vector<long long> q(num.size() - den.size() + 1, 0);
        for (long i = static_cast<long>(num.size()) - 1; i >= static_cast<long>(den.size()) - 1; --i) {
            long long c = num[static_cast<std::size_t>(i)];
            std::size_t shift = static_cast<std::size_t>(i) - (den.size() - 1);
            q[shift] = c;
            for (std::size_t j = 0; j < den.size(); ++j) num[shift + j] -= c * den[j];
        }
        num = q;
    }
    return num;
}

/// Monic p-adic factors of Phi_{d'} modulo p^N, one per Frobenius orbit.
class TameFactorization {
  public:
    TameFactorization(long tame_order, const ModRing& ring) : dp_(tame_order), ring_(ring) {
        if (std::gcd(dp_, ring.p()) != 1) throw std::invalid_argument("TameFactorization: p divides d'");
        ModPoly phi = ModPoly::from_integers(ring_, cyclotomic_polynomial(dp_));
        ModRing fp = ring_.reduced(1);
        long fdeg = dp_ == 1 ? 1 : multiplicative_order(ring.p(), dp_);
        auto mod_p = equal_degree_factorization(phi.reduced_mod(fp), fdeg);
        std::vector<ModPoly> lifted;
        for (const auto& g : mod_p) lifted.push_back(mod_p.size() == 1 ? phi : hensel_lift_factor(phi, g));
        std::sort(lifted.begin(), lifted.end(), [](const ModPoly& a, const ModPoly& b) { return a.coeffs() < b.coeffs(); });
        base_ = lifted.front();
        power_sums_ = compute_power_sums(base_, dp_);
        // identify each factor with the orbit of the exponents of its roots
        CharacterData chi0;
        chi0.p = ring.p();
        chi0.tame_order = dp_;
        chi0.orbit = units_mod(dp_);
        ModPoly base_p = base_.reduced_mod(fp);
        for (const auto& orb : padic_orbits(chi0)) {
            long a = orb.orbit.front();
            bool found = false;
            for (const auto& g : lifted) {
                // g(x^a) vanishes modulo g1 iff zeta^a is a root of g
                ModPoly comp = g.reduced_mod(fp).compose_power(static_cast<std::size_t>(a == 0 ? 1 : a)) % base_p;
                if (comp.is_zero()) {
                    factors_.emplace(a, g);
                    found = true;
                    break;
                }
            }
            if (!found) throw std::logic_error("TameFactorization: orbit without factor");
        }
    }

    [[nodiscard]] const ModPoly& base_factor() const { return base_; }
    [[nodiscard]] const ModRing& ring() const { return ring_; }

    /// Factor whose roots are zeta^b for b in the orbit of a.
    [[nodiscard]] const ModPoly& factor_for(long a) const {
        long rep = orbit_representative(a);
        return factors_.at(rep);
    }

    /// sum_{b in a<p>} zeta^(b j)
    [[nodiscard]] u64 orbit_trace(long a, long j) const {
        long m = dp_ == 1 ? 0 : ((a * j) % dp_ + dp_) % dp_;
        return power_sums_[static_cast<std::size_t>(m)];
    }

    [[nodiscard]] long orbit_representative(long a) const {
        if (dp_ == 1) return 0;
        a = ((a % dp_) + dp_) % dp_;
        long best = a, b = a;
        do {
            best = std::min(best, b);
            b = (b * ring_.p()) % dp_;
        } while (b != a);
        return best;
    }

  private:
    // Newton identities: s_m = sum of m-th powers of the roots, m = 0..d'-1.
    std::vector<u64> compute_power_sums(const ModPoly& g, long count) const {
        const ModRing& R = ring_;
        long n = g.degree();
        // g = x^n + c1 x^(n-1) + ... + cn
        auto c = [&](long i) -> u64 { return g[static_cast<std::size_t>(n - i)]; };
        std::vector<u64> s(static_cast<std::size_t>(std::max<long>(count, 1)), 0);
        s[0] = R.from(n);
        for (long m = 1; m < count; ++m) {
            u64 acc = 0;
            for (long i = 1; i <= std::min(m - 1, n); ++i) acc = R.add(acc, R.mul(c(i), s[static_cast<std::size_t>(m - i)]));
            if (m <= n) acc = R.add(acc, R.mul(R.from(m), c(m)));
            s[static_cast<std::size_t>(m)] = R.neg(acc);
        }
        return s;
    }

    long dp_;
    ModRing ring_;
    ModPoly base_{ring_};
    std::vector<u64> power_sums_;
    std::map<long, ModPoly> factors_;
};

/// Element of (Z/p^N)[G], coefficient i belonging to sigma_chi^i.
class GroupRingElement {
  public:
    GroupRingElement(CyclicGroupSpec g, ModRing ring)
        : group_(g), ring_(ring), c_(static_cast<std::size_t>(g.order()), 0) {}

    static GroupRingElement zero(CyclicGroupSpec g, ModRing ring) { return {g, ring}; }
    static GroupRingElement one(CyclicGroupSpec g, ModRing ring) { return basis(g, ring, 0); }
    static GroupRingElement basis(CyclicGroupSpec g, ModRing ring, long index, long coeff = 1) {
        GroupRingElement x(g, ring);
        long n = g.order();
        x.c_[static_cast<std::size_t>(((index % n) + n) % n)] = ring.from(coeff);
        return x;
    }
    /// 1 - h for a group element h
    static GroupRingElement one_minus(CyclicGroupSpec g, ModRing ring, long index) {
        return one(g, ring) - basis(g, ring, index);
    }
    /// sum over the subgroup generated by sigma_chi^step
    static GroupRingElement subgroup_sum(CyclicGroupSpec g, ModRing ring, long step) {
        GroupRingElement x(g, ring);
        long n = g.order();
        long i = 0;
        do {
            x.c_[static_cast<std::size_t>(i)] = ring.add(x.c_[static_cast<std::size_t>(i)], 1);
            i = (i + step) % n;
        } while (i != 0);
        return x;
    }

    [[nodiscard]] const CyclicGroupSpec& group() const { return group_; }
    [[nodiscard]] const ModRing& ring() const { return ring_; }
    [[nodiscard]] const std::vector<u64>& coeffs() const { return c_; }
    [[nodiscard]] u64 operator[](std::size_t i) const { return c_[i]; }
    [[nodiscard]] bool is_zero() const {
        return std::all_of(c_.begin(), c_.end(), [](u64 v) { return v == 0; });
    }

    friend GroupRingElement operator+(GroupRingElement a, const GroupRingElement& b) {
        a.check(b);
        for (std::size_t i = 0; i < a.c_.size(); ++i) a.c_[i] = a.ring_.add(a.c_[i], b.c_[i]);
        return a;
    }
    friend GroupRingElement operator-(GroupRingElement a, const GroupRingElement& b) {
        a.check(b);
        for (std::size_t i = 0; i < a.c_.size(); ++i) a.c_[i] = a.ring_.sub(a.c_[i], b.c_[i]);
        return a;
    }
    friend GroupRingElement operator*(const GroupRingElement& a, const GroupRingElement& b) {
        a.check(b);
        GroupRingElement r(a.group_, a.ring_);
        std::size_t n = a.c_.size();
        for (std::size_t i = 0; i < n; ++i) {
            if (!a.c_[i]) continue;
            for (std::size_t j = 0; j < n; ++j) {
                if (!b.c_[j]) continue;
                std::size_t k = (i + j) % n;
                r.c_[k] = r.ring_.add(r.c_[k], r.ring_.mul(a.c_[i], b.c_[j]));
            }
        }
        return r;
    }
    [[nodiscard]] GroupRingElement scaled(u64 k) const {
        GroupRingElement r = *this;
        for (auto& v : r.c_) v = ring_.mul(v, k);
        return r;
    }
    friend bool operator==(const GroupRingElement& a, const GroupRingElement& b) {
        return a.group_ == b.group_ && a.ring_ == b.ring_ && a.c_ == b.c_;
    }

    [[nodiscard]] GroupRingElement reduced_mod(const ModRing& smaller) const {
        GroupRingElement r(group_, smaller);
        for (std::size_t i = 0; i < c_.size(); ++i) r.c_[i] = c_[i] % smaller.modulus();
        return r;
    }

    void set(std::size_t i, u64 v) { c_[i] = v % ring_.modulus(); }

  private:
    void check(const GroupRingElement& o) const {
        if (!(group_ == o.group_) || !(ring_ == o.ring_)) throw std::invalid_argument("group ring mismatch");
    }

    CyclicGroupSpec group_;
    ModRing ring_;
    std::vector<u64> c_;
};

inline GroupRingElement rational_idempotent(const CharacterData& chi0, const CyclicGroupSpec& g, int N);

/// e_phi0 = (1/d) sum_{tau in gamma} phi0(tau^-1) tau for a p-adic tame
/// character phi0 (tame_order d' | d). A rational character gives the sum of
/// the idempotents of its p-adic constituents. Throws when p | d.
inline GroupRingElement idempotent(const CharacterData& phi0, const CyclicGroupSpec& g, int N) {
    if (phi0.kind == CharacterKind::Rational) return rational_idempotent(phi0, g, N);
    if (std::gcd(g.d, g.p) != 1) throw std::invalid_argument("idempotent: p divides d");
    if (phi0.p_exponent != 0 || g.d % phi0.tame_order != 0)
        throw std::invalid_argument("idempotent: need a tame character of order dividing d");
    ModRing R(g.p, N);
    TameFactorization tf(phi0.tame_order, R);
    u64 inv_d = R.inv(R.from(g.d));
    GroupRingElement e(g, R);
    long a = phi0.orbit.front();
    for (long j = 0; j < g.d; ++j) {
        u64 value = tf.orbit_trace(a, -j);
        e.set(static_cast<std::size_t>(g.index_of(j, 0)), R.mul(inv_d, value));
    }
    return e;
}

/// Semi-simple rational idempotent e_chi0 = sum over phi0 | chi0 of e_phi0.
inline GroupRingElement rational_idempotent(const CharacterData& chi0, const CyclicGroupSpec& g, int N) {
    if (std::gcd(g.d, g.p) != 1) throw std::invalid_argument("idempotent: p divides d");
    GroupRingElement e = GroupRingElement::zero(g, ModRing(g.p, N));
    for (const auto& phi0 : padic_orbits(chi0)) e = e + idempotent(phi0, g, N);
    return e;
}

/// Solves x y = e in e (Z/p^N)[G] for an idempotent e: a solution modulo p
/// by Gaussian elimination, then Newton iteration y <- y (2e - x y).
/// Returns nullopt when x e is not a unit of e (Z/p^N)[G].
inline std::optional<GroupRingElement> group_ring_invert(const GroupRingElement& x, const GroupRingElement& e) {
    const CyclicGroupSpec& g = x.group();
    const ModRing& R = x.ring();
    ModRing fp = R.reduced(1);
    const long p = R.p();
    const std::size_t n = static_cast<std::size_t>(g.order());

    // column j of the multiplication matrix is x * sigma_chi^j (mod p)
    GroupRingElement xp = x.reduced_mod(fp);
    GroupRingElement ep = e.reduced_mod(fp);
    std::vector<std::vector<long>> a(n, std::vector<long>(n + 1, 0));
    for (std::size_t j = 0; j < n; ++j)
        for (std::size_t i = 0; i < n; ++i) a[(i + j) % n][j] = static_cast<long>(xp[i]);
    for (std::size_t i = 0; i < n; ++i) a[i][n] = static_cast<long>(ep[i]);

    std::vector<long> pivot_col;
    std::size_t row = 0;
    for (std::size_t col = 0; col < n && row < n; ++col) {
        std::size_t piv = row;
        while (piv < n && a[piv][col] % p == 0) ++piv;
        if (piv == n) continue;
        std::swap(a[piv], a[row]);
        long inv = static_cast<long>(fp.inv(static_cast<u64>(a[row][col])));
        for (auto& v : a[row]) v = (v * inv) % p;
        for (std::size_t r = 0; r < n; ++r) {
            if (r == row || a[r][col] == 0) continue;
            long f = a[r][col];
            for (std::size_t c = 0; c <= n; ++c) a[r][c] = ((a[r][c] - f * a[row][c]) % p + p) % p;
        }
        pivot_col.push_back(static_cast<long>(col));
        ++row;
    }
    for (std::size_t r = row; r < n; ++r)
        if (a[r][n] % p != 0) return std::nullopt;

    GroupRingElement y(g, R);
    for (std::size_t r = 0; r < row; ++r) y.set(static_cast<std::size_t>(pivot_col[r]), static_cast<u64>(a[r][n]));
    y = y * e;
    GroupRingElement two_e = e + e;
    for (int prec = 1; prec < R.N(); prec *= 2) y = y * (two_e - x * y);
    if (!(x * y == e)) return std::nullopt;
    return y;
}

/// Local cyclotomic factor P_phi of the d'p^e'-th cyclotomic polynomial.
struct CyclotomicFactor {
    CharacterData character;
    ModPoly coefficients;
};

/// P_phi = g(x^(p^e')) / g(x^(p^(e'-1))) with g the p-adic factor of Phi_{d'}
/// attached to phi0 (P_phi = g when e' = 0).
inline CyclotomicFactor local_cyclotomic_factor(const CharacterData& phi, int N) {
    if (phi.kind != CharacterKind::PAdic) throw std::invalid_argument("local_cyclotomic_factor: p-adic character expected");
    ModRing R(phi.p, N);
    TameFactorization tf(phi.tame_order, R);
    const ModPoly& g = tf.factor_for(phi.orbit.front());
    if (phi.p_exponent == 0) return {phi, g};
    std::size_t hi = static_cast<std::size_t>(ipow(phi.p, phi.p_exponent));
    std::size_t lo = hi / static_cast<std::size_t>(phi.p);
    auto [q, r] = g.compose_power(hi).divmod(g.compose_power(lo));
    if (!r.is_zero()) throw std::logic_error("local_cyclotomic_factor: inexact division");
    return {phi, q};
}

/// All P_phi for phi | chi (chi rational), in padic_orbits order.
inline std::vector<CyclotomicFactor> local_cyclotomic_factors(const CharacterData& chi, int N) {
    std::vector<CyclotomicFactor> out;
    for (const auto& phi0 : padic_orbits(chi)) {
        CharacterData phi = phi0;
        phi.p_exponent = chi.p_exponent;
        out.push_back(local_cyclotomic_factor(phi, N));
    }
    return out;
}

}  // namespace ramc::characters
