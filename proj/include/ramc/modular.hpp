#pragma once

#include <algorithm>
#include <cstdint>
#include <numeric>
#include <random>
#include <stdexcept>
#include <utility>
#include <vector>

#include <gmpxx.h>

namespace ramc {

using u64 = std::uint64_t;
using u128 = unsigned __int128;

/// Z/p^N Z for an odd prime p, with p^N < 2^62.
class ModRing {
  public:
    ModRing(long p, int N) : p_(p), N_(N) {
        if (p < 3 || N < 1) throw std::invalid_argument("ModRing needs an odd prime p and N >= 1");
        u128 m = 1;
        for (int i = 0; i < N; ++i) {
            m *= static_cast<u64>(p);
            if (m >= (u128(1) << 62)) throw std::invalid_argument("p^N too large for 64-bit residues");
        }
        mod_ = static_cast<u64>(m);
    }

    [[nodiscard]] long p() const { return p_; }
    [[nodiscard]] int N() const { return N_; }
    [[nodiscard]] u64 modulus() const { return mod_; }
    [[nodiscard]] ModRing reduced(int n) const { return ModRing(p_, n); }

    [[nodiscard]] u64 from(long long v) const {
        long long r = v % static_cast<long long>(mod_);
        return static_cast<u64>(r < 0 ? r + static_cast<long long>(mod_) : r);
    }
    [[nodiscard]] u64 add(u64 a, u64 b) const { u64 s = a + b; return s >= mod_ ? s - mod_ : s; }
    [[nodiscard]] u64 sub(u64 a, u64 b) const { return a >= b ? a - b : a + mod_ - b; }
    [[nodiscard]] u64 neg(u64 a) const { return a == 0 ? 0 : mod_ - a; }
    [[nodiscard]] u64 mul(u64 a, u64 b) const { return static_cast<u64>((u128(a) * b) % mod_); }

    [[nodiscard]] u64 pow(u64 a, u64 e) const {
        u64 r = 1 % mod_;
        while (e) {
            if (e & 1) r = mul(r, a);
            a = mul(a, a);
            e >>= 1;
        }
        return r;
    }

    [[nodiscard]] bool is_unit(u64 a) const { return a % static_cast<u64>(p_) != 0; }

    /// Inverse of a unit; throws on non-units.
    [[nodiscard]] u64 inv(u64 a) const {
        long long t = 0, nt = 1;
        long long r = static_cast<long long>(mod_), nr = static_cast<long long>(a % mod_);
        while (nr) {
            long long q = r / nr;
            std::tie(t, nt) = std::make_pair(nt, t - q * nt);
            std::tie(r, nr) = std::make_pair(nr, r - q * nr);
        }
        if (r != 1) throw std::domain_error("element is not a unit modulo p^N");
        return from(t);
    }

    friend bool operator==(const ModRing& a, const ModRing& b) { return a.mod_ == b.mod_; }

  private:
    long p_;
    int N_;
    u64 mod_ = 1;
};

/// Dense polynomial over Z/p^N, coefficients low degree first, no trailing zeros.
class ModPoly {
  public:
    explicit ModPoly(ModRing ring) : ring_(ring) {}
    ModPoly(ModRing ring, std::vector<u64> coeffs) : ring_(ring), c_(std::move(coeffs)) { trim(); }

    static ModPoly from_integers(ModRing ring, const std::vector<long long>& coeffs) {
        std::vector<u64> c;
        c.reserve(coeffs.size());
        for (long long v : coeffs) c.push_back(ring.from(v));
        return ModPoly(ring, std::move(c));
    }
    static ModPoly monomial(ModRing ring, std::size_t degree, u64 coeff = 1) {
        std::vector<u64> c(degree + 1, 0);
        c[degree] = coeff;
        return ModPoly(ring, std::move(c));
    }

    [[nodiscard]] const ModRing& ring() const { return ring_; }
    [[nodiscard]] const std::vector<u64>& coeffs() const { return c_; }
    [[nodiscard]] bool is_zero() const { return c_.empty(); }
    [[nodiscard]] long degree() const { return static_cast<long>(c_.size()) - 1; }
    [[nodiscard]] u64 operator[](std::size_t i) const { return i < c_.size() ? c_[i] : 0; }
    [[nodiscard]] u64 lead() const { return c_.empty() ? 0 : c_.back(); }
    [[nodiscard]] bool monic() const { return !c_.empty() && c_.back() == 1; }

    friend ModPoly operator+(const ModPoly& a, const ModPoly& b) {
        std::vector<u64> c(std::max(a.c_.size(), b.c_.size()), 0);
        for (std::size_t i = 0; i < c.size(); ++i) c[i] = a.ring_.add(a[i], b[i]);
        return ModPoly(a.ring_, std::move(c));
    }
    friend ModPoly operator-(const ModPoly& a, const ModPoly& b) {
        std::vector<u64> c(std::max(a.c_.size(), b.c_.size()), 0);
        for (std::size_t i = 0; i < c.size(); ++i) c[i] = a.ring_.sub(a[i], b[i]);
        return ModPoly(a.ring_, std::move(c));
    }
    friend ModPoly operator*(const ModPoly& a, const ModPoly& b) {
        if (a.is_zero() || b.is_zero()) return ModPoly(a.ring_);
        std::vector<u64> c(a.c_.size() + b.c_.size() - 1, 0);
        for (std::size_t i = 0; i < a.c_.size(); ++i) {
            if (!a.c_[i]) continue;
            for (std::size_t j = 0; j < b.c_.size(); ++j) c[i + j] = a.ring_.add(c[i + j], a.ring_.mul(a.c_[i], b.c_[j]));
        }
        return ModPoly(a.ring_, std::move(c));
    }
    [[nodiscard]] ModPoly scaled(u64 k) const {
        std::vector<u64> c(c_);
        for (auto& v : c) v = ring_.mul(v, k);
        return ModPoly(ring_, std::move(c));
    }
    friend bool operator==(const ModPoly& a, const ModPoly& b) { return a.ring_ == b.ring_ && a.c_ == b.c_; }

    /// Division with remainder; the divisor's leading coefficient must be a unit.
    [[nodiscard]] std::pair<ModPoly, ModPoly> divmod(const ModPoly& d) const {
        if (d.is_zero()) throw std::domain_error("polynomial division by zero");
        if (degree() < d.degree()) return {ModPoly(ring_), *this};
        u64 inv_lead = ring_.inv(d.lead());
        std::vector<u64> r(c_);
        std::vector<u64> q(c_.size() - d.c_.size() + 1, 0);
        for (long i = degree(); i >= d.degree(); --i) {
            u64 coef = ring_.mul(r[static_cast<std::size_t>(i)], inv_lead);
            std::size_t shift = static_cast<std::size_t>(i - d.degree());
            q[shift] = coef;
            if (!coef) continue;
            for (std::size_t j = 0; j < d.c_.size(); ++j) r[shift + j] = ring_.sub(r[shift + j], ring_.mul(coef, d.c_[j]));
        }
        return {ModPoly(ring_, std::move(q)), ModPoly(ring_, std::move(r))};
    }
    [[nodiscard]] ModPoly operator%(const ModPoly& d) const { return divmod(d).second; }
    [[nodiscard]] ModPoly operator/(const ModPoly& d) const { return divmod(d).first; }

    /// this^e mod m
    [[nodiscard]] ModPoly powmod(mpz_class e, const ModPoly& m) const {
        ModPoly result = ModPoly(ring_, {1}) % m;
        ModPoly base = *this % m;
        while (e > 0) {
            if (mpz_odd_p(e.get_mpz_t())) result = (result * base) % m;
            base = (base * base) % m;
            e >>= 1;
        }
        return result;
    }

    /// p(x^k)
    [[nodiscard]] ModPoly compose_power(std::size_t k) const {
        if (is_zero()) return *this;
        std::vector<u64> c(static_cast<std::size_t>(degree()) * k + 1, 0);
        for (std::size_t i = 0; i < c_.size(); ++i) c[i * k] = c_[i];
        return ModPoly(ring_, std::move(c));
    }

    [[nodiscard]] ModPoly make_monic() const {
        if (is_zero()) return *this;
        return scaled(ring_.inv(lead()));
    }

    [[nodiscard]] ModPoly reduced_mod(const ModRing& smaller) const {
        std::vector<u64> c(c_);
        for (auto& v : c) v %= smaller.modulus();
        return ModPoly(smaller, std::move(c));
    }
    [[nodiscard]] ModPoly lifted_to(const ModRing& bigger) const { return ModPoly(bigger, c_); }

  private:
    void trim() {
        while (!c_.empty() && c_.back() == 0) c_.pop_back();
    }

    ModRing ring_;
    std::vector<u64> c_;
};

/// Monic gcd over a prime field (ring N must be 1).
inline ModPoly poly_gcd(ModPoly a, ModPoly b) {
    while (!b.is_zero()) {
        ModPoly r = a % b;
        a = std::move(b);
        b = std::move(r);
    }
    return a.make_monic();
}

/// Extended Euclid over a prime field: returns (g, s, t) with s a + t b = g monic.
inline std::tuple<ModPoly, ModPoly, ModPoly> poly_xgcd(ModPoly a, ModPoly b) {
    const ModRing& R = a.ring();
    ModPoly s0(R, {1}), s1(R), t0(R), t1(R, {1});
    while (!b.is_zero()) {
        auto [q, r] = a.divmod(b);
        a = std::move(b);
        b = std::move(r);
        ModPoly s2 = s0 - q * s1;
        ModPoly t2 = t0 - q * t1;
        s0 = std::move(s1); s1 = std::move(s2);
        t0 = std::move(t1); t1 = std::move(t2);
    }
    u64 k = R.inv(a.lead());
    return {a.scaled(k), s0.scaled(k), t0.scaled(k)};
}

/// Equal-degree factorization (Cantor-Zassenhaus) of a squarefree monic
/// polynomial over F_p all of whose irreducible factors have degree `d`.
/// Uses a fixed-seed generator so the output order is reproducible.
inline std::vector<ModPoly> equal_degree_factorization(const ModPoly& h, long d, std::uint64_t seed = 0x5eed) {
    const ModRing& R = h.ring();
    if (R.N() != 1) throw std::invalid_argument("equal-degree factorization works over F_p");
    if (h.degree() == d) return {h.make_monic()};
    std::mt19937_64 rng(seed);
    mpz_class pd;
    mpz_ui_pow_ui(pd.get_mpz_t(), static_cast<unsigned long>(R.p()), static_cast<unsigned long>(d));
    mpz_class half = (pd - 1) / 2;
    std::vector<ModPoly> pending{h.make_monic()}, done;
    while (!pending.empty()) {
        ModPoly g = pending.back();
        pending.pop_back();
        if (g.degree() == d) { done.push_back(g); continue; }
        while (true) {
            std::vector<u64> c(static_cast<std::size_t>(g.degree()));
            for (auto& v : c) v = rng() % R.modulus();
            ModPoly a(R, c);
            if (a.degree() < 1) continue;
            ModPoly b = a.powmod(half, g) - ModPoly(R, {1});
            ModPoly f = poly_gcd(g, b);
            if (f.degree() > 0 && f.degree() < g.degree()) {
                pending.push_back(f);
                pending.push_back(g / f);
                break;
            }
        }
    }
    std::sort(done.begin(), done.end(), [](const ModPoly& a, const ModPoly& b) { return a.coeffs() < b.coeffs(); });
    return done;
}

/// Lifts monic g | P (mod p), with g and P/g coprime mod p, to the unique
/// monic factor of P modulo p^N (P monic over Z/p^N).
inline ModPoly hensel_lift_factor(const ModPoly& P, const ModPoly& g_mod_p) {
    const ModRing& big = P.ring();
    ModRing small = big.reduced(1);
    ModPoly Pp = P.reduced_mod(small);
    ModPoly h_mod_p = Pp / g_mod_p;
    auto [one, s, t] = poly_xgcd(g_mod_p, h_mod_p);
    if (one.degree() != 0) throw std::domain_error("Hensel lifting needs coprime factors mod p");
    ModPoly g = g_mod_p.lifted_to(big);
    u64 pk = 1;
    for (int k = 1; k < big.N(); ++k) {
        pk *= static_cast<u64>(big.p());
        ModRing cur = big.reduced(k + 1);
        ModPoly Pk = P.reduced_mod(cur);
        ModPoly gk = g.reduced_mod(cur);
        ModPoly hk = Pk / gk;
        ModPoly err = Pk - gk * hk;  // divisible by p^k
        std::vector<u64> ec;
        for (u64 v : err.coeffs()) ec.push_back((v / pk) % static_cast<u64>(big.p()));
        ModPoly e(small, ec);
        ModPoly dg = (e * t) % g_mod_p;
        std::vector<u64> gc(gk.coeffs());
        gc.resize(std::max<std::size_t>(gc.size(), dg.coeffs().size()), 0);
        for (std::size_t i = 0; i < dg.coeffs().size(); ++i) gc[i] = cur.add(gc[i], cur.mul(pk % cur.modulus(), dg.coeffs()[i]));
        g = ModPoly(big, gc);
    }
    return g;
}

}  // namespace ramc
