#pragma once

#include <array>
#include <cstdint>
#include <numeric>
#include <stdexcept>
#include <string>
#include <thread>
#include <vector>

#include "ramc/characters.hpp"
#include "ramc/modular.hpp"
#include "ramc/real.hpp"

// Logarithms of Leopoldt cyclotomic units for the sextic fields K = k K0,
// k = Q(sqrt f) and K0 the cubic field of conductor q, F = f q.
//
// Throughout, |zeta^s - zeta^-s| with zeta = exp(i pi / F) equals
// 2 |sin(pi s / F)| and depends only on s mod F, so residues are kept mod F.
namespace ramc::cyclounits {

using characters::is_prime;

inline long mulmod(long a, long b, long m) {
    return static_cast<long>(static_cast<__int128>(a) * b % m);
}

inline long powmod(long b, long e, long m) {
    long r = 1 % m;
    b %= m;
    if (b < 0) b += m;
    while (e > 0) {
        if (e & 1) r = mulmod(r, b, m);
        b = mulmod(b, b, m);
        e >>= 1;
    }
    return r;
}

/// Smallest primitive root modulo an odd prime (GP's znprimroot).
inline long primitive_root(long p) {
    if (!is_prime(p) || p == 2) throw std::invalid_argument("primitive_root: odd prime expected");
    std::vector<long> primes;
    long n = p - 1;
    for (long r = 2; r * r <= n; ++r)
        if (n % r == 0) {
            primes.push_back(r);
            while (n % r == 0) n /= r;
        }
    if (n > 1) primes.push_back(n);
    for (long g = 2;; ++g) {
        bool ok = true;
        for (long r : primes)
            if (powmod(g, (p - 1) / r, p) == 1) { ok = false; break; }
        if (ok) return g;
    }
}

/// Table of discrete logarithms modulo `modulus` of the units of Z/p for a
/// primitive root; entry 0 is -1.
inline std::vector<int> dlog_table(long p, long generator, long modulus) {
    std::vector<int> t(static_cast<std::size_t>(p), -1);
    long x = 1;
    for (long e = 0; e < p - 1; ++e) {
        t[static_cast<std::size_t>(x)] = static_cast<int>(e % modulus);
        x = mulmod(x, generator, p);
    }
    return t;
}

inline void check_pair(long f, long q) {
    if (!is_prime(f) || f % 4 != 1) throw std::invalid_argument("f must be a prime congruent to 1 mod 4");
    if (!is_prime(q) || q % 3 != 1) throw std::invalid_argument("q must be a prime congruent to 1 mod 3");
    if (f == q) throw std::invalid_argument("f and q must be distinct");
}

/// Half-system of Gal(Q(zeta_2F)/K) as built by the survey program:
/// g^(2i) G^(3j) for 1 <= i <= (f-1)/2, 1 <= j <= (q-1)/6, where g and G are
/// the smallest primitive roots mod f and mod q lifted by CRT so that
/// g = 1 mod q and G = 1 mod f. Together with its negatives it is the
/// subgroup H of index 6 in (Z/F)^x fixing K.
struct ArtinGroup {
    long f = 0, q = 0, F = 0;
    long g0 = 0, G0 = 0;  ///< primitive roots before the CRT lift
    long g = 0, G = 0;
    std::vector<long> elements;

    [[nodiscard]] long modulus() const { return 2 * F; }
    [[nodiscard]] std::size_t size() const { return elements.size(); }
};

inline ArtinGroup artin_group(long f, long q) {
    check_pair(f, q);
    ArtinGroup A;
    A.f = f;
    A.q = q;
    A.F = f * q;
    A.g0 = primitive_root(f);
    A.G0 = primitive_root(q);
    // u = (1 - g)/f mod q, v = (1 - G)/q mod f
    long u = mulmod(((1 - A.g0) % q + q) % q, powmod(f % q, q - 2, q), q);
    long v = mulmod(((1 - A.G0) % f + f) % f, powmod(q % f, f - 2, f), f);
    A.g = A.g0 + u * f;
    A.G = A.G0 + v * q;
    const long F = A.F;
    long g2 = mulmod(A.g, A.g, F);
    long G3 = powmod(A.G, 3, F);
    long d2 = (f - 1) / 2, d3 = (q - 1) / 3;
    A.elements.reserve(static_cast<std::size_t>(d2 * (d3 / 2)));
    long gi = 1;
    for (long i = 1; i <= d2; ++i) {
        gi = mulmod(gi, g2, F);
        long a = gi;
        for (long j = 1; j <= d3 / 2; ++j) {
            a = mulmod(a, G3, F);
            A.elements.push_back(a);
        }
    }
    return A;
}

/// Projection (Z/F)^x -> Gal(K/Q) = Z/6, written as the exponent t of the
/// generator class of gG: t = dlog_g mod 2 and t = dlog_G mod 3. Returns -1
/// for residues not prime to F.
class SexticClassifier {
  public:
    SexticClassifier(long f, long q)
        : f_(f), q_(q), par_(dlog_table(f, primitive_root(f), 2)), cub_(dlog_table(q, primitive_root(q), 3)) {}

    [[nodiscard]] int parity(long k) const { return par_[static_cast<std::size_t>(k % f_)]; }
    [[nodiscard]] int cube_class(long k) const { return cub_[static_cast<std::size_t>(k % q_)]; }
    [[nodiscard]] int operator()(long k) const {
        int a = parity(k), b = cube_class(k);
        if (a < 0 || b < 0) return -1;
        return (3 * a + 4 * b) % 6;  // CRT: t = a mod 2, t = b mod 3
    }
    [[nodiscard]] long f() const { return f_; }
    [[nodiscard]] long q() const { return q_; }

  private:
    long f_, q_;
    std::vector<int> par_, cub_;
};

/// Sums of log|2 sin(pi k / M)| over 1 <= k <= (M-1)/2, grouped by
/// classify(k) in [0, classes); classify returns -1 to skip k.
///
/// Sines come from a rotation recurrence restarted from mpfr_sin_cos every
/// `chunk` steps; each chunk multiplies its terms per class and takes one log.
/// Chunk boundaries do not depend on `jobs`, so results are bit-identical for
/// any thread count.
template <class Classify>
std::vector<Real> sine_log_sums(long M, int classes, const Classify& classify, Precision prec, unsigned jobs = 1) {
    const long last = (M - 1) / 2;
    const long chunk = 8192;
    const long nchunks = last <= 0 ? 0 : (last + chunk - 1) / chunk;
    std::vector<std::vector<Real>> partial(static_cast<std::size_t>(nchunks));

    auto work = [&](long first_chunk, long step) {
        Real theta(prec), s(prec), c(prec), ds(prec), dc(prec), t1(prec), t2(prec), arg(prec);
        mpfr_const_pi(theta.raw(), MPFR_RNDN);
        mpfr_div_si(theta.raw(), theta.raw(), M, MPFR_RNDN);
        mpfr_sin_cos(ds.raw(), dc.raw(), theta.raw(), MPFR_RNDN);
        std::vector<Real> prod(static_cast<std::size_t>(classes), Real(1, prec));
        std::vector<long> count(static_cast<std::size_t>(classes));
        for (long ci = first_chunk; ci < nchunks; ci += step) {
            long k0 = 1 + ci * chunk, k1 = std::min(last + 1, k0 + chunk);
            for (auto& p : prod) mpfr_set_ui(p.raw(), 1, MPFR_RNDN);
            std::fill(count.begin(), count.end(), 0);
            mpfr_mul_si(arg.raw(), theta.raw(), k0, MPFR_RNDN);
            mpfr_sin_cos(s.raw(), c.raw(), arg.raw(), MPFR_RNDN);
            for (long k = k0; k < k1; ++k) {
                int cls = classify(k);
                if (cls >= 0) {
                    mpfr_mul(prod[static_cast<std::size_t>(cls)].raw(), prod[static_cast<std::size_t>(cls)].raw(), s.raw(), MPFR_RNDN);
                    ++count[static_cast<std::size_t>(cls)];
                }
                // (c, s) <- (c dc - s ds, s dc + c ds)
                mpfr_mul(t1.raw(), c.raw(), dc.raw(), MPFR_RNDN);
                mpfr_mul(t2.raw(), s.raw(), ds.raw(), MPFR_RNDN);
                mpfr_mul(s.raw(), s.raw(), dc.raw(), MPFR_RNDN);
                mpfr_fma(s.raw(), c.raw(), ds.raw(), s.raw(), MPFR_RNDN);
                mpfr_sub(c.raw(), t1.raw(), t2.raw(), MPFR_RNDN);
            }
            auto& out = partial[static_cast<std::size_t>(ci)];
            out.assign(static_cast<std::size_t>(classes), Real(prec));
            for (int cl = 0; cl < classes; ++cl) {
                auto& p = prod[static_cast<std::size_t>(cl)];
                mpfr_mul_2si(p.raw(), p.raw(), count[static_cast<std::size_t>(cl)], MPFR_RNDN);
                mpfr_log(out[static_cast<std::size_t>(cl)].raw(), p.raw(), MPFR_RNDN);
            }
        }
    };

    jobs = std::max(1u, std::min<unsigned>(jobs, static_cast<unsigned>(std::max<long>(1, nchunks))));
    if (jobs == 1) {
        work(0, 1);
    } else {
        std::vector<std::thread> pool;
        for (unsigned t = 0; t < jobs; ++t) pool.emplace_back(work, static_cast<long>(t), static_cast<long>(jobs));
        for (auto& th : pool) th.join();
    }

    std::vector<Real> sums(static_cast<std::size_t>(classes), Real(prec));
    for (const auto& part : partial)
        for (int cl = 0; cl < classes; ++cl) sums[static_cast<std::size_t>(cl)] += part[static_cast<std::size_t>(cl)];
    return sums;
}

struct CyclotomicUnitLog {
    std::string label;
    Real value;
    int digits = 150;
};

/// log|theta_rho| = sum over the half-system of log|2 sin(pi a / f_rho)|.
inline CyclotomicUnitLog leopoldt_theta_log(const characters::CharacterData& rho, const std::vector<long>& halfsystem,
                                           int digits) {
    if (!rho.conductor) throw std::invalid_argument("leopoldt_theta_log: character conductor unknown");
    const long m = *rho.conductor;
    Precision prec{digits};
    Real sum(prec), x(prec);
    Real pim = pi(prec);
    mpfr_div_si(pim.raw(), pim.raw(), m, MPFR_RNDN);
    for (long a : halfsystem) {
        if (std::gcd(a, m) != 1) throw std::invalid_argument("half-system residue " + std::to_string(a) + " not prime to the conductor");
        mpfr_mul_si(x.raw(), pim.raw(), a, MPFR_RNDN);
        mpfr_sin(x.raw(), x.raw(), MPFR_RNDN);
        mpfr_abs(x.raw(), x.raw(), MPFR_RNDN);
        mpfr_mul_2ui(x.raw(), x.raw(), 1, MPFR_RNDN);
        mpfr_log(x.raw(), x.raw(), MPFR_RNDN);
        sum += x;
    }
    return {rho.label(), sum, digits};
}

/// Minimal complex numbers over Real for the program-faithful route.
struct Complex {
    Real re, im;
    friend Complex operator*(const Complex& a, const Complex& b) {
        return {a.re * b.re - a.im * b.im, a.re * b.im + a.im * b.re};
    }
};

inline Complex complex_power(Complex base, long e, Precision prec) {
    Complex r{Real(1, prec), Real(prec)};
    while (e > 0) {
        if (e & 1) r = r * base;
        base = base * base;
        e >>= 1;
    }
    return r;
}

/// log|prod (zeta^a - zeta^-a)|, zeta = exp(i pi / m), with zeta^a obtained by
/// complex powering. Cross-check for the sine route.
inline Real theta_log_complex(long m, const std::vector<long>& halfsystem, int digits) {
    Precision prec{digits};
    Real t = pi(prec);
    mpfr_div_si(t.raw(), t.raw(), m, MPFR_RNDN);
    Complex zeta{Real(prec), Real(prec)};
    mpfr_sin_cos(zeta.im.raw(), zeta.re.raw(), t.raw(), MPFR_RNDN);
    Complex prod{Real(1, prec), Real(prec)};
    Real acc(prec);
    std::size_t n = 0;
    for (long a : halfsystem) {
        Complex z = complex_power(zeta, a, prec);
        // zeta^a - zeta^-a = 2 i Im(zeta^a)
        prod = prod * Complex{Real(prec), z.im * 2};
        if (++n % 256 == 0) {
            acc += log(sqrt(prod.re * prod.re + prod.im * prod.im));
            prod = Complex{Real(1, prec), Real(prec)};
        }
    }
    return acc + log(sqrt(prod.re * prod.re + prod.im * prod.im));
}

enum class Route { Sine, Program };

/// The three relative cyclotomic units eta_i = C(G^i g) / C(G^i g^2), where
/// C(b) is the product over the half-system b*A. With classes t in Z/6 as in
/// SexticClassifier, eta_i compares t = (i mod 3, odd) with t = (i mod 3, even).
///
/// Route::Sine sums log|2 sin(pi k/F)| by class over 1 <= k < F/2 (a
/// half-system for every coset); Route::Program multiplies over b*A exactly as
/// the survey program and is only practical for small F.
inline std::array<CyclotomicUnitLog, 3> relative_cyclotomic_logs(long f, long q, int digits, Route route = Route::Sine,
                                                                 unsigned jobs = 1) {
    check_pair(f, q);
    if (digits < 50) throw std::invalid_argument("precision below 50 digits");
    Precision prec{digits};
    std::array<CyclotomicUnitLog, 3> out;
    if (route == Route::Sine) {
        SexticClassifier cls(f, q);
        auto S = sine_log_sums(f * q, 6, cls, prec, jobs);
        for (int i = 1; i <= 3; ++i) {
            int odd = (3 + 4 * (i % 3)) % 6, even = (4 * (i % 3)) % 6;
            out[static_cast<std::size_t>(i - 1)] = {"eta_" + std::to_string(i), S[static_cast<std::size_t>(odd)] - S[static_cast<std::size_t>(even)], digits};
        }
        return out;
    }
    ArtinGroup A = artin_group(f, q);
    const long F = A.F;
    std::array<Real, 6> C{Real(prec), Real(prec), Real(prec), Real(prec), Real(prec), Real(prec)};
    for (int i = 1; i <= 3; ++i)
        for (int j = 1; j <= 2; ++j) {
            long b = mulmod(powmod(A.G, i, F), powmod(A.g, j, F), F);
            std::vector<long> coset;
            coset.reserve(A.size());
            for (long a : A.elements) coset.push_back(mulmod(a, b, F));
            C[static_cast<std::size_t>(2 * (i - 1) + (j - 1))] = theta_log_complex(F, coset, digits);
        }
    for (int i = 0; i < 3; ++i)
        out[static_cast<std::size_t>(i)] = {"eta_" + std::to_string(i + 1), C[static_cast<std::size_t>(2 * i)] - C[static_cast<std::size_t>(2 * i + 1)], digits};
    return out;
}

/// Galois action on the eta vector: class shift by t in Z/6. The eta_i are
/// differences of class sums, so conjugation permutes the six sums.
inline std::array<Real, 6> class_sums(long f, long q, int digits, unsigned jobs = 1) {
    SexticClassifier cls(f, q);
    auto S = sine_log_sums(f * q, 6, cls, Precision{digits}, jobs);
    return {S[0], S[1], S[2], S[3], S[4], S[5]};
}

/// Factor degrees of a monic integer polynomial modulo a prime (distinct
/// degree factorization). Coefficients are given highest degree first, as GP
/// prints Vec(P). Returns an empty list when the reduction is not squarefree.
inline std::vector<long> splitting_degrees(const std::vector<long long>& coeffs_high_first, long ell) {
    ModRing R(ell, 1);
    std::vector<long long> low(coeffs_high_first.rbegin(), coeffs_high_first.rend());
    ModPoly P = ModPoly::from_integers(R, low);
    if (P.lead() != 1) throw std::invalid_argument("splitting_degrees: monic polynomial expected");
    std::vector<u64> d;
    for (long i = 1; i <= P.degree(); ++i) d.push_back(R.mul(R.from(i), P[static_cast<std::size_t>(i)]));
    if (poly_gcd(P, ModPoly(R, d)).degree() > 0) return {};
    std::vector<long> degs;
    ModPoly x = ModPoly::monomial(R, 1);
    ModPoly h = x;
    for (long k = 1; 2 * k <= P.degree(); ++k) {
        h = h.powmod(mpz_class(ell), P);
        ModPoly g = poly_gcd(P, h - x);
        for (long i = 0; i < g.degree() / k; ++i) degs.push_back(k);
        if (g.degree() > 0) {
            P = P / g;
            h = h % P;
        }
    }
    if (P.degree() > 0) degs.push_back(P.degree());
    std::sort(degs.begin(), degs.end());
    return degs;
}

class NotInert : public std::domain_error {
  public:
    NotInert(long ell, long order, long degree)
        : std::domain_error("l=" + std::to_string(ell) + " is not inert in K: it splits into " +
                            std::to_string(degree / order) + " primes of residue degree " + std::to_string(order)),
          residue_degree(order), primes(degree / order) {}
    long residue_degree;
    long primes;
};

/// Exponent t of the Frobenius of ell in Gal(K/Q) = Z/6.
inline int frobenius_class(long f, long q, long ell) {
    SexticClassifier cls(f, q);
    int t = cls(ell % (f * q));
    if (t < 0) throw std::invalid_argument("l divides the conductor");
    return t;
}

/// Residue degree of ell in K, i.e. the order of its Frobenius.
inline long residue_degree(long f, long q, long ell) {
    int t = frobenius_class(f, q, ell);
    return 6 / std::gcd(t, 6);
}

struct NormComponent {
    std::string label;
    Real residual;
    bool skipped = false;
};

struct NormRelationReport {
    long f = 0, q = 0, ell = 0;
    int n = 1;  ///< [L:K] = 3^n
    int frobenius = 0;
    Real residual;              ///< max over the eta_i
    Real class_residual;        ///< max over all six class sums, both tame components
    std::vector<NormComponent> components;
    bool omega_invertible = false;  ///< Omega e_phi0 inverted explicitly mod 3^20
    int digits = 150;

    [[nodiscard]] bool passed() const { return residual < pow10(-(digits / 5), Precision{digits}); }
};

/// Checks N_{L/K}(eta_L) = eta_K^Omega, Omega = 1 - Frob_l^-1, for L = K M0
/// with M0 the subfield of degree 3^n of Q(zeta_l).
///
/// The left side is computed from the conjugates of eta_L: classes of
/// (Z/Fl)^x modulo the subgroup fixing L, each a sine sum over a
/// half-system, then added over the fibres of L/K. The right side uses only
/// the sine sums of conductor F.
inline NormRelationReport verify_norm_relation(long f, long q, long ell, int digits, int n = 1, unsigned jobs = 1,
                                               const std::vector<long long>* defining_polynomial = nullptr) {
    check_pair(f, q);
    const long pn = characters::ipow(3, n);
    if (!is_prime(ell) || (ell - 1) % (2 * pn) != 0)
        throw std::invalid_argument("l=" + std::to_string(ell) + " is not a prime congruent to 1 mod 2*3^" + std::to_string(n));
    long deg = residue_degree(f, q, ell);
    if (deg != 6) throw NotInert(ell, deg, 6);
    if (defining_polynomial) {
        auto degs = splitting_degrees(*defining_polynomial, ell);
        if (degs != std::vector<long>{6}) throw std::logic_error("defining polynomial does not stay irreducible mod l");
    }

    Precision prec{digits};
    SexticClassifier cls(f, q);
    const long F = f * q;
    auto ell_class = dlog_table(ell, primitive_root(ell), pn);
    auto classify_L = [&](long k) -> int {
        int t = cls(k % F);
        int u = ell_class[static_cast<std::size_t>(k % ell)];
        if (t < 0 || u < 0) return -1;
        return t * static_cast<int>(pn) + u;
    };
    auto SL = sine_log_sums(F * ell, static_cast<int>(6 * pn), classify_L, prec, jobs);
    auto SK = sine_log_sums(F, 6, cls, prec, jobs);

    NormRelationReport rep;
    rep.f = f;
    rep.q = q;
    rep.ell = ell;
    rep.n = n;
    rep.digits = digits;
    rep.frobenius = frobenius_class(f, q, ell);
    std::array<Real, 6> D{Real(prec), Real(prec), Real(prec), Real(prec), Real(prec), Real(prec)};
    rep.class_residual = Real(prec);
    for (int c = 0; c < 6; ++c) {
        Real norm(prec);
        for (long u = 0; u < pn; ++u) norm += SL[static_cast<std::size_t>(c * pn + u)];
        int shifted = ((c - rep.frobenius) % 6 + 6) % 6;
        D[static_cast<std::size_t>(c)] = norm - (SK[static_cast<std::size_t>(c)] - SK[static_cast<std::size_t>(shifted)]);
        Real a = abs(D[static_cast<std::size_t>(c)]);
        if (rep.class_residual < a) rep.class_residual = a;
    }
    rep.residual = Real(prec);
    for (int i = 1; i <= 3; ++i) {
        std::size_t odd = static_cast<std::size_t>((3 + 4 * (i % 3)) % 6), even = static_cast<std::size_t>((4 * (i % 3)) % 6);
        Real r = abs(D[odd] - D[even]);
        rep.components.push_back({"phi0=quadratic eta_" + std::to_string(i), r, false});
        if (rep.residual < r) rep.residual = r;
    }
    rep.components.push_back({"phi0=1", Real(prec), true});

    // Omega = 1 - sigma_chi^(-t) acting on the phi0-component, phi0 of order 2
    characters::CyclicGroupSpec g(2, 3, 1);
    ModRing R(3, 20);
    characters::CharacterData phi0;
    phi0.kind = characters::CharacterKind::PAdic;
    phi0.tame_order = 2;
    phi0.orbit = {1};
    auto e = characters::idempotent(phi0, g, 20);
    auto omega = characters::GroupRingElement::one_minus(g, R, (6 - rep.frobenius) % 6) * e;
    auto inv = characters::group_ring_invert(omega, e);
    rep.omega_invertible = inv.has_value() && omega * *inv == e;
    return rep;
}

}  // namespace ramc::cyclounits
