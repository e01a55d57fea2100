#pragma once

#include <mpfr.h>

#include <cmath>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <string_view>
#include <utility>

#include <gmpxx.h>

namespace ramc {

/// Working precision, expressed in decimal digits. Converted to a binary
/// precision with a fixed number of guard bits.
struct Precision {
    int digits = 150;

    [[nodiscard]] mpfr_prec_t bits() const {
        return static_cast<mpfr_prec_t>(std::ceil(digits * 3.3219280948873623)) + 32;
    }
    [[nodiscard]] Precision doubled() const { return Precision{digits * 2}; }
    friend bool operator==(Precision, Precision) = default;
};

/// Arbitrary-precision real backed by an mpfr_t. Every value carries its own
/// precision; binary operations round to the larger of the two operands.
class Real {
  public:
    explicit Real(Precision prec = {}) { mpfr_init2(v_, prec.bits()); mpfr_set_zero(v_, 1); }
    Real(long value, Precision prec) : Real(prec) { mpfr_set_si(v_, value, MPFR_RNDN); }
    Real(const mpz_class& value, Precision prec) : Real(prec) { mpfr_set_z(v_, value.get_mpz_t(), MPFR_RNDN); }

    /// Parses a decimal string such as "-5.4249306103686879" or "0.E-154".
    static Real parse(std::string_view text, Precision prec) {
        Real r(prec);
        std::string s(text);
        if (s.empty() || mpfr_set_str(r.v_, s.c_str(), 10, MPFR_RNDN) != 0)
            throw std::invalid_argument("malformed decimal number: '" + s + "'");
        return r;
    }

    static Real from_bits(mpfr_prec_t bits) {
        Real r;
        mpfr_set_prec(r.v_, bits);
        mpfr_set_zero(r.v_, 1);
        return r;
    }

    Real(const Real& o) { mpfr_init2(v_, mpfr_get_prec(o.v_)); mpfr_set(v_, o.v_, MPFR_RNDN); }
    Real(Real&& o) noexcept {
        mpfr_init2(v_, mpfr_get_prec(o.v_));
        mpfr_swap(v_, o.v_);
    }
    Real& operator=(const Real& o) {
        if (this != &o) {
            mpfr_set_prec(v_, mpfr_get_prec(o.v_));
            mpfr_set(v_, o.v_, MPFR_RNDN);
        }
        return *this;
    }
    Real& operator=(Real&& o) noexcept {
        mpfr_swap(v_, o.v_);
        return *this;
    }
    ~Real() { mpfr_clear(v_); }

    [[nodiscard]] mpfr_prec_t bits() const { return mpfr_get_prec(v_); }
    [[nodiscard]] mpfr_ptr raw() { return v_; }
    [[nodiscard]] mpfr_srcptr raw() const { return v_; }

    [[nodiscard]] double to_double() const { return mpfr_get_d(v_, MPFR_RNDN); }
    [[nodiscard]] bool is_zero() const { return mpfr_zero_p(v_) != 0; }
    [[nodiscard]] bool is_finite() const { return mpfr_number_p(v_) != 0; }
    [[nodiscard]] int sign() const { return mpfr_sgn(v_); }

    /// Decimal rendering with `digits` significant digits, e.g. "-5.4249306e0".
    [[nodiscard]] std::string to_string(int digits) const {
        if (mpfr_zero_p(v_)) return "0";
        char* buf = nullptr;
        std::string fmt = "%." + std::to_string(digits - 1) + "Re";
        mpfr_asprintf(&buf, fmt.c_str(), v_);
        std::string out(buf);
        mpfr_free_str(buf);
        return out;
    }

    /// Rounds to the nearest integer.
    [[nodiscard]] mpz_class round() const {
        mpz_class z;
        mpfr_get_z(z.get_mpz_t(), v_, MPFR_RNDN);
        return z;
    }

    Real& operator+=(const Real& o) { widen(o); mpfr_add(v_, v_, o.v_, MPFR_RNDN); return *this; }
    Real& operator-=(const Real& o) { widen(o); mpfr_sub(v_, v_, o.v_, MPFR_RNDN); return *this; }
    Real& operator*=(const Real& o) { widen(o); mpfr_mul(v_, v_, o.v_, MPFR_RNDN); return *this; }
    Real& operator/=(const Real& o) { widen(o); mpfr_div(v_, v_, o.v_, MPFR_RNDN); return *this; }
    Real& operator*=(long k) { mpfr_mul_si(v_, v_, k, MPFR_RNDN); return *this; }
    Real& operator+=(long k) { mpfr_add_si(v_, v_, k, MPFR_RNDN); return *this; }

    friend Real operator+(Real a, const Real& b) { return a += b; }
    friend Real operator-(Real a, const Real& b) { return a -= b; }
    friend Real operator*(Real a, const Real& b) { return a *= b; }
    friend Real operator/(Real a, const Real& b) { return a /= b; }
    friend Real operator*(Real a, long k) { return a *= k; }
    friend Real operator*(long k, Real a) { return a *= k; }
    friend Real operator-(Real a) { mpfr_neg(a.v_, a.v_, MPFR_RNDN); return a; }

    friend bool operator<(const Real& a, const Real& b) { return mpfr_less_p(a.v_, b.v_) != 0; }
    friend bool operator>(const Real& a, const Real& b) { return mpfr_greater_p(a.v_, b.v_) != 0; }
    friend bool operator==(const Real& a, const Real& b) { return mpfr_equal_p(a.v_, b.v_) != 0; }

  private:
    void widen(const Real& o) {
        if (mpfr_get_prec(o.v_) > mpfr_get_prec(v_)) mpfr_prec_round(v_, mpfr_get_prec(o.v_), MPFR_RNDN);
    }

    mpfr_t v_;
};

inline Real abs(Real x) { mpfr_abs(x.raw(), x.raw(), MPFR_RNDN); return x; }
inline Real log(Real x) { mpfr_log(x.raw(), x.raw(), MPFR_RNDN); return x; }
inline Real exp(Real x) { mpfr_exp(x.raw(), x.raw(), MPFR_RNDN); return x; }
inline Real sqrt(Real x) { mpfr_sqrt(x.raw(), x.raw(), MPFR_RNDN); return x; }
inline Real sin(Real x) { mpfr_sin(x.raw(), x.raw(), MPFR_RNDN); return x; }

inline Real pi(Precision prec) {
    Real r(prec);
    mpfr_const_pi(r.raw(), MPFR_RNDN);
    return r;
}

/// 10^exponent at the given precision.
inline Real pow10(long exponent, Precision prec) {
    Real r(prec);
    mpfr_ui_pow_ui(r.raw(), 10, static_cast<unsigned long>(exponent < 0 ? -exponent : exponent), MPFR_RNDN);
    if (exponent < 0) mpfr_ui_div(r.raw(), 1, r.raw(), MPFR_RNDN);
    return r;
}

/// |a - b| < 10^exponent
inline bool close(const Real& a, const Real& b, long exponent) {
    Real d = abs(a - b);
    return d < pow10(exponent, Precision{static_cast<int>(std::max<long>(20, -exponent + 20))});
}

/// log10 |x| as a double; -inf for zero. Handy for reporting residuals.
inline double log10_abs(const Real& x) {
    if (x.is_zero()) return -INFINITY;
    long exp2 = 0;
    double mant = mpfr_get_d_2exp(&exp2, x.raw(), MPFR_RNDN);
    return std::log10(std::fabs(mant)) + static_cast<double>(exp2) * 0.30102999566398120;
}

}  // namespace ramc
