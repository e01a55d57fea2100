#pragma once

#include <algorithm>
#include <cstdint>
#include <map>
#include <numeric>
#include <ostream>
#include <stdexcept>
#include <string>
#include <vector>

#include <gmpxx.h>

namespace ramc {

/// Finite abelian group given by its invariant factors, stored the way PARI
/// prints class groups: non-increasing, each factor divisible by the next
/// ([18, 18, 9]). The trivial group is the empty list.
class AbelianGroupStructure {
  public:
    AbelianGroupStructure() = default;

    /// Accepts an arbitrary list of cyclic orders (e.g. [2, 3] or [9, 27])
    /// and normalizes it to invariant factors.
    explicit AbelianGroupStructure(const std::vector<long>& cyclic_orders) {
        for (long n : cyclic_orders)
            if (n <= 0) throw std::invalid_argument("cyclic factor orders must be positive");
        factors_ = normalize(cyclic_orders);
    }

    [[nodiscard]] const std::vector<long>& factors() const { return factors_; }
    [[nodiscard]] bool trivial() const { return factors_.empty(); }
    [[nodiscard]] std::size_t rank() const { return factors_.size(); }

    [[nodiscard]] mpz_class order() const {
        mpz_class o = 1;
        for (long d : factors_) o *= d;
        return o;
    }

    [[nodiscard]] long exponent() const { return factors_.empty() ? 1 : factors_.front(); }

    /// Sylow p-subgroup.
    [[nodiscard]] AbelianGroupStructure p_part(long p) const {
        std::vector<long> out;
        for (long d : factors_) {
            long pp = 1;
            while (d % p == 0) { d /= p; pp *= p; }
            if (pp > 1) out.push_back(pp);
        }
        return AbelianGroupStructure(out);
    }

    /// Order of the subgroup of m-th powers.
    [[nodiscard]] mpz_class order_of_powers(long m) const {
        mpz_class o = 1;
        for (long d : factors_) o *= d / std::gcd(d, m);
        return o;
    }

    friend bool operator==(const AbelianGroupStructure&, const AbelianGroupStructure&) = default;

    [[nodiscard]] std::string to_string() const {
        std::string s = "[";
        for (std::size_t i = 0; i < factors_.size(); ++i) {
            if (i) s += ",";
            s += std::to_string(factors_[i]);
        }
        return s + "]";
    }

    friend std::ostream& operator<<(std::ostream& os, const AbelianGroupStructure& g) { return os << g.to_string(); }

  private:
    static std::vector<long> normalize(const std::vector<long>& orders) {
        // prime -> exponents of the primary cyclic components
        std::map<long, std::vector<long>> primary;
        for (long n : orders) {
            for (long q = 2; q * q <= n; ++q) {
                if (n % q) continue;
                long pp = 1;
                while (n % q == 0) { n /= q; pp *= q; }
                primary[q].push_back(pp);
            }
            if (n > 1) primary[n].push_back(n);
        }
        std::size_t width = 0;
        for (auto& [q, v] : primary) {
            std::sort(v.begin(), v.end(), std::greater<>());
            width = std::max(width, v.size());
        }
        std::vector<long> out(width, 1);
        for (auto& [q, v] : primary)
            for (std::size_t i = 0; i < v.size(); ++i) out[i] *= v[i];
        return out;
    }

    std::vector<long> factors_;
};

/// Discards the prime-to-p part of a group.
inline AbelianGroupStructure p_part(const AbelianGroupStructure& g, long p) { return g.p_part(p); }

}  // namespace ramc
