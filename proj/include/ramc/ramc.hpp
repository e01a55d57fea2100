#pragma once

#include <algorithm>
#include <functional>
#include <map>
#include <optional>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include <gmpxx.h>

#include "ramc/abelian_group.hpp"
#include "ramc/casbridge.hpp"
#include "ramc/characters.hpp"
#include "ramc/lattice.hpp"
#include "ramc/quadratic.hpp"
#include "ramc/real.hpp"

namespace ramc {

class DataInconsistency : public std::runtime_error {
  public:
    using std::runtime_error::runtime_error;
};

/// #H^ar_{K,chi} = #H_K / (#H_k · #H_K0) on 3-parts; the K0 part is
/// trivial in every shipped case.
inline long arithmetic_component_order(const AbelianGroupStructure& hK3, const AbelianGroupStructure& hk3,
                                       const AbelianGroupStructure& hK03 = {}) {
    mpz_class below = hk3.order() * hK03.order();
    if (hK3.order() % below != 0)
        throw DataInconsistency("#H_k · #H_K0 = " + below.get_str() + " does not divide #H_K = " + hK3.order().get_str());
    return mpz_class(hK3.order() / below).get_si();
}

/// Invariant types mu of subgroups S of a finite abelian p-group of type
/// lambda with cyclic quotient of order p^m: lambda/mu is a horizontal
/// strip of size m.
inline std::vector<AbelianGroupStructure> subgroups_with_cyclic_quotient(const AbelianGroupStructure& g, long p, long quotient_order) {
    std::vector<long> lam;
    for (long d : g.factors()) {
        long e = 0;
        while (d % p == 0) { d /= p; ++e; }
        if (d != 1) throw std::invalid_argument("group is not a p-group");
        lam.push_back(e);
    }
    long m = 0;
    for (long t = quotient_order; t > 1; t /= p) {
        if (t % p) throw std::invalid_argument("quotient order is not a power of p");
        ++m;
    }
    std::vector<AbelianGroupStructure> out;
    std::vector<long> mu(lam.size());
    std::function<void(std::size_t, long)> rec = [&](std::size_t i, long left) {
        if (i == lam.size()) {
            if (left != 0) return;
            std::vector<long> f;
            for (long e : mu)
                if (e > 0) f.push_back(characters::ipow(p, static_cast<int>(e)));
            out.emplace_back(f);
            return;
        }
        long lo = i + 1 < lam.size() ? lam[i + 1] : 0;
        for (long e = lam[i]; e >= lo; --e) {
            if (lam[i] - e > left) break;
            mu[i] = e;
            rec(i + 1, left - (lam[i] - e));
        }
    };
    rec(0, m);
    return out;
}

/// One analytic index computation: the stacked generators of E°_K F_K in
/// coordinates over the reduced unit basis, and the index they have.
struct AnalyticIndexResult {
    std::vector<long> epsilon0;              ///< native search over the basis
    lattice::IntegerMatrix relation_rows;    ///< eta_1, eta_2, eta_3
    lattice::IntegerMatrix relation_hnf;
    lattice::IntegerMatrix generators;       ///< epsilon0 stacked over the rows
    std::vector<std::size_t> basis;          ///< positions of the kept logs
    mpz_class literal_index;                 ///< index in Z^3
    long index = 1;                          ///< its p-part
    AbelianGroupStructure quotient;          ///< p-part of Z^3 / generators
    double worst_residual_log10 = 0;
};

inline AnalyticIndexResult analytic_index_details(const casbridge::FieldDataFixture& fx, int digits = 150,
                                                  const lattice::SearchOptions& opt = {}) {
    if (fx.unit_logs.size() < 3 || fx.cyclotomic_logs.size() != 3)
        throw std::invalid_argument("fixture needs at least three unit logs and three cyclotomic logs");
    casbridge::FieldDataFixture work = fx;
    work.digits = std::min(digits, fx.digits);
    auto native = casbridge::native_relations(work, opt);
    AnalyticIndexResult r;
    r.basis = native.reduction.basis;
    r.epsilon0 = native.epsilon0;
    r.relation_rows = native.eta.rows;
    r.relation_hnf = native.eta.hnf;
    r.generators = lattice::IntegerMatrix(0, 3);
    std::vector<mpz_class> e0(r.epsilon0.begin(), r.epsilon0.end());
    r.generators.append_row(e0);
    for (std::size_t i = 0; i < r.relation_rows.rows(); ++i) r.generators.append_row(r.relation_rows.row(i));
    auto idx = lattice::sublattice_index(r.generators);
    if (idx.infinite) throw DataInconsistency("epsilon0 and the cyclotomic units do not span a full-rank lattice");
    r.literal_index = idx.value;
    mpz_class pp = 1, v = idx.value;
    while (v % fx.p == 0) { v /= fx.p; pp *= fx.p; }
    r.index = pp.get_si();
    auto snf = lattice::smith_normal_form(r.generators);
    std::vector<long> qf;
    for (const auto& d : snf.divisors)
        if (d > 1) qf.push_back(d.get_si());
    r.quotient = p_part(AbelianGroupStructure(qf), fx.p);
    double worst = -1e9;
    for (const auto& res : native.eta.residuals) worst = std::max(worst, log10_abs(res));
    r.worst_residual_log10 = worst;
    return r;
}

/// (E_K : E°_K F_K)_{phi0}: the p-part of the index of the lattice spanned
/// by epsilon0 and the three relative cyclotomic units.
inline long analytic_index(const casbridge::FieldDataFixture& fx, int digits = 150) {
    return analytic_index_details(fx, digits).index;
}

/// x with A x = b over Q, or nullopt when A is singular.
inline std::optional<std::vector<mpq_class>> solve_rational(const lattice::IntegerMatrix& A, const std::vector<mpz_class>& b) {
    const std::size_t n = A.rows();
    std::vector<std::vector<mpq_class>> M(n, std::vector<mpq_class>(n + 1));
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = 0; j < n; ++j) M[i][j] = A(i, j);
        M[i][n] = b[i];
    }
    for (std::size_t c = 0; c < n; ++c) {
        std::size_t piv = c;
        while (piv < n && M[piv][c] == 0) ++piv;
        if (piv == n) return std::nullopt;
        std::swap(M[piv], M[c]);
        for (std::size_t i = 0; i < n; ++i) {
            if (i == c || M[i][c] == 0) continue;
            mpq_class t = M[i][c] / M[c][c];
            for (std::size_t j = c; j <= n; ++j) M[i][j] -= t * M[c][j];
        }
    }
    std::vector<mpq_class> x(n);
    for (std::size_t i = 0; i < n; ++i) {
        x[i] = M[i][n] / M[i][i];
        x[i].canonicalize();
    }
    return x;
}

/// A change of unit basis T (integral, det ±1) with [e0; R] T = [s·e0'; R'],
/// where R' is R with its rows permuted and s = ±1.
struct BasisChange {
    lattice::IntegerMatrix T;
    std::vector<std::size_t> row_order;
    int epsilon0_sign = 1;
};

inline std::optional<BasisChange> find_unit_basis_change(const std::vector<long>& eps_from, const lattice::IntegerMatrix& rows_from,
                                                         const std::vector<long>& eps_to, const lattice::IntegerMatrix& rows_to) {
    const std::size_t n = eps_from.size();
    if (eps_to.size() != n || rows_from.cols() != n || rows_to.cols() != n || rows_from.rows() != rows_to.rows())
        throw std::invalid_argument("basis change: shape mismatch");
    auto stack = [&](const std::vector<long>& e, const lattice::IntegerMatrix& R, int sign, const std::vector<std::size_t>& order) {
        lattice::IntegerMatrix M(0, n);
        std::vector<mpz_class> v;
        for (long x : e) v.emplace_back(sign * x);
        M.append_row(v);
        for (std::size_t i : order) M.append_row(R.row(i));
        return M;
    };
    std::vector<std::size_t> identity(rows_from.rows());
    for (std::size_t i = 0; i < identity.size(); ++i) identity[i] = i;
    const auto From = stack(eps_from, rows_from, 1, identity);
    // n independent rows of From
    std::vector<std::size_t> pick;
    {
        lattice::IntegerMatrix acc(0, n);
        for (std::size_t i = 0; i < From.rows() && pick.size() < n; ++i) {
            auto trial = acc;
            trial.append_row(From.row(i));
            if (lattice::hermite_normal_form(trial).rank == trial.rows()) {
                acc = trial;
                pick.push_back(i);
            }
        }
        if (pick.size() < n) return std::nullopt;
    }
    lattice::IntegerMatrix A(n, n);
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j) A(i, j) = From(pick[i], j);

    std::vector<std::size_t> order = identity;
    do {
        for (int sign : {1, -1}) {
            const auto To = stack(eps_to, rows_to, sign, order);
            lattice::IntegerMatrix T(n, n);
            bool ok = true;
            for (std::size_t col = 0; col < n && ok; ++col) {
                std::vector<mpz_class> b;
                for (std::size_t i : pick) b.push_back(To(i, col));
                auto x = solve_rational(A, b);
                if (!x) { ok = false; break; }
                for (std::size_t i = 0; i < n; ++i) {
                    if ((*x)[i].get_den() != 1) { ok = false; break; }
                    T(i, col) = (*x)[i].get_num();
                }
            }
            if (!ok) continue;
            mpz_class det = lattice::determinant(T);
            if (det != 1 && det != -1) continue;
            if (!(From * T == To)) continue;
            return BasisChange{T, order, sign};
        }
    } while (std::next_permutation(order.begin(), order.end()));
    return std::nullopt;
}

enum class Verdict { Equal, Unequal };

inline const char* to_string(Verdict v) { return v == Verdict::Equal ? "EQUAL" : "UNEQUAL"; }

struct CaseReport {
    long f = 0, q = 0, p = 3;
    AbelianGroupStructure class_group_K, class_group_k, class_group_K0;
    AbelianGroupStructure class_group_K3, class_group_k3, class_group_K03;
    lattice::IntegerMatrix relation_rows;
    lattice::IntegerMatrix relation_hnf;
    std::vector<long> epsilon0;
    mpz_class literal_index;
    long index = 0;
    long order = 0;
    Verdict verdict = Verdict::Unequal;
    AbelianGroupStructure unit_quotient;
    std::vector<AbelianGroupStructure> component_candidates;
    std::string structure_note;
    // dual-route checks
    bool k_side_consistent = false;   ///< native class group and regulator vs the CAS
    bool cas_relations_agree = true;  ///< CAS-printed rows vs native search, when printed
    bool epsilon0_agrees = true;      ///< CAS lindep vs native search, when printed
    std::vector<std::string> warnings;

    [[nodiscard]] std::string record() const {
        std::ostringstream o;
        o << "case: " << f << " " << q << " " << index << " " << order << " " << to_string(verdict);
        return o.str();
    }
};

inline std::string describe_structure(const AbelianGroupStructure& quotient, const std::vector<AbelianGroupStructure>& candidates) {
    std::ostringstream o;
    o << "unit quotient " << quotient.to_string() << " of order " << quotient.order();
    o << "; component ";
    if (candidates.size() == 1) {
        o << candidates.front().to_string();
    } else {
        for (std::size_t i = 0; i < candidates.size(); ++i) o << (i ? " or " : "") << candidates[i].to_string();
    }
    bool component_cyclic = std::all_of(candidates.begin(), candidates.end(), [](const auto& g) { return g.rank() <= 1; });
    bool component_noncyclic = std::none_of(candidates.begin(), candidates.end(), [](const auto& g) { return g.rank() <= 1; });
    if (quotient.rank() <= 1 && component_noncyclic) o << "; quotient cyclic but component not";
    if (quotient.rank() > 1 && component_cyclic) o << "; component cyclic but quotient not";
    return o.str();
}

inline CaseReport build_case_report(const casbridge::FieldDataFixture& fx, int digits = 150) {
    CaseReport rep;
    rep.f = fx.f;
    rep.q = fx.q;
    rep.p = fx.p;
    rep.class_group_K = fx.class_group_K;
    rep.class_group_k = fx.class_group_k;
    rep.class_group_K0 = fx.class_group_K0;
    rep.class_group_K3 = p_part(fx.class_group_K, fx.p);
    rep.class_group_k3 = p_part(fx.class_group_k, fx.p);
    rep.class_group_K03 = p_part(fx.class_group_K0, fx.p);
    rep.order = arithmetic_component_order(rep.class_group_K3, rep.class_group_k3, rep.class_group_K03);

    auto ai = analytic_index_details(fx, digits);
    rep.relation_rows = ai.relation_rows;
    rep.relation_hnf = ai.relation_hnf;
    rep.epsilon0 = ai.epsilon0;
    rep.literal_index = ai.literal_index;
    rep.index = ai.index;
    rep.unit_quotient = ai.quotient;
    rep.verdict = rep.index == rep.order ? Verdict::Equal : Verdict::Unequal;

    if (rep.class_group_k3.rank() <= 1) {
        rep.component_candidates = subgroups_with_cyclic_quotient(rep.class_group_K3, fx.p, mpz_class(rep.class_group_k3.order()).get_si());
    }
    rep.structure_note = describe_structure(rep.unit_quotient, rep.component_candidates);
    if (ai.literal_index != rep.index)
        rep.warnings.push_back("index in Z^3 is " + ai.literal_index.get_str() + "; its " + std::to_string(fx.p) + "-part is used");

    // k-side: the native quadratic computation against the CAS values
    const int kd = std::min(digits, fx.digits);
    const Real cas_log = abs(Real::parse(fx.log_epsilon0, Precision{kd}));
    const Real native_log = quadratic::program_log_epsilon0(fx.f, kd);
    rep.k_side_consistent = quadratic::class_group(fx.f) == fx.class_group_k && close(cas_log, native_log, -(kd * 2) / 3);
    if (!rep.k_side_consistent) rep.warnings.push_back("quadratic subfield data disagrees with the CAS");

    if (!fx.relation_rows.empty() && fx.unit_logs.size() == 3) {
        auto cas = lattice::IntegerMatrix::from_rows(fx.relation_rows, 3);
        rep.cas_relations_agree = cas == ai.relation_rows;
        if (!rep.cas_relations_agree) rep.warnings.push_back("CAS relation rows differ from the native search");
        rep.epsilon0_agrees = fx.epsilon0_expression == ai.epsilon0;
        if (!rep.epsilon0_agrees) rep.warnings.push_back("CAS epsilon0 expression differs from the native search");
    }
    return rep;
}

inline CaseReport verify_ramc_case(long f, long q, casbridge::FetchMode mode, const casbridge::CasConfig& cfg = {}, int digits = 150) {
    auto fx = casbridge::fetch_field_data(f, q, digits, mode, cfg);
    return build_case_report(fx, digits);
}

inline std::string render_report(const CaseReport& r) {
    std::ostringstream o;
    o << "f=" << r.f << " q=" << r.q << " p=" << r.p << "\n";
    o << "  class group K  " << r.class_group_K << "  (" << r.p << "-part " << r.class_group_K3 << ")\n";
    o << "  class group k  " << r.class_group_k << "  (" << r.p << "-part " << r.class_group_k3 << ")\n";
    o << "  class group K0 " << r.class_group_K0 << "  (" << r.p << "-part " << r.class_group_K03 << ")\n";
    o << "  epsilon0 = [";
    for (std::size_t i = 0; i < r.epsilon0.size(); ++i) o << (i ? ", " : "") << r.epsilon0[i];
    o << "]\n";
    o << "  relation rows " << r.relation_rows.to_string() << "\n";
    o << "  relation HNF  " << r.relation_hnf.to_string() << "\n";
    o << "  " << r.structure_note << "\n";
    for (const auto& w : r.warnings) o << "  note: " << w << "\n";
    o << "index=" << r.index << " order=" << r.order << " " << to_string(r.verdict) << "\n";
    return o.str();
}

// ---------------------------------------------------------------------------
// Chevalley–Herbrand and capitulation bookkeeping.

inline mpz_class chevalley_order(const mpz_class& hK_order, long n, long r, const mpz_class& unit_norm_index, long p = 3) {
    if (hK_order <= 0 || unit_norm_index <= 0 || n < 0 || r < 1) throw std::invalid_argument("chevalley_order: inputs must be positive");
    mpz_class pw;
    mpz_ui_pow_ui(pw.get_mpz_t(), static_cast<unsigned long>(p), static_cast<unsigned long>(n * (r - 1)));
    mpz_class num = hK_order * pw;
    if (num % unit_norm_index != 0) throw DataInconsistency("Chevalley formula gives a non-integral order");
    return num / unit_norm_index;
}

struct CapitulationScenario {
    long f = 0, q = 0, p = 3;
    long ell = 0;
    long n = 1;  ///< [M0 : Q] = p^n
    long r = 1;  ///< primes of K ramified in L/K
    AbelianGroupStructure hK;                   ///< p-class group of K
    std::optional<AbelianGroupStructure> hL;    ///< p-class group of L, when known
    std::optional<mpz_class> hL_order;          ///< order only
    std::optional<mpz_class> hK1_order;         ///< first layer K1, [K1 : K] = p

    [[nodiscard]] std::optional<mpz_class> l_order() const {
        if (hL) return hL->order();
        return hL_order;
    }
};

enum class Injectivity { NotInjective, Inconclusive };

struct CapitulationDiagnosis {
    Injectivity injectivity = Injectivity::Inconclusive;
    std::optional<mpz_class> injectivity_bound;  ///< #H_L would be at least this if J were injective
    bool stable = false;
    mpz_class hL_order;
    mpz_class h_ar;                    ///< #H^ar_L relative to K: #H_L / #H_K
    std::vector<mpz_class> h_alg;      ///< possible values of #H^alg_L
    std::optional<mpz_class> nu_image_order;
    std::vector<std::string> notes;
};

inline mpz_class ppow(long p, long e) {
    mpz_class r;
    mpz_ui_pow_ui(r.get_mpz_t(), static_cast<unsigned long>(p), static_cast<unsigned long>(e));
    return r;
}

inline CapitulationDiagnosis diagnose_capitulation(const CapitulationScenario& s) {
    if (s.r < 1 || s.n < 1) throw std::invalid_argument("scenario needs r >= 1 and n >= 1");
    if ((s.ell - 1) % (2 * ppow(s.p, s.n)) != 0)
        throw std::invalid_argument("ell must be congruent to 1 mod 2p^n");
    const mpz_class hK = s.hK.order();
    const mpz_class pn = ppow(s.p, s.n);
    CapitulationDiagnosis d;

    // stability at the first layer forces #H_L = #H_K and H_L^G = H_L
    if (s.hK1_order && *s.hK1_order == hK) {
        d.stable = true;
        if (s.l_order() && *s.l_order() != hK)
            throw DataInconsistency("stability from K forces #H_L = #H_K");
        d.hL_order = hK;
        // on H_L^G = H_L the algebraic norm is the p^n-th power; H_L ≅ H_K through N
        mpz_class image = s.hK.order_of_powers(pn.get_si());
        d.nu_image_order = image;
        d.h_alg = {mpz_class(d.hL_order / image)};
        d.h_ar = d.hL_order / hK;
        d.notes.push_back("stability from K: #H_L = #H_K");
        if (image < hK && image > 1) d.notes.push_back("partial capitulation: nu(H_L) = H_L^" + pn.get_str() + " of order " + image.get_str());
        if (image == 1) d.notes.push_back("complete capitulation: nu(H_L) = 1");
        return d;
    }

    auto lo = s.l_order();
    if (!lo) throw std::invalid_argument("scenario lacks the order of H_L and any stability datum");
    d.hL_order = *lo;
    if (d.hL_order % hK != 0) throw DataInconsistency("#H_K must divide #H_L (norm surjectivity)");
    d.h_ar = d.hL_order / hK;

    // If J were injective: H_L^G ≅ H_K, N(H_L^G) = H_K^{p^n} and
    // #(H_L/H_L^G)^G = #H_K / #N(H_L^G), so #H_L >= #H_K^2 / #H_K^{p^n}.
    long vK = 0;
    for (mpz_class t = hK; t > 1 && t % s.p == 0; t /= s.p) ++vK;
    bool injective_possible = true;
    if (s.r == 1) {
        mpz_class norm_image = s.hK.order_of_powers(pn.get_si());
        mpz_class bound = hK * (hK / norm_image);
        d.injectivity_bound = bound;
        if (bound > d.hL_order) {
            d.injectivity = Injectivity::NotInjective;
            injective_possible = false;
            d.notes.push_back("injectivity would force #H_L >= " + bound.get_str() + " > " + d.hL_order.get_str());
        }
    }
    // #H^alg = #H_L / #J(H_K), with #J(H_K) = #H_K / p^j
    for (long j = injective_possible ? 0 : 1; j <= vK; ++j) d.h_alg.push_back(d.hL_order * ppow(s.p, j) / hK);
    return d;
}

/// L-side data known for the capitulation examples.
inline std::vector<CapitulationScenario> known_capitulation_scenarios() {
    CapitulationScenario a;
    a.f = 229; a.q = 37; a.ell = 109; a.n = 1; a.r = 1;
    a.hK = AbelianGroupStructure({3, 3, 3});
    a.hL = AbelianGroupStructure({9, 9, 3});
    CapitulationScenario b;
    b.f = 1129; b.q = 7; b.ell = 19; b.n = 2; b.r = 1;
    b.hK = AbelianGroupStructure({27});
    b.hK1_order = mpz_class(27);
    return {a, b};
}

inline std::optional<CapitulationScenario> find_scenario(long f, long q, long ell, std::optional<long> n = std::nullopt) {
    for (const auto& s : known_capitulation_scenarios())
        if (s.f == f && s.q == q && s.ell == ell && (!n || *n == s.n)) return s;
    return std::nullopt;
}

inline std::string render_diagnosis(const CapitulationScenario& s, const CapitulationDiagnosis& d) {
    std::ostringstream o;
    o << "f=" << s.f << " q=" << s.q << " ell=" << s.ell << " n=" << s.n << " r=" << s.r << "\n";
    o << "  #H_K=" << s.hK.order() << " " << s.hK << "  #H_L=" << d.hL_order;
    if (s.hL) o << " " << *s.hL;
    o << "\n";
    if (d.stable) o << "  stability: #H_L = #H_K\n";
    o << "  injectivity: " << (d.injectivity == Injectivity::NotInjective ? "NotInjective" : "Inconclusive");
    if (d.injectivity_bound) o << " (bound " << *d.injectivity_bound << ")";
    o << "\n";
    if (d.nu_image_order) o << "  #nu(H_L)=" << *d.nu_image_order << "\n";
    o << "  #H^ar=" << d.h_ar << "\n";
    o << "  #H^alg";
    if (d.h_alg.size() == 1) {
        o << "=" << d.h_alg.front();
    } else {
        o << " in {";
        for (std::size_t i = 0; i < d.h_alg.size(); ++i) o << (i ? "," : "") << d.h_alg[i];
        o << "}";
    }
    o << "\n";
    for (const auto& nt : d.notes) o << "  note: " << nt << "\n";
    return o.str();
}

// ---------------------------------------------------------------------------
// Orders attached to rational characters of a cyclic field.

/// Given P(m) for the subfield of degree m of a cyclic field, for every m in
/// a divisor-closed set, returns the A_d with prod_{d | m} A_d = P(m).
inline std::map<long, mpq_class> decompose_orders(const std::map<long, mpq_class>& subfield_products) {
    for (const auto& [m, v] : subfield_products) {
        if (m < 1) throw std::invalid_argument("subfield degrees must be positive");
        if (v <= 0) throw std::invalid_argument("products must be positive");
        for (long d : characters::divisors(m))
            if (!subfield_products.count(d)) throw std::invalid_argument("label set is not divisor-closed: missing " + std::to_string(d));
    }
    std::map<long, mpq_class> A;
    for (const auto& [m, v] : subfield_products) {
        mpq_class a = v;
        for (long d : characters::divisors(m))
            if (d != m) a /= A.at(d);
        a.canonicalize();
        A[m] = a;
    }
    return A;
}

inline std::map<long, mpq_class> forward_products(const std::map<long, mpq_class>& A) {
    std::map<long, mpq_class> P;
    for (const auto& [m, v] : A) {
        mpq_class prod = 1;
        for (long d : characters::divisors(m)) prod *= A.at(d);
        prod.canonicalize();
        P[m] = prod;
    }
    return P;
}

struct ProductFormulaBreakdown {
    bool holds = false;
    mpz_class hK3, index, hk3, hK03;
};

/// #H_K(p) = (E_K : E°_K F_K)_{phi0} · #H_k(p) · #H_K0(p), the index being
/// the analytic one so that the identity is not a tautology.
inline ProductFormulaBreakdown product_formula_check(const casbridge::FieldDataFixture& fx, int digits = 150) {
    ProductFormulaBreakdown b;
    b.hK3 = p_part(fx.class_group_K, fx.p).order();
    b.hk3 = p_part(fx.class_group_k, fx.p).order();
    b.hK03 = p_part(fx.class_group_K0, fx.p).order();
    b.index = analytic_index(fx, digits);
    b.holds = b.hK3 == b.index * b.hk3 * b.hK03;
    return b;
}

/// Product check from orders alone.
inline bool product_formula_holds(const mpz_class& hK3, const mpz_class& index, const mpz_class& hk3, const mpz_class& hK03) {
    return hK3 == index * hk3 * hK03;
}

}  // namespace ramc
