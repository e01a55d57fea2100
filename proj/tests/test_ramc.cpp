#include <gtest/gtest.h>

#include <filesystem>
#include <random>

#include "golden_data.hpp"
#include "ramc/ramc.hpp"

using namespace ramc;
using casbridge::FetchMode;

namespace {

casbridge::FieldDataFixture fixture(long f, long q) { return casbridge::fetch_field_data(f, q, 150, FetchMode::FixtureOnly); }

AbelianGroupStructure G(std::vector<long> v) { return AbelianGroupStructure(std::move(v)); }

// Kernels of all surjections H -> Z/p^m, by brute force over elements.
std::set<std::vector<long>> kernel_types(const std::vector<long>& orders, long p, long pm) {
    std::set<std::vector<long>> out;
    const std::size_t r = orders.size();
    std::vector<long> c(r, 0);
    auto total = [&] {
        long n = 1;
        for (long o : orders) n *= o;
        return n;
    }();
    while (true) {
        bool hom = true, onto = false;
        for (std::size_t i = 0; i < r; ++i) {
            if ((orders[i] * c[i]) % pm) hom = false;
            if (c[i] % p) onto = true;
        }
        if (hom && onto) {
            // torsion counts of the kernel
            std::vector<long> x(r, 0), counts;
            for (long pk = p; pk <= total; pk *= p) {
                long cnt = 0;
                std::fill(x.begin(), x.end(), 0);
                for (long t = 0; t < total; ++t) {
                    long img = 0;
                    bool tors = true;
                    for (std::size_t i = 0; i < r; ++i) {
                        img += x[i] * c[i];
                        if ((x[i] * pk) % orders[i]) tors = false;
                    }
                    if (img % pm == 0 && tors) ++cnt;
                    for (std::size_t i = 0; i < r; ++i) {
                        if (++x[i] < orders[i]) break;
                        x[i] = 0;
                    }
                }
                counts.push_back(cnt);
            }
            out.insert(G(quadratic::primary_from_torsion(p, counts)).factors());
        }
        std::size_t i = 0;
        while (i < r && ++c[i] == pm) c[i++] = 0;
        if (i == r) break;
    }
    return out;
}

}  // namespace

TEST(ArithmeticComponent, Examples) {
    EXPECT_EQ(arithmetic_component_order(G({3, 3, 3}), G({3})), 9);
    EXPECT_EQ(arithmetic_component_order(G({27}), G({9})), 3);
    EXPECT_EQ(arithmetic_component_order(G({9, 9, 9}), G({9})), 81);
    EXPECT_THROW(arithmetic_component_order(G({3}), G({9})), DataInconsistency);
}

TEST(ComponentStructure, HorizontalStripsMatchBruteForce) {
    for (auto [orders, pm] : std::vector<std::pair<std::vector<long>, long>>{
             {{9, 3}, 3}, {{9, 9}, 3}, {{9, 3, 3}, 3}, {{27, 3}, 9}, {{27, 9, 3}, 9}, {{9, 9, 9}, 9}, {{27}, 9}, {{3, 3, 3}, 3}}) {
        std::set<std::vector<long>> fast;
        for (const auto& g : subgroups_with_cyclic_quotient(G(orders), 3, pm)) fast.insert(g.factors());
        EXPECT_EQ(fast, kernel_types(orders, 3, pm)) << G(orders) << " / " << pm;
    }
}

TEST(AnalyticIndex, Examples) {
    EXPECT_EQ(analytic_index(fixture(229, 5743)), 27);
    EXPECT_EQ(analytic_index(fixture(1129, 73)), 9);
    EXPECT_EQ(analytic_index(fixture(229, 6379)), 27);
    auto d = analytic_index_details(fixture(1129, 73));
    EXPECT_EQ(d.literal_index, 63);
}

TEST(VerifyCase, AllShippedCasesAreEqual) {
    for (const auto& c : golden::cases()) {
        auto rep = verify_ramc_case(c.f, c.q, FetchMode::FixtureOnly);
        EXPECT_EQ(rep.verdict, Verdict::Equal) << rep.record();
        EXPECT_EQ(rep.index, c.index) << rep.record();
        EXPECT_EQ(rep.order, c.index) << rep.record();
        EXPECT_EQ(rep.class_group_K, G(c.class_group_K));
        EXPECT_TRUE(rep.k_side_consistent);
        EXPECT_TRUE(rep.cas_relations_agree);
        EXPECT_TRUE(rep.epsilon0_agrees);
        std::set<std::vector<long>> cands;
        for (const auto& g : rep.component_candidates) cands.insert(g.factors());
        for (const auto& printed : c.component_structures) EXPECT_TRUE(cands.count(G(printed).factors())) << rep.record() << " " << G(printed);
        EXPECT_EQ(rep.record(), "case: " + std::to_string(c.f) + " " + std::to_string(c.q) + " " + std::to_string(c.index) + " " +
                                    std::to_string(c.index) + " EQUAL");
    }
}

TEST(VerifyCase, StructureNotes) {
    auto r = verify_ramc_case(229, 37, FetchMode::FixtureOnly);
    EXPECT_EQ(r.structure_note, "unit quotient [3,3] of order 9; component [3,3]");
    auto v = verify_ramc_case(1129, 7, FetchMode::FixtureOnly);
    EXPECT_EQ(v.structure_note, "unit quotient [3] of order 3; component [3]");
    EXPECT_EQ(describe_structure(G({9}), {G({3, 3})}), "unit quotient [9] of order 9; component [3,3]; quotient cyclic but component not");
}

TEST(VerifyCase, MissingFixture) {
    EXPECT_THROW(verify_ramc_case(229, 43, FetchMode::FixtureOnly), casbridge::FixtureMissing);
}

TEST(VerifyCase, VerdictStableUnderPrecisionEscalation) {
    const std::filesystem::path dir = std::filesystem::path(RAMC_DEFAULT_FIXTURE_DIR) / "digits300";
    int seen = 0;
    for (const auto& e : std::filesystem::directory_iterator(dir)) {
        auto hi = casbridge::load_fixture_file(e.path());
        auto lo = fixture(hi.f, hi.q);
        auto rhi = build_case_report(hi, 300);
        auto rlo = build_case_report(lo, 150);
        EXPECT_EQ(rhi.record(), rlo.record());
        EXPECT_EQ(rhi.relation_rows, rlo.relation_rows);
        EXPECT_EQ(rhi.epsilon0, rlo.epsilon0);
        ++seen;
    }
    EXPECT_GE(seen, 6);
}

TEST(RelationLattice, PrintedBasisMapsToOursByUnimodularChange) {
    for (const auto& c : golden::cases()) {
        auto rep = verify_ramc_case(c.f, c.q, FetchMode::FixtureOnly);
        auto printed = lattice::IntegerMatrix::from_rows(c.relation_rows);
        auto change = find_unit_basis_change(c.epsilon0, printed, rep.epsilon0, rep.relation_rows);
        ASSERT_TRUE(change.has_value()) << c.f << " " << c.q;
        EXPECT_EQ(lattice::hnf_basis(printed * change->T), rep.relation_hnf);
        auto det = lattice::determinant(change->T);
        EXPECT_TRUE(det == 1 || det == -1);
    }
    // literal agreement where the printed basis is the one PARI returns here
    for (std::size_t i : {0u, 6u}) {
        const auto& c = golden::cases()[i];
        auto rep = verify_ramc_case(c.f, c.q, FetchMode::FixtureOnly);
        EXPECT_EQ(lattice::hnf_basis(lattice::IntegerMatrix::from_rows(c.relation_rows)), rep.relation_hnf);
    }
}

TEST(RelationLattice, BasisChangeRejectsDifferentLattices) {
    lattice::IntegerMatrix a{{0, 3, 0}, {0, 0, -3}, {0, -3, 3}};
    lattice::IntegerMatrix b{{0, 9, 0}, {0, 0, -3}, {0, -3, 3}};
    EXPECT_FALSE(find_unit_basis_change({1, 0, 0}, a, {1, 0, 0}, b).has_value());
    EXPECT_TRUE(find_unit_basis_change({1, 0, 0}, a, {1, 0, 0}, a).has_value());
}

TEST(HandIndex, PrintedGeneratorChains) {
    for (const auto& c : golden::cases()) {
        for (const auto& gens : c.index_chain) {
            auto idx = lattice::sublattice_index(gens, 3);
            ASSERT_FALSE(idx.infinite);
            mpz_class v = idx.value, pp = 1;
            while (v % 3 == 0) { v /= 3; pp *= 3; }
            EXPECT_EQ(pp, c.index) << c.f << " " << c.q;
        }
    }
    EXPECT_EQ(lattice::sublattice_index(golden::cases()[5].index_chain[0], 3).value, 63);
}

TEST(Chevalley, Examples) {
    EXPECT_EQ(chevalley_order(27, 5, 1, 1), 27);
    EXPECT_EQ(chevalley_order(27, 1, 2, 3), 27);
    EXPECT_EQ(chevalley_order(1, 2, 3, 1), 81);
    EXPECT_THROW(chevalley_order(27, 1, 2, 2), DataInconsistency);
    EXPECT_THROW(chevalley_order(0, 1, 1, 1), std::invalid_argument);
}

TEST(Chevalley, UnramifiedOnceIsIdentity) {
    std::mt19937_64 rng(7);
    std::uniform_int_distribution<long> h(1, 1'000'000), n(0, 40);
    for (int t = 0; t < 1000; ++t) {
        mpz_class hk = h(rng);
        EXPECT_EQ(chevalley_order(hk, n(rng), 1, 1), hk);
    }
}

TEST(Capitulation, FirstExample) {
    auto s = *find_scenario(229, 37, 109);
    auto d = diagnose_capitulation(s);
    EXPECT_EQ(d.injectivity, Injectivity::NotInjective);
    EXPECT_EQ(*d.injectivity_bound, 729);
    EXPECT_EQ(d.hL_order, 243);
    EXPECT_EQ(d.h_ar, 9);
    EXPECT_EQ(d.h_alg, (std::vector<mpz_class>{27, 81, 243}));
}

TEST(Capitulation, StableExample) {
    auto s = *find_scenario(1129, 7, 19);
    auto d = diagnose_capitulation(s);
    EXPECT_TRUE(d.stable);
    EXPECT_EQ(d.hL_order, 27);
    EXPECT_EQ(*d.nu_image_order, 3);
    EXPECT_EQ(d.h_alg, (std::vector<mpz_class>{9}));
    EXPECT_EQ(d.h_ar, 1);
}

TEST(Capitulation, BoundDecidesOnlyWhenExceeded) {
    CapitulationScenario s;
    s.f = 229; s.q = 37; s.ell = 7; s.n = 1; s.r = 1;
    s.hK = G({9});
    s.hL_order = mpz_class(9);  // bound 9 * 3 = 27
    EXPECT_EQ(diagnose_capitulation(s).injectivity, Injectivity::NotInjective);
    s.hL_order = mpz_class(27);
    EXPECT_EQ(diagnose_capitulation(s).injectivity, Injectivity::Inconclusive);
    s.hK = AbelianGroupStructure{};
    s.hL_order = mpz_class(1);
    EXPECT_EQ(diagnose_capitulation(s).injectivity, Injectivity::Inconclusive);
}

TEST(Capitulation, Errors) {
    auto s = *find_scenario(229, 37, 109);
    s.ell = 7;
    s.n = 2;
    EXPECT_THROW(diagnose_capitulation(s), std::invalid_argument);
    auto t = *find_scenario(229, 37, 109);
    t.hL = G({9});  // not a multiple of #H_K = 27
    EXPECT_THROW(diagnose_capitulation(t), DataInconsistency);
}

TEST(Capitulation, NoFalsePositives) {
    std::mt19937_64 rng(11);
    std::uniform_int_distribution<int> e(0, 3), nn(1, 3), sz(1, 3);
    for (int t = 0; t < 2000; ++t) {
        std::vector<long> f;
        for (int i = 0, k = sz(rng); i < k; ++i) f.push_back(characters::ipow(3, e(rng)));
        CapitulationScenario s;
        s.n = nn(rng);
        s.ell = 2 * characters::ipow(3, static_cast<int>(s.n)) + 1;
        s.hK = G(f);
        mpz_class bound = s.hK.order() * (s.hK.order() / s.hK.order_of_powers(characters::ipow(3, static_cast<int>(s.n))));
        s.hL_order = bound * characters::ipow(3, e(rng));
        auto d = diagnose_capitulation(s);
        EXPECT_EQ(d.injectivity, Injectivity::Inconclusive);
        for (const auto& h : d.h_alg) EXPECT_EQ(h * s.hK.order() % *s.hL_order, 0);
    }
}

TEST(DecomposeOrders, Examples) {
    std::map<long, mpq_class> P{{1, 1}, {2, 3}, {3, 1}, {6, 27}};
    auto A = decompose_orders(P);
    EXPECT_EQ(A.at(1), 1);
    EXPECT_EQ(A.at(2), 3);
    EXPECT_EQ(A.at(3), 1);
    EXPECT_EQ(A.at(6), 9);
    auto ones = decompose_orders({{1, 1}, {2, 1}, {3, 1}, {6, 1}});
    for (auto& [k, v] : ones) EXPECT_EQ(v, 1);
    EXPECT_THROW(decompose_orders({{1, 1}, {6, 1}}), std::invalid_argument);
}

TEST(DecomposeOrders, RoundTrip) {
    std::mt19937_64 rng(5);
    std::uniform_int_distribution<long> num(1, 500), den(1, 50), deg(1, 60);
    for (int t = 0; t < 10000; ++t) {
        long N = deg(rng);
        std::map<long, mpq_class> A;
        for (long d : characters::divisors(N)) {
            mpq_class v(num(rng), den(rng));
            v.canonicalize();
            A[d] = v;
        }
        ASSERT_EQ(decompose_orders(forward_products(A)), A);
    }
}

TEST(ProductFormula, Examples) {
    auto b = product_formula_check(fixture(229, 37));
    EXPECT_TRUE(b.holds);
    EXPECT_EQ(b.hK3, 27);
    EXPECT_EQ(b.index, 9);
    auto v = product_formula_check(fixture(1129, 19867));
    EXPECT_TRUE(v.holds);
    EXPECT_EQ(v.hK3, 729);
    EXPECT_TRUE(product_formula_holds(1, 1, 1, 1));
    for (const auto& c : golden::cases()) EXPECT_TRUE(product_formula_check(fixture(c.f, c.q)).holds) << c.q;
}

// The five relative units of (229, 1723) satisfy eps4 = eps2^-1 and
// eps5 = eps2 eps3 here, while the printed basis is built from units with
// eps3' = eps2' and eps5' = eps2'/eps4'. Matching the two dependency patterns
// gives eps3' -> eps3^-1, which carries the printed matrix onto ours.
TEST(RelationLattice, CaseTwoBasisFromUnitDependencies) {
    auto fx = fixture(229, 1723);
    ASSERT_EQ(fx.unit_logs.size(), 5u);
    Precision prec{150};
    std::vector<Real> L;
    for (const auto& s : fx.unit_logs) L.push_back(Real::parse(s, prec));
    EXPECT_LT(log10_abs(L[3] + L[1]), -100);
    EXPECT_LT(log10_abs(L[4] - L[1] - L[2]), -100);
    auto rep = build_case_report(fx);
    const auto& c = golden::cases()[1];
    lattice::IntegerMatrix T{{1, 0, 0}, {0, 1, 0}, {0, 0, -1}};
    EXPECT_EQ(lattice::hnf_basis(lattice::IntegerMatrix::from_rows(c.relation_rows) * T), rep.relation_hnf);
    EXPECT_NE(lattice::hnf_basis(lattice::IntegerMatrix::from_rows(c.relation_rows)), rep.relation_hnf);
}
