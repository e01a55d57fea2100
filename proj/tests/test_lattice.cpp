#include "ramc/lattice.hpp"

#include <gtest/gtest.h>

#include "oracles.hpp"

#include <numeric>
#include <random>

using namespace ramc;
using namespace ramc::lattice;
using namespace oracle;

namespace {

UnitLogVector logv(const std::string& label, const std::string& value) {
    return {label, Real::parse(value, Precision{150})};
}

}  // namespace

TEST(Hermite, Examples) {
    EXPECT_EQ(hnf_basis({{0, 3, 0}, {0, 0, -3}, {0, -3, 3}}), (IntegerMatrix{{0, 3, 0}, {0, 0, 3}}));
    EXPECT_EQ(hnf_basis(IntegerMatrix::identity(4)), IntegerMatrix::identity(4));
    EXPECT_EQ(hnf_basis({{2, 4}, {1, 2}}), (IntegerMatrix{{1, 2}}));
    const IntegerMatrix M{{0, 3, 0}, {0, 0, -3}, {0, -3, 3}};
    auto r = hermite_normal_form(M);
    EXPECT_EQ(r.rank, 2u);
    EXPECT_EQ(r.U * M, r.H);
}

TEST(Smith, Examples) {
    EXPECT_EQ(smith_normal_form({{2, 0}, {0, 3}}).divisors, (std::vector<mpz_class>{1, 6}));
    EXPECT_EQ(smith_normal_form({{0, 0, -9}, {9, 9, 9}, {0, -9, 0}}).divisors, (std::vector<mpz_class>{9, 9, 9}));
    EXPECT_EQ(cofactor_det({{0, 0, -9}, {9, 9, 9}, {0, -9, 0}}), 729);
    EXPECT_EQ(smith_normal_form(IntegerMatrix(3, 2)).divisors, (std::vector<mpz_class>{0, 0}));
}

TEST(Index, HandComputations) {
    EXPECT_EQ(sublattice_index({{1, 0, 0}, {0, 3, 0}, {0, 0, -3}, {0, -3, 3}}, 3).value, 9);
    EXPECT_EQ(sublattice_index({{1, -1, -1}, {-1, -1, 0}, {0, 1, -1}, {1, 0, 1}}, 3).value, 3);
    EXPECT_EQ(sublattice_index({{1, 0, 0}, {0, 0, -9}, {9, 9, 9}, {0, -9, 0}}, 3).value, 81);
    auto inf = sublattice_index({{1, 0, 0}, {0, 3, 0}, {0, 6, 0}}, 3);
    EXPECT_TRUE(inf.infinite);
    EXPECT_EQ(inf.to_string(), "Infinite");
    EXPECT_TRUE(sublattice_index({{1, 0}}, 2).infinite);
    EXPECT_THROW(sublattice_index({{1, 0}}, 3), std::invalid_argument);
}

TEST(Determinant, BareissMatchesCofactors) {
    std::mt19937_64 rng(3);
    for (int t = 0; t < 200; ++t) {
        std::size_t n = 1 + rng() % 6;
        auto M = random_matrix(rng, n, n);
        EXPECT_EQ(determinant(M), cofactor_det(M));
    }
}

// 10^3 random integer matrices up to 6 x 6, entries in [-50, 50].
TEST(NormalForms, RandomMatrixProperties) {
    std::mt19937_64 rng(20240601);
    for (int t = 0; t < 1000; ++t) {
        std::size_t r = 1 + rng() % 6, c = 1 + rng() % 6;
        auto M = random_matrix(rng, r, c);
        if (t % 7 == 0 && r > 1) M.add_row(r - 1, 0, 2), M.add_row(r - 1, r - 1, -1);  // rank drops sometimes
        auto h = hermite_normal_form(M);
        ASSERT_EQ(h.U * M, h.H);
        ASSERT_EQ(abs(cofactor_det(h.U)), 1);
        ASSERT_TRUE(is_hnf(h.H)) << M.to_string();
        ASSERT_EQ(hnf_basis(h.H), h.H.nonzero_rows());
        ASSERT_EQ(hnf_basis(random_unimodular(rng, r) * M), h.H.nonzero_rows());

        auto s = smith_normal_form(M);
        ASSERT_EQ(s.U * M * s.V, diag(s.divisors, r, c)) << M.to_string();
        ASSERT_EQ(abs(cofactor_det(s.U)), 1);
        ASSERT_EQ(abs(cofactor_det(s.V)), 1);
        for (std::size_t i = 0; i + 1 < s.divisors.size(); ++i) {
            ASSERT_GE(s.divisors[i], 0);
            if (s.divisors[i] == 0) ASSERT_EQ(s.divisors[i + 1], 0);
            else ASSERT_EQ(s.divisors[i + 1] % s.divisors[i], 0);
        }
        std::size_t nonzero = 0;
        mpz_class prod = 1;
        for (const auto& d : s.divisors)
            if (d != 0) ++nonzero, prod *= d;
        ASSERT_EQ(nonzero, h.rank);
        if (r >= c) ASSERT_EQ(prod * (nonzero == c ? 1 : 0), maximal_minor_gcd(M));
        if (r == c) ASSERT_EQ(nonzero == c ? prod : mpz_class(0), abs(cofactor_det(M)));
    }
}

TEST(Index, Multiplicativity) {
    std::mt19937_64 rng(99);
    for (int t = 0; t < 300; ++t) {
        std::size_t n = 1 + rng() % 5;
        auto C = random_matrix(rng, n, n, -6, 6);
        if (cofactor_det(C) == 0) continue;
        auto X = random_matrix(rng, n, n, -4, 4);
        if (cofactor_det(X) == 0) continue;
        auto Y = random_matrix(rng, n + 2, n, -3, 3);
        auto B = C;                      // B = C's row lattice
        auto A = X * B;                  // A inside B
        IntegerMatrix Bbig = Y * B;      // extra generators inside B
        for (std::size_t i = 0; i < n; ++i) Bbig.append_row(B.row(i));
        auto iA = sublattice_index(A), iB = sublattice_index(Bbig);
        ASSERT_FALSE(iA.infinite);
        // index(A, Z^n) = index(A, B) * index(B, Z^n), index(A, B) = |det X|
        ASSERT_EQ(iA.value, abs(cofactor_det(X)) * iB.value);
        ASSERT_EQ(iB.value, abs(cofactor_det(C)));
    }
}

TEST(Relations, ExactCombinationsRecovered) {
    std::vector<UnitLogVector> basis{logv("e1", "-5.42493061036868794936175902121226013979871788308115822912629413813043504879957"),
                                     logv("e2", "-7.62339432774801082817881607948889016839285515045032719290334063335012349965909"),
                                     logv("e3", "0.990666058282067829857406414240918152568858988454914012789399650079297405928088")};
    std::mt19937_64 rng(5);
    for (int t = 0; t < 50; ++t) {
        std::vector<mpz_class> a{long(rng() % 25) - 12, long(rng() % 25) - 12, long(rng() % 25) - 12};
        Real target(Precision{150});
        for (int i = 0; i < 3; ++i) target += basis[static_cast<std::size_t>(i)].coords[0] * Real(a[static_cast<std::size_t>(i)], Precision{150});
        auto res = find_integer_relations({UnitLogVector("t", target)}, basis);
        EXPECT_EQ(res.rows.row(0), a);
        EXPECT_LT(log10_abs(res.residuals[0]), -100);
    }
    auto zero = find_integer_relations({UnitLogVector("0", Real(Precision{150}))}, basis);
    EXPECT_EQ(zero.rows.row(0), (std::vector<mpz_class>{0, 0, 0}));
    EXPECT_THROW(find_integer_relations({logv("x", "1000.5")}, basis), NoRelationWithinBound);
    EXPECT_THROW(find_integer_relations({logv("x", "1")}, basis, {0, 1e-6}), std::invalid_argument);
}

TEST(Relations, BasisOrderDoesNotChangeLattice) {
    std::vector<UnitLogVector> basis{logv("e1", "4.76408208605199071552075362690562714628275217440"),
                                     logv("e2", "-3.5547174454510076865039512171147212986296589641"),
                                     logv("e3", "-12.843604675711520198074078649015345277469769192")};
    std::vector<UnitLogVector> targets;
    for (auto coeffs : std::vector<std::vector<long>>{{-1, 1, 0}, {1, 0, -1}, {3, 2, -5}}) {
        Real t(Precision{150});
        for (int i = 0; i < 3; ++i) t += basis[static_cast<std::size_t>(i)].coords[0] * coeffs[static_cast<std::size_t>(i)];
        targets.emplace_back("eta", t);
    }
    auto direct = find_integer_relations(targets, basis);
    std::vector<std::size_t> perm{2, 0, 1};
    std::vector<UnitLogVector> permuted{basis[2], basis[0], basis[1]};
    auto other = find_integer_relations(targets, permuted);
    IntegerMatrix back(other.rows.rows(), 3);
    for (std::size_t i = 0; i < back.rows(); ++i)
        for (std::size_t j = 0; j < 3; ++j) back(i, perm[j]) = other.rows(i, j);
    EXPECT_EQ(hnf_basis(back), direct.hnf);
}

TEST(Reduction, GreedyBasisAndDependencies) {
    // five logs with l4 = -l2 and l5 = l2 + l3
    std::vector<UnitLogVector> logs{logv("1", "-5.42493061036868794936175902121226013979871788308"),
                                    logv("2", "-24.6398239686037859174166378845872776359323737634"),
                                    logv("3", "36.4779589543939221964642087122685794684918165165"),
                                    logv("4", "24.6398239686037859174166378845872776359323737634"),
                                    logv("5", "11.8381349857901362790475708276813018325594427531")};
    auto red = reduce_to_basis(logs);
    EXPECT_EQ(red.basis, (std::vector<std::size_t>{0, 1, 2}));
    ASSERT_EQ(red.dependencies.size(), 2u);
    EXPECT_EQ(red.dependencies[0].index, 3u);
    EXPECT_EQ(red.dependencies[0].coeffs, (std::vector<mpz_class>{0, -1, 0}));
    EXPECT_EQ(red.dependencies[1].coeffs, (std::vector<mpz_class>{0, 1, 1}));

    std::vector<UnitLogVector> three(logs.begin(), logs.begin() + 3);
    auto id = reduce_to_basis(three);
    EXPECT_EQ(id.basis, (std::vector<std::size_t>{0, 1, 2}));
    EXPECT_TRUE(id.dependencies.empty());

    std::vector<UnitLogVector> deficient{logs[0], logs[1], logs[3]};
    EXPECT_THROW(reduce_to_basis(deficient), InsufficientRank);
    EXPECT_THROW(reduce_to_basis({logs[0], logs[1]}), InsufficientRank);
}
