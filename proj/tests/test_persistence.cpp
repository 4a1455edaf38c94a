#include <random>

#include <gtest/gtest.h>

#include "support.hpp"

using namespace gfb;
using namespace gfb::testing;

TEST(Reduce, ZeroMatrixLeavesEverythingUnpaired) {
    SparseZ2 D(3);
    std::vector<index_t> empty;
    for (int j = 0; j < 3; ++j) D.push_col(empty);
    auto red = reduce_matrix(D, {.record_ops = true});
    EXPECT_TRUE(red.reduced.is_zero());
    EXPECT_TRUE(red.pairs.empty());
    EXPECT_EQ(red.unpaired, (std::vector<index_t>{0, 1, 2}));
    ASSERT_TRUE(red.has_ops);
    for (index_t j = 0; j < 3; ++j) {
        auto c = red.ops.col(j);
        ASSERT_EQ(c.size(), 1u);
        EXPECT_EQ(c[0], j);
    }
}

TEST(Reduce, FilteredCircleByHand) {
    auto F = filtered_circle();
    auto red = reduce(F);
    std::map<index_t, index_t> want{{2, 1}};
    EXPECT_EQ(red.pairing(), want);
    EXPECT_EQ(red.unpaired, (std::vector<index_t>{0, 3}));
    EXPECT_EQ(extract_barcode(red, F), circle_barcode());
}

TEST(Reduce, EqualValuePairEmitsNoBar) {
    auto F = FilteredBoundaryMatrix::from_cells({0, 0, 1}, {0, 1, 1}, {{}, {}, {0, 1}});
    auto B = extract_barcode(reduce(F), F);
    ASSERT_EQ(B.bars.size(), 1u);
    EXPECT_EQ(B.bars[0], (Bar{0, 0, inf, 1}));
}

TEST(Reduce, RecordedOpsSatisfyReducedEqualsDTimesOps) {
    std::mt19937 rng(7);
    for (int rep = 0; rep < 30; ++rep) {
        auto F = random_complex(rng);
        auto red = reduce(F, {.record_ops = true});
        ASSERT_TRUE(red.has_reduced && red.has_ops);
        EXPECT_EQ(F.matrix * red.ops, red.reduced);
        // distinct pivots
        std::set<index_t> piv;
        for (index_t j = 0; j < red.reduced.cols(); ++j)
            if (!red.reduced.col_empty(j)) EXPECT_TRUE(piv.insert(red.reduced.pivot(j)).second);
    }
}

TEST(Reduce, TwistMatchesStandard) {
    std::mt19937 rng(11);
    for (int rep = 0; rep < 100; ++rep) {
        auto F = random_complex(rng);
        auto a = reduce(F);
        auto b = reduce(F, {.twist = true});
        EXPECT_EQ(a.pairs, b.pairs);
        EXPECT_EQ(a.unpaired, b.unpaired);
    }
}

TEST(Reduce, TwistRejectsRecordedOps) {
    auto F = filtered_circle();
    EXPECT_THROW(reduce(F, {.twist = true, .record_ops = true}), InternalError);
}

TEST(Barcode, AgreesWithSublevelRanksOnRandomComplexes) {
    std::mt19937 rng(3);
    for (int rep = 0; rep < 100; ++rep) {
        auto F = random_complex(rng);
        auto B = extract_barcode(reduce(F), F);
        EXPECT_TRUE(barcode_matches_betti(F, B)) << "complex " << rep;
    }
}

TEST(Barcode, PairingSurvivesColumnPremixing) {
    std::mt19937 rng(5);
    for (int rep = 0; rep < 100; ++rep) {
        auto F = random_complex(rng);
        auto G = premix(F, rng);
        EXPECT_EQ(reduce(F).pairs, reduce(G).pairs);
    }
}

TEST(Barcode, NormalizeMergesEqualBars) {
    Barcode b;
    b.bars = {{1, 0, 1, 1}, {0, 2, inf, 1}, {1, 0, 1, 2}};
    b.normalize();
    ASSERT_EQ(b.bars.size(), 2u);
    EXPECT_EQ(b.bars[1].multiplicity, 3);
    EXPECT_EQ(b.count(false), 3);
    EXPECT_EQ(b.count_in_degree(0, true), 1);
}

TEST(Bottleneck, HandExamples) {
    Barcode a, b, e;
    a.bars = {{0, 0, 2, 1}};
    b.bars = {{0, 1, 2, 1}};
    EXPECT_DOUBLE_EQ(bottleneck(a, b), 1.0);
    Barcode c;
    c.bars = {{0, 0, inf, 1}};
    EXPECT_EQ(bottleneck(c, e), inf);
    EXPECT_EQ(bottleneck(a, a), 0.0);
    EXPECT_DOUBLE_EQ(bottleneck(a, e), 1.0);
}

TEST(Bottleneck, DegreesAreMatchedSeparately) {
    Barcode a, b;
    a.bars = {{0, 0, 4, 1}};
    b.bars = {{1, 0, 4, 1}};
    EXPECT_DOUBLE_EQ(bottleneck(a, b), 2.0);
}

TEST(Bottleneck, InfiniteBarsMatchedBySortedBirth) {
    Barcode a, b;
    a.bars = {{2, 0, inf, 1}, {2, 5, inf, 1}};
    b.bars = {{2, 4.5, inf, 1}, {2, 0.25, inf, 1}};
    b.normalize();
    EXPECT_DOUBLE_EQ(bottleneck(a, b), 0.5);
}

TEST(Bottleneck, MultiplicitySplittingIsInvisible) {
    Barcode a, b, c;
    a.bars = {{1, 0, 3, 2}};
    b.bars = {{1, 0, 3, 1}, {1, 0, 3, 1}};
    c.bars = {{1, 0.5, 3, 1}, {1, 0, 2.5, 1}};
    EXPECT_EQ(bottleneck(a, b), 0.0);
    EXPECT_DOUBLE_EQ(bottleneck(a, c), bottleneck(b, c));
}

TEST(Bottleneck, SymmetricAndTriangle) {
    std::mt19937 rng(13);
    for (int rep = 0; rep < 60; ++rep) {
        auto a = random_barcode(rng, 6), b = random_barcode(rng, 6), c = random_barcode(rng, 6);
        double ab = bottleneck(a, b), ba = bottleneck(b, a);
        EXPECT_EQ(ab, ba);
        EXPECT_LE(bottleneck(a, c), ab + bottleneck(b, c) + 1e-9);
    }
}

TEST(Bottleneck, MatchesBruteForceOnSmallBarcodes) {
    // exhaustive partial matchings of up to 3 + 3 bars in one degree
    std::mt19937 rng(17);
    for (int rep = 0; rep < 200; ++rep) {
        auto a = random_barcode(rng, 3, 1), b = random_barcode(rng, 3, 1);
        std::vector<Bar> A, B;
        for (auto& x : a.bars)
            for (long r = 0; r < x.multiplicity; ++r) A.push_back(x);
        for (auto& x : b.bars)
            for (long r = 0; r < x.multiplicity; ++r) B.push_back(x);
        // pad B with diagonal slots so every A bar may be deleted
        size_t na = A.size(), nb = B.size();
        std::vector<int> perm(na + nb);
        std::iota(perm.begin(), perm.end(), 0);
        double best = inf;
        do {
            double cost = 0;
            std::vector<char> usedB(nb, 0);
            for (size_t i = 0; i < na; ++i) {
                int j = perm[i];
                if (j < static_cast<int>(nb)) {
                    cost = std::max(cost, std::max(std::abs(A[i].birth - B[j].birth), std::abs(A[i].death - B[j].death)));
                    usedB[j] = 1;
                } else
                    cost = std::max(cost, A[i].length() / 2);
            }
            for (size_t j = 0; j < nb; ++j)
                if (!usedB[j]) cost = std::max(cost, B[j].length() / 2);
            best = std::min(best, cost);
        } while (std::next_permutation(perm.begin(), perm.end()));
        EXPECT_DOUBLE_EQ(bottleneck(a, b), best);
    }
}

TEST(ErrorBudget, ExactSamplerGivesTheLatticeTerm) {
    GfqiSpec g;
    g.n = 1;
    g.N = 2;
    g.T = 1e-3;
    g.R = 1;
    double l = gradient_bound(g);
    EXPECT_DOUBLE_EQ(error_budget(g, 8, {}), l * 2 * std::sqrt(4.0) / 8);
    EXPECT_DOUBLE_EQ(error_budget(g, 16, {0, 0}), error_budget(g, 8, {0, 0}) / 2);
}
