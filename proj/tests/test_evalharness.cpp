#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <optional>
#include <random>
#include <vector>

#include "qfs/evalharness.hpp"
#include "support/test_oracles.hpp"

namespace {

qfs::FeatureTable make_table(std::vector<std::vector<double>> features,
                             std::vector<double> target) {
    std::vector<qfs::ColumnSpec> specs;
    std::vector<std::vector<double>> cols;
    for (std::size_t i = 0; i < features.size(); ++i) {
        specs.push_back({"f" + std::to_string(i), qfs::ColumnKind::numerical,
                         qfs::ColumnRole::feature});
        cols.push_back(std::move(features[i]));
    }
    specs.push_back({"y", qfs::ColumnKind::categorical, qfs::ColumnRole::target});
    cols.push_back(std::move(target));
    return qfs::FeatureTable(std::move(specs), std::move(cols));
}

double logit(double p) { return std::log(p / (1.0 - p)); }

// Class-conditional Gaussians N(+mu, I) vs N(-mu, I) in two dimensions.
qfs::FeatureTable gaussian_pair_table(std::size_t n_per_class, std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> noise(0.0, 1.0);
    std::vector<double> x0, x1, y;
    for (std::size_t r = 0; r < 2 * n_per_class; ++r) {
        const double label = r < n_per_class ? 1.0 : 0.0;
        const double sign = label > 0.5 ? 1.0 : -1.0;
        x0.push_back(sign * 0.5 + noise(rng));
        x1.push_back(sign * 0.5 + noise(rng));
        y.push_back(label);
    }
    return make_table({std::move(x0), std::move(x1)}, std::move(y));
}

TEST(MiRanking, TopKWithTiesTowardLowerIndex) {
    EXPECT_EQ(qfs::mi_ranking_topk({0.1, 0.9, 0.5}, 2), (std::vector<std::size_t>{1, 2}));
    EXPECT_EQ(qfs::mi_ranking_topk({0.1, 0.9, 0.5}, 3), (std::vector<std::size_t>{1, 2, 0}));
    EXPECT_EQ(qfs::mi_ranking_topk({0.4, 0.4, 0.4}, 2), (std::vector<std::size_t>{0, 1}));
    EXPECT_THROW(qfs::mi_ranking_topk({0.1, 0.2}, 0), qfs::ValidationError);
    EXPECT_THROW(qfs::mi_ranking_topk({0.1, 0.2}, 3), qfs::ValidationError);
}

TEST(TrainClassifier, SeparableFeatureReachesPerfectTrainingAccuracy) {
    const auto table = make_table({{-2.0, -1.5, -1.0, 1.0, 1.5, 2.0}},
                                  {0.0, 0.0, 0.0, 1.0, 1.0, 1.0});
    const auto weights = qfs::train_classifier(table, {0});
    const auto scores = qfs::classifier_scores(table, weights, {0});
    for (std::size_t r = 0; r < scores.size(); ++r)
        EXPECT_EQ(scores[r] >= 0.5, table.target()[r] > 0.5);
}

TEST(TrainClassifier, StrongerRegularizationShrinksTheWeights) {
    std::mt19937_64 rng(17);
    std::normal_distribution<double> noise(0.0, 1.0);
    std::vector<double> x, y;
    for (int r = 0; r < 200; ++r) {
        x.push_back(noise(rng));
        y.push_back(r % 2 == 0 ? 1.0 : 0.0);
    }
    // a mild signal so the unregularized weight is clearly nonzero
    for (int r = 0; r < 200; ++r) x[static_cast<std::size_t>(r)] += 0.6 * (y[static_cast<std::size_t>(r)] - 0.5);
    const auto table = make_table({x}, y);

    double previous = std::numeric_limits<double>::infinity();
    for (double l2 : {1e-3, 1e-1, 1.0, 10.0}) {
        qfs::ClassifierOptions options;
        options.l2 = l2;
        const auto weights = qfs::train_classifier(table, {0}, options);
        const double magnitude = std::abs(weights[1]);
        EXPECT_LT(magnitude, previous);
        previous = magnitude;
    }
}

TEST(TrainClassifier, GaussianPairRecoversTheClosedFormAuc) {
    const auto train = gaussian_pair_table(2000, 5);
    const auto test = gaussian_pair_table(2000, 6);
    const auto weights = qfs::train_classifier(train, {0, 1});
    const auto record = qfs::evaluate(test, weights, {0, 1});
    ASSERT_TRUE(record.auc.has_value());
    // optimal separation of N(+mu, I) vs N(-mu, I) with |mu| = 1/sqrt(2):
    // AUC = Phi(sqrt(2) |mu|) = Phi(1)
    const double phi1 = 0.5 * std::erfc(-1.0 / std::sqrt(2.0));
    EXPECT_NEAR(*record.auc, phi1, 0.02);

    EXPECT_THROW(qfs::train_classifier(train, {}), qfs::ValidationError);
}

TEST(Evaluate, PerfectAndDegenerateRankings) {
    const auto perfect = qfs::auc_from_scores({0.1, 0.2, 0.8, 0.9}, {0.0, 0.0, 1.0, 1.0});
    ASSERT_TRUE(perfect.has_value());
    EXPECT_EQ(*perfect, 1.0);

    const auto coin = qfs::auc_from_scores({0.4, 0.4, 0.4, 0.4}, {0.0, 1.0, 0.0, 1.0});
    ASSERT_TRUE(coin.has_value());
    EXPECT_EQ(*coin, 0.5);

    EXPECT_FALSE(qfs::auc_from_scores({0.3, 0.7}, {1.0, 1.0}).has_value());
}

TEST(Evaluate, ThresholdMetricsOnAHandWorkedExample) {
    // feature values chosen so the sigmoid emits scores 0.9, 0.8, 0.3
    const auto table =
        make_table({{logit(0.9), logit(0.8), logit(0.3)}}, {1.0, 0.0, 1.0});
    const auto record = qfs::evaluate(table, {0.0, 1.0}, {0});
    ASSERT_TRUE(record.auc.has_value());
    EXPECT_NEAR(*record.auc, 0.5, 1e-12);
    EXPECT_NEAR(record.precision, 0.5, 1e-12);
    EXPECT_NEAR(record.recall, 0.5, 1e-12);
}

TEST(Evaluate, NoPredictedPositivesGivesZeroPrecision) {
    const auto table = make_table({{logit(0.2), logit(0.1)}}, {1.0, 0.0});
    const auto record = qfs::evaluate(table, {0.0, 1.0}, {0});
    EXPECT_EQ(record.precision, 0.0);
    EXPECT_EQ(record.recall, 0.0);
}

TEST(Evaluate, SingleClassTestSplitLeavesAucAbsent) {
    const auto table = make_table({{0.2, 0.9}}, {1.0, 1.0});
    const auto record = qfs::evaluate(table, {0.0, 1.0}, {0});
    EXPECT_FALSE(record.auc.has_value());
    EXPECT_EQ(record.recall, 1.0);
}

TEST(Auc, MatchesThePairwiseCountingOracleUnderTies) {
    std::mt19937_64 rng(271);
    std::uniform_int_distribution<int> level(0, 4);
    std::uniform_int_distribution<int> coin(0, 1);
    for (int trial = 0; trial < 50; ++trial) {
        std::vector<double> scores;
        std::vector<double> labels;
        std::vector<int> labels_int;
        const int n = 5 + static_cast<int>(rng() % 40);
        for (int r = 0; r < n; ++r) {
            scores.push_back(0.2 * level(rng));
            const int y = coin(rng);
            labels.push_back(y);
            labels_int.push_back(y);
        }
        labels[0] = 0.0;
        labels_int[0] = 0;
        labels[1] = 1.0;
        labels_int[1] = 1;
        const auto fast = qfs::auc_from_scores(scores, labels);
        ASSERT_TRUE(fast.has_value());
        EXPECT_NEAR(*fast, oracle::pairwise_auc(scores, labels_int), 1e-12);
    }
}

TEST(Auc, InvariantUnderStrictlyMonotoneTransforms) {
    std::mt19937_64 rng(99);
    std::uniform_real_distribution<double> unit(0.01, 0.99);
    std::vector<double> scores, labels;
    for (int r = 0; r < 60; ++r) {
        scores.push_back(unit(rng));
        labels.push_back(r % 3 == 0 ? 1.0 : 0.0);
    }
    std::vector<double> cubed;
    for (double s : scores) cubed.push_back(s * s * s + 2.0 * s);
    const auto base = qfs::auc_from_scores(scores, labels);
    const auto transformed = qfs::auc_from_scores(cubed, labels);
    ASSERT_TRUE(base.has_value() && transformed.has_value());
    EXPECT_DOUBLE_EQ(*base, *transformed);
}

TEST(Auc, ExactDuplicateFeatureBarelyMovesTheScore) {
    const auto train = gaussian_pair_table(1500, 21);
    const auto test = gaussian_pair_table(1500, 22);
    // feature 1 duplicates feature 0 exactly
    std::vector<double> x0 = train.feature(0), y = train.target();
    const auto train_dup = make_table({x0, x0}, y);
    std::vector<double> tx0 = test.feature(0), ty = test.target();
    const auto test_dup = make_table({tx0, tx0}, ty);

    const auto single = qfs::evaluate(
        test_dup, qfs::train_classifier(train_dup, {0}), {0});
    const auto doubled = qfs::evaluate(
        test_dup, qfs::train_classifier(train_dup, {0, 1}), {0, 1});
    ASSERT_TRUE(single.auc.has_value() && doubled.auc.has_value());
    EXPECT_LE(std::abs(*single.auc - *doubled.auc), 0.01);
}

TEST(SubsetOverlap, SymmetricWithHandValues) {
    EXPECT_EQ(qfs::subset_overlap({0, 1}, {0, 1}), 1.0);
    EXPECT_EQ(qfs::subset_overlap({0, 1}, {2, 3}), 0.0);
    EXPECT_NEAR(qfs::subset_overlap({0, 1, 2}, {2, 3, 4}), 1.0 / 3.0, 1e-15);
    std::mt19937_64 rng(31);
    for (int trial = 0; trial < 20; ++trial) {
        std::vector<std::size_t> a, b;
        for (std::size_t f = 0; f < 8; ++f) {
            if (rng() % 2) a.push_back(f);
            if (rng() % 2) b.push_back(f);
        }
        if (a.empty()) a.push_back(0);
        if (b.empty()) b.push_back(7);
        EXPECT_DOUBLE_EQ(qfs::subset_overlap(a, b), qfs::subset_overlap(b, a));
    }
    EXPECT_THROW(qfs::subset_overlap({}, {0}), qfs::ValidationError);
}

TEST(Compare, OverlapColumnReflectsSubsetAgreement) {
    const auto table = gaussian_pair_table(40, 3);
    // three features: the two informative ones plus an exact copy of x0
    std::vector<double> x0 = table.feature(0), x1 = table.feature(1), y = table.target();
    const auto wide = make_table({x0, x1, x0}, y);
    const std::vector<double> relevance{0.9, 0.5, 0.1};

    std::map<int, qfs::PruneResult> subsets;
    subsets[1] = qfs::PruneResult{{2}, false};        // disjoint from MI top-1 {0}
    subsets[2] = qfs::PruneResult{{0, 1}, false};     // identical to MI top-2
    subsets[3] = qfs::PruneResult{{2, 0, 1}, false};  // k = n is always full overlap
    const auto comparison = qfs::compare(wide, relevance, subsets, {1, 2, 3});

    EXPECT_EQ(comparison.overlap.at(1), 0.0);
    EXPECT_EQ(comparison.overlap.at(2), 1.0);
    EXPECT_EQ(comparison.overlap.at(3), 1.0);
    EXPECT_EQ(comparison.mi_subsets.at(2), (std::vector<std::size_t>{0, 1}));
    // 3 seeds x 3 cardinalities x 2 methods
    EXPECT_EQ(comparison.records.size(), 18u);
    EXPECT_EQ(comparison.rows.size(), 6u);
}

TEST(Compare, MediansAreInvariantToSeedOrder) {
    const auto table = gaussian_pair_table(60, 9);
    const std::vector<double> relevance{0.8, 0.4};
    std::map<int, qfs::PruneResult> subsets;
    subsets[1] = qfs::PruneResult{{1}, false};
    subsets[2] = qfs::PruneResult{{0, 1}, false};

    const auto forward = qfs::compare(table, relevance, subsets, {1, 2, 3, 4, 5});
    const auto shuffled = qfs::compare(table, relevance, subsets, {4, 2, 5, 1, 3});
    ASSERT_EQ(forward.rows.size(), shuffled.rows.size());
    for (std::size_t i = 0; i < forward.rows.size(); ++i) {
        EXPECT_EQ(forward.rows[i].k, shuffled.rows[i].k);
        EXPECT_EQ(forward.rows[i].method, shuffled.rows[i].method);
        EXPECT_EQ(forward.rows[i].median_auc.has_value(),
                  shuffled.rows[i].median_auc.has_value());
        if (forward.rows[i].median_auc)
            EXPECT_DOUBLE_EQ(*forward.rows[i].median_auc, *shuffled.rows[i].median_auc);
        EXPECT_DOUBLE_EQ(forward.rows[i].median_precision,
                         shuffled.rows[i].median_precision);
        EXPECT_DOUBLE_EQ(forward.rows[i].median_recall, shuffled.rows[i].median_recall);
    }

    EXPECT_THROW(qfs::compare(table, relevance, subsets, {}), qfs::ValidationError);
    EXPECT_THROW(qfs::compare(table, relevance, {}, {1}), qfs::ValidationError);
}

}  // namespace
