#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <map>
#include <numeric>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "qfs/common.hpp"
#include "qfs/dataset.hpp"
#include "qfs/selection.hpp"

namespace qfs {

enum class SelectionMethod { qfs, mi_ranking };

inline std::string method_name(SelectionMethod m) {
    return m == SelectionMethod::qfs ? "qfs" : "mi_ranking";
}

/// One classifier evaluation. AUC is absent (not zero) when the test split
/// holds a single class.
struct MetricRecord {
    std::optional<double> auc;
    double precision = 0.0;
    double recall = 0.0;
    std::vector<std::size_t> subset;
    std::uint64_t seed = 0;
    SelectionMethod method = SelectionMethod::qfs;
};

/// Indices of the k largest relevance values, ties toward the lower index,
/// in rank order.
inline std::vector<std::size_t> mi_ranking_topk(const std::vector<double>& relevance,
                                                std::size_t k) {
    if (k < 1 || k > relevance.size())
        throw ValidationError("k must lie in [1, n_features]");
    std::vector<std::size_t> order(relevance.size());
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
        return relevance[a] > relevance[b];
    });
    order.resize(k);
    return order;
}

/// Logistic model over a feature subset. Weights live in the raw feature
/// space: score(x) = sigmoid(weights[0] + sum_i weights[1+i] * x[subset[i]]).
struct ClassifierOptions {
    double l2 = 1e-2;
    int steps = 500;
    double learning_rate = 0.1;
};

/// Deterministic full-batch gradient descent on L2-regularized logistic
/// loss. Features are standardized internally for conditioning and the
/// scaler is folded back into the returned weights, so callers score raw
/// features directly. The optimizer starts from zero weights (the problem is
/// convex), so the seed only tags the record.
inline std::vector<double> train_classifier(const FeatureTable& train,
                                            const std::vector<std::size_t>& subset,
                                            const ClassifierOptions& options = {}) {
    if (subset.empty()) throw ValidationError("empty feature subset");
    const std::size_t n = train.n_rows();
    if (n == 0) throw ValidationError("empty training table");
    const std::size_t k = subset.size();

    std::vector<const std::vector<double>*> cols(k);
    for (std::size_t j = 0; j < k; ++j) cols[j] = &train.feature(subset[j]);
    const auto& y = train.target();

    std::vector<double> m(k, 0.0), s(k, 1.0);
    for (std::size_t j = 0; j < k; ++j) {
        double mu = 0.0;
        for (double v : *cols[j]) mu += v;
        mu /= static_cast<double>(n);
        double var = 0.0;
        for (double v : *cols[j]) var += (v - mu) * (v - mu);
        var /= static_cast<double>(n);
        m[j] = mu;
        s[j] = var > 0.0 ? std::sqrt(var) : 1.0;
    }

    std::vector<double> w(k, 0.0);
    double b = 0.0;
    std::vector<double> grad(k);
    for (int step = 0; step < options.steps; ++step) {
        std::fill(grad.begin(), grad.end(), 0.0);
        double grad_b = 0.0;
        double loss = 0.0;
        for (std::size_t r = 0; r < n; ++r) {
            double z = b;
            for (std::size_t j = 0; j < k; ++j)
                z += w[j] * (((*cols[j])[r] - m[j]) / s[j]);
            const double p = 1.0 / (1.0 + std::exp(-z));
            const double err = p - y[r];
            for (std::size_t j = 0; j < k; ++j)
                grad[j] += err * (((*cols[j])[r] - m[j]) / s[j]);
            grad_b += err;
            loss += y[r] > 0.5 ? -std::log(std::max(p, 1e-300))
                               : -std::log(std::max(1.0 - p, 1e-300));
        }
        if (!std::isfinite(loss))
            throw NumericalError("non-finite logistic loss at step " + std::to_string(step));
        const double inv_n = 1.0 / static_cast<double>(n);
        for (std::size_t j = 0; j < k; ++j)
            w[j] -= options.learning_rate * (grad[j] * inv_n + options.l2 * w[j]);
        b -= options.learning_rate * grad_b * inv_n;
    }

    std::vector<double> folded(k + 1);
    folded[0] = b;
    for (std::size_t j = 0; j < k; ++j) {
        folded[1 + j] = w[j] / s[j];
        folded[0] -= w[j] * m[j] / s[j];
    }
    return folded;
}

inline std::vector<double> classifier_scores(const FeatureTable& table,
                                             const std::vector<double>& weights,
                                             const std::vector<std::size_t>& subset) {
    if (weights.size() != subset.size() + 1)
        throw ValidationError("weight vector does not match subset");
    std::vector<const std::vector<double>*> cols(subset.size());
    for (std::size_t j = 0; j < subset.size(); ++j) cols[j] = &table.feature(subset[j]);
    std::vector<double> scores(table.n_rows());
    for (std::size_t r = 0; r < table.n_rows(); ++r) {
        double z = weights[0];
        for (std::size_t j = 0; j < subset.size(); ++j) z += weights[1 + j] * (*cols[j])[r];
        scores[r] = 1.0 / (1.0 + std::exp(-z));
    }
    return scores;
}

/// Tie-adjusted Mann-Whitney AUC via midranks; absent when only one class
/// is present.
inline std::optional<double> auc_from_scores(const std::vector<double>& scores,
                                             const std::vector<double>& labels) {
    if (scores.size() != labels.size()) throw ValidationError("score/label length mismatch");
    std::vector<std::size_t> order(scores.size());
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::stable_sort(order.begin(), order.end(),
                     [&](std::size_t a, std::size_t b) { return scores[a] < scores[b]; });
    double rank_sum_pos = 0.0;
    std::size_t n_pos = 0, n_neg = 0;
    std::size_t i = 0;
    while (i < order.size()) {
        std::size_t j = i;
        while (j + 1 < order.size() && scores[order[j + 1]] == scores[order[i]]) ++j;
        const double midrank = 0.5 * static_cast<double>(i + j) + 1.0;  // 1-based
        for (std::size_t t = i; t <= j; ++t) {
            if (labels[order[t]] > 0.5) {
                rank_sum_pos += midrank;
                ++n_pos;
            } else {
                ++n_neg;
            }
        }
        i = j + 1;
    }
    if (n_pos == 0 || n_neg == 0) return std::nullopt;
    const double np = static_cast<double>(n_pos), nn = static_cast<double>(n_neg);
    return (rank_sum_pos - np * (np + 1.0) / 2.0) / (np * nn);
}

/// AUC (rank statistic), precision and recall at probability threshold 0.5.
/// An empty predicted-positive set yields precision 0 by convention.
inline MetricRecord evaluate(const FeatureTable& test, const std::vector<double>& weights,
                             const std::vector<std::size_t>& subset) {
    if (test.n_rows() == 0) throw ValidationError("empty test table");
    const auto scores = classifier_scores(test, weights, subset);
    const auto& y = test.target();

    MetricRecord record;
    record.subset = subset;
    record.auc = auc_from_scores(scores, y);
    long long tp = 0, fp = 0, fn = 0;
    for (std::size_t r = 0; r < scores.size(); ++r) {
        const bool predicted = scores[r] >= 0.5;
        const bool actual = y[r] > 0.5;
        if (predicted && actual) ++tp;
        else if (predicted && !actual) ++fp;
        else if (!predicted && actual) ++fn;
    }
    record.precision = tp + fp > 0 ? static_cast<double>(tp) / static_cast<double>(tp + fp)
                                   : 0.0;
    record.recall = tp + fn > 0 ? static_cast<double>(tp) / static_cast<double>(tp + fn)
                                : 0.0;
    return record;
}

inline double subset_overlap(const std::vector<std::size_t>& a,
                             const std::vector<std::size_t>& b) {
    if (a.empty() || b.empty()) throw ValidationError("overlap of empty subsets");
    const std::set<std::size_t> sa(a.begin(), a.end());
    std::size_t shared = 0;
    for (std::size_t f : std::set<std::size_t>(b.begin(), b.end()))
        if (sa.count(f)) ++shared;
    return static_cast<double>(shared) / static_cast<double>(std::max(a.size(), b.size()));
}

struct ComparisonRow {
    int k = 0;
    SelectionMethod method = SelectionMethod::qfs;
    std::optional<double> median_auc;
    double median_precision = 0.0;
    double median_recall = 0.0;
};

struct ComparisonTable {
    std::vector<MetricRecord> records;        // every (seed, method, k) run
    std::vector<ComparisonRow> rows;          // medians over seeds
    std::map<int, double> overlap;            // k -> |QFS_k ∩ MI_k| / k
    std::map<int, std::vector<std::size_t>> mi_subsets;  // k -> MI top-k
};

struct EvalOptions {
    double test_fraction = 0.2;
    ClassifierOptions classifier;
};

/// Benchmark the QFS subsets against MI-ranking baselines of the same sizes:
/// per seed, stratified-split the table, train the built-in classifier on
/// each subset, evaluate on the held-out rows, and report per-(k, method)
/// medians plus feature overlap.
inline ComparisonTable compare(const FeatureTable& table, const std::vector<double>& relevance,
                               const std::map<int, PruneResult>& qfs_subsets,
                               const std::vector<std::uint64_t>& seeds,
                               const EvalOptions& options = {}) {
    if (seeds.empty()) throw ValidationError("at least one evaluation seed is required");
    if (qfs_subsets.empty()) throw ValidationError("no subsets to evaluate");
    ComparisonTable out;
    for (const auto& [k, qfs_set] : qfs_subsets) {
        if (k < 1 || static_cast<std::size_t>(k) > relevance.size())
            throw ValidationError("cardinality out of range");
        out.mi_subsets[k] = mi_ranking_topk(relevance, static_cast<std::size_t>(k));
        out.overlap[k] = subset_overlap(qfs_set.features, out.mi_subsets[k]);
    }

    for (std::uint64_t seed : seeds) {
        auto [train, test] = split(table, options.test_fraction, seed);
        for (const auto& [k, qfs_set] : qfs_subsets) {
            for (SelectionMethod method : {SelectionMethod::qfs, SelectionMethod::mi_ranking}) {
                const auto& subset = method == SelectionMethod::qfs
                                         ? qfs_set.features
                                         : out.mi_subsets.at(k);
                const auto weights = train_classifier(train, subset, options.classifier);
                MetricRecord record = evaluate(test, weights, subset);
                record.seed = seed;
                record.method = method;
                out.records.push_back(std::move(record));
            }
        }
    }

    for (const auto& [k, qfs_set] : qfs_subsets) {
        for (SelectionMethod method : {SelectionMethod::qfs, SelectionMethod::mi_ranking}) {
            std::vector<double> aucs, precisions, recalls;
            for (const MetricRecord& r : out.records) {
                if (r.method != method ||
                    r.subset.size() != static_cast<std::size_t>(k))
                    continue;
                const auto& expect = method == SelectionMethod::qfs ? qfs_set.features
                                                                    : out.mi_subsets.at(k);
                if (r.subset != expect) continue;
                if (r.auc) aucs.push_back(*r.auc);
                precisions.push_back(r.precision);
                recalls.push_back(r.recall);
            }
            ComparisonRow row;
            row.k = k;
            row.method = method;
            if (!aucs.empty()) row.median_auc = median(aucs);
            row.median_precision = median(precisions);
            row.median_recall = median(recalls);
            out.rows.push_back(row);
        }
    }
    return out;
}

}  // namespace qfs
