#pragma once

#include <cmath>
#include <map>
#include <utility>
#include <vector>

#include "qfs/common.hpp"
#include "qfs/dataset.hpp"

namespace qfs {

/// Relevance/redundancy statistics of a discretized table, in nats.
struct InfoProfile {
    std::vector<double> relevance;       // I_i = I(x_i; y)
    SquareMatrix redundancy;             // R_ij = I(x_i; x_j), zero diagonal
    SquareMatrix normalized_redundancy;  // R_ij / min(H_i, H_j), in [0,1]
    std::vector<double> entropies;       // H_i of each discretized feature
    std::vector<double> p_weights;       // relevance / max relevance, in (0,1]
};

/// Plug-in (maximum-likelihood) Shannon entropy of a discrete series, nats.
inline double entropy(const std::vector<int>& a) {
    if (a.empty()) throw ValidationError("entropy of empty series");
    std::map<int, long long> counts;
    for (int v : a) ++counts[v];
    const double n = static_cast<double>(a.size());
    double h = 0.0;
    for (const auto& [value, c] : counts) {
        const double p = static_cast<double>(c) / n;
        h -= p * std::log(p);
    }
    return std::max(h, 0.0);
}

/// Plug-in mutual information of two discrete series in nats:
/// I = sum_{u,v} p(u,v) ln[p(u,v) / (p(u) p(v))], empty cells contribute 0,
/// clamped at 0 from below. Accumulation runs in ascending (u,v) order so the
/// result is bit-reproducible.
inline double mutual_information(const std::vector<int>& a, const std::vector<int>& b) {
    if (a.size() != b.size()) throw ValidationError("mutual information: length mismatch");
    if (a.empty()) throw ValidationError("mutual information: empty series");
    std::map<std::pair<int, int>, long long> joint;
    std::map<int, long long> ca, cb;
    for (std::size_t r = 0; r < a.size(); ++r) {
        ++joint[{a[r], b[r]}];
        ++ca[a[r]];
        ++cb[b[r]];
    }
    const double n = static_cast<double>(a.size());
    double mi = 0.0;
    for (const auto& [uv, c] : joint) {
        const double p_uv = static_cast<double>(c) / n;
        const double p_u = static_cast<double>(ca[uv.first]) / n;
        const double p_v = static_cast<double>(cb[uv.second]) / n;
        mi += p_uv * std::log(p_uv / (p_u * p_v));
    }
    return std::max(mi, 0.0);
}

/// I_i = I(x_i; y) for every feature column.
inline std::vector<double> relevance_vector(const DiscretizedView& view,
                                            const std::vector<int>& target) {
    if (target.size() != view.n_rows())
        throw ValidationError("target length does not match table rows");
    std::vector<double> out;
    out.reserve(view.n_features());
    for (const auto& column : view.bins) out.push_back(mutual_information(column, target));
    return out;
}

/// R_ij = I(x_i; x_j); each unordered pair is computed once (exact symmetry),
/// diagonal fixed at 0.
inline SquareMatrix redundancy_matrix(const DiscretizedView& view) {
    const std::size_t n = view.n_features();
    if (n < 2) throw ValidationError("redundancy matrix needs at least 2 features");
    SquareMatrix r(n, 0.0);
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = i + 1; j < n; ++j)
            r.set_symmetric(i, j, mutual_information(view.bins[i], view.bins[j]));
    return r;
}

/// N_ij = R_ij / min(H_i, H_j), clamped to [0,1]; any pair involving a
/// zero-entropy feature gets 0.
inline SquareMatrix normalize_redundancy(const SquareMatrix& redundancy,
                                         const std::vector<double>& entropies) {
    const std::size_t n = redundancy.size();
    if (entropies.size() != n) throw ValidationError("entropy vector length mismatch");
    SquareMatrix out(n, 0.0);
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = i + 1; j < n; ++j) {
            const double h = std::min(entropies[i], entropies[j]);
            const double v = h > 0.0 ? redundancy(i, j) / h : 0.0;
            out.set_symmetric(i, j, std::clamp(v, 0.0, 1.0));
        }
    }
    return out;
}

/// Site weights p_i = I_i / max(I): in (0,1] with max exactly 1. Features
/// with zero (or numerically negative) relevance are floored at 1e-6 so the
/// weight stays positive; if no feature carries any relevance all weights
/// are 1.
inline std::vector<double> site_weights(const std::vector<double>& relevance) {
    if (relevance.empty()) throw ValidationError("site weights of empty relevance vector");
    double max_i = 0.0;
    for (double v : relevance) max_i = std::max(max_i, v);
    std::vector<double> p(relevance.size(), 1.0);
    if (max_i <= 0.0) return p;
    for (std::size_t i = 0; i < p.size(); ++i)
        p[i] = std::clamp(relevance[i] / max_i, 1e-6, 1.0);
    return p;
}

inline std::vector<int> to_int_series(const std::vector<double>& values) {
    std::vector<int> out(values.size());
    for (std::size_t r = 0; r < values.size(); ++r)
        out[r] = static_cast<int>(std::llround(values[r]));
    return out;
}

/// Full InfoProfile of a discretized table against its binary target.
inline InfoProfile compute_profile(const DiscretizedView& view, const std::vector<int>& target) {
    InfoProfile profile;
    profile.relevance = relevance_vector(view, target);
    profile.redundancy = redundancy_matrix(view);
    profile.entropies.reserve(view.n_features());
    for (const auto& column : view.bins) profile.entropies.push_back(entropy(column));
    profile.normalized_redundancy = normalize_redundancy(profile.redundancy, profile.entropies);
    profile.p_weights = site_weights(profile.relevance);
    return profile;
}

}  // namespace qfs
