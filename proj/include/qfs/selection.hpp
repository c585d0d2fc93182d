#pragma once

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstdint>
#include <limits>
#include <map>
#include <optional>
#include <tuple>
#include <utility>
#include <vector>

#include "qfs/common.hpp"
#include "qfs/quantum_sim.hpp"

namespace qfs {

/// The selection objective Q(x; alpha) = -alpha sum_i I_i x_i
///                                      + (1-alpha) sum_{i<j} R_ij x_i x_j.
struct QuboInstance {
    std::vector<double> relevance;  // I_i, nats
    SquareMatrix redundancy;        // R_ij, nats, zero diagonal
    double alpha = 0.5;

    std::size_t n_features() const { return relevance.size(); }

    void validate() const {
        if (relevance.empty()) throw ValidationError("instance has no features");
        if (redundancy.size() != relevance.size())
            throw ValidationError("relevance/redundancy size mismatch");
        if (!(alpha >= 0.0 && alpha <= 1.0))
            throw ValidationError("alpha must lie in [0, 1]");
        for (std::size_t i = 0; i < redundancy.size(); ++i) {
            if (redundancy(i, i) != 0.0)
                throw ValidationError("redundancy diagonal must be zero");
            for (std::size_t j = i + 1; j < redundancy.size(); ++j)
                if (redundancy(i, j) != redundancy(j, i))
                    throw ValidationError("redundancy matrix must be symmetric");
        }
    }
};

inline double qubo_energy(std::uint64_t x, const QuboInstance& instance) {
    const std::size_t n = instance.n_features();
    if (n < 64 && (x >> n) != 0)
        throw ValidationError("bitstring is longer than the instance");
    double e = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        if (!bit_get(x, i)) continue;
        e -= instance.alpha * instance.relevance[i];
        for (std::size_t j = i + 1; j < n; ++j)
            if (bit_get(x, j)) e += (1.0 - instance.alpha) * instance.redundancy(i, j);
    }
    return e;
}

/// Q over all 2^n bitstrings, indexed by bitmask.
inline std::vector<double> qubo_energy_table(const QuboInstance& instance) {
    instance.validate();
    const std::size_t n = instance.n_features();
    std::vector<double> linear(n);
    for (std::size_t i = 0; i < n; ++i) linear[i] = -instance.alpha * instance.relevance[i];
    SquareMatrix quad(n, 0.0);
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = i + 1; j < n; ++j)
            quad.set_symmetric(i, j, (1.0 - instance.alpha) * instance.redundancy(i, j));
    return subset_energy_table(linear, quad);
}

/// Exhaustive minimum of Q, optionally restricted to one cardinality.
/// Ties break toward the smallest bitstring value.
inline std::pair<std::uint64_t, double> brute_force_optimum(
    const QuboInstance& instance, std::optional<int> cardinality = std::nullopt) {
    const std::size_t n = instance.n_features();
    if (n > 20) throw ValidationError("exhaustive search capped at 20 features");
    if (cardinality && (*cardinality < 0 || static_cast<std::size_t>(*cardinality) > n))
        throw ValidationError("cardinality out of range");
    const auto table = qubo_energy_table(instance);
    std::uint64_t best_mask = 0;
    double best_e = std::numeric_limits<double>::infinity();
    bool found = false;
    for (std::uint64_t s = 0; s < table.size(); ++s) {
        if (cardinality && std::popcount(s) != *cardinality) continue;
        if (!found || table[s] < best_e) {
            best_mask = s;
            best_e = table[s];
            found = true;
        }
    }
    if (!found) throw ValidationError("no bitstring with the requested cardinality");
    return {best_mask, best_e};
}

enum class FilterMode { per_shot, per_unique };

/// Outcome of the low-energy filter: the kept multiset plus the Q energy of
/// each kept bitstring.
struct KeptEnsemble {
    std::map<std::uint64_t, long long> counts;
    std::map<std::uint64_t, double> energies;
    long long kept_shots = 0;
    std::size_t n_atoms = 0;
};

namespace detail {

inline long long kept_target(double fraction, long long total) {
    // ceil(fraction * total) with a nudge against binary round-up artifacts
    // (0.1 * 10000 evaluating to 1000.0000000000001 must keep 1000).
    auto t = static_cast<long long>(std::ceil(fraction * static_cast<double>(total) - 1e-9));
    return std::clamp(t, 1ll, total);
}

}  // namespace detail

/// Retain the lowest-energy fraction of the measured ensemble. per_shot mode
/// (default) keeps ceil(fraction * shots) measurement outcomes; per_unique
/// keeps ceil(fraction * #distinct) distinct bitstrings with all their shots.
/// Ordering is (Q ascending, bitstring value ascending) in both modes.
inline KeptEnsemble low_energy_filter(const SampleEnsemble& ensemble,
                                      const QuboInstance& instance, double fraction = 0.10,
                                      FilterMode mode = FilterMode::per_shot) {
    if (ensemble.counts.empty()) throw ValidationError("empty ensemble");
    if (!(fraction > 0.0 && fraction <= 1.0))
        throw ValidationError("filter fraction must lie in (0, 1]");
    if (instance.n_features() != ensemble.n_atoms)
        throw ValidationError("instance size does not match ensemble");

    std::vector<std::tuple<double, std::uint64_t, long long>> ranked;
    ranked.reserve(ensemble.counts.size());
    for (const auto& [mask, count] : ensemble.counts)
        ranked.emplace_back(qubo_energy(mask, instance), mask, count);
    std::sort(ranked.begin(), ranked.end());

    KeptEnsemble kept;
    kept.n_atoms = ensemble.n_atoms;
    if (mode == FilterMode::per_shot) {
        long long remaining = detail::kept_target(fraction, ensemble.shots);
        for (const auto& [energy, mask, count] : ranked) {
            if (remaining <= 0) break;
            const long long take = std::min(count, remaining);
            kept.counts[mask] = take;
            kept.energies[mask] = energy;
            kept.kept_shots += take;
            remaining -= take;
        }
    } else {
        long long remaining =
            detail::kept_target(fraction, static_cast<long long>(ranked.size()));
        for (const auto& [energy, mask, count] : ranked) {
            if (remaining <= 0) break;
            kept.counts[mask] = count;
            kept.energies[mask] = energy;
            kept.kept_shots += count;
            --remaining;
        }
    }
    return kept;
}

/// <n_i>: fraction of kept shots in which atom i is excited.
inline std::vector<double> rydberg_densities(const std::map<std::uint64_t, long long>& kept,
                                             std::size_t n_atoms) {
    long long total = 0;
    for (const auto& [mask, count] : kept) total += count;
    if (total <= 0) throw ValidationError("empty kept multiset");
    std::vector<double> density(n_atoms, 0.0);
    for (const auto& [mask, count] : kept)
        for (std::size_t i = 0; i < n_atoms; ++i)
            if (bit_get(mask, i)) density[i] += static_cast<double>(count);
    for (double& d : density) d /= static_cast<double>(total);
    return density;
}

inline std::vector<double> rydberg_densities(const KeptEnsemble& kept) {
    return rydberg_densities(kept.counts, kept.n_atoms);
}

/// One pruned subset, in acceptance (density-ranked) order. `relaxed` marks
/// that the redundancy bound had to be abandoned to reach k features.
struct PruneResult {
    std::vector<std::size_t> features;
    bool relaxed = false;
};

namespace detail {

inline PruneResult prune_over(const std::vector<double>& densities,
                              const SquareMatrix& normalized_redundancy, double threshold,
                              std::size_t k, const std::vector<bool>& allowed) {
    std::vector<std::size_t> order;
    for (std::size_t i = 0; i < densities.size(); ++i)
        if (allowed[i]) order.push_back(i);
    std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
        return densities[a] > densities[b];  // ties keep ascending index
    });

    PruneResult result;
    for (std::size_t idx : order) {
        if (result.features.size() == k) break;
        bool admissible = true;
        for (std::size_t a : result.features)
            if (normalized_redundancy(idx, a) > threshold) {
                admissible = false;
                break;
            }
        if (admissible) result.features.push_back(idx);
    }
    if (result.features.size() < k) {
        result.relaxed = true;
        for (std::size_t idx : order) {
            if (result.features.size() == k) break;
            if (std::find(result.features.begin(), result.features.end(), idx) ==
                result.features.end())
                result.features.push_back(idx);
        }
    }
    return result;
}

}  // namespace detail

/// Greedy density-ranked selection: walk features in descending density
/// (ties toward the lower index) and accept one iff its normalized
/// redundancy with every accepted feature stays within the threshold, until
/// k are chosen. If fewer than k admissible features exist the remaining
/// highest-density features fill the set and the result is flagged relaxed.
inline PruneResult redundancy_prune(const std::vector<double>& densities,
                                    const SquareMatrix& normalized_redundancy,
                                    double threshold, std::size_t k) {
    if (!(threshold > 0.0 && threshold <= 1.0))
        throw ValidationError("prune threshold must lie in (0, 1]");
    if (k < 1 || k > densities.size())
        throw ValidationError("subset size k out of range");
    if (normalized_redundancy.size() != densities.size())
        throw ValidationError("density/redundancy size mismatch");
    return detail::prune_over(densities, normalized_redundancy, threshold, k,
                              std::vector<bool>(densities.size(), true));
}

/// Disjoint family: rerun the pruning pass, excluding features used by
/// earlier sets, while at least k unused features remain (only full-size
/// sets are emitted).
inline std::vector<PruneResult> alternatives(const std::vector<double>& densities,
                                             const SquareMatrix& normalized_redundancy,
                                             double threshold, std::size_t n_sets,
                                             std::size_t k) {
    if (n_sets < 1) throw ValidationError("n_sets must be at least 1");
    if (k < 1 || k > densities.size())
        throw ValidationError("subset size k out of range");
    std::vector<bool> available(densities.size(), true);
    std::size_t n_available = densities.size();
    std::vector<PruneResult> out;
    while (out.size() < n_sets && n_available >= k) {
        PruneResult set =
            detail::prune_over(densities, normalized_redundancy, threshold, k, available);
        for (std::size_t idx : set.features) {
            available[idx] = false;
            --n_available;
        }
        out.push_back(std::move(set));
    }
    return out;
}

/// Full post-processing result of one measured ensemble.
struct SelectionReport {
    std::vector<double> densities;
    double kept_fraction = 0.10;
    FilterMode filter_mode = FilterMode::per_shot;
    double prune_threshold = 0.70;
    KeptEnsemble kept;
    std::map<int, PruneResult> subsets_by_cardinality;
    std::vector<PruneResult> alternative_sets;
};

inline SelectionReport build_selection_report(const SampleEnsemble& ensemble,
                                              const QuboInstance& instance,
                                              const SquareMatrix& normalized_redundancy,
                                              double fraction, double threshold, int k_min,
                                              int k_max, std::size_t n_alternative_sets,
                                              FilterMode mode = FilterMode::per_shot) {
    const auto n = static_cast<int>(instance.n_features());
    if (k_min < 1 || k_min > k_max || k_max > n)
        throw ValidationError("cardinality range must satisfy 1 <= k_min <= k_max <= n");
    SelectionReport report;
    report.kept_fraction = fraction;
    report.filter_mode = mode;
    report.prune_threshold = threshold;
    report.kept = low_energy_filter(ensemble, instance, fraction, mode);
    report.densities = rydberg_densities(report.kept);
    for (int k = k_min; k <= k_max; ++k)
        report.subsets_by_cardinality[k] = redundancy_prune(
            report.densities, normalized_redundancy, threshold, static_cast<std::size_t>(k));
    report.alternative_sets =
        alternatives(report.densities, normalized_redundancy, threshold, n_alternative_sets,
                     static_cast<std::size_t>(k_max));
    return report;
}

}  // namespace qfs
