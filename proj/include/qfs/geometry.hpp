#pragma once

#include <array>
#include <cmath>
#include <cstdint>
#include <limits>
#include <random>
#include <utility>
#include <vector>

#include <Eigen/Dense>

#include "qfs/common.hpp"

namespace qfs {

/// Hardware-scale constants of the drive and interaction. The defaults are
/// representative of published neutral-atom platforms and are configuration
/// values, not measured claims.
struct PhysicalConstants {
    double c6 = 5.42e-24;            // van der Waals coefficient, rad m^6 / s
    double omega_max = 1.58e7;       // peak Rabi frequency, rad/s
    double delta_l_max = 3.0e7;      // peak local detuning, rad/s
    double delta_g_initial = -3.0e7; // initial global detuning, rad/s (negative)
    double total_time = 4.0e-6;      // protocol duration T, s

    void validate() const {
        if (!(c6 > 0.0)) throw ValidationError("c6 must be positive");
        if (!(omega_max > 0.0)) throw ValidationError("omega_max must be positive");
        if (!(delta_l_max > 0.0)) throw ValidationError("delta_l_max must be positive");
        if (!(total_time > 0.0)) throw ValidationError("total_time must be positive");
        if (!(delta_g_initial < 0.0)) throw ValidationError("delta_g_initial must be negative");
    }
};

/// Distance at which the interaction V = C6/d^6 equals the final local
/// detuning: R_b = (C6 / delta_l_max)^{1/6}.
inline double blockade_radius(const PhysicalConstants& constants) {
    constants.validate();
    return std::pow(constants.c6 / constants.delta_l_max, 1.0 / 6.0);
}

/// 2D atom placement for one feature set, plus the embedding-quality report.
struct AtomLayout {
    std::vector<std::array<double, 2>> positions;  // meters, one per feature
    double blockade_radius = 0.0;                  // R_b, meters
    SquareMatrix target_distances;                 // scaled targets D_ij, meters
    SquareMatrix error_matrix;                     // eps_ij = |(D - dist)/D|
    double mean_error = 0.0;                       // mean eps over i<j
    double dilation = 1.0;                         // min-spacing repair factor (1 = none)
    std::uint64_t seed_used = 0;                   // seed of the winning restart

    std::size_t n_atoms() const { return positions.size(); }

    double pair_distance(std::size_t i, std::size_t j) const {
        const double dx = positions[i][0] - positions[j][0];
        const double dy = positions[i][1] - positions[j][1];
        return std::hypot(dx, dy);
    }

    double min_pair_distance() const {
        double lo = std::numeric_limits<double>::infinity();
        for (std::size_t i = 0; i < positions.size(); ++i)
            for (std::size_t j = i + 1; j < positions.size(); ++j)
                lo = std::min(lo, pair_distance(i, j));
        return lo;
    }
};

/// Raw distance targets d_ij = max(R_ij, floor)^{-1/6}, diagonal 0. The floor
/// keeps independent pairs (R_ij = 0) at a large finite distance.
inline SquareMatrix raw_distance_matrix(const SquareMatrix& redundancy, double floor) {
    if (!(floor > 0.0)) throw ValidationError("distance floor must be positive");
    const std::size_t n = redundancy.size();
    SquareMatrix d(n, 0.0);
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = i + 1; j < n; ++j)
            d.set_symmetric(i, j, std::pow(std::max(redundancy(i, j), floor), -1.0 / 6.0));
    return d;
}

inline double default_distance_floor(const SquareMatrix& redundancy) {
    double hi = 0.0;
    for (double v : redundancy.data()) hi = std::max(hi, v);
    if (!(hi > 0.0)) throw ValidationError("redundancy matrix is identically zero");
    return 1e-6 * hi;
}

/// Affine map of the off-diagonal entries onto [lo, hi]; if all off-diagonal
/// entries are equal they all map to the interval midpoint.
inline SquareMatrix rescale_to_interval(const SquareMatrix& d, double lo, double hi) {
    const std::size_t n = d.size();
    if (n < 2) throw ValidationError("rescaling needs at least 2 atoms");
    double dmin = std::numeric_limits<double>::infinity(), dmax = 0.0;
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = i + 1; j < n; ++j) {
            dmin = std::min(dmin, d(i, j));
            dmax = std::max(dmax, d(i, j));
        }
    SquareMatrix out(n, 0.0);
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = i + 1; j < n; ++j) {
            const double v = dmax > dmin
                                 ? lo + (d(i, j) - dmin) * (hi - lo) / (dmax - dmin)
                                 : 0.5 * (lo + hi);
            out.set_symmetric(i, j, v);
        }
    return out;
}

/// Map raw distances onto the physical interval [R_b/sqrt(2), 4 R_b].
inline SquareMatrix rescale_distances(const SquareMatrix& d, double r_b) {
    return rescale_to_interval(d, r_b / std::sqrt(2.0), 4.0 * r_b);
}

/// eps_ij = |(D_ij - ||x_i - x_j||) / D_ij| and its mean over unordered pairs.
inline std::pair<SquareMatrix, double> reconstruction_error(
    const SquareMatrix& d_scaled, const std::vector<std::array<double, 2>>& positions) {
    const std::size_t n = d_scaled.size();
    if (positions.size() != n) throw ValidationError("position count does not match targets");
    SquareMatrix eps(n, 0.0);
    double total = 0.0;
    std::size_t pairs = 0;
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = i + 1; j < n; ++j) {
            if (!(d_scaled(i, j) > 0.0))
                throw ValidationError("zero target distance off the diagonal");
            const double dist = std::hypot(positions[i][0] - positions[j][0],
                                           positions[i][1] - positions[j][1]);
            eps.set_symmetric(i, j, std::abs((d_scaled(i, j) - dist) / d_scaled(i, j)));
            total += eps(i, j);
            ++pairs;
        }
    }
    return {eps, total / static_cast<double>(pairs)};
}

namespace detail {

/// Classical-MDS (spectral) 2D starting configuration: double-center the
/// squared targets and keep the top two eigenpairs.
inline std::vector<std::array<double, 2>> spectral_init(const SquareMatrix& d) {
    const auto n = static_cast<Eigen::Index>(d.size());
    Eigen::MatrixXd d2(n, n);
    for (Eigen::Index i = 0; i < n; ++i)
        for (Eigen::Index j = 0; j < n; ++j) {
            const double v = d(static_cast<std::size_t>(i), static_cast<std::size_t>(j));
            d2(i, j) = v * v;
        }
    const Eigen::MatrixXd j_center =
        Eigen::MatrixXd::Identity(n, n) - Eigen::MatrixXd::Constant(n, n, 1.0 / double(n));
    const Eigen::MatrixXd b = -0.5 * j_center * d2 * j_center;
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(b);
    if (solver.info() != Eigen::Success)
        throw NumericalError("eigendecomposition failed in spectral initialization");
    std::vector<std::array<double, 2>> x(static_cast<std::size_t>(n), {0.0, 0.0});
    for (int k = 0; k < 2 && k < n; ++k) {
        const Eigen::Index col = n - 1 - k;  // eigenvalues sorted ascending
        const double lambda = std::max(solver.eigenvalues()(col), 0.0);
        const double s = std::sqrt(lambda);
        for (Eigen::Index i = 0; i < n; ++i)
            x[static_cast<std::size_t>(i)][static_cast<std::size_t>(k)] =
                s * solver.eigenvectors()(i, col);
    }
    return x;
}

inline double pair_dist(const std::vector<std::array<double, 2>>& x, std::size_t i,
                        std::size_t j) {
    return std::hypot(x[i][0] - x[j][0], x[i][1] - x[j][1]);
}

}  // namespace detail

/// Multi-restart stress-majorization embedding of the scaled targets into the
/// plane. Each restart perturbs the shared spectral solution with seeded
/// Gaussian noise, iterates the majorization update until the relative stress
/// decrease drops below tol, then repairs any min-spacing violation by
/// uniform dilation about the centroid. The restart with the smallest mean
/// eps wins (ties: lowest seed).
inline AtomLayout mds_embed(const SquareMatrix& d_scaled, double r_b, int n_restarts = 20,
                            std::uint64_t base_seed = 1, int max_iter = 500,
                            double tol = 1e-9) {
    const std::size_t n = d_scaled.size();
    if (n < 2) throw ValidationError("embedding needs at least 2 atoms");
    if (n_restarts < 1) throw ValidationError("n_restarts must be at least 1");
    for (double v : d_scaled.data())
        if (!std::isfinite(v)) throw NumericalError("non-finite entry in scaled distances");

    const auto x0 = detail::spectral_init(d_scaled);
    double noise_scale = 0.0;
    {
        std::size_t pairs = 0;
        for (std::size_t i = 0; i < n; ++i)
            for (std::size_t j = i + 1; j < n; ++j) {
                noise_scale += d_scaled(i, j);
                ++pairs;
            }
        noise_scale = 0.1 * noise_scale / static_cast<double>(pairs);
    }
    const double hard_floor = r_b / std::sqrt(2.0);

    AtomLayout best;
    bool have_best = false;
    for (int restart = 0; restart < n_restarts; ++restart) {
        const std::uint64_t seed = base_seed + static_cast<std::uint64_t>(restart);
        std::mt19937_64 rng(seed);
        std::normal_distribution<double> gauss(0.0, noise_scale);
        auto x = x0;
        for (auto& p : x) {
            p[0] += gauss(rng);
            p[1] += gauss(rng);
        }

        double prev_stress = -1.0;
        for (int it = 0; it < max_iter; ++it) {
            // Guttman transform: X <- B(X) X / n with b_ij = -D_ij/dist_ij.
            std::vector<double> row_sum(n, 0.0);
            std::vector<std::array<double, 2>> next(n, {0.0, 0.0});
            double stress = 0.0;
            for (std::size_t i = 0; i < n; ++i) {
                for (std::size_t j = i + 1; j < n; ++j) {
                    const double dist = detail::pair_dist(x, i, j);
                    const double diff = dist - d_scaled(i, j);
                    stress += diff * diff;
                    const double b = dist > 0.0 ? -d_scaled(i, j) / dist : 0.0;
                    next[i][0] += b * x[j][0];
                    next[i][1] += b * x[j][1];
                    next[j][0] += b * x[i][0];
                    next[j][1] += b * x[i][1];
                    row_sum[i] -= b;
                    row_sum[j] -= b;
                }
            }
            for (std::size_t i = 0; i < n; ++i) {
                next[i][0] = (next[i][0] + row_sum[i] * x[i][0]) / static_cast<double>(n);
                next[i][1] = (next[i][1] + row_sum[i] * x[i][1]) / static_cast<double>(n);
            }
            x = std::move(next);
            if (prev_stress > 0.0 && (prev_stress - stress) / prev_stress < tol) break;
            prev_stress = stress;
        }

        double min_dist = std::numeric_limits<double>::infinity();
        for (std::size_t i = 0; i < n; ++i)
            for (std::size_t j = i + 1; j < n; ++j)
                min_dist = std::min(min_dist, detail::pair_dist(x, i, j));
        double dilation = 1.0;
        if (min_dist < hard_floor) {
            double cx = 0.0, cy = 0.0;
            for (const auto& p : x) {
                cx += p[0];
                cy += p[1];
            }
            cx /= static_cast<double>(n);
            cy /= static_cast<double>(n);
            dilation = hard_floor / min_dist;
            for (auto& p : x) {
                p[0] = cx + (p[0] - cx) * dilation;
                p[1] = cy + (p[1] - cy) * dilation;
            }
        }

        auto [eps, mean_eps] = reconstruction_error(d_scaled, x);
        if (!have_best || mean_eps < best.mean_error) {
            best.positions = x;
            best.blockade_radius = r_b;
            best.target_distances = d_scaled;
            best.error_matrix = std::move(eps);
            best.mean_error = mean_eps;
            best.dilation = dilation;
            best.seed_used = seed;
            have_best = true;
        }
    }
    return best;
}

enum class IntervalMode { adaptive, fixed };

struct EmbedOptions {
    int n_restarts = 20;
    int max_iter = 500;
    double tol = 1e-9;
    std::uint64_t base_seed = 1;
    double floor_scale = 1e-6;  // distance floor = floor_scale * max(R_ij)
    IntervalMode interval_mode = IntervalMode::adaptive;
    int max_rounds = 8;     // adaptive mode only
    double growth = 1.3;    // adaptive mode: d_min growth per round
};

/// Full redundancy-to-layout driver. Fixed mode rescales once onto
/// [R_b/sqrt(2), 4 R_b]. Adaptive mode starts the interval at [R_b, 4 R_b]
/// and widens the lower edge geometrically (capped at 2 R_b) until the
/// embedding respects the minimum spacing without dilation; the round with
/// the smallest mean eps is returned. Every returned layout satisfies the
/// min-spacing floor either naturally or via dilation.
inline AtomLayout embed_redundancy(const SquareMatrix& redundancy, double r_b,
                                   const EmbedOptions& options = {}) {
    double max_r = 0.0;
    for (double v : redundancy.data()) max_r = std::max(max_r, v);
    if (!(max_r > 0.0)) throw ValidationError("redundancy matrix is identically zero");
    const SquareMatrix raw = raw_distance_matrix(redundancy, options.floor_scale * max_r);
    const double hard_floor = r_b / std::sqrt(2.0);
    const double d_max = 4.0 * r_b;

    if (options.interval_mode == IntervalMode::fixed) {
        const SquareMatrix scaled = rescale_to_interval(raw, hard_floor, d_max);
        return mds_embed(scaled, r_b, options.n_restarts, options.base_seed,
                         options.max_iter, options.tol);
    }

    double d_min = r_b;
    AtomLayout best;
    bool have_best = false;
    for (int round = 0; round < options.max_rounds; ++round) {
        const SquareMatrix scaled = rescale_to_interval(raw, d_min, d_max);
        AtomLayout layout = mds_embed(scaled, r_b, options.n_restarts, options.base_seed,
                                      options.max_iter, options.tol);
        const bool no_dilation = layout.dilation <= 1.0 + 1e-9;
        if (!have_best || layout.mean_error < best.mean_error) {
            best = std::move(layout);
            have_best = true;
        }
        // Once the min spacing holds without repair, growing d_min further
        // would only stretch the targets.
        if (no_dilation) break;
        d_min = std::min(d_min * options.growth, 0.5 * d_max);
    }
    return best;
}

}  // namespace qfs
