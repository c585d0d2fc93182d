#pragma once

#include <algorithm>
#include <bit>
#include <cmath>
#include <complex>
#include <cstdint>
#include <map>
#include <random>
#include <string>
#include <utility>
#include <vector>

#include "qfs/common.hpp"
#include "qfs/geometry.hpp"
#include "qfs/pulses.hpp"

namespace qfs {

/// 2^N complex amplitudes; bit i of the basis index is the occupation of
/// atom i (ground = 0, Rydberg = 1), so atom 0 is the least significant bit.
struct StateVector {
    std::vector<std::complex<double>> amplitudes;
    std::size_t n_atoms = 0;

    double norm() const {
        double s = 0.0;
        for (const auto& a : amplitudes) s += std::norm(a);
        return std::sqrt(s);
    }
    double probability(std::uint64_t basis_index) const {
        return std::norm(amplitudes[basis_index]);
    }
};

/// |<a|b>|^2 of two equally sized state vectors.
inline double fidelity(const StateVector& a, const StateVector& b) {
    if (a.amplitudes.size() != b.amplitudes.size())
        throw ValidationError("fidelity: dimension mismatch");
    std::complex<double> overlap = 0.0;
    for (std::size_t s = 0; s < a.amplitudes.size(); ++s)
        overlap += std::conj(a.amplitudes[s]) * b.amplitudes[s];
    return std::norm(overlap);
}

/// Measurement record: counts per basis index (rendered as N-bit strings,
/// atom 0 first, on serialization).
struct SampleEnsemble {
    std::map<std::uint64_t, long long> counts;
    std::size_t n_atoms = 0;
    long long shots = 0;
    std::uint64_t seed = 0;
};

/// Static description of one simulation: geometry-derived van der Waals
/// couplings V_ij = C6/d_ij^6 plus the drive program, with per-basis-state
/// interaction and weight sums precomputed for the diagonal propagator.
class RydbergSystem {
  public:
    RydbergSystem(AtomLayout layout, DriveProgram program, double c6,
                  std::size_t max_atoms = 20)
        : layout_(std::move(layout)), program_(std::move(program)) {
        program_.validate();
        const std::size_t n = layout_.n_atoms();
        if (n == 0) throw ValidationError("system needs at least one atom");
        if (n > max_atoms)
            throw ValidationError("atom count " + std::to_string(n) +
                                  " exceeds the simulator cap of " +
                                  std::to_string(max_atoms));
        if (program_.n_sites() != n)
            throw ValidationError("program weight count does not match atom count");
        if (!(c6 > 0.0)) throw ValidationError("c6 must be positive");

        vdw_ = SquareMatrix(n, 0.0);
        for (std::size_t i = 0; i < n; ++i)
            for (std::size_t j = i + 1; j < n; ++j) {
                const double d = layout_.pair_distance(i, j);
                if (!(d > 0.0)) throw ValidationError("coincident atoms in layout");
                vdw_.set_symmetric(i, j, c6 / std::pow(d, 6.0));
            }

        interaction_ = subset_energy_table(std::vector<double>(n, 0.0), vdw_);
        weight_sum_ = subset_energy_table(program_.site_weights, SquareMatrix(n, 0.0));
    }

    std::size_t n_atoms() const { return layout_.n_atoms(); }
    const SquareMatrix& vdw() const { return vdw_; }
    const DriveProgram& program() const { return program_; }
    const AtomLayout& layout() const { return layout_; }
    /// Sum over occupied pairs of V_ij, per basis state.
    const std::vector<double>& interaction_table() const { return interaction_; }
    /// Sum over occupied sites of p_i, per basis state.
    const std::vector<double>& weight_table() const { return weight_sum_; }

  private:
    AtomLayout layout_;
    DriveProgram program_;
    SquareMatrix vdw_;
    std::vector<double> interaction_;
    std::vector<double> weight_sum_;
};

/// H(t) psi with H = (Omega/2) sum_i (e^{i phi}|g><r|_i + h.c.)
///                 - Delta_g sum_i n_i - Delta_l(t) sum_i p_i n_i
///                 + sum_{i<j} V_ij n_i n_j.
inline StateVector hamiltonian_apply(const RydbergSystem& system, double t,
                                     const StateVector& psi) {
    const std::size_t n = system.n_atoms();
    const std::size_t dim = std::size_t{1} << n;
    if (psi.amplitudes.size() != dim)
        throw ValidationError("state dimension does not match system");
    const DriveSample drive = sample_at(system.program(), t);
    const std::complex<double> up = 0.5 * drive.omega *
                                    std::polar(1.0, -drive.phase);  // <r|H|g> term
    const std::complex<double> down = 0.5 * drive.omega * std::polar(1.0, drive.phase);

    StateVector out;
    out.n_atoms = n;
    out.amplitudes.assign(dim, 0.0);
    const auto& eint = system.interaction_table();
    const auto& wsum = system.weight_table();
    for (std::uint64_t s = 0; s < dim; ++s) {
        const double diag = -drive.delta_g * std::popcount(s) - drive.delta_l * wsum[s] +
                            eint[s];
        out.amplitudes[s] += diag * psi.amplitudes[s];
        for (std::size_t i = 0; i < n; ++i) {
            const std::uint64_t flipped = s ^ (std::uint64_t{1} << i);
            // contribution of psi[s] to out[flipped]
            out.amplitudes[flipped] += (bit_get(s, i) ? down : up) * psi.amplitudes[s];
        }
    }
    return out;
}

/// Propagate |00...0> to time T with second-order Strang splitting. The drive
/// is first sampled onto the program's n_steps interpolation grid; inside
/// each grid interval, values are linearly interpolated and each of the
/// `substeps_per_interval` substeps applies
///     exp(-i D dt/2) exp(-i X dt) exp(-i D dt/2)
/// with D (detunings + interactions) frozen at the substep midpoint and the
/// X factor realized exactly as N single-site rotations. Both factors are
/// unitary, so the norm is conserved to rounding.
inline StateVector evolve(const RydbergSystem& system, int substeps_per_interval = 16) {
    if (substeps_per_interval < 1)
        throw ValidationError("substeps_per_interval must be at least 1");
    const std::size_t n = system.n_atoms();
    const std::size_t dim = std::size_t{1} << n;
    const auto grid = discretize_program(system.program());
    const auto& eint = system.interaction_table();
    const auto& wsum = system.weight_table();

    StateVector psi;
    psi.n_atoms = n;
    psi.amplitudes.assign(dim, 0.0);
    psi.amplitudes[0] = 1.0;

    std::vector<std::complex<double>> half_phase(dim);
    for (std::size_t k = 0; k + 1 < grid.size(); ++k) {
        const DriveSample& a = grid[k];
        const DriveSample& b = grid[k + 1];
        const double dt = (b.t - a.t) / static_cast<double>(substeps_per_interval);
        for (int q = 0; q < substeps_per_interval; ++q) {
            const double frac = (static_cast<double>(q) + 0.5) /
                                static_cast<double>(substeps_per_interval);
            const double om = a.omega + frac * (b.omega - a.omega);
            const double ph = a.phase + frac * (b.phase - a.phase);
            const double dg = a.delta_g + frac * (b.delta_g - a.delta_g);
            const double dl = a.delta_l + frac * (b.delta_l - a.delta_l);

            for (std::uint64_t s = 0; s < dim; ++s) {
                const double ang =
                    (-dg * std::popcount(s) - dl * wsum[s] + eint[s]) * (0.5 * dt);
                half_phase[s] = std::polar(1.0, -ang);
            }
            for (std::uint64_t s = 0; s < dim; ++s) psi.amplitudes[s] *= half_phase[s];

            const double theta = 0.5 * om * dt;
            if (theta != 0.0) {
                const double c = std::cos(theta);
                const std::complex<double> ms_up =
                    std::complex<double>(0.0, -std::sin(theta)) * std::polar(1.0, ph);
                const std::complex<double> ms_down =
                    std::complex<double>(0.0, -std::sin(theta)) * std::polar(1.0, -ph);
                for (std::size_t i = 0; i < n; ++i) {
                    const std::uint64_t bit = std::uint64_t{1} << i;
                    for (std::uint64_t s0 = 0; s0 < dim; ++s0) {
                        if (s0 & bit) continue;
                        const std::uint64_t s1 = s0 | bit;
                        const std::complex<double> g = psi.amplitudes[s0];
                        const std::complex<double> r = psi.amplitudes[s1];
                        psi.amplitudes[s0] = c * g + ms_up * r;
                        psi.amplitudes[s1] = ms_down * g + c * r;
                    }
                }
            }
            for (std::uint64_t s = 0; s < dim; ++s) psi.amplitudes[s] *= half_phase[s];
        }
    }

    if (std::abs(psi.norm() - 1.0) > 1e-6)
        throw NumericalError("state norm drifted beyond 1e-6 during evolution");
    return psi;
}

/// Projective measurement: multinomial draw over |amplitude|^2, deterministic
/// for a fixed seed.
inline SampleEnsemble sample(const StateVector& psi, long long shots, std::uint64_t seed) {
    if (shots <= 0) throw ValidationError("shots must be positive");
    const std::size_t dim = psi.amplitudes.size();
    std::vector<double> cdf(dim);
    double acc = 0.0;
    for (std::size_t s = 0; s < dim; ++s) {
        acc += std::norm(psi.amplitudes[s]);
        cdf[s] = acc;
    }
    if (!(acc > 0.0)) throw ValidationError("cannot sample the zero state");

    SampleEnsemble ensemble;
    ensemble.n_atoms = psi.n_atoms;
    ensemble.shots = shots;
    ensemble.seed = seed;
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> uniform(0.0, acc);
    for (long long shot = 0; shot < shots; ++shot) {
        const double u = uniform(rng);
        const auto it = std::upper_bound(cdf.begin(), cdf.end(), u);
        const auto idx = static_cast<std::uint64_t>(
            it == cdf.end() ? dim - 1 : static_cast<std::size_t>(it - cdf.begin()));
        ++ensemble.counts[idx];
    }
    return ensemble;
}

/// Exact diagonal energies of H(T) per basis state:
/// E(s) = -Delta_g(T) |s| - Delta_l(T) sum_{i in s} p_i + sum_{i<j in s} V_ij.
/// Under the default program Delta_g(T) = 0 and Delta_l(T) is the peak, so
/// this is the physics-side ground truth the protocol anneals toward.
inline std::vector<double> final_diagonal_spectrum(const RydbergSystem& system) {
    const std::size_t dim = std::size_t{1} << system.n_atoms();
    const double t_final = system.program().total_time;
    const double dg = system.program().delta_global.value_at(t_final);
    const double dl = system.program().delta_local_envelope.value_at(t_final);
    const auto& eint = system.interaction_table();
    const auto& wsum = system.weight_table();
    std::vector<double> energies(dim);
    for (std::uint64_t s = 0; s < dim; ++s)
        energies[s] = -dg * std::popcount(s) - dl * wsum[s] + eint[s];
    return energies;
}

}  // namespace qfs
