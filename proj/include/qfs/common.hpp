#pragma once

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <stdexcept>
#include <string>
#include <vector>

namespace qfs {

// ---- error taxonomy --------------------------------------------------------
// Each class maps to one CLI exit code, so throw the most specific one.

/// Base class for all library errors.
struct Error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// Bad or inconsistent configuration (unknown keys, out-of-range options).
struct ConfigError : Error {
    using Error::Error;
};

/// A pipeline stage needs an artifact that has not been produced yet.
struct MissingArtifactError : Error {
    using Error::Error;
};

/// Input data or intermediate state violates a documented precondition.
struct ValidationError : Error {
    using Error::Error;
};

/// Numerical failure (non-finite values, convergence breakdown).
struct NumericalError : Error {
    using Error::Error;
};

/// Dense square matrix of doubles, row-major. Used for redundancy,
/// distance, interaction and error matrices (all small: n <= 20 features).
class SquareMatrix {
  public:
    SquareMatrix() = default;
    explicit SquareMatrix(std::size_t n, double fill = 0.0) : n_(n), v_(n * n, fill) {}

    std::size_t size() const { return n_; }
    double& operator()(std::size_t i, std::size_t j) { return v_[i * n_ + j]; }
    double operator()(std::size_t i, std::size_t j) const { return v_[i * n_ + j]; }

    void set_symmetric(std::size_t i, std::size_t j, double value) {
        v_[i * n_ + j] = value;
        v_[j * n_ + i] = value;
    }

    const std::vector<double>& data() const { return v_; }
    std::vector<double>& data() { return v_; }

    /// Row-major lower triangle including the diagonal, length n(n+1)/2.
    std::vector<double> lower_triangle() const {
        std::vector<double> out;
        out.reserve(n_ * (n_ + 1) / 2);
        for (std::size_t i = 0; i < n_; ++i)
            for (std::size_t j = 0; j <= i; ++j) out.push_back(v_[i * n_ + j]);
        return out;
    }

    static SquareMatrix from_lower_triangle(const std::vector<double>& tri) {
        std::size_t n = 0;
        while (n * (n + 1) / 2 < tri.size()) ++n;
        if (n * (n + 1) / 2 != tri.size())
            throw std::invalid_argument("lower triangle has invalid length");
        SquareMatrix m(n);
        std::size_t k = 0;
        for (std::size_t i = 0; i < n; ++i)
            for (std::size_t j = 0; j <= i; ++j, ++k) m.set_symmetric(i, j, tri[k]);
        return m;
    }

  private:
    std::size_t n_ = 0;
    std::vector<double> v_;
};

// ---- bitstring helpers ----------------------------------------------------
// Convention used throughout: atom i == feature i == bit i of the basis
// index (atom 0 is the least significant bit). Rendered strings list atom 0
// first, so index 1 with 3 atoms prints as "100".

inline bool bit_get(std::uint64_t mask, std::size_t i) { return (mask >> i) & 1u; }

inline std::string bitstring_to_string(std::uint64_t mask, std::size_t n_bits) {
    std::string s(n_bits, '0');
    for (std::size_t i = 0; i < n_bits; ++i)
        if (bit_get(mask, i)) s[i] = '1';
    return s;
}

inline std::uint64_t bitstring_from_string(const std::string& s) {
    std::uint64_t mask = 0;
    for (std::size_t i = 0; i < s.size(); ++i) {
        if (s[i] == '1')
            mask |= (std::uint64_t{1} << i);
        else if (s[i] != '0')
            throw std::invalid_argument("bitstring must contain only 0/1: " + s);
    }
    return mask;
}

/// Energies of every subset under E(S) = sum_{i in S} linear[i]
///                                     + sum_{i<j in S} quadratic(i,j),
/// indexed by bitmask. Built incrementally over the lowest set bit.
inline std::vector<double> subset_energy_table(const std::vector<double>& linear,
                                               const SquareMatrix& quadratic) {
    const std::size_t n = linear.size();
    if (quadratic.size() != n) throw std::invalid_argument("linear/quadratic size mismatch");
    if (n > 25) throw std::invalid_argument("subset enumeration capped at 25 items");
    std::vector<double> table(std::size_t{1} << n, 0.0);
    for (std::uint64_t s = 1; s < table.size(); ++s) {
        const int i = std::countr_zero(s);
        const std::uint64_t rest = s & (s - 1);
        double e = table[rest] + linear[static_cast<std::size_t>(i)];
        for (std::uint64_t r = rest; r != 0; r &= r - 1) {
            const int j = std::countr_zero(r);
            e += quadratic(static_cast<std::size_t>(i), static_cast<std::size_t>(j));
        }
        table[s] = e;
    }
    return table;
}

// ---- small numeric helpers ------------------------------------------------

inline double mean(const std::vector<double>& xs) {
    if (xs.empty()) throw std::invalid_argument("mean of empty vector");
    double s = 0.0;
    for (double x : xs) s += x;
    return s / static_cast<double>(xs.size());
}

inline double median(std::vector<double> xs) {
    if (xs.empty()) throw std::invalid_argument("median of empty vector");
    std::sort(xs.begin(), xs.end());
    const std::size_t n = xs.size();
    return n % 2 == 1 ? xs[n / 2] : 0.5 * (xs[n / 2 - 1] + xs[n / 2]);
}

/// Shortest decimal form that round-trips a double; used for CSV output.
/// Ties between representations go to the lower precision ("10" over "1e+01").
inline std::string format_double(double x) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%.17g", x);
    std::string best = buf;
    if (std::strtod(buf, nullptr) == x) {
        for (int prec = 1; prec < 17; ++prec) {
            char shorter[32];
            std::snprintf(shorter, sizeof(shorter), "%.*g", prec, x);
            if (std::strtod(shorter, nullptr) == x &&
                std::char_traits<char>::length(shorter) < best.size())
                best = shorter;
        }
    }
    return best;
}

}  // namespace qfs
