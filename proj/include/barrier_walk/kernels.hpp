#pragma once

// Drift-ratio kernels. Every coefficient of the arrival and time systems is a
// ratio of the polynomials below, so the rho = 1 limit is a plain evaluation
// rather than a special case.
//
//   g_m(rho) = sum_{k<m} rho^k                       = (1 - rho^m) / (1 - rho)
//   h_n(rho) = sum_{k<n} (k+1) rho^k                 = [1 + n rho^{n+1} - (n+1) rho^n] / (1-rho)^2
//   c_n(rho) = sum_{k<n} (n-k) rho^k = sum_j g_j     = [n - (n+1) rho + rho^{n+1}] / (1-rho)^2
//
// The *_ratio helpers divide by g_b and reflect rho -> 1/rho when rho^b would
// overflow, using g_m(rho) = rho^{m-1} g_m(1/rho).

#include <barrier_walk/error.hpp>

#include <algorithm>
#include <cassert>
#include <cmath>
#include <cstddef>
#include <span>
#include <string>
#include <vector>

namespace barrier_walk {

/// Drift ratio p/q of an edge.
class Rho {
public:
    explicit Rho(double value) : value_(value) {
        if (!(value > 0.0) || !std::isfinite(value)) {
            throw Error(ErrorCode::EdgeParam, "rho must be positive and finite");
        }
    }
    static Rho of(double p, double q) { return Rho(p / q); }

    double value() const noexcept { return value_; }
    operator double() const noexcept { return value_; }

private:
    double value_;
};

namespace kernel_detail {

inline constexpr double kNearOne = 1e-8;
inline constexpr long long kDirectSumLimit = 10'000;
inline constexpr double kOverflowLog = 600.0;

inline double horner_geom(long long m, double rho) {
    double sum = 0.0;
    for (long long k = 0; k < m; ++k) {
        sum = sum * rho + 1.0;
    }
    return sum;
}

// g_m(1 + eps) = sum_{j>=1} C(m, j) eps^{j-1}; used only when |m eps| <= 1.
inline double binomial_series(long long m, double eps) {
    double term = static_cast<double>(m);
    double sum = term;
    for (long long j = 1; j < m; ++j) {
        term *= eps * static_cast<double>(m - j) / static_cast<double>(j + 1);
        sum += term;
        if (std::abs(term) <= 1e-18 * std::abs(sum)) {
            break;
        }
    }
    return sum;
}

inline bool overflow_risk(long long m, double rho) {
    return rho > 1.0 && static_cast<double>(m) * std::log(rho) > kOverflowLog;
}

} // namespace kernel_detail

/// g_m(rho) = 1 + rho + ... + rho^{m-1}. Exact value m at rho = 1.
inline double geom_sum(long long m, double rho) {
    using namespace kernel_detail;
    assert(m >= 0);
    if (m == 0) {
        return 0.0;
    }
    if (rho == 1.0) {
        return static_cast<double>(m);
    }
    const double eps = rho - 1.0;
    if (std::abs(eps) < kNearOne) {
        if (m < kDirectSumLimit) {
            return horner_geom(m, rho);
        }
        if (std::abs(static_cast<double>(m) * eps) <= 1.0) {
            return binomial_series(m, eps);
        }
        return std::expm1(static_cast<double>(m) * std::log1p(eps)) / eps;
    }
    if (rho > 0.5 && rho < 2.0) {
        return std::expm1(static_cast<double>(m) * std::log1p(eps)) / eps;
    }
    return (std::pow(rho, static_cast<double>(m)) - 1.0) / eps;
}

/// h_n(rho) = sum_{k=0}^{n} rho^k g_{n-k}(rho); n(n+1)/2 at rho = 1.
inline double weighted_geom(long long n, double rho) {
    assert(n >= 0);
    if (n == 0) {
        return 0.0;
    }
    if (n <= 64 || std::abs(rho - 1.0) < 0.05) {
        double sum = 0.0;
        for (long long k = n - 1; k >= 0; --k) {
            sum = sum * rho + static_cast<double>(k + 1);
        }
        return sum;
    }
    return (geom_sum(n + 1, rho) - static_cast<double>(n + 1) * std::pow(rho, static_cast<double>(n))) /
           (1.0 - rho);
}

/// c_n(rho) = sum_{j=1}^{n} g_j(rho); n(n+1)/2 at rho = 1.
inline double cumulative_geom(long long n, double rho) {
    assert(n >= 0);
    if (n == 0) {
        return 0.0;
    }
    if (n <= 64 || std::abs(rho - 1.0) < 0.05) {
        double sum = 0.0;
        for (long long k = n - 1; k >= 0; --k) {
            sum = sum * rho + static_cast<double>(n - k);
        }
        return sum;
    }
    return (static_cast<double>(n) - rho * geom_sum(n, rho)) / (1.0 - rho);
}

/// g_a(rho) / g_b(rho), b >= 1.
inline double geom_ratio(long long a, long long b, double rho) {
    assert(b >= 1 && a >= 0);
    if (kernel_detail::overflow_risk(std::max(a, b), rho)) {
        const double inv = 1.0 / rho;
        return std::pow(rho, static_cast<double>(a - b)) * geom_sum(a, inv) / geom_sum(b, inv);
    }
    return geom_sum(a, rho) / geom_sum(b, rho);
}

/// rho^e / g_b(rho), 0 <= e < b.
inline double power_ratio(long long e, long long b, double rho) {
    assert(b >= 1 && e >= 0 && e < b);
    if (kernel_detail::overflow_risk(b, rho)) {
        return std::pow(rho, static_cast<double>(e - b + 1)) / geom_sum(b, 1.0 / rho);
    }
    return std::pow(rho, static_cast<double>(e)) / geom_sum(b, rho);
}

/// h_n(rho) / g_{n+1}(rho).
inline double weighted_ratio(long long n, double rho) {
    if (kernel_detail::overflow_risk(n + 1, rho)) {
        const double inv = 1.0 / rho;
        return cumulative_geom(n, inv) / (rho * geom_sum(n + 1, inv));
    }
    return weighted_geom(n, rho) / geom_sum(n + 1, rho);
}

/// c_n(rho) / g_{n+1}(rho).
inline double cumulative_ratio(long long n, double rho) {
    if (kernel_detail::overflow_risk(n + 1, rho)) {
        const double inv = 1.0 / rho;
        return weighted_geom(n, inv) / (rho * geom_sum(n + 1, inv));
    }
    return cumulative_geom(n, rho) / geom_sum(n + 1, rho);
}

/// Probability that a p/q walk started at k in 0..n+1 reaches n+1 before 0:
/// rho^{n+1-k} g_k(rho) / g_{n+1}(rho) = g_k(1/rho) / g_{n+1}(1/rho).
inline double hit_upper(long long k, long long n, double rho) {
    return geom_ratio(k, n + 1, 1.0 / rho);
}

/// Expected number of steps (stays included) for a walk started at k in
/// 0..n+1 to reach 0 or n+1, with backward step probability q.
inline double exit_time(long long k, long long n, double rho, double q) {
    const long long m = n + 1 - k;
    if (k == 0 || m == 0) {
        return 0.0;
    }
    if (std::abs(rho - 1.0) < 1e-3) {
        // [m rho^m g_k - k g_m] / (rho - 1) as sum_e c_e g_e(rho) over the
        // polynomial's coefficients, which sum to zero.
        double g = 0.0;
        double lower = 0.0;
        double upper = 0.0;
        for (long long j = 0; j < n + 1; ++j) {
            if (j < m) {
                lower += g;
            }
            if (j >= m) {
                upper += g;
            }
            g = 1.0 + rho * g;
        }
        const double numer = static_cast<double>(m) * upper - static_cast<double>(k) * lower;
        return numer / (q * geom_sum(n + 1, rho));
    }
    const double hit = hit_upper(k, n, rho);
    return (static_cast<double>(n + 1) * hit - static_cast<double>(k)) / (q * (rho - 1.0));
}

/// Square system A x = b, A stored row-major.
struct DenseSystem {
    std::size_t size = 0;
    std::vector<double> matrix;
    std::vector<double> rhs;

    explicit DenseSystem(std::size_t n = 0) : size(n), matrix(n * n, 0.0), rhs(n, 0.0) {}

    double& at(std::size_t row, std::size_t col) { return matrix[row * size + col]; }
    double at(std::size_t row, std::size_t col) const { return matrix[row * size + col]; }
};

/// max_i |(A x - b)_i|
inline double residual_inf(const DenseSystem& system, std::span<const double> x) {
    double worst = 0.0;
    for (std::size_t i = 0; i < system.size; ++i) {
        double row = -system.rhs[i];
        for (std::size_t j = 0; j < system.size; ++j) {
            row += system.at(i, j) * x[j];
        }
        worst = std::max(worst, std::abs(row));
    }
    return worst;
}

/// Gaussian elimination with scaled row pivoting. Throws SingularSystem when a
/// pivot falls below 1e-13 of its row's original scale.
inline std::vector<double> linear_solve(const DenseSystem& system) {
    const std::size_t n = system.size;
    if (system.matrix.size() != n * n || system.rhs.size() != n) {
        throw Error(ErrorCode::Structure, "dense system dimensions do not match");
    }
    std::vector<double> a = system.matrix;
    std::vector<double> b = system.rhs;
    std::vector<double> scale(n, 0.0);
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = 0; j < n; ++j) {
            scale[i] = std::max(scale[i], std::abs(a[i * n + j]));
        }
        if (scale[i] == 0.0) {
            throw Error(ErrorCode::SingularSystem, "row " + std::to_string(i) + " is identically zero");
        }
    }

    for (std::size_t col = 0; col < n; ++col) {
        std::size_t pivot = col;
        double best = -1.0;
        for (std::size_t row = col; row < n; ++row) {
            const double weight = std::abs(a[row * n + col]) / scale[row];
            if (weight > best) {
                best = weight;
                pivot = row;
            }
        }
        if (best < 1e-13) {
            throw Error(ErrorCode::SingularSystem,
                        "pivot in column " + std::to_string(col) + " vanishes; no absorption mechanism?");
        }
        if (pivot != col) {
            for (std::size_t j = 0; j < n; ++j) {
                std::swap(a[pivot * n + j], a[col * n + j]);
            }
            std::swap(b[pivot], b[col]);
            std::swap(scale[pivot], scale[col]);
        }
        const double diag = a[col * n + col];
        for (std::size_t row = col + 1; row < n; ++row) {
            const double factor = a[row * n + col] / diag;
            if (factor == 0.0) {
                continue;
            }
            a[row * n + col] = 0.0;
            for (std::size_t j = col + 1; j < n; ++j) {
                a[row * n + j] -= factor * a[col * n + j];
            }
            b[row] -= factor * b[col];
        }
    }

    std::vector<double> x(n, 0.0);
    for (std::size_t i = n; i-- > 0;) {
        double sum = b[i];
        for (std::size_t j = i + 1; j < n; ++j) {
            sum -= a[i * n + j] * x[j];
        }
        x[i] = sum / a[i * n + i];
    }
    return x;
}

} // namespace barrier_walk
