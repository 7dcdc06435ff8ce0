#pragma once

#include <cmath>
#include <cstdint>
#include <stdexcept>
#include <utility>
#include <vector>

#include "bograph/model.hpp"

namespace bograph {

/// ln Gamma(x), x > 0.
inline double log_gamma(double x) {
    if (!(x > 0.0)) throw std::domain_error("log_gamma requires x > 0");
    return std::lgamma(x);
}

namespace detail {

// Stirling correction J(z) with ln Gamma(z) = (z-1/2) ln z - z + ln(2 pi)/2 + J(z).
inline double stirling_tail(double z) {
    const double z2 = z * z;
    return (1.0 / 12.0 - (1.0 / 360.0 - (1.0 / 1260.0 - (1.0 / 1680.0 - 1.0 / (1188.0 * z2)) / z2) / z2) / z2) / z;
}

// ln Gamma(y + x) - ln Gamma(y) for y >= 50, x >= 0, without forming the two
// large lgamma values (their difference cancels to a handful of digits).
inline double log_gamma_diff(double y, double x) {
    return (y - 0.5) * std::log1p(x / y) + x * std::log(y + x) - x +
           (stirling_tail(y + x) - stirling_tail(y));
}

} // namespace detail

/// ln Beta(x, y), x,y > 0. The smaller argument is routed through a stable
/// log-Gamma difference when the larger one is big; the naive three-term
/// form loses ~6 digits at (0.25, 1e6).
inline double log_beta(double x, double y) {
    if (!(x > 0.0) || !(y > 0.0)) throw std::domain_error("log_beta requires x, y > 0");
    if (x > y) std::swap(x, y);
    if (y < 50.0) return std::lgamma(x) + std::lgamma(y) - std::lgamma(x + y);
    return std::lgamma(x) - detail::log_gamma_diff(y, x);
}

/// Constants of the degree law.
///   amplitude: A = Gamma(a+2)/Beta(ka, a+1) = (a+1) Gamma(ka+a+1)/Gamma(ka);
///              the degree coefficient behaves like A d^(-2-a).
///   theta_lo/theta_hi: range of the edge-coefficient correction factor;
///              theta_hi is the constant a Gamma(ka+1)Gamma(2ka+a+3) /
///              (Gamma(2ka+2)Gamma(ka+a+2)).
struct ModelCoefficients {
    double amplitude = 0;
    double theta_lo = 0;
    double theta_hi = 0;

    static ModelCoefficients from(const ModelParams& p) {
        p.validate();
        const double a = p.a;
        const double ka = double(p.k) * a;
        ModelCoefficients c;
        c.amplitude = std::exp(std::lgamma(a + 2.0) - log_beta(ka, a + 1.0));
        c.theta_lo = -4.0 + 2.0 / (1.0 + ka);
        c.theta_hi = a * std::exp(std::lgamma(ka + 1.0) + std::lgamma(2.0 * ka + a + 3.0) -
                                  std::lgamma(2.0 * ka + 2.0) - std::lgamma(ka + a + 2.0));
        return c;
    }
};

/// Degree coefficient c(d) = Beta(d-k+ka, a+2) / Beta(ka, a+1) for d >= k,
/// 0 below k. Strictly decreasing on d >= k, always < 1. The expected count
/// of degree-d nodes at time t is c(d)*t up to an O(1/d) term.
inline double degree_coeff(std::int64_t d, const ModelParams& p) {
    if (d < std::int64_t(p.k)) return 0.0;
    const double ka = double(p.k) * p.a;
    const double D = double(d - std::int64_t(p.k)) + ka;
    return std::exp(log_beta(D, p.a + 2.0) - log_beta(ka, p.a + 1.0));
}

/// Large-d form of the degree coefficient: A d^(-2-a). The relative gap to
/// degree_coeff is O(1/d).
inline double degree_coeff_asymptotic(std::int64_t d, const ModelParams& p) {
    const double A = ModelCoefficients::from(p).amplitude;
    return A * std::pow(double(d), -2.0 - p.a);
}

/// Main term of E R(d,t): c(d)*t.
inline double expected_degree_count_main(std::int64_t d, std::uint64_t t,
                                         const ModelParams& p) {
    return degree_coeff(d, p) * double(t);
}

/// Half-width of the concentration interval around c(d)*t:
/// (sqrt(d^(-a-2) t) + 1/d) * psi. R(d,t) leaves the interval with
/// probability tending to zero whenever psi(t) grows.
inline double concentration_window(std::int64_t d, std::uint64_t t, double psi,
                                   const ModelParams& p) {
    const double dd = double(d);
    return (std::sqrt(std::pow(dd, -p.a - 2.0) * double(t)) + 1.0 / dd) * psi;
}

/// Covariance envelope scale * ((d1^(-2-a) + d2^(-2-a)) t + 1/(d1 d2)).
/// The scale is caller-chosen; only the shape is fixed.
inline double covariance_bound(std::int64_t d1, std::int64_t d2, std::uint64_t t,
                               const ModelParams& p, double scale) {
    const double e = -2.0 - p.a;
    return scale * ((std::pow(double(d1), e) + std::pow(double(d2), e)) * double(t) +
                    1.0 / (double(d1) * double(d2)));
}

/// Two-sided tail bound 2 exp(-c^2/8) for the edge-count deviation
/// |X - EX| >= c (d1+d2) sqrt(kt).
inline double azuma_tail_bound(double c) {
    if (!(c > 0.0)) throw std::domain_error("azuma_tail_bound requires c > 0");
    return 2.0 * std::exp(-c * c / 8.0);
}

/// Envelope kernels for the edge coefficient, with D_i = d_i - k + ka:
///   main = G(D1)G(D2)G(D1+D2+3) / (G(D1+2)G(D2+2)G(D1+D2+a+2))
///   corr = G(D1)G(D2)G(D1+D2+1) / (G(D1+1)G(D2+1)G(D1+D2+a+2))
/// Both are symmetric and satisfy the same interior recurrence as the edge
/// coefficient itself.
struct EnvelopeKernels {
    double main = 0;
    double corr = 0;
};

inline EnvelopeKernels edge_coeff_envelope(std::int64_t d1, std::int64_t d2,
                                           const ModelParams& p) {
    if (d1 < std::int64_t(p.k) || d2 < std::int64_t(p.k))
        throw std::domain_error("degrees below k");
    const double ka = double(p.k) * p.a;
    const double D1 = double(d1 - std::int64_t(p.k)) + ka;
    const double D2 = double(d2 - std::int64_t(p.k)) + ka;
    const double lg_d1 = std::lgamma(D1);
    const double lg_d2 = std::lgamma(D2);
    const double lg_tail = std::lgamma(D1 + D2 + p.a + 2.0);
    EnvelopeKernels e;
    e.main = std::exp(lg_d1 + lg_d2 + std::lgamma(D1 + D2 + 3.0) -
                      std::lgamma(D1 + 2.0) - std::lgamma(D2 + 2.0) - lg_tail);
    e.corr = std::exp(lg_d1 + lg_d2 + std::lgamma(D1 + D2 + 1.0) -
                      std::lgamma(D1 + 1.0) - std::lgamma(D2 + 1.0) - lg_tail);
    return e;
}

/// Sandwich bounds on the edge coefficient:
///   A k a (main + theta_lo * corr) <= c_X <= A k a (main + theta_hi * corr),
/// equality on the left at (k,k) only.
inline std::pair<double, double> edge_coeff_bounds(std::int64_t d1, std::int64_t d2,
                                                   const ModelParams& p) {
    const auto coeffs = ModelCoefficients::from(p);
    const auto env = edge_coeff_envelope(d1, d2, p);
    const double aka = coeffs.amplitude * double(p.k) * p.a;
    return {aka * (env.main + coeffs.theta_lo * env.corr),
            aka * (env.main + coeffs.theta_hi * env.corr)};
}

/// Large-degree form of the edge coefficient: A k a (d1+d2)^(1-a) / (d1^2 d2^2).
/// Gives the right order everywhere; the constant is only attained when one
/// degree dominates the other.
inline double edge_coeff_asymptotic(std::int64_t d1, std::int64_t d2,
                                    const ModelParams& p) {
    const double A = ModelCoefficients::from(p).amplitude;
    return A * double(p.k) * p.a * std::pow(double(d1 + d2), 1.0 - p.a) /
           (double(d1) * double(d1) * double(d2) * double(d2));
}

/// Edge coefficient c_X(d1,d2) on the grid [k, d_max]^2, filled once by the
/// defining recurrence (with D_i = d_i - k + ka):
///   c_X(k,k) = 0
///   c_X(d1,k) = (D1-1)(c_X(d1-1,k) + c(d1-1)) / (D1 + ka + a + 1)
///   c_X(d1,d2) = ((D1-1) c_X(d1-1,d2) + (D2-1) c_X(d1,d2-1)) / (D1 + D2 + a + 1)
/// Cells are evaluated in diagonal order (fixed d1+d2); only the lower
/// triangle is computed and the table is mirrored, so symmetry is exact.
class EdgeCoeffTable {
public:
    static constexpr std::uint32_t default_axis_cap = 4096;

    EdgeCoeffTable(const ModelParams& p, std::uint32_t d_max,
                   std::uint32_t axis_cap = default_axis_cap)
        : params_(p), d_max_(d_max) {
        p.validate();
        if (d_max < p.k) throw std::invalid_argument("d_max must be >= k");
        const std::uint64_t width = std::uint64_t(d_max) - p.k + 1;
        if (width > axis_cap)
            throw resource_error("edge-coefficient grid exceeds the axis cap");
        width_ = std::size_t(width);
        cells_.assign(width_ * width_, 0.0);

        const double a = p.a;
        const double ka = double(p.k) * a;
        std::vector<double> c(width_); // c[j] = degree_coeff(k + j)
        for (std::size_t j = 0; j < width_; ++j)
            c[j] = degree_coeff(std::int64_t(p.k) + std::int64_t(j), p);

        // Diagonal sweep; j_i = d_i - k, D_i = j_i + ka.
        for (std::size_t s = 1; s <= 2 * (width_ - 1); ++s) {
            const std::size_t j1_lo = s >= width_ ? s - (width_ - 1) : 0;
            for (std::size_t j1 = j1_lo; 2 * j1 <= s; ++j1) {
                const std::size_t j2 = s - j1;
                const double D1 = double(j1) + ka;
                const double D2 = double(j2) + ka;
                double value;
                if (j1 == 0) {
                    value = (D2 - 1.0) * (at_idx(0, j2 - 1) + c[j2 - 1]) /
                            (D2 + ka + a + 1.0);
                } else {
                    value = ((D1 - 1.0) * at_idx(j1 - 1, j2) +
                             (D2 - 1.0) * at_idx(j1, j2 - 1)) /
                            (D1 + D2 + a + 1.0);
                }
                cells_[j1 * width_ + j2] = value;
                cells_[j2 * width_ + j1] = value;
            }
        }
    }

    double at(std::int64_t d1, std::int64_t d2) const {
        if (d1 < std::int64_t(params_.k) || d2 < std::int64_t(params_.k))
            throw std::domain_error("degrees below k");
        if (d1 > std::int64_t(d_max_) || d2 > std::int64_t(d_max_))
            throw std::out_of_range("degree beyond table range");
        return at_idx(std::size_t(d1 - params_.k), std::size_t(d2 - params_.k));
    }

    std::uint32_t d_max() const { return d_max_; }
    const ModelParams& params() const { return params_; }

private:
    double at_idx(std::size_t j1, std::size_t j2) const {
        return cells_[j1 * width_ + j2];
    }

    ModelParams params_;
    std::uint32_t d_max_;
    std::size_t width_ = 0;
    std::vector<double> cells_;
};

} // namespace bograph
