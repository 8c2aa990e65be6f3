#include "garchint/skellam.hpp"

#include "garchint/errors.hpp"

#include <cmath>
#include <limits>
#include <numbers>
#include <stdexcept>
#include <string>

namespace garchint {

namespace {

constexpr double kSeriesCutoff = 30.0;
constexpr int kMaxIterations = 1'000'000;

void check_bessel_args(int order, double x) {
    if (order < 0) {
        throw std::domain_error("bessel_i: order must be nonnegative, got " + std::to_string(order));
    }
    if (!(x >= 0.0) || !std::isfinite(x)) {
        throw std::domain_error("bessel_i: argument must be finite and nonnegative");
    }
}

// log I_n(x) from the defining power series. All terms are positive, so the
// sum carries only rounding error; callers restrict it to arguments where the
// partial sums stay well inside double range.
double log_bessel_series(int n, double x) {
    const double q = 0.25 * x * x;
    double term = 1.0;
    double sum = 1.0;
    for (int k = 1; k < kMaxIterations; ++k) {
        term *= q / (static_cast<double>(k) * static_cast<double>(k + n));
        sum += term;
        if (term < 1e-17 * sum) {
            break;
        }
    }
    return n * std::log(0.5 * x) - std::lgamma(n + 1.0) + std::log(sum);
}

// log(exp(-x) I_0(x)) from the large-argument expansion; x > 30 keeps the
// smallest term far below double epsilon.
double log_i0_scaled_asymptotic(double x) {
    double term = 1.0;
    double sum = 1.0;
    for (int k = 1; k < 200; ++k) {
        const double next = term * (2.0 * k - 1.0) * (2.0 * k - 1.0) / (8.0 * k * x);
        if (next >= term) {
            break;
        }
        term = next;
        sum += term;
        if (term < 1e-17 * sum) {
            break;
        }
    }
    return std::log(sum) - 0.5 * std::log(2.0 * std::numbers::pi * x);
}

// I_n(x) / I_{n-1}(x) by modified Lentz evaluation of the continued fraction
// 1 / (2n/x + 1 / (2(n+1)/x + ...)).
double bessel_ratio_cf(int n, double x) {
    constexpr double tiny = 1e-300;
    double f = 2.0 * n / x;
    if (f == 0.0) {
        f = tiny;
    }
    double c = f;
    double d = 0.0;
    for (int j = 1; j < kMaxIterations; ++j) {
        const double b = 2.0 * (n + j) / x;
        d = b + d;
        if (d == 0.0) {
            d = tiny;
        }
        c = b + 1.0 / c;
        if (c == 0.0) {
            c = tiny;
        }
        d = 1.0 / d;
        const double delta = c * d;
        f *= delta;
        if (std::abs(delta - 1.0) < 1e-16) {
            return 1.0 / f;
        }
    }
    throw std::runtime_error("bessel_i: continued fraction did not converge");
}

}  // namespace

void SkellamParams::validate() const {
    if (!(lambda_plus > 0.0) || !std::isfinite(lambda_plus)) {
        throw PreconditionError("SkellamParams.lambda_plus must be finite and > 0");
    }
    if (!(lambda_minus > 0.0) || !std::isfinite(lambda_minus)) {
        throw PreconditionError("SkellamParams.lambda_minus must be finite and > 0");
    }
}

double log_bessel_i_scaled(int order, double x) {
    check_bessel_args(order, x);
    if (x == 0.0) {
        return order == 0 ? 0.0 : -std::numeric_limits<double>::infinity();
    }
    if (x <= kSeriesCutoff || 0.25 * x * x < 0.5 * (order + 1.0)) {
        return log_bessel_series(order, x) - x;
    }
    double log_value = log_i0_scaled_asymptotic(x);
    if (order == 0) {
        return log_value;
    }
    // Downward recurrence on ratios r_k = I_{k+1}/I_k is stable for I.
    double r = bessel_ratio_cf(order, x);
    log_value += std::log(r);
    for (int k = order - 1; k >= 1; --k) {
        r = 1.0 / (2.0 * k / x + r);
        log_value += std::log(r);
    }
    return log_value;
}

double log_bessel_i(int order, double x) {
    const double scaled = log_bessel_i_scaled(order, x);
    return scaled + x;
}

double bessel_i(int order, double x) {
    const double log_value = log_bessel_i(order, x);
    if (log_value > std::log(std::numeric_limits<double>::max())) {
        throw std::overflow_error("bessel_i: I_" + std::to_string(order) + "(" + std::to_string(x) +
                                  ") exceeds double range; use log_bessel_i");
    }
    return std::exp(log_value);
}

double skellam_log_pmf(long m, const SkellamParams& p) {
    p.validate();
    const double a = p.lambda_plus;
    const double b = p.lambda_minus;
    const double root_gap = std::sqrt(a) - std::sqrt(b);
    const double x = 2.0 * std::sqrt(a * b);
    const auto order = static_cast<int>(m < 0 ? -m : m);
    // -(a + b) + x == -(sqrt(a) - sqrt(b))^2, which avoids cancelling two large terms.
    return -root_gap * root_gap + 0.5 * static_cast<double>(m) * (std::log(a) - std::log(b)) +
           log_bessel_i_scaled(order, x);
}

double skellam_pmf(long m, const SkellamParams& p) {
    return std::exp(skellam_log_pmf(m, p));
}

}  // namespace garchint
