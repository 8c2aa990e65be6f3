#pragma once

namespace garchint {

// Per-step Poisson means of the up and down counts (intensity times dt).
struct SkellamParams {
    double lambda_plus;
    double lambda_minus;

    void validate() const;
};

// Modified Bessel function of the first kind, integer order.
// Throws std::overflow_error when the value is not representable as a double;
// use log_bessel_i for large arguments.
double bessel_i(int order, double x);

// log I_order(x). Finite for every finite x > 0; -inf for x == 0, order > 0.
double log_bessel_i(int order, double x);

// log(exp(-x) I_order(x)), the exponentially scaled form.
double log_bessel_i_scaled(int order, double x);

double skellam_pmf(long m, const SkellamParams& p);

// Computed entirely in log space; safe for means in the thousands.
double skellam_log_pmf(long m, const SkellamParams& p);

}  // namespace garchint
