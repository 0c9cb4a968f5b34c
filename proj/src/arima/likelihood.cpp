#include <cmath>
#include <numbers>

#include "retail/arima/arima.hpp"

namespace retail::arima {

namespace {

// Small dense helpers for the r x r state matrices (r <= kMaxOrder + 1).
using Mat = std::vector<double>;

Mat multiply(const Mat& a, const Mat& b, std::size_t r) {
    Mat out(r * r, 0.0);
    for (std::size_t i = 0; i < r; ++i) {
        for (std::size_t k = 0; k < r; ++k) {
            const double aik = a[i * r + k];
            if (aik == 0.0) {
                continue;
            }
            for (std::size_t j = 0; j < r; ++j) {
                out[i * r + j] += aik * b[k * r + j];
            }
        }
    }
    return out;
}

// a * p * a'
Mat sandwich(const Mat& a, const Mat& p, std::size_t r) {
    const Mat ap = multiply(a, p, r);
    Mat out(r * r, 0.0);
    for (std::size_t i = 0; i < r; ++i) {
        for (std::size_t j = 0; j < r; ++j) {
            double s = 0.0;
            for (std::size_t k = 0; k < r; ++k) {
                s += ap[i * r + k] * a[j * r + k];
            }
            out[i * r + j] = s;
        }
    }
    return out;
}

}  // namespace

std::optional<double> exact_loglik(std::span<const double> z, double c, std::span<const double> phi,
                                   std::span<const double> theta) {
    if (z.empty() || !roots_outside_unit_circle(phi)) {
        return std::nullopt;
    }
    const std::size_t p = phi.size();
    const std::size_t q = theta.size();
    const std::size_t r = std::max(p, q + 1);
    double phi_sum = 0.0;
    for (double f : phi) {
        phi_sum += f;
    }
    const double mean = c / (1.0 - phi_sum);

    // State space form: z_t - mean = first state; a_{t+1} = T a_t + R e_{t+1}.
    Mat transition(r * r, 0.0);
    std::vector<double> loading(r, 0.0);
    for (std::size_t i = 0; i < r; ++i) {
        if (i < p) {
            transition[i * r] = phi[i];
        }
        if (i + 1 < r) {
            transition[i * r + i + 1] = 1.0;
        }
        loading[i] = i == 0 ? 1.0 : (i - 1 < q ? theta[i - 1] : 0.0);
    }
    Mat noise(r * r);
    for (std::size_t i = 0; i < r; ++i) {
        for (std::size_t j = 0; j < r; ++j) {
            noise[i * r + j] = loading[i] * loading[j];
        }
    }

    // Stationary state covariance P = sum_k T^k RR' T^k' by doubling: P += A P A', A = A^2.
    Mat cov = noise;
    Mat power = transition;
    for (int iter = 0; iter < 64; ++iter) {
        const Mat add = sandwich(power, cov, r);
        double largest = 0.0;
        for (std::size_t i = 0; i < r * r; ++i) {
            cov[i] += add[i];
            largest = std::max(largest, std::abs(add[i]));
        }
        if (!std::isfinite(cov[0])) {
            return std::nullopt;
        }
        if (largest <= 1e-15 * std::abs(cov[0])) {
            break;
        }
        power = multiply(power, power, r);
    }

    // Kalman filter with unit innovation variance; the variance is profiled out at the end.
    std::vector<double> state(r, 0.0);
    std::vector<double> next(r);
    std::vector<double> gain(r);
    double weighted_ssq = 0.0;
    double log_det = 0.0;
    for (double obs : z) {
        const double f = cov[0];
        if (!(f > 0.0) || !std::isfinite(f)) {
            return std::nullopt;
        }
        const double v = obs - mean - state[0];
        weighted_ssq += v * v / f;
        log_det += std::log(f);
        for (std::size_t i = 0; i < r; ++i) {
            double tp = 0.0;
            double ta = 0.0;
            for (std::size_t k = 0; k < r; ++k) {
                tp += transition[i * r + k] * cov[k * r];
                ta += transition[i * r + k] * state[k];
            }
            gain[i] = tp;
            next[i] = ta + tp / f * v;
        }
        state.swap(next);
        Mat updated = sandwich(transition, cov, r);
        for (std::size_t i = 0; i < r; ++i) {
            for (std::size_t j = 0; j < r; ++j) {
                updated[i * r + j] += noise[i * r + j] - gain[i] * gain[j] / f;
            }
        }
        cov = std::move(updated);
    }
    const double n = static_cast<double>(z.size());
    const double sigma2 = std::max(weighted_ssq / n, 1e-12);
    return -0.5 * n * (std::log(2.0 * std::numbers::pi * sigma2) + 1.0) - 0.5 * log_det;
}

}  // namespace retail::arima
