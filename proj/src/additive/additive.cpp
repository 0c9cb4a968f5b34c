#include "retail/additive/additive.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <numeric>

#include "retail/core/error.hpp"
#include "retail/core/linalg.hpp"
#include "retail/core/nelder_mead.hpp"

namespace retail::additive {

namespace {

constexpr int kDefaultChangepoints = 25;
constexpr double kChangepointRange = 0.8;
constexpr int kMaxSweeps = 5000;
constexpr double kSweepTolerance = 1e-8;
constexpr int kMaxOuter = 200;
// Residual variance floor on the normalized scale; reached only by (near) noiseless series.
constexpr double kSigma2Floor = 1e-12;

double soft_threshold(double z, double lambda) {
    if (z > lambda) {
        return z - lambda;
    }
    if (z < -lambda) {
        return z + lambda;
    }
    return 0.0;
}

// cos/sin arguments of a Fourier term at day t, reduced to one period first so that t and t + P
// produce the same phase.
double phase(double t, double period) {
    double x = std::fmod(t, period);
    if (x < 0.0) {
        x += period;
    }
    return 2.0 * std::numbers::pi * x / period;
}

double capacity_at(const AdditiveConfig& config, int first_day, double day) {
    const auto& cap = config.capacity;
    if (cap.size() == 1) {
        return cap[0];
    }
    const double offset = day - first_day;
    if (offset < 0.0 || offset >= static_cast<double>(cap.size())) {
        throw InvalidArgument("logistic capacity does not cover day " + std::to_string(day));
    }
    return cap[static_cast<std::size_t>(offset)];
}

void validate(const TimeSeries& series, const AdditiveConfig& config) {
    if (series.size() < 2) {
        throw InvalidArgument("additive model needs at least two observations");
    }
    if (!(config.tau > 0.0)) {
        throw InvalidArgument("changepoint prior scale tau must be positive");
    }
    double longest = 0.0;
    for (const auto& s : config.seasonalities) {
        if (!(s.period > 0.0) || s.order < 1 || !(s.prior_sd > 0.0)) {
            throw InvalidArgument("seasonality '" + s.name + "' needs period > 0, order >= 1, prior_sd > 0");
        }
        longest = std::max(longest, s.period);
    }
    if (static_cast<double>(series.size()) < 2.0 * longest) {
        throw InvalidArgument("series of length " + std::to_string(series.size()) +
                              " is shorter than twice the longest seasonal period");
    }
    for (const auto& h : config.holidays) {
        if (!(h.prior_sd > 0.0)) {
            throw InvalidArgument("holiday '" + h.name + "' needs prior_sd > 0");
        }
    }
    if (config.changepoints) {
        const auto& cps = *config.changepoints;
        for (std::size_t j = 0; j < cps.size(); ++j) {
            if (!(cps[j] > series.start_day() && cps[j] < series.end_day())) {
                throw InvalidArgument("changepoint " + std::to_string(cps[j]) + " outside the training window");
            }
            if (j > 0 && !(cps[j] > cps[j - 1])) {
                throw InvalidArgument("changepoints must be strictly ascending");
            }
        }
    }
    if (config.trend_type == TrendType::logistic) {
        if (config.capacity.empty()) {
            throw InvalidArgument("logistic trend needs a capacity");
        }
        if (config.capacity.size() != 1 && config.capacity.size() < series.size()) {
            throw InvalidArgument("logistic capacity shorter than the training window");
        }
        for (double c : config.capacity) {
            if (!(c > 0.0)) {
                throw DomainError("logistic capacity must be positive");
            }
        }
    }
}

std::vector<double> default_changepoints(const TimeSeries& series) {
    // Uniform over the first 80% of the window, skipping the first observation.
    const auto hist = static_cast<std::size_t>(std::floor(kChangepointRange * static_cast<double>(series.size())));
    if (hist < 2) {
        return {};
    }
    const std::size_t count = std::min<std::size_t>(kDefaultChangepoints, hist - 1);
    std::vector<double> cps;
    for (std::size_t j = 1; j <= count; ++j) {
        const double idx = std::round(static_cast<double>(j) * static_cast<double>(hist - 1) / static_cast<double>(count));
        const double day = series.start_day() + idx;
        if (cps.empty() || day > cps.back()) {
            cps.push_back(day);
        }
    }
    return cps;
}

enum class Penalty { none, lasso, ridge };

// Seasonal and holiday columns, row-major, with their ridge precisions (1 / prior_sd^2).
struct LinearBlock {
    std::size_t cols = 0;
    std::vector<double> x;
    std::vector<double> precision;
};

LinearBlock seasonal_holiday_block(const TimeSeries& series, const AdditiveConfig& config) {
    LinearBlock block;
    for (const auto& s : config.seasonalities) {
        for (int n = 0; n < 2 * s.order; ++n) {
            block.precision.push_back(1.0 / (s.prior_sd * s.prior_sd));
        }
    }
    for (const auto& h : config.holidays) {
        block.precision.push_back(1.0 / (h.prior_sd * h.prior_sd));
    }
    block.cols = block.precision.size();
    const std::size_t n = series.size();
    block.x.assign(n * block.cols, 0.0);
    std::vector<int> days(n);
    std::iota(days.begin(), days.end(), series.start_day());
    const auto z = holiday_matrix(days, config.holidays);
    for (std::size_t r = 0; r < n; ++r) {
        double* row = &block.x[r * block.cols];
        std::size_t c = 0;
        for (const auto& s : config.seasonalities) {
            const double base = phase(days[r], s.period);
            for (int k = 1; k <= s.order; ++k) {
                row[c++] = std::cos(k * base);
                row[c++] = std::sin(k * base);
            }
        }
        for (std::size_t i = 0; i < config.holidays.size(); ++i) {
            row[c++] = z[r][i];
        }
    }
    return block;
}

// min over beta of 1/2 ||y - X beta||^2 + l1 * sum_{lasso} |beta_j| + 1/2 sum_{ridge} l2_j beta_j^2,
// held as the Gram matrix so a coordinate sweep costs O(p^2) regardless of n.
struct PenalizedProblem {
    linalg::SquareMatrix gram;
    std::vector<double> xty;
    double yty = 0.0;
    std::vector<Penalty> penalty;
    std::vector<double> precision;  // ridge columns: 1 / prior_sd^2
    double inv_tau = 0.0;

    std::size_t size() const { return xty.size(); }

    double sse(const std::vector<double>& beta) const {
        double s = yty;
        for (std::size_t i = 0; i < size(); ++i) {
            double gb = 0.0;
            for (std::size_t j = 0; j < size(); ++j) {
                gb += gram(i, j) * beta[j];
            }
            s += beta[i] * (gb - 2.0 * xty[i]);
        }
        return std::max(s, 0.0);
    }

    double objective(const std::vector<double>& beta, double sigma2) const {
        double pen = 0.0;
        for (std::size_t j = 0; j < size(); ++j) {
            if (penalty[j] == Penalty::lasso) {
                pen += sigma2 * inv_tau * std::abs(beta[j]);
            } else if (penalty[j] == Penalty::ridge) {
                pen += 0.5 * sigma2 * precision[j] * beta[j] * beta[j];
            }
        }
        return 0.5 * sse(beta) + pen;
    }
};

// Exact solve on the current support and sign pattern; accepted only if it satisfies the
// optimality conditions and does not raise the objective.
bool polish(const PenalizedProblem& prob, double sigma2, std::vector<double>& beta) {
    const std::size_t p = prob.size();
    const double l1 = sigma2 * prob.inv_tau;
    std::vector<std::size_t> active;
    for (std::size_t j = 0; j < p; ++j) {
        if (prob.penalty[j] != Penalty::lasso || beta[j] != 0.0) {
            active.push_back(j);
        }
    }
    linalg::SquareMatrix a(active.size());
    std::vector<double> rhs(active.size());
    for (std::size_t i = 0; i < active.size(); ++i) {
        const std::size_t ci = active[i];
        for (std::size_t j = 0; j < active.size(); ++j) {
            a(i, j) = prob.gram(ci, active[j]);
        }
        rhs[i] = prob.xty[ci];
        if (prob.penalty[ci] == Penalty::ridge) {
            a(i, i) += sigma2 * prob.precision[ci];
        } else if (prob.penalty[ci] == Penalty::lasso) {
            rhs[i] -= l1 * (beta[ci] > 0.0 ? 1.0 : -1.0);
        }
    }
    std::vector<double> sol;
    try {
        sol = linalg::solve_spd(a, rhs, 1e-14);
    } catch (const DegenerateInput&) {
        return false;
    }
    std::vector<double> candidate(p, 0.0);
    for (std::size_t i = 0; i < active.size(); ++i) {
        const std::size_t ci = active[i];
        if (prob.penalty[ci] == Penalty::lasso && (sol[i] > 0.0) != (beta[ci] > 0.0)) {
            return false;
        }
        candidate[active[i]] = sol[i];
    }
    for (std::size_t j = 0; j < p; ++j) {
        if (prob.penalty[j] != Penalty::lasso || candidate[j] != 0.0) {
            continue;
        }
        double grad = prob.xty[j];
        for (std::size_t k = 0; k < p; ++k) {
            grad -= prob.gram(j, k) * candidate[k];
        }
        if (std::abs(grad) > l1 * (1.0 + 1e-9) + 1e-15) {
            return false;
        }
    }
    if (prob.objective(candidate, sigma2) > prob.objective(beta, sigma2)) {
        return false;
    }
    beta = std::move(candidate);
    return true;
}

// Coordinate descent with soft-thresholding, warm-started from beta. Returns false when the
// sweep budget runs out before the objective settles and the final exact solve fails too.
bool solve_penalized(const PenalizedProblem& prob, double sigma2, std::vector<double>& beta) {
    const std::size_t p = prob.size();
    const double l1 = sigma2 * prob.inv_tau;
    std::vector<double> grad(p);  // X'y - G beta
    for (std::size_t i = 0; i < p; ++i) {
        double s = prob.xty[i];
        for (std::size_t j = 0; j < p; ++j) {
            s -= prob.gram(i, j) * beta[j];
        }
        grad[i] = s;
    }
    auto objective_from_grad = [&] {
        // sse = y'y - b'beta - grad'beta
        double bb = 0.0;
        double pen = 0.0;
        for (std::size_t j = 0; j < p; ++j) {
            bb += (prob.xty[j] + grad[j]) * beta[j];
            if (prob.penalty[j] == Penalty::lasso) {
                pen += l1 * std::abs(beta[j]);
            } else if (prob.penalty[j] == Penalty::ridge) {
                pen += 0.5 * sigma2 * prob.precision[j] * beta[j] * beta[j];
            }
        }
        return 0.5 * (prob.yty - bb) + pen;
    };

    double previous = objective_from_grad();
    bool converged = false;
    for (int sweep = 0; sweep < kMaxSweeps && !converged; ++sweep) {
        double largest_step = 0.0;
        for (std::size_t j = 0; j < p; ++j) {
            const double gjj = prob.gram(j, j);
            const double z = grad[j] + gjj * beta[j];
            double next = 0.0;
            switch (prob.penalty[j]) {
                case Penalty::none:
                    next = gjj > 0.0 ? z / gjj : 0.0;
                    break;
                case Penalty::lasso:
                    next = gjj > 0.0 ? soft_threshold(z, l1) / gjj : 0.0;
                    break;
                case Penalty::ridge: {
                    const double denom = gjj + sigma2 * prob.precision[j];
                    next = denom > 0.0 ? z / denom : 0.0;
                    break;
                }
            }
            const double step = next - beta[j];
            if (step != 0.0) {
                for (std::size_t i = 0; i < p; ++i) {
                    grad[i] -= prob.gram(i, j) * step;
                }
                beta[j] = next;
                largest_step = std::max(largest_step, std::abs(step) * std::sqrt(gjj));
            }
        }
        const double current = objective_from_grad();
        const double scale = std::max({std::abs(current), std::abs(previous), 1e-300});
        converged = std::abs(previous - current) <= kSweepTolerance * scale ||
                    largest_step <= 1e-12 * std::sqrt(std::max(prob.yty, 1e-300));
        previous = current;
    }
    const bool exact = polish(prob, sigma2, beta);
    return converged || exact;
}

PenalizedProblem make_problem(std::span<const double> design, std::size_t cols, std::span<const double> y) {
    PenalizedProblem prob;
    const std::size_t n = y.size();
    prob.gram = linalg::SquareMatrix(cols);
    prob.xty.assign(cols, 0.0);
    for (std::size_t r = 0; r < n; ++r) {
        const double* row = &design[r * cols];
        for (std::size_t i = 0; i < cols; ++i) {
            if (row[i] == 0.0) {
                continue;
            }
            prob.xty[i] += row[i] * y[r];
            for (std::size_t j = i; j < cols; ++j) {
                prob.gram(i, j) += row[i] * row[j];
            }
        }
        prob.yty += y[r] * y[r];
    }
    for (std::size_t i = 0; i < cols; ++i) {
        for (std::size_t j = 0; j < i; ++j) {
            prob.gram(i, j) = prob.gram(j, i);
        }
    }
    return prob;
}

struct Scaling {
    double t0 = 0.0;
    double span = 1.0;
    double y = 1.0;

    double time(double day) const { return (day - t0) / span; }
};

void unpack_linear_block(const std::vector<double>& beta, std::size_t offset, const AdditiveConfig& config,
                         double y_scale, AdditiveFit& fit) {
    std::size_t c = offset;
    fit.fourier_coeffs.clear();
    for (const auto& s : config.seasonalities) {
        std::vector<std::pair<double, double>> coeffs;
        for (int k = 0; k < s.order; ++k) {
            coeffs.emplace_back(y_scale * beta[c], y_scale * beta[c + 1]);
            c += 2;
        }
        fit.fourier_coeffs.push_back(std::move(coeffs));
    }
    fit.holiday_coeffs.clear();
    for (std::size_t i = 0; i < config.holidays.size(); ++i) {
        fit.holiday_coeffs.push_back(y_scale * beta[c++]);
    }
}

void fit_linear(const TimeSeries& series, const Scaling& sc, std::span<const double> y, const LinearBlock& block,
                AdditiveFit& fit) {
    const auto& cps = fit.changepoints();
    const std::size_t s_count = cps.size();
    const std::size_t n = y.size();
    const std::size_t cols = 2 + s_count + block.cols;
    std::vector<double> design(n * cols);
    for (std::size_t r = 0; r < n; ++r) {
        const double tau = sc.time(series.start_day() + static_cast<double>(r));
        double* row = &design[r * cols];
        row[0] = 1.0;
        row[1] = tau;
        for (std::size_t j = 0; j < s_count; ++j) {
            row[2 + j] = std::max(tau - sc.time(cps[j]), 0.0);
        }
        std::copy_n(&block.x[r * block.cols], block.cols, row + 2 + s_count);
    }
    PenalizedProblem prob = make_problem(design, cols, y);
    prob.inv_tau = 1.0 / fit.config.tau;
    prob.penalty.assign(cols, Penalty::none);
    prob.precision.assign(cols, 0.0);
    for (std::size_t j = 0; j < s_count; ++j) {
        prob.penalty[2 + j] = Penalty::lasso;
    }
    for (std::size_t j = 0; j < block.cols; ++j) {
        prob.penalty[2 + s_count + j] = Penalty::ridge;
        prob.precision[2 + s_count + j] = block.precision[j];
    }

    const double mean = std::accumulate(y.begin(), y.end(), 0.0) / static_cast<double>(n);
    double sigma2 = std::max(prob.yty / static_cast<double>(n) - mean * mean, kSigma2Floor);
    std::vector<double> beta(cols, 0.0);
    beta[0] = mean;
    bool ok = true;
    for (int outer = 0; outer < kMaxOuter; ++outer) {
        ok = solve_penalized(prob, sigma2, beta);
        const double next = std::max(prob.sse(beta) / static_cast<double>(n), kSigma2Floor);
        const bool settled = std::abs(next - sigma2) <= 1e-8 * sigma2;
        sigma2 = next;
        if (settled) {
            break;
        }
    }
    if (!ok) {
        throw ConvergenceError("additive model: coordinate descent did not converge in " +
                                   std::to_string(kMaxSweeps) + " sweeps",
                               beta, prob.objective(beta, sigma2));
    }

    // Back to day indices and sales units.
    fit.k = sc.y * beta[1] / sc.span;
    fit.m = sc.y * beta[0] - fit.k * sc.t0;
    fit.delta.resize(s_count);
    for (std::size_t j = 0; j < s_count; ++j) {
        fit.delta[j] = sc.y * beta[2 + j] / sc.span;
    }
    fit.gamma = linear_offsets(fit.delta, cps);
    unpack_linear_block(beta, 2 + s_count, fit.config, sc.y, fit);
    fit.sigma_e = sc.y * std::sqrt(sigma2);
}

void fit_logistic(const TimeSeries& series, const Scaling& sc, std::span<const double> y, const LinearBlock& block,
                  AdditiveFit& fit) {
    const auto& cps = fit.changepoints();
    const std::size_t s_count = cps.size();
    const std::size_t n = y.size();
    std::vector<double> taus(n);
    std::vector<double> cap(n);
    for (std::size_t r = 0; r < n; ++r) {
        const double day = series.start_day() + static_cast<double>(r);
        taus[r] = sc.time(day);
        cap[r] = capacity_at(fit.config, series.start_day(), day) / sc.y;
    }
    std::vector<double> cp_tau(s_count);
    for (std::size_t j = 0; j < s_count; ++j) {
        cp_tau[j] = sc.time(cps[j]);
    }

    // Rate and midpoint from the first and last points of the logit-transformed series.
    auto logit_end = [&](std::size_t r) {
        const double c = cap[r];
        const double v = std::clamp(y[r], 0.01 * c, 0.99 * c);
        return std::log(c / v - 1.0);
    };
    const double l0 = logit_end(0);
    const double l1 = logit_end(n - 1);
    const double k_init = l0 - l1;
    const double m_init = std::abs(k_init) > 1e-10 ? l0 / k_init : 0.0;

    std::vector<double> trend_params(2 + s_count, 0.0);  // k, m, delta...
    trend_params[0] = k_init;
    trend_params[1] = m_init;
    std::vector<double> trend(n);
    auto eval_trend = [&](std::span<const double> x, std::vector<double>& out) {
        const std::vector<double> delta(x.begin() + 2, x.end());
        const auto gamma = logistic_offsets(x[0], x[1], delta, cp_tau);
        for (std::size_t r = 0; r < n; ++r) {
            double rate = x[0];
            double offset = x[1];
            for (std::size_t j = 0; j < s_count && taus[r] >= cp_tau[j]; ++j) {
                rate += delta[j];
                offset += gamma[j];
            }
            out[r] = cap[r] / (1.0 + std::exp(-rate * (taus[r] - offset)));
        }
    };

    PenalizedProblem ridge = make_problem(block.x, block.cols, y);
    ridge.penalty.assign(block.cols, Penalty::ridge);
    ridge.precision = block.precision;
    std::vector<double> beta(block.cols, 0.0);
    std::vector<double> seasonal(n, 0.0);
    auto refresh_seasonal = [&] {
        for (std::size_t r = 0; r < n; ++r) {
            double s = 0.0;
            for (std::size_t c = 0; c < block.cols; ++c) {
                s += block.x[r * block.cols + c] * beta[c];
            }
            seasonal[r] = s;
        }
    };
    auto sse_of = [&](const std::vector<double>& g) {
        double s = 0.0;
        for (std::size_t r = 0; r < n; ++r) {
            const double e = y[r] - g[r] - seasonal[r];
            s += e * e;
        }
        return s;
    };

    const double inv_tau = 1.0 / fit.config.tau;
    eval_trend(trend_params, trend);
    double sigma2 = std::max(sse_of(trend) / static_cast<double>(n), kSigma2Floor);
    NelderMeadOptions nm;
    nm.max_iterations = 20000;
    nm.relative_tolerance = 1e-10;
    nm.initial_step = 0.1;
    std::vector<double> scratch(n);
    double previous = std::numeric_limits<double>::infinity();
    bool settled = false;
    bool last_converged = false;
    for (int round = 0; round < kMaxOuter && !settled; ++round) {
        // Seasonal and holiday coefficients: ridge regression on the detrended series.
        if (block.cols > 0) {
            ridge.xty.assign(block.cols, 0.0);
            ridge.yty = 0.0;
            for (std::size_t r = 0; r < n; ++r) {
                const double target = y[r] - trend[r];
                for (std::size_t c = 0; c < block.cols; ++c) {
                    ridge.xty[c] += block.x[r * block.cols + c] * target;
                }
                ridge.yty += target * target;
            }
            solve_penalized(ridge, sigma2, beta);
            refresh_seasonal();
        }
        auto objective = [&](std::span<const double> x) {
            eval_trend(x, scratch);
            double l1 = 0.0;
            for (std::size_t j = 2; j < x.size(); ++j) {
                l1 += std::abs(x[j]);
            }
            return 0.5 * sse_of(scratch) / sigma2 + inv_tau * l1;
        };
        auto run = nelder_mead(objective, trend_params, nm);
        last_converged = run.converged;
        trend_params = run.x;
        eval_trend(trend_params, trend);
        sigma2 = std::max(sse_of(trend) / static_cast<double>(n), kSigma2Floor);

        double total = 0.5 * sse_of(trend) / sigma2;
        for (std::size_t j = 2; j < trend_params.size(); ++j) {
            total += inv_tau * std::abs(trend_params[j]);
        }
        for (std::size_t c = 0; c < block.cols; ++c) {
            total += 0.5 * block.precision[c] * beta[c] * beta[c];
        }
        settled = std::abs(previous - total) <= kSweepTolerance * std::max(std::abs(total), 1e-300);
        previous = total;
    }
    if (!settled && !last_converged) {
        std::vector<double> best = trend_params;
        best.insert(best.end(), beta.begin(), beta.end());
        throw ConvergenceError("additive model: logistic trend search did not converge", std::move(best), previous);
    }

    fit.k = trend_params[0] / sc.span;
    fit.m = sc.t0 + sc.span * trend_params[1];
    fit.delta.resize(s_count);
    for (std::size_t j = 0; j < s_count; ++j) {
        fit.delta[j] = trend_params[2 + j] / sc.span;
    }
    fit.gamma = logistic_offsets(fit.k, fit.m, fit.delta, cps);
    unpack_linear_block(beta, 0, fit.config, sc.y, fit);
    fit.sigma_e = sc.y * std::sqrt(sigma2);
}

double trend_at(const AdditiveFit& fit, double t) {
    const auto& cps = fit.changepoints();
    double rate = fit.k;
    double offset = fit.m;
    for (std::size_t j = 0; j < cps.size() && t >= cps[j]; ++j) {
        rate += fit.delta[j];
        offset += fit.gamma[j];
    }
    if (fit.config.trend_type == TrendType::linear) {
        return rate * t + offset;
    }
    const double c = capacity_at(fit.config, fit.first_day, t);
    return c / (1.0 + std::exp(-rate * (t - offset)));
}

}  // namespace

std::vector<Seasonality> default_seasonalities() {
    return {
        {"weekly", 7.0, 3, 10.0},
        {"monthly", 30.4375, 5, 10.0},
        {"quarterly", 91.3125, 5, 10.0},
        {"yearly", 365.25, 10, 10.0},
    };
}

std::vector<std::uint8_t> changepoint_indicator(double t, const std::vector<double>& changepoints) {
    std::vector<std::uint8_t> a(changepoints.size());
    for (std::size_t j = 0; j < changepoints.size(); ++j) {
        a[j] = t >= changepoints[j] ? 1 : 0;
    }
    return a;
}

std::vector<double> linear_offsets(const std::vector<double>& delta, const std::vector<double>& changepoints) {
    if (delta.size() != changepoints.size()) {
        throw InvalidArgument("one rate change per changepoint expected");
    }
    std::vector<double> gamma(delta.size());
    for (std::size_t j = 0; j < delta.size(); ++j) {
        gamma[j] = -changepoints[j] * delta[j];
    }
    return gamma;
}

std::vector<double> logistic_offsets(double k, double m, const std::vector<double>& delta,
                                     const std::vector<double>& changepoints) {
    if (delta.size() != changepoints.size()) {
        throw InvalidArgument("one rate change per changepoint expected");
    }
    std::vector<double> gamma(delta.size());
    double rate = k;
    double offset = m;
    for (std::size_t j = 0; j < delta.size(); ++j) {
        const double next_rate = rate + delta[j];
        gamma[j] = next_rate != 0.0 ? (changepoints[j] - offset) * (1.0 - rate / next_rate) : 0.0;
        offset += gamma[j];
        rate = next_rate;
    }
    return gamma;
}

double trend_linear(double t, double k, double m, const std::vector<double>& delta,
                    const std::vector<double>& changepoints) {
    const auto gamma = linear_offsets(delta, changepoints);
    double rate = k;
    double offset = m;
    for (std::size_t j = 0; j < changepoints.size() && t >= changepoints[j]; ++j) {
        rate += delta[j];
        offset += gamma[j];
    }
    return rate * t + offset;
}

double trend_logistic(double t, double k, double m, const std::vector<double>& delta,
                      const std::vector<double>& changepoints, double capacity) {
    if (!(capacity > 0.0)) {
        throw DomainError("logistic capacity must be positive");
    }
    const auto gamma = logistic_offsets(k, m, delta, changepoints);
    double rate = k;
    double offset = m;
    for (std::size_t j = 0; j < changepoints.size() && t >= changepoints[j]; ++j) {
        rate += delta[j];
        offset += gamma[j];
    }
    return capacity / (1.0 + std::exp(-rate * (t - offset)));
}

double fourier_seasonality(double t, double period, const std::vector<std::pair<double, double>>& coeffs) {
    if (coeffs.empty()) {
        return 0.0;
    }
    const double base = phase(t, period);
    double s = 0.0;
    for (std::size_t i = 0; i < coeffs.size(); ++i) {
        const double angle = static_cast<double>(i + 1) * base;
        s += coeffs[i].first * std::cos(angle) + coeffs[i].second * std::sin(angle);
    }
    return s;
}

std::vector<std::vector<std::uint8_t>> holiday_matrix(const std::vector<int>& dates,
                                                      const std::vector<Holiday>& holidays) {
    std::vector<std::vector<std::uint8_t>> z(dates.size(), std::vector<std::uint8_t>(holidays.size(), 0));
    for (std::size_t i = 0; i < holidays.size(); ++i) {
        std::vector<int> sorted = holidays[i].days;
        std::sort(sorted.begin(), sorted.end());
        for (std::size_t r = 0; r < dates.size(); ++r) {
            z[r][i] = std::binary_search(sorted.begin(), sorted.end(), dates[r]) ? 1 : 0;
        }
    }
    return z;
}

AdditiveFit fit_additive(const TimeSeries& series, const AdditiveConfig& config) {
    validate(series, config);
    AdditiveFit fit;
    fit.config = config;
    if (!fit.config.changepoints) {
        fit.config.changepoints = default_changepoints(series);
    }
    fit.series_id = series.id();
    fit.first_day = series.start_day();
    fit.last_day = series.end_day();
    const std::size_t s_count = fit.changepoints().size();

    const auto values = series.values();
    const auto [lo, hi] = std::minmax_element(values.begin(), values.end());
    if (*lo == *hi) {
        fit.k = 0.0;
        fit.m = *lo;
        fit.delta.assign(s_count, 0.0);
        fit.gamma.assign(s_count, 0.0);
        fit.fourier_coeffs.clear();
        for (const auto& s : config.seasonalities) {
            fit.fourier_coeffs.emplace_back(static_cast<std::size_t>(s.order), std::pair{0.0, 0.0});
        }
        fit.holiday_coeffs.assign(config.holidays.size(), 0.0);
        fit.sigma_e = 0.0;
        if (config.trend_type == TrendType::logistic) {
            fit.config.trend_type = TrendType::linear;
            fit.warnings.push_back("constant series: logistic trend replaced by a flat linear trend");
        } else {
            fit.warnings.push_back("constant series: returning a flat fit");
        }
        return fit;
    }

    Scaling sc;
    sc.t0 = series.start_day();
    sc.span = static_cast<double>(series.end_day() - series.start_day());
    sc.y = std::max(std::abs(*lo), std::abs(*hi));
    std::vector<double> y(values.begin(), values.end());
    for (double& v : y) {
        v /= sc.y;
    }
    const LinearBlock block = seasonal_holiday_block(series, fit.config);
    if (config.trend_type == TrendType::linear) {
        fit_linear(series, sc, y, block, fit);
    } else {
        fit_logistic(series, sc, y, block, fit);
    }
    return fit;
}

Components components(const AdditiveFit& fit, int first_day, int last_day) {
    if (last_day < first_day) {
        throw InvalidArgument("components: empty day range");
    }
    Components c;
    const std::size_t n = static_cast<std::size_t>(last_day - first_day + 1);
    c.days.resize(n);
    std::iota(c.days.begin(), c.days.end(), first_day);
    c.trend.resize(n);
    c.seasonal.assign(fit.config.seasonalities.size(), std::vector<double>(n));
    c.holidays.assign(n, 0.0);
    c.total.resize(n);
    const auto z = holiday_matrix(c.days, fit.config.holidays);
    for (std::size_t r = 0; r < n; ++r) {
        const double t = c.days[r];
        c.trend[r] = trend_at(fit, t);
        double total = c.trend[r];
        for (std::size_t s = 0; s < c.seasonal.size(); ++s) {
            c.seasonal[s][r] = fourier_seasonality(t, fit.config.seasonalities[s].period, fit.fourier_coeffs[s]);
            total += c.seasonal[s][r];
        }
        for (std::size_t i = 0; i < fit.holiday_coeffs.size(); ++i) {
            c.holidays[r] += z[r][i] * fit.holiday_coeffs[i];
        }
        c.total[r] = total + c.holidays[r];
    }
    return c;
}

ForecastResult forecast_additive(const AdditiveFit& fit, int h) {
    if (h < 1) {
        throw InvalidArgument("forecast horizon must be at least 1");
    }
    const Components c = components(fit, fit.last_day + 1, fit.last_day + h);
    ForecastResult out;
    out.series_id = fit.series_id;
    out.first_day = fit.last_day + 1;
    out.point = c.total;
    clamp_non_negative(out);
    return out;
}

}  // namespace retail::additive
