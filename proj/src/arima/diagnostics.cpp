#include <algorithm>
#include <boost/math/distributions/normal.hpp>
#include <cmath>
#include <sstream>

#include "json.hpp"
#include "retail/arima/arima.hpp"
#include "retail/core/error.hpp"
#include "retail/core/series_ops.hpp"

namespace retail::arima {

namespace {

constexpr int kAcfLags = 20;
constexpr std::size_t kHistogramBins = 20;

}  // namespace

DiagnosticsBundle diagnostics(const ArimaFit& fit) {
    const std::span<const double> all(fit.residuals);
    const std::size_t skip = std::min(all.size(), static_cast<std::size_t>(fit.conditioning));
    const auto residuals = all.subspan(skip);
    if (residuals.size() < 20) {
        throw InvalidArgument("diagnostics need at least 20 residuals, got " + std::to_string(residuals.size()));
    }
    const double scale = std::sqrt(fit.sigma2);
    const std::size_t n = residuals.size();

    DiagnosticsBundle out;
    out.standardized_residuals.resize(n);
    for (std::size_t i = 0; i < n; ++i) {
        out.standardized_residuals[i] = residuals[i] / scale;
    }

    try {
        out.residual_acf = acf(out.standardized_residuals, std::min<int>(kAcfLags, static_cast<int>(n) - 1));
    } catch (const DegenerateInput&) {
        // All-equal residuals (a perfect fit): report a flat correlogram.
        out.residual_acf.assign(kAcfLags + 1, 0.0);
        out.residual_acf[0] = 1.0;
    }

    // Blom plotting positions against standard normal quantiles.
    std::vector<double> sorted = out.standardized_residuals;
    std::sort(sorted.begin(), sorted.end());
    const boost::math::normal standard;
    out.qq_points.reserve(n);
    for (std::size_t i = 0; i < n; ++i) {
        const double prob = (static_cast<double>(i + 1) - 0.375) / (static_cast<double>(n) + 0.25);
        out.qq_points.emplace_back(boost::math::quantile(standard, prob), sorted[i]);
    }

    const double lo = sorted.front();
    const double hi = sorted.back();
    const double width = hi > lo ? (hi - lo) / kHistogramBins : 1.0;
    out.histogram_bins.resize(kHistogramBins);
    for (std::size_t b = 0; b < kHistogramBins; ++b) {
        out.histogram_bins[b].lower = lo + width * static_cast<double>(b);
        out.histogram_bins[b].upper = lo + width * static_cast<double>(b + 1);
    }
    for (double v : sorted) {
        auto b = static_cast<std::size_t>((v - lo) / width);
        ++out.histogram_bins[std::min(b, kHistogramBins - 1)].count;
    }
    return out;
}

std::string diagnostics_to_json(const DiagnosticsBundle& bundle, const ArimaFit& fit) {
    nlohmann::ordered_json doc;
    doc["series_id"] = fit.series_id;
    doc["order"] = {{"p", fit.order.p}, {"d", fit.order.d}, {"q", fit.order.q}};
    doc["c"] = fit.c;
    doc["phi"] = fit.phi;
    doc["theta"] = fit.theta;
    doc["sigma2"] = fit.sigma2;
    doc["loglik"] = fit.loglik;
    doc["aic"] = fit.aic;
    doc["stationary"] = fit.stationary;
    doc["invertible"] = fit.invertible;
    doc["standardized_residuals"] = bundle.standardized_residuals;
    doc["residual_acf"] = bundle.residual_acf;
    auto& qq = doc["qq_points"] = nlohmann::ordered_json::array();
    for (const auto& [theoretical, sample] : bundle.qq_points) {
        qq.push_back({theoretical, sample});
    }
    auto& hist = doc["histogram"] = nlohmann::ordered_json::array();
    for (const auto& bin : bundle.histogram_bins) {
        hist.push_back({{"lower", bin.lower}, {"upper", bin.upper}, {"count", bin.count}});
    }
    return doc.dump(2);
}

std::string diagnostics_to_csv(const DiagnosticsBundle& bundle) {
    std::ostringstream out;
    out.precision(17);
    out << "section,index,x,y\n";
    for (std::size_t i = 0; i < bundle.standardized_residuals.size(); ++i) {
        out << "residual," << i << ',' << i << ',' << bundle.standardized_residuals[i] << '\n';
    }
    for (std::size_t i = 0; i < bundle.residual_acf.size(); ++i) {
        out << "acf," << i << ',' << i << ',' << bundle.residual_acf[i] << '\n';
    }
    for (std::size_t i = 0; i < bundle.qq_points.size(); ++i) {
        out << "qq," << i << ',' << bundle.qq_points[i].first << ',' << bundle.qq_points[i].second << '\n';
    }
    for (std::size_t i = 0; i < bundle.histogram_bins.size(); ++i) {
        const auto& bin = bundle.histogram_bins[i];
        out << "histogram," << i << ',' << 0.5 * (bin.lower + bin.upper) << ',' << bin.count << '\n';
    }
    return out.str();
}

}  // namespace retail::arima
