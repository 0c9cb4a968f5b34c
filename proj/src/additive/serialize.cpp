#include <sstream>

#include "json.hpp"
#include "retail/additive/additive.hpp"

namespace retail::additive {

std::string components_to_csv(const Components& c, const AdditiveFit& fit) {
    std::ostringstream out;
    out.precision(17);
    out << "day,component,value\n";
    for (std::size_t r = 0; r < c.days.size(); ++r) {
        out << c.days[r] << ",trend," << c.trend[r] << '\n';
        for (std::size_t s = 0; s < c.seasonal.size(); ++s) {
            out << c.days[r] << ',' << fit.config.seasonalities[s].name << ',' << c.seasonal[s][r] << '\n';
        }
        out << c.days[r] << ",holidays," << c.holidays[r] << '\n';
        out << c.days[r] << ",total," << c.total[r] << '\n';
    }
    return out.str();
}

std::string components_to_json(const Components& c, const AdditiveFit& fit) {
    nlohmann::ordered_json doc;
    doc["series_id"] = fit.series_id;
    doc["days"] = c.days;
    doc["trend"] = c.trend;
    auto& seasonal = doc["seasonal"] = nlohmann::ordered_json::object();
    for (std::size_t s = 0; s < c.seasonal.size(); ++s) {
        seasonal[fit.config.seasonalities[s].name] = c.seasonal[s];
    }
    doc["holidays"] = c.holidays;
    doc["total"] = c.total;
    return doc.dump(2);
}

}  // namespace retail::additive
