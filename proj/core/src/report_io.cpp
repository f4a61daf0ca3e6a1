#include <charconv>
#include <cmath>
#include <ostream>

#include <json.hpp>

#include "polyspec/errors.hpp"
#include "polyspec/smoothing.hpp"

namespace polyspec {

namespace {

std::string shortest(double x) {
    if (std::isnan(x)) return "nan";
    char buf[64];
    auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, x);
    return std::string(buf, ptr);
}

nlohmann::ordered_json number_or_null(double x) {
    if (!std::isfinite(x)) return nullptr;
    return x;
}

}  // namespace

void write_report_csv(std::ostream& out, const AsymptoticReport& report, const std::vector<std::string>& header) {
    for (const auto& line : header) out << "# " << line << '\n';
    out << "r,smoothed,main,ratio\n";
    for (const auto& row : report.rows)
        out << shortest(row.r) << ',' << shortest(row.smoothed) << ',' << shortest(row.main) << ','
            << shortest(row.ratio) << '\n';
}

std::string report_summary_json(const AsymptoticReport& report) {
    nlohmann::ordered_json j;
    j["slope"] = number_or_null(report.slope);
    j["slope_stderr"] = number_or_null(report.slope_stderr);
    j["d_expected"] = report.d_expected;
    j["intercept"] = number_or_null(report.intercept);
    j["residuals"] = report.residuals;
    j["n"] = report.n;
    j["k"] = report.k;
    j["tau0"] = report.tau0;
    auto rows = nlohmann::ordered_json::array();
    for (const auto& row : report.rows)
        rows.push_back({{"r", row.r}, {"smoothed", row.smoothed}, {"main", row.main}, {"ratio", number_or_null(row.ratio)}});
    j["rows"] = rows;
    j["kernel"] = {{"halfwidth", report.kernel_halfwidth},
                   {"cutoff_radius", report.cutoff_radius},
                   {"tail_radius", report.tail_radius}};
    j["route"] = std::string(to_string(report.route));
    j["version"] = version_string();
    return j.dump(2);
}

}  // namespace polyspec
