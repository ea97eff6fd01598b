#include "relaynet/report.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "relaynet/csv.hpp"

namespace relaynet {

namespace {

using csv::format_number;

std::string quote(const std::string& s) {
    if (s.find_first_of(",\"\n") == std::string::npos) return s;
    std::string out = "\"";
    for (char c : s) {
        if (c == '"') out += "\"\"";
        else out.push_back(c);
    }
    return out + "\"";
}

std::string sizes_text(const std::vector<int>& sizes) {
    std::string out;
    for (size_t i = 0; i < sizes.size(); ++i) out += (i ? "+" : "") + std::to_string(sizes[i]);
    return out;
}

std::string xml_escape(const std::string& s) {
    std::string out;
    for (char c : s) {
        switch (c) {
            case '&': out += "&amp;"; break;
            case '<': out += "&lt;"; break;
            case '>': out += "&gt;"; break;
            case '"': out += "&quot;"; break;
            default: out.push_back(c);
        }
    }
    return out;
}

// Fixed two-decimal text for chart labels.
std::string fixed2(double v) {
    std::ostringstream os;
    os.setf(std::ios::fixed);
    os.precision(2);
    os << v;
    return os.str();
}

// 1, 2 or 5 times a power of ten, at least v / 5.
double nice_step(double v) {
    if (v <= 0.0) return 1.0;
    const double raw = v / 5.0;
    const double mag = std::pow(10.0, std::floor(std::log10(raw)));
    for (double m : {1.0, 2.0, 5.0, 10.0})
        if (m * mag >= raw) return m * mag;
    return 10.0 * mag;
}

const char* const kPalette[] = {"#4e79a7", "#f28e2b", "#59a14f", "#e15759", "#76b7b2", "#edc948"};

}  // namespace

std::vector<std::pair<std::string, double>> kpi_rows(const KpiReport& k) {
    return {
        {"Total contracted hours of drivers (hrs)", k.total_contracted_driver_hours},
        {"Average rental hours of tractors (hrs)", k.avg_tractor_rental_hours},
        {"Average rental hours of haulers (hrs)", k.avg_hauler_rental_hours},
        {"Average outsourcing rate of commodities (fraction)", k.avg_outsourcing_rate},
        {"Total expected transportation cost ($)", k.total_expected_cost},
        {"Contract cost ($)", k.contract_cost},
        {"Expected recourse cost ($)", k.expected_recourse_cost},
        {"Opened services", static_cast<double>(k.opened_services)},
        {"Contracted drivers", static_cast<double>(k.contracted_units)},
    };
}

std::string kpi_csv(const KpiReport& k) {
    std::string out = "metric,value\n";
    for (const auto& [label, v] : kpi_rows(k)) out += quote(label) + "," + format_number(v) + "\n";
    return out;
}

std::string design_csv(const Instance& inst, const DesignSolution& design) {
    std::string out = "service_id,home,away,cycle,start_step,end_step,on_duty_hours,contract_fee,x\n";
    const auto& pnet = inst.spec.pnet;
    for (const auto& s : inst.catalog.services()) {
        const int x = design.x.at(static_cast<size_t>(s.id));
        if (x == 0) continue;
        out += std::to_string(s.id) + "," + quote(pnet.hub(s.home_hub).name) + "," + quote(pnet.hub(s.away_hub).name) + "," +
               std::to_string(s.cycle) + "," + std::to_string(s.start_step) + "," + std::to_string(s.end_step) + "," +
               format_number(s.on_duty_hours) + "," + format_number(first_stage_cost(inst, s)) + "," + std::to_string(x) + "\n";
    }
    return out;
}

std::string recourse_csv(const Instance& inst, const Recourse& recourse) {
    std::string out = "scenario_id,probability,recourse_cost,outsourced_commodities,outsourced_volume,units_rented\n";
    for (const auto& r : recourse.scenarios) {
        const auto& scen = inst.scenarios().scenarios.at(static_cast<size_t>(r.w));
        int n_out = 0;
        double vol_out = 0.0;
        for (size_t k = 0; k < r.z.size(); ++k)
            if (r.z[k]) {
                ++n_out;
                vol_out += scen.volumes[k];
            }
        long units = 0;
        for (const auto& [key, n] : r.y) units += n;
        out += std::to_string(scen.id) + "," + format_number(scen.probability) + "," + format_number(r.cost) + "," +
               std::to_string(n_out) + "," + format_number(vol_out) + "," + std::to_string(units) + "\n";
    }
    return out;
}

std::string comparison_csv(const ComparisonReport& report) {
    std::string out =
        "label,pattern,consistency,haulers,status,driver_hours,tractor_hours,hauler_hours,outsourcing_rate,total_cost\n";
    for (const auto& r : report.rows) {
        const auto& k = r.kpis;
        out += quote(r.label) + "," + to_string(r.pattern) + "," + to_string(r.consistency) + "," + sizes_text(r.hauler_sizes) +
               "," + to_string(r.status) + "," + format_number(k.total_contracted_driver_hours) + "," +
               format_number(k.avg_tractor_rental_hours) + "," + format_number(k.avg_hauler_rental_hours) + "," +
               format_number(k.avg_outsourcing_rate) + "," + format_number(k.total_expected_cost) + "\n";
    }
    return out;
}

std::string vss_csv(const VssReport& report) {
    std::string out = "metric,deterministic_design,stochastic_design\n";
    const auto det = kpi_rows(report.deterministic_kpis);
    const auto sto = kpi_rows(report.stochastic_kpis);
    for (size_t i = 0; i < det.size(); ++i)
        out += quote(det[i].first) + "," + format_number(det[i].second) + "," + format_number(sto[i].second) + "\n";
    out += "Value of the stochastic solution ($)," + format_number(report.vss) + ",\n";
    out += std::string("Conclusive,") + (report.conclusive ? "yes" : "no") + ",\n";
    return out;
}

nlohmann::json to_json(const KpiReport& k) {
    nlohmann::json j = nlohmann::json::object();
    for (const auto& [label, v] : kpi_rows(k)) j[label] = v;
    return j;
}

nlohmann::json to_json(const VssReport& report) {
    return {
        {"stochastic_cost", report.stochastic_cost},
        {"deterministic_design_cost", report.deterministic_design_cost},
        {"vss", report.vss},
        {"conclusive", report.conclusive},
        {"stochastic_design", report.stochastic_design.x},
        {"deterministic_design", report.deterministic_design.x},
        {"stochastic_kpis", to_json(report.stochastic_kpis)},
        {"deterministic_kpis", to_json(report.deterministic_kpis)},
    };
}

nlohmann::json to_json(const ComparisonReport& report) {
    nlohmann::json rows = nlohmann::json::array();
    for (const auto& r : report.rows)
        rows.push_back({{"label", r.label},
                        {"pattern", to_string(r.pattern)},
                        {"consistency", to_string(r.consistency)},
                        {"haulers", r.hauler_sizes},
                        {"status", to_string(r.status)},
                        {"kpis", to_json(r.kpis)}});
    return {{"rows", rows}, {"ordering_holds", report.ordering_holds}};
}

std::string svg_bar_chart(const std::string& title, const std::string& y_label, const std::vector<std::string>& categories,
                          const std::vector<BarSeries>& series) {
    const double width = 640, height = 400;
    const double left = 80, right = 20, top = 50, bottom = 70;
    const double plot_w = width - left - right, plot_h = height - top - bottom;

    double vmax = 0.0;
    for (const auto& s : series)
        for (double v : s.values) vmax = std::max(vmax, v);
    const double step = nice_step(vmax);
    const double ymax = std::max(step, std::ceil(vmax / step) * step);

    std::ostringstream os;
    os << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << width << "\" height=\"" << height
       << "\" font-family=\"sans-serif\" font-size=\"12\">\n";
    os << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
    os << "<text x=\"" << width / 2 << "\" y=\"24\" text-anchor=\"middle\" font-size=\"16\">" << xml_escape(title) << "</text>\n";
    os << "<text transform=\"translate(16," << top + plot_h / 2 << ") rotate(-90)\" text-anchor=\"middle\">" << xml_escape(y_label)
       << "</text>\n";

    for (double v = 0.0; v <= ymax + step * 1e-9; v += step) {
        const double y = top + plot_h - v / ymax * plot_h;
        os << "<line x1=\"" << left << "\" y1=\"" << y << "\" x2=\"" << left + plot_w << "\" y2=\"" << y
           << "\" stroke=\"#dddddd\"/>\n";
        os << "<text x=\"" << left - 6 << "\" y=\"" << y + 4 << "\" text-anchor=\"end\">" << format_number(v) << "</text>\n";
    }
    os << "<line x1=\"" << left << "\" y1=\"" << top + plot_h << "\" x2=\"" << left + plot_w << "\" y2=\"" << top + plot_h
       << "\" stroke=\"black\"/>\n";

    const size_t nc = std::max<size_t>(categories.size(), 1);
    const size_t ns = std::max<size_t>(series.size(), 1);
    const double group_w = plot_w / static_cast<double>(nc);
    const double bar_w = group_w * 0.8 / static_cast<double>(ns);
    for (size_t c = 0; c < categories.size(); ++c) {
        const double gx = left + group_w * static_cast<double>(c) + group_w * 0.1;
        for (size_t s = 0; s < series.size(); ++s) {
            const double v = c < series[s].values.size() ? series[s].values[c] : 0.0;
            const double h = v / ymax * plot_h;
            os << "<rect x=\"" << gx + bar_w * static_cast<double>(s) << "\" y=\"" << top + plot_h - h << "\" width=\"" << bar_w
               << "\" height=\"" << h << "\" fill=\"" << kPalette[s % 6] << "\"><title>" << xml_escape(series[s].name) << ": "
               << fixed2(v) << "</title></rect>\n";
        }
        os << "<text x=\"" << gx + group_w * 0.4 << "\" y=\"" << top + plot_h + 18 << "\" text-anchor=\"middle\">"
           << xml_escape(categories[c]) << "</text>\n";
    }
    for (size_t s = 0; s < series.size(); ++s) {
        const double lx = left + 130.0 * static_cast<double>(s);
        const double ly = height - 24;
        os << "<rect x=\"" << lx << "\" y=\"" << ly - 10 << "\" width=\"12\" height=\"12\" fill=\"" << kPalette[s % 6] << "\"/>\n";
        os << "<text x=\"" << lx + 18 << "\" y=\"" << ly << "\">" << xml_escape(series[s].name) << "</text>\n";
    }
    os << "</svg>\n";
    return os.str();
}

namespace {

std::string hours_chart_of(const std::string& title, const std::vector<std::string>& labels, const std::vector<KpiReport>& kpis) {
    BarSeries drivers{"Drivers", {}}, tractors{"Tractors", {}}, haulers{"Haulers", {}};
    for (const auto& k : kpis) {
        drivers.values.push_back(k.total_contracted_driver_hours);
        tractors.values.push_back(k.avg_tractor_rental_hours);
        haulers.values.push_back(k.avg_hauler_rental_hours);
    }
    return svg_bar_chart(title, "hours", labels, {drivers, tractors, haulers});
}

std::string cost_chart_of(const std::string& title, const std::vector<std::string>& labels, const std::vector<KpiReport>& kpis) {
    BarSeries contract{"Contract", {}}, recourse{"Expected recourse", {}}, total{"Total", {}};
    for (const auto& k : kpis) {
        contract.values.push_back(k.contract_cost);
        recourse.values.push_back(k.expected_recourse_cost);
        total.values.push_back(k.total_expected_cost);
    }
    return svg_bar_chart(title, "cost ($)", labels, {contract, recourse, total});
}

}  // namespace

std::string hours_chart(const ComparisonReport& report) {
    std::vector<std::string> labels;
    std::vector<KpiReport> kpis;
    for (const auto& r : report.rows) {
        labels.push_back(r.label);
        kpis.push_back(r.kpis);
    }
    return hours_chart_of("Contracted driver hours and rental hours", labels, kpis);
}

std::string cost_chart(const ComparisonReport& report) {
    std::vector<std::string> labels;
    std::vector<KpiReport> kpis;
    for (const auto& r : report.rows) {
        labels.push_back(r.label);
        kpis.push_back(r.kpis);
    }
    return cost_chart_of("Expected transportation cost", labels, kpis);
}

std::string hours_chart(const VssReport& report) {
    return hours_chart_of("Contracted driver hours and rental hours", {"deterministic", "stochastic"},
                          {report.deterministic_kpis, report.stochastic_kpis});
}

std::string cost_chart(const VssReport& report) {
    return cost_chart_of("Expected transportation cost", {"deterministic", "stochastic"},
                         {report.deterministic_kpis, report.stochastic_kpis});
}

}  // namespace relaynet
