#pragma once

#include <string>
#include <utility>
#include <vector>

#include <json.hpp>

#include "relaynet/analysis.hpp"

namespace relaynet {

// KPI rows in reporting order, labelled like the published result tables.
std::vector<std::pair<std::string, double>> kpi_rows(const KpiReport& k);

// metric,value
std::string kpi_csv(const KpiReport& k);
// service_id,home,away,cycle,start_step,end_step,on_duty_hours,contract_fee,x (opened services only)
std::string design_csv(const Instance& inst, const DesignSolution& design);
// One row per scenario: probability, cost, outsourced commodities and volume, trucks or haulers rented.
std::string recourse_csv(const Instance& inst, const Recourse& recourse);
std::string comparison_csv(const ComparisonReport& report);
std::string vss_csv(const VssReport& report);

nlohmann::json to_json(const KpiReport& k);
nlohmann::json to_json(const VssReport& report);
nlohmann::json to_json(const ComparisonReport& report);

struct BarSeries {
    std::string name;
    std::vector<double> values;  // one per category
};

// Grouped vertical bar chart as a standalone SVG document.
std::string svg_bar_chart(const std::string& title, const std::string& y_label, const std::vector<std::string>& categories,
                          const std::vector<BarSeries>& series);

// Driver, tractor and hauler hours per row, and total cost per row.
std::string hours_chart(const ComparisonReport& report);
std::string cost_chart(const ComparisonReport& report);
std::string hours_chart(const VssReport& report);
std::string cost_chart(const VssReport& report);

}  // namespace relaynet
