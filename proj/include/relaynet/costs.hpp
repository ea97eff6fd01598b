#pragma once

#include <map>

namespace relaynet {

// Hourly rates and platform parameters.
struct CostParams {
    double driver_hourly = 29.0;
    double tractor_hourly = 18.0;
    std::map<int, double> hauler_hourly_by_size{{8, 10.0}, {4, 5.0}};
    double outsource_per_vehicle_mile = 0.93;
    double consistency_discount = 0.8;  // applied to driver fees under daily consistency
    double avg_mph = 50.0;
    int default_capacity = 10;

    double hauler_hourly(int size) const;
};

void validate(const CostParams& costs);

}  // namespace relaynet
