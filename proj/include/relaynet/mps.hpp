#pragma once

#include <string>

#include "relaynet/model.hpp"

namespace relaynet {

// Fixed-layout MPS (ROWS, COLUMNS with INTORG/INTEND markers, RHS, BOUNDS).
// Fields sit at the classic column positions; names longer than eight
// characters simply extend their field, so the output is also valid free MPS.
std::string write_mps(const MilpModel& model, const std::string& name = "RELAYNET");

// Reads MPS produced by write_mps or any whitespace-separated MPS without RANGES.
MilpModel read_mps(const std::string& text);

}  // namespace relaynet
