#pragma once

#include <string>

#include "kronopt/model.hpp"

namespace kronopt {

// Fixed-format MPS text.  Rows are renamed R0000001... and columns
// C0000001... so every name fits the 8-character limit; the objective row
// is COST and the RHS entry on COST carries the negated objective constant.
std::string to_mps(const MilpModel& model, const std::string& name = "KRONOPT");

// CSV renaming table ("mps_name,semantic_name"), rows first then columns.
std::string to_name_map_csv(const MilpModel& model);

void export_mps(const MilpModel& model, const std::string& mps_path,
                const std::string& map_path);

}  // namespace kronopt
