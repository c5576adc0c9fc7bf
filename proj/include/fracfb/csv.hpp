// Field CSV export/import: header `x[,y],value`, one grid point per row,
// row-major order.
#pragma once

#include <string>

#include "fracfb/grid.hpp"

namespace fracfb {

std::string field_to_csv(const ScalarField& field);

// Parses a field CSV against an expected grid; throws on shape mismatch.
ScalarField field_from_csv(const std::string& text, const GridSpec& grid);

} // namespace fracfb
