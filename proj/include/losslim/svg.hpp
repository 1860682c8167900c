#pragma once

#include <string>

#include "losslim/analysis.hpp"

namespace losslim {

// Heatmap of a gain table: natural-log color scale for H2, linear for Hinf,
// fixed 8-step sequential colormap, white rectangles on the cluster
// boundaries, min/max recorded in a metadata comment.
std::string heatmap_svg(const GainMatrix& gains);

}  // namespace losslim
