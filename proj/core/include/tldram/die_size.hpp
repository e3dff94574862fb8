#pragma once

#include "tldram/bitline.hpp"

namespace tldram::bitline {

// Area model in units of one cell's footprint along a bitline: a bitline of N
// cells costs N + senseamp_cells, plus isolation_cells when segmented. The
// factor is area per bit, normalized to an unsegmented baseline bitline.
struct DieSizeModel {
  double senseamp_cells = 0;
  double isolation_cells = 0;
};

// Closed-form fit of the two overhead constants from the normalized die size
// of a short unsegmented bitline and of a segmented bitline with the same
// total length as the baseline.
DieSizeModel fit_die_size_model(int baseline_cells, int short_cells, double short_factor,
                                double segmented_factor);

// Fitted to the published comparison: 32-cell 3.76x, segmented 512-cell 1.03x.
DieSizeModel reference_die_size_model();

double die_size_factor(const SegmentGeometry& geom, int cells_per_senseamp_baseline,
                       const DieSizeModel& model);

}  // namespace tldram::bitline
