#pragma once

#include <span>
#include <string_view>
#include <vector>

#include "tldram/bitline.hpp"

namespace tldram::bitline {

enum class FreeParam { c_cell, r_drive, r_iso, c_senseamp };

std::string_view to_string(FreeParam p) noexcept;
FreeParam free_param_from_string(std::string_view name);

struct CalibrationAnchor {
  SegmentGeometry geometry;
  Segment segment = Segment::near;
  double target_t_rc_ns = 0;

  friend bool operator==(const CalibrationAnchor&, const CalibrationAnchor&) = default;
};

struct CalibrationOptions {
  // Objective ceiling: sum over anchors of squared relative t_rc error.
  double max_objective = 1e-6;
  int max_iterations = 4000;
  double simplex_tolerance = 1e-12;
};

struct CalibrationResult {
  RcNetworkParams params;
  std::vector<double> residuals;      // relative t_rc error per anchor
  std::vector<FreeParam> fitted;      // free parameters actually optimized
  std::vector<FreeParam> unconstrained;  // free, but no anchor depends on them
  double objective = 0;
  int iterations = 0;
};

// Derivative-free least-squares fit of the free parameters to anchor t_rc
// values. Requires at least two anchors. Parameters that no anchor can see
// (r_iso when no anchor is a far access) are held at their initial value and
// listed in `unconstrained`. Throws CalibrationError with the per-anchor
// residuals when the objective stays above the ceiling.
CalibrationResult calibrate(const RcNetworkParams& initial, std::span<const CalibrationAnchor> anchors,
                            std::span<const FreeParam> free, const CalibrationOptions& options = {});

// Same fit without the two-anchor precondition.
CalibrationResult fit_parameters(const RcNetworkParams& initial,
                                 std::span<const CalibrationAnchor> anchors,
                                 std::span<const FreeParam> free, const CalibrationOptions& options = {});

// The three t_rc columns of the published comparison table.
std::vector<CalibrationAnchor> reference_anchors();

}  // namespace tldram::bitline
