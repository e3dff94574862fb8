#pragma once

// Lumped-RC model of a (possibly segmented) DRAM bitline.
//
// Units: resistances in kOhm, capacitances in fF, times in ns. Voltages are
// absolute but every threshold is expressed as a fraction of v_dd.
//
// Near access: one node (sense-amp node merged with the near segment) driven
// through r_drive. Far access: the near node is driven through r_drive and the
// far segment hangs off it through the isolation transistor r_iso.

#include <cstddef>
#include <iosfwd>
#include <optional>
#include <span>
#include <string_view>
#include <vector>

namespace tldram::bitline {

enum class Segment { near, far };

std::string_view to_string(Segment s) noexcept;

struct RcNetworkParams {
  double v_dd = 1.0;
  double c_cell = 0.17;      // fF of bitline load per attached cell
  double c_senseamp = 60.0;  // fF
  double r_drive = 64.0;     // kOhm
  double r_iso = 64.0;       // kOhm
  double v_sense_threshold = 0.75;
  double v_restored_threshold = 0.95;
  double v_precharged = 0.5;
  double precharge_tolerance = 0.02;

  // Throws ParameterError on any violated invariant.
  void validate() const;

  friend bool operator==(const RcNetworkParams&, const RcNetworkParams&) = default;
};

struct SegmentGeometry {
  int cells_near = 512;
  int cells_far = 0;

  static SegmentGeometry unsegmented(int cells) { return {cells, 0}; }

  int cells_total() const noexcept { return cells_near + cells_far; }
  bool segmented() const noexcept { return cells_far > 0; }
  void validate() const;

  friend bool operator==(const SegmentGeometry&, const SegmentGeometry&) = default;
};

struct WaveformSample {
  double time_ns;
  double v_near;
  std::optional<double> v_far;  // absent while the far segment floats
};

struct Waveform {
  std::vector<WaveformSample> samples;
};

struct LatencyProfile {
  double t_rcd = 0;
  double t_ras = 0;
  double t_rp = 0;
  double t_rc = 0;

  friend bool operator==(const LatencyProfile&, const LatencyProfile&) = default;
};

enum class SolveMethod { closed_form, numerical };

struct SolveOptions {
  SolveMethod method = SolveMethod::closed_form;
  // Waveform end time; <= 0 picks ten slowest time constants.
  double t_end_ns = 0.0;
  std::size_t samples = 1001;
};

// Activation transient: every connected node starts at v_precharged and is
// driven toward v_dd.
Waveform solve_activation(const RcNetworkParams& params, const SegmentGeometry& geom,
                          Segment target, const SolveOptions& options = {});

// Precharge transient: every connected node starts at v_dd and is driven back
// to v_precharged.
Waveform solve_precharge(const RcNetworkParams& params, const SegmentGeometry& geom,
                         Segment target, const SolveOptions& options = {});

// Completion time of precharge: the first instant all connected nodes are
// within precharge_tolerance of v_precharged.
double precharge_completion(const RcNetworkParams& params, const SegmentGeometry& geom,
                            Segment target, double horizon_ns = 1.0e5);

// Threshold-crossing timings of the activation/precharge transients. Throws
// ConvergenceError when a threshold is not reached before horizon_ns.
LatencyProfile derive_timings(const RcNetworkParams& params, const SegmentGeometry& geom,
                              Segment target, double horizon_ns = 1.0e5);

struct SweepRow {
  SegmentGeometry geometry;
  LatencyProfile near;
  std::optional<LatencyProfile> far;  // absent for the unsegmented reference row
};

// One row per near-segment length (total fixed), then the unsegmented
// reference row last.
std::vector<SweepRow> sweep_segment_lengths(const RcNetworkParams& params, int total_cells,
                                            std::span<const int> near_lengths);

// Header: cells_near,cells_far,segment,t_rcd_ns,t_ras_ns,t_rp_ns,t_rc_ns
void write_sweep_csv(std::ostream& out, std::span<const SweepRow> rows);

}  // namespace tldram::bitline
