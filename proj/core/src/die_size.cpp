#include "tldram/die_size.hpp"

#include <cmath>

#include "tldram/error.hpp"

namespace tldram::bitline {

namespace {

double area_per_bit(int cells, double overhead) { return (cells + overhead) / cells; }

}  // namespace

DieSizeModel fit_die_size_model(int baseline_cells, int short_cells, double short_factor,
                                double segmented_factor) {
  if (baseline_cells < 1 || short_cells < 1 || short_cells >= baseline_cells) {
    throw ParameterError("die-size fit needs 1 <= short_cells < baseline_cells");
  }
  if (!(short_factor > 1.0) || !(segmented_factor >= 1.0)) {
    throw ParameterError("die-size factors must exceed the baseline");
  }
  const double nb = baseline_cells;
  const double ns = short_cells;
  // (1 + s/ns) = f * (1 + s/nb)  =>  s = (f - 1) / (1/ns - f/nb)
  const double denom = 1.0 / ns - short_factor / nb;
  if (!(denom > 0.0)) throw ParameterError("die-size factors are inconsistent");
  DieSizeModel m;
  m.senseamp_cells = (short_factor - 1.0) / denom;
  // (nb + s + i) / (nb + s) = g
  m.isolation_cells = (segmented_factor - 1.0) * (nb + m.senseamp_cells);
  return m;
}

DieSizeModel reference_die_size_model() { return fit_die_size_model(512, 32, 3.76, 1.03); }

double die_size_factor(const SegmentGeometry& geom, int cells_per_senseamp_baseline,
                       const DieSizeModel& model) {
  geom.validate();
  if (cells_per_senseamp_baseline < 1) throw ParameterError("baseline cells must be >= 1");
  const double overhead = model.senseamp_cells + (geom.segmented() ? model.isolation_cells : 0.0);
  return area_per_bit(geom.cells_total(), overhead) /
         area_per_bit(cells_per_senseamp_baseline, model.senseamp_cells);
}

}  // namespace tldram::bitline
