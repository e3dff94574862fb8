#include "tldram/energy.hpp"

#include <cmath>

#include "tldram/error.hpp"

namespace tldram {

void EnergyModel::validate() const {
  for (double e : {e_act_near, e_act_far, e_act_baseline, e_rdwr, e_transfer}) {
    if (!(e >= 0.0) || !std::isfinite(e)) throw ParameterError("energies must be finite and >= 0");
  }
  if (!(e_act_near < e_act_baseline && e_act_baseline < e_act_far)) {
    throw ParameterError("activation energies must satisfy near < baseline < far");
  }
}

void accrue(const CommandLogEntry& event, const EnergyModel& model, EnergyTotals& totals) noexcept {
  switch (event.kind) {
    case CommandKind::act:
      switch (event.segment) {
        case RowSegment::near:
          totals.total += model.e_act_near;
          ++totals.act_near;
          break;
        case RowSegment::far:
          totals.total += model.e_act_far;
          ++totals.act_far;
          break;
        case RowSegment::baseline:
          totals.total += model.e_act_baseline;
          ++totals.act_baseline;
          break;
      }
      break;
    case CommandKind::rd:
    case CommandKind::wr:
      totals.total += model.e_rdwr;
      ++totals.column;
      break;
    case CommandKind::transfer:
      totals.total += model.e_transfer;
      ++totals.transfers;
      break;
    case CommandKind::pre:
      break;
  }
}

EnergyTotals energy_from_log(std::span<const CommandLogEntry> log, const EnergyModel& model) noexcept {
  EnergyTotals t;
  for (const auto& e : log) accrue(e, model, t);
  return t;
}

}  // namespace tldram
