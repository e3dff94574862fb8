#pragma once

#include <cstdint>
#include <span>

#include "tldram/command_log.hpp"

namespace tldram {

// Normalized energy units. Activation energies cover an ACT/PRE pair and are
// charged at the ACT.
struct EnergyModel {
  double e_act_near = 0.51;
  double e_act_far = 1.49;
  double e_act_baseline = 1.00;
  double e_rdwr = 0.1;
  double e_transfer = 1.49;

  void validate() const;

  friend bool operator==(const EnergyModel&, const EnergyModel&) = default;
};

struct EnergyTotals {
  double total = 0;
  std::uint64_t act_near = 0;
  std::uint64_t act_far = 0;
  std::uint64_t act_baseline = 0;
  std::uint64_t column = 0;
  std::uint64_t transfers = 0;

  friend bool operator==(const EnergyTotals&, const EnergyTotals&) = default;
};

void accrue(const CommandLogEntry& event, const EnergyModel& model, EnergyTotals& totals) noexcept;

// Accrues every entry in log order.
EnergyTotals energy_from_log(std::span<const CommandLogEntry> log, const EnergyModel& model) noexcept;

}  // namespace tldram
