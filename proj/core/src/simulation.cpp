#include "tldram/simulation.hpp"

#include <algorithm>
#include <optional>
#include <string>

#include "tldram/error.hpp"

namespace tldram {

SimulationResult simulate(const SimulationInput& input) {
  input.energy.validate();
  DramDevice device(input.device);
  Controller controller(device, input.policy, input.controller);

  const auto n = static_cast<std::uint32_t>(input.traces.size());
  std::vector<CoreState> cores;
  cores.reserve(n);
  for (std::uint32_t i = 0; i < n; ++i) cores.emplace_back(CoreModel{i, input.non_memory_ipc}, input.traces[i]);

  SimulationResult result;
  RunCounters& rc = result.counters;
  rc.cores.resize(n);
  for (std::uint32_t i = 0; i < n; ++i) rc.cores[i].core_id = i;

  std::vector<std::optional<Cycle>> read_done(n);
  std::vector<ServedRequest> served;
  std::uint64_t next_id = 0;
  std::size_t accrued = 0;
  Cycle last_completion = 0;
  Cycle last_progress = 0;

  Cycle now = 0;
  for (;; ++now) {
    bool progress = false;
    for (std::uint32_t i = 0; i < n; ++i) {
      if (read_done[i] && *read_done[i] == now) {
        cores[i].complete_read(now);
        read_done[i].reset();
        progress = true;
      }
    }

    const bool cores_done = std::all_of(cores.begin(), cores.end(), [](const CoreState& c) { return c.done(); });
    if (cores_done && controller.idle() && now >= last_completion) break;

    for (std::uint32_t k = 0; k < n; ++k) {
      const std::uint32_t i = static_cast<std::uint32_t>((now + k) % n);
      CoreState& core = cores[i];
      bool can_issue = true;
      if (const TraceRecord* next = core.pending_request()) {
        try {
          can_issue = controller.can_accept(controller.mapper().decode(next->address).channel);
        } catch (const RequestError&) {
          can_issue = true;  // dropped on issue below
        }
      }
      const auto step = core.step(now, can_issue);
      if (step.retired > 0) progress = true;
      if (!step.request) continue;
      progress = true;
      const Request req{next_id++, i, now, step.request->kind, step.request->address};
      try {
        controller.enqueue(req, now);
      } catch (const RequestError&) {
        ++rc.cores[i].dropped;
        if (req.kind == RequestKind::read) core.complete_read(now);
      }
    }

    served.clear();
    controller.tick(now, served);
    for (const auto& s : served) {
      const auto i = s.request.core_id;
      auto& cc = rc.cores[i];
      (s.request.kind == RequestKind::read ? cc.reads : cc.writes) += 1;
      cc.latencies.push_back(s.completion - s.request.arrival);
      result.requests.push_back(
          {s.request.id, i, s.request.kind, s.request.address, s.request.arrival, s.completion, s.served_from});
      if (s.request.kind == RequestKind::read) read_done[i] = s.completion;
      last_completion = std::max(last_completion, s.completion);
    }

    const auto& log = device.log();
    if (log.size() > accrued) progress = true;
    for (; accrued < log.size(); ++accrued) accrue(log[accrued], input.energy, rc.energy);

    if (progress) {
      last_progress = now;
    } else if (now - last_progress > input.stall_limit) {
      throw Error("simulation made no progress for " + std::to_string(input.stall_limit) + " cycles at cycle " +
                  std::to_string(now));
    }
  }

  rc.cycles = now;
  for (std::uint32_t i = 0; i < n; ++i) {
    rc.cores[i].retired = cores[i].retired();
    rc.cores[i].cycles = cores[i].finish_cycle();
  }
  rc.cache = controller.counters();
  rc.epochs = controller.epochs();
  rc.transfers = device.transfers().size();
  result.log = device.log();
  result.transfers = device.transfers();
  return result;
}

}  // namespace tldram
