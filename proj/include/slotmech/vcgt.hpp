#pragma once

#include <functional>
#include <mutex>
#include <thread>
#include <utility>
#include <vector>

#include "slotmech/allocation.hpp"
#include "slotmech/errors.hpp"
#include "slotmech/flow.hpp"
#include "slotmech/instance.hpp"
#include "slotmech/value.hpp"

namespace slotmech {

// Welfare-maximizing allocation plus pivot delays: agent i waits for the
// welfare the others lose by her presence. Charging the loss as waiting
// time keeps truthful reporting dominant and participation voluntary.

struct VcgtReport {
  Outcome outcome;
  Value welfare_with{0};
  std::vector<Value> welfare_without;  // optimum with each agent removed
};

inline Allocation allocate_single(const SingleSlotInstance& inst) {
  FlowNetwork net = build_network(inst);
  FlowResult res = solve_max_weight_matching(net);
  return extract_allocation(res, inst);
}

inline Allocation allocate_divisible(const DivisibleInstance& inst) {
  FlowNetwork net = build_network(inst);
  FlowResult res = solve_max_weight_matching(net);
  return extract_allocation(res, inst);
}

namespace detail {

inline void run_indexed(int count, int jobs, const std::function<void(int)>& body) {
  if (jobs <= 1 || count <= 1) {
    for (int i = 0; i < count; ++i) body(i);
    return;
  }
  std::vector<std::thread> workers;
  std::exception_ptr failure;
  std::mutex failure_mutex;
  for (int w = 0; w < jobs; ++w) {
    workers.emplace_back([&, w] {
      try {
        for (int i = w; i < count; i += jobs) body(i);
      } catch (...) {
        const std::lock_guard<std::mutex> lock(failure_mutex);
        if (!failure) failure = std::current_exception();
      }
    });
  }
  for (auto& t : workers) t.join();
  if (failure) std::rethrow_exception(failure);
}

}  // namespace detail

// Pivot delays from first principles: one optimal solve with everyone, then
// one per agent with that agent removed. Results are exact integers;
// reduced solves are read-only on the shared instance and may run in
// parallel when jobs > 1.
template <typename Instance>
std::vector<Value> vcg_delays(const Instance& inst,
                              const std::function<Allocation(const Instance&)>& allocator,
                              int jobs = 1) {
  const int n = inst.agent_count();
  const Allocation full = allocator(inst);
  const Value welfare_with = welfare(inst, full);

  std::vector<Value> delays(n, Value{0});
  detail::run_indexed(n, jobs, [&](int i) {
    const Instance reduced = remove_agent(inst, i);
    Value welfare_without{0};
    if (reduced.agent_count() > 0) {
      welfare_without = welfare(reduced, allocator(reduced));
    }
    const Value others_with = welfare_with - allocated_value(inst, full, i);
    delays[i] = welfare_without - others_with;
    internal_check(delays[i].amount >= 0, "pivot delay must be non-negative");
  });
  return delays;
}

inline std::vector<Value> vcg_delays(const SingleSlotInstance& inst, int jobs = 1) {
  return vcg_delays<SingleSlotInstance>(inst, allocate_single, jobs);
}

inline std::vector<Value> vcg_delays(const DivisibleInstance& inst, int jobs = 1) {
  return vcg_delays<DivisibleInstance>(inst, allocate_divisible, jobs);
}

namespace detail {

// Dijkstra over the final residual network with one agent's unit removed:
// the agent node is cut out entirely and the freed unit reopens capacity on
// its slot->sink arc. That arc is the only one whose reduced cost may be
// negative, so it is excluded here and considered only as the closing hop
// of a candidate path or cycle.
inline std::vector<std::int64_t> removed_agent_dijkstra(const FlowNetwork& net,
                                                        const std::vector<std::int64_t>& pi,
                                                        int start, int banned_node,
                                                        int freed_slot_node) {
  std::vector<std::int64_t> dist(net.node_count(), kDistInf);
  using Item = std::pair<std::int64_t, int>;
  std::priority_queue<Item, std::vector<Item>, std::greater<Item>> pq;
  dist[start] = 0;
  pq.emplace(0, start);
  while (!pq.empty()) {
    auto [d, u] = pq.top();
    pq.pop();
    if (d != dist[u] || u == banned_node) continue;
    for (const FlowEdge& e : net.graph[u]) {
      if (e.to == banned_node) continue;
      std::int64_t cap = e.cap;
      if (u == freed_slot_node && e.to == net.sink() && e.forward) continue;
      if (u == net.sink() && e.to == freed_slot_node && !e.forward) cap -= 1;
      if (cap <= 0) continue;
      const std::int64_t rc = e.cost + pi[u] - pi[e.to];
      internal_check(rc >= 0, "negative reduced cost in removed-agent query");
      if (d + rc < dist[e.to]) {
        dist[e.to] = d + rc;
        pq.emplace(dist[e.to], e.to);
      }
    }
  }
  return dist;
}

}  // namespace detail

// Marginal re-optimization after removing one matched single-slot agent.
// Dropping the agent's unit leaves a flow that is optimal except for at
// most one improving structure through the freed slot capacity: either a
// fresh source->sink path ending at that slot, or a rotation cycle from the
// sink back to it. Two Dijkstras on the certified residual network find the
// cheaper of the two; its (negative) cost is exactly the welfare the rest
// of the agents recover, i.e. the pivot delay.
inline std::vector<Value> clarke_delays_assignment(const SingleSlotInstance& inst,
                                                   const FlowNetwork& net,
                                                   const FlowResult& result) {
  const int n = inst.agent_count();
  const int m = inst.slot_count;
  const auto& pi = result.potential;
  std::vector<Value> delays(n, Value{0});
  for (int i = 0; i < n; ++i) {
    int slot = Allocation::kUnassigned;
    for (int j = 0; j < m; ++j) {
      if (result.assigned(i, j, m)) slot = j;
    }
    if (slot == Allocation::kUnassigned) continue;  // removal changes nothing

    const int agent_node = net.agent_node(i);
    const int slot_node = net.slot_node(slot);
    const auto from_source =
        detail::removed_agent_dijkstra(net, pi, net.source(), agent_node, slot_node);
    const auto from_sink =
        detail::removed_agent_dijkstra(net, pi, net.sink(), agent_node, slot_node);

    std::int64_t best = 0;
    if (from_source[slot_node] < detail::kDistInf) {
      best = std::min(best, from_source[slot_node] + pi[slot_node]);  // pi[source] == 0
    }
    if (from_sink[slot_node] < detail::kDistInf) {
      best = std::min(best, from_sink[slot_node] + pi[slot_node] - pi[net.sink()]);
    }
    delays[i] = Value{-best};
  }
  return delays;
}

inline VcgtReport run_vcgt_report(const SingleSlotInstance& inst) {
  const int n = inst.agent_count();
  FlowNetwork net = build_network(inst);
  FlowResult res = solve_max_weight_matching(net);
  Allocation alloc = extract_allocation(res, inst);

  VcgtReport report;
  report.welfare_with = res.total_value;
  report.outcome.delays = clarke_delays_assignment(inst, net, res);
  report.welfare_without.resize(n);
  for (int i = 0; i < n; ++i) {
    report.welfare_without[i] =
        report.welfare_with - allocated_value(inst, alloc, i) + report.outcome.delays[i];
  }
  report.outcome.allocation = std::move(alloc);
  return report;
}

inline VcgtReport run_vcgt_report(const DivisibleInstance& inst, int jobs = 1) {
  VcgtReport report;
  report.outcome.allocation = allocate_divisible(inst);
  report.welfare_with = welfare(inst, report.outcome.allocation);
  report.outcome.delays = vcg_delays(inst, jobs);
  const int n = inst.agent_count();
  report.welfare_without.resize(n);
  for (int i = 0; i < n; ++i) {
    report.welfare_without[i] = report.welfare_with -
                                allocated_value(inst, report.outcome.allocation, i) +
                                report.outcome.delays[i];
  }
  return report;
}

template <typename Instance>
Outcome run_vcgt(const Instance& inst) {
  return run_vcgt_report(inst).outcome;
}

}  // namespace slotmech
