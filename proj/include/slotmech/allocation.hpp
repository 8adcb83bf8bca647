#pragma once

#include <algorithm>
#include <vector>

#include "slotmech/errors.hpp"
#include "slotmech/instance.hpp"
#include "slotmech/value.hpp"

namespace slotmech {

// Allocation for all three job models. Single/multi keep one slot (or start
// slot) per agent, divisible keeps a set of slots per agent. Slot indices
// are 0-based internally; serialization shifts to 1-based.
struct Allocation {
  enum class Kind { Single, Multi, Divisible };
  static constexpr int kUnassigned = -1;

  Kind kind = Kind::Single;
  std::vector<int> assigned;                // single/multi: slot or start, -1 if none
  std::vector<std::vector<int>> bundles;    // divisible: sorted slot sets

  static Allocation single(std::vector<int> a) {
    Allocation out;
    out.kind = Kind::Single;
    out.assigned = std::move(a);
    return out;
  }
  static Allocation multi(std::vector<int> a) {
    Allocation out;
    out.kind = Kind::Multi;
    out.assigned = std::move(a);
    return out;
  }
  static Allocation divisible(std::vector<std::vector<int>> b) {
    Allocation out;
    out.kind = Kind::Divisible;
    out.bundles = std::move(b);
    return out;
  }

  int agent_count() const {
    return static_cast<int>(kind == Kind::Divisible ? bundles.size() : assigned.size());
  }

  bool is_allocated(int agent) const {
    if (kind == Kind::Divisible) return !bundles[agent].empty();
    return assigned[agent] != kUnassigned;
  }
};

// Full mechanism output: who goes where, and how long each agent must wait
// before the next request. Unallocated agents wait zero.
struct Outcome {
  Allocation allocation;
  std::vector<Value> delays;
};

inline std::vector<int> slot_loads(const SingleSlotInstance& inst, const Allocation& alloc) {
  std::vector<int> loads(inst.slot_count, 0);
  for (int i = 0; i < alloc.agent_count(); ++i) {
    if (alloc.assigned[i] != Allocation::kUnassigned) loads[alloc.assigned[i]]++;
  }
  return loads;
}

inline std::vector<int> slot_loads(const MultiSlotInstance& inst, const Allocation& alloc) {
  std::vector<int> loads(inst.slot_count, 0);
  for (int i = 0; i < alloc.agent_count(); ++i) {
    const int s = alloc.assigned[i];
    if (s == Allocation::kUnassigned) continue;
    for (int j = s; j < s + inst.lengths[i] && j < inst.slot_count; ++j) loads[j]++;
  }
  return loads;
}

inline std::vector<int> slot_loads(const DivisibleInstance& inst, const Allocation& alloc) {
  std::vector<int> loads(inst.slot_count, 0);
  for (const auto& bundle : alloc.bundles) {
    for (int j : bundle) loads[j]++;
  }
  return loads;
}

inline bool check_feasible(const SingleSlotInstance& inst, const Allocation& alloc) {
  if (alloc.kind != Allocation::Kind::Single) return false;
  if (alloc.agent_count() != inst.agent_count()) return false;
  std::vector<int> loads(inst.slot_count, 0);
  for (int s : alloc.assigned) {
    if (s == Allocation::kUnassigned) continue;
    if (s < 0 || s >= inst.slot_count) return false;
    if (++loads[s] > inst.capacity) return false;
  }
  return true;
}

inline bool check_feasible(const MultiSlotInstance& inst, const Allocation& alloc) {
  if (alloc.kind != Allocation::Kind::Multi) return false;
  if (alloc.agent_count() != inst.agent_count()) return false;
  std::vector<int> loads(inst.slot_count, 0);
  for (int i = 0; i < inst.agent_count(); ++i) {
    const int s = alloc.assigned[i];
    if (s == Allocation::kUnassigned) continue;
    if (s < 0 || s + inst.lengths[i] > inst.slot_count) return false;  // spills past the period
    for (int j = s; j < s + inst.lengths[i]; ++j) {
      if (++loads[j] > inst.capacity) return false;
    }
  }
  return true;
}

inline bool check_feasible(const DivisibleInstance& inst, const Allocation& alloc) {
  if (alloc.kind != Allocation::Kind::Divisible) return false;
  if (alloc.agent_count() != inst.agent_count()) return false;
  std::vector<int> loads(inst.slot_count, 0);
  for (int i = 0; i < inst.agent_count(); ++i) {
    const auto& bundle = alloc.bundles[i];
    if (static_cast<int>(bundle.size()) > inst.lengths[i]) return false;
    std::vector<char> seen(inst.slot_count, 0);
    for (int j : bundle) {
      if (j < 0 || j >= inst.slot_count) return false;
      if (seen[j]) return false;  // at most one unit of each slot
      seen[j] = 1;
      if (++loads[j] > inst.capacity) return false;
    }
  }
  return true;
}

// Value an agent derives from an allocation, before any delay is charged.
inline Value allocated_value(const SingleSlotInstance& inst, const Allocation& alloc, int agent) {
  const int s = alloc.assigned[agent];
  return s == Allocation::kUnassigned ? Value{0} : inst.values[agent][s];
}

inline Value allocated_value(const MultiSlotInstance& inst, const Allocation& alloc, int agent) {
  const int s = alloc.assigned[agent];
  return s == Allocation::kUnassigned ? Value{0} : inst.values[agent][s];
}

inline Value allocated_value(const DivisibleInstance& inst, const Allocation& alloc, int agent) {
  Value total{0};
  for (int j : alloc.bundles[agent]) total += inst.values[agent][j];
  return total;
}

template <typename Instance>
Value welfare(const Instance& inst, const Allocation& alloc) {
  require_input(check_feasible(inst, alloc), "welfare: infeasible allocation");
  Value total{0};
  for (int i = 0; i < inst.agent_count(); ++i) total += allocated_value(inst, alloc, i);
  return total;
}

// Quasi-linear payoff: allocated value minus charged delay.
template <typename Instance>
Value utility(const Instance& inst, const Outcome& outcome, int agent) {
  require_input(agent >= 0 && agent < inst.agent_count(), "utility: agent out of range");
  require_input(static_cast<int>(outcome.delays.size()) == inst.agent_count(),
                "utility: delay vector length mismatch");
  require_input(outcome.allocation.agent_count() == inst.agent_count(),
                "utility: allocation size mismatch");
  return allocated_value(inst, outcome.allocation, agent) - outcome.delays[agent];
}

}  // namespace slotmech
