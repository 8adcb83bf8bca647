#pragma once

#include <string>
#include <variant>
#include <vector>

#include "slotmech/errors.hpp"
#include "slotmech/value.hpp"

namespace slotmech {

// One-slot-per-agent allocation problem: n agents, m slots of capacity k,
// values[i][j] = how long agent i would wait for slot j.
struct SingleSlotInstance {
  int slot_count = 0;
  int capacity = 0;
  std::int64_t scale = kDefaultScale;
  std::vector<std::string> ids;
  std::vector<std::vector<Value>> values;  // n x m

  int agent_count() const { return static_cast<int>(values.size()); }
};

// Indivisible jobs of public length l_i occupying contiguous slots;
// values[i][j] is the valuation when the job starts at slot j. Starts that
// cannot finish within the period carry value zero by convention.
struct MultiSlotInstance {
  int slot_count = 0;
  int capacity = 0;
  std::int64_t scale = kDefaultScale;
  std::vector<std::string> ids;
  std::vector<std::vector<Value>> values;  // n x m, start-slot values
  std::vector<int> lengths;

  int agent_count() const { return static_cast<int>(values.size()); }
  int feasible_starts(int agent) const { return slot_count - lengths[agent] + 1; }
};

// Divisible jobs: agent i may hold up to l_i distinct slots, one unit each,
// and values are per-slot and additive.
struct DivisibleInstance {
  int slot_count = 0;
  int capacity = 0;
  std::int64_t scale = kDefaultScale;
  std::vector<std::string> ids;
  std::vector<std::vector<Value>> values;  // n x m, per-slot values
  std::vector<int> lengths;

  int agent_count() const { return static_cast<int>(values.size()); }
};

using AnyInstance = std::variant<SingleSlotInstance, MultiSlotInstance, DivisibleInstance>;

inline std::vector<std::string> default_ids(int n) {
  std::vector<std::string> ids;
  ids.reserve(n);
  for (int i = 0; i < n; ++i) ids.push_back("a" + std::to_string(i + 1));
  return ids;
}

// Zero out start positions from which a job of the given length cannot
// finish within the period. Generators and parsers call this so that every
// instance in the system obeys the convention from day one.
inline void apply_zero_tail(MultiSlotInstance& inst) {
  for (int i = 0; i < inst.agent_count(); ++i) {
    for (int j = inst.slot_count - inst.lengths[i] + 1; j < inst.slot_count; ++j) {
      if (j >= 0) inst.values[i][j] = Value{0};
    }
  }
}

namespace detail {

inline void validate_common(int slot_count, int capacity, std::int64_t scale,
                            const std::vector<std::string>& ids,
                            const std::vector<std::vector<Value>>& values,
                            std::vector<std::string>& out) {
  if (slot_count < 1) out.push_back("slot count must be >= 1");
  if (capacity < 1) out.push_back("capacity must be >= 1");
  if (scale < 1) out.push_back("scale must be >= 1");
  if (values.empty()) out.push_back("at least one agent required");
  if (ids.size() != values.size()) out.push_back("id count does not match agent count");
  for (std::size_t i = 0; i < values.size(); ++i) {
    if (static_cast<int>(values[i].size()) != slot_count) {
      out.push_back("agent " + std::to_string(i + 1) + ": value row length != slot count");
      continue;
    }
    for (const Value& v : values[i]) {
      if (v.amount < 0) {
        out.push_back("agent " + std::to_string(i + 1) + ": negative valuation");
        break;
      }
    }
  }
}

inline void validate_lengths(const std::vector<int>& lengths, std::size_t n, int m,
                             std::vector<std::string>& out) {
  if (lengths.size() != n) {
    out.push_back("length count does not match agent count");
    return;
  }
  for (std::size_t i = 0; i < lengths.size(); ++i) {
    if (lengths[i] < 1 || lengths[i] > m) {
      out.push_back("agent " + std::to_string(i + 1) + ": length out of [1, m]");
    }
  }
}

}  // namespace detail

// Every violation is reported, none aborts.
inline std::vector<std::string> validate_instance(const SingleSlotInstance& inst) {
  std::vector<std::string> out;
  detail::validate_common(inst.slot_count, inst.capacity, inst.scale, inst.ids, inst.values, out);
  return out;
}

inline std::vector<std::string> validate_instance(const MultiSlotInstance& inst) {
  std::vector<std::string> out;
  detail::validate_common(inst.slot_count, inst.capacity, inst.scale, inst.ids, inst.values, out);
  detail::validate_lengths(inst.lengths, inst.values.size(), inst.slot_count, out);
  if (inst.lengths.size() == inst.values.size()) {
    for (int i = 0; i < inst.agent_count(); ++i) {
      if (static_cast<int>(inst.values[i].size()) != inst.slot_count) continue;
      if (inst.lengths[i] < 1 || inst.lengths[i] > inst.slot_count) continue;
      for (int j = inst.slot_count - inst.lengths[i] + 1; j < inst.slot_count; ++j) {
        if (inst.values[i][j].amount != 0) {
          out.push_back("agent " + std::to_string(i + 1) + ": nonzero infeasible start value");
          break;
        }
      }
    }
  }
  return out;
}

inline std::vector<std::string> validate_instance(const DivisibleInstance& inst) {
  std::vector<std::string> out;
  detail::validate_common(inst.slot_count, inst.capacity, inst.scale, inst.ids, inst.values, out);
  detail::validate_lengths(inst.lengths, inst.values.size(), inst.slot_count, out);
  return out;
}

inline std::vector<std::string> validate_instance(const AnyInstance& inst) {
  return std::visit([](const auto& x) { return validate_instance(x); }, inst);
}

inline void require_valid(const AnyInstance& inst) {
  auto violations = validate_instance(inst);
  if (!violations.empty()) {
    std::string msg = "invalid instance:";
    for (const auto& v : violations) msg += "\n  - " + v;
    throw InvalidInputError(msg);
  }
}

template <typename Instance>
Instance remove_agent(const Instance& inst, int agent) {
  Instance out = inst;
  out.ids.erase(out.ids.begin() + agent);
  out.values.erase(out.values.begin() + agent);
  if constexpr (!std::is_same_v<Instance, SingleSlotInstance>) {
    out.lengths.erase(out.lengths.begin() + agent);
  }
  return out;
}

}  // namespace slotmech
