#pragma once

#include <cstdio>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "slotmech/allocation.hpp"
#include "slotmech/errors.hpp"
#include "slotmech/instance.hpp"
#include "slotmech/maa.hpp"
#include "slotmech/oracle.hpp"
#include "slotmech/vcgt.hpp"

namespace slotmech {

using nlohmann::json;

// Instance files:
//   {"kind":"single"|"multi"|"divisible","slots":m,"capacity":k,"scale":S,
//    "agents":[{"id":str,"length":int,"values":[int,...]}]}
// Values are pre-scaled integers; length defaults to 1. Slot indices in all
// outputs are 1-based.

inline json instance_to_json(const AnyInstance& instance) {
  json out;
  std::visit(
      [&](const auto& inst) {
        using T = std::decay_t<decltype(inst)>;
        if constexpr (std::is_same_v<T, SingleSlotInstance>) {
          out["kind"] = "single";
        } else if constexpr (std::is_same_v<T, MultiSlotInstance>) {
          out["kind"] = "multi";
        } else {
          out["kind"] = "divisible";
        }
        out["slots"] = inst.slot_count;
        out["capacity"] = inst.capacity;
        out["scale"] = inst.scale;
        json agents = json::array();
        for (int i = 0; i < inst.agent_count(); ++i) {
          json agent;
          agent["id"] = inst.ids[i];
          if constexpr (!std::is_same_v<T, SingleSlotInstance>) {
            agent["length"] = inst.lengths[i];
          }
          json values = json::array();
          for (const Value& v : inst.values[i]) values.push_back(v.amount);
          agent["values"] = std::move(values);
          agents.push_back(std::move(agent));
        }
        out["agents"] = std::move(agents);
      },
      instance);
  return out;
}

inline AnyInstance instance_from_json(const json& j) {
  require_input(j.is_object(), "instance: top level must be an object");
  require_input(j.contains("kind") && j["kind"].is_string(), "instance: missing kind");
  require_input(j.contains("slots") && j["slots"].is_number_integer(), "instance: missing slots");
  require_input(j.contains("capacity") && j["capacity"].is_number_integer(),
                "instance: missing capacity");
  require_input(j.contains("agents") && j["agents"].is_array(), "instance: missing agents");

  const std::string kind = j["kind"].get<std::string>();
  const int m = j["slots"].get<int>();
  const int k = j["capacity"].get<int>();
  const std::int64_t scale = j.value("scale", kDefaultScale);

  std::vector<std::string> ids;
  std::vector<std::vector<Value>> values;
  std::vector<int> lengths;
  int index = 0;
  for (const json& agent : j["agents"]) {
    require_input(agent.is_object(), "instance: agent entries must be objects");
    ids.push_back(agent.value("id", "a" + std::to_string(index + 1)));
    lengths.push_back(agent.value("length", 1));
    require_input(agent.contains("values") && agent["values"].is_array(),
                  "instance: agent missing values");
    std::vector<Value> row;
    for (const json& v : agent["values"]) {
      require_input(v.is_number_integer(), "instance: values must be pre-scaled integers");
      row.push_back(Value{v.get<std::int64_t>()});
    }
    values.push_back(std::move(row));
    ++index;
  }

  AnyInstance out;
  if (kind == "single") {
    for (int l : lengths) {
      require_input(l == 1, "instance: single-slot agents must have length 1");
    }
    out = SingleSlotInstance{m, k, scale, std::move(ids), std::move(values)};
  } else if (kind == "multi") {
    out = MultiSlotInstance{m, k, scale, std::move(ids), std::move(values), std::move(lengths)};
  } else if (kind == "divisible") {
    out = DivisibleInstance{m, k, scale, std::move(ids), std::move(values), std::move(lengths)};
  } else {
    throw InvalidInputError("instance: unknown kind '" + kind + "'");
  }
  require_valid(out);
  return out;
}

inline AnyInstance load_instance(const std::string& path) {
  std::ifstream in(path);
  require_input(in.good(), "cannot open instance file: " + path);
  json j;
  try {
    in >> j;
  } catch (const json::exception& e) {
    throw InvalidInputError("instance JSON parse error in " + path + ": " + e.what());
  }
  return instance_from_json(j);
}

// Outcome payload shared by all mechanisms:
//   {"allocation":[{"agent":id,"slot":int|null}|{"agent":id,"slots":[int]}],
//    "delays":[int],"scale":S,"welfare":int}
inline json outcome_to_json(const std::vector<std::string>& ids, std::int64_t scale,
                            const Outcome& outcome, Value total_welfare) {
  json out;
  json allocation = json::array();
  for (int i = 0; i < outcome.allocation.agent_count(); ++i) {
    json entry;
    entry["agent"] = ids[i];
    if (outcome.allocation.kind == Allocation::Kind::Divisible) {
      json slots = json::array();
      for (int j : outcome.allocation.bundles[i]) slots.push_back(j + 1);
      entry["slots"] = std::move(slots);
    } else {
      const int s = outcome.allocation.assigned[i];
      if (s == Allocation::kUnassigned) {
        entry["slot"] = nullptr;
      } else {
        entry["slot"] = s + 1;
      }
    }
    allocation.push_back(std::move(entry));
  }
  out["allocation"] = std::move(allocation);
  json delays = json::array();
  for (const Value& d : outcome.delays) delays.push_back(d.amount);
  out["delays"] = std::move(delays);
  out["scale"] = scale;
  out["welfare"] = total_welfare.amount;
  return out;
}

// Posted-price outcomes carry an audit trail of the price schedule.
inline json maa_result_to_json(const MultiSlotInstance& inst, const MaaResult& result) {
  json out = outcome_to_json(inst.ids, inst.scale, result.outcome, result.welfare);
  out["prices_final"] = result.prices_final;
  out["occupancy"] = result.occupancy_total;
  json order = json::array();
  for (int i : result.order) order.push_back(inst.ids[i]);
  out["order"] = std::move(order);
  return out;
}

inline json probe_report_to_json(const ProbeReport& report) {
  json out;
  out["mechanism"] = report.mechanism;
  out["suite"] = report.suite;
  out["trials"] = report.trials;
  out["tolerance"] = report.tolerance;
  out["max_gain"] = report.max_gain;
  json violations = json::array();
  for (const ProbeViolation& v : report.violations) {
    json entry;
    entry["trial"] = v.trial;
    entry["seed"] = v.stream_seed;
    entry["agent"] = v.agent;
    entry["misreport"] = v.misreport;
    entry["truthful_utility"] = v.truthful_utility;
    entry["deviating_utility"] = v.deviating_utility;
    entry["gain"] = v.gain;
    violations.push_back(std::move(entry));
  }
  out["violations"] = std::move(violations);
  return out;
}

inline std::string dump_json(const json& j) { return j.dump() + "\n"; }

inline void write_text_file(const std::string& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary);
  require_input(out.good(), "cannot open output file: " + path);
  out << content;
  require_input(out.good(), "write failed: " + path);
}

inline std::string read_text_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  require_input(in.good(), "cannot open file: " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

// Floats in CSV output carry six significant digits.
inline std::string format_g6(double x) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.6g", x);
  return buf;
}

}  // namespace slotmech
