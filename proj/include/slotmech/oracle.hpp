#pragma once

#include <algorithm>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "slotmech/allocation.hpp"
#include "slotmech/errors.hpp"
#include "slotmech/instance.hpp"
#include "slotmech/maa.hpp"
#include "slotmech/rng.hpp"
#include "slotmech/vcgt.hpp"

namespace slotmech {

// Ground-truth solvers and strategic-behavior probes. Everything here is
// deliberately independent of the flow solver: depth-first enumeration over
// per-agent choices with a remaining-value upper bound for pruning, first
// optimum found in a fixed order kept for determinism.

struct BruteForceResult {
  Allocation allocation;
  Value welfare{0};
};

namespace detail {

inline constexpr std::int64_t kEnumerationGuard = 10'000'000;

inline void check_enumeration_size(std::int64_t per_agent_options, int agents,
                                   std::int64_t guard) {
  std::int64_t total = 1;
  for (int i = 0; i < agents; ++i) {
    if (total > guard / std::max<std::int64_t>(per_agent_options, 1)) {
      throw InstanceTooLargeError("instance too large for exhaustive enumeration");
    }
    total *= std::max<std::int64_t>(per_agent_options, 1);
  }
}

struct SlotOption {
  std::int64_t value = 0;
  int slot = 0;
};

// Positive-value choices in slot order, so the first optimum found is the
// lexicographically smallest assignment. Skipping zero-value choices is
// welfare-preserving because dropping them keeps the allocation feasible.
inline std::vector<SlotOption> positive_options(const std::vector<Value>& row, int limit) {
  std::vector<SlotOption> options;
  for (int j = 0; j < limit; ++j) {
    if (row[j].amount > 0) options.push_back({row[j].amount, j});
  }
  return options;
}

inline std::int64_t best_option_value(const std::vector<SlotOption>& options) {
  std::int64_t best = 0;
  for (const SlotOption& opt : options) best = std::max(best, opt.value);
  return best;
}

}  // namespace detail

inline BruteForceResult brute_force_single(const SingleSlotInstance& inst) {
  const int n = inst.agent_count();
  const int m = inst.slot_count;
  detail::check_enumeration_size(m + 1, n, detail::kEnumerationGuard);

  std::vector<std::vector<detail::SlotOption>> options(n);
  std::vector<std::int64_t> suffix_bound(n + 1, 0);
  for (int i = 0; i < n; ++i) options[i] = detail::positive_options(inst.values[i], m);
  for (int i = n - 1; i >= 0; --i) {
    suffix_bound[i] = suffix_bound[i + 1] + detail::best_option_value(options[i]);
  }

  std::vector<int> loads(m, 0);
  std::vector<int> pick(n, Allocation::kUnassigned);
  std::vector<int> best_pick(n, Allocation::kUnassigned);
  std::int64_t best = -1;

  auto dfs = [&](auto&& self, int i, std::int64_t acc) -> void {
    if (acc + suffix_bound[i] <= best) return;
    if (i == n) {
      best = acc;
      best_pick = pick;
      return;
    }
    for (const auto& opt : options[i]) {
      if (loads[opt.slot] >= inst.capacity) continue;
      loads[opt.slot]++;
      pick[i] = opt.slot;
      self(self, i + 1, acc + opt.value);
      pick[i] = Allocation::kUnassigned;
      loads[opt.slot]--;
    }
    self(self, i + 1, acc);
  };
  dfs(dfs, 0, 0);

  return {Allocation::single(std::move(best_pick)), Value{best}};
}

inline BruteForceResult brute_force_mia(const MultiSlotInstance& inst) {
  const int n = inst.agent_count();
  const int m = inst.slot_count;
  int min_len = m;
  for (int l : inst.lengths) min_len = std::min(min_len, l);
  detail::check_enumeration_size(m - min_len + 2, n, detail::kEnumerationGuard);

  std::vector<std::vector<detail::SlotOption>> options(n);
  std::vector<std::int64_t> suffix_bound(n + 1, 0);
  for (int i = 0; i < n; ++i) {
    options[i] = detail::positive_options(inst.values[i], inst.feasible_starts(i));
  }
  for (int i = n - 1; i >= 0; --i) {
    suffix_bound[i] = suffix_bound[i + 1] + detail::best_option_value(options[i]);
  }

  std::vector<int> loads(m, 0);
  std::vector<int> pick(n, Allocation::kUnassigned);
  std::vector<int> best_pick(n, Allocation::kUnassigned);
  std::int64_t best = -1;

  auto fits = [&](int start, int len) {
    for (int j = start; j < start + len; ++j) {
      if (loads[j] >= inst.capacity) return false;
    }
    return true;
  };
  auto dfs = [&](auto&& self, int i, std::int64_t acc) -> void {
    if (acc + suffix_bound[i] <= best) return;
    if (i == n) {
      best = acc;
      best_pick = pick;
      return;
    }
    for (const auto& opt : options[i]) {
      if (!fits(opt.slot, inst.lengths[i])) continue;
      for (int j = opt.slot; j < opt.slot + inst.lengths[i]; ++j) loads[j]++;
      pick[i] = opt.slot;
      self(self, i + 1, acc + opt.value);
      pick[i] = Allocation::kUnassigned;
      for (int j = opt.slot; j < opt.slot + inst.lengths[i]; ++j) loads[j]--;
    }
    self(self, i + 1, acc);
  };
  dfs(dfs, 0, 0);

  return {Allocation::multi(std::move(best_pick)), Value{best}};
}

inline BruteForceResult brute_force_divisible(const DivisibleInstance& inst) {
  const int n = inst.agent_count();
  const int m = inst.slot_count;
  if (m > 20) throw InstanceTooLargeError("divisible enumeration limited to m <= 20");

  struct MaskOption {
    std::int64_t value = 0;
    unsigned mask = 0;
  };
  std::vector<std::vector<MaskOption>> options(n);
  std::int64_t total_options = 1;
  for (int i = 0; i < n; ++i) {
    for (unsigned mask = 1; mask < (1u << m); ++mask) {
      if (__builtin_popcount(mask) > inst.lengths[i]) continue;
      std::int64_t value = 0;
      bool all_positive = true;
      for (int j = 0; j < m; ++j) {
        if (!(mask & (1u << j))) continue;
        if (inst.values[i][j].amount <= 0) {
          all_positive = false;
          break;
        }
        value += inst.values[i][j].amount;
      }
      if (all_positive) options[i].push_back({value, mask});
    }
    total_options *= static_cast<std::int64_t>(options[i].size()) + 1;
    if (total_options > 10 * detail::kEnumerationGuard) {
      throw InstanceTooLargeError("instance too large for exhaustive enumeration");
    }
  }

  std::vector<std::int64_t> suffix_bound(n + 1, 0);
  for (int i = n - 1; i >= 0; --i) {
    std::int64_t best_mask = 0;
    for (const MaskOption& opt : options[i]) best_mask = std::max(best_mask, opt.value);
    suffix_bound[i] = suffix_bound[i + 1] + best_mask;
  }

  std::vector<int> loads(m, 0);
  std::vector<unsigned> pick(n, 0);
  std::vector<unsigned> best_pick(n, 0);
  std::int64_t best = -1;

  auto dfs = [&](auto&& self, int i, std::int64_t acc) -> void {
    if (acc + suffix_bound[i] <= best) return;
    if (i == n) {
      best = acc;
      best_pick = pick;
      return;
    }
    for (const auto& opt : options[i]) {
      bool fits = true;
      for (int j = 0; j < m; ++j) {
        if ((opt.mask & (1u << j)) && loads[j] >= inst.capacity) {
          fits = false;
          break;
        }
      }
      if (!fits) continue;
      for (int j = 0; j < m; ++j) {
        if (opt.mask & (1u << j)) loads[j]++;
      }
      pick[i] = opt.mask;
      self(self, i + 1, acc + opt.value);
      pick[i] = 0;
      for (int j = 0; j < m; ++j) {
        if (opt.mask & (1u << j)) loads[j]--;
      }
    }
    self(self, i + 1, acc);
  };
  dfs(dfs, 0, 0);

  std::vector<std::vector<int>> bundles(n);
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < m; ++j) {
      if (best_pick[i] & (1u << j)) bundles[i].push_back(j);
    }
  }
  return {Allocation::divisible(std::move(bundles)), Value{best}};
}

// Multi-unit combinatorial auction instance: goods with multiplicities and
// per-agent demand sets of bundles, at most one unit of a good per bundle.
struct MucaBundle {
  std::vector<int> goods;
  Value value{0};
};

struct MucaInstance {
  int good_count = 0;
  std::vector<int> multiplicity;
  std::vector<std::vector<MucaBundle>> demand;
};

// Slots become goods of multiplicity k; each feasible start of a job
// becomes one bundle of contiguous slots valued at the start valuation.
inline MucaInstance reduce_mia_to_muca(const MultiSlotInstance& inst) {
  MucaInstance muca;
  muca.good_count = inst.slot_count;
  muca.multiplicity.assign(inst.slot_count, inst.capacity);
  muca.demand.resize(inst.agent_count());
  for (int i = 0; i < inst.agent_count(); ++i) {
    for (int s = 0; s < inst.feasible_starts(i); ++s) {
      MucaBundle bundle;
      bundle.value = inst.values[i][s];
      for (int j = s; j < s + inst.lengths[i]; ++j) bundle.goods.push_back(j);
      muca.demand[i].push_back(std::move(bundle));
    }
  }
  return muca;
}

struct MucaResult {
  std::vector<int> chosen_bundle;  // index into the demand set, -1 if none
  Value welfare{0};
};

inline MucaResult brute_force_muca(const MucaInstance& muca) {
  const int n = static_cast<int>(muca.demand.size());
  std::int64_t total = 1;
  for (const auto& d : muca.demand) {
    if (total > detail::kEnumerationGuard / (static_cast<std::int64_t>(d.size()) + 1)) {
      throw InstanceTooLargeError("instance too large for exhaustive enumeration");
    }
    total *= static_cast<std::int64_t>(d.size()) + 1;
  }

  std::vector<std::int64_t> suffix_bound(n + 1, 0);
  for (int i = n - 1; i >= 0; --i) {
    std::int64_t best_bundle = 0;
    for (const auto& b : muca.demand[i]) best_bundle = std::max(best_bundle, b.value.amount);
    suffix_bound[i] = suffix_bound[i + 1] + best_bundle;
  }

  std::vector<int> available = muca.multiplicity;
  std::vector<int> pick(n, -1);
  std::vector<int> best_pick(n, -1);
  std::int64_t best = -1;

  auto dfs = [&](auto&& self, int i, std::int64_t acc) -> void {
    if (acc + suffix_bound[i] <= best) return;
    if (i == n) {
      best = acc;
      best_pick = pick;
      return;
    }
    for (int q = 0; q < static_cast<int>(muca.demand[i].size()); ++q) {
      const MucaBundle& bundle = muca.demand[i][q];
      bool fits = true;
      for (int g : bundle.goods) {
        if (available[g] <= 0) {
          fits = false;
          break;
        }
      }
      if (!fits) continue;
      for (int g : bundle.goods) available[g]--;
      pick[i] = q;
      self(self, i + 1, acc + bundle.value.amount);
      pick[i] = -1;
      for (int g : bundle.goods) available[g]++;
    }
    self(self, i + 1, acc);
  };
  dfs(dfs, 0, 0);

  return {std::move(best_pick), Value{best}};
}

// ---------------------------------------------------------------------------
// Random instance generators shared by probes, property tests, experiments.

inline SingleSlotInstance random_single_instance(Rng& rng, int max_n = 5, int max_m = 4,
                                                 int max_k = 3,
                                                 std::int64_t scale = kDefaultScale) {
  SingleSlotInstance inst;
  const int n = static_cast<int>(rng.uniform_int(1, max_n));
  inst.slot_count = static_cast<int>(rng.uniform_int(1, max_m));
  inst.capacity = static_cast<int>(rng.uniform_int(1, max_k));
  inst.scale = scale;
  inst.ids = default_ids(n);
  inst.values.resize(n);
  for (auto& row : inst.values) {
    row.resize(inst.slot_count);
    for (auto& v : row) v = Value{rng.uniform_int(0, 9 * scale)};
  }
  return inst;
}

inline DivisibleInstance random_divisible_instance(Rng& rng, int max_n = 5, int max_m = 4,
                                                   int max_k = 3, int max_len = 3,
                                                   std::int64_t scale = kDefaultScale) {
  DivisibleInstance inst;
  const int n = static_cast<int>(rng.uniform_int(1, max_n));
  inst.slot_count = static_cast<int>(rng.uniform_int(1, max_m));
  inst.capacity = static_cast<int>(rng.uniform_int(1, max_k));
  inst.scale = scale;
  inst.ids = default_ids(n);
  inst.values.resize(n);
  inst.lengths.resize(n);
  for (int i = 0; i < n; ++i) {
    inst.lengths[i] = static_cast<int>(rng.uniform_int(1, std::min(max_len, inst.slot_count)));
    inst.values[i].resize(inst.slot_count);
    for (auto& v : inst.values[i]) v = Value{rng.uniform_int(0, 9 * scale)};
  }
  return inst;
}

struct MultiGenOptions {
  int max_n = 6;
  int max_m = 6;
  int min_k = 3;
  int max_k = 5;
  int max_len = 3;
  std::int64_t scale = kDefaultScale;
  bool ensure_positive = true;  // guarantees a priceable instance
};

inline MultiSlotInstance random_multi_instance(Rng& rng, const MultiGenOptions& opt = {}) {
  MultiSlotInstance inst;
  const int n = static_cast<int>(rng.uniform_int(1, opt.max_n));
  inst.slot_count = static_cast<int>(rng.uniform_int(1, opt.max_m));
  inst.capacity = static_cast<int>(rng.uniform_int(opt.min_k, opt.max_k));
  inst.scale = opt.scale;
  inst.ids = default_ids(n);
  inst.values.resize(n);
  inst.lengths.resize(n);
  bool any_positive = false;
  for (int i = 0; i < n; ++i) {
    inst.lengths[i] = static_cast<int>(rng.uniform_int(1, std::min(opt.max_len, inst.slot_count)));
    inst.values[i].resize(inst.slot_count);
    for (int j = 0; j < inst.feasible_starts(i); ++j) {
      inst.values[i][j] = Value{rng.uniform_int(0, 9 * opt.scale)};
      any_positive = any_positive || inst.values[i][j].amount > 0;
    }
  }
  if (opt.ensure_positive && !any_positive) {
    inst.values[0][0] = Value{opt.scale};
  }
  apply_zero_tail(inst);
  return inst;
}

// ---------------------------------------------------------------------------
// Strategic probes.

enum class Mechanism { VcgtSingle, VcgtDivisible, Maa };

inline const char* mechanism_name(Mechanism m) {
  switch (m) {
    case Mechanism::VcgtSingle: return "vcgt-single";
    case Mechanism::VcgtDivisible: return "vcgt-divisible";
    case Mechanism::Maa: return "maa";
  }
  return "?";
}

struct ProbeViolation {
  int trial = 0;
  std::uint64_t stream_seed = 0;
  int agent = 0;
  std::string misreport;
  double truthful_utility = 0.0;
  double deviating_utility = 0.0;
  double gain = 0.0;
};

struct ProbeReport {
  std::string mechanism;
  std::string suite;
  int trials = 0;
  double tolerance = 0.0;
  double max_gain = 0.0;
  std::vector<ProbeViolation> violations;

  bool clean() const { return violations.empty(); }
};

namespace detail {

// Fixed adversary family for valuation misreports. Edits one row; callers
// re-apply model rules (zero tail) afterwards where they exist.
inline std::string apply_value_misreport(std::vector<std::vector<Value>>& values, int agent,
                                         Rng& rng) {
  const int m = static_cast<int>(values[agent].size());
  const int n = static_cast<int>(values.size());
  switch (rng.uniform_int(0, 3)) {
    case 0: {
      const int j = static_cast<int>(rng.uniform_int(0, m - 1));
      values[agent][j] = Value{0};
      return "zero_entry";
    }
    case 1: {
      const int j = static_cast<int>(rng.uniform_int(0, m - 1));
      values[agent][j] = values[agent][j] * 2;
      return "double_entry";
    }
    case 2: {
      const int j1 = static_cast<int>(rng.uniform_int(0, m - 1));
      const int j2 = static_cast<int>(rng.uniform_int(0, m - 1));
      std::swap(values[agent][j1], values[agent][j2]);
      return "swap_entries";
    }
    default: {
      const int src = static_cast<int>(rng.uniform_int(0, n - 1));
      values[agent] = values[src];
      return "copy_row";
    }
  }
}

inline double maa_true_utility(const MultiSlotInstance& truth, int agent, int reported_length,
                               const MaaResult& run) {
  const int start = run.outcome.allocation.assigned[agent];
  if (start == Allocation::kUnassigned) return 0.0;
  // A job served shorter than its real length never finishes, so it is
  // worth nothing; a longer reservation still serves the job at its start.
  const double value = reported_length < truth.lengths[agent]
                           ? 0.0
                           : static_cast<double>(truth.values[agent][start].amount);
  return value - run.payments[agent];
}

}  // namespace detail

inline ProbeReport probe_truthfulness(Mechanism mech, int trials, std::uint64_t seed) {
  ProbeReport report;
  report.mechanism = mechanism_name(mech);
  report.suite = "truthfulness";
  report.trials = trials;
  report.tolerance = 0.0;

  for (int trial = 0; trial < trials; ++trial) {
    const std::uint64_t stream_seed = derive_stream_seed(seed, trial);
    Rng rng(stream_seed);
    int agent = 0;
    double u_truth = 0.0;
    double u_dev = 0.0;
    std::string kind;

    if (mech == Mechanism::VcgtSingle) {
      const SingleSlotInstance inst = random_single_instance(rng);
      agent = static_cast<int>(rng.uniform_int(0, inst.agent_count() - 1));
      const Outcome truth = run_vcgt(inst);
      u_truth = static_cast<double>(utility(inst, truth, agent).amount);
      SingleSlotInstance lie = inst;
      kind = detail::apply_value_misreport(lie.values, agent, rng);
      const Outcome dev = run_vcgt(lie);
      u_dev = static_cast<double>(allocated_value(inst, dev.allocation, agent).amount -
                                  dev.delays[agent].amount);
    } else if (mech == Mechanism::VcgtDivisible) {
      const DivisibleInstance inst = random_divisible_instance(rng);
      agent = static_cast<int>(rng.uniform_int(0, inst.agent_count() - 1));
      const Outcome truth = run_vcgt(inst);
      u_truth = static_cast<double>(utility(inst, truth, agent).amount);
      DivisibleInstance lie = inst;
      kind = detail::apply_value_misreport(lie.values, agent, rng);
      const Outcome dev = run_vcgt(lie);
      u_dev = static_cast<double>(allocated_value(inst, dev.allocation, agent).amount -
                                  dev.delays[agent].amount);
    } else {
      const MultiSlotInstance inst = random_multi_instance(rng);
      report.tolerance = price_tolerance(inst.scale);
      agent = static_cast<int>(rng.uniform_int(0, inst.agent_count() - 1));
      const MaaResult truth = run_maa(inst);
      u_truth = detail::maa_true_utility(inst, agent, inst.lengths[agent], truth);

      MultiSlotInstance lie = inst;
      // Value misreports always apply; length misreports where the length
      // can actually move.
      std::vector<int> kinds{0};
      if (inst.lengths[agent] > 1) kinds.push_back(1);
      if (inst.lengths[agent] < inst.slot_count) kinds.push_back(2);
      const int pick = kinds[rng.uniform_int(0, static_cast<int>(kinds.size()) - 1)];
      if (pick == 0) {
        kind = detail::apply_value_misreport(lie.values, agent, rng);
      } else if (pick == 1) {
        lie.lengths[agent] =
            static_cast<int>(rng.uniform_int(1, inst.lengths[agent] - 1));
        kind = "shorter_length";
      } else {
        lie.lengths[agent] =
            static_cast<int>(rng.uniform_int(inst.lengths[agent] + 1, inst.slot_count));
        kind = "longer_length";
      }
      apply_zero_tail(lie);
      try {
        const MaaResult dev = run_maa(lie);
        u_dev = detail::maa_true_utility(inst, agent, lie.lengths[agent], dev);
      } catch (const DegenerateInstanceError&) {
        u_dev = 0.0;  // all-zero reports: nothing allocated, nothing charged
      }
    }

    const double gain = u_dev - u_truth;
    report.max_gain = std::max(report.max_gain, gain);
    if (gain > report.tolerance) {
      report.violations.push_back({trial, stream_seed, agent, kind, u_truth, u_dev, gain});
    }
  }
  return report;
}

// Participation audit: every agent's truthful utility and delay must be
// non-negative on every sampled instance.
inline ProbeReport run_ir_suite(Mechanism mech, int trials, std::uint64_t seed) {
  ProbeReport report;
  report.mechanism = mechanism_name(mech);
  report.suite = "ir";
  report.trials = trials;

  for (int trial = 0; trial < trials; ++trial) {
    const std::uint64_t stream_seed = derive_stream_seed(seed, trial);
    Rng rng(stream_seed);
    auto record = [&](int agent, double u, const char* what) {
      report.violations.push_back({trial, stream_seed, agent, what, u, u, -u});
      report.max_gain = std::max(report.max_gain, -u);
    };
    if (mech == Mechanism::VcgtSingle) {
      const SingleSlotInstance inst = random_single_instance(rng);
      const Outcome out = run_vcgt(inst);
      for (int i = 0; i < inst.agent_count(); ++i) {
        const double u = static_cast<double>(utility(inst, out, i).amount);
        if (u < 0) record(i, u, "negative_utility");
        if (out.delays[i].amount < 0) record(i, u, "negative_delay");
      }
    } else if (mech == Mechanism::VcgtDivisible) {
      const DivisibleInstance inst = random_divisible_instance(rng);
      const Outcome out = run_vcgt(inst);
      for (int i = 0; i < inst.agent_count(); ++i) {
        const double u = static_cast<double>(utility(inst, out, i).amount);
        if (u < 0) record(i, u, "negative_utility");
        if (out.delays[i].amount < 0) record(i, u, "negative_delay");
      }
    } else {
      const MultiSlotInstance inst = random_multi_instance(rng);
      const MaaResult run = run_maa(inst);
      for (int i = 0; i < inst.agent_count(); ++i) {
        const double u = detail::maa_true_utility(inst, i, inst.lengths[i], run);
        if (u < 0) record(i, u, "negative_utility");
        if (run.payments[i] < 0) record(i, u, "negative_payment");
      }
    }
  }
  return report;
}

// Capacity audit for the posted-price mechanism, recounted from the
// returned allocation rather than trusted from the run's own bookkeeping.
inline ProbeReport run_capacity_suite(int trials, std::uint64_t seed) {
  ProbeReport report;
  report.mechanism = mechanism_name(Mechanism::Maa);
  report.suite = "capacity";
  report.trials = trials;

  for (int trial = 0; trial < trials; ++trial) {
    const std::uint64_t stream_seed = derive_stream_seed(seed, trial);
    Rng rng(stream_seed);
    const MultiSlotInstance inst = random_multi_instance(rng);
    const MaaResult run = run_maa(inst);
    const std::vector<int> loads = slot_loads(inst, run.outcome.allocation);
    for (int j = 0; j < inst.slot_count; ++j) {
      if (loads[j] > inst.capacity) {
        report.violations.push_back({trial, stream_seed, -1, "slot_over_capacity",
                                     static_cast<double>(loads[j]),
                                     static_cast<double>(inst.capacity),
                                     static_cast<double>(loads[j] - inst.capacity)});
      }
      if (run.occupancy[j] > inst.capacity - 1) {
        report.violations.push_back({trial, stream_seed, -1, "priced_occupancy_over_bound",
                                     static_cast<double>(run.occupancy[j]),
                                     static_cast<double>(inst.capacity - 1),
                                     static_cast<double>(run.occupancy[j] - inst.capacity + 1)});
      }
    }
  }
  return report;
}

// Efficiency audit against the exhaustive optimum.
inline ProbeReport run_epp_suite(Mechanism mech, int trials, std::uint64_t seed) {
  ProbeReport report;
  report.mechanism = mechanism_name(mech);
  report.suite = "epp";
  report.trials = trials;

  for (int trial = 0; trial < trials; ++trial) {
    const std::uint64_t stream_seed = derive_stream_seed(seed, trial);
    Rng rng(stream_seed);
    Value achieved{0};
    Value optimal{0};
    if (mech == Mechanism::VcgtSingle) {
      const SingleSlotInstance inst = random_single_instance(rng);
      achieved = welfare(inst, allocate_single(inst));
      optimal = brute_force_single(inst).welfare;
    } else if (mech == Mechanism::VcgtDivisible) {
      const DivisibleInstance inst = random_divisible_instance(rng);
      achieved = welfare(inst, allocate_divisible(inst));
      optimal = brute_force_divisible(inst).welfare;
    } else {
      const MultiSlotInstance inst = random_multi_instance(rng);
      achieved = run_maa(inst).welfare;
      optimal = brute_force_mia(inst).welfare;
    }
    if (achieved != optimal) {
      report.violations.push_back({trial, stream_seed, -1, "welfare_gap",
                                   static_cast<double>(achieved.amount),
                                   static_cast<double>(optimal.amount),
                                   static_cast<double>(optimal.amount - achieved.amount)});
      report.max_gain =
          std::max(report.max_gain, static_cast<double>(optimal.amount - achieved.amount));
    }
  }
  return report;
}

// ---------------------------------------------------------------------------
// Predicate wrappers.

inline bool check_ir(Mechanism mech, const AnyInstance& instance) {
  if (mech == Mechanism::VcgtSingle) {
    const auto& inst = std::get<SingleSlotInstance>(instance);
    const Outcome out = run_vcgt(inst);
    for (int i = 0; i < inst.agent_count(); ++i) {
      if (utility(inst, out, i).amount < 0) return false;
    }
    return true;
  }
  if (mech == Mechanism::VcgtDivisible) {
    const auto& inst = std::get<DivisibleInstance>(instance);
    const Outcome out = run_vcgt(inst);
    for (int i = 0; i < inst.agent_count(); ++i) {
      if (utility(inst, out, i).amount < 0) return false;
    }
    return true;
  }
  const auto& inst = std::get<MultiSlotInstance>(instance);
  const MaaResult run = run_maa(inst);
  for (int i = 0; i < inst.agent_count(); ++i) {
    if (detail::maa_true_utility(inst, i, inst.lengths[i], run) < 0) return false;
  }
  return true;
}

inline bool check_epp(Mechanism mech, const AnyInstance& instance) {
  if (mech == Mechanism::VcgtSingle) {
    const auto& inst = std::get<SingleSlotInstance>(instance);
    return welfare(inst, allocate_single(inst)) == brute_force_single(inst).welfare;
  }
  if (mech == Mechanism::VcgtDivisible) {
    const auto& inst = std::get<DivisibleInstance>(instance);
    return welfare(inst, allocate_divisible(inst)) == brute_force_divisible(inst).welfare;
  }
  const auto& inst = std::get<MultiSlotInstance>(instance);
  return run_maa(inst).welfare == brute_force_mia(inst).welfare;
}

}  // namespace slotmech
