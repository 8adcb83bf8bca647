#pragma once

#include <algorithm>
#include <cmath>
#include <numeric>
#include <optional>
#include <vector>

#include "slotmech/allocation.hpp"
#include "slotmech/errors.hpp"
#include "slotmech/instance.hpp"
#include "slotmech/value.hpp"

namespace slotmech {

// Posted-price approximation for indivisible multi-slot jobs. The top
// bidder is served first at her favorite feasible start and charged the
// best valuation among everyone else, second-price style. The remaining
// agents are visited in a fixed report-independent order and buy their
// utility-maximizing start window at the current prices, which grow
// exponentially with slot occupancy; the schedule parameters are chosen so
// that capacity is respected without ever checking it explicitly.

struct PriceParams {
  double pi0 = 0.0;        // initial per-slot price
  double r = 0.0;          // occupancy growth factor
  Value v_max{0};
  int b = 0;               // top bidder
  Value v_max_minus_b{0};  // best valuation excluding the top bidder
};

// Tolerance for floating-point price comparisons, in scaled value units.
inline double price_tolerance(std::int64_t scale) {
  return 1e-9 * static_cast<double>(scale);
}

inline double price_growth_factor(int m, int k) {
  if (k < 3) {
    throw UnsupportedConfigError("posted-price schedule requires capacity k >= 3");
  }
  return std::pow(6.0 * m * (k - 1), 1.0 / (k - 2));
}

inline PriceParams compute_price_params(const MultiSlotInstance& inst) {
  PriceParams params;
  params.r = price_growth_factor(inst.slot_count, inst.capacity);
  params.b = 0;
  for (int i = 0; i < inst.agent_count(); ++i) {
    for (int j = 0; j < inst.slot_count; ++j) {
      if (inst.values[i][j] > params.v_max) {
        params.v_max = inst.values[i][j];
        params.b = i;  // strict comparison keeps the lowest index on ties
      }
    }
  }
  if (params.v_max.amount == 0) {
    throw DegenerateInstanceError("all valuations are zero; price schedule undefined");
  }
  for (int i = 0; i < inst.agent_count(); ++i) {
    if (i == params.b) continue;
    for (int j = 0; j < inst.slot_count; ++j) {
      params.v_max_minus_b = std::max(params.v_max_minus_b, inst.values[i][j]);
    }
  }
  params.pi0 = static_cast<double>(params.v_max.amount) /
               (6.0 * inst.slot_count * (inst.capacity - 1));
  return params;
}

// Occupancy counts (excluding the top bidder) and the prices they imply.
struct PriceState {
  std::vector<int> occupancy;   // Q_j
  std::vector<double> prices;   // pi0 * r^Q_j

  void refresh(const PriceParams& params) {
    prices.resize(occupancy.size());
    for (std::size_t j = 0; j < occupancy.size(); ++j) {
      prices[j] = params.pi0 * std::pow(params.r, occupancy[j]);
    }
  }
};

struct StartChoice {
  int start = 0;
  double utility = 0.0;
};

namespace detail {

// Scan with a caller-owned prefix buffer (resized to m + 1) so the
// mechanism's inner loop stays allocation-free.
inline std::optional<StartChoice> best_start_scan(const std::vector<Value>& values, int length,
                                                  const std::vector<double>& prices,
                                                  std::vector<double>& prefix) {
  const int m = static_cast<int>(prices.size());
  prefix.resize(m + 1);
  prefix[0] = 0.0;
  for (int j = 0; j < m; ++j) prefix[j + 1] = prefix[j] + prices[j];
  std::optional<StartChoice> best;
  for (int s = 0; s + length <= m; ++s) {
    const double u = static_cast<double>(values[s].amount) - (prefix[s + length] - prefix[s]);
    if (u > 0.0 && (!best || u > best->utility)) {
      best = StartChoice{s, u};
    }
  }
  return best;
}

}  // namespace detail

// Utility-maximizing start for a job of the given length at the current
// prices. Only starts with strictly positive utility are taken; on ties the
// earliest start wins. Window sums use a prefix table so the scan is O(m).
inline std::optional<StartChoice> best_start(const std::vector<Value>& values, int length,
                                             const std::vector<double>& prices) {
  std::vector<double> prefix;
  return detail::best_start_scan(values, length, prices, prefix);
}

struct MaaResult {
  Outcome outcome;                   // delays rounded to scaled integers
  std::vector<double> payments;      // exact charged prices per agent
  std::vector<double> prices_final;  // schedule at the end of the run
  std::vector<int> occupancy;        // excluding the top bidder (Q)
  std::vector<int> occupancy_total;  // including the top bidder
  std::vector<int> order;            // actual visiting order, top bidder first
  PriceParams params;
  Value welfare{0};
  long operations = 0;  // elementary steps, for the O(mn) complexity check
};

inline MaaResult run_maa(const MultiSlotInstance& inst, std::vector<int> order = {}) {
  const int n = inst.agent_count();
  const int m = inst.slot_count;
  const int k = inst.capacity;

  MaaResult result;
  result.params = compute_price_params(inst);
  const PriceParams& params = result.params;

  if (order.empty()) {
    order.resize(n);
    std::iota(order.begin(), order.end(), 0);
  }
  require_input(static_cast<int>(order.size()) == n, "order must cover every agent");
  {
    std::vector<char> seen(n, 0);
    for (int i : order) {
      require_input(i >= 0 && i < n && !seen[i], "order must be a permutation");
      seen[i] = 1;
    }
  }

  std::vector<int> assigned(n, Allocation::kUnassigned);
  result.payments.assign(n, 0.0);
  result.occupancy.assign(m, 0);
  result.occupancy_total.assign(m, 0);
  result.order.reserve(n);

  // Top bidder: favorite feasible start, second-price payment. Her
  // occupancy counts against the slot capacity but not against the prices.
  const int b = params.b;
  int favorite = 0;
  for (int s = 1; s + inst.lengths[b] <= m; ++s) {
    if (inst.values[b][s] > inst.values[b][favorite]) favorite = s;
  }
  assigned[b] = favorite;
  result.payments[b] = static_cast<double>(params.v_max_minus_b.amount);
  for (int j = favorite; j < favorite + inst.lengths[b]; ++j) {
    result.occupancy_total[j] += 1;
  }
  result.order.push_back(b);

  // Occupancy never reaches k - 1 while prices are being read, so a table
  // of r^q for q < k covers every price the schedule can quote.
  std::vector<double> r_power(k);
  for (int q = 0; q < k; ++q) r_power[q] = std::pow(params.r, q);

  std::vector<double> prices(m, params.pi0);  // r^0 throughout
  std::vector<double> prefix;
  result.operations += m;
  for (int i : order) {
    if (i == b) continue;
    result.order.push_back(i);
    // The prices agent i faces are fixed before her report is read.
    const auto choice = detail::best_start_scan(inst.values[i], inst.lengths[i], prices, prefix);
    result.operations += 2 * m + (m - inst.lengths[i] + 1);
    if (!choice) continue;
    const int s = choice->start;
    assigned[i] = s;
    double charged = 0.0;
    for (int j = s; j < s + inst.lengths[i]; ++j) {
      charged += prices[j];
      result.occupancy[j] += 1;
      result.occupancy_total[j] += 1;
      internal_check(result.occupancy[j] <= k - 1, "price schedule breached occupancy bound");
      internal_check(result.occupancy_total[j] <= k, "slot capacity exceeded");
      prices[j] = params.pi0 * r_power[result.occupancy[j]];
      result.operations += 2;
    }
    result.payments[i] = charged;
  }

  result.prices_final = std::move(prices);

  result.outcome.allocation = Allocation::multi(std::move(assigned));
  result.outcome.delays.resize(n);
  for (int i = 0; i < n; ++i) {
    result.outcome.delays[i] = Value{std::llround(result.payments[i])};
    internal_check(result.outcome.delays[i].amount >= 0, "negative rounded delay");
  }
  for (int i = 0; i < n; ++i) {
    result.welfare += allocated_value(inst, result.outcome.allocation, i);
  }
  return result;
}

// Worst-case ratio of the optimum to the posted-price welfare for the
// chosen schedule: 3((k-1)(r-1)+1).
inline double approx_bound(int m, int k) {
  require_input(m >= 1, "approx_bound: m must be >= 1");
  const double r = price_growth_factor(m, k);
  return 3.0 * ((k - 1) * (r - 1.0) + 1.0);
}

}  // namespace slotmech
