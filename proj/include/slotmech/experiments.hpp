#pragma once

#include <array>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <istream>
#include <map>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

#include "slotmech/allocation.hpp"
#include "slotmech/errors.hpp"
#include "slotmech/instance.hpp"
#include "slotmech/io.hpp"
#include "slotmech/maa.hpp"
#include "slotmech/oracle.hpp"
#include "slotmech/rng.hpp"
#include "slotmech/vcgt.hpp"

namespace slotmech {

// Desk-scale reproduction of the four studies: congestion relief on store
// footfall, posted-price suboptimality, the priority/delay trade-off, and
// mechanism scalability. Every experiment is deterministic given its
// config and seed; only measured wall times vary between runs.

// ---------------------------------------------------------------------------
// Footfall data: hourly visitor counts over store opening hours, 7 AM to
// 9 PM, i.e. 14 hourly slots per day. Hour h maps to slot h - 6 (1-based).

inline constexpr int kOpeningHour = 7;
inline constexpr int kSlotsPerDay = 14;

struct FootfallRow {
  std::string date;
  int hour = 0;  // 7..20, start hour of the slot
  int count = 0;
};

struct FootfallTable {
  std::vector<FootfallRow> rows;

  // Dates in order of first appearance, each with its per-slot counts.
  std::vector<std::pair<std::string, std::vector<int>>> by_day() const {
    std::vector<std::pair<std::string, std::vector<int>>> days;
    std::map<std::string, std::size_t> index;
    for (const FootfallRow& row : rows) {
      auto it = index.find(row.date);
      if (it == index.end()) {
        index.emplace(row.date, days.size());
        days.emplace_back(row.date, std::vector<int>(kSlotsPerDay, 0));
        it = index.find(row.date);
      }
      days[it->second].second[row.hour - kOpeningHour] += row.count;
    }
    return days;
  }
};

inline FootfallTable ingest_footfall(std::istream& in) {
  FootfallTable table;
  std::string line;
  int line_no = 0;
  require_input(static_cast<bool>(std::getline(in, line)), "footfall: empty file");
  ++line_no;
  if (!line.empty() && line.back() == '\r') line.pop_back();
  require_input(line == "date,hour,count",
                "footfall: line 1: expected header 'date,hour,count'");
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    const auto c1 = line.find(',');
    const auto c2 = c1 == std::string::npos ? std::string::npos : line.find(',', c1 + 1);
    require_input(c1 != std::string::npos && c2 != std::string::npos,
                  "footfall: line " + std::to_string(line_no) + ": expected 3 fields");
    FootfallRow row;
    row.date = line.substr(0, c1);
    try {
      row.hour = std::stoi(line.substr(c1 + 1, c2 - c1 - 1));
      row.count = std::stoi(line.substr(c2 + 1));
    } catch (const std::exception&) {
      throw InvalidInputError("footfall: line " + std::to_string(line_no) +
                              ": non-numeric hour or count");
    }
    require_input(row.hour >= kOpeningHour && row.hour < kOpeningHour + kSlotsPerDay,
                  "footfall: line " + std::to_string(line_no) + ": hour out of range 7..20");
    require_input(row.count >= 0,
                  "footfall: line " + std::to_string(line_no) + ": negative count");
    table.rows.push_back(std::move(row));
  }
  return table;
}

inline FootfallTable ingest_footfall_file(const std::string& path) {
  std::ifstream in(path);
  require_input(in.good(), "cannot open footfall file: " + path);
  return ingest_footfall(in);
}

inline void footfall_to_csv(const FootfallTable& table, std::ostream& out) {
  out << "date,hour,count\n";
  for (const FootfallRow& row : table.rows) {
    out << row.date << ',' << row.hour << ',' << row.count << '\n';
  }
}

// Published profile: evening peaks at 5-6, 6-7 and 7-8 PM (slots 11..13)
// with the remaining slots calibrated so the overall hourly mean is 26.5.
inline constexpr std::array<double, 3> kDefaultPeakMeans{38.0, 48.63, 52.83};
inline constexpr double kOverallHourlyMean = 26.5;
inline constexpr double kDefaultOffpeakMean =
    (kOverallHourlyMean * kSlotsPerDay - (38.0 + 48.63 + 52.83)) / (kSlotsPerDay - 3);

namespace detail {

inline std::string next_date(int& year, int& month, int& day) {
  static constexpr int lengths[12] = {31, 28, 31, 30, 31, 30, 31, 31, 30, 31, 30, 31};
  int len = lengths[month - 1];
  if (month == 2 && (year % 4 == 0 && (year % 100 != 0 || year % 400 == 0))) len = 29;
  char buf[36];
  std::snprintf(buf, sizeof(buf), "%04d-%02d-%02d", year, month, day);
  if (++day > len) {
    day = 1;
    if (++month > 12) {
      month = 1;
      ++year;
    }
  }
  return buf;
}

}  // namespace detail

// Poisson surrogate for the store's July 2020 footfall.
inline FootfallTable synthesize_footfall(int days,
                                         const std::array<double, 3>& peak_means,
                                         double offpeak_mean, Rng& rng) {
  FootfallTable table;
  int year = 2020, month = 7, day = 1;
  for (int d = 0; d < days; ++d) {
    const std::string date = detail::next_date(year, month, day);
    for (int slot = 1; slot <= kSlotsPerDay; ++slot) {
      const double mean = (slot >= 11 && slot <= 13) ? peak_means[slot - 11] : offpeak_mean;
      table.rows.push_back({date, kOpeningHour + slot - 1, rng.poisson(mean)});
    }
  }
  return table;
}

inline FootfallTable synthesize_footfall(int days, Rng& rng) {
  return synthesize_footfall(days, kDefaultPeakMeans, kDefaultOffpeakMean, rng);
}

// ---------------------------------------------------------------------------
// Valuation model: importance classes high/medium/low valued 3/2/1 at the
// most preferred slot, decaying by a factor delta per preference rank.
// Non-favorite slots are ranked by temporal proximity to the favorite, the
// earlier slot winning ties.

struct ClassDistribution {
  double high = 0.1;
  double medium = 0.3;
  double low = 0.6;
};

namespace detail {

inline int sample_class(const ClassDistribution& dist, Rng& rng) {
  const double u = rng.uniform01() * (dist.high + dist.medium + dist.low);
  if (u < dist.high) return 3;
  if (u < dist.high + dist.medium) return 2;
  return 1;
}

// Positions 0..count-1 ordered by |pos - favorite|, earlier position first.
inline std::vector<int> proximity_order(int count, int favorite) {
  std::vector<int> order;
  order.reserve(count);
  order.push_back(favorite);
  for (int d = 1; d < count; ++d) {
    if (favorite - d >= 0) order.push_back(favorite - d);
    if (favorite + d < count) order.push_back(favorite + d);
  }
  return order;
}

inline Value class_value(int cls, int rank, double delta, std::int64_t scale) {
  return Value{std::llround(cls * std::pow(delta, rank - 1) * static_cast<double>(scale))};
}

}  // namespace detail

struct PopulationSample {
  SingleSlotInstance instance;
  std::vector<int> agent_class;           // 3, 2 or 1
  std::vector<std::vector<int>> slot_rank;  // 1-based preference rank per slot
};

// One agent per footfall unit; the observed arrival slot is the agent's
// most preferred slot.
inline PopulationSample sample_population(const std::vector<int>& day_counts,
                                          const ClassDistribution& dist, double delta,
                                          int capacity, std::int64_t scale, Rng& rng) {
  require_input(delta > 0.0 && delta < 1.0, "sample_population: delta must be in (0,1)");
  const int m = static_cast<int>(day_counts.size());
  PopulationSample sample;
  sample.instance.slot_count = m;
  sample.instance.capacity = capacity;
  sample.instance.scale = scale;
  for (int slot = 0; slot < m; ++slot) {
    for (int unit = 0; unit < day_counts[slot]; ++unit) {
      const int cls = detail::sample_class(dist, rng);
      sample.agent_class.push_back(cls);
      std::vector<Value> row(m);
      std::vector<int> ranks(m, 0);
      const auto order = detail::proximity_order(m, slot);
      for (int t = 0; t < m; ++t) {
        ranks[order[t]] = t + 1;
        row[order[t]] = detail::class_value(cls, t + 1, delta, scale);
      }
      sample.instance.values.push_back(std::move(row));
      sample.slot_rank.push_back(std::move(ranks));
    }
  }
  sample.instance.ids = default_ids(sample.instance.agent_count());
  return sample;
}

// Same valuation model with uniformly random class and favorite slot.
inline PopulationSample sample_uniform_population(int n, int m, double delta, int capacity,
                                                  std::int64_t scale, Rng& rng) {
  PopulationSample sample;
  sample.instance.slot_count = m;
  sample.instance.capacity = capacity;
  sample.instance.scale = scale;
  sample.instance.ids = default_ids(n);
  for (int i = 0; i < n; ++i) {
    const int cls = static_cast<int>(rng.uniform_int(1, 3));
    const int favorite = static_cast<int>(rng.uniform_int(0, m - 1));
    sample.agent_class.push_back(cls);
    std::vector<Value> row(m);
    std::vector<int> ranks(m, 0);
    const auto order = detail::proximity_order(m, favorite);
    for (int t = 0; t < m; ++t) {
      ranks[order[t]] = t + 1;
      row[order[t]] = detail::class_value(cls, t + 1, delta, scale);
    }
    sample.instance.values.push_back(std::move(row));
    sample.slot_rank.push_back(std::move(ranks));
  }
  return sample;
}

// Multi-slot jobs for the suboptimality study: uniform class and length,
// start valuations decaying from a uniformly random favorite start.
inline MultiSlotInstance class_multi_instance(int n, int m, int k, int max_len, double delta,
                                              std::int64_t scale, Rng& rng) {
  MultiSlotInstance inst;
  inst.slot_count = m;
  inst.capacity = k;
  inst.scale = scale;
  inst.ids = default_ids(n);
  inst.values.assign(n, std::vector<Value>(m, Value{0}));
  inst.lengths.resize(n);
  for (int i = 0; i < n; ++i) {
    inst.lengths[i] = static_cast<int>(rng.uniform_int(1, std::min(max_len, m)));
    const int starts = inst.feasible_starts(i);
    const int cls = static_cast<int>(rng.uniform_int(1, 3));
    const int favorite = static_cast<int>(rng.uniform_int(0, starts - 1));
    const auto order = detail::proximity_order(starts, favorite);
    for (int t = 0; t < starts; ++t) {
      inst.values[i][order[t]] = detail::class_value(cls, t + 1, delta, scale);
    }
  }
  return inst;
}

// ---------------------------------------------------------------------------
// Congestion study: before/after per-slot population under the pivot-delay
// mechanism; agents without a slot leave the system for that day.

struct CongestionConfig {
  int capacity = 28;
  double delta = 0.65;
  int days = 31;
  std::uint64_t seed = 0;
  std::int64_t scale = kDefaultScale;
  ClassDistribution dist{};
};

struct CongestionRow {
  int day = 0;   // 1-based
  int slot = 0;  // 1-based
  int before = 0;
  int after = 0;
  int unallocated = 0;  // per day, repeated on each of its rows
};

inline std::vector<CongestionRow> congestion_experiment(const CongestionConfig& cfg,
                                                        const FootfallTable* footfall = nullptr) {
  FootfallTable synthesized;
  if (footfall == nullptr) {
    Rng rng = derive_rng(cfg.seed, 0);
    synthesized = synthesize_footfall(cfg.days, rng);
    footfall = &synthesized;
  }
  const auto days = footfall->by_day();

  std::vector<CongestionRow> rows;
  int day_index = 0;
  for (const auto& [date, counts] : days) {
    ++day_index;
    Rng rng = derive_rng(cfg.seed, 1'000'000 + day_index);
    PopulationSample sample =
        sample_population(counts, cfg.dist, cfg.delta, cfg.capacity, cfg.scale, rng);
    const Outcome outcome = run_vcgt(sample.instance);
    std::vector<int> after(kSlotsPerDay, 0);
    int unallocated = 0;
    for (int i = 0; i < sample.instance.agent_count(); ++i) {
      const int s = outcome.allocation.assigned[i];
      if (s == Allocation::kUnassigned) {
        ++unallocated;
      } else {
        after[s] += 1;
      }
    }
    for (int slot = 0; slot < kSlotsPerDay; ++slot) {
      rows.push_back({day_index, slot + 1, counts[slot], after[slot], unallocated});
    }
  }
  return rows;
}

inline void write_congestion_csv(const std::vector<CongestionRow>& rows, std::ostream& out) {
  out << "day,slot,before,after,unallocated\n";
  for (const auto& r : rows) {
    out << r.day << ',' << r.slot << ',' << r.before << ',' << r.after << ',' << r.unallocated
        << '\n';
  }
}

// ---------------------------------------------------------------------------
// Posted-price suboptimality and runtime against the exhaustive optimum.

struct ApproxConfig {
  int n = 6;
  int k = 5;
  int m_lo = 3;
  int m_hi = 8;
  int reps = 100;
  int max_len = 3;
  double delta = 0.65;
  std::uint64_t seed = 0;
  std::int64_t scale = kDefaultScale;
};

struct ApproxRow {
  int m = 0;
  int rep = 0;
  double t_opt = 0.0;
  double t_maa = 0.0;
  Value welfare_opt{0};
  Value welfare_maa{0};
};

inline std::vector<ApproxRow> approx_experiment(const ApproxConfig& cfg) {
  using clock = std::chrono::steady_clock;
  std::vector<ApproxRow> rows;
  for (int m = cfg.m_lo; m <= cfg.m_hi; ++m) {
    for (int rep = 0; rep < cfg.reps; ++rep) {
      Rng rng = derive_rng(cfg.seed, static_cast<std::uint64_t>(m) * 100'003 + rep);
      const MultiSlotInstance inst =
          class_multi_instance(cfg.n, m, cfg.k, cfg.max_len, cfg.delta, cfg.scale, rng);

      const auto t0 = clock::now();
      const BruteForceResult opt = brute_force_mia(inst);
      const auto t1 = clock::now();
      const MaaResult approx = run_maa(inst);
      const auto t2 = clock::now();

      ApproxRow row;
      row.m = m;
      row.rep = rep;
      row.t_opt = std::chrono::duration<double>(t1 - t0).count();
      row.t_maa = std::chrono::duration<double>(t2 - t1).count();
      row.welfare_opt = opt.welfare;
      row.welfare_maa = approx.welfare;
      rows.push_back(row);
    }
  }
  return rows;
}

inline void write_approx_csv(const std::vector<ApproxRow>& rows, std::ostream& out) {
  out << "m,rep,t_opt,t_maa,welfare_opt,welfare_maa\n";
  for (const auto& r : rows) {
    out << r.m << ',' << r.rep << ',' << format_g6(r.t_opt) << ',' << format_g6(r.t_maa) << ','
        << r.welfare_opt.amount << ',' << r.welfare_maa.amount << '\n';
  }
}

// ---------------------------------------------------------------------------
// Priority/delay trade-off: allocated slot preference rank and charged
// delay per importance class, as the population grows past capacity.

struct PriorityConfig {
  int m = 5;
  int k = 4;
  double delta = 0.65;
  int reps = 100;
  int n_lo = 2;
  int n_hi = -1;  // defaults to ceil(1.1 * m * k)
  std::uint64_t seed = 0;
  std::int64_t scale = kDefaultScale;
};

struct PriorityRow {
  int n = 0;
  int rep = 0;
  int cls = 0;  // 3, 2 or 1
  double mean_pref_rank = 0.0;
  double mean_delay = 0.0;  // in periods
  bool has_data = false;    // false when no agent of the class was allocated
};

inline int priority_n_hi(const PriorityConfig& cfg) {
  return cfg.n_hi > 0 ? cfg.n_hi
                      : static_cast<int>(std::ceil(1.1 * cfg.m * cfg.k));
}

inline std::vector<PriorityRow> priority_delay_experiment(const PriorityConfig& cfg) {
  std::vector<PriorityRow> rows;
  const int n_hi = priority_n_hi(cfg);
  for (int n = cfg.n_lo; n <= n_hi; ++n) {
    for (int rep = 0; rep < cfg.reps; ++rep) {
      Rng rng = derive_rng(cfg.seed, static_cast<std::uint64_t>(n) * 100'003 + rep);
      const PopulationSample sample =
          sample_uniform_population(n, cfg.m, cfg.delta, cfg.k, cfg.scale, rng);
      const Outcome outcome = run_vcgt(sample.instance);

      std::array<double, 4> rank_sum{};
      std::array<double, 4> delay_sum{};
      std::array<int, 4> allocated{};
      for (int i = 0; i < n; ++i) {
        const int s = outcome.allocation.assigned[i];
        if (s == Allocation::kUnassigned) continue;
        const int cls = sample.agent_class[i];
        rank_sum[cls] += sample.slot_rank[i][s];
        delay_sum[cls] += to_periods(outcome.delays[i], cfg.scale);
        allocated[cls] += 1;
      }
      for (int cls = 3; cls >= 1; --cls) {
        PriorityRow row;
        row.n = n;
        row.rep = rep;
        row.cls = cls;
        if (allocated[cls] > 0) {
          row.has_data = true;
          row.mean_pref_rank = rank_sum[cls] / allocated[cls];
          row.mean_delay = delay_sum[cls] / allocated[cls];
        }
        rows.push_back(row);
      }
    }
  }
  return rows;
}

inline void write_priority_csv(const std::vector<PriorityRow>& rows, std::ostream& out) {
  out << "n,rep,class,mean_pref_rank,mean_delay\n";
  for (const auto& r : rows) {
    out << r.n << ',' << r.rep << ',' << r.cls << ',';
    if (r.has_data) {
      out << format_g6(r.mean_pref_rank) << ',' << format_g6(r.mean_delay);
    } else {
      out << ',';
    }
    out << '\n';
  }
}

// ---------------------------------------------------------------------------
// Scalability: full mechanism wall time at n = m * k across a slot grid.

struct ScaleConfig {
  int k = 12;
  std::vector<int> m_grid{4, 6, 8, 10, 12, 14};
  int reps = 3;
  double delta = 0.65;
  std::uint64_t seed = 0;
  std::int64_t scale = kDefaultScale;
};

struct ScaleRow {
  int m = 0;
  int n = 0;
  double wall_time = 0.0;  // seconds per full allocation-plus-delays run
};

inline std::vector<ScaleRow> scalability_experiment(const ScaleConfig& cfg) {
  using clock = std::chrono::steady_clock;
  std::vector<ScaleRow> rows;
  for (int m : cfg.m_grid) {
    const int n = m * cfg.k;
    for (int rep = 0; rep < cfg.reps; ++rep) {
      Rng rng = derive_rng(cfg.seed, static_cast<std::uint64_t>(m) * 100'003 + rep);
      const PopulationSample sample =
          sample_uniform_population(n, m, cfg.delta, cfg.k, cfg.scale, rng);
      const auto t0 = clock::now();
      const Outcome outcome = run_vcgt(sample.instance);
      const auto t1 = clock::now();
      internal_check(static_cast<int>(outcome.delays.size()) == n, "scalability run truncated");
      rows.push_back({m, n, std::chrono::duration<double>(t1 - t0).count()});
    }
  }
  return rows;
}

inline void write_scale_csv(const std::vector<ScaleRow>& rows, std::ostream& out) {
  out << "m,n,wall_time\n";
  for (const auto& r : rows) {
    out << r.m << ',' << r.n << ',' << format_g6(r.wall_time) << '\n';
  }
}

}  // namespace slotmech
