// Command-line front door for the slot scheduling mechanisms: solve an
// instance file, run verification suites, reproduce the experiments, or
// generate synthetic inputs.
//
// Exit codes: 0 ok, 1 invalid input, 2 unsupported configuration,
// 3 internal assertion failure. `verify` exits with the violation count
// (clamped to 250) so a clean run is exactly 0.

#include <cstdlib>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "slotmech/experiments.hpp"
#include "slotmech/io.hpp"
#include "slotmech/maa.hpp"
#include "slotmech/oracle.hpp"
#include "slotmech/vcgt.hpp"

namespace {

using namespace slotmech;

void emit(const std::string& content, const std::string& out_path) {
  if (out_path.empty()) {
    std::cout << content;
  } else {
    write_text_file(out_path, content);
  }
}

// Synthetic instance with exactly the requested dimensions, values uniform
// on [0, 9 * scale] (zero tail applied for multi-slot jobs).
AnyInstance generate_instance(const std::string& kind, int n, int m, int k, Rng& rng) {
  require_input(n >= 1 && m >= 1 && k >= 1, "gen instance: n, m, k must be >= 1");
  auto random_row = [&](int limit, int width) {
    std::vector<Value> row(width, Value{0});
    for (int j = 0; j < limit; ++j) row[j] = Value{rng.uniform_int(0, 9 * kDefaultScale)};
    return row;
  };
  if (kind == "single") {
    SingleSlotInstance inst;
    inst.slot_count = m;
    inst.capacity = k;
    inst.ids = default_ids(n);
    for (int i = 0; i < n; ++i) inst.values.push_back(random_row(m, m));
    return inst;
  }
  std::vector<int> lengths;
  for (int i = 0; i < n; ++i) {
    lengths.push_back(static_cast<int>(rng.uniform_int(1, std::min(3, m))));
  }
  if (kind == "divisible") {
    DivisibleInstance inst;
    inst.slot_count = m;
    inst.capacity = k;
    inst.ids = default_ids(n);
    inst.lengths = lengths;
    for (int i = 0; i < n; ++i) inst.values.push_back(random_row(m, m));
    return inst;
  }
  MultiSlotInstance inst;
  inst.slot_count = m;
  inst.capacity = k;
  inst.ids = default_ids(n);
  inst.lengths = lengths;
  for (int i = 0; i < n; ++i) {
    inst.values.push_back(random_row(m - lengths[i] + 1, m));
  }
  bool any_positive = false;
  for (const auto& row : inst.values) {
    for (const Value& v : row) any_positive = any_positive || v.amount > 0;
  }
  if (!any_positive) inst.values[0][0] = Value{kDefaultScale};
  return inst;
}

std::uint64_t resolve_seed(const std::optional<std::uint64_t>& flag_seed) {
  if (flag_seed) return *flag_seed;
  if (const char* env = std::getenv("SLOTMECH_SEED")) {
    try {
      return std::stoull(env);
    } catch (const std::exception&) {
      throw InvalidInputError("SLOTMECH_SEED is not an unsigned integer");
    }
  }
  throw InvalidInputError("a seed is required: pass --seed or set SLOTMECH_SEED");
}

int run_solve(const std::string& instance_path, const std::string& mechanism,
              const std::string& out_path, int jobs) {
  const AnyInstance instance = load_instance(instance_path);

  json payload;
  if (mechanism == "vcgt") {
    if (const auto* single = std::get_if<SingleSlotInstance>(&instance)) {
      const VcgtReport report = run_vcgt_report(*single);
      payload = outcome_to_json(single->ids, single->scale, report.outcome, report.welfare_with);
    } else if (const auto* div = std::get_if<DivisibleInstance>(&instance)) {
      const VcgtReport report = run_vcgt_report(*div, jobs);
      payload = outcome_to_json(div->ids, div->scale, report.outcome, report.welfare_with);
    } else {
      throw UnsupportedConfigError(
          "vcgt handles single-slot and divisible jobs; indivisible multi-slot "
          "jobs need --mechanism maa or exact");
    }
  } else if (mechanism == "maa") {
    const auto* multi = std::get_if<MultiSlotInstance>(&instance);
    if (multi == nullptr) {
      throw UnsupportedConfigError("maa requires an instance of kind 'multi'");
    }
    const MaaResult result = run_maa(*multi);
    payload = maa_result_to_json(*multi, result);
  } else {  // exact
    payload = std::visit(
        [](const auto& inst) {
          using T = std::decay_t<decltype(inst)>;
          BruteForceResult result;
          if constexpr (std::is_same_v<T, SingleSlotInstance>) {
            result = brute_force_single(inst);
          } else if constexpr (std::is_same_v<T, MultiSlotInstance>) {
            result = brute_force_mia(inst);
          } else {
            result = brute_force_divisible(inst);
          }
          Outcome outcome{result.allocation,
                          std::vector<Value>(inst.agent_count(), Value{0})};
          return outcome_to_json(inst.ids, inst.scale, outcome, result.welfare);
        },
        instance);
  }
  emit(dump_json(payload), out_path);
  return 0;
}

int run_verify(const std::string& suite, const std::string& mechanism, int trials,
               std::uint64_t seed, const std::string& out_path) {
  Mechanism mech = Mechanism::VcgtSingle;
  if (mechanism == "vcgt-divisible") mech = Mechanism::VcgtDivisible;
  if (mechanism == "maa") mech = Mechanism::Maa;

  ProbeReport report;
  if (suite == "truthfulness") {
    report = probe_truthfulness(mech, trials, seed);
  } else if (suite == "ir") {
    report = run_ir_suite(mech, trials, seed);
  } else if (suite == "capacity") {
    report = run_capacity_suite(trials, seed);
  } else {
    report = run_epp_suite(mech, trials, seed);
  }
  emit(dump_json(probe_report_to_json(report)), out_path);
  std::cerr << report.suite << " (" << report.mechanism << "): " << report.violations.size()
            << " violation(s) in " << report.trials << " trials\n";
  return static_cast<int>(std::min<std::size_t>(report.violations.size(), 250));
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Slot scheduling mechanisms: welfare-maximizing allocation with "
               "waiting-time payments, posted-price approximation, oracles and "
               "experiment harness"};
  app.require_subcommand(1);

  std::optional<std::uint64_t> seed_flag;
  app.add_option("--seed", seed_flag, "Root RNG seed (fallback: SLOTMECH_SEED)");
  int jobs = 1;
  app.add_option("--jobs", jobs, "Worker cap for parallel sections")->default_val(1);

  // solve
  auto* solve = app.add_subcommand("solve", "Solve one instance file");
  std::string instance_path;
  std::string mechanism = "vcgt";
  std::string out_path;
  solve->add_option("--instance", instance_path, "Instance JSON path")->required();
  solve->add_option("--mechanism", mechanism, "vcgt | maa | exact")
      ->check(CLI::IsMember({"vcgt", "maa", "exact"}));
  solve->add_option("--out", out_path, "Output path (default: stdout)");

  // verify
  auto* verify = app.add_subcommand("verify", "Run a verification suite");
  std::string suite = "truthfulness";
  std::string verify_mechanism = "vcgt-single";
  int trials = 1000;
  std::string verify_out;
  verify->add_option("--suite", suite, "truthfulness | ir | epp | capacity")
      ->check(CLI::IsMember({"truthfulness", "ir", "epp", "capacity"}));
  verify->add_option("--mechanism", verify_mechanism, "vcgt-single | vcgt-divisible | maa")
      ->check(CLI::IsMember({"vcgt-single", "vcgt-divisible", "maa"}));
  verify->add_option("--trials", trials, "Trial count")->default_val(1000);
  verify->add_option("--out", verify_out, "Report path (default: stdout)");

  // experiment
  auto* experiment = app.add_subcommand("experiment", "Run a study and emit CSV");
  std::string which;
  experiment->add_option("name", which, "congestion | approx | priority | scale")
      ->required()
      ->check(CLI::IsMember({"congestion", "approx", "priority", "scale"}));
  std::string experiment_out;
  experiment->add_option("--out", experiment_out, "CSV path (default: stdout)");
  int capacity = 28;
  int days = 31;
  double delta = 0.65;
  std::string footfall_path;
  experiment->add_option("--capacity", capacity, "Slot capacity (congestion)")->default_val(28);
  experiment->add_option("--days", days, "Days to synthesize (congestion)")->default_val(31);
  experiment->add_option("--delta", delta, "Valuation decay factor")->default_val(0.65);
  experiment->add_option("--footfall", footfall_path,
                         "Footfall CSV to ingest instead of synthesizing");
  int reps = 100;
  experiment->add_option("--reps", reps, "Repetitions (approx/priority/scale)")->default_val(100);
  std::string m_grid = "4,6,8,10,12,14";
  experiment->add_option("--m-grid", m_grid, "Slot grid for scale, comma separated");

  // gen
  auto* gen = app.add_subcommand("gen", "Generate synthetic inputs");
  std::string gen_what;
  gen->add_option("what", gen_what, "instance | footfall")
      ->required()
      ->check(CLI::IsMember({"instance", "footfall"}));
  std::string gen_out;
  gen->add_option("--out", gen_out, "Output path (default: stdout)");
  std::string gen_kind = "single";
  gen->add_option("--kind", gen_kind, "single | multi | divisible")
      ->check(CLI::IsMember({"single", "multi", "divisible"}));
  int gen_n = 4, gen_m = 4, gen_k = 3, gen_days = 31;
  gen->add_option("--n", gen_n, "Agent count")->default_val(4);
  gen->add_option("--m", gen_m, "Slot count")->default_val(4);
  gen->add_option("--k", gen_k, "Slot capacity")->default_val(3);
  gen->add_option("--days", gen_days, "Days of footfall")->default_val(31);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e) == 0 ? 0 : 1;
  }

  try {
    if (*solve) {
      return run_solve(instance_path, mechanism, out_path, jobs);
    }
    if (*verify) {
      return run_verify(suite, verify_mechanism, trials, resolve_seed(seed_flag), verify_out);
    }
    if (*experiment) {
      const std::uint64_t seed = resolve_seed(seed_flag);
      std::ostringstream csv;
      if (which == "congestion") {
        CongestionConfig cfg;
        cfg.capacity = capacity;
        cfg.days = days;
        cfg.delta = delta;
        cfg.seed = seed;
        if (footfall_path.empty()) {
          write_congestion_csv(congestion_experiment(cfg), csv);
        } else {
          const FootfallTable table = ingest_footfall_file(footfall_path);
          write_congestion_csv(congestion_experiment(cfg, &table), csv);
        }
      } else if (which == "approx") {
        ApproxConfig cfg;
        cfg.reps = reps;
        cfg.delta = delta;
        cfg.seed = seed;
        write_approx_csv(approx_experiment(cfg), csv);
      } else if (which == "priority") {
        PriorityConfig cfg;
        cfg.reps = reps;
        cfg.delta = delta;
        cfg.seed = seed;
        write_priority_csv(priority_delay_experiment(cfg), csv);
      } else {
        ScaleConfig cfg;
        cfg.reps = reps;
        cfg.delta = delta;
        cfg.seed = seed;
        cfg.m_grid.clear();
        std::stringstream grid(m_grid);
        for (std::string token; std::getline(grid, token, ',');) {
          cfg.m_grid.push_back(std::stoi(token));
        }
        write_scale_csv(scalability_experiment(cfg), csv);
      }
      emit(csv.str(), experiment_out);
      return 0;
    }
    if (*gen) {
      const std::uint64_t seed = resolve_seed(seed_flag);
      Rng rng(seed);
      if (gen_what == "footfall") {
        std::ostringstream csv;
        footfall_to_csv(synthesize_footfall(gen_days, rng), csv);
        emit(csv.str(), gen_out);
        return 0;
      }
      emit(dump_json(instance_to_json(
               generate_instance(gen_kind, gen_n, gen_m, gen_k, rng))),
           gen_out);
      return 0;
    }
  } catch (const InternalError& e) {
    std::cerr << "internal error: " << e.what() << '\n';
    return 3;
  } catch (const UnsupportedConfigError& e) {
    std::cerr << "unsupported configuration: " << e.what() << '\n';
    return 2;
  } catch (const InvalidInputError& e) {
    std::cerr << "invalid input: " << e.what() << '\n';
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
  return 0;
}
