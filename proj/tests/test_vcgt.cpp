#include <catch2/catch_amalgamated.hpp>

#include "slotmech/oracle.hpp"
#include "slotmech/rng.hpp"
#include "slotmech/vcgt.hpp"

using namespace slotmech;

namespace {

SingleSlotInstance draft_example() {
  SingleSlotInstance inst;
  inst.slot_count = 2;
  inst.capacity = 1;
  inst.scale = 1000;
  inst.ids = {"A", "B"};
  inst.values = {{Value{51000}, Value{50000}}, {Value{50000}, Value{0}}};
  return inst;
}

SingleSlotInstance three_agent_example() {
  SingleSlotInstance inst;
  inst.slot_count = 2;
  inst.capacity = 1;
  inst.scale = 1000;
  inst.ids = default_ids(3);
  inst.values = {{Value{4000}, Value{1000}},
                 {Value{3000}, Value{3000}},
                 {Value{2000}, Value{2000}}};
  return inst;
}

}  // namespace

TEST_CASE("allocate_single maximizes welfare", "[vcgt]") {
  REQUIRE(allocate_single(draft_example()).assigned == std::vector<int>{1, 0});

  SingleSlotInstance lone;
  lone.slot_count = 2;
  lone.capacity = 1;
  lone.ids = {"a1"};
  lone.values = {{Value{5}, Value{3}}};
  REQUIRE(allocate_single(lone).assigned == std::vector<int>{0});

  REQUIRE(allocate_single(three_agent_example()).assigned ==
          std::vector<int>{0, 1, Allocation::kUnassigned});
}

TEST_CASE("allocate_divisible maximizes welfare under length budgets", "[vcgt]") {
  SECTION("one agent spreads over its two best slots") {
    DivisibleInstance inst;
    inst.slot_count = 3;
    inst.capacity = 1;
    inst.ids = {"a1"};
    inst.lengths = {2};
    inst.values = {{Value{3}, Value{4}, Value{1}}};
    const Allocation alloc = allocate_divisible(inst);
    REQUIRE(alloc.bundles[0] == std::vector<int>{0, 1});
    REQUIRE(welfare(inst, alloc) == Value{7});
  }
  SECTION("unit lengths coincide with the single-slot solution") {
    Rng rng(7);
    for (int t = 0; t < 50; ++t) {
      const SingleSlotInstance single = random_single_instance(rng, 5, 4, 3);
      DivisibleInstance div;
      div.slot_count = single.slot_count;
      div.capacity = single.capacity;
      div.scale = single.scale;
      div.ids = single.ids;
      div.values = single.values;
      div.lengths.assign(single.agent_count(), 1);
      REQUIRE(welfare(div, allocate_divisible(div)) ==
              welfare(single, allocate_single(single)));
    }
  }
  SECTION("competition for a unit-capacity slot") {
    DivisibleInstance inst;
    inst.slot_count = 2;
    inst.capacity = 1;
    inst.ids = default_ids(2);
    inst.lengths = {2, 1};
    inst.values = {{Value{5}, Value{5}}, {Value{9}, Value{0}}};
    const Allocation alloc = allocate_divisible(inst);
    REQUIRE(welfare(inst, alloc) == Value{14});
    REQUIRE(alloc.bundles[0] == std::vector<int>{1});
    REQUIRE(alloc.bundles[1] == std::vector<int>{0});
  }
}

TEST_CASE("pivot delays match their definition", "[vcgt]") {
  SECTION("textbook two-agent example") {
    const auto delays = vcg_delays(draft_example());
    REQUIRE(delays == std::vector<Value>{Value{0}, Value{1000}});
  }
  SECTION("a lone agent imposes no externality") {
    SingleSlotInstance lone;
    lone.slot_count = 2;
    lone.capacity = 1;
    lone.ids = {"a1"};
    lone.values = {{Value{5}, Value{3}}};
    REQUIRE(vcg_delays(lone) == std::vector<Value>{Value{0}});
  }
  SECTION("three agents competing for two unit slots") {
    const auto delays = vcg_delays(three_agent_example());
    REQUIRE(delays == std::vector<Value>{Value{2000}, Value{2000}, Value{0}});
  }
}

TEST_CASE("run_vcgt output satisfies the textbook trace", "[vcgt]") {
  const SingleSlotInstance inst = draft_example();
  const VcgtReport report = run_vcgt_report(inst);
  REQUIRE(report.outcome.allocation.assigned == std::vector<int>{1, 0});
  REQUIRE(report.outcome.delays == std::vector<Value>{Value{0}, Value{1000}});
  REQUIRE(report.welfare_with == Value{100000});
  REQUIRE(utility(inst, report.outcome, 0) == Value{50000});
  REQUIRE(utility(inst, report.outcome, 1) == Value{49000});

  const VcgtReport r3 = run_vcgt_report(three_agent_example());
  REQUIRE(r3.outcome.delays == std::vector<Value>{Value{2000}, Value{2000}, Value{0}});
  REQUIRE(utility(three_agent_example(), r3.outcome, 0) == Value{2000});
  REQUIRE(utility(three_agent_example(), r3.outcome, 1) == Value{1000});
  REQUIRE(utility(three_agent_example(), r3.outcome, 2) == Value{0});
  REQUIRE(r3.welfare_without ==
          std::vector<Value>{Value{5000}, Value{6000}, Value{7000}});
}

TEST_CASE("all-zero valuations produce an empty outcome", "[vcgt]") {
  SingleSlotInstance inst;
  inst.slot_count = 2;
  inst.capacity = 1;
  inst.ids = default_ids(2);
  inst.values = {{Value{0}, Value{0}}, {Value{0}, Value{0}}};
  const Outcome out = run_vcgt(inst);
  REQUIRE_FALSE(out.allocation.is_allocated(0));
  REQUIRE_FALSE(out.allocation.is_allocated(1));
  REQUIRE(out.delays == std::vector<Value>{Value{0}, Value{0}});
}

TEST_CASE("marginal delay queries equal full re-solves", "[vcgt]") {
  Rng rng(404);
  for (int t = 0; t < 300; ++t) {
    const SingleSlotInstance inst = random_single_instance(rng, 7, 5, 3);
    const VcgtReport fast = run_vcgt_report(inst);
    const std::vector<Value> slow = vcg_delays(inst);
    REQUIRE(fast.outcome.delays == slow);
    // Removal welfare implied by the marginal query must be a true optimum.
    for (int i = 0; i < inst.agent_count(); ++i) {
      if (inst.agent_count() == 1) continue;
      const SingleSlotInstance reduced = remove_agent(inst, i);
      REQUIRE(fast.welfare_without[i] == brute_force_single(reduced).welfare);
    }
  }
}

TEST_CASE("divisible delays match the removal optima", "[vcgt]") {
  Rng rng(606);
  for (int t = 0; t < 100; ++t) {
    const DivisibleInstance inst = random_divisible_instance(rng, 5, 4, 3, 3);
    const VcgtReport report = run_vcgt_report(inst);
    for (int i = 0; i < inst.agent_count(); ++i) {
      Value removal_optimum{0};
      if (inst.agent_count() > 1) {
        removal_optimum = brute_force_divisible(remove_agent(inst, i)).welfare;
      }
      const Value others_with =
          report.welfare_with - allocated_value(inst, report.outcome.allocation, i);
      REQUIRE(report.outcome.delays[i] == removal_optimum - others_with);
    }
  }
  SECTION("parallel delay workers agree with the sequential path") {
    Rng prng(607);
    for (int t = 0; t < 30; ++t) {
      const DivisibleInstance inst = random_divisible_instance(prng, 6, 4, 3, 3);
      REQUIRE(vcg_delays(inst, 3) == vcg_delays(inst, 1));
    }
  }
}

TEST_CASE("delays are non-negative and vanish for harmless agents", "[vcgt]") {
  Rng rng(505);
  for (int t = 0; t < 200; ++t) {
    const SingleSlotInstance inst = random_single_instance(rng, 6, 4, 3);
    const VcgtReport report = run_vcgt_report(inst);
    for (int i = 0; i < inst.agent_count(); ++i) {
      REQUIRE(report.outcome.delays[i].amount >= 0);
      if (!report.outcome.allocation.is_allocated(i)) {
        REQUIRE(report.outcome.delays[i] == Value{0});
      }
    }
  }
}

TEST_CASE("truthful reporting dominates the misreport family", "[vcgt]") {
  SECTION("single-slot jobs, exact integer comparison") {
    const ProbeReport report = probe_truthfulness(Mechanism::VcgtSingle, 1000, 20240501);
    CAPTURE(report.max_gain);
    REQUIRE(report.violations.empty());
    REQUIRE(report.max_gain <= 0.0);
  }
  SECTION("divisible jobs, exact integer comparison") {
    const ProbeReport report = probe_truthfulness(Mechanism::VcgtDivisible, 1000, 20240502);
    CAPTURE(report.max_gain);
    REQUIRE(report.violations.empty());
  }
}

TEST_CASE("participation is individually rational throughout", "[vcgt]") {
  REQUIRE(run_ir_suite(Mechanism::VcgtSingle, 500, 20240503).clean());
  REQUIRE(run_ir_suite(Mechanism::VcgtDivisible, 300, 20240504).clean());
}

TEST_CASE("the mechanism is efficient per period", "[vcgt]") {
  REQUIRE(run_epp_suite(Mechanism::VcgtSingle, 200, 20240505).clean());
  REQUIRE(run_epp_suite(Mechanism::VcgtDivisible, 100, 20240506).clean());
}
