#pragma once

#include <algorithm>
#include <cstdint>
#include <limits>
#include <queue>
#include <utility>
#include <vector>

#include "slotmech/allocation.hpp"
#include "slotmech/errors.hpp"
#include "slotmech/instance.hpp"
#include "slotmech/value.hpp"

namespace slotmech {

// Max-weight bipartite b-matching as a min-cost flow over a four-layer
// network: source -> agents -> slots -> sink. Agent->slot arcs have unit
// capacity and cost -v_ij, source arcs carry each agent's unit budget b_i
// (1 for single-slot jobs, l_i for divisible ones), slot->sink arcs carry
// the slot capacity k. Successive shortest augmenting paths with node
// potentials keep every Dijkstra on non-negative reduced costs; all
// arithmetic is 64-bit integer, so every intermediate flow is integral.
//
// Zero-value arcs are present in the network, but augmentation stops as
// soon as the cheapest residual source->sink path has non-negative cost:
// assignments that add no value are never made, which is welfare-equivalent
// to the relaxed assignment program because all valuations are >= 0.

struct FlowEdge {
  int to = 0;
  std::int64_t cap = 0;  // residual capacity
  std::int64_t cost = 0;
  int rev = 0;           // index of the paired edge in graph[to]
  bool forward = false;
};

struct FlowNetwork {
  int agent_count = 0;
  int slot_count = 0;
  std::int64_t slot_capacity = 0;
  std::vector<std::int64_t> supply;  // b_i per agent
  std::vector<std::vector<FlowEdge>> graph;

  int source() const { return 0; }
  int agent_node(int i) const { return 1 + i; }
  int slot_node(int j) const { return 1 + agent_count + j; }
  int sink() const { return 1 + agent_count + slot_count; }
  int node_count() const { return agent_count + slot_count + 2; }

  // Adjacency layout set up by build_network:
  //   graph[agent i] = [back edge to source, forward edges to slots 0..m-1]
  //   graph[slot j]  = [back edges from agents 0..n-1, forward edge to sink]
  const FlowEdge& agent_slot_edge(int i, int j) const { return graph[agent_node(i)][1 + j]; }
  const FlowEdge& slot_sink_edge(int j) const { return graph[slot_node(j)][agent_count]; }

  std::int64_t pair_flow(int i, int j) const {
    const FlowEdge& e = agent_slot_edge(i, j);
    return graph[e.to][e.rev].cap;  // reverse residual equals pushed flow
  }
  std::int64_t slot_flow(int j) const {
    const FlowEdge& e = slot_sink_edge(j);
    return graph[e.to][e.rev].cap;
  }
};

namespace detail {

inline void add_edge(FlowNetwork& net, int from, int to, std::int64_t cap, std::int64_t cost) {
  const int fwd_index = static_cast<int>(net.graph[from].size());
  const int bwd_index = static_cast<int>(net.graph[to].size());
  net.graph[from].push_back(FlowEdge{to, cap, cost, bwd_index, true});
  net.graph[to].push_back(FlowEdge{from, 0, -cost, fwd_index, false});
}

inline FlowNetwork build_assignment_network(int m, int k,
                                            const std::vector<std::vector<Value>>& values,
                                            std::vector<std::int64_t> supply) {
  FlowNetwork net;
  net.agent_count = static_cast<int>(values.size());
  net.slot_count = m;
  net.slot_capacity = k;
  net.supply = std::move(supply);
  net.graph.assign(net.node_count(), {});
  for (int i = 0; i < net.agent_count; ++i) {
    add_edge(net, net.source(), net.agent_node(i), net.supply[i], 0);
    for (int j = 0; j < m; ++j) {
      add_edge(net, net.agent_node(i), net.slot_node(j), 1, -values[i][j].amount);
    }
  }
  for (int j = 0; j < m; ++j) {
    add_edge(net, net.slot_node(j), net.sink(), k, 0);
  }
  return net;
}

}  // namespace detail

inline FlowNetwork build_network(const SingleSlotInstance& inst) {
  return detail::build_assignment_network(
      inst.slot_count, inst.capacity, inst.values,
      std::vector<std::int64_t>(inst.agent_count(), 1));
}

inline FlowNetwork build_network(const DivisibleInstance& inst) {
  std::vector<std::int64_t> supply(inst.lengths.begin(), inst.lengths.end());
  return detail::build_assignment_network(inst.slot_count, inst.capacity, inst.values,
                                          std::move(supply));
}

struct FlowResult {
  std::vector<std::uint8_t> pair_assigned;  // n*m row-major unit flows
  Value total_value{0};
  std::int64_t total_cost = 0;
  std::int64_t augmentations = 0;
  std::vector<std::int64_t> potential;  // valid for the final residual network

  bool assigned(int i, int j, int m) const { return pair_assigned[static_cast<std::size_t>(i) * m + j] != 0; }
};

namespace detail {

inline constexpr std::int64_t kDistInf = std::numeric_limits<std::int64_t>::max() / 4;

struct DijkstraState {
  std::vector<std::int64_t> dist;
  std::vector<int> parent_node;
  std::vector<int> parent_edge;
};

// Dijkstra over residual edges with reduced costs. Ties pop in node order,
// and relaxation only replaces parents on strict improvement, so the path
// choice is deterministic for a fixed edge construction order.
inline void dijkstra_reduced(const FlowNetwork& net, const std::vector<std::int64_t>& pi,
                             int start, DijkstraState& st) {
  const int nodes = net.node_count();
  st.dist.assign(nodes, kDistInf);
  st.parent_node.assign(nodes, -1);
  st.parent_edge.assign(nodes, -1);
  using Item = std::pair<std::int64_t, int>;
  std::priority_queue<Item, std::vector<Item>, std::greater<Item>> pq;
  st.dist[start] = 0;
  pq.emplace(0, start);
  while (!pq.empty()) {
    auto [d, u] = pq.top();
    pq.pop();
    if (d != st.dist[u]) continue;
    const auto& edges = net.graph[u];
    for (int idx = 0; idx < static_cast<int>(edges.size()); ++idx) {
      const FlowEdge& e = edges[idx];
      if (e.cap <= 0) continue;
      const std::int64_t rc = e.cost + pi[u] - pi[e.to];
      internal_check(rc >= 0, "negative reduced cost in residual network");
      if (d + rc < st.dist[e.to]) {
        st.dist[e.to] = d + rc;
        st.parent_node[e.to] = u;
        st.parent_edge[e.to] = idx;
        pq.emplace(st.dist[e.to], e.to);
      }
    }
  }
}

inline void verify_integral_flow(const FlowNetwork& net) {
  // Conservation at interior nodes and unit bounds on bipartite arcs.
  std::vector<std::int64_t> balance(net.node_count(), 0);
  for (int u = 0; u < net.node_count(); ++u) {
    for (const FlowEdge& e : net.graph[u]) {
      if (!e.forward) continue;
      const std::int64_t flow = net.graph[e.to][e.rev].cap;
      internal_check(flow >= 0 && e.cap >= 0, "flow bounds violated");
      balance[u] -= flow;
      balance[e.to] += flow;
    }
  }
  for (int u = 0; u < net.node_count(); ++u) {
    if (u == net.source() || u == net.sink()) continue;
    internal_check(balance[u] == 0, "flow conservation violated");
  }
  for (int i = 0; i < net.agent_count; ++i) {
    for (int j = 0; j < net.slot_count; ++j) {
      const std::int64_t f = net.pair_flow(i, j);
      internal_check(f == 0 || f == 1, "bipartite arc flow not in {0,1}");
    }
  }
}

}  // namespace detail

// Runs successive shortest augmenting paths until the cheapest residual
// path would not improve total value. The network is left in its final
// residual state; `potential` in the result stays valid for it, which the
// mechanism layer reuses for marginal-welfare queries.
inline FlowResult solve_max_weight_matching(FlowNetwork& net) {
  const int nodes = net.node_count();
  const int n = net.agent_count;
  const int m = net.slot_count;

  FlowResult result;
  result.potential.assign(nodes, 0);
  auto& pi = result.potential;

  // Initial potentials by relaxing layers in topological order. Agent->slot
  // arcs are the only negative ones, so pi[slot] = -max_i v_ij and
  // pi[sink] = min_j pi[slot_j] make every reduced cost non-negative.
  for (int j = 0; j < m; ++j) {
    std::int64_t best = 0;
    for (int i = 0; i < n; ++i) {
      best = std::min(best, net.agent_slot_edge(i, j).cost);
    }
    pi[net.slot_node(j)] = best;
  }
  std::int64_t sink_pi = 0;
  for (int j = 0; j < m; ++j) sink_pi = std::min(sink_pi, pi[net.slot_node(j)]);
  pi[net.sink()] = sink_pi;

  std::int64_t total_supply = 0;
  for (std::int64_t b : net.supply) total_supply += b;

  detail::DijkstraState st;
  while (true) {
    detail::dijkstra_reduced(net, pi, net.source(), st);
    if (st.dist[net.sink()] >= detail::kDistInf) break;
    const std::int64_t path_cost = st.dist[net.sink()] + pi[net.sink()];  // pi[source] == 0
    if (path_cost >= 0) break;

    const std::int64_t reach = st.dist[net.sink()];
    for (int v = 0; v < nodes; ++v) pi[v] += std::min(st.dist[v], reach);

    // Any residual source->sink path crosses the bipartite layer on a unit
    // forward arc, so the bottleneck is always exactly one unit.
    std::int64_t bottleneck = detail::kDistInf;
    for (int v = net.sink(); v != net.source(); v = st.parent_node[v]) {
      bottleneck = std::min(bottleneck, net.graph[st.parent_node[v]][st.parent_edge[v]].cap);
    }
    internal_check(bottleneck == 1, "augmenting path bottleneck must be one unit");
    for (int v = net.sink(); v != net.source(); v = st.parent_node[v]) {
      FlowEdge& e = net.graph[st.parent_node[v]][st.parent_edge[v]];
      e.cap -= 1;
      net.graph[e.to][e.rev].cap += 1;
    }
    result.total_cost += path_cost;
    result.augmentations += 1;
    internal_check(result.augmentations <= total_supply,
                   "augmentation count exceeded total supply");
  }

  detail::verify_integral_flow(net);

  result.pair_assigned.assign(static_cast<std::size_t>(n) * m, 0);
  std::int64_t value = 0;
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < m; ++j) {
      if (net.pair_flow(i, j) == 1) {
        result.pair_assigned[static_cast<std::size_t>(i) * m + j] = 1;
        value -= net.agent_slot_edge(i, j).cost;
      }
    }
  }
  result.total_value = Value{value};
  internal_check(value == -result.total_cost, "flow cost and matched value disagree");
  return result;
}

inline Allocation extract_allocation(const FlowResult& result, const SingleSlotInstance& inst) {
  const int n = inst.agent_count();
  const int m = inst.slot_count;
  std::vector<int> assigned(n, Allocation::kUnassigned);
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < m; ++j) {
      if (result.assigned(i, j, m)) {
        internal_check(assigned[i] == Allocation::kUnassigned, "agent matched to two slots");
        assigned[i] = j;
      }
    }
  }
  return Allocation::single(std::move(assigned));
}

inline Allocation extract_allocation(const FlowResult& result, const DivisibleInstance& inst) {
  const int n = inst.agent_count();
  const int m = inst.slot_count;
  std::vector<std::vector<int>> bundles(n);
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < m; ++j) {
      if (result.assigned(i, j, m)) bundles[i].push_back(j);
    }
  }
  return Allocation::divisible(std::move(bundles));
}

// Test hook: confirms the potentials returned by the solver certify
// optimality of the final residual network.
inline bool potentials_valid(const FlowNetwork& net, const std::vector<std::int64_t>& pi) {
  for (int u = 0; u < net.node_count(); ++u) {
    for (const FlowEdge& e : net.graph[u]) {
      if (e.cap <= 0) continue;
      if (e.cost + pi[u] - pi[e.to] < 0) return false;
    }
  }
  return true;
}

}  // namespace slotmech
