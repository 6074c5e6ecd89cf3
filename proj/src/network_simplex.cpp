#include "network_simplex.hpp"

#include <algorithm>
#include <cmath>
#include <deque>

#include "gfi/numerics.hpp"

namespace gfi::detail {

namespace {

struct Arc {
  int i, j;
  double flow;
};

}  // namespace

TransportSolution transportation_simplex(const std::vector<double>& supply,
                                         const std::vector<double>& demand,
                                         const std::vector<double>& cost) {
  const int m = static_cast<int>(supply.size()), n = static_cast<int>(demand.size());
  if (m == 0 || n == 0) throw DomainError("transportation_simplex: empty marginal");
  if (cost.size() != static_cast<std::size_t>(m) * n)
    throw DomainError("transportation_simplex: cost matrix has the wrong size");
  const int nodes = m + n;

  // Initial basis by the north-west corner rule: a staircase spanning tree.
  std::vector<Arc> arcs;
  arcs.reserve(nodes - 1);
  std::vector<std::vector<int>> adj(nodes);
  {
    int i = 0, j = 0;
    double ra = supply[0], rb = demand[0];
    while (true) {
      const double x = std::max(0.0, std::min(ra, rb));
      const int id = static_cast<int>(arcs.size());
      arcs.push_back({i, j, x});
      adj[i].push_back(id);
      adj[m + j].push_back(id);
      ra -= x;
      rb -= x;
      if (i == m - 1 && j == n - 1) break;
      if (i == m - 1 || (j < n - 1 && rb <= ra)) {
        ++j;
        rb = demand[j];
      } else {
        ++i;
        ra = supply[i];
      }
    }
  }

  double cmax = 0.0;
  for (double c : cost) {
    if (!std::isfinite(c)) throw DomainError("transportation_simplex: non-finite cost");
    cmax = std::max(cmax, std::abs(c));
  }
  const double tol = 1e-12 * std::max(1.0, cmax);

  std::vector<double> pot(nodes);
  std::vector<int> parent(nodes), parent_arc(nodes), depth(nodes);
  std::vector<char> seen(nodes);
  std::deque<int> queue;
  auto other_end = [&](int node, const Arc& a) { return node < m ? m + a.j : a.i; };
  auto build_tree = [&] {
    std::fill(seen.begin(), seen.end(), 0);
    pot[0] = 0.0;
    parent[0] = -1;
    parent_arc[0] = -1;
    depth[0] = 0;
    seen[0] = 1;
    queue.assign(1, 0);
    while (!queue.empty()) {
      const int u = queue.front();
      queue.pop_front();
      for (int id : adj[u]) {
        const Arc& a = arcs[id];
        const int w = other_end(u, a);
        if (seen[w]) continue;
        seen[w] = 1;
        const double c = cost[static_cast<std::size_t>(a.i) * n + a.j];
        pot[w] = c - pot[u];
        parent[w] = u;
        parent_arc[w] = id;
        depth[w] = depth[u] + 1;
        queue.push_back(w);
      }
    }
  };

  const std::size_t total = static_cast<std::size_t>(m) * n;
  const std::size_t block = std::max<std::size_t>(64, static_cast<std::size_t>(std::sqrt(double(total))));
  const std::size_t max_pivots = 200 * total + 1000;
  std::size_t next = 0, pivots = 0;
  std::vector<int> path_a, path_b, cycle;

  while (true) {
    build_tree();
    // Block search pricing: most negative reduced cost within the first block
    // that contains any improving arc.
    double best = -tol;
    long enter = -1;
    std::size_t scanned = 0;
    while (scanned < total && enter < 0) {
      const std::size_t end = std::min(total, scanned + block);
      for (std::size_t t = scanned; t < end; ++t) {
        const std::size_t idx = (next + t) % total;
        const int i = static_cast<int>(idx / n), j = static_cast<int>(idx % n);
        const double r = cost[idx] - pot[i] - pot[m + j];
        if (r < best) {
          best = r;
          enter = static_cast<long>(idx);
        }
      }
      scanned = end;
    }
    if (enter < 0) break;
    next = (next + scanned) % total;
    if (++pivots > max_pivots) throw NumericalError("transportation_simplex: pivot limit exceeded");

    const int ei = static_cast<int>(enter / n), ej = static_cast<int>(enter % n);
    int a = ei, b = m + ej;
    path_a.clear();
    path_b.clear();
    while (a != b) {
      if (depth[a] >= depth[b]) {
        path_a.push_back(parent_arc[a]);
        a = parent[a];
      } else {
        path_b.push_back(parent_arc[b]);
        b = parent[b];
      }
    }
    cycle.assign(path_a.begin(), path_a.end());
    cycle.insert(cycle.end(), path_b.rbegin(), path_b.rend());
    // Edges alternate -, +, -, ... starting next to the entering row.
    double theta = kInf;
    int leave = -1;
    for (std::size_t l = 0; l < cycle.size(); l += 2) {
      const double f = arcs[cycle[l]].flow;
      if (f < theta) {
        theta = f;
        leave = static_cast<int>(l);
      }
    }
    for (std::size_t l = 0; l < cycle.size(); ++l) {
      Arc& arc = arcs[cycle[l]];
      arc.flow = l % 2 == 0 ? arc.flow - theta : arc.flow + theta;
    }
    const int out = cycle[leave];
    Arc& old = arcs[out];
    auto drop = [&](int node) {
      auto& v = adj[node];
      v.erase(std::find(v.begin(), v.end(), out));
    };
    drop(old.i);
    drop(m + old.j);
    old = {ei, ej, theta};
    adj[ei].push_back(out);
    adj[m + ej].push_back(out);
  }

  TransportSolution sol;
  sol.flow.assign(total, 0.0);
  for (const Arc& a : arcs) sol.flow[static_cast<std::size_t>(a.i) * n + a.j] += a.flow;
  sol.u.assign(pot.begin(), pot.begin() + m);
  sol.v.assign(pot.begin() + m, pot.end());
  sol.pivots = pivots;
  return sol;
}

}  // namespace gfi::detail
