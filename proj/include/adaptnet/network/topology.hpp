#pragma once

#include <Eigen/Dense>
#include <cmath>
#include <queue>
#include <string>
#include <vector>

#include "adaptnet/errors.hpp"
#include "adaptnet/rng.hpp"

namespace adaptnet::network {

using BoolMatrix = Eigen::Matrix<bool, Eigen::Dynamic, Eigen::Dynamic>;

enum class TopologyKind { ring, complete, random_geometric, explicit_adjacency };

// Undirected agent graph. Adjacency is symmetric with a true diagonal
// (every agent is its own neighbor); neighbor lists are sorted and include
// the agent itself.
struct Topology {
  int n_agents = 0;
  BoolMatrix adjacency;
  std::vector<std::vector<int>> neighbors;
};

struct TopologyParams {
  double radius = 0.4;      // random_geometric only
  BoolMatrix adjacency;     // explicit_adjacency only
};

inline bool is_connected(const BoolMatrix& adj) {
  const int n = static_cast<int>(adj.rows());
  if (n == 0) return false;
  std::vector<char> seen(n, 0);
  std::queue<int> q;
  q.push(0);
  seen[0] = 1;
  int reached = 1;
  while (!q.empty()) {
    int v = q.front();
    q.pop();
    for (int u = 0; u < n; ++u) {
      if (adj(v, u) && !seen[u]) {
        seen[u] = 1;
        ++reached;
        q.push(u);
      }
    }
  }
  return reached == n;
}

inline Topology finalize_topology(BoolMatrix adj) {
  const int n = static_cast<int>(adj.rows());
  if (n < 1 || adj.cols() != n)
    throw validation_error("topology: adjacency must be square and non-empty");
  for (int k = 0; k < n; ++k) adj(k, k) = true;
  for (int r = 0; r < n; ++r)
    for (int c = r + 1; c < n; ++c)
      if (adj(r, c) != adj(c, r))
        throw validation_error("topology: adjacency not symmetric at (" +
                               std::to_string(r) + "," + std::to_string(c) + ")");
  if (!is_connected(adj))
    throw validation_error("topology: graph is not connected");

  Topology t;
  t.n_agents = n;
  t.adjacency = std::move(adj);
  t.neighbors.resize(n);
  for (int k = 0; k < n; ++k)
    for (int l = 0; l < n; ++l)
      if (t.adjacency(l, k)) t.neighbors[k].push_back(l);
  return t;
}

inline Topology build_topology(TopologyKind kind, int n,
                               const TopologyParams& params = {},
                               std::uint64_t seed = 0) {
  if (n < 1) throw validation_error("topology: need at least one agent");
  BoolMatrix adj = BoolMatrix::Constant(n, n, false);

  switch (kind) {
    case TopologyKind::ring:
      for (int k = 0; k < n; ++k) {
        adj(k, (k + 1) % n) = true;
        adj((k + 1) % n, k) = true;
      }
      break;

    case TopologyKind::complete:
      adj.setConstant(true);
      break;

    case TopologyKind::random_geometric: {
      if (!(params.radius > 0))
        throw validation_error("topology: random_geometric needs radius > 0");
      // Points are drawn once; only the radius grows until the graph
      // connects, so the result is a deterministic function of (n, seed).
      RngStream rng = RngStream::derive(seed, tag::topology);
      Eigen::MatrixXd pts(2, n);
      for (int k = 0; k < n; ++k) {
        pts(0, k) = rng.uniform();
        pts(1, k) = rng.uniform();
      }
      double r = params.radius;
      for (;;) {
        adj.setConstant(false);
        for (int a = 0; a < n; ++a)
          for (int b = a + 1; b < n; ++b)
            if ((pts.col(a) - pts.col(b)).norm() <= r) {
              adj(a, b) = true;
              adj(b, a) = true;
            }
        for (int k = 0; k < n; ++k) adj(k, k) = true;
        if (is_connected(adj)) break;
        r *= 1.25;
      }
      break;
    }

    case TopologyKind::explicit_adjacency:
      if (params.adjacency.rows() != n || params.adjacency.cols() != n)
        throw validation_error("topology: explicit adjacency has wrong shape");
      adj = params.adjacency;
      break;
  }

  return finalize_topology(std::move(adj));
}

}  // namespace adaptnet::network
