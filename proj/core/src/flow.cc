// Copyright 2026 The fpriv Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     https://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "fpriv/flow.h"

#include <algorithm>
#include <limits>
#include <numeric>
#include <queue>

namespace fpriv {

MaxFlow::MaxFlow(int node_count) : adjacency_(node_count) {}

int MaxFlow::AddEdge(int from, int to, int64_t capacity) {
  const int id = static_cast<int>(edges_.size());
  edges_.push_back({to, capacity});
  edges_.push_back({from, 0});
  initial_capacity_.push_back(capacity);
  initial_capacity_.push_back(0);
  adjacency_[from].push_back(id);
  adjacency_[to].push_back(id + 1);
  return id;
}

int64_t MaxFlow::flow_on(int edge) const {
  return initial_capacity_[edge] - edges_[edge].capacity;
}

bool MaxFlow::BuildLevels(int source, int sink) {
  level_.assign(adjacency_.size(), -1);
  std::queue<int> frontier;
  level_[source] = 0;
  frontier.push(source);
  while (!frontier.empty()) {
    const int u = frontier.front();
    frontier.pop();
    for (int e : adjacency_[u]) {
      const Edge& edge = edges_[e];
      if (edge.capacity > 0 && level_[edge.to] < 0) {
        level_[edge.to] = level_[u] + 1;
        frontier.push(edge.to);
      }
    }
  }
  return level_[sink] >= 0;
}

int64_t MaxFlow::Push(int node, int sink, int64_t limit) {
  if (node == sink) return limit;
  for (size_t& i = next_[node]; i < adjacency_[node].size(); ++i) {
    const int e = adjacency_[node][i];
    Edge& edge = edges_[e];
    if (edge.capacity <= 0 || level_[edge.to] != level_[node] + 1) continue;
    const int64_t pushed =
        Push(edge.to, sink, std::min(limit, edge.capacity));
    if (pushed > 0) {
      edge.capacity -= pushed;
      edges_[e ^ 1].capacity += pushed;
      return pushed;
    }
  }
  return 0;
}

int64_t MaxFlow::Solve(int source, int sink) {
  int64_t total = 0;
  while (BuildLevels(source, sink)) {
    next_.assign(adjacency_.size(), 0);
    while (int64_t f = Push(source, sink,
                            std::numeric_limits<int64_t>::max())) {
      total += f;
    }
  }
  return total;
}

bool FlowFeasible(std::span<const int64_t> counts, const PrivacySpec& spec,
                  const BucketSetting& setting) {
  const int64_t total =
      std::accumulate(counts.begin(), counts.end(), int64_t{0});
  if (setting.capacity() != total) return false;

  const int m = static_cast<int>(counts.size());
  const int buckets = static_cast<int>(setting.bucket_count());
  const int source = 0;
  const int first_value = 1;
  const int first_bucket = first_value + m;
  const int sink = first_bucket + buckets;
  MaxFlow flow(sink + 1);

  for (int i = 0; i < m; ++i) {
    if (counts[i] > 0) flow.AddEdge(source, first_value + i, counts[i]);
  }
  int bucket = first_bucket;
  for (const BucketGroup& g : setting.groups()) {
    for (int64_t k = 0; k < g.count; ++k, ++bucket) {
      flow.AddEdge(bucket, sink, g.size);
      for (int i = 0; i < m; ++i) {
        const int64_t cap = std::min(MaxPerBucket(spec.threshold(i), g.size),
                                     counts[i]);
        if (counts[i] > 0 && cap > 0) flow.AddEdge(first_value + i, bucket, cap);
      }
    }
  }
  return flow.Solve(source, sink) == total;
}

}  // namespace fpriv
