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

#ifndef FPRIV_FLOW_H_
#define FPRIV_FLOW_H_

#include <cstdint>
#include <span>
#include <vector>

#include "fpriv/privacy.h"
#include "fpriv/validate.h"

namespace fpriv {

// Dinic's algorithm on an adjacency-list residual graph.
class MaxFlow {
 public:
  explicit MaxFlow(int node_count);

  // Returns the edge index, usable with flow_on().
  int AddEdge(int from, int to, int64_t capacity);
  int64_t Solve(int source, int sink);
  int64_t flow_on(int edge) const;

 private:
  struct Edge {
    int to;
    int64_t capacity;
  };

  bool BuildLevels(int source, int sink);
  int64_t Push(int node, int sink, int64_t limit);

  std::vector<Edge> edges_;
  std::vector<std::vector<int>> adjacency_;
  std::vector<int64_t> initial_capacity_;
  std::vector<int> level_;
  std::vector<size_t> next_;
};

// Decides validity of a setting with any number of sizes by max-flow:
// source -> value i (capacity o_i), value i -> every individual bucket of
// size S_j (capacity floor(f'_i S_j)), bucket -> sink (capacity S_j). Valid
// iff the flow saturates all |T| records and the buckets are filled exactly.
// Cost grows with the number of buckets; meant for small instances.
bool FlowFeasible(std::span<const int64_t> counts, const PrivacySpec& spec,
                  const BucketSetting& setting);

}  // namespace fpriv

#endif  // FPRIV_FLOW_H_
