// Copyright 2026 The seqrec Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

#include <algorithm>
#include <cstddef>
#include <string>
#include <string_view>
#include <vector>

#include "seqrec/corpus.hpp"

namespace seqrec {

// One retrieved catalog document.
struct Hit {
  std::size_t ordinal = 0;
  ItemId id;
  double score = 0.0;

  bool operator==(const Hit&) const = default;
};

// Scores this close are one tie. Mathematically equal sums accumulated in
// different orders land a few ulps apart.
inline constexpr double kScoreTieTolerance = 1e-12;

// Reorders `v` so its first min(k, size) entries are the best by descending
// score and truncates. Scores are grouped into tie clusters (consecutive
// gaps <= kScoreTieTolerance in score order); each cluster is ordered by
// ascending ordinal. Only the tail chained to the cut-off is sorted.
template <typename T, typename ScoreFn, typename OrdinalFn>
void rank_with_ties(std::vector<T>& v, std::size_t k, ScoreFn score, OrdinalFn ordinal) {
  auto exact = [&](const T& a, const T& b) {
    if (score(a) != score(b)) return score(a) > score(b);
    return ordinal(a) < ordinal(b);
  };
  const std::size_t n = std::min(k, v.size());
  if (n == 0) {
    v.clear();
    return;
  }
  std::size_t head = n;
  std::partial_sort(v.begin(), v.begin() + static_cast<long>(head), v.end(), exact);
  while (head < v.size()) {
    const double floor = score(v[head - 1]) - kScoreTieTolerance;
    auto tail = v.begin() + static_cast<long>(head);
    auto mid = std::partition(tail, v.end(), [&](const T& x) { return score(x) >= floor; });
    if (mid == tail) break;
    head += static_cast<std::size_t>(mid - tail);
    std::sort(v.begin(), v.begin() + static_cast<long>(head), exact);
  }
  std::size_t start = 0;
  for (std::size_t i = 1; i <= head; ++i) {
    if (i < head && score(v[i - 1]) - score(v[i]) <= kScoreTieTolerance) continue;
    std::sort(v.begin() + static_cast<long>(start), v.begin() + static_cast<long>(i),
              [&](const T& a, const T& b) { return ordinal(a) < ordinal(b); });
    start = i;
  }
  v.resize(n);
}

inline void rank_hits(std::vector<Hit>& hits, std::size_t k) {
  rank_with_ties(
      hits, k, [](const Hit& h) { return h.score; }, [](const Hit& h) { return h.ordinal; });
}

// Text query -> ranked catalog hits. Implementations are immutable after
// construction and safe to query concurrently.
class Retriever {
 public:
  virtual ~Retriever() = default;
  virtual std::string name() const = 0;
  // Identifies the index contents (and provider, for dense retrieval).
  virtual std::string fingerprint() const = 0;
  virtual std::vector<Hit> retrieve(std::string_view query, std::size_t k) const = 0;
};

}  // namespace seqrec
