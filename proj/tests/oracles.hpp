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

// Straight-line reference implementations used to cross-check the engine.
// They share no code with the library beyond plain data types.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <numeric>
#include <random>
#include <string>
#include <utility>
#include <vector>

#include <Eigen/Core>

namespace seqrec::oracle {

// Neighbouring scores (in sorted order) closer than this are one tie group,
// ordered by ordinal.
inline constexpr double kTieEpsilon = 1e-12;

struct Scored {
  std::size_t ordinal;
  double score;
};

inline void sort_with_tie_rule(std::vector<Scored>& v) {
  std::sort(v.begin(), v.end(), [](const Scored& a, const Scored& b) {
    if (a.score != b.score) return a.score > b.score;
    return a.ordinal < b.ordinal;
  });
  std::vector<Scored> out;
  std::vector<Scored> group;
  for (std::size_t i = 0; i < v.size(); ++i) {
    if (!group.empty() && group.back().score - v[i].score > kTieEpsilon) {
      std::sort(group.begin(), group.end(),
                [](const Scored& a, const Scored& b) { return a.ordinal < b.ordinal; });
      out.insert(out.end(), group.begin(), group.end());
      group.clear();
    }
    group.push_back(v[i]);
  }
  std::sort(group.begin(), group.end(),
            [](const Scored& a, const Scored& b) { return a.ordinal < b.ordinal; });
  out.insert(out.end(), group.begin(), group.end());
  v = std::move(out);
}

// Full BM25 scoring of every document against the distinct query terms,
// dropping zero scores. Documents are pre-tokenized.
inline std::vector<Scored> bm25_ranking(const std::vector<std::vector<std::string>>& docs,
                                        const std::vector<std::string>& query, double k1 = 1.2,
                                        double b = 0.75) {
  const double n_docs = static_cast<double>(docs.size());
  double total_len = 0;
  for (const auto& d : docs) total_len += static_cast<double>(d.size());
  const double avgdl = total_len / n_docs;

  std::vector<std::string> distinct;
  for (const auto& t : query) {
    if (std::find(distinct.begin(), distinct.end(), t) == distinct.end()) distinct.push_back(t);
  }

  std::vector<Scored> out;
  for (std::size_t d = 0; d < docs.size(); ++d) {
    double score = 0;
    for (const auto& term : distinct) {
      double tf = static_cast<double>(std::count(docs[d].begin(), docs[d].end(), term));
      if (tf == 0) continue;
      double df = 0;
      for (const auto& other : docs) {
        if (std::find(other.begin(), other.end(), term) != other.end()) df += 1;
      }
      double idf = std::log(1.0 + (n_docs - df + 0.5) / (df + 0.5));
      double len_ratio = static_cast<double>(docs[d].size()) / avgdl;
      score += idf * (tf * (k1 + 1.0)) / (tf + k1 * (1.0 - b + b * len_ratio));
    }
    if (score > 0) out.push_back({d, score});
  }
  sort_with_tie_rule(out);
  return out;
}

// Every row scored by dot product and fully sorted.
inline std::vector<Scored> dot_ranking(const Eigen::MatrixXf& rows, const Eigen::VectorXf& query) {
  std::vector<Scored> out;
  for (Eigen::Index i = 0; i < rows.rows(); ++i) {
    double s = 0;
    for (Eigen::Index j = 0; j < rows.cols(); ++j) {
      s += static_cast<double>(rows(i, j)) * static_cast<double>(query(j));
    }
    out.push_back({static_cast<std::size_t>(i), s});
  }
  sort_with_tie_rule(out);
  return out;
}

inline double ndcg_gain(std::size_t rank, std::size_t k) {
  return rank <= k ? 1.0 / std::log2(static_cast<double>(rank) + 1.0) : 0.0;
}

// Rank-interleave fusion written as nested loops over rounds and beams.
template <typename Id>
std::vector<Id> interleave(const std::vector<std::vector<Id>>& beams, std::size_t k) {
  std::vector<Id> out;
  std::size_t depth = 0;
  for (const auto& b : beams) depth = std::max(depth, b.size());
  for (std::size_t r = 0; r < depth; ++r) {
    for (const auto& b : beams) {
      if (out.size() == k) return out;
      if (r < b.size() && std::find(out.begin(), out.end(), b[r]) == out.end()) out.push_back(b[r]);
    }
  }
  return out;
}

}  // namespace seqrec::oracle
