// Copyright 2026 The TacticForge Authors.
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

#include <array>
#include <cmath>
#include <map>
#include <numeric>

#include "tacticforge/classifier/classifier.hpp"
#include "tacticforge/common/rng.hpp"

namespace tacticforge::classifier {

namespace {

// Largest-remainder apportionment of n items over the three ratios.
std::array<std::size_t, 3> target_sizes(std::size_t n, const SplitRatios& r) {
  const std::array<double, 3> share = {r.train, r.test, r.validation};
  std::array<std::size_t, 3> size{};
  std::array<double, 3> remainder{};
  std::size_t assigned = 0;
  for (int s = 0; s < 3; ++s) {
    const double exact = share[s] * static_cast<double>(n);
    size[s] = static_cast<std::size_t>(std::floor(exact + 1e-9));
    remainder[s] = exact - static_cast<double>(size[s]);
    assigned += size[s];
  }
  while (assigned < n) {
    int best = 0;
    for (int s = 1; s < 3; ++s) {
      if (remainder[s] > remainder[best] + 1e-12) best = s;
    }
    ++size[best];
    remainder[best] = -1.0;
    ++assigned;
  }
  return size;
}

}  // namespace

SplitIndices split(const std::vector<std::string>& strata, const SplitRatios& ratios,
                   std::uint64_t seed) {
  if (strata.empty()) throw std::invalid_argument("split: empty dataset");
  TrainConfig check;
  check.ratios = ratios;
  check.validate();

  std::map<std::string, std::vector<std::size_t>> groups;
  for (std::size_t i = 0; i < strata.size(); ++i) groups[strata[i]].push_back(i);

  Rng rng(seed);
  std::vector<std::size_t> sequence;
  std::vector<std::size_t> pooled;
  sequence.reserve(strata.size());
  for (auto& [key, members] : groups) {
    if (members.size() < 3) {
      pooled.insert(pooled.end(), members.begin(), members.end());
      continue;
    }
    rng.shuffle(members);
    sequence.insert(sequence.end(), members.begin(), members.end());
  }
  rng.shuffle(pooled);
  sequence.insert(sequence.end(), pooled.begin(), pooled.end());

  // Walk the stratum-contiguous sequence, handing each item to the part
  // furthest behind its quota, so every stratum is spread proportionally
  // and the global sizes are exact.
  const auto target = target_sizes(sequence.size(), ratios);
  const double n = static_cast<double>(sequence.size());
  std::array<std::size_t, 3> count{};
  std::array<std::vector<std::size_t>*, 3> parts{};
  SplitIndices out;
  parts = {&out.train, &out.test, &out.validation};
  for (std::size_t i = 0; i < sequence.size(); ++i) {
    int best = -1;
    double best_deficit = 0.0;
    for (int s = 0; s < 3; ++s) {
      if (count[s] >= target[s]) continue;
      const double deficit =
          static_cast<double>(target[s]) * static_cast<double>(i + 1) / n - static_cast<double>(count[s]);
      if (best < 0 || deficit > best_deficit) {
        best = s;
        best_deficit = deficit;
      }
    }
    parts[best]->push_back(sequence[i]);
    ++count[best];
  }
  return out;
}

}  // namespace tacticforge::classifier
