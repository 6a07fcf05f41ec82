// Copyright 2026 The softle authors. All rights reserved.
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

#include <cstdint>
#include <random>
#include <string_view>
#include <vector>

namespace softle {

/// Deterministic random stream.
///
/// The engine is std::mt19937_64, whose output sequence is fixed by the C++
/// standard. The conversions to doubles, bounded integers and normals are
/// implemented here rather than through <random> distributions, whose
/// algorithms are implementation-defined:
///
///   uniform()      (next() >> 11) * 2^-53, in [0, 1)
///   below(n)       rejection sampling on the top bits of next()
///   normal()       Marsaglia polar method, spare value cached
///
/// Independent substreams are obtained by hashing (seed, tag) with
/// SplitMix64 over the tag's bytes; see Rng::substream.
class Rng {
 public:
  explicit Rng(std::uint64_t seed);

  /// Child stream for a named purpose ("datagen/train", "teacher/init", ...).
  /// Depends only on the root seed and the tag, never on draws already made.
  Rng substream(std::string_view tag) const;

  std::uint64_t seed() const { return seed_; }

  std::uint64_t next();
  double uniform();
  double uniform(double lo, double hi);
  std::uint64_t below(std::uint64_t n);
  double normal();
  bool bernoulli(double p);

  template <typename T>
  void shuffle(std::vector<T>& items) {
    for (std::size_t i = items.size(); i > 1; --i) {
      const auto j = static_cast<std::size_t>(below(i));
      std::swap(items[i - 1], items[j]);
    }
  }

 private:
  std::uint64_t seed_;
  std::mt19937_64 engine_;
  bool has_spare_ = false;
  double spare_ = 0.0;
};

std::uint64_t splitmix64(std::uint64_t x);

}  // namespace softle
