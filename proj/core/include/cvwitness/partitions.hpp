// Copyright 2026 The cvwitness Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

#include <array>
#include <compare>
#include <cstdint>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace cvwitness {

/// A set partition of the modes {0, ..., n-1}.
///
/// Stored as a restricted growth string: block labels are assigned in order
/// of each block's smallest mode, which is exactly the canonical form (modes
/// ascending inside a block, blocks ordered by minimum). Two partitions are
/// equal iff their canonical forms are equal.
///
/// Mode indices are 0-based in the API; the text form uses 1-based labels.
class Partition {
 public:
  static constexpr int kMaxModes = 32;

  Partition() = default;

  /// Blocks of 0-based modes. Throws ParseError on overlap, gaps, empty
  /// blocks or out-of-range indices.
  static Partition from_blocks(int n, const std::vector<std::vector<int>>& blocks);
  /// Arbitrary per-mode block labels, relabelled to canonical form.
  static Partition from_labels(const std::vector<int>& labels);
  /// Single block {0..n-1}: no separability assumed.
  static Partition trivial(int n);
  /// Every mode on its own: full separability.
  static Partition full(int n);

  int modes() const noexcept { return n_; }
  int num_blocks() const noexcept { return k_; }
  int block_of(int mode) const { return rgs_[static_cast<std::size_t>(mode)]; }
  bool same_block(int i, int j) const { return block_of(i) == block_of(j); }
  std::vector<std::vector<int>> blocks() const;

  /// Canonical text: "14|23" for n <= 9, "1,10|2,3,4,5,6,7,8,9" beyond.
  std::string to_string() const;

  friend bool operator==(const Partition& a, const Partition& b) {
    return a.n_ == b.n_ && a.rgs_ == b.rgs_;
  }

  /// Block count first, then lexicographic order of the canonical block list.
  friend std::strong_ordering operator<=>(const Partition& a,
                                          const Partition& b);

 private:
  int n_ = 0;
  int k_ = 0;
  std::array<std::uint8_t, kMaxModes> rgs_{};
};

/// Parses "2|134", "1|2|34" or comma-separated groups "1,10|2,3,4,5,6,7,8,9".
/// Bare digit strings are accepted only while n <= 9.
Partition parse_partition(std::string_view text, int n);

/// Every set partition of n modes (Bell(n) of them), 1 <= n <= 12, sorted.
std::vector<Partition> all_partitions(int n);

/// The 2^(n-1) - 1 two-block partitions, n >= 2, sorted.
std::vector<Partition> bipartitions(int n);

/// The floor(n/2) partitions {0..k-1 | k..n-1}, k = 1..floor(n/2). Enough for
/// witnesses that are invariant under every permutation of the modes.
std::vector<Partition> symmetric_bipartition_representatives(int n);

/// True iff every block of `a` lies inside some block of `b`.
bool is_finer(const Partition& a, const Partition& b);

/// Union of the blocks selected by `block_mask` (bit k = block k).
std::vector<int> union_of_blocks(const Partition& p, std::uint64_t block_mask);

/// Entries of X and P that separability lets us replace: the cross-block
/// pairs. mask(i, j) is symmetric with a false diagonal.
class FreeMask {
 public:
  explicit FreeMask(const Partition& p);

  int modes() const noexcept { return n_; }
  bool operator()(int i, int j) const {
    return cells_[static_cast<std::size_t>(i * n_ + j)] != 0;
  }
  /// Free pairs (i, j) with i < j, row-major order.
  const std::vector<std::pair<int, int>>& pairs() const noexcept {
    return pairs_;
  }
  int count() const noexcept { return static_cast<int>(pairs_.size()); }

 private:
  int n_;
  std::vector<char> cells_;
  std::vector<std::pair<int, int>> pairs_;
};

inline FreeMask free_mask(const Partition& p) { return FreeMask(p); }

}  // namespace cvwitness
