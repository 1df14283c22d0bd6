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

#include "cvwitness/partitions.hpp"

#include <algorithm>
#include <bit>
#include <cctype>
#include <charconv>
#include <sstream>

#include "cvwitness/error.hpp"

namespace cvwitness {
namespace {

constexpr int kMaxEnumeratedModes = 12;
constexpr int kMaxBipartitionModes = 24;

void check_modes(int n, const char* op) {
  if (n < 1 || n > Partition::kMaxModes) {
    std::ostringstream os;
    os << op << ": mode count " << n << " outside [1, " << Partition::kMaxModes
       << "]";
    throw ParseError(os.str());
  }
}

// Emits every partition of `rest` into exactly `k` blocks, in canonical
// order: the block holding min(rest) is chosen in lexicographic order
// (a proper prefix sorts first), then the remainder recursively.
template <class Emit>
void enumerate_blocks(std::uint32_t rest, int k, int depth,
                      std::array<std::uint8_t, Partition::kMaxModes>& labels,
                      Emit& emit) {
  if (rest == 0) {
    if (k == 0) emit(labels, depth);
    return;
  }
  if (k == 0 || std::popcount(rest) < k) return;
  const int first = std::countr_zero(rest);

  // Depth-first walk over subsets containing `first`, extending with larger
  // elements only; this visits subsets in lexicographic order.
  auto walk = [&](auto& self, std::uint32_t block, int last) -> void {
    const std::uint32_t remainder = rest & ~block;
    if (std::popcount(remainder) >= k - 1) {
      for (std::uint32_t b = block; b; b &= b - 1)
        labels[static_cast<std::size_t>(std::countr_zero(b))] =
            static_cast<std::uint8_t>(depth);
      enumerate_blocks(remainder, k - 1, depth + 1, labels, emit);
    }
    for (int f = last + 1; f < 32; ++f) {
      if (remainder & (1u << f)) self(self, block | (1u << f), f);
    }
  };
  walk(walk, 1u << first, first);
}

template <class Emit>
void enumerate_partitions(int n, int k, Emit&& emit) {
  std::array<std::uint8_t, Partition::kMaxModes> labels{};
  const std::uint32_t all = n == 32 ? ~0u : ((1u << n) - 1);
  enumerate_blocks(all, k, 0, labels, emit);
}

std::string_view trim(std::string_view s) {
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front())))
    s.remove_prefix(1);
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back())))
    s.remove_suffix(1);
  return s;
}

int parse_label(std::string_view token, std::string_view whole, int n) {
  token = trim(token);
  int value = 0;
  const auto* begin = token.data();
  const auto* end = token.data() + token.size();
  auto [ptr, ec] = std::from_chars(begin, end, value);
  if (token.empty() || ec != std::errc() || ptr != end) {
    std::ostringstream os;
    os << "partition \"" << whole << "\": bad mode label '" << token << "'";
    throw ParseError(os.str());
  }
  if (value < 1 || value > n) {
    std::ostringstream os;
    os << "partition \"" << whole << "\": mode label " << value
       << " out of range 1.." << n;
    throw ParseError(os.str());
  }
  return value - 1;
}

}  // namespace

Partition Partition::from_labels(const std::vector<int>& labels) {
  const int n = static_cast<int>(labels.size());
  check_modes(n, "Partition::from_labels");
  Partition p;
  p.n_ = n;
  std::vector<std::pair<int, int>> seen;  // (original label, canonical)
  for (int i = 0; i < n; ++i) {
    auto it = std::find_if(seen.begin(), seen.end(),
                           [&](const auto& e) { return e.first == labels[i]; });
    int canonical;
    if (it == seen.end()) {
      canonical = static_cast<int>(seen.size());
      seen.emplace_back(labels[i], canonical);
    } else {
      canonical = it->second;
    }
    p.rgs_[static_cast<std::size_t>(i)] = static_cast<std::uint8_t>(canonical);
  }
  p.k_ = static_cast<int>(seen.size());
  return p;
}

Partition Partition::from_blocks(int n,
                                 const std::vector<std::vector<int>>& blocks) {
  check_modes(n, "Partition::from_blocks");
  std::vector<int> labels(static_cast<std::size_t>(n), -1);
  for (std::size_t b = 0; b < blocks.size(); ++b) {
    if (blocks[b].empty()) throw ParseError("partition has an empty block");
    for (int mode : blocks[b]) {
      if (mode < 0 || mode >= n) {
        std::ostringstream os;
        os << "partition: mode " << mode + 1 << " out of range 1.." << n;
        throw ParseError(os.str());
      }
      if (labels[static_cast<std::size_t>(mode)] != -1) {
        std::ostringstream os;
        os << "partition: mode " << mode + 1 << " appears twice";
        throw ParseError(os.str());
      }
      labels[static_cast<std::size_t>(mode)] = static_cast<int>(b);
    }
  }
  for (int i = 0; i < n; ++i) {
    if (labels[static_cast<std::size_t>(i)] == -1) {
      std::ostringstream os;
      os << "partition: mode " << i + 1 << " is missing";
      throw ParseError(os.str());
    }
  }
  return from_labels(labels);
}

Partition Partition::trivial(int n) {
  return from_labels(std::vector<int>(static_cast<std::size_t>(n), 0));
}

Partition Partition::full(int n) {
  std::vector<int> labels(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i) labels[static_cast<std::size_t>(i)] = i;
  return from_labels(labels);
}

std::vector<std::vector<int>> Partition::blocks() const {
  std::vector<std::vector<int>> out(static_cast<std::size_t>(k_));
  for (int i = 0; i < n_; ++i) out[rgs_[static_cast<std::size_t>(i)]].push_back(i);
  return out;
}

std::string Partition::to_string() const {
  std::string out;
  const bool compact = n_ <= 9;
  bool first_block = true;
  for (const auto& block : blocks()) {
    if (!first_block) out += '|';
    first_block = false;
    bool first_mode = true;
    for (int mode : block) {
      if (!compact && !first_mode) out += ',';
      first_mode = false;
      out += std::to_string(mode + 1);
    }
  }
  return out;
}

std::strong_ordering operator<=>(const Partition& a, const Partition& b) {
  if (auto c = a.n_ <=> b.n_; c != 0) return c;
  if (auto c = a.k_ <=> b.k_; c != 0) return c;
  const auto ab = a.blocks();
  const auto bb = b.blocks();
  return std::lexicographical_compare_three_way(ab.begin(), ab.end(),
                                                bb.begin(), bb.end());
}

Partition parse_partition(std::string_view text, int n) {
  check_modes(n, "parse_partition");
  const std::string_view whole = text;
  text = trim(text);
  if (text.empty()) throw ParseError("empty partition text");

  std::vector<std::vector<int>> blocks;
  std::vector<int> owner(static_cast<std::size_t>(n), -1);
  auto add = [&](int mode) {
    if (owner[static_cast<std::size_t>(mode)] != -1) {
      std::ostringstream os;
      os << "partition \"" << whole << "\": duplicate mode label "
         << mode + 1;
      throw ParseError(os.str());
    }
    owner[static_cast<std::size_t>(mode)] = static_cast<int>(blocks.size()) - 1;
    blocks.back().push_back(mode);
  };

  std::size_t start = 0;
  while (start <= text.size()) {
    const std::size_t bar = text.find('|', start);
    const std::string_view group = trim(
        text.substr(start, bar == std::string_view::npos ? text.size() - start
                                                         : bar - start));
    if (group.empty()) {
      std::ostringstream os;
      os << "partition \"" << whole << "\": empty group";
      throw ParseError(os.str());
    }
    blocks.emplace_back();
    if (group.find(',') == std::string_view::npos && n <= 9) {
      for (char c : group) {
        if (std::isspace(static_cast<unsigned char>(c))) continue;
        add(parse_label(std::string_view(&c, 1), whole, n));
      }
    } else {
      std::size_t s = 0;
      while (s <= group.size()) {
        const std::size_t comma = group.find(',', s);
        const std::size_t len =
            comma == std::string_view::npos ? group.size() - s : comma - s;
        add(parse_label(group.substr(s, len), whole, n));
        if (comma == std::string_view::npos) break;
        s = comma + 1;
      }
    }
    if (bar == std::string_view::npos) break;
    start = bar + 1;
  }

  for (int i = 0; i < n; ++i) {
    if (owner[static_cast<std::size_t>(i)] == -1) {
      std::ostringstream os;
      os << "partition \"" << whole << "\": mode label " << i + 1
         << " is missing";
      throw ParseError(os.str());
    }
  }
  return Partition::from_blocks(n, blocks);
}

std::vector<Partition> all_partitions(int n) {
  if (n < 1 || n > kMaxEnumeratedModes) {
    std::ostringstream os;
    os << "all_partitions: n=" << n << " outside [1, " << kMaxEnumeratedModes
       << "]";
    throw ParseError(os.str());
  }
  std::vector<Partition> out;
  for (int k = 1; k <= n; ++k) {
    enumerate_partitions(n, k, [&](const auto& labels, int) {
      out.push_back(Partition::from_labels(
          std::vector<int>(labels.begin(), labels.begin() + n)));
    });
  }
  return out;
}

std::vector<Partition> bipartitions(int n) {
  if (n < 2 || n > kMaxBipartitionModes) {
    std::ostringstream os;
    os << "bipartitions: n=" << n << " outside [2, " << kMaxBipartitionModes
       << "]";
    throw ParseError(os.str());
  }
  std::vector<Partition> out;
  out.reserve((std::size_t{1} << (n - 1)) - 1);
  enumerate_partitions(n, 2, [&](const auto& labels, int) {
    out.push_back(Partition::from_labels(
        std::vector<int>(labels.begin(), labels.begin() + n)));
  });
  return out;
}

std::vector<Partition> symmetric_bipartition_representatives(int n) {
  if (n < 2 || n > Partition::kMaxModes) {
    std::ostringstream os;
    os << "symmetric_bipartition_representatives: n=" << n
       << " outside [2, " << Partition::kMaxModes << "]";
    throw ParseError(os.str());
  }
  std::vector<Partition> out;
  for (int k = 1; k <= n / 2; ++k) {
    std::vector<int> labels(static_cast<std::size_t>(n), 1);
    std::fill(labels.begin(), labels.begin() + k, 0);
    out.push_back(Partition::from_labels(labels));
  }
  return out;
}

bool is_finer(const Partition& a, const Partition& b) {
  if (a.modes() != b.modes()) {
    std::ostringstream os;
    os << "is_finer: partitions of " << a.modes() << " and " << b.modes()
       << " modes";
    throw DimensionError(os.str());
  }
  std::vector<int> image(static_cast<std::size_t>(a.num_blocks()), -1);
  for (int i = 0; i < a.modes(); ++i) {
    int& target = image[static_cast<std::size_t>(a.block_of(i))];
    if (target == -1) {
      target = b.block_of(i);
    } else if (target != b.block_of(i)) {
      return false;
    }
  }
  return true;
}

std::vector<int> union_of_blocks(const Partition& p, std::uint64_t block_mask) {
  std::vector<int> modes;
  for (int i = 0; i < p.modes(); ++i)
    if (block_mask >> p.block_of(i) & 1u) modes.push_back(i);
  return modes;
}

FreeMask::FreeMask(const Partition& p)
    : n_(p.modes()), cells_(static_cast<std::size_t>(n_ * n_), 0) {
  for (int i = 0; i < n_; ++i) {
    for (int j = i + 1; j < n_; ++j) {
      if (!p.same_block(i, j)) {
        cells_[static_cast<std::size_t>(i * n_ + j)] = 1;
        cells_[static_cast<std::size_t>(j * n_ + i)] = 1;
        pairs_.emplace_back(i, j);
      }
    }
  }
}

}  // namespace cvwitness
