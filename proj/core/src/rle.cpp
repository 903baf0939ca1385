// Copyright 2026 The refvos Authors.
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

#include "refvos/rle.hpp"

#include "refvos/error.hpp"

namespace refvos {

std::string encode_counts(const std::vector<std::uint32_t>& counts) {
  std::string s;
  for (std::size_t i = 0; i < counts.size(); ++i) {
    long long x = counts[i];
    if (i > 2) x -= static_cast<long long>(counts[i - 2]);
    bool more = true;
    while (more) {
      char c = static_cast<char>(x & 0x1f);
      x >>= 5;
      more = (c & 0x10) ? x != -1 : x != 0;
      if (more) c |= 0x20;
      s.push_back(static_cast<char>(c + 48));
    }
  }
  return s;
}

std::vector<std::uint32_t> decode_counts(std::string_view s) {
  std::vector<std::uint32_t> counts;
  std::size_t k = 0;
  while (k < s.size()) {
    long long x = 0;
    int m = 0;
    bool more = true;
    while (more) {
      if (k >= s.size()) throw ParseError("truncated RLE counts string");
      const int c = static_cast<int>(s[k]) - 48;
      if (c < 0 || c > 63) throw ParseError("invalid RLE character");
      if (m > 12) throw ParseError("RLE count overflow");
      x |= static_cast<long long>(c & 0x1f) << (5 * m);
      more = (c & 0x20) != 0;
      ++k;
      ++m;
      if (!more && (c & 0x10)) x |= -1LL << (5 * m);
    }
    if (counts.size() > 2) x += counts[counts.size() - 2];
    if (x < 0 || x > 0xffffffffLL) throw ParseError("RLE count out of range");
    counts.push_back(static_cast<std::uint32_t>(x));
  }
  return counts;
}

CompressedRle encode_mask(const BinaryMask& mask) {
  return {mask.height(), mask.width(), encode_counts(mask.runs())};
}

BinaryMask decode_mask(const CompressedRle& rle) {
  if (rle.width < 0 || rle.height < 0) throw ParseError("negative RLE size");
  return BinaryMask::from_runs(rle.width, rle.height, decode_counts(rle.counts));
}

}  // namespace refvos
