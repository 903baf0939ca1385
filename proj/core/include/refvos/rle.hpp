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

#pragma once

#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

#include "refvos/geometry.hpp"

namespace refvos {

// Compressed RLE as exchanged on the wire: {"size": [h, w], "counts": "..."}.
// The counts string uses the COCO encoding (6 bits per char, ASCII 48..111,
// counts past the second stored as deltas against counts[i-2]).
struct CompressedRle {
  int height = 0;
  int width = 0;
  std::string counts;

  friend bool operator==(const CompressedRle&, const CompressedRle&) = default;
};

std::string encode_counts(const std::vector<std::uint32_t>& counts);
// Throws ParseError on malformed input.
std::vector<std::uint32_t> decode_counts(std::string_view s);

CompressedRle encode_mask(const BinaryMask& mask);
BinaryMask decode_mask(const CompressedRle& rle);

}  // namespace refvos
