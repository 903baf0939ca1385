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

#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include <nlohmann/json.hpp>

#include "refvos/error.hpp"
#include "refvos/geometry.hpp"
#include "refvos/rle.hpp"

namespace refvos::detail {

using nlohmann::json;

inline json box_to_json(const Box2D& b) {
  return json::array({b.xmin, b.ymin, b.xmax, b.ymax});
}

inline Box2D box_from_json(const json& j, const std::string& path) {
  if (!j.is_array() || j.size() != 4)
    throw ValidationError(path, "box must be [xmin, ymin, xmax, ymax]");
  Box2D b;
  try {
    b = {j[0].get<double>(), j[1].get<double>(), j[2].get<double>(),
         j[3].get<double>()};
  } catch (const json::exception&) {
    throw ValidationError(path, "box coordinates must be numbers");
  }
  if (!b.valid()) throw ValidationError(path, "box violates xmin<=xmax, ymin<=ymax");
  return b;
}

inline json mask_to_json(const BinaryMask& m) {
  const CompressedRle rle = encode_mask(m);
  return {{"size", json::array({rle.height, rle.width})}, {"counts", rle.counts}};
}

inline BinaryMask mask_from_json(const json& j, const std::string& path) {
  try {
    CompressedRle rle;
    rle.height = j.at("size").at(0).get<int>();
    rle.width = j.at("size").at(1).get<int>();
    rle.counts = j.at("counts").get<std::string>();
    return decode_mask(rle);
  } catch (const json::exception&) {
    throw ValidationError(path, "mask must be {\"size\": [h, w], \"counts\": str}");
  } catch (const Error& e) {
    throw ValidationError(path, e.what());
  }
}

inline json read_json_file(const std::filesystem::path& p) {
  std::ifstream in(p);
  if (!in) throw IoError("cannot open " + p.string());
  try {
    return json::parse(in);
  } catch (const json::exception& e) {
    throw ValidationError(p.filename().string(), std::string("invalid JSON: ") + e.what());
  }
}

inline void write_text_file(const std::filesystem::path& p, const std::string& text) {
  std::ofstream out(p, std::ios::binary);
  if (!out) throw IoError("cannot write " + p.string());
  out << text;
  if (!out) throw IoError("write failed for " + p.string());
}

template <typename T>
T field(const json& obj, const char* key, const std::string& path) {
  if (!obj.is_object() || !obj.contains(key))
    throw ValidationError(path + "." + key, "missing field");
  try {
    return obj.at(key).get<T>();
  } catch (const json::exception&) {
    throw ValidationError(path + "." + key, "wrong type");
  }
}

}  // namespace refvos::detail
