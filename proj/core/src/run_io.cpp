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

#include <algorithm>
#include <array>
#include <string>

#include <nlohmann/json.hpp>

#include "json_io.hpp"
#include "refvos/error.hpp"
#include "refvos/pipeline.hpp"

namespace refvos {

using ojson = nlohmann::ordered_json;

std::string results_json_text(const RunResult& r) {
  ojson frames = ojson::array();
  for (const auto& m : r.masks.frames) frames.push_back(ojson(detail::mask_to_json(m)));
  ojson per_id = ojson::object();
  for (const auto& [id, masks] : r.per_id_masks) {
    ojson seq = ojson::array();
    for (const auto& m : masks) seq.push_back(ojson(detail::mask_to_json(m)));
    per_id[std::to_string(id)] = seq;
  }
  const StructuredQuery& q = r.structured;
  const ojson j = {
      {"video_id", r.video_id},
      {"query", r.query},
      {"structured_query",
       {{"candidate_entities", q.candidate_entities},
        {"context_entities", q.context_entities},
        {"motion", q.motion_descriptor},
        {"posture", q.posture_descriptor},
        {"cardinality", q.cardinality}}},
      {"selected_ids", r.selected_ids},
      {"selection", r.selection},
      {"stage_sizes",
       {{"candidates", r.candidate_count},
        {"filtered", r.filtered_count},
        {"selected", r.selected_ids.size()}}},
      {"fpv_activated", r.fpv_activated},
      {"zero_candidates", r.zero_candidates},
      {"low_confidence", r.low_confidence},
      {"frames", frames},
      {"per_id", per_id}};
  return j.dump(1) + "\n";
}

std::string trace_jsonl_text(const RunResult& r) {
  std::string out;
  for (std::size_t i = 0; i < r.trace.size(); ++i) {
    ojson line = {{"seq", i}, {"stage", r.trace[i].stage}};
    const ojson payload = ojson::parse(r.trace[i].payload);
    for (auto it = payload.begin(); it != payload.end(); ++it) line[it.key()] = it.value();
    out += line.dump() + "\n";
  }
  return out;
}

void write_run_outputs(const RunResult& result, const std::filesystem::path& dir) {
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  if (ec) throw IoError("cannot create " + dir.string() + ": " + ec.message());
  detail::write_text_file(dir / "results.json", results_json_text(result));
  detail::write_text_file(dir / "trace.jsonl", trace_jsonl_text(result));
}

MaskSequence read_result_masks(const std::filesystem::path& results_json) {
  const auto j = detail::read_json_file(results_json);
  MaskSequence seq;
  seq.video_id = j.value("video_id", std::string());
  if (!j.contains("frames") || !j["frames"].is_array())
    throw ValidationError("results.frames", "missing mask list");
  const auto& frames = j["frames"];
  for (std::size_t i = 0; i < frames.size(); ++i)
    seq.frames.push_back(
        detail::mask_from_json(frames[i], "results.frames[" + std::to_string(i) + "]"));
  return seq;
}

namespace {

// 3x5 bitmap digits, one row per entry, most significant bit on the left.
constexpr std::array<std::array<std::uint8_t, 5>, 10> kDigits = {{
    {7, 5, 5, 5, 7}, {2, 6, 2, 2, 7}, {7, 1, 7, 4, 7}, {7, 1, 7, 1, 7}, {5, 5, 7, 1, 1},
    {7, 4, 7, 1, 7}, {7, 4, 7, 5, 7}, {7, 1, 1, 1, 1}, {7, 5, 7, 5, 7}, {7, 5, 7, 1, 7},
}};

constexpr std::array<std::array<std::uint8_t, 3>, 6> kPalette = {{
    {255, 64, 64}, {64, 200, 255}, {255, 220, 0}, {120, 255, 120}, {255, 120, 255},
    {255, 160, 60},
}};

void draw_label(Image& img, int x0, int y0, int id, const std::array<std::uint8_t, 3>& rgb) {
  const std::string text = std::to_string(id);
  for (std::size_t n = 0; n < text.size(); ++n) {
    const auto& glyph = kDigits[static_cast<std::size_t>(text[n] - '0')];
    for (int row = 0; row < 5; ++row) {
      for (int col = 0; col < 3; ++col) {
        if (!((glyph[row] >> (2 - col)) & 1)) continue;
        const int x = x0 + static_cast<int>(n) * 4 + col, y = y0 + row;
        if (x < 0 || y < 0 || x >= img.width || y >= img.height) continue;
        for (int c = 0; c < 3; ++c) img.at(x, y, c) = rgb[c];
      }
    }
  }
}

Image to_rgb(const Image& img) {
  if (img.channels == 3) return img;
  Image out(img.width, img.height, 3);
  for (int y = 0; y < img.height; ++y)
    for (int x = 0; x < img.width; ++x)
      for (int c = 0; c < 3; ++c) out.at(x, y, c) = img.at(x, y, 0);
  return out;
}

}  // namespace

void render_overlays(const RunResult& result, const PerceptionBundle& bundle,
                     const std::filesystem::path& out_dir) {
  std::error_code ec;
  std::filesystem::create_directories(out_dir, ec);
  if (ec) throw IoError("cannot create " + out_dir.string() + ": " + ec.message());
  for (int f = 0; f < bundle.video.frame_count; ++f) {
    Image img = to_rgb(bundle.load_frame(f));
    std::size_t colour = 0;
    for (const auto& [id, masks] : result.per_id_masks) {
      const auto& rgb = kPalette[colour++ % kPalette.size()];
      if (static_cast<std::size_t>(f) >= masks.size() || masks[f].empty()) continue;
      const BinaryMask& m = masks[f];
      for (int y = 0; y < img.height && y < m.height(); ++y)
        for (int x = 0; x < img.width && x < m.width(); ++x)
          if (m.at(x, y))
            for (int c = 0; c < 3; ++c)
              img.at(x, y, c) = static_cast<std::uint8_t>((img.at(x, y, c) + rgb[c]) / 2);
      const Box2D box = *m.bounding_box();
      draw_label(img, static_cast<int>(box.xmin), std::max(0, static_cast<int>(box.ymin) - 6),
                 id, rgb);
    }
    write_png(out_dir / frame_file_name(f), img);
  }
}

}  // namespace refvos
