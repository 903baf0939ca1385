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

#include "refvos/query.hpp"

#include <array>
#include <map>
#include <set>

#include <nlohmann/json.hpp>

#include "refvos/error.hpp"
#include "text_util.hpp"

namespace refvos {

using nlohmann::json;

namespace {

const std::set<std::string> kDeterminers = {"the", "a", "an", "this", "that",
                                            "these", "those"};

const std::set<std::string> kStopWords = {
    "who", "which", "that", "is", "are", "was", "were", "and", "of", "with",
    "to", "in", "on", "at", "its", "their", "his", "her", "being", "while"};

const std::set<std::string> kMotionWords = {
    "moving", "move", "moves", "walking", "walk", "walks", "running", "run",
    "runs", "riding", "ride", "rides", "turning", "turn", "turns", "stationary",
    "motionless", "still", "static", "stopped", "left", "right", "up", "down",
    "fast", "slow", "quickly", "slowly", "jumping", "flying", "swimming",
    "forward", "backward", "away", "toward", "towards"};

const std::map<std::string, std::string> kPostureWords = {
    {"stood", "standing"},     {"stand", "standing"},   {"stands", "standing"},
    {"standing", "standing"},  {"sat", "sitting"},      {"sit", "sitting"},
    {"sits", "sitting"},       {"sitting", "sitting"},  {"seated", "sitting"},
    {"lay", "lying"},          {"lie", "lying"},        {"lies", "lying"},
    {"lying", "lying"},        {"laying", "lying"},     {"crouching", "crouching"},
    {"crouched", "crouching"}, {"kneeling", "kneeling"}, {"sleeping", "sleeping"}};

const std::set<std::string> kAttributeWords = {
    "white", "black", "brown", "gray",  "grey",    "red",     "green",
    "blue",  "yellow", "orange", "pink", "purple", "spotted", "striped",
    "big",   "small", "large",  "little", "tall",  "short"};

struct Preposition {
  std::vector<std::string> words;
  // Relation carried into the motion descriptor; empty for pure locatives.
  std::string relation;
};

const std::array<Preposition, 5> kPrepositions = {{
    {{"in", "front", "of"}, "in front"},
    {{"next", "to"}, ""},
    {{"behind"}, "behind"},
    {{"near"}, ""},
    {{"by"}, ""},
}};

const std::array<const char*, 10> kNumberWords = {
    "one", "two", "three", "four", "five", "six", "seven", "eight", "nine", "ten"};

std::string canonical_motion(const std::string& w) {
  if (kMotionWords.count(w)) return w;
  // motionlessly -> motionless, quickly stays (already listed).
  if (w.size() > 4 && w.ends_with("ly")) {
    const std::string stem = w.substr(0, w.size() - 2);
    if (kMotionWords.count(stem)) return stem;
  }
  return {};
}

const Preposition* match_preposition(const std::vector<std::string>& toks,
                                     std::size_t i) {
  for (const auto& p : kPrepositions) {
    if (i + p.words.size() > toks.size()) continue;
    bool ok = true;
    for (std::size_t k = 0; k < p.words.size(); ++k)
      ok = ok && toks[i + k] == p.words[k];
    if (ok) return &p;
  }
  return nullptr;
}

bool is_structural(const std::vector<std::string>& toks, std::size_t i) {
  const std::string& w = toks[i];
  return kStopWords.count(w) || kPostureWords.count(w) ||
         !canonical_motion(w).empty() || match_preposition(toks, i) != nullptr;
}

std::vector<std::string> string_list(const json& v) {
  std::vector<std::string> out;
  auto push = [&](const json& item) {
    if (!item.is_string()) return;
    std::string s = detail::trim(item.get<std::string>());
    if (!s.empty()) out.push_back(std::move(s));
  };
  if (v.is_array()) {
    for (const auto& item : v) push(item);
  } else {
    push(v);
  }
  return out;
}

std::string text_field(const json& obj, const char* key) {
  if (!obj.contains(key)) return {};
  const json& v = obj[key];
  if (v.is_string()) return detail::trim(v.get<std::string>());
  if (v.is_array()) return detail::join(string_list(v), " ");
  return {};
}

int cardinality_field(const json& obj) {
  if (!obj.contains("cardinality")) return 1;
  const json& v = obj["cardinality"];
  if (v.is_number_integer() && v.get<long long>() >= 1 && v.get<long long>() <= 1000)
    return static_cast<int>(v.get<long long>());
  if (v.is_string()) {
    const int k = parse_cardinality_word(detail::trim(v.get<std::string>()));
    return k >= 1 ? k : 1;
  }
  return 1;
}

}  // namespace

int parse_cardinality_word(const std::string& word) {
  const std::string w = detail::to_lower(word);
  for (std::size_t i = 0; i < kNumberWords.size(); ++i)
    if (w == kNumberWords[i]) return static_cast<int>(i) + 1;
  if (!w.empty() && w.size() <= 3 &&
      std::all_of(w.begin(), w.end(), [](unsigned char c) { return std::isdigit(c); }))
    return std::stoi(w);
  return 0;
}

std::string normalize_entity(const std::string& phrase) {
  std::vector<std::string> toks = detail::words(phrase);
  if (toks.empty()) return {};
  std::string& last = toks.back();
  if (last.size() > 4 && last.ends_with("ies")) {
    last = last.substr(0, last.size() - 3) + "y";
  } else if (last.size() > 4 && (last.ends_with("ches") || last.ends_with("shes") ||
                                 last.ends_with("xes") || last.ends_with("sses"))) {
    last.resize(last.size() - 2);
  } else if (last.size() > 3 && last.back() == 's' && !last.ends_with("ss") &&
             !last.ends_with("us") && !last.ends_with("is")) {
    last.pop_back();
  }
  return detail::join(toks, " ");
}

std::string build_decomposition_prompt(const std::string& query) {
  if (detail::trim(query).empty()) throw InputError("empty query");
  const std::string quoted = json(query).dump();
  std::string p;
  p += "You are a semantic parser for referring video object segmentation.\n";
  p += "Transform the natural language query below into a structured, five-part "
       "command.\n\n";
  p += "Query: " + quoted + "\n\n";
  p += "Fields:\n";
  p += "1. candidate_entities: list of noun phrases naming the object category "
       "being referred to.\n";
  p += "2. context_entities: list of other noun phrases mentioned as reference "
       "objects.\n";
  p += "3. motion: words describing how the target moves (empty string if none).\n";
  p += "4. posture: words describing the target's posture or visual attributes "
       "(empty string if none).\n";
  p += "5. cardinality: positive integer, the number of target objects.\n\n";
  p += "Respond with a single JSON object inside a ```json fenced block with "
       "exactly these keys: \"candidate_entities\", \"context_entities\", "
       "\"motion\", \"posture\", \"cardinality\".\n";
  return p;
}

StructuredQuery parse_decomposition_response(const std::string& text,
                                             const std::string& raw_query) {
  const auto obj_text = detail::first_json_object(text);
  if (!obj_text) throw ParseError("no JSON object in decomposition response");
  json obj;
  try {
    obj = json::parse(*obj_text);
  } catch (const json::exception& e) {
    throw ParseError(std::string("malformed decomposition object: ") + e.what());
  }
  if (!obj.is_object() || !obj.contains("candidate_entities"))
    throw ParseError("decomposition object lacks candidate_entities");

  StructuredQuery q;
  q.candidate_entities = string_list(obj["candidate_entities"]);
  if (q.candidate_entities.empty())
    throw ParseError("candidate_entities is empty");
  if (obj.contains("context_entities"))
    q.context_entities = string_list(obj["context_entities"]);
  q.motion_descriptor = text_field(obj, "motion");
  q.posture_descriptor = text_field(obj, "posture");
  q.cardinality = cardinality_field(obj);
  q.raw_query = raw_query;
  return q;
}

std::string render_structured_query(const StructuredQuery& q) {
  json obj = {
      {"candidate_entities", q.candidate_entities},
      {"context_entities", q.context_entities},
      {"motion", q.motion_descriptor},
      {"posture", q.posture_descriptor},
      {"cardinality", q.cardinality},
  };
  return "```json\n" + obj.dump(2) + "\n```\n";
}

StructuredQuery heuristic_decompose(const std::string& query) {
  StructuredQuery q;
  q.raw_query = query;
  const std::vector<std::string> toks = detail::words(query);
  std::size_t i = 0;
  auto skip_determiners = [&] {
    while (i < toks.size() && kDeterminers.count(toks[i])) ++i;
  };

  skip_determiners();
  if (i < toks.size()) {
    if (const int k = parse_cardinality_word(toks[i]); k >= 1) {
      q.cardinality = k;
      ++i;
      skip_determiners();
    }
  }

  std::vector<std::string> attributes;  // posture descriptor parts, in order
  std::vector<std::string> motion;
  std::vector<std::string> noun;
  for (; i < toks.size(); ++i) {
    if (kAttributeWords.count(toks[i])) {
      attributes.push_back(toks[i]);
      continue;
    }
    if (is_structural(toks, i)) break;
    noun.push_back(toks[i]);
  }
  if (!noun.empty()) {
    q.candidate_entities.push_back(normalize_entity(detail::join(noun, " ")));
  }

  while (i < toks.size()) {
    if (const Preposition* prep = match_preposition(toks, i)) {
      i += prep->words.size();
      if (!prep->relation.empty()) motion.push_back(prep->relation);
      skip_determiners();
      if (i < toks.size() && parse_cardinality_word(toks[i]) >= 1) {
        ++i;
        skip_determiners();
      }
      std::vector<std::string> ctx;
      while (i < toks.size() && !is_structural(toks, i)) ctx.push_back(toks[i++]);
      if (!ctx.empty()) q.context_entities.push_back(normalize_entity(detail::join(ctx, " ")));
      continue;
    }
    const std::string& w = toks[i];
    if (auto it = kPostureWords.find(w); it != kPostureWords.end()) {
      attributes.push_back(it->second);
    } else if (std::string m = canonical_motion(w); !m.empty()) {
      motion.push_back(m);
    } else if (kAttributeWords.count(w)) {
      attributes.push_back(w);
    }
    ++i;
  }

  q.motion_descriptor = detail::join(motion, " ");
  q.posture_descriptor = detail::join(attributes, " ");
  if (q.candidate_entities.empty()) {
    const std::string whole = detail::trim(query);
    q.candidate_entities.push_back(whole.empty() ? std::string("object") : whole);
  }
  return q;
}

DecompositionOutcome decompose_query(const std::string& query,
                                     ChatEndpoint* endpoint, int attempts) {
  DecompositionOutcome out;
  if (endpoint != nullptr) {
    const std::string prompt = build_decomposition_prompt(query);
    for (int a = 0; a < attempts; ++a) {
      ++out.endpoint_attempts;
      try {
        out.query = parse_decomposition_response(endpoint->complete(prompt), query);
        return out;
      } catch (const Error& e) {
        out.errors.emplace_back(e.what());
      }
    }
  }
  out.used_fallback = true;
  out.query = heuristic_decompose(query);
  return out;
}

}  // namespace refvos
