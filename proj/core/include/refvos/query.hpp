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

#include <string>
#include <vector>

#include "refvos/chat_client.hpp"

namespace refvos {

// The five-part command parsed from a referring expression.
struct StructuredQuery {
  std::vector<std::string> candidate_entities;
  std::vector<std::string> context_entities;
  std::string motion_descriptor;
  std::string posture_descriptor;
  int cardinality = 1;
  std::string raw_query;

  friend bool operator==(const StructuredQuery&, const StructuredQuery&) = default;
};

std::string build_decomposition_prompt(const std::string& query);

// Parses the first balanced JSON object in `text`. Missing motion/posture map
// to empty strings, missing or invalid cardinality to 1. Throws ParseError when
// no object is found or candidate_entities is missing or empty.
StructuredQuery parse_decomposition_response(const std::string& text,
                                             const std::string& raw_query = {});

// Inverse of parse_decomposition_response: the JSON object the model is
// asked to emit.
std::string render_structured_query(const StructuredQuery& q);

// Rule-based offline decomposition. Always succeeds.
StructuredQuery heuristic_decompose(const std::string& query);

// Number words one..ten and decimal numerals; 0 when unrecognised.
int parse_cardinality_word(const std::string& word);

// Lower-cases and strips simple English plural endings ("dogs" -> "dog").
std::string normalize_entity(const std::string& phrase);

struct DecompositionOutcome {
  StructuredQuery query;
  int endpoint_attempts = 0;
  bool used_fallback = false;
  std::vector<std::string> errors;
};

// Endpoint path with `attempts` tries, then heuristic_decompose. A null
// endpoint goes straight to the heuristic.
DecompositionOutcome decompose_query(const std::string& query,
                                     ChatEndpoint* endpoint, int attempts);

}  // namespace refvos
