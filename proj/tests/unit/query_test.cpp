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

#include <gtest/gtest.h>

#include <nlohmann/json.hpp>

#include "refvos/chat_client.hpp"
#include "refvos/error.hpp"
#include "refvos/query.hpp"

namespace refvos {
namespace {

TEST(DecompositionPrompt, ContainsQueryAndFieldNames) {
  const std::string p = build_decomposition_prompt("the cat by the green plate");
  EXPECT_NE(p.find("the cat by the green plate"), std::string::npos);
  for (const char* field :
       {"candidate_entities", "context_entities", "motion", "posture", "cardinality"})
    EXPECT_NE(p.find(field), std::string::npos) << field;
}

TEST(DecompositionPrompt, QuotesAreEscapedAndLongQueriesKept) {
  const std::string q = "the \"striped\" cat";
  const std::string p = build_decomposition_prompt(q);
  EXPECT_NE(p.find(nlohmann::json(q).dump()), std::string::npos);
  const std::string long_q(500, 'a');
  EXPECT_NE(build_decomposition_prompt(long_q).find(long_q), std::string::npos);
  EXPECT_THROW(build_decomposition_prompt("   "), InputError);
}

TEST(DecompositionResponse, WellFormedObject) {
  const StructuredQuery q = parse_decomposition_response(
      "Sure.\n```json\n{\"candidate_entities\": [\"cat\"], \"context_entities\": "
      "[\"green plate\"], \"motion\": \"motionless\", \"posture\": \"standing\", "
      "\"cardinality\": 1}\n```",
      "raw");
  EXPECT_EQ(q.candidate_entities, std::vector<std::string>{"cat"});
  EXPECT_EQ(q.context_entities, std::vector<std::string>{"green plate"});
  EXPECT_EQ(q.motion_descriptor, "motionless");
  EXPECT_EQ(q.posture_descriptor, "standing");
  EXPECT_EQ(q.cardinality, 1);
  EXPECT_EQ(q.raw_query, "raw");
}

TEST(DecompositionResponse, MissingPostureAndWordCardinality) {
  const StructuredQuery q = parse_decomposition_response(
      "{\"candidate_entities\": [\"dogs\"], \"motion\": \"running\", \"cardinality\": "
      "\"two\"}");
  EXPECT_EQ(q.posture_descriptor, "");
  EXPECT_EQ(q.cardinality, 2);
}

TEST(DecompositionResponse, UnparseableThrows) {
  EXPECT_THROW(parse_decomposition_response("no object here"), ParseError);
  EXPECT_THROW(parse_decomposition_response("{\"motion\": \"x\"}"), ParseError);
  EXPECT_THROW(parse_decomposition_response("{\"candidate_entities\": [\"a\"]"), ParseError);
}

TEST(CardinalityWords, OneThroughTen) {
  EXPECT_EQ(parse_cardinality_word("one"), 1);
  EXPECT_EQ(parse_cardinality_word("Three"), 3);
  EXPECT_EQ(parse_cardinality_word("ten"), 10);
  EXPECT_EQ(parse_cardinality_word("4"), 4);
  EXPECT_EQ(parse_cardinality_word("many"), 0);
}

TEST(HeuristicDecompose, MotionlessCatByPlate) {
  const StructuredQuery q = heuristic_decompose("the cat stood motionlessly by the green plate");
  EXPECT_EQ(q.candidate_entities, std::vector<std::string>{"cat"});
  EXPECT_EQ(q.context_entities, std::vector<std::string>{"green plate"});
  EXPECT_EQ(q.motion_descriptor, "motionless");
  EXPECT_EQ(q.posture_descriptor, "standing");
  EXPECT_EQ(q.cardinality, 1);
}

TEST(HeuristicDecompose, NumberWordAndDirection) {
  const StructuredQuery q = heuristic_decompose("two dogs running left");
  EXPECT_EQ(q.cardinality, 2);
  EXPECT_EQ(q.motion_descriptor, "running left");
  EXPECT_EQ(q.candidate_entities, std::vector<std::string>{"dog"});
}

TEST(HeuristicDecompose, BareNoun) {
  const StructuredQuery q = heuristic_decompose("the ball");
  EXPECT_EQ(q.candidate_entities, std::vector<std::string>{"ball"});
  EXPECT_TRUE(q.context_entities.empty());
  EXPECT_EQ(q.motion_descriptor, "");
  EXPECT_EQ(q.posture_descriptor, "");
  EXPECT_EQ(q.cardinality, 1);
  EXPECT_EQ(heuristic_decompose("the ball"), q);
}

TEST(NormalizeEntity, LowercasesAndSingularizesHead) {
  EXPECT_EQ(normalize_entity("Dogs"), "dog");
  EXPECT_EQ(normalize_entity("green Boxes"), "green box");
  EXPECT_EQ(normalize_entity("butterflies"), "butterfly");
  EXPECT_EQ(normalize_entity("grass"), "grass");
}

TEST(DecomposeQuery, RetriesThenFallsBack) {
  int calls = 0;
  FunctionChatEndpoint bad([&](const std::string&) {
    ++calls;
    return std::string("I cannot help");
  });
  const DecompositionOutcome out = decompose_query("the cat moving left", &bad, 3);
  EXPECT_EQ(calls, 3);
  EXPECT_TRUE(out.used_fallback);
  EXPECT_EQ(out.errors.size(), 3u);
  EXPECT_EQ(out.query, heuristic_decompose("the cat moving left"));
}

TEST(DecomposeQuery, UsesEndpointAnswerWhenValid) {
  int calls = 0;
  FunctionChatEndpoint flaky([&](const std::string&) -> std::string {
    if (++calls == 1) throw BackendError("timeout");
    return "{\"candidate_entities\": [\"horse\"], \"motion\": \"walking\"}";
  });
  const DecompositionOutcome out = decompose_query("a horse walking", &flaky, 3);
  EXPECT_FALSE(out.used_fallback);
  EXPECT_EQ(out.endpoint_attempts, 2);
  EXPECT_EQ(out.query.candidate_entities, std::vector<std::string>{"horse"});
  EXPECT_EQ(out.query.raw_query, "a horse walking");
}

}  // namespace
}  // namespace refvos
