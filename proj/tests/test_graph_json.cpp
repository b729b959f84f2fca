#include <graphi/graph_json.hpp>
#include <graphi/modelzoo.hpp>

#include <catch2/catch_amalgamated.hpp>

#include <string>

#include "test_util.hpp"

using namespace graphi;

namespace {

std::string error_message(const std::function<void()>& f) {
  try {
    f();
  } catch (const Error& e) {
    return e.what();
  }
  return "";
}

}  // namespace

TEST_CASE("serialize then parse is the identity", "[json]") {
  const auto diamond = gen_diamond();
  CHECK(parse_graph(serialize_graph(diamond)) == diamond);

  const auto lstm = gen_lstm(2, 3, 16, 4);
  CHECK(parse_graph(serialize_graph(lstm)) == lstm);

  auto [rand_graph, durations] =
      gen_random_dag(25, 0.2, {10.0, 100.0}, 3);
  CHECK(parse_graph(serialize_graph(rand_graph)) == rand_graph);
}

TEST_CASE("a handwritten document parses to the expected graph", "[json]") {
  const std::string text = R"({
    "ops": [
      {"id": 0, "name": "in", "kind": {"type": "synthetic", "us": 5.0}, "small": true},
      {"id": 1, "name": "mm", "kind": {"type": "matmul", "m": 2, "k": 3, "n": 4}},
      {"id": 2, "kind": {"type": "elementwise", "op": "relu", "len": 8}}
    ],
    "edges": [[0, 1], [1, 2]]
  })";
  const auto graph = parse_graph(text);
  REQUIRE(graph.num_ops() == 3);
  CHECK(graph.op(0).name == "in");
  CHECK(graph.op(0).small);
  CHECK_FALSE(graph.op(1).small);
  CHECK(graph.op(2).name == "op2");
  const auto& mm = std::get<MatMulOp>(graph.op(1).kind);
  CHECK(mm.m == 2);
  CHECK(mm.k == 3);
  CHECK(mm.n == 4);
  const auto& ew = std::get<ElementwiseOp>(graph.op(2).kind);
  CHECK(ew.op == EwKind::Relu);
  CHECK(ew.len == 8);
}

TEST_CASE("schema violations report the offending path", "[json]") {
  auto code_and_message = [](const std::string& text) {
    return error_message([&] { parse_graph(text); });
  };

  SECTION("not JSON at all") {
    CHECK(testutil::code_of([] { parse_graph("nonsense{"); }) ==
          ErrorCode::SchemaError);
  }
  SECTION("missing ops") {
    CHECK(code_and_message(R"({"edges": []})").find("$.ops") !=
          std::string::npos);
  }
  SECTION("unknown top-level key") {
    CHECK(code_and_message(R"({"ops": [], "edges": [], "extra": 1})")
              .find("extra") != std::string::npos);
  }
  SECTION("unknown op field") {
    const auto msg = code_and_message(
        R"({"ops": [{"id": 0, "kind": {"type": "synthetic", "us": 1.0},
            "color": "red"}], "edges": []})");
    CHECK(msg.find("ops[0].color") != std::string::npos);
  }
  SECTION("bad kind type") {
    const auto msg = code_and_message(
        R"({"ops": [{"id": 0, "kind": {"type": "conv"}}], "edges": []})");
    CHECK(msg.find("ops[0].kind.type") != std::string::npos);
  }
  SECTION("negative matmul dim") {
    CHECK(testutil::code_of([&] {
            parse_graph(
                R"({"ops": [{"id": 0,
                  "kind": {"type": "matmul", "m": -1, "k": 2, "n": 2}}],
                  "edges": []})");
          }) == ErrorCode::SchemaError);
  }
  SECTION("edge that is not a pair") {
    const auto msg = code_and_message(
        R"({"ops": [{"id": 0, "kind": {"type": "synthetic", "us": 1.0}}],
            "edges": [[0]]})");
    CHECK(msg.find("edges[0]") != std::string::npos);
  }
  SECTION("non-integer id") {
    CHECK(testutil::code_of([&] {
            parse_graph(
                R"({"ops": [{"id": 1.5,
                  "kind": {"type": "synthetic", "us": 1.0}}], "edges": []})");
          }) == ErrorCode::SchemaError);
  }
}

TEST_CASE("graph-level validation still applies to parsed documents", "[json]") {
  SECTION("duplicate ids") {
    CHECK(testutil::code_of([] {
            parse_graph(
                R"({"ops": [
                  {"id": 0, "kind": {"type": "synthetic", "us": 1.0}},
                  {"id": 0, "kind": {"type": "synthetic", "us": 1.0}}],
                  "edges": []})");
          }) == ErrorCode::DuplicateId);
  }
  SECTION("dangling edge") {
    CHECK(testutil::code_of([] {
            parse_graph(
                R"({"ops": [{"id": 0, "kind": {"type": "synthetic", "us": 1.0}}],
                    "edges": [[0, 9]]})");
          }) == ErrorCode::DanglingEdge);
  }
  SECTION("cycle") {
    CHECK(testutil::code_of([] {
            parse_graph(
                R"({"ops": [
                  {"id": 0, "kind": {"type": "synthetic", "us": 1.0}},
                  {"id": 1, "kind": {"type": "synthetic", "us": 1.0}}],
                  "edges": [[0, 1], [1, 0]]})");
          }) == ErrorCode::CycleDetected);
  }
}

TEST_CASE("serialized documents use the canonical key order", "[json]") {
  const auto doc = graph_to_json(gen_diamond());
  REQUIRE(doc.is_object());
  auto it = doc.begin();
  CHECK(it.key() == "ops");
  ++it;
  CHECK(it.key() == "edges");
  const auto& op0 = doc["ops"][0];
  auto kit = op0.begin();
  CHECK(kit.key() == "id");
  ++kit;
  CHECK(kit.key() == "name");
  ++kit;
  CHECK(kit.key() == "kind");
  ++kit;
  CHECK(kit.key() == "small");
}
