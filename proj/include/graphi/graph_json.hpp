#pragma once

#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include <json.hpp>

#include "graphi/error.hpp"
#include "graphi/graph.hpp"

namespace graphi {

// Graph documents use a fixed key order so serialization is canonical:
//   {"ops": [{"id", "name", "kind", "small"}, ...], "edges": [[src, dst], ...]}
// Kind objects: {"type": "matmul", "m", "k", "n"} |
//               {"type": "elementwise", "op", "len"} |
//               {"type": "synthetic", "us"}
// Unknown fields are rejected with the path to the offending field.

using json = nlohmann::ordered_json;

namespace detail {

[[noreturn]] inline void schema_error(const std::string& path, const std::string& what) {
  raise(ErrorCode::SchemaError, path + ": " + what);
}

inline void check_keys(const json& obj, const std::string& path,
                       std::initializer_list<const char*> allowed) {
  for (auto it = obj.begin(); it != obj.end(); ++it) {
    bool known = false;
    for (const char* k : allowed)
      if (it.key() == k) { known = true; break; }
    if (!known) schema_error(path + "." + it.key(), "unknown field");
  }
}

inline std::int64_t require_int(const json& obj, const std::string& path, const char* key) {
  auto it = obj.find(key);
  if (it == obj.end()) schema_error(path + "." + key, "missing field");
  if (!it->is_number_integer()) schema_error(path + "." + key, "expected an integer");
  return it->get<std::int64_t>();
}

inline double require_number(const json& obj, const std::string& path, const char* key) {
  auto it = obj.find(key);
  if (it == obj.end()) schema_error(path + "." + key, "missing field");
  if (!it->is_number()) schema_error(path + "." + key, "expected a number");
  return it->get<double>();
}

inline std::string require_string(const json& obj, const std::string& path, const char* key) {
  auto it = obj.find(key);
  if (it == obj.end()) schema_error(path + "." + key, "missing field");
  if (!it->is_string()) schema_error(path + "." + key, "expected a string");
  return it->get<std::string>();
}

inline OpKindSpec parse_kind(const json& kind, const std::string& path) {
  if (!kind.is_object()) schema_error(path, "expected an object");
  std::string type = require_string(kind, path, "type");
  if (type == "matmul") {
    check_keys(kind, path, {"type", "m", "k", "n"});
    MatMulOp mm;
    mm.m = require_int(kind, path, "m");
    mm.k = require_int(kind, path, "k");
    mm.n = require_int(kind, path, "n");
    if (mm.m <= 0 || mm.k <= 0 || mm.n <= 0)
      schema_error(path, "matmul dims must be strictly positive");
    return mm;
  }
  if (type == "elementwise") {
    check_keys(kind, path, {"type", "op", "len"});
    ElementwiseOp ew;
    std::string op = require_string(kind, path, "op");
    auto parsed = parse_ew_kind(op);
    if (!parsed) schema_error(path + ".op", "unknown elementwise op '" + op + "'");
    ew.op = *parsed;
    ew.len = require_int(kind, path, "len");
    if (ew.len <= 0) schema_error(path + ".len", "length must be strictly positive");
    return ew;
  }
  if (type == "synthetic") {
    check_keys(kind, path, {"type", "us"});
    SyntheticOp sy;
    sy.us = require_number(kind, path, "us");
    if (sy.us < 0.0) schema_error(path + ".us", "duration must be >= 0");
    return sy;
  }
  schema_error(path + ".type", "unknown kind '" + type + "'");
}

}  // namespace detail

inline json kind_to_json(const OpKindSpec& kind) {
  json j;
  if (const auto* mm = std::get_if<MatMulOp>(&kind)) {
    j["type"] = "matmul";
    j["m"] = mm->m;
    j["k"] = mm->k;
    j["n"] = mm->n;
  } else if (const auto* ew = std::get_if<ElementwiseOp>(&kind)) {
    j["type"] = "elementwise";
    j["op"] = to_string(ew->op);
    j["len"] = ew->len;
  } else {
    j["type"] = "synthetic";
    j["us"] = std::get<SyntheticOp>(kind).us;
  }
  return j;
}

inline json graph_to_json(const ComputationGraph& graph) {
  json doc;
  doc["ops"] = json::array();
  for (const auto& op : graph.ops()) {
    json jop;
    jop["id"] = op.id;
    jop["name"] = op.name;
    jop["kind"] = kind_to_json(op.kind);
    jop["small"] = op.small;
    doc["ops"].push_back(std::move(jop));
  }
  doc["edges"] = json::array();
  for (const auto& [src, dst] : graph.edges()) doc["edges"].push_back(json::array({src, dst}));
  return doc;
}

inline std::string serialize_graph(const ComputationGraph& graph, int indent = 2) {
  return graph_to_json(graph).dump(indent);
}

inline ComputationGraph graph_from_json(const json& doc) {
  if (!doc.is_object()) detail::schema_error("$", "expected a top-level object");
  detail::check_keys(doc, "$", {"ops", "edges"});

  auto ops_it = doc.find("ops");
  if (ops_it == doc.end() || !ops_it->is_array())
    detail::schema_error("$.ops", "expected an array");

  std::vector<OperationSpec> ops;
  ops.reserve(ops_it->size());
  std::size_t i = 0;
  for (const auto& jop : *ops_it) {
    std::string path = "ops[" + std::to_string(i) + "]";
    if (!jop.is_object()) detail::schema_error(path, "expected an object");
    detail::check_keys(jop, path, {"id", "name", "kind", "small"});

    OperationSpec op;
    op.id = detail::require_int(jop, path, "id");
    if (op.id < 0) detail::schema_error(path + ".id", "id must be non-negative");
    op.name = jop.contains("name") ? detail::require_string(jop, path, "name")
                                   : "op" + std::to_string(op.id);
    auto kind_it = jop.find("kind");
    if (kind_it == jop.end()) detail::schema_error(path + ".kind", "missing field");
    op.kind = detail::parse_kind(*kind_it, path + ".kind");
    if (auto small_it = jop.find("small"); small_it != jop.end()) {
      if (!small_it->is_boolean()) detail::schema_error(path + ".small", "expected a bool");
      op.small = small_it->get<bool>();
    }
    ops.push_back(std::move(op));
    ++i;
  }

  auto edges_it = doc.find("edges");
  if (edges_it == doc.end() || !edges_it->is_array())
    detail::schema_error("$.edges", "expected an array");

  std::vector<std::pair<std::int64_t, std::int64_t>> edges;
  edges.reserve(edges_it->size());
  i = 0;
  for (const auto& je : *edges_it) {
    std::string path = "edges[" + std::to_string(i) + "]";
    if (!je.is_array() || je.size() != 2 || !je[0].is_number_integer() ||
        !je[1].is_number_integer())
      detail::schema_error(path, "expected [src, dst] integer pair");
    edges.emplace_back(je[0].get<std::int64_t>(), je[1].get<std::int64_t>());
    ++i;
  }

  return build_graph(std::move(ops), std::move(edges));
}

inline ComputationGraph parse_graph(const std::string& text) {
  json doc;
  try {
    doc = json::parse(text);
  } catch (const nlohmann::json::exception& e) {
    raise(ErrorCode::SchemaError, std::string("invalid JSON: ") + e.what());
  }
  return graph_from_json(doc);
}

}  // namespace graphi
