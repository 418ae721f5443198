// Copyright 2026 The tweakscale Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "tweakscale/target_io.hpp"

#include <fstream>
#include <sstream>

#include "json.hpp"
#include "tweakscale/error.hpp"

namespace tweakscale {
namespace {

using nlohmann::ordered_json;
using json = nlohmann::json;

[[noreturn]] void fail(const std::string& message) { throw Error(ErrorCode::kConfigError, message); }

json parse(std::string_view text, const char* what) {
  try {
    return json::parse(text);
  } catch (const json::parse_error& e) {
    fail(std::string(what) + " is not valid JSON: " + e.what());
  }
}

template <typename T>
T field(const json& node, const char* key, const std::string& where) {
  if (!node.is_object() || !node.contains(key)) fail(where + ": missing field '" + key + "'");
  try {
    return node.at(key).get<T>();
  } catch (const json::exception&) {
    fail(where + ": field '" + key + "' has the wrong type");
  }
}

LinearJoinMatrix parseLinear(const DatasetSchema& schema, const json& node) {
  auto tables = field<std::vector<std::string>>(node, "chain", "linear target");
  for (const auto& t : tables) {
    if (!schema.find(t)) throw Error(ErrorCode::kSpecMismatch, "linear target names unknown table " + t);
  }
  LinearJoinMatrix m = emptyMatrix(resolveChain(schema, std::move(tables)));
  auto rows = field<std::vector<std::vector<std::int64_t>>>(node, "h", "linear target");
  if (rows.size() != m.h.size()) {
    throw Error(ErrorCode::kShapeMismatch, "linear target has " + std::to_string(rows.size()) + " rows, chain needs " +
                                               std::to_string(m.h.size()));
  }
  for (std::size_t j = 0; j < rows.size(); ++j) {
    if (rows[j].size() != j && rows[j].size() != j + 1) {
      throw Error(ErrorCode::kShapeMismatch, "linear target row " + std::to_string(j) + " has the wrong length");
    }
    for (std::size_t i = 0; i < j; ++i) m.h[j][i] = rows[j][i];
  }
  return m;
}

CoappearDistribution parseCoappear(const DatasetSchema& schema, const json& node) {
  const json group = field<json>(node, "group", "coappear target");
  auto referencing = field<std::vector<std::string>>(group, "referencing", "coappear group");
  auto referenced = field<std::vector<std::string>>(group, "referenced", "coappear group");
  std::sort(referencing.begin(), referencing.end());
  std::sort(referenced.begin(), referenced.end());
  CoappearDistribution out;
  bool found = false;
  for (const auto& g : detectCoappearGroups(schema)) {
    if (g.referenced == referenced && g.referencing == referencing) {
      out.group = g;
      found = true;
    }
  }
  if (!found) throw Error(ErrorCode::kSpecMismatch, "coappear target names a group the schema does not have");
  for (const auto& e : field<json>(node, "entries", "coappear target")) {
    auto v = field<CoappearVector>(e, "v", "coappear entry");
    const auto n = field<std::int64_t>(e, "count", "coappear entry");
    if (std::all_of(v.begin(), v.end(), [](std::int64_t x) { return x == 0; })) {
      out.zeroMass = n;
    } else {
      out.counts[v] += n;
    }
  }
  return out;
}

PairwiseBinding parseBinding(const json& node) {
  PairwiseBinding b;
  b.userTable = field<std::string>(node, "userTable", "pairwise binding");
  b.postTable = field<std::string>(node, "postTable", "pairwise binding");
  b.responseTable = field<std::string>(node, "responseTable", "pairwise binding");
  b.postOwnerColumn = field<std::string>(node, "postOwnerColumn", "pairwise binding");
  b.responsePostColumn = field<std::string>(node, "responsePostColumn", "pairwise binding");
  b.responseUserColumn = field<std::string>(node, "responseUserColumn", "pairwise binding");
  return b;
}

PairwiseDistribution parsePairwise(const DatasetSchema& schema, const json& node) {
  PairwiseDistribution out;
  out.binding = parseBinding(field<json>(node, "binding", "pairwise target"));
  if (std::find(schema.pairwiseBindings.begin(), schema.pairwiseBindings.end(), out.binding) ==
      schema.pairwiseBindings.end()) {
    throw Error(ErrorCode::kSpecMismatch, "pairwise target names a binding the schema does not declare");
  }
  if (node.contains("rhoN")) {
    for (const auto& e : node.at("rhoN")) {
      const CountPair k{field<std::int64_t>(e, "x", "rhoN entry"), field<std::int64_t>(e, "y", "rhoN entry")};
      const auto n = field<std::int64_t>(e, "count", "rhoN entry");
      if (k == CountPair{0, 0}) {
        out.rhoN00 = n;
      } else {
        out.rhoN[k] += n;
      }
    }
  }
  if (node.contains("rhoS")) {
    for (const auto& e : node.at("rhoS")) {
      const auto x = field<std::int64_t>(e, "x", "rhoS entry");
      const auto n = field<std::int64_t>(e, "count", "rhoS entry");
      if (x == 0) {
        out.rhoS0 = n;
      } else {
        out.rhoS[x] += n;
      }
    }
  }
  return out;
}

ordered_json linearJson(const LinearJoinMatrix& m) {
  ordered_json rows = ordered_json::array();
  for (std::size_t j = 0; j < m.h.size(); ++j) {
    rows.push_back(std::vector<std::int64_t>(m.h[j].begin(), m.h[j].begin() + static_cast<std::ptrdiff_t>(j)));
  }
  ordered_json out;
  out["chain"] = m.chain.tables;
  out["h"] = rows;
  return out;
}

ordered_json coappearJson(const CoappearDistribution& c) {
  ordered_json out;
  out["group"] = {{"referencing", c.group.referencing}, {"referenced", c.group.referenced}};
  ordered_json entries = ordered_json::array();
  if (c.zeroMass) {
    entries.push_back({{"v", CoappearVector(c.group.referencing.size(), 0)}, {"count", *c.zeroMass}});
  }
  for (const auto& [v, n] : c.counts) entries.push_back({{"v", v}, {"count", n}});
  out["entries"] = entries;
  return out;
}

ordered_json bindingJson(const PairwiseBinding& b) {
  return {{"userTable", b.userTable},
          {"postTable", b.postTable},
          {"responseTable", b.responseTable},
          {"postOwnerColumn", b.postOwnerColumn},
          {"responsePostColumn", b.responsePostColumn},
          {"responseUserColumn", b.responseUserColumn}};
}

ordered_json pairwiseJson(const PairwiseDistribution& p) {
  ordered_json out;
  out["binding"] = bindingJson(p.binding);
  ordered_json n = ordered_json::array();
  if (p.rhoN00) n.push_back({{"x", 0}, {"y", 0}, {"count", *p.rhoN00}});
  for (const auto& [k, c] : p.rhoN) n.push_back({{"x", k.first}, {"y", k.second}, {"count", c}});
  ordered_json s = ordered_json::array();
  if (p.rhoS0) s.push_back({{"x", 0}, {"count", *p.rhoS0}});
  for (const auto& [x, c] : p.rhoS) s.push_back({{"x", x}, {"count", c}});
  out["rhoN"] = n;
  out["rhoS"] = s;
  return out;
}

}  // namespace

std::string readFile(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::kIoFailure, "cannot open " + path.string());
  std::stringstream buffer;
  buffer << in.rdbuf();
  return buffer.str();
}

void writeFile(const std::filesystem::path& path, std::string_view text) {
  std::error_code ec;
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path(), ec);
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error(ErrorCode::kIoFailure, "cannot write " + path.string());
  out << text;
  if (!out) throw Error(ErrorCode::kIoFailure, "write to " + path.string() + " failed");
}

SizeTarget parseSizeTarget(std::string_view json_text) {
  const json root = parse(json_text, "size target");
  if (!root.is_object()) fail("size target must be an object");
  SizeTarget out;
  for (const auto& [name, value] : root.items()) {
    if (!value.is_number_integer() || value.get<std::int64_t>() < 0) {
      fail("size of " + name + " must be a non-negative integer");
    }
    out[name] = value.get<std::size_t>();
  }
  return out;
}

SizeTarget loadSizeTarget(const std::filesystem::path& path) { return parseSizeTarget(readFile(path)); }

std::string sizeTargetToJson(const SizeTarget& sizes) {
  ordered_json out = ordered_json::object();
  for (const auto& [name, n] : sizes) out[name] = n;
  return out.dump(2);
}

FeatureTargets parseTargets(const DatasetSchema& schema, std::string_view json_text) {
  const json root = parse(json_text, "targets");
  FeatureTargets out;
  auto one = [&](const json& node) {
    if (node.contains("chain")) {
      out.linear.push_back(parseLinear(schema, node));
    } else if (node.contains("group")) {
      out.coappear.push_back(parseCoappear(schema, node));
    } else if (node.contains("binding")) {
      out.pairwise.push_back(parsePairwise(schema, node));
    } else {
      fail("target object has none of 'chain', 'group', 'binding'");
    }
  };
  if (root.is_array()) {
    for (const auto& node : root) one(node);
    return out;
  }
  if (!root.is_object()) fail("targets must be an object or an array");
  if (root.contains("chain") || root.contains("group") || root.contains("binding")) {
    one(root);
    return out;
  }
  for (const auto& [key, list] : root.items()) {
    if (key != "linear" && key != "coappear" && key != "pairwise") fail("unknown targets key '" + key + "'");
    for (const auto& node : list) one(node);
  }
  return out;
}

FeatureTargets loadTargets(const DatasetSchema& schema, const std::filesystem::path& path) {
  return parseTargets(schema, readFile(path));
}

std::string targetsToJson(const FeatureTargets& targets) {
  ordered_json out;
  out["linear"] = ordered_json::array();
  out["coappear"] = ordered_json::array();
  out["pairwise"] = ordered_json::array();
  for (const auto& m : targets.linear) out["linear"].push_back(linearJson(m));
  for (const auto& c : targets.coappear) out["coappear"].push_back(coappearJson(c));
  for (const auto& p : targets.pairwise) out["pairwise"].push_back(pairwiseJson(p));
  return out.dump(2);
}

std::string linearTargetToJson(const LinearJoinMatrix& m) { return linearJson(m).dump(2); }
std::string coappearTargetToJson(const CoappearDistribution& c) { return coappearJson(c).dump(2); }
std::string pairwiseTargetToJson(const PairwiseDistribution& p) { return pairwiseJson(p).dump(2); }

std::vector<QuerySpec> parseQueries(const DatasetSchema& schema, std::string_view json_text) {
  const json root = parse(json_text, "query specs");
  if (!root.is_array()) fail("query specs must be a JSON array");
  std::vector<QuerySpec> out;
  for (const auto& node : root) {
    QuerySpec q;
    q.name = field<std::string>(node, "name", "query");
    q.kind = parseQueryKind(field<std::string>(node, "kind", "query " + q.name));
    const std::string where = "query " + q.name;
    switch (q.kind) {
      case QueryKind::kChainRootCount:
        q.chain = field<std::vector<std::string>>(node, "chain", where);
        break;
      case QueryKind::kReferencerThresholdCount:
        q.threshold = field<std::int64_t>(node, "threshold", where);
        [[fallthrough]];
      case QueryKind::kAverageReferencers:
        q.referencing = field<std::string>(node, "referencing", where);
        q.referenced = field<std::string>(node, "referenced", where);
        break;
      case QueryKind::kInteractingUserPairs:
        if (node.contains("binding")) q.binding = field<std::size_t>(node, "binding", where);
        break;
    }
    validateQuery(schema, q);
    out.push_back(std::move(q));
  }
  return out;
}

std::vector<QuerySpec> loadQueries(const DatasetSchema& schema, const std::filesystem::path& path) {
  return parseQueries(schema, readFile(path));
}

}  // namespace tweakscale
