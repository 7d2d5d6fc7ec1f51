#include "cae/graph.h"

#include <algorithm>
#include <sstream>

#include "cae/pipeline.h"
#include "cae/text.h"
#include "json.hpp"

namespace cae {
namespace {

using nlohmann::json;

struct EdgeTypeAlias {
  std::string_view name;
  EdgeType type;
};

constexpr EdgeTypeAlias kEdgeTypeNames[] = {
    {"Sequential", EdgeType::kSequential},
    {"Dependency", EdgeType::kDependency},
    {"ChunkMembership", EdgeType::kChunkMembership},
    {"Coref", EdgeType::kCoref},
    {"seq", EdgeType::kSequential},
    {"dep", EdgeType::kDependency},
    {"chunk", EdgeType::kChunkMembership},
    {"coref", EdgeType::kCoref},
};

std::string NodeKey(const NodeId &id) {
  return std::to_string(id.first) + ":" + std::to_string(id.second);
}

NodeId ParseNodeKey(const std::string &key) {
  std::size_t colon = key.find(':');
  auto sent = ParseIndex(std::string_view(key).substr(0, colon));
  auto tok = colon == std::string::npos
                 ? std::nullopt
                 : ParseIndex(std::string_view(key).substr(colon + 1));
  if (!sent || !tok) throw ParseError(0, "graph: bad node id '" + key + "'");
  return {*sent, *tok};
}

std::string DotQuote(std::string_view text) {
  std::string out = "\"";
  for (char c : text) {
    if (c == '"' || c == '\\') out += '\\';
    out += c;
  }
  return out + "\"";
}

}  // namespace

std::string_view EdgeTypeName(EdgeType type) {
  for (const EdgeTypeAlias &a : kEdgeTypeNames) {
    if (a.type == type) return a.name;
  }
  return "";
}

std::optional<EdgeType> ParseEdgeType(std::string_view name) {
  for (const EdgeTypeAlias &a : kEdgeTypeNames) {
    if (a.name == name) return a.type;
  }
  return std::nullopt;
}

std::set<EdgeType> ParseLayers(std::string_view list) {
  std::set<EdgeType> layers;
  for (const std::string &item : Split(list, ',')) {
    std::string_view name = Trim(item);
    if (name.empty()) continue;
    auto type = ParseEdgeType(name);
    if (!type) throw Error("unknown graph layer '" + std::string(name) + "'");
    layers.insert(*type);
  }
  return layers;
}

std::string GraphNode::Label() const {
  return surface + "-" + std::to_string(id.second);
}

std::size_t TextGraph::CountEdges(EdgeType type) const {
  return static_cast<std::size_t>(std::count_if(
      edges.begin(), edges.end(), [&](const GraphEdge &e) { return e.type == type; }));
}

const GraphNode *TextGraph::FindNode(NodeId id) const {
  auto it = std::lower_bound(nodes.begin(), nodes.end(), id,
                             [](const GraphNode &n, const NodeId &key) { return n.id < key; });
  return it != nodes.end() && it->id == id ? &*it : nullptr;
}

TextGraph BuildGraph(const Document &doc, const AnnotationSet &annotations,
                     const std::set<EdgeType> &layers) {
  std::vector<std::string> problems = CheckAgainstDocument(annotations, doc);
  if (annotations.annotations.empty() && annotations.document_id != doc.id) {
    problems.erase(problems.begin());  // an empty set fits any document
  }
  if (!problems.empty()) throw IntegrityError("graph: " + problems.front());

  TextGraph g;
  g.layers = layers;
  for (const Sentence &s : doc.sentences) {
    for (const Token &t : s.tokens) {
      g.nodes.push_back(GraphNode{{s.index, t.index}, t.surface, {}});
    }
  }
  for (const RoleAnnotation &a : annotations.annotations) {
    for (std::size_t t = a.span.start; t < a.span.end; ++t) {
      // Nodes are in document order, so FindNode's binary search applies.
      auto it = std::lower_bound(
          g.nodes.begin(), g.nodes.end(), NodeId{a.span.sentence, t},
          [](const GraphNode &n, const NodeId &key) { return n.id < key; });
      it->roles.insert(a.role);
    }
  }

  auto has = [&](EdgeType type) { return layers.count(type) > 0; };
  for (const Sentence &s : doc.sentences) {
    const std::size_t si = s.index;
    if (has(EdgeType::kSequential)) {
      for (std::size_t t = 0; t + 1 < s.size(); ++t) {
        g.edges.push_back({EdgeType::kSequential, {si, t}, {si, t + 1}, ""});
      }
    }
    if (has(EdgeType::kDependency)) {
      for (const Token &t : s.tokens) {
        if (t.IsRoot()) continue;
        g.edges.push_back({EdgeType::kDependency, {si, t.head}, {si, t.index}, t.deprel});
      }
    }
    if (has(EdgeType::kChunkMembership)) {
      for (const Span &c : s.chunks) {
        for (std::size_t t = c.start; t + 1 < c.end; ++t) {
          g.edges.push_back({EdgeType::kChunkMembership, {si, t}, {si, t + 1}, ""});
        }
      }
    }
  }
  if (has(EdgeType::kCoref)) {
    for (const CorefChain &chain : doc.chains) {
      for (std::size_t k = 0; k + 1 < chain.mentions.size(); ++k) {
        const Span &a = chain.mentions[k];
        const Span &b = chain.mentions[k + 1];
        NodeId src{a.sentence, SpanHeadToken(doc.sentences[a.sentence], a)};
        NodeId dst{b.sentence, SpanHeadToken(doc.sentences[b.sentence], b)};
        g.edges.push_back({EdgeType::kCoref, src, dst, chain.id});
      }
    }
  }
  std::sort(g.edges.begin(), g.edges.end());
  g.edges.erase(std::unique(g.edges.begin(), g.edges.end()), g.edges.end());
  return g;
}

std::string DotStyle::FillFor(const std::set<RoleLabel> &roles) const {
  if (roles.empty()) return plain_fill;
  for (const auto &[role, color] : role_fills) {
    if (roles.count(role)) return color;
  }
  return other_fill;
}

std::string ToDot(const TextGraph &graph, const DotStyle &style) {
  auto name = [&](const NodeId &id) {
    const GraphNode *node = graph.FindNode(id);
    std::string label = node ? node->Label() : NodeKey(id);
    if (id.first > 0) label = "s" + std::to_string(id.first) + ":" + label;
    return DotQuote(label);
  };
  std::ostringstream out;
  out << "digraph TextGraph {\n";
  for (const GraphNode &n : graph.nodes) {
    std::vector<std::string> roles;
    for (RoleLabel r : n.roles) roles.emplace_back(RoleName(r));
    out << "  " << name(n.id) << " [fillcolor=" << DotQuote(style.FillFor(n.roles))
        << "] [label=" << DotQuote(n.Label()) << ", style=\"filled\"";
    if (!roles.empty()) out << ", tooltip=" << DotQuote(Join(roles, " "));
    out << "];\n";
  }
  for (const GraphEdge &e : graph.edges) {
    auto color = style.edge_colors.find(e.type);
    out << "  " << name(e.src) << " -> " << name(e.dst) << " [color="
        << DotQuote(color == style.edge_colors.end() ? "black" : color->second);
    if (e.type == EdgeType::kDependency) out << ", label=" << DotQuote(e.label);
    if (e.type == EdgeType::kCoref) out << ", style=\"dashed\"";
    out << "];\n";
  }
  out << "}\n";
  return out.str();
}

std::string ToJsonGraph(const TextGraph &graph) {
  json j;
  j["schema"] = kGraphSchema;
  j["layers"] = json::array();
  for (EdgeType t : graph.layers) j["layers"].push_back(EdgeTypeName(t));
  j["nodes"] = json::array();
  for (const GraphNode &n : graph.nodes) {
    json roles = json::array();
    for (RoleLabel r : n.roles) roles.push_back(RoleName(r));
    j["nodes"].push_back(json{{"id", NodeKey(n.id)},
                              {"surface", n.surface},
                              {"sent", n.id.first},
                              {"index", n.id.second},
                              {"label", n.Label()},
                              {"roles", roles}});
  }
  j["edges"] = json::array();
  for (const GraphEdge &e : graph.edges) {
    j["edges"].push_back(json{{"src", NodeKey(e.src)},
                              {"dst", NodeKey(e.dst)},
                              {"type", EdgeTypeName(e.type)},
                              {"label", e.label}});
  }
  return j.dump(2) + "\n";
}

TextGraph FromJsonGraph(std::string_view json_text) {
  TextGraph g;
  try {
    json j = json::parse(json_text);
    if (j.value("schema", std::string()) != kGraphSchema) {
      throw ParseError(0, "graph: unsupported schema");
    }
    for (const json &l : j.at("layers")) {
      auto t = ParseEdgeType(l.get<std::string>());
      if (!t) throw ParseError(0, "graph: unknown layer");
      g.layers.insert(*t);
    }
    for (const json &n : j.at("nodes")) {
      GraphNode node;
      node.id = {n.at("sent").get<std::size_t>(), n.at("index").get<std::size_t>()};
      node.surface = n.at("surface").get<std::string>();
      for (const json &r : n.at("roles")) {
        auto role = ParseRole(r.get<std::string>());
        if (!role) throw ParseError(0, "graph: unknown role");
        node.roles.insert(*role);
      }
      g.nodes.push_back(std::move(node));
    }
    for (const json &e : j.at("edges")) {
      auto t = ParseEdgeType(e.at("type").get<std::string>());
      if (!t) throw ParseError(0, "graph: unknown edge type");
      g.edges.push_back(GraphEdge{*t, ParseNodeKey(e.at("src").get<std::string>()),
                                  ParseNodeKey(e.at("dst").get<std::string>()),
                                  e.at("label").get<std::string>()});
    }
  } catch (const json::exception &e) {
    throw ParseError(0, std::string("graph: ") + e.what());
  }
  return g;
}

}  // namespace cae
