// Multi-layer token graph: one node per token, typed edges for word order,
// dependencies, noun-chunk membership and coreference; nodes carry the roles
// that cover them. Exports to DOT and to a JSON document.

#ifndef CAE_GRAPH_H_
#define CAE_GRAPH_H_

#include <map>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "cae/model.h"

namespace cae {

inline constexpr std::string_view kGraphSchema = "cae-graph/1";

enum class EdgeType { kSequential, kDependency, kChunkMembership, kCoref };

std::string_view EdgeTypeName(EdgeType type);
std::optional<EdgeType> ParseEdgeType(std::string_view name);
// Parses "seq,dep,chunk,coref" (long names accepted too). Throws Error on an
// unknown layer.
std::set<EdgeType> ParseLayers(std::string_view list);

using NodeId = std::pair<std::size_t, std::size_t>;  // (sentence, token)

struct GraphNode {
  NodeId id;
  std::string surface;
  std::set<RoleLabel> roles;

  // "surface-index", e.g. "Mes-0".
  std::string Label() const;
  bool operator==(const GraphNode &) const = default;
};

struct GraphEdge {
  EdgeType type;
  NodeId src;
  NodeId dst;
  std::string label;  // deprel for dependency edges

  auto operator<=>(const GraphEdge &) const = default;
};

struct TextGraph {
  std::set<EdgeType> layers;
  std::vector<GraphNode> nodes;  // document order
  std::vector<GraphEdge> edges;  // sorted

  std::size_t CountEdges(EdgeType type) const;
  const GraphNode *FindNode(NodeId id) const;
  bool operator==(const TextGraph &) const = default;
};

// Throws IntegrityError when an annotation does not fit the document.
TextGraph BuildGraph(const Document &doc, const AnnotationSet &annotations,
                     const std::set<EdgeType> &layers);

struct DotStyle {
  std::map<EdgeType, std::string> edge_colors = {
      {EdgeType::kSequential, "pink"},
      {EdgeType::kDependency, "gray"},
      {EdgeType::kChunkMembership, "green"},
      {EdgeType::kCoref, "blue"},
  };
  // Fill colors, highest priority first; roles not listed use other_fill.
  std::vector<std::pair<RoleLabel, std::string>> role_fills = {
      {RoleLabel::kExperiencer, "red"}, {RoleLabel::kTerritory, "purple"},
      {RoleLabel::kAttacker, "brown"},  {RoleLabel::kAttack, "yellow"},
      {RoleLabel::kCue, "orange"},
  };
  std::string other_fill = "gray";
  std::string plain_fill = "white";

  std::string FillFor(const std::set<RoleLabel> &roles) const;
};

// Deterministic DOT digraph. Nodes of sentence 0 are named by their label
// ("Mes-0"); later sentences are prefixed with "s<i>:".
std::string ToDot(const TextGraph &graph, const DotStyle &style = {});

std::string ToJsonGraph(const TextGraph &graph);
// Inverse of ToJsonGraph. Throws ParseError on malformed input.
TextGraph FromJsonGraph(std::string_view json_text);

}  // namespace cae

#endif  // CAE_GRAPH_H_
