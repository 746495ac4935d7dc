#pragma once

#include <optional>
#include <string>

#include "gssl/graph.hpp"

namespace gssl {

// A loaded dataset bundle: either one attributed graph (node tasks) or a set
// of labeled graphs (graph tasks).
struct Dataset {
  enum class Kind { node, graphset };
  Kind kind = Kind::node;
  Graph graph;    // kind == node
  GraphSet set;   // kind == graphset
  int n_classes = 0;
  std::optional<Split> split;  // from split.json when present
  std::string name;

  bool is_node() const { return kind == Kind::node; }
};

// Bundle directory layout (text, UTF-8, LF):
//   meta.json     {"kind":"node"|"graphset","n_nodes":int|null,
//                  "n_features":int,"n_classes":int,"name":str}
//   edges.tsv     "u\tv" per line; graphset lines are "g\tu\tv"
//   features.csv  one row per node; graphset rows prefixed by graph id;
//                 omitted when n_features == 0
//   labels.csv    "node_id,label" or "graph_id,label"
//   split.json    optional {"train":[...],"val":[...],"test":[...]}
Dataset load_bundle(const std::string& dir);

// Writes a bundle such that load_bundle(save_bundle(ds)) == ds field for
// field (floats are printed with enough digits to round-trip exactly).
void save_bundle(const Dataset& ds, const std::string& dir);

Dataset make_node_dataset(Graph g, int n_classes, std::optional<Split> split = {});
Dataset make_graphset_dataset(GraphSet gs);

}  // namespace gssl
