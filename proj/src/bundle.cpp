#include "gssl/bundle.hpp"

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <map>
#include <sstream>

#include <json.hpp>

#include "gssl/errors.hpp"

namespace fs = std::filesystem;
using nlohmann::json;

namespace gssl {

namespace {

std::vector<std::string> read_lines(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw DataError("missing file: " + path);
  std::vector<std::string> lines;
  std::string line;
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    lines.push_back(line);
  }
  return lines;
}

long parse_int(const std::string& tok, const std::string& file, long lineno) {
  try {
    size_t pos = 0;
    const long v = std::stol(tok, &pos);
    if (pos != tok.size()) throw std::invalid_argument("trailing");
    return v;
  } catch (const std::exception&) {
    throw ParseError(file, lineno, "expected integer, got '" + tok + "'");
  }
}

float parse_float(const std::string& tok, const std::string& file, long lineno) {
  try {
    size_t pos = 0;
    const float v = std::stof(tok, &pos);
    if (pos != tok.size()) throw std::invalid_argument("trailing");
    return v;
  } catch (const std::exception&) {
    throw ParseError(file, lineno, "expected float, got '" + tok + "'");
  }
}

std::vector<std::string> split_on(const std::string& s, char sep) {
  std::vector<std::string> out;
  std::string cur;
  for (char c : s) {
    if (c == sep) {
      out.push_back(cur);
      cur.clear();
    } else {
      cur += c;
    }
  }
  out.push_back(cur);
  return out;
}

json load_json_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw DataError("missing file: " + path);
  try {
    return json::parse(in);
  } catch (const json::exception& e) {
    throw ParseError(path, -1, e.what());
  }
}

std::string fmt_float(float v) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.9g", static_cast<double>(v));
  return buf;
}

Split parse_split_json(const std::string& path) {
  const json j = load_json_file(path);
  Split s;
  auto read_part = [&](const char* key, std::vector<int>& out) {
    if (!j.contains(key) || !j[key].is_array())
      throw ParseError(path, -1, std::string("missing or non-array '") + key + "'");
    for (const auto& v : j[key]) out.push_back(v.get<int>());
  };
  read_part("train", s.train);
  read_part("val", s.val);
  read_part("test", s.test);
  return s;
}

}  // namespace

Dataset load_bundle(const std::string& dir) {
  const std::string meta_path = (fs::path(dir) / "meta.json").string();
  const json meta = load_json_file(meta_path);
  for (const char* key : {"kind", "n_features", "n_classes", "name"})
    if (!meta.contains(key)) throw ParseError(meta_path, -1, std::string("missing key '") + key + "'");

  const std::string kind = meta["kind"].get<std::string>();
  const int n_features = meta["n_features"].get<int>();
  const int n_classes = meta["n_classes"].get<int>();
  if (n_features < 0) throw ParseError(meta_path, -1, "n_features must be >= 0");
  if (n_classes < 0) throw ParseError(meta_path, -1, "n_classes must be >= 0");

  Dataset ds;
  ds.n_classes = n_classes;
  ds.name = meta["name"].get<std::string>();

  const std::string edges_path = (fs::path(dir) / "edges.tsv").string();
  const std::string feats_path = (fs::path(dir) / "features.csv").string();
  const std::string labels_path = (fs::path(dir) / "labels.csv").string();

  if (kind == "node") {
    ds.kind = Dataset::Kind::node;
    if (!meta.contains("n_nodes") || meta["n_nodes"].is_null())
      throw ParseError(meta_path, -1, "node bundle requires integer n_nodes");
    const int n = meta["n_nodes"].get<int>();

    std::vector<std::pair<int, int>> edges;
    {
      const auto lines = read_lines(edges_path);
      for (size_t i = 0; i < lines.size(); ++i) {
        if (lines[i].empty()) continue;
        const auto toks = split_on(lines[i], '\t');
        if (toks.size() != 2) throw ParseError(edges_path, static_cast<long>(i + 1), "expected 'u\\tv'");
        const long u = parse_int(toks[0], edges_path, static_cast<long>(i + 1));
        const long v = parse_int(toks[1], edges_path, static_cast<long>(i + 1));
        if (u < 0 || u >= n || v < 0 || v >= n)
          throw ParseError(edges_path, static_cast<long>(i + 1),
                           "node id out of range (n=" + std::to_string(n) + ")");
        if (u == v) throw ParseError(edges_path, static_cast<long>(i + 1), "self-loop rejected");
        edges.emplace_back(static_cast<int>(u), static_cast<int>(v));
      }
    }

    DenseMatrix feats(n, n_features);
    if (n_features > 0) {
      const auto lines = read_lines(feats_path);
      size_t row = 0;
      for (size_t i = 0; i < lines.size(); ++i) {
        if (lines[i].empty()) continue;
        if (row >= static_cast<size_t>(n))
          throw ParseError(feats_path, static_cast<long>(i + 1), "more feature rows than nodes");
        const auto toks = split_on(lines[i], ',');
        if (toks.size() != static_cast<size_t>(n_features))
          throw ParseError(feats_path, static_cast<long>(i + 1),
                           "expected " + std::to_string(n_features) + " values, got " +
                               std::to_string(toks.size()));
        for (int j = 0; j < n_features; ++j)
          feats.at(static_cast<int>(row), j) = parse_float(toks[static_cast<size_t>(j)], feats_path, static_cast<long>(i + 1));
        ++row;
      }
      if (row != static_cast<size_t>(n))
        throw ParseError(feats_path, -1, "feature row count " + std::to_string(row) +
                                             " != n_nodes " + std::to_string(n));
    }

    std::vector<int> labels;
    if (fs::exists(labels_path)) {
      labels.assign(static_cast<size_t>(n), -1);
      const auto lines = read_lines(labels_path);
      for (size_t i = 0; i < lines.size(); ++i) {
        if (lines[i].empty()) continue;
        const auto toks = split_on(lines[i], ',');
        if (toks.size() != 2) throw ParseError(labels_path, static_cast<long>(i + 1), "expected 'node_id,label'");
        const long id = parse_int(toks[0], labels_path, static_cast<long>(i + 1));
        const long lab = parse_int(toks[1], labels_path, static_cast<long>(i + 1));
        if (id < 0 || id >= n) throw ParseError(labels_path, static_cast<long>(i + 1), "node id out of range");
        if (lab < 0 || lab >= n_classes)
          throw ParseError(labels_path, static_cast<long>(i + 1),
                           "label out of range [0," + std::to_string(n_classes) + ")");
        labels[static_cast<size_t>(id)] = static_cast<int>(lab);
      }
      for (size_t i = 0; i < labels.size(); ++i)
        if (labels[i] < 0) throw ParseError(labels_path, -1, "node " + std::to_string(i) + " has no label");
    }

    try {
      ds.graph = Graph::from_edges(n, edges, std::move(feats), std::move(labels), ds.name);
    } catch (const ShapeError& e) {
      throw ParseError(edges_path, -1, e.what());
    }
  } else if (kind == "graphset") {
    ds.kind = Dataset::Kind::graphset;

    // labels.csv defines the number of graphs.
    std::map<int, int> graph_labels;
    {
      const auto lines = read_lines(labels_path);
      for (size_t i = 0; i < lines.size(); ++i) {
        if (lines[i].empty()) continue;
        const auto toks = split_on(lines[i], ',');
        if (toks.size() != 2) throw ParseError(labels_path, static_cast<long>(i + 1), "expected 'graph_id,label'");
        const long id = parse_int(toks[0], labels_path, static_cast<long>(i + 1));
        const long lab = parse_int(toks[1], labels_path, static_cast<long>(i + 1));
        if (id < 0) throw ParseError(labels_path, static_cast<long>(i + 1), "negative graph id");
        if (lab < 0 || lab >= n_classes)
          throw ParseError(labels_path, static_cast<long>(i + 1),
                           "label out of range [0," + std::to_string(n_classes) + ")");
        if (graph_labels.count(static_cast<int>(id)))
          throw ParseError(labels_path, static_cast<long>(i + 1), "duplicate graph id");
        graph_labels[static_cast<int>(id)] = static_cast<int>(lab);
      }
    }
    const int n_graphs = static_cast<int>(graph_labels.size());
    for (int gid = 0; gid < n_graphs; ++gid)
      if (!graph_labels.count(gid))
        throw ParseError(labels_path, -1, "graph ids not contiguous: missing " + std::to_string(gid));

    std::vector<std::vector<std::pair<int, int>>> edges(static_cast<size_t>(n_graphs));
    {
      const auto lines = read_lines(edges_path);
      for (size_t i = 0; i < lines.size(); ++i) {
        if (lines[i].empty()) continue;
        const auto toks = split_on(lines[i], '\t');
        if (toks.size() != 3) throw ParseError(edges_path, static_cast<long>(i + 1), "expected 'g\\tu\\tv'");
        const long gid = parse_int(toks[0], edges_path, static_cast<long>(i + 1));
        const long u = parse_int(toks[1], edges_path, static_cast<long>(i + 1));
        const long v = parse_int(toks[2], edges_path, static_cast<long>(i + 1));
        if (gid < 0 || gid >= n_graphs)
          throw ParseError(edges_path, static_cast<long>(i + 1), "graph id out of range");
        if (u < 0 || v < 0) throw ParseError(edges_path, static_cast<long>(i + 1), "negative node id");
        if (u == v) throw ParseError(edges_path, static_cast<long>(i + 1), "self-loop rejected");
        edges[static_cast<size_t>(gid)].emplace_back(static_cast<int>(u), static_cast<int>(v));
      }
    }

    // Per-graph node counts: feature rows when features exist, otherwise the
    // largest edge endpoint (featureless isolated tail nodes are not
    // representable in this format).
    std::vector<std::vector<std::vector<float>>> feat_rows(static_cast<size_t>(n_graphs));
    if (n_features > 0) {
      const auto lines = read_lines(feats_path);
      for (size_t i = 0; i < lines.size(); ++i) {
        if (lines[i].empty()) continue;
        const auto toks = split_on(lines[i], ',');
        if (toks.size() != static_cast<size_t>(n_features) + 1)
          throw ParseError(feats_path, static_cast<long>(i + 1),
                           "expected graph id + " + std::to_string(n_features) + " values");
        const long gid = parse_int(toks[0], feats_path, static_cast<long>(i + 1));
        if (gid < 0 || gid >= n_graphs)
          throw ParseError(feats_path, static_cast<long>(i + 1), "graph id out of range");
        std::vector<float> row(static_cast<size_t>(n_features));
        for (int j = 0; j < n_features; ++j)
          row[static_cast<size_t>(j)] = parse_float(toks[static_cast<size_t>(j) + 1], feats_path, static_cast<long>(i + 1));
        feat_rows[static_cast<size_t>(gid)].push_back(std::move(row));
      }
    }

    ds.set.n_classes = n_classes;
    ds.set.name = ds.name;
    for (int gid = 0; gid < n_graphs; ++gid) {
      int n_g = 0;
      if (n_features > 0) {
        n_g = static_cast<int>(feat_rows[static_cast<size_t>(gid)].size());
        for (auto [u, v] : edges[static_cast<size_t>(gid)])
          if (u >= n_g || v >= n_g)
            throw ParseError(edges_path, -1,
                             "graph " + std::to_string(gid) + " references node id >= " +
                                 std::to_string(n_g));
      } else {
        for (auto [u, v] : edges[static_cast<size_t>(gid)]) n_g = std::max({n_g, u + 1, v + 1});
      }
      if (n_g == 0)
        throw ParseError(edges_path, -1, "graph " + std::to_string(gid) + " has no nodes");
      DenseMatrix feats(n_g, n_features);
      for (int r = 0; r < n_g && n_features > 0; ++r)
        for (int j = 0; j < n_features; ++j)
          feats.at(r, j) = feat_rows[static_cast<size_t>(gid)][static_cast<size_t>(r)][static_cast<size_t>(j)];
      try {
        ds.set.graphs.push_back(Graph::from_edges(n_g, edges[static_cast<size_t>(gid)], std::move(feats), {},
                                                  ds.name + "#" + std::to_string(gid)));
      } catch (const ShapeError& e) {
        throw ParseError(edges_path, -1, "graph " + std::to_string(gid) + ": " + e.what());
      }
      ds.set.labels.push_back(graph_labels[gid]);
    }
    ds.set.check_valid();
  } else {
    throw ParseError(meta_path, -1, "unknown kind '" + kind + "'");
  }

  const std::string split_path = (fs::path(dir) / "split.json").string();
  if (fs::exists(split_path)) ds.split = parse_split_json(split_path);
  return ds;
}

void save_bundle(const Dataset& ds, const std::string& dir) {
  std::error_code ec;
  fs::create_directories(dir, ec);
  auto open = [&](const char* name) {
    std::ofstream out(fs::path(dir) / name);
    if (!out) throw DataError("cannot write " + (fs::path(dir) / name).string());
    return out;
  };

  json meta;
  meta["kind"] = ds.is_node() ? "node" : "graphset";
  if (ds.is_node())
    meta["n_nodes"] = ds.graph.n;
  else
    meta["n_nodes"] = nullptr;
  meta["n_features"] = ds.is_node() ? ds.graph.feature_dim() : ds.set.feature_dim();
  meta["n_classes"] = ds.n_classes;
  meta["name"] = ds.name;
  open("meta.json") << meta.dump(2) << "\n";

  {
    auto out = open("edges.tsv");
    if (ds.is_node()) {
      for (auto [u, v] : ds.graph.undirected_edges()) out << u << "\t" << v << "\n";
    } else {
      for (size_t gid = 0; gid < ds.set.size(); ++gid)
        for (auto [u, v] : ds.set.graphs[gid].undirected_edges())
          out << gid << "\t" << u << "\t" << v << "\n";
    }
  }

  const int n_features = ds.is_node() ? ds.graph.feature_dim() : ds.set.feature_dim();
  if (n_features > 0) {
    auto out = open("features.csv");
    auto write_row = [&](std::ofstream& o, const float* row, int d) {
      for (int j = 0; j < d; ++j) {
        if (j) o << ",";
        o << fmt_float(row[j]);
      }
      o << "\n";
    };
    if (ds.is_node()) {
      for (int i = 0; i < ds.graph.n; ++i) write_row(out, ds.graph.features.row(i), n_features);
    } else {
      for (size_t gid = 0; gid < ds.set.size(); ++gid)
        for (int i = 0; i < ds.set.graphs[gid].n; ++i) {
          out << gid << ",";
          write_row(out, ds.set.graphs[gid].features.row(i), n_features);
        }
    }
  }

  {
    auto out = open("labels.csv");
    if (ds.is_node()) {
      for (size_t i = 0; i < ds.graph.labels.size(); ++i)
        out << i << "," << ds.graph.labels[i] << "\n";
    } else {
      for (size_t gid = 0; gid < ds.set.size(); ++gid)
        out << gid << "," << ds.set.labels[gid] << "\n";
    }
  }

  if (ds.split) {
    json j;
    j["train"] = ds.split->train;
    j["val"] = ds.split->val;
    j["test"] = ds.split->test;
    open("split.json") << j.dump() << "\n";
  }
}

Dataset make_node_dataset(Graph g, int n_classes, std::optional<Split> split) {
  Dataset ds;
  ds.kind = Dataset::Kind::node;
  ds.name = g.name;
  ds.graph = std::move(g);
  ds.n_classes = n_classes;
  ds.split = std::move(split);
  return ds;
}

Dataset make_graphset_dataset(GraphSet gs) {
  Dataset ds;
  ds.kind = Dataset::Kind::graphset;
  ds.name = gs.name;
  ds.n_classes = gs.n_classes;
  ds.set = std::move(gs);
  return ds;
}

}  // namespace gssl
