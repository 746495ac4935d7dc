#pragma once

#include <cstdint>
#include <string>

#include "gssl/bundle.hpp"

namespace gssl {

// Deterministic synthetic stand-ins for the public benchmark datasets,
// matching their headline statistics (graph counts, feature dims, class
// counts). Class-consistent structure plus a fixed label-flip rate pins the
// achievable accuracy; generation is a pure function of the seed.

// 188 two-class molecule-like graphs with 7 one-hot atom types.
GraphSet make_molecule_bench(uint64_t seed);

// Featureless social-network-like graphs separated by edge density.
GraphSet make_social_bench(int n_graphs, int n_classes, int min_nodes, int max_nodes,
                           double label_noise, uint64_t seed);

// A single 10-class node-task graph with noisy one-hot community features.
Dataset make_cs_network_bench(uint64_t seed);

// True when `name` is one of the generatable bundles below.
bool is_generatable_dataset(const std::string& name);

// Generates the named bundle: "sbm-demo", "mutag", "imdb-b", "imdb-m",
// "wikics". The stored dataset name carries a "-synth" suffix (except the
// natively synthetic sbm-demo) so downstream reports show the provenance.
Dataset generate_bench_dataset(const std::string& name, uint64_t seed);

}  // namespace gssl
