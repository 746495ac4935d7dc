#pragma once

#include <string>

#include "gssl/evaluator.hpp"
#include "gssl/optim.hpp"

namespace gssl {

// Checkpoint: magic "GSSLCKPT", u32 version (1), then one record per
// parameter in store order: u32 name length, name bytes, u32 rows, u32 cols,
// rows*cols little-endian f32. Records run to end of file.
void save_checkpoint(const ParamStore& params, const std::string& path);

// Strict reload into an identically-structured store: every stored parameter
// must appear with matching shape and no extras may remain.
void load_checkpoint(ParamStore& params, const std::string& path);

enum class EmbeddingFormat { binary, csv };

// Binary: magic "GSSLEMB1", u32 n, u32 d, n*d little-endian f32 row-major,
// then n u32 ids. CSV: header "id,e0,...,e{d-1}". Empty tables are rejected.
void export_embeddings(const EmbeddingTable& emb, const std::string& path, EmbeddingFormat fmt);
EmbeddingTable import_embeddings(const std::string& path);

}  // namespace gssl
