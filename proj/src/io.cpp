#include "gssl/io.hpp"

#include <cstdint>
#include <cstdio>
#include <cstring>
#include <fstream>
#include <set>

#include "gssl/errors.hpp"

namespace gssl {

namespace {

constexpr char kCkptMagic[8] = {'G', 'S', 'S', 'L', 'C', 'K', 'P', 'T'};
constexpr char kEmbMagic[8] = {'G', 'S', 'S', 'L', 'E', 'M', 'B', '1'};

void write_u32(std::ostream& out, uint32_t v) {
  unsigned char b[4] = {static_cast<unsigned char>(v & 0xff),
                        static_cast<unsigned char>((v >> 8) & 0xff),
                        static_cast<unsigned char>((v >> 16) & 0xff),
                        static_cast<unsigned char>((v >> 24) & 0xff)};
  out.write(reinterpret_cast<const char*>(b), 4);
}

uint32_t read_u32(std::istream& in, const std::string& path) {
  unsigned char b[4];
  in.read(reinterpret_cast<char*>(b), 4);
  if (!in) throw DataError("truncated file: " + path);
  return static_cast<uint32_t>(b[0]) | (static_cast<uint32_t>(b[1]) << 8) |
         (static_cast<uint32_t>(b[2]) << 16) | (static_cast<uint32_t>(b[3]) << 24);
}

void write_f32s(std::ostream& out, const std::vector<float>& data) {
  for (float v : data) {
    uint32_t bits;
    std::memcpy(&bits, &v, 4);
    write_u32(out, bits);
  }
}

void read_f32s(std::istream& in, std::vector<float>& data, const std::string& path) {
  for (float& v : data) {
    const uint32_t bits = read_u32(in, path);
    std::memcpy(&v, &bits, 4);
  }
}

}  // namespace

void save_checkpoint(const ParamStore& params, const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw DataError("cannot write checkpoint: " + path);
  out.write(kCkptMagic, 8);
  write_u32(out, 1);
  for (const Parameter* p : params.all()) {
    write_u32(out, static_cast<uint32_t>(p->name.size()));
    out.write(p->name.data(), static_cast<std::streamsize>(p->name.size()));
    write_u32(out, static_cast<uint32_t>(p->value.rows));
    write_u32(out, static_cast<uint32_t>(p->value.cols));
    write_f32s(out, p->value.data);
  }
  if (!out) throw DataError("write failure: " + path);
}

void load_checkpoint(ParamStore& params, const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DataError("missing checkpoint: " + path);
  char magic[8];
  in.read(magic, 8);
  if (!in || std::memcmp(magic, kCkptMagic, 8) != 0)
    throw DataError("not a checkpoint file: " + path);
  const uint32_t version = read_u32(in, path);
  if (version != 1) throw DataError("unsupported checkpoint version " + std::to_string(version));

  std::set<std::string> seen;
  while (true) {
    in.peek();
    if (in.eof()) break;
    const uint32_t name_len = read_u32(in, path);
    std::string name(name_len, '\0');
    in.read(name.data(), name_len);
    if (!in) throw DataError("truncated file: " + path);
    const uint32_t rows = read_u32(in, path);
    const uint32_t cols = read_u32(in, path);
    Parameter* p = params.find(name);
    if (!p) throw DataError("checkpoint has unknown parameter '" + name + "'");
    if (p->value.rows != static_cast<int>(rows) || p->value.cols != static_cast<int>(cols))
      throw DataError("checkpoint shape mismatch for '" + name + "'");
    read_f32s(in, p->value.data, path);
    seen.insert(name);
  }
  for (const Parameter* p : params.all())
    if (!seen.count(p->name)) throw DataError("checkpoint missing parameter '" + p->name + "'");
}

void export_embeddings(const EmbeddingTable& emb, const std::string& path, EmbeddingFormat fmt) {
  if (emb.n == 0) throw ContractError("export_embeddings: empty table");
  emb.check_valid();
  if (fmt == EmbeddingFormat::binary) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw DataError("cannot write embeddings: " + path);
    out.write(kEmbMagic, 8);
    write_u32(out, static_cast<uint32_t>(emb.n));
    write_u32(out, static_cast<uint32_t>(emb.d));
    write_f32s(out, emb.data.data);
    for (int id : emb.ids) write_u32(out, static_cast<uint32_t>(id));
    if (!out) throw DataError("write failure: " + path);
  } else {
    std::ofstream out(path);
    if (!out) throw DataError("cannot write embeddings: " + path);
    out << "id";
    for (int j = 0; j < emb.d; ++j) out << ",e" << j;
    out << "\n";
    char buf[32];
    for (int i = 0; i < emb.n; ++i) {
      out << emb.ids[static_cast<size_t>(i)];
      for (int j = 0; j < emb.d; ++j) {
        std::snprintf(buf, sizeof(buf), "%.9g", static_cast<double>(emb.data.at(i, j)));
        out << "," << buf;
      }
      out << "\n";
    }
    if (!out) throw DataError("write failure: " + path);
  }
}

EmbeddingTable import_embeddings(const std::string& path) {
  std::ifstream probe(path, std::ios::binary);
  if (!probe) throw DataError("missing embeddings file: " + path);
  char magic[8] = {};
  probe.read(magic, 8);
  EmbeddingTable emb;
  if (probe.gcount() == 8 && std::memcmp(magic, kEmbMagic, 8) == 0) {
    emb.n = static_cast<int>(read_u32(probe, path));
    emb.d = static_cast<int>(read_u32(probe, path));
    emb.data = DenseMatrix(emb.n, emb.d);
    read_f32s(probe, emb.data.data, path);
    emb.ids.resize(static_cast<size_t>(emb.n));
    for (int& id : emb.ids) id = static_cast<int>(read_u32(probe, path));
  } else {
    probe.close();
    std::ifstream in(path);
    std::string header;
    if (!std::getline(in, header) || header.rfind("id", 0) != 0)
      throw ParseError(path, 1, "expected embeddings csv header");
    int d = 0;
    for (char ch : header)
      if (ch == ',') ++d;
    std::vector<float> values;
    std::vector<int> ids;
    std::string line;
    long lineno = 1;
    while (std::getline(in, line)) {
      ++lineno;
      if (line.empty()) continue;
      size_t pos = 0;
      int col = -1;
      while (pos <= line.size()) {
        size_t next = line.find(',', pos);
        if (next == std::string::npos) next = line.size();
        const std::string tok = line.substr(pos, next - pos);
        try {
          if (col == -1)
            ids.push_back(std::stoi(tok));
          else
            values.push_back(std::stof(tok));
        } catch (const std::exception&) {
          throw ParseError(path, lineno, "bad value '" + tok + "'");
        }
        ++col;
        pos = next + 1;
      }
      if (col != d) throw ParseError(path, lineno, "wrong column count");
    }
    emb.n = static_cast<int>(ids.size());
    emb.d = d;
    emb.data = DenseMatrix(emb.n, emb.d, std::move(values));
    emb.ids = std::move(ids);
  }
  if (emb.n == 0) throw DataError("empty embeddings file: " + path);
  emb.check_valid();
  return emb;
}

}  // namespace gssl
