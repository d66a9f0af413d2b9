#include "emo/dense_features.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>
#include <unordered_set>

#include "emo/csv.hpp"
#include "emo/error.hpp"

namespace emo {
namespace {

std::vector<std::string_view> split_ws(std::string_view line) {
  std::vector<std::string_view> out;
  std::size_t i = 0;
  while (i < line.size()) {
    while (i < line.size() && (line[i] == ' ' || line[i] == '\t' || line[i] == '\r')) ++i;
    const std::size_t start = i;
    while (i < line.size() && line[i] != ' ' && line[i] != '\t' && line[i] != '\r') ++i;
    if (i > start) out.push_back(line.substr(start, i - start));
  }
  return out;
}

bool parse_size(std::string_view s, std::size_t& out) {
  const auto* end = s.data() + s.size();
  auto [p, ec] = std::from_chars(s.data(), end, out);
  return ec == std::errc() && p == end;
}

float parse_float(std::string_view s, const std::filesystem::path& path, std::size_t line) {
  float v = 0.0f;
  const auto* end = s.data() + s.size();
  auto [p, ec] = std::from_chars(s.data(), end, v);
  if (ec != std::errc() || p != end || !std::isfinite(v)) {
    throw FormatError(path.string() + ":" + std::to_string(line) + ": bad vector component '" + std::string(s) + "'");
  }
  return v;
}

std::string mismatch(const std::filesystem::path& path, std::size_t line, std::size_t want, std::size_t got) {
  return path.string() + ":" + std::to_string(line) + ": expected " + std::to_string(want) + " values, found " +
         std::to_string(got);
}

std::string list_ids(const std::vector<std::string>& ids) {
  std::string out;
  const std::size_t shown = std::min<std::size_t>(ids.size(), 10);
  for (std::size_t i = 0; i < shown; ++i) out += (i ? ", " : "") + ids[i];
  if (ids.size() > shown) out += ", ... (" + std::to_string(ids.size()) + " total)";
  return out;
}

DenseMatrix align_rows(const std::unordered_map<std::string, std::vector<float>>& rows, std::size_t dim,
                       std::span<const std::string> ids, const std::filesystem::path& path) {
  std::vector<std::string> missing;
  for (const auto& id : ids) {
    if (!rows.count(id)) missing.push_back(id);
  }
  if (!missing.empty()) {
    throw AlignmentError(path.string() + ": missing embeddings for ids: " + list_ids(missing));
  }
  DenseMatrix m(static_cast<Eigen::Index>(ids.size()), static_cast<Eigen::Index>(dim));
  for (std::size_t i = 0; i < ids.size(); ++i) {
    const auto& v = rows.at(ids[i]);
    for (std::size_t c = 0; c < dim; ++c) m(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(c)) = v[c];
  }
  return m;
}

}  // namespace

EmbeddingTable::EmbeddingTable(std::size_t dimension, std::string language, std::filesystem::path source)
    : dim_(dimension), language_(std::move(language)), source_(std::move(source)) {
  if (dim_ == 0) throw FormatError("embedding dimension must be positive");
}

void EmbeddingTable::insert_or_assign(std::string token, std::span<const float> vector) {
  if (vector.size() != dim_) throw ShapeError("embedding for '" + token + "' has the wrong dimension");
  auto [it, inserted] = index_.try_emplace(std::move(token), data_.size() / dim_);
  if (inserted) {
    data_.insert(data_.end(), vector.begin(), vector.end());
  } else {
    std::copy(vector.begin(), vector.end(), data_.begin() + static_cast<std::ptrdiff_t>(it->second * dim_));
  }
}

std::optional<std::span<const float>> EmbeddingTable::lookup(std::string_view token) const {
  auto it = index_.find(std::string(token));
  if (it == index_.end()) return std::nullopt;
  return std::span<const float>(data_.data() + it->second * dim_, dim_);
}

EmbeddingTable load_word_vectors(const std::filesystem::path& path, std::string language, std::size_t max_words) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw FormatError("cannot open vector file " + path.string());

  std::optional<EmbeddingTable> table;
  std::vector<float> buf;
  std::string line;
  std::size_t line_no = 0;
  std::size_t rows = 0;
  while (std::getline(in, line)) {
    ++line_no;
    const auto fields = split_ws(line);
    if (fields.empty()) continue;
    if (!table) {
      std::size_t count = 0, dim = 0;
      if (fields.size() == 2 && parse_size(fields[0], count) && parse_size(fields[1], dim)) {
        if (dim == 0) throw FormatError(path.string() + ":1: header declares dimension 0");
        table.emplace(dim, language, path);
        continue;
      }
      if (fields.size() < 2) throw FormatError(path.string() + ":" + std::to_string(line_no) + ": no vector values");
      table.emplace(fields.size() - 1, language, path);
    }
    if (fields.size() - 1 != table->dimension()) {
      throw FormatError(mismatch(path, line_no, table->dimension(), fields.size() - 1));
    }
    buf.resize(table->dimension());
    for (std::size_t i = 0; i < buf.size(); ++i) buf[i] = parse_float(fields[i + 1], path, line_no);
    table->insert_or_assign(std::string(fields[0]), buf);
    if (max_words > 0 && ++rows >= max_words) break;
  }
  if (!table) throw FormatError("vector file " + path.string() + " is empty");
  return std::move(*table);
}

PooledEmbeddings embed_documents(std::span<const TokenSequence> docs, const EmbeddingTable& table) {
  PooledEmbeddings out;
  const std::size_t dim = table.dimension();
  out.matrix = DenseMatrix::Zero(static_cast<Eigen::Index>(docs.size()), static_cast<Eigen::Index>(dim));
  out.oov.documents = docs.size();
  std::vector<double> acc(dim);
  for (std::size_t d = 0; d < docs.size(); ++d) {
    std::fill(acc.begin(), acc.end(), 0.0);
    std::size_t hits = 0;
    for (const auto& tok : docs[d].tokens) {
      ++out.oov.tokens;
      auto v = table.lookup(tok);
      if (!v) {
        ++out.oov.oov_tokens;
        continue;
      }
      ++hits;
      for (std::size_t c = 0; c < dim; ++c) acc[c] += (*v)[c];
    }
    if (hits == 0) {
      ++out.oov.fully_oov_documents;
      continue;
    }
    for (std::size_t c = 0; c < dim; ++c) {
      out.matrix(static_cast<Eigen::Index>(d), static_cast<Eigen::Index>(c)) = acc[c] / static_cast<double>(hits);
    }
  }
  return out;
}

DenseMatrix load_precomputed_embeddings(const std::filesystem::path& path, std::span<const std::string> ids) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw FormatError("cannot open embedding file " + path.string());

  std::string first;
  while (std::getline(in, first) && split_ws(first).empty()) {
  }
  in.clear();
  in.seekg(0);

  std::unordered_map<std::string, std::vector<float>> rows;
  std::size_t dim = 0;
  auto add = [&](std::string id, std::vector<float> v, std::size_t line) {
    if (dim == 0) dim = v.size();
    if (v.size() != dim) throw FormatError(mismatch(path, line, dim, v.size()));
    if (!rows.emplace(id, std::move(v)).second) {
      throw FormatError(path.string() + ":" + std::to_string(line) + ": duplicate id '" + id + "'");
    }
  };

  if (first.find(',') != std::string::npos) {
    csv::Reader reader(in);
    bool first_record = true;
    while (auto rec = reader.next()) {
      auto& f = rec->fields;
      if (f.size() == 1 && f[0].empty()) continue;
      if (first_record && !f.empty() && f[0] == "id") {
        first_record = false;
        continue;
      }
      first_record = false;
      if (f.size() < 2) throw FormatError(path.string() + ":" + std::to_string(rec->line) + ": no vector values");
      std::vector<float> v(f.size() - 1);
      for (std::size_t i = 1; i < f.size(); ++i) v[i - 1] = parse_float(f[i], path, rec->line);
      add(f[0], std::move(v), rec->line);
    }
  } else {
    std::string line;
    std::size_t line_no = 0;
    bool header_checked = false;
    while (std::getline(in, line)) {
      ++line_no;
      const auto fields = split_ws(line);
      if (fields.empty()) continue;
      if (!header_checked) {
        header_checked = true;
        std::size_t count = 0, d = 0;
        if (fields.size() == 2 && parse_size(fields[0], count) && parse_size(fields[1], d)) {
          dim = d;
          continue;
        }
      }
      if (fields.size() < 2) throw FormatError(path.string() + ":" + std::to_string(line_no) + ": no vector values");
      std::vector<float> v(fields.size() - 1);
      for (std::size_t i = 1; i < fields.size(); ++i) v[i - 1] = parse_float(fields[i], path, line_no);
      add(std::string(fields[0]), std::move(v), line_no);
    }
  }
  if (rows.empty()) throw FormatError("embedding file " + path.string() + " has no rows");
  return align_rows(rows, dim, ids, path);
}

}  // namespace emo
