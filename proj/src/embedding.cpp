#include "ltg/embedding.hpp"

#include <unicode/uchar.h>
#include <unicode/utf8.h>

#include <algorithm>
#include <charconv>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <optional>

#include "ltg/error.hpp"

namespace ltg {

namespace {

constexpr UChar32 kApostrophe = 0x0027;
constexpr UChar32 kRightSingleQuote = 0x2019;

bool is_token_char(UChar32 c) {
  return u_isalpha(c) || u_isdigit(c) || c == kApostrophe || c == kRightSingleQuote;
}

void append_utf8(std::string& out, UChar32 c) {
  char buf[U8_MAX_LENGTH];
  std::int32_t len = 0;
  U8_APPEND_UNSAFE(buf, len, c);
  out.append(buf, static_cast<std::size_t>(len));
}

std::string_view trim_line(std::string_view line) {
  while (!line.empty() && (line.back() == '\r' || line.back() == ' ' || line.back() == '\t')) {
    line.remove_suffix(1);
  }
  return line;
}

// Splits on runs of spaces/tabs.
void split_fields(std::string_view line, std::vector<std::string_view>& fields) {
  fields.clear();
  std::size_t pos = 0;
  while (pos < line.size()) {
    while (pos < line.size() && (line[pos] == ' ' || line[pos] == '\t')) ++pos;
    if (pos >= line.size()) break;
    std::size_t end = pos;
    while (end < line.size() && line[end] != ' ' && line[end] != '\t') ++end;
    fields.push_back(line.substr(pos, end - pos));
    pos = end;
  }
}

[[noreturn]] void malformed(std::size_t line_no, const std::string& what) {
  throw Error(ErrorCode::MalformedEmbeddingFile,
              "embedding line " + std::to_string(line_no) + ": " + what);
}

}  // namespace

TokenSequence tokenize(std::string_view raw_text) {
  TokenSequence out;
  const auto* s = reinterpret_cast<const std::uint8_t*>(raw_text.data());
  const auto length = static_cast<std::int32_t>(raw_text.size());

  std::string current;
  std::size_t current_start = 0;
  std::size_t char_index = 0;
  std::int32_t i = 0;
  while (i < length) {
    UChar32 c;
    U8_NEXT(s, i, length, c);
    if (c >= 0 && is_token_char(c)) {
      if (current.empty()) current_start = char_index;
      append_utf8(current, u_tolower(c));
    } else if (!current.empty()) {
      out.tokens.push_back(std::move(current));
      out.source_char_offsets.push_back(current_start);
      current.clear();
    }
    ++char_index;
  }
  if (!current.empty()) {
    out.tokens.push_back(std::move(current));
    out.source_char_offsets.push_back(current_start);
  }
  return out;
}

EmbeddingTable::EmbeddingTable(std::string name, std::size_t dimension)
    : name_(std::move(name)), dimension_(dimension) {
  if (dimension_ == 0) {
    throw Error(ErrorCode::InvalidArgument, "embedding dimension must be positive");
  }
}

std::span<const double> EmbeddingTable::find(std::string_view word) const {
  auto it = index_.find(word);
  if (it == index_.end()) return {};
  return {data_.data() + it->second * dimension_, dimension_};
}

bool EmbeddingTable::insert(std::string_view word, std::span<const double> vector) {
  if (vector.size() != dimension_) {
    throw Error(ErrorCode::MalformedEmbeddingFile,
                "vector for '" + std::string(word) + "' has " + std::to_string(vector.size()) +
                    " components, expected " + std::to_string(dimension_));
  }
  if (!std::all_of(vector.begin(), vector.end(), [](double v) { return std::isfinite(v); })) {
    throw Error(ErrorCode::MalformedEmbeddingFile,
                "non-finite component for '" + std::string(word) + "'");
  }
  if (index_.find(word) != index_.end()) return false;
  if (std::all_of(vector.begin(), vector.end(), [](double v) { return v == 0.0; })) {
    ++rejected_zero_;
    return false;
  }
  index_.emplace(std::string(word), index_.size());
  data_.insert(data_.end(), vector.begin(), vector.end());
  return true;
}

EmbeddingTable load_embedding_table(std::istream& source, std::string name,
                                    const std::unordered_set<std::string>* vocabulary) {
  std::string line;
  std::vector<std::string_view> fields;
  std::vector<double> values;
  std::size_t line_no = 0;
  std::size_t dimension = 0;
  std::optional<EmbeddingTable> table;

  while (std::getline(source, line)) {
    ++line_no;
    const auto view = trim_line(line);
    split_fields(view, fields);
    if (fields.empty()) continue;
    if (fields.size() < 2) malformed(line_no, "expected a word followed by components");

    const std::size_t d = fields.size() - 1;
    if (!table) {
      dimension = d;
      table.emplace(name, dimension);
    } else if (d != dimension) {
      malformed(line_no, "dimension " + std::to_string(d) + " differs from " +
                             std::to_string(dimension));
    }

    values.resize(d);
    for (std::size_t k = 0; k < d; ++k) {
      const auto f = fields[k + 1];
      const auto [ptr, ec] = std::from_chars(f.data(), f.data() + f.size(), values[k]);
      if (ec != std::errc{} || ptr != f.data() + f.size()) {
        malformed(line_no, "non-numeric component '" + std::string(f) + "'");
      }
      if (!std::isfinite(values[k])) malformed(line_no, "non-finite component");
    }
    if (vocabulary && !vocabulary->contains(std::string(fields[0]))) continue;
    try {
      table->insert(fields[0], values);
    } catch (const Error& e) {
      malformed(line_no, e.what());
    }
  }
  if (source.bad()) throw Error(ErrorCode::Io, "read error while loading embeddings");
  if (!table) throw Error(ErrorCode::EmptyTable, "embedding source has no entries");
  return std::move(*table);
}

EmbeddingTable load_embedding_file(const std::string& path,
                                   const std::unordered_set<std::string>* vocabulary) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::Io, "cannot open embeddings file '" + path + "'");
  return load_embedding_table(in, std::filesystem::path(path).stem().string(), vocabulary);
}

UnitVectorSequence::UnitVectorSequence(std::size_t dimension, std::vector<double> row_major,
                                       double dropped_oov_fraction)
    : dimension_(dimension), data_(std::move(row_major)),
      dropped_oov_fraction_(dropped_oov_fraction) {
  if (dimension_ == 0 || data_.size() % dimension_ != 0) {
    throw Error(ErrorCode::InvalidArgument, "vector data is not a whole number of rows");
  }
  for (std::size_t i = 0; i < size(); ++i) {
    double sq = 0.0;
    for (double v : (*this)[i]) sq += v * v;
    if (std::abs(std::sqrt(sq) - 1.0) >= 1e-9) {
      throw Error(ErrorCode::InvalidArgument, "row " + std::to_string(i) + " is not unit norm");
    }
  }
}

UnitVectorSequence UnitVectorSequence::from_raw(std::size_t dimension,
                                                std::vector<double> row_major) {
  if (dimension == 0 || row_major.size() % dimension != 0) {
    throw Error(ErrorCode::InvalidArgument, "vector data is not a whole number of rows");
  }
  for (std::size_t off = 0; off < row_major.size(); off += dimension) {
    const auto row = std::span(row_major).subspan(off, dimension);
    double sq = 0.0;
    for (double v : row) sq += v * v;
    const double norm = std::sqrt(sq);
    if (!(norm > 0.0) || !std::isfinite(norm)) {
      throw Error(ErrorCode::InvalidArgument, "cannot normalize a zero or non-finite vector");
    }
    for (double& v : row) v /= norm;
  }
  return UnitVectorSequence(dimension, std::move(row_major));
}

UnitVectorSequence embed_sequence(const TokenSequence& tokens, const EmbeddingTable& table) {
  const std::size_t d = table.dimension();
  std::vector<double> rows;
  std::size_t kept = 0;
  for (const auto& tok : tokens.tokens) {
    const auto v = table.find(tok);
    if (v.empty()) continue;
    double sq = 0.0;
    for (double x : v) sq += x * x;
    const double norm = std::sqrt(sq);
    for (double x : v) rows.push_back(x / norm);
    ++kept;
  }
  if (kept == 0) {
    throw Error(ErrorCode::EmptyVocabularyOverlap,
                "none of the " + std::to_string(tokens.size()) + " tokens is in the '" +
                    table.name() + "' vocabulary");
  }
  const double dropped =
      static_cast<double>(tokens.size() - kept) / static_cast<double>(tokens.size());
  return UnitVectorSequence(d, std::move(rows), dropped);
}

}  // namespace ltg
