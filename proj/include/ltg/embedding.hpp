#pragma once

#include <cstddef>
#include <istream>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <unordered_set>
#include <vector>

namespace ltg {

/// Lowercased word tokens with the code-point offset each token started at.
struct TokenSequence {
  std::vector<std::string> tokens;
  std::vector<std::size_t> source_char_offsets;

  std::size_t size() const noexcept { return tokens.size(); }
};

/// Splits text into maximal runs of Unicode letters, digits and apostrophes
/// (U+0027, U+2019), lowercased. Everything else separates tokens.
/// Ill-formed UTF-8 bytes act as separators.
TokenSequence tokenize(std::string_view raw_text);

/// Word -> vector lookup loaded from a GloVe text file. Immutable after load.
class EmbeddingTable {
 public:
  EmbeddingTable(std::string name, std::size_t dimension);

  const std::string& name() const noexcept { return name_; }
  std::size_t dimension() const noexcept { return dimension_; }
  std::size_t size() const noexcept { return index_.size(); }
  bool empty() const noexcept { return index_.empty(); }

  /// Entries rejected at load because every component was zero.
  std::size_t rejected_zero_vectors() const noexcept { return rejected_zero_; }

  /// Empty span when the word is absent.
  std::span<const double> find(std::string_view word) const;

  /// Adds an entry; the first insertion of a word wins. Returns false when the
  /// word was already present or the vector is all-zero.
  /// Throws Error(MalformedEmbeddingFile) on wrong dimension or non-finite values.
  bool insert(std::string_view word, std::span<const double> vector);

 private:
  struct Hash {
    using is_transparent = void;
    std::size_t operator()(std::string_view s) const noexcept {
      return std::hash<std::string_view>{}(s);
    }
  };

  std::string name_;
  std::size_t dimension_;
  std::unordered_map<std::string, std::size_t, Hash, std::equal_to<>> index_;
  std::vector<double> data_;
  std::size_t rejected_zero_ = 0;
};

/// Parses the GloVe text format: `word c1 c2 ... cd` per line, no header.
/// The dimension is taken from the first non-blank line. When `vocabulary` is
/// non-null only those words are stored, but every line is still validated.
EmbeddingTable load_embedding_table(std::istream& source, std::string name,
                                    const std::unordered_set<std::string>* vocabulary = nullptr);

/// Opens `path` and loads it; the table is named after the file stem.
EmbeddingTable load_embedding_file(const std::string& path,
                                   const std::unordered_set<std::string>* vocabulary = nullptr);

/// N unit-norm vectors of dimension d stored row-major.
class UnitVectorSequence {
 public:
  UnitVectorSequence() = default;
  UnitVectorSequence(std::size_t dimension, std::vector<double> row_major,
                     double dropped_oov_fraction = 0.0);

  std::size_t size() const noexcept { return dimension_ == 0 ? 0 : data_.size() / dimension_; }
  std::size_t dimension() const noexcept { return dimension_; }
  double dropped_oov_fraction() const noexcept { return dropped_oov_fraction_; }

  std::span<const double> operator[](std::size_t i) const {
    return {data_.data() + i * dimension_, dimension_};
  }
  std::span<const double> data() const noexcept { return data_; }

  /// Normalizes each row of `row_major` to unit length. Rows must be non-zero.
  static UnitVectorSequence from_raw(std::size_t dimension, std::vector<double> row_major);

 private:
  std::size_t dimension_ = 0;
  std::vector<double> data_;
  double dropped_oov_fraction_ = 0.0;
};

/// Maps in-vocabulary tokens to their normalized table vectors; OOV tokens are
/// dropped. Throws Error(EmptyVocabularyOverlap) when nothing is in-vocabulary.
UnitVectorSequence embed_sequence(const TokenSequence& tokens, const EmbeddingTable& table);

}  // namespace ltg
