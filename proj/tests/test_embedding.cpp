#include <doctest.h>

#include <sstream>

#include "ltg/embedding.hpp"
#include "ltg/error.hpp"
#include "support.hpp"

using namespace ltg;

namespace {

EmbeddingTable table_from(const std::string& text) {
  std::istringstream in(text);
  return load_embedding_table(in, "test");
}

ErrorCode load_error(const std::string& text) {
  try {
    table_from(text);
  } catch (const Error& e) {
    return e.code();
  }
  FAIL("expected an error");
  return ErrorCode::InvalidArgument;
}

}  // namespace

TEST_CASE("tokenize splits on non-word characters and lowercases") {
  CHECK(tokenize("").tokens.empty());
  CHECK(tokenize("The river, the Irony!").tokens ==
        std::vector<std::string>{"the", "river", "the", "irony"});
  CHECK(tokenize("don't stop").tokens == std::vector<std::string>{"don't", "stop"});
  CHECK(tokenize("  \n\t ").tokens.empty());
}

TEST_CASE("tokenize handles non-ASCII letters and typographic apostrophes") {
  const auto seq = tokenize("\xC3\x89""COLE na\xC3\xAFve \xE2\x80\x94 it\xE2\x80\x99s 42nd");
  CHECK(seq.tokens ==
        std::vector<std::string>{"\xC3\xA9""cole", "na\xC3\xAFve", "it\xE2\x80\x99s", "42nd"});
  // offsets count code points, not bytes
  CHECK(seq.source_char_offsets == std::vector<std::size_t>{0, 6, 14, 19});
}

TEST_CASE("tokenize treats ill-formed UTF-8 as a separator") {
  const auto seq = tokenize("ab\xFF""cd");
  CHECK(seq.tokens == std::vector<std::string>{"ab", "cd"});
}

TEST_CASE("token invariants hold on random byte soup") {
  std::mt19937_64 rng(7);
  std::uniform_int_distribution<int> byte(0, 255);
  for (int round = 0; round < 200; ++round) {
    std::string text(static_cast<std::size_t>(byte(rng)) * 4, ' ');
    for (auto& ch : text) ch = static_cast<char>(byte(rng) % 3 == 0 ? ' ' : byte(rng));
    const auto seq = tokenize(text);
    REQUIRE(seq.tokens.size() == seq.source_char_offsets.size());
    for (std::size_t i = 0; i < seq.size(); ++i) {
      CHECK(!seq.tokens[i].empty());
      CHECK(seq.tokens[i].find_first_of(" \t\r\n") == std::string::npos);
      if (i > 0) CHECK(seq.source_char_offsets[i] > seq.source_char_offsets[i - 1]);
    }
  }
}

TEST_CASE("load_embedding_table parses the GloVe text format") {
  const auto table = table_from("a 1 0\nb 0 1");
  CHECK(table.dimension() == 2);
  CHECK(table.size() == 2);
  CHECK(table.find("b")[1] == 1.0);
  CHECK(table.find("c").empty());
  CHECK(table.name() == "test");
}

TEST_CASE("load_embedding_table keeps the first duplicate and tolerates CRLF") {
  const auto table = table_from("a 1 0\r\na 5 5\r\n\r\nb -0.5 2e-1\r\n");
  CHECK(table.size() == 2);
  CHECK(table.find("a")[0] == 1.0);
  CHECK(table.find("b")[1] == doctest::Approx(0.2));
}

TEST_CASE("load_embedding_table error cases") {
  CHECK(load_error("a 1 x") == ErrorCode::MalformedEmbeddingFile);
  CHECK(load_error("a 1 0\nb 0 1 1") == ErrorCode::MalformedEmbeddingFile);
  CHECK(load_error("a 1 nan") == ErrorCode::MalformedEmbeddingFile);
  CHECK(load_error("lonely") == ErrorCode::MalformedEmbeddingFile);
  CHECK(load_error("") == ErrorCode::EmptyTable);
  CHECK(load_error("\n\n") == ErrorCode::EmptyTable);
}

TEST_CASE("zero vectors are rejected at load") {
  const auto table = table_from("a 0 0\nb 0 1");
  CHECK(table.size() == 1);
  CHECK(table.find("a").empty());
  CHECK(table.rejected_zero_vectors() == 1);
}

TEST_CASE("vocabulary filter stores only requested words") {
  std::istringstream in("a 1 0\nb 0 1\nc 1 1");
  const std::unordered_set<std::string> vocab{"c", "zz"};
  const auto table = load_embedding_table(in, "t", &vocab);
  CHECK(table.size() == 1);
  CHECK(!table.find("c").empty());
}

TEST_CASE("embed_sequence normalizes and drops OOV tokens") {
  SUBCASE("normalization of (3,4)") {
    const auto seq = embed_sequence(TokenSequence{{"a", "a"}, {0, 2}}, table_from("a 3 4"));
    REQUIRE(seq.size() == 2);
    CHECK(seq[0][0] == doctest::Approx(0.6).epsilon(1e-15));
    CHECK(seq[1][1] == doctest::Approx(0.8).epsilon(1e-15));
    CHECK(seq.dropped_oov_fraction() == 0.0);
  }
  SUBCASE("OOV positions close up") {
    const auto seq =
        embed_sequence(TokenSequence{{"a", "zzzqqq", "a"}, {0, 2, 9}}, table_from("a 1 0"));
    CHECK(seq.size() == 2);
    CHECK(seq.dropped_oov_fraction() == doctest::Approx(1.0 / 3.0));
  }
  SUBCASE("no overlap") {
    try {
      embed_sequence(TokenSequence{{"zzzqqq"}, {0}}, table_from("a 1 0"));
      FAIL("expected EmptyVocabularyOverlap");
    } catch (const Error& e) {
      CHECK(e.code() == ErrorCode::EmptyVocabularyOverlap);
    }
  }
}

TEST_CASE("embedding is unit norm, deterministic and scale free") {
  std::mt19937_64 rng(11);
  std::normal_distribution<double> normal;
  std::uniform_real_distribution<double> scale_dist(1e-3, 1e3);
  for (int round = 0; round < 20; ++round) {
    const std::size_t d = 1 + rng() % 12;
    EmbeddingTable table("orig", d);
    EmbeddingTable scaled("scaled", d);
    const double scale = scale_dist(rng);
    std::vector<std::string> words;
    for (int w = 0; w < 30; ++w) {
      std::vector<double> v(d);
      for (auto& x : v) x = normal(rng);
      std::vector<double> sv(v);
      for (auto& x : sv) x *= scale;
      words.push_back("w" + std::to_string(w));
      table.insert(words.back(), v);
      scaled.insert(words.back(), sv);
    }
    TokenSequence tokens;
    for (int i = 0; i < 200; ++i) {
      tokens.tokens.push_back(i % 7 == 0 ? "oov" : words[rng() % words.size()]);
      tokens.source_char_offsets.push_back(static_cast<std::size_t>(i) * 4);
    }
    const auto a = embed_sequence(tokens, table);
    const auto b = embed_sequence(tokens, table);
    const auto c = embed_sequence(tokens, scaled);
    CHECK(a.size() == tokens.size() - (200 + 6) / 7);
    CHECK(std::equal(a.data().begin(), a.data().end(), b.data().begin()));
    for (std::size_t i = 0; i < a.size(); ++i) {
      double sq = 0.0;
      for (std::size_t k = 0; k < d; ++k) {
        sq += a[i][k] * a[i][k];
        CHECK(std::abs(a[i][k] - c[i][k]) < 1e-9);
      }
      CHECK(std::abs(std::sqrt(sq) - 1.0) < 1e-9);
    }
  }
}

TEST_CASE("UnitVectorSequence rejects rows that are not unit norm") {
  CHECK_THROWS_AS(UnitVectorSequence(2, {1.0, 1.0}), Error);
  CHECK_THROWS_AS(UnitVectorSequence::from_raw(2, {0.0, 0.0}), Error);
  CHECK(UnitVectorSequence::from_raw(2, {3.0, 4.0})[0][1] == doctest::Approx(0.8));
}
