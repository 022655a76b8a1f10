#include "ncemb/embeddings.hpp"
#include "ncemb/error.hpp"

#include "support/fixtures.hpp"

#include <doctest.h>

#include <algorithm>
#include <limits>
#include <sstream>

using namespace ncemb;

TEST_CASE("load_embeddings reads a minimal well-formed file") {
  std::istringstream in("2 3\ncat 1 0 0\ndog 0 1 0\n");
  const EmbeddingSpace space = load_embeddings(in);
  CHECK(space.size() == 2);
  CHECK(space.dim() == 3);
  CHECK(space.tokens() == std::vector<std::string>{"cat", "dog"});
  CHECK(space.matrix()(0, 0) == 1.0);
  CHECK(space.matrix()(1, 1) == 1.0);
}

TEST_CASE("load_embeddings rejects malformed input with line numbers") {
  SUBCASE("row-length mismatch names line 2") {
    std::istringstream in("2 3\ncat 1 0\ndog 0 1 0\n");
    try {
      load_embeddings(in);
      FAIL("expected ParseError");
    } catch (const ParseError& e) {
      CHECK(e.line() == 2);
      CHECK(std::string(e.what()).find("cat") != std::string::npos);
    }
  }
  SUBCASE("malformed header") {
    std::istringstream in("banana\ncat 1 0 0\n");
    CHECK_THROWS_AS(load_embeddings(in), ParseError);
  }
  SUBCASE("negative dimension header") {
    std::istringstream in("2 -1\n");
    CHECK_THROWS_AS(load_embeddings(in), ParseError);
  }
  SUBCASE("duplicate token") {
    std::istringstream in("2 2\ncat 1 0\ncat 0 1\n");
    CHECK_THROWS_WITH_AS(load_embeddings(in),
                         doctest::Contains("duplicate token"), ParseError);
  }
  SUBCASE("non-numeric entry names the line") {
    std::istringstream in("1 2\ncat 1 fish\n");
    try {
      load_embeddings(in);
      FAIL("expected ParseError");
    } catch (const ParseError& e) {
      CHECK(e.line() == 2);
      CHECK(std::string(e.what()).find("fish") != std::string::npos);
    }
  }
  SUBCASE("too many values in a row") {
    std::istringstream in("1 2\ncat 1 2 3\n");
    CHECK_THROWS_AS(load_embeddings(in), ParseError);
  }
  SUBCASE("truncated file") {
    std::istringstream in("3 2\ncat 1 0\n");
    CHECK_THROWS_AS(load_embeddings(in), ParseError);
  }
}

TEST_CASE("save_embeddings writes the header format") {
  SUBCASE("two tokens") {
    std::istringstream in("2 3\ncat 1 0 0\ndog 0 1 0\n");
    const EmbeddingSpace space = load_embeddings(in);
    std::ostringstream out;
    save_embeddings(space, out);
    const std::string text = out.str();
    CHECK(text.substr(0, 4) == "2 3\n");
    CHECK(std::count(text.begin(), text.end(), '\n') == 3);
  }
  SUBCASE("empty space keeps its dimension") {
    const EmbeddingSpace space({}, Eigen::MatrixXd(0, 4));
    std::ostringstream out;
    save_embeddings(space, out);
    CHECK(out.str() == "0 4\n");
  }
}

TEST_CASE("save then load round-trips a random 1000-token space") {
  std::vector<std::string> vocab;
  for (int i = 0; i < 1000; ++i) vocab.push_back("tok" + std::to_string(i));
  const EmbeddingSpace space = synthetic_space(99, vocab, 16);

  std::stringstream buffer;
  save_embeddings(space, buffer);
  const EmbeddingSpace reloaded = load_embeddings(buffer);

  REQUIRE(reloaded.size() == space.size());
  REQUIRE(reloaded.dim() == space.dim());
  CHECK(reloaded.tokens() == space.tokens());
  CHECK((reloaded.matrix() - space.matrix()).cwiseAbs().maxCoeff() <= 1e-6);

  // Serialization itself is deterministic.
  std::ostringstream again;
  save_embeddings(space, again);
  CHECK(again.str() == buffer.str().substr(0, again.str().size()));
}

TEST_CASE("lookup returns stored rows and signals OOV") {
  std::istringstream in("2 3\ncat 1 0 0\ndog 0 1 0\n");
  const EmbeddingSpace space = load_embeddings(in);

  const auto cat = space.lookup("cat");
  REQUIRE(cat.has_value());
  CHECK((*cat - fixtures::vec({1, 0, 0})).norm() == 0.0);
  CHECK_FALSE(space.lookup("zzz").has_value());

  // token i <-> row i for every index
  for (Eigen::Index i = 0; i < space.size(); ++i) {
    const auto via_token = space.lookup(space.tokens()[i]);
    REQUIRE(via_token.has_value());
    CHECK((*via_token - space.vector_at(i)).norm() == 0.0);
    CHECK(space.index_of(space.tokens()[i]) == i);
  }
}

TEST_CASE("constructor enforces the space invariants") {
  CHECK_THROWS_AS(EmbeddingSpace({"a"}, Eigen::MatrixXd(2, 2)), Error);
  Eigen::MatrixXd bad(1, 2);
  bad << 1.0, std::numeric_limits<double>::quiet_NaN();
  CHECK_THROWS_AS(EmbeddingSpace({"a"}, bad), Error);
  CHECK_THROWS_AS(EmbeddingSpace({"a", "a"}, Eigen::MatrixXd::Zero(2, 2)), Error);
}

TEST_CASE("synthetic_space is a pure function of its arguments") {
  const std::vector<std::string> vocab{"a", "b", "c"};
  const EmbeddingSpace s1 = synthetic_space(7, vocab, 5, {{"a", 3}});
  const EmbeddingSpace s2 = synthetic_space(7, vocab, 5, {{"a", 3}});
  CHECK((s1.matrix().array() == s2.matrix().array()).all()); // bit-identical
  CHECK(s1.frequency("a") == 3);
  CHECK(s1.frequency("b") == 0);

  const EmbeddingSpace s3 = synthetic_space(8, vocab, 5);
  CHECK_FALSE((s1.matrix().array() == s3.matrix().array()).all());

  SUBCASE("degenerate 1x1 space") {
    const EmbeddingSpace tiny = synthetic_space(1, {"a"}, 1);
    CHECK(tiny.size() == 1);
    CHECK(tiny.dim() == 1);
  }
  SUBCASE("duplicate vocabulary rejected") {
    CHECK_THROWS_AS(synthetic_space(1, {"a", "a"}, 2), Error);
  }
  SUBCASE("empty vocabulary rejected") {
    CHECK_THROWS_AS(synthetic_space(1, {}, 2), Error);
  }
}

TEST_CASE("frequency sidecar parsing") {
  std::istringstream in("cat\t12\nstreet_level\t4\n");
  const auto counts = load_frequency_sidecar(in);
  CHECK(counts.at("cat") == 12);
  CHECK(counts.at("street_level") == 4);

  std::istringstream bad("cat twelve\n");
  CHECK_THROWS_AS(load_frequency_sidecar(bad), ParseError);
  std::istringstream negative("cat\t-3\n");
  CHECK_THROWS_AS(load_frequency_sidecar(negative), ParseError);
}

TEST_CASE("NounCompound validates its constituents") {
  const NounCompound nc("baby", "oil", 17);
  CHECK(nc.surface() == "baby_oil");
  CHECK(nc.frequency == 17);

  CHECK_THROWS_AS(NounCompound("", "oil"), Error);
  CHECK_THROWS_AS(NounCompound("baby oil", "x"), Error);
  CHECK_THROWS_AS(NounCompound("baby_oil", "x"), Error);

  CHECK(compound_from_surface("baby_oil")->w1 == "baby");
  CHECK(compound_from_surface("baby_oil")->w2 == "oil");
  CHECK_FALSE(compound_from_surface("plain").has_value());
  CHECK_FALSE(compound_from_surface("a_b_c").has_value());
}

TEST_CASE("compounds file parses optional frequency column") {
  std::istringstream in("baby\toil\t42\nstreet\tlevel\n");
  const auto compounds = parse_compounds(in);
  REQUIRE(compounds.size() == 2);
  CHECK(compounds[0].surface() == "baby_oil");
  CHECK(compounds[0].frequency == 42);
  CHECK(compounds[1].frequency == 0);

  std::istringstream bad("only-one-field\n");
  CHECK_THROWS_AS(parse_compounds(bad), ParseError);
}

TEST_CASE("save/load identity holds across randomized spaces") {
  for (const std::uint64_t seed : {1ull, 2ull, 3ull, 4ull, 5ull}) {
    ncemb::Rng rng(seed);
    const auto dim = static_cast<Eigen::Index>(1 + rng.index(12));
    const std::size_t count = 1 + rng.index(40);
    std::vector<std::string> vocab;
    for (std::size_t i = 0; i < count; ++i) vocab.push_back("t" + std::to_string(i));
    const EmbeddingSpace space = synthetic_space(seed, vocab, dim);

    std::stringstream buffer;
    save_embeddings(space, buffer);
    const EmbeddingSpace reloaded = load_embeddings(buffer);
    CHECK(reloaded.tokens() == space.tokens());
    CHECK((reloaded.matrix() - space.matrix()).cwiseAbs().maxCoeff() <= 1e-6);
  }
}
