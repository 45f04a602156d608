#include <doctest.h>

#include <cmath>
#include <numbers>

#include "streamlsh/error.hpp"
#include "streamlsh/random.hpp"
#include "streamlsh/sparse_vector.hpp"
#include "streamlsh/vocabulary.hpp"
#include "support.hpp"

using namespace streamlsh;
using testing::vec;

TEST_CASE("angular similarity of simple pairs") {
  const auto v = vec({{0, 2.0}, {5, 1.0}});
  CHECK(angular_similarity(v, v) == 1.0);
  CHECK(angular_similarity(vec({{0, 1.0}}), vec({{1, 3.0}})) == doctest::Approx(0.5).epsilon(1e-15));
  CHECK(angular_similarity(vec({{0, 1.0}}), vec({{0, 1.0}, {1, 1.0}})) == doctest::Approx(0.75).epsilon(1e-12));
}

TEST_CASE("cosine") {
  // 3*4 + 4*3 = 24 over 5 * 5
  CHECK(cosine(vec({{0, 3}, {1, 4}}), vec({{0, 4}, {1, 3}})) == doctest::Approx(24.0 / 25.0).epsilon(1e-14));
  CHECK(cosine(vec({{0, 1}}), vec({{2, 1}})) == 0.0);
  const auto v = vec({{1, 0.3}, {9, 1e-3}, {40, 7.0}});
  CHECK(cosine(v, v) == 1.0);
}

TEST_CASE("zero-norm vectors are rejected") {
  const SparseVector zero;
  const auto v = vec({{0, 1.0}});
  CHECK_THROWS_AS(angular_similarity(zero, v), DomainError);
  CHECK_THROWS_AS(angular_similarity(v, zero), DomainError);
  CHECK_THROWS_AS(cosine(zero, zero), DomainError);
}

TEST_CASE("construction normalizes entries") {
  const auto v = SparseVector::from_entries({{7, 2.0}, {1, 0.0}, {3, 1.0}});
  REQUIRE(v.nnz() == 2);
  CHECK(v.entries()[0].index == 3);
  CHECK(v.entries()[1].index == 7);
  CHECK(v.norm() == doctest::Approx(std::sqrt(5.0)).epsilon(1e-12));
  CHECK(v.extent() == 8);

  CHECK_THROWS_AS(SparseVector::from_entries({{1, 1.0}, {1, 2.0}}), DomainError);
  CHECK_THROWS_AS(SparseVector::from_entries({{1, -1.0}}), DomainError);
  CHECK_THROWS_AS(SparseVector::from_entries({{1, std::nan("")}}), DomainError);
  CHECK_THROWS_AS(SparseVector::from_entries({{1, INFINITY}}), DomainError);
}

TEST_CASE("similarity properties on random non-negative vectors") {
  Rng rng(2024);
  const auto random_vector = [&] {
    std::vector<SparseVector::Entry> e;
    const auto n = 1 + rng.below(12);
    for (std::uint64_t i = 0; i < n; ++i) e.push_back({static_cast<std::uint32_t>(rng.below(30)), 0.0});
    std::sort(e.begin(), e.end(), [](auto& a, auto& b) { return a.index < b.index; });
    e.erase(std::unique(e.begin(), e.end(), [](auto& a, auto& b) { return a.index == b.index; }), e.end());
    for (auto& x : e) x.weight = 1e-3 + 10.0 * rng.uniform();
    return SparseVector::from_entries(std::move(e));
  };
  for (int i = 0; i < 500; ++i) {
    const auto u = random_vector();
    const auto v = random_vector();
    const double s = angular_similarity(u, v);
    CHECK(s == angular_similarity(v, u));
    CHECK(s >= 0.5);
    CHECK(s <= 1.0);
    double ss = 0.0;
    for (const auto& e : u.entries()) ss += e.weight * e.weight;
    CHECK(std::abs(u.norm() - std::sqrt(ss)) <= 1e-9 * u.norm());
    CHECK((s == 1.0) == (cosine(u, v) == 1.0));
    CHECK(angular_similarity(u, u.scaled(3.5)) == 1.0);
  }
}

TEST_CASE("constructed pairs hit their target similarity") {
  for (double s : {0.5, 0.55, 0.65, 0.75, 0.85, 0.95, 1.0}) {
    const auto [u, v] = testing::pair_at(s);
    CHECK(angular_similarity(u, v) == doctest::Approx(s).epsilon(1e-12));
  }
}

TEST_CASE("tokenize") {
  const auto t = tokenize("Hello, World! 42x hello\tCAFÉ");
  REQUIRE(t.size() == 5);
  CHECK(t[0] == "hello");
  CHECK(t[1] == "world");
  CHECK(t[2] == "42x");
  CHECK(t[3] == "hello");
  CHECK(t[4] == "caf\xc3\x89");
  CHECK(tokenize("  ,;  ").empty());
}

TEST_CASE("vocabulary counts and weights") {
  Vocabulary vocab;
  vocab.add_document(tokenize("common apple apple"));
  vocab.add_document(tokenize("common banana"));
  vocab.add_document(tokenize("common cherry apple"));
  REQUIRE(vocab.document_count() == 3);
  REQUIRE(vocab.size() == 4);
  for (std::uint32_t i = 0; i < vocab.size(); ++i) {
    CHECK(vocab.index_of(vocab.term(i)) == i);
    CHECK(vocab.document_frequency(i) <= vocab.document_count());
  }
  const auto common = *vocab.index_of("common");
  const auto apple = *vocab.index_of("apple");
  CHECK(vocab.document_frequency(common) == 3);
  CHECK(vocab.document_frequency(apple) == 2);

  // a term in every one of N = 3 documents: 1 * (ln(3 / 4) + 1)
  const auto only_common = vocab.vectorize(tokenize("common"));
  REQUIRE(only_common.nnz() == 1);
  CHECK(only_common.entries()[0].weight == doctest::Approx(std::log(3.0 / 4.0) + 1.0).epsilon(1e-14));

  // tf = 4 gives sqrt(4) = 2 times the idf: 2 * (ln(3 / 3) + 1)
  const auto apples = vocab.vectorize(tokenize("apple apple apple apple unknownword"));
  REQUIRE(apples.nnz() == 1);
  CHECK(apples.entries()[0].index == apple);
  CHECK(apples.entries()[0].weight == doctest::Approx(2.0).epsilon(1e-14));

  CHECK_THROWS_AS(vocab.vectorize(tokenize("zzz qqq")), DomainError);
  CHECK_THROWS_AS(vocab.vectorize({}), DomainError);

  const auto a = vocab.vectorize(tokenize("banana common apple"));
  const auto b = vocab.vectorize(tokenize("banana common apple"));
  CHECK(a == b);
  CHECK(angular_similarity(a, b) == 1.0);
}

TEST_CASE("vocabulary restore round trip") {
  const auto built = Vocabulary::build(std::vector<std::vector<std::string>>{{"a", "b"}, {"b", "c"}});
  const Vocabulary restored(built.terms(), built.document_frequencies(), built.document_count());
  const auto tokens = tokenize("a b c c");
  CHECK(built.vectorize(tokens) == restored.vectorize(tokens));
}
