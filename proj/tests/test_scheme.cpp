#include <doctest.h>

#include <cmath>

#include "oracles.hpp"
#include "wpir/rng.hpp"
#include "wpir/scheme.hpp"
#include "wpir/tsc.hpp"
#include "wpir/verify.hpp"

using namespace wpir;

namespace {

constexpr Symbol a1 = 0x01, a2 = 0x02, b1 = 0x10, b2 = 0x20;

std::vector<Answer> all_answers(const WpirScheme& s, int k, const RandomKey& key, const MessageStore& store) {
  std::vector<Answer> out;
  for (int n = 1; n <= s.params().num_servers(); ++n) out.push_back(wpir_answer(s, wpir_query(s, k, key, n), store));
  return out;
}

WpirScheme mixed_scheme(const SystemParams& p, double direct_share) {
  PatternDistribution dist = uniform_tsc_distribution(p);
  dist.p_weights *= 1 - direct_share;
  dist.p_direct = direct_share / p.num_servers();
  return WpirScheme(p, dist);
}

}  // namespace

TEST_CASE("wpir_query routes direct keys to one server") {
  const SystemParams p(3, 2);
  const auto scheme = mixed_scheme(p, 0.5);
  CHECK(wpir_query(scheme, 1, DirectKey{2}, 2) == Query{DirectRequest{1}});
  CHECK(std::get<QueryVector>(wpir_query(scheme, 1, DirectKey{2}, 3)).is_zero());
  CHECK(std::get<QueryVector>(wpir_query(scheme, 1, DirectKey{2}, 1)).is_zero());
  const TscKey t{{2}, 1};
  for (int n = 1; n <= 3; ++n) CHECK(std::get<QueryVector>(wpir_query(scheme, 2, t, n)) == tsc_query(p, 2, t, n));
}

TEST_CASE("wpir_answer returns the whole message for #_k") {
  const SystemParams p(3, 2);
  const auto scheme = mixed_scheme(p, 0.5);
  const MessageStore store(p, {{a1, a2}, {b1, b2}});
  CHECK(wpir_answer(scheme, DirectRequest{1}, store) == Answer{a1, a2});
  CHECK(wpir_answer(scheme, QueryVector{{0, 0}}, store).empty());
  CHECK(wpir_answer(scheme, QueryVector{{1, 2}}, store) == Answer{Symbol(a1 ^ b2)});
}

TEST_CASE("wpir_decode handles direct and TSC rows") {
  const SystemParams p(3, 2);
  const auto scheme = mixed_scheme(p, 0.5);
  const MessageStore store(p, {{a1, a2}, {b1, b2}});

  const auto direct = all_answers(scheme, 2, DirectKey{3}, store);
  CHECK(direct[0].empty());
  CHECK(direct[1].empty());
  CHECK(direct[2] == Answer{b1, b2});
  CHECK(wpir_decode(scheme, 2, DirectKey{3}, direct) == Message{b1, b2});

  const TscKey t{{1}, 2};
  CHECK(wpir_decode(scheme, 2, t, all_answers(scheme, 2, t, store)) == Message{b1, b2});

  auto broken = direct;
  broken[0] = {0x11};
  CHECK_THROWS_AS(wpir_decode(scheme, 2, DirectKey{3}, broken), MalformedAnswers);
  broken = direct;
  broken[2].pop_back();
  CHECK_THROWS_AS(wpir_decode(scheme, 2, DirectKey{3}, broken), MalformedAnswers);
}

TEST_CASE("wpir_decode recovers every message under every key") {
  for (auto [n, k] : {std::pair{2, 2}, {3, 2}, {3, 3}, {4, 3}, {2, 4}}) {
    const SystemParams p(n, k);
    const auto scheme = mixed_scheme(p, 0.3);
    for (std::uint64_t fill = 0; fill < 3; ++fill) {
      const auto store = MessageStore::random(p, fill);
      for_each_key(p, [&](const RandomKey& key) {
        for (int m = 1; m <= k; ++m) REQUIRE(wpir_decode(scheme, m, key, all_answers(scheme, m, key, store)) == store.message(m));
      });
    }
  }
}

TEST_CASE("download cost examples") {
  const SystemParams p(3, 2);
  CHECK(download_cost(WpirScheme(p, direct_only_distribution(p))).cost == 1.0);
  const auto uniform = download_cost(WpirScheme(p, uniform_tsc_distribution(p)));
  CHECK(uniform.cost == doctest::Approx(4.0 / 3).epsilon(1e-14));
  CHECK(uniform.direct_probability == doctest::Approx(1.0 / 3).epsilon(1e-14));
}

TEST_CASE("closed-form download cost matches enumeration for every k") {
  Rng rng = make_stream(31, 0);
  for (auto [n, k] : {std::pair{2, 2}, {3, 2}, {3, 3}, {4, 3}, {2, 5}, {5, 2}}) {
    const SystemParams p(n, k);
    for (int trial = 0; trial < 10; ++trial) {
      const WpirScheme scheme(p, trial % 2 ? random_mixed_distribution(p, rng) : random_tsc_distribution(p, rng));
      const double closed = download_cost(scheme).cost;
      const double first = oracle::download_cost(scheme, 1);
      CHECK(std::abs(closed - first) <= 1e-12);
      // Same expected cost whichever message is requested.
      for (int m = 2; m <= k; ++m) CHECK(std::abs(oracle::download_cost(scheme, m) - first) <= 1e-12);
    }
  }
}

TEST_CASE("answer length depends on the query only") {
  const SystemParams p(3, 3);
  const auto scheme = mixed_scheme(p, 0.4);
  const auto s1 = MessageStore::random(p, 1);
  const auto s2 = MessageStore::random(p, 2);
  for_each_key(p, [&](const RandomKey& key) {
    for (int m = 1; m <= 3; ++m) {
      for (int n = 1; n <= 3; ++n) {
        const Query q = wpir_query(scheme, m, key, n);
        const auto len = static_cast<std::size_t>(answer_length(p, q));
        CHECK(wpir_answer(scheme, q, s1).size() == len);
        CHECK(wpir_answer(scheme, q, s2).size() == len);
      }
    }
  });
}

TEST_CASE("without direct mass the scheme behaves exactly like TSC") {
  const SystemParams p(3, 3);
  Rng rng = make_stream(4, 4);
  const WpirScheme scheme(p, random_tsc_distribution(p, rng));
  const auto store = MessageStore::random(p, 77);
  for_each_key(p, [&](const RandomKey& key) {
    const auto* t = std::get_if<TscKey>(&key);
    if (!t) {
      CHECK(key_probability(scheme.distribution(), key) == 0.0);
      return;
    }
    for (int m = 1; m <= 3; ++m) {
      std::vector<Answer> tsc_answers;
      for (int n = 1; n <= 3; ++n) {
        const auto q = tsc_query(p, m, *t, n);
        CHECK(std::get<QueryVector>(wpir_query(scheme, m, key, n)) == q);
        tsc_answers.push_back(tsc_answer(p, q, store));
        CHECK(wpir_answer(scheme, q, store) == tsc_answers.back());
      }
      CHECK(wpir_decode(scheme, m, key, tsc_answers) == tsc_decode(p, m, *t, tsc_answers));
    }
  });
}

TEST_CASE("scheme construction rejects unnormalized distributions") {
  const SystemParams p(3, 2);
  CHECK_THROWS_AS(WpirScheme(p, PatternDistribution{0.2, Eigen::Vector2d(0.1, 0.1)}), std::invalid_argument);
}
