#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <vector>

#include "psums/errors.hpp"
#include "psums/layered_fenwick.hpp"
#include "psums/oracle.hpp"
#include "psums/sampled_fenwick.hpp"

using namespace psums;

using values = std::vector<std::uint64_t>;

namespace {

values base_values(const sampled_fenwick& s) {
  values v;
  for (std::uint64_t i = 1; i <= s.base().size(); ++i) v.push_back(s.base().get(i));
  return v;
}

values group_totals(const sampled_fenwick& s) {
  values v;
  for (std::uint64_t g = 1; g <= s.groups(); ++g) v.push_back(s.tree().access(g));
  return v;
}

}  // namespace

TEST_CASE("build") {
  const sampled_fenwick s({3, 1, 4, 1, 5, 9, 2, 6}, 8, 2, 2);
  CHECK(group_totals(s) == values{4, 5, 14, 8});
  CHECK(base_values(s) == values{3, 4, 5, 2});
  CHECK(s.sum(5) == 14);
  CHECK(s.sum(4) == s.tree().sum(2));

  const sampled_fenwick one({3, 1, 4, 1, 5}, 8, 2, 1);
  CHECK(one.base().size() == 0);
  CHECK(group_totals(one) == values{3, 1, 4, 1, 5});

  const sampled_fenwick whole({3, 1, 4, 1, 5}, 8, 2, 5);
  CHECK(base_values(whole) == values{3, 1, 4, 1});
  CHECK(group_totals(whole) == values{14});

  // d does not divide n: the last, partial group closes at n.
  const sampled_fenwick part({3, 1, 4, 1, 5}, 8, 2, 3);
  CHECK(base_values(part) == values{3, 1, 1});
  CHECK(group_totals(part) == values{8, 6});
}

TEST_CASE("sample rate from epsilon") {
  CHECK(sample_rate_for(19683, 3, 1.0) == 9);
  CHECK(sample_rate_for(19683, 3, 0.5) == 18);
  CHECK(sample_rate_for(1, 2, 1.0) == 1);
  CHECK(sample_rate_for(4, 2, 0.01) == 4);
  CHECK_THROWS_AS(sample_rate_for(10, 2, 0.0), invalid_parameter);
}

TEST_CASE("updates to a group's last element only touch the tree") {
  sampled_fenwick s({3, 1, 4, 1, 5, 9, 2, 6}, 8, 2, 2);
  const values base = base_values(s);
  s.update(6, -4);
  CHECK(base_values(s) == base);
  CHECK(s.access(6) == 5);
  s.update(1, 1);
  CHECK(s.sum(1) == 4);
}

TEST_CASE("search and access") {
  const sampled_fenwick ones(values(64, 1), 1, 2, 4);
  for (std::uint64_t t = 1; t <= 64; ++t) REQUIRE(ones.search(t) == t);
  CHECK(ones.search(65) == 65);

  const sampled_fenwick s({0, 0, 3, 0, 0, 0, 0, 0}, 4, 2, 3);
  CHECK(s.search(1) == 3);
  CHECK(s.search(3) == 3);
  CHECK(s.search(4) == 9);
  for (std::uint64_t i = 1; i <= 8; ++i) CHECK(s.access(i) == (i == 3 ? 3u : 0u));
}

TEST_CASE("errors") {
  sampled_fenwick s({1, 2, 3}, 2, 2, 2);
  CHECK_THROWS_AS(s.sum(4), index_error);
  CHECK_THROWS_AS(s.update(2, 2), value_range_error);
  CHECK_THROWS_AS(s.search(0), invalid_parameter);
  CHECK_THROWS_AS(sampled_fenwick({1, 2}, 2, 2, 3), invalid_parameter);
  CHECK_THROWS_AS(sampled_fenwick({1, 2}, 2, 2, 0), invalid_parameter);
}

TEST_CASE("random traces match the oracle and the plain layered tree") {
  for (std::uint64_t b : {2, 3, 4, 7, 16})
    for (std::uint64_t n : {1, 2, 7, 17, 40, 100, 257})
      for (std::uint64_t d : {std::uint64_t{1}, std::uint64_t{2}, std::uint64_t{3}, std::uint64_t{8}, std::uint64_t{17}, n}) {
        if (d > n) continue;
        const op_trace t = gen_trace(
            {.n = n, .k = 5, .ops = 400, .mix = {1, 1, 1, 1}, .seed = n * 17 + d * 3 + b});
        sampled_fenwick s(t.initial, 5, b, d);
        REQUIRE(differential_run(t, s).ok);
      }

  const op_trace t = gen_trace({.n = 300, .k = 8, .ops = 4000, .mix = {1, 1, 1, 1}, .seed = 8});
  sampled_fenwick s(t.initial, 8, 3, 1);
  layered_fenwick l(t.initial, 8, 3);
  for (const auto& op : t.ops) {
    switch (op.kind) {
      case op_kind::sum: REQUIRE(s.sum(op.arg) == l.sum(op.arg)); break;
      case op_kind::search: REQUIRE(s.search(op.arg) == l.search(op.arg)); break;
      case op_kind::access: REQUIRE(s.access(op.arg) == l.access(op.arg)); break;
      case op_kind::update: s.update(op.arg, op.delta); l.update(op.arg, op.delta); break;
    }
  }
}

TEST_CASE("space") {
  CHECK(sampled_fenwick({7}, 8, 2, 1).space().payload_bits == 8);

  const sampled_fenwick s = sampled_fenwick::with_epsilon(values(19683, 255), 8, 3, 1.0);
  const space_report r = s.space();
  CHECK(s.sample_rate() == 9);
  CHECK(r.payload_bits == s.base().payload_bits() + s.tree().geometry().payload_bits());
  CHECK(r.within_bound());
}
