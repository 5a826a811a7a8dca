#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>
#include <random>
#include <vector>

#include "psums/classic_fenwick.hpp"
#include "psums/errors.hpp"
#include "psums/layered_fenwick.hpp"
#include "psums/oracle.hpp"

using namespace psums;

using values = std::vector<std::uint64_t>;

namespace {

std::vector<values> layers_of(const layered_fenwick& f) {
  std::vector<values> out;
  for (unsigned j = 1; j <= f.geometry().levels(); ++j) {
    values layer;
    for (std::uint64_t o = 1; o <= f.geometry().layer_size(j); ++o) layer.push_back(f.entry(j, o));
    out.push_back(layer);
  }
  return out;
}

// Nineteenth element 3, first eighteen summing to 89.
values figure_instance() {
  values a(17, 5);
  a.insert(a.end(), {4, 3, 7, 1, 8, 2, 8, 1, 8, 2});
  return a;
}

// Every materialized entry whose covered interval contains i, by brute force.
std::vector<level_range> covering(const layered_geometry& g, std::uint64_t i) {
  std::vector<level_range> out;
  for (unsigned j = 1; j <= g.levels(); ++j) {
    std::vector<std::uint64_t> hit;
    for (std::uint64_t o = 1; o <= g.layer_size(j); ++o) {
      const auto [lo, hi] = g.coverage(j, o);
      if (lo <= i && i <= hi) hit.push_back(o);
    }
    if (!hit.empty()) out.push_back({j, hit.front(), hit.back()});
  }
  return out;
}

}  // namespace

TEST_CASE("build") {
  CHECK(layers_of(layered_fenwick({1, 2, 3, 4}, 8, 2)) ==
        std::vector<values>{{10}, {3}, {1, 3}});
  CHECK(layers_of(layered_fenwick({9}, 8, 3)) == std::vector<values>{{9}});

  const layered_geometry g(27, 8, 3);
  std::vector<std::uint64_t> sizes;
  for (unsigned j = 1; j <= g.levels(); ++j) sizes.push_back(g.layer_size(j));
  CHECK(sizes == values{1, 2, 6, 18});
}

TEST_CASE("figure instance") {
  const layered_fenwick f(figure_instance(), 8, 3);
  const layered_geometry& g = f.geometry();
  CHECK(g.digits(19) == std::vector<unsigned>{0, 2, 0, 1});
  CHECK(g.digits(0) == std::vector<unsigned>{0, 0, 0, 0});
  CHECK(g.digits(27) == std::vector<unsigned>{1, 0, 0, 0});
  CHECK(g.sum_offsets(19) == std::vector<level_offset>{{2, 2}, {4, 13}});
  CHECK(g.sum_offsets(1) == std::vector<level_offset>{{4, 1}});
  CHECK(g.sum_offsets(27) == std::vector<level_offset>{{1, 1}});
  CHECK(f.entry(2, 2) == 89);
  CHECK(f.entry(4, 13) == 3);
  CHECK(f.sum(19) == 92);
  CHECK(f.sum(0) == 0);
}

TEST_CASE("update targets") {
  const layered_geometry g(27, 8, 3);
  CHECK(g.update_targets(19) ==
        std::vector<level_range>{{1, 1, 1}, {3, 5, 6}, {4, 13, 14}});
  CHECK(g.update_targets(27) == std::vector<level_range>{{1, 1, 1}});
  CHECK(layered_geometry(2, 8, 2).update_targets(1) ==
        std::vector<level_range>{{1, 1, 1}, {2, 1, 1}});

  for (std::uint64_t b : {2, 3, 4, 7, 16})
    for (std::uint64_t n : {1, 2, 5, 16, 27, 49, 100, 343}) {
      const layered_geometry geom(n, 8, b);
      for (std::uint64_t i = 1; i <= n; ++i) REQUIRE(geom.update_targets(i) == covering(geom, i));
    }
}

TEST_CASE("entries hold the sum of their covered interval") {
  std::mt19937_64 rng(4);
  for (std::uint64_t b : {2, 3, 4, 7, 16})
    for (std::uint64_t n : {1, 6, 27, 50, 200, 729}) {
      values a(n);
      for (auto& x : a) x = rng() % 16;
      const layered_fenwick f(a, 4, b);
      const layered_geometry& g = f.geometry();
      for (unsigned j = 1; j <= g.levels(); ++j)
        for (std::uint64_t o = 1; o <= g.layer_size(j); ++o) {
          const auto [lo, hi] = g.coverage(j, o);
          REQUIRE(hi <= n);
          std::uint64_t s = 0;
          for (std::uint64_t t = lo; t <= hi; ++t) s += a[t - 1];
          REQUIRE(f.entry(j, o) == s);
        }
      for (std::uint64_t i = 0; i <= n; ++i) {
        std::uint64_t s = 0;
        for (std::uint64_t t = 0; t < i; ++t) s += a[t];
        REQUIRE(f.sum(i) == s);
      }
    }
}

TEST_CASE("update, search, access") {
  layered_fenwick f({1, 2, 3, 4}, 8, 2);
  CHECK(f.access(3) == 3);
  const auto before = f.words();
  const values snapshot(before.begin(), before.end());
  f.update(2, 0);
  CHECK(values(f.words().begin(), f.words().end()) == snapshot);
  f.update(3, 2);
  CHECK(f.sum(3) == 8);
  CHECK(f.sum(4) == 12);
  CHECK(f.sum(2) == 3);
  CHECK(f.access(3) == 5);

  layered_fenwick z({0, 5, 0, 2}, 4, 2);
  CHECK(z.search(5) == 2);
  CHECK(z.search(6) == 4);
  CHECK(z.search(8) == 5);

  for (std::uint64_t b : {2, 3, 7})
    for (std::uint64_t n : {1, 10, 49}) {
      const layered_fenwick ones(values(n, 1), 1, b);
      for (std::uint64_t t = 1; t <= n; ++t) REQUIRE(ones.search(t) == t);
    }
}

TEST_CASE("errors") {
  layered_fenwick f({1, 2, 3}, 2, 3);
  CHECK_THROWS_AS(f.sum(4), index_error);
  CHECK_THROWS_AS(f.update(0, 1), index_error);
  CHECK_THROWS_AS(f.update(3, 1), value_range_error);
  CHECK(f.sum(3) == 6);
  CHECK_THROWS_AS(f.search(0), invalid_parameter);
  CHECK_THROWS_AS(layered_fenwick({1}, 8, 1), invalid_parameter);
  CHECK_THROWS_AS(layered_fenwick({}, 8, 2), invalid_parameter);
  CHECK_THROWS_AS(layered_fenwick({1}, 0, 2), invalid_parameter);
}

TEST_CASE("space") {
  CHECK(layered_fenwick({3}, 8, 2).space().payload_bits == 8);

  const layered_geometry g(729, 8, 3);
  std::uint64_t direct = 0;
  for (unsigned j = 1; j <= g.levels(); ++j) {
    // Widest entry of layer j is min((b-1)*span, n) values.
    const std::uint64_t widest = std::min<std::uint64_t>(2 * g.span(j), 729);
    unsigned extra = 0;
    while ((std::uint64_t{1} << extra) < widest) ++extra;
    direct += g.layer_size(j) * (8 + extra);
  }
  const layered_fenwick f(values(729, 200), 8, 3);
  CHECK(f.space().payload_bits == direct);

  for (std::uint64_t b : {2, 3, 4}) {
    std::uint64_t n = 1;
    for (int e = 0; e <= 8; ++e, n *= b) {
      const space_report r = layered_fenwick(values(n, 0), 8, b).space();
      CHECK(r.within_bound());
    }
  }
}

TEST_CASE("random traces match the oracle and the binary tree") {
  for (std::uint64_t b : {2, 3, 4, 7, 16})
    for (unsigned k : {1u, 4u, 8u, 16u})
      for (std::uint64_t n : {1, 2, 3, 15, 64, 100, 243}) {
        const op_trace t = gen_trace(
            {.n = n, .k = k, .ops = 600, .mix = {1, 1, 1, 1}, .seed = n * 131 + b * 7 + k});
        layered_fenwick f(t.initial, k, b);
        REQUIRE(differential_run(t, f).ok);
      }

  const op_trace t = gen_trace({.n = 500, .k = 8, .ops = 5000, .mix = {1, 1, 1, 1}, .seed = 3});
  layered_fenwick l(t.initial, 8, 2);
  classic_fenwick c(t.initial, 8);
  for (const auto& op : t.ops) {
    switch (op.kind) {
      case op_kind::sum: REQUIRE(l.sum(op.arg) == c.sum(op.arg)); break;
      case op_kind::search: REQUIRE(l.search(op.arg) == c.search(op.arg)); break;
      case op_kind::access: REQUIRE(l.access(op.arg) == c.access(op.arg)); break;
      case op_kind::update: l.update(op.arg, op.delta); c.update(op.arg, op.delta); break;
    }
  }
}

TEST_CASE("a corrupted entry diverges") {
  const op_trace t = gen_trace({.n = 27, .k = 8, .ops = 200, .mix = {1, 0, 0, 0}, .seed = 1});
  layered_fenwick f(t.initial, 8, 3);
  f.poke(2, 2, f.entry(2, 2) + 1);
  const run_report r = differential_run(t, f);
  REQUIRE_FALSE(r.ok);
  // The first failing op is the first sum whose offsets include (2, 2).
  std::uint64_t first = 0;
  while (first < t.ops.size()) {
    const std::uint64_t i = t.ops[first].arg;
    const auto offs = i == 0 ? std::vector<level_offset>{} : f.geometry().sum_offsets(i);
    if (std::find(offs.begin(), offs.end(), level_offset{2, 2}) != offs.end()) break;
    ++first;
  }
  CHECK(r.first_divergence->index == first);
}
