#include <doctest.h>

#include <algorithm>
#include <cstdio>
#include <random>
#include <set>

#include "phishtgl/htamg.hpp"

using namespace phishtgl;

namespace {

Transaction tx(std::int64_t src, std::int64_t dst, double t, double value = 1.0) {
  Transaction x;
  x.src = src;
  x.dst = dst;
  x.t = t;
  x.value_raw = value;
  x.value_z = value;
  return x;
}

std::vector<Transaction> random_txs(std::size_t n, std::int64_t nodes, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::uniform_int_distribution<std::int64_t> pick(0, nodes - 1);
  std::uniform_real_distribution<double> dt(0.1, 5.0);
  std::vector<Transaction> txs;
  double t = 0;
  for (std::size_t i = 0; i < n; ++i) {
    t += dt(rng);
    txs.push_back(tx(pick(rng), pick(rng), t));
  }
  return txs;
}

std::vector<AccountKind> eoa_kinds(std::int64_t n) {
  return std::vector<AccountKind>(n, AccountKind::kEoa);
}

// Linear-scan reference for recent_neighbors.
NeighborSample scan_neighbors(const Htamg& g, std::int64_t v, double t, std::size_t n,
                              Direction dir) {
  struct Ev {
    double t;
    std::int64_t id;
  };
  std::vector<Ev> evs;
  for (std::int64_t id = 0; id < g.num_edges(); ++id) {
    const auto& e = g.edge(id);
    bool incident = (dir == Direction::kIn && e.dst == v) ||
                    (dir == Direction::kOut && e.src == v) ||
                    (dir == Direction::kBoth && (e.src == v || e.dst == v));
    if (incident && e.t < t) evs.push_back({e.t, id});
  }
  std::sort(evs.begin(), evs.end(), [](const Ev& a, const Ev& b) {
    return a.t != b.t ? a.t < b.t : a.id < b.id;
  });
  if (evs.size() > n) evs.erase(evs.begin(), evs.end() - static_cast<std::ptrdiff_t>(n));
  NeighborSample s;
  for (const auto& ev : evs) {
    const auto& e = g.edge(ev.id);
    s.nodes.push_back(e.src == v ? e.dst : e.src);
    s.edge_ids.push_back(ev.id);
    s.times.push_back(e.t);
  }
  return s;
}

}  // namespace

TEST_CASE("empty build keeps registered isolated nodes") {
  Htamg g = build({}, eoa_kinds(3));
  CHECK(g.num_nodes() == 3);
  CHECK(g.num_edges() == 0);
  CHECK(g.recent_neighbors(2, 100.0, 5, Direction::kBoth).size() == 0);
}

TEST_CASE("parallel edges stay distinct (multigraph)") {
  Htamg g = build({tx(0, 1, 1.0), tx(0, 1, 2.0)}, eoa_kinds(2));
  CHECK(g.num_edges() == 2);
  CHECK(g.out_edges(0).size() == 2);
  CHECK(g.in_edges(1).size() == 2);
  CHECK(g.edge(0).t == 1.0);
  CHECK(g.edge(1).t == 2.0);
}

TEST_CASE("adjacency indexes reconstruct incident edges exactly") {
  auto txs = random_txs(1000, 40, 5);
  Htamg g = build(txs, eoa_kinds(40));
  std::size_t in_total = 0, out_total = 0;
  for (std::int64_t v = 0; v < g.num_nodes(); ++v) {
    std::multiset<std::int64_t> expected_in, expected_out;
    for (std::int64_t id = 0; id < g.num_edges(); ++id) {
      if (g.edge(id).dst == v) expected_in.insert(id);
      if (g.edge(id).src == v) expected_out.insert(id);
    }
    std::multiset<std::int64_t> got_in(g.in_edges(v).begin(), g.in_edges(v).end());
    std::multiset<std::int64_t> got_out(g.out_edges(v).begin(), g.out_edges(v).end());
    CHECK(got_in == expected_in);
    CHECK(got_out == expected_out);
    // time-sorted
    for (std::size_t i = 1; i < g.in_edges(v).size(); ++i)
      CHECK(g.edge(g.in_edges(v)[i - 1]).t <= g.edge(g.in_edges(v)[i]).t);
    in_total += got_in.size();
    out_total += got_out.size();
  }
  CHECK(in_total == static_cast<std::size_t>(g.num_edges()));
  CHECK(out_total == static_cast<std::size_t>(g.num_edges()));
}

TEST_CASE("extend with empty batch is identity") {
  auto txs = random_txs(10, 5, 6);
  Htamg g = build(txs, eoa_kinds(5));
  extend(g, {}, eoa_kinds(5));
  CHECK(g.num_edges() == 10);
  CHECK(g.num_nodes() == 5);
}

TEST_CASE("extend allocates brand-new nodes") {
  Htamg g = build({tx(0, 1, 1.0)}, eoa_kinds(2));
  extend(g, {tx(1, 4, 2.0)}, eoa_kinds(5));
  CHECK(g.num_nodes() == 5);
  CHECK(g.in_edges(4).size() == 1);
}

TEST_CASE("build(a ++ b) equals build(a) then extend(b)") {
  auto txs = random_txs(200, 20, 7);
  for (std::size_t cut : {std::size_t{0}, std::size_t{50}, std::size_t{199}}) {
    std::vector<Transaction> a(txs.begin(), txs.begin() + cut);
    std::vector<Transaction> b(txs.begin() + cut, txs.end());
    Htamg whole = build(txs, eoa_kinds(20));
    Htamg grown = build(a, eoa_kinds(20));
    extend(grown, b, eoa_kinds(20));
    REQUIRE(grown.num_edges() == whole.num_edges());
    for (std::int64_t id = 0; id < whole.num_edges(); ++id) {
      CHECK(grown.edge(id).src == whole.edge(id).src);
      CHECK(grown.edge(id).dst == whole.edge(id).dst);
      CHECK(grown.edge(id).t == whole.edge(id).t);
    }
    for (std::int64_t v = 0; v < 20; ++v) {
      CHECK(grown.in_edges(v) == whole.in_edges(v));
      CHECK(grown.out_edges(v) == whole.out_edges(v));
    }
  }
}

TEST_CASE("extend rejects time regression") {
  Htamg g = build({tx(0, 1, 5.0)}, eoa_kinds(2));
  CHECK_THROWS_AS(extend(g, {tx(0, 1, 4.0)}, eoa_kinds(2)), TimeRegression);
}

TEST_CASE("recent_neighbors uses strict time cutoff") {
  Htamg g = build({tx(0, 1, 1.0), tx(0, 1, 2.0), tx(0, 1, 3.0)}, eoa_kinds(2));
  auto s = g.recent_neighbors(0, 3.0, 2, Direction::kOut);
  REQUIRE(s.size() == 2);
  CHECK(s.times[0] == 1.0);
  CHECK(s.times[1] == 2.0);
}

TEST_CASE("node with no history gives empty sample") {
  Htamg g = build({tx(0, 1, 1.0)}, eoa_kinds(3));
  CHECK(g.recent_neighbors(2, 10.0, 4, Direction::kBoth).size() == 0);
}

TEST_CASE("recent_neighbors matches linear scan on random graphs") {
  auto txs = random_txs(300, 15, 9);
  Htamg g = build(txs, eoa_kinds(15));
  std::mt19937_64 rng(10);
  std::uniform_int_distribution<std::int64_t> pick(0, 14);
  std::uniform_real_distribution<double> when(0.0, g.max_time() + 10.0);
  std::uniform_int_distribution<std::size_t> count(1, 8);
  for (int it = 0; it < 200; ++it) {
    std::int64_t v = pick(rng);
    double t = when(rng);
    std::size_t n = count(rng);
    for (Direction dir : {Direction::kIn, Direction::kOut, Direction::kBoth}) {
      auto fast = g.recent_neighbors(v, t, n, dir);
      auto slow = scan_neighbors(g, v, t, n, dir);
      CHECK(fast.edge_ids == slow.edge_ids);
      CHECK(fast.nodes == slow.nodes);
      CHECK(fast.times == slow.times);
    }
  }
}

TEST_CASE("neighbor sets grow monotonically in time") {
  auto txs = random_txs(150, 10, 11);
  Htamg g = build(txs, eoa_kinds(10));
  std::size_t big = 1000;
  for (std::int64_t v = 0; v < 10; ++v) {
    auto early = g.recent_neighbors(v, 10.0, big, Direction::kBoth);
    auto late = g.recent_neighbors(v, 200.0, big, Direction::kBoth);
    std::set<std::int64_t> late_set(late.edge_ids.begin(), late.edge_ids.end());
    for (auto id : early.edge_ids) CHECK(late_set.count(id) == 1);
  }
}

TEST_CASE("out-of-range node is rejected") {
  Htamg g = build({tx(0, 1, 1.0)}, eoa_kinds(2));
  CHECK_THROWS_AS((void)g.recent_neighbors(7, 1.0, 1, Direction::kIn), NodeOutOfRange);
}

TEST_CASE("snapshot save/load round-trips") {
  auto txs = random_txs(60, 8, 13);
  Htamg g = build(txs, eoa_kinds(8));
  std::string path = "/tmp/phishtgl_test_snapshot.bin";
  g.save(path);
  Htamg back = Htamg::load(path);
  REQUIRE(back.num_nodes() == g.num_nodes());
  REQUIRE(back.num_edges() == g.num_edges());
  for (std::int64_t id = 0; id < g.num_edges(); ++id) {
    CHECK(back.edge(id).src == g.edge(id).src);
    CHECK(back.edge(id).t == g.edge(id).t);
    for (std::size_t j = 0; j < kEdgeAttrDim; ++j)
      CHECK(back.edge_attr(id)[j] == g.edge_attr(id)[j]);
  }
  for (std::int64_t v = 0; v < g.num_nodes(); ++v) {
    CHECK(back.in_edges(v) == g.in_edges(v));
    CHECK(back.out_edges(v) == g.out_edges(v));
  }
  std::remove(path.c_str());
  std::remove((path + ".json").c_str());
}
