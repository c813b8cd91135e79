#include <doctest.h>

#include <atomic>
#include <cmath>
#include <random>
#include <set>
#include <vector>

#include "tsmc/core/error.hpp"
#include "tsmc/core/parallel.hpp"
#include "tsmc/core/rng.hpp"

using namespace tsmc;

TEST_CASE("identical keys give identical streams") {
  Rng a(RngKey{7, 3, 11, 2});
  Rng b(RngKey{7, 3, 11, 2});
  for (int i = 0; i < 100; ++i) CHECK(a() == b());
}

TEST_CASE("every key coordinate separates streams") {
  const RngKey base{7, 3, 11, 2};
  std::set<std::uint64_t> first;
  for (RngKey k : {base, RngKey{8, 3, 11, 2}, RngKey{7, 4, 11, 2}, RngKey{7, 3, 12, 2}, RngKey{7, 3, 11, 3},
                   base.child(1), base.child(2)}) {
    first.insert(Rng(k)());
  }
  CHECK(first.size() == 7);
  CHECK(base.child(5) == base.child(5));
}

TEST_CASE("open uniform never hits the endpoints") {
  CHECK(bits_to_open_uniform(0) > 0.0);
  CHECK(bits_to_open_uniform(~0ULL) < 1.0);
  Rng r(1);
  double s = 0.0;
  const int n = 200000;
  for (int i = 0; i < n; ++i) {
    const double u = r.uniform();
    REQUIRE(u > 0.0);
    REQUIRE(u < 1.0);
    s += u;
  }
  CHECK(std::abs(s / n - 0.5) < 3.0 * std::sqrt(1.0 / 12.0 / n) + 1e-12);
}

TEST_CASE("normal draws have unit moments") {
  Rng r(2);
  const int n = 200000;
  double s1 = 0.0, s2 = 0.0;
  for (int i = 0; i < n; ++i) {
    const double z = r.normal();
    s1 += z;
    s2 += z * z;
  }
  CHECK(std::abs(s1 / n) < 4.0 / std::sqrt(n));
  CHECK(std::abs(s2 / n - 1.0) < 4.0 * std::sqrt(2.0 / n));

  std::vector<double> buf(100001);
  Rng q(3);
  q.fill_normal(buf);
  double m = 0.0, v = 0.0;
  for (double z : buf) m += z;
  m /= static_cast<double>(buf.size());
  for (double z : buf) v += (z - m) * (z - m);
  v /= static_cast<double>(buf.size());
  CHECK(std::abs(m) < 4.0 / std::sqrt(buf.size()));
  CHECK(std::abs(v - 1.0) < 4.0 * std::sqrt(2.0 / buf.size()));
}

TEST_CASE("Rng drives standard distributions") {
  Rng r(4);
  std::uniform_int_distribution<int> die(1, 6);
  int counts[7] = {};
  for (int i = 0; i < 60000; ++i) ++counts[die(r)];
  for (int k = 1; k <= 6; ++k) CHECK(std::abs(counts[k] - 10000) < 4 * std::sqrt(60000.0 * (1.0 / 6) * (5.0 / 6)));
}

TEST_CASE("parallel_for visits every index once for any worker count") {
  for (std::size_t w : {1u, 2u, 3u, 8u}) {
    set_thread_count(w);
    CHECK(thread_count() == w);
    std::vector<int> hits(1001, 0);
    parallel_for(hits.size(), [&](std::size_t i) { hits[i] += 1; });
    for (int h : hits) REQUIRE(h == 1);
  }
  set_thread_count(0);
}

TEST_CASE("parallel_for rethrows a worker exception") {
  set_thread_count(4);
  std::atomic<int> done{0};
  CHECK_THROWS_AS(parallel_for(100,
                               [&](std::size_t i) {
                                 if (i == 77) fail(ErrorKind::NonFiniteWeight, "boom");
                                 ++done;
                               }),
                  Error);
  set_thread_count(0);
}

TEST_CASE("errors carry their kind") {
  try {
    fail(ErrorKind::BracketFailure, "no root");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::BracketFailure);
    CHECK(std::string(e.what()) == "no root");
    CHECK(to_string(e.kind()) == "BracketFailure");
  }
}
