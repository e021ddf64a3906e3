#include <doctest.h>

#include <set>

#include "disnets/rng.hpp"

using namespace disnets;

TEST_CASE("substreams are deterministic and distinct") {
  CHECK(derive_seed(7, Stream::Agent, 3) == derive_seed(7, Stream::Agent, 3));
  std::set<std::uint64_t> seeds;
  for (std::uint64_t master : {1, 2})
    for (auto s : {Stream::Layout, Stream::Shadowing, Stream::Agent, Stream::RandomK})
      for (std::uint64_t i = 0; i < 50; ++i) seeds.insert(derive_seed(master, s, i));
  CHECK(seeds.size() == 2 * 4 * 50);

  auto a = make_stream(5, Stream::Test, 1);
  auto b = make_stream(5, Stream::Test, 1);
  for (int i = 0; i < 10; ++i) CHECK(a() == b());
}

TEST_CASE("adding a UE leaves the other UEs' streams untouched") {
  // Streams are keyed by index only, not by the population size.
  auto before = make_stream(11, Stream::TrafficArrivals, 4);
  auto after = make_stream(11, Stream::TrafficArrivals, 4);
  CHECK(before() == after());
}
