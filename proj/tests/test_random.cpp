// SPDX-License-Identifier: Apache-2.0

#include "cdmagame/random.hpp"

#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <set>

using namespace cdmagame;
using Catch::Matchers::WithinAbs;

TEST_CASE("streams are reproducible") {
    RandomStream a(123), b(123), c(124);
    for (int i = 0; i < 100; ++i) {
        const auto x = a.next_u64();
        CHECK(x == b.next_u64());
        CHECK(x != c.next_u64());
    }
}

TEST_CASE("substreams depend only on the parent key and id") {
    RandomStream parent(9);
    const auto s1 = parent.substream(4);
    parent.next_u64(); // advancing the parent does not move its children
    auto s2 = parent.substream(4);
    auto s1c = s1;
    CHECK(s1c.next_u64() == s2.next_u64());

    std::set<std::uint64_t> firsts;
    for (std::uint64_t id = 0; id < 1000; ++id)
        firsts.insert(parent.substream(id).next_u64());
    CHECK(firsts.size() == 1000);
}

TEST_CASE("uniform and normal moments") {
    RandomStream rng(5);
    const int n = 200000;
    double su = 0, sn = 0, sn2 = 0, sc2 = 0;
    double umin = 1, umax = 0;
    for (int i = 0; i < n; ++i) {
        const double u = rng.uniform();
        umin = std::min(umin, u);
        umax = std::max(umax, u);
        su += u;
        const double z = rng.normal();
        sn += z;
        sn2 += z * z;
        sc2 += std::norm(rng.complex_normal(2.5));
    }
    CHECK(umin > 0.0);
    CHECK(umax < 1.0);
    CHECK_THAT(su / n, WithinAbs(0.5, 5e-3));
    CHECK_THAT(sn / n, WithinAbs(0.0, 1e-2));
    CHECK_THAT(sn2 / n, WithinAbs(1.0, 1e-2));
    CHECK_THAT(sc2 / n, WithinAbs(2.5, 3e-2));
}

TEST_CASE("bounded integers") {
    RandomStream rng(77);
    int counts[6] = {};
    for (int i = 0; i < 60000; ++i) {
        const auto v = rng.below(6);
        REQUIRE(v < 6);
        ++counts[v];
    }
    for (int c : counts)
        CHECK(std::abs(c - 10000) < 500);
}
