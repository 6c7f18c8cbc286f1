#include <doctest.h>

#include "transit/ledger/world_state.hpp"

#include <algorithm>
#include <random>
#include <vector>

using namespace transit;

TEST_SUITE("world_state") {

TEST_CASE("empty state hash is a fixed constant") {
    WorldState a, b;
    CHECK(a.hash() == b.hash());
    CHECK(a.hash().hex() == WorldState().hash().hex());
}

TEST_CASE("hash is independent of insertion order") {
    std::vector<std::pair<std::string, std::string>> kv;
    for (int i = 0; i < 50; ++i) kv.emplace_back("kv/k" + std::to_string(i), std::to_string(i * 7));
    std::mt19937_64 rng(9);
    for (int round = 0; round < 10; ++round) {
        WorldState a, b;
        for (const auto& [k, v] : kv) a.put(k, v, {1, 0});
        auto shuffled = kv;
        std::shuffle(shuffled.begin(), shuffled.end(), rng);
        for (const auto& [k, v] : shuffled) b.put(k, v, {1, 0});
        CHECK(a.hash() == b.hash());
        CHECK(sorted_state_digest(a.entries()) == sorted_state_digest(b.entries()));
    }
}

TEST_CASE("insert then delete restores the prior digest") {
    WorldState s;
    s.put("kv/a", "1", {1, 0});
    s.put("kv/b", "2", {1, 1});
    const auto before = s.hash();
    s.put("kv/c", "3", {2, 0});
    CHECK(s.hash() != before);
    s.erase("kv/c");
    CHECK(s.hash() == before);
}

TEST_CASE("overwrite updates the digest like a fresh insert") {
    WorldState a, b;
    a.put("kv/x", "old", {1, 0});
    a.put("kv/x", "new", {2, 0});
    b.put("kv/x", "new", {2, 0});
    CHECK(a.hash() == b.hash());
}

TEST_CASE("digest covers values and versions") {
    WorldState a, b, c;
    a.put("kv/x", "1", {1, 0});
    b.put("kv/x", "2", {1, 0});
    c.put("kv/x", "1", {1, 1});
    CHECK(a.hash() != b.hash());
    CHECK(a.hash() != c.hash());
}

TEST_CASE("moving a value between keys changes the digest") {
    WorldState a, b;
    a.put("kv/x", "1", {1, 0});
    a.put("kv/y", "2", {1, 0});
    b.put("kv/x", "2", {1, 0});
    b.put("kv/y", "1", {1, 0});
    CHECK(a.hash() != b.hash());
}

TEST_CASE("random put and erase sequences agree with the sorted reference") {
    std::mt19937_64 rng(17);
    for (int round = 0; round < 20; ++round) {
        WorldState s;
        std::map<std::string, VersionedValue> model;
        for (int i = 0; i < 200; ++i) {
            const auto key = "kv/" + std::to_string(rng() % 30);
            if (rng() % 4 == 0) {
                s.erase(key);
                model.erase(key);
            } else {
                VersionedValue v{std::to_string(rng() % 100), {std::uint64_t(i), 0}};
                s.put(key, v.value, v.version);
                model[key] = v;
            }
        }
        WorldState fresh;
        for (const auto& [k, v] : model) fresh.put(k, v.value, v.version);
        CHECK(s.hash() == fresh.hash());
        CHECK(s.size() == model.size());
        CHECK(sorted_state_digest(s.entries()) == sorted_state_digest(fresh.entries()));
    }
}

}
