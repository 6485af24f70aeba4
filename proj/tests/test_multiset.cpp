#include <catch2/catch_amalgamated.hpp>

#include <random>
#include <string>
#include <vector>

#include "merge_effort/multiset.hpp"
#include "support/naive_sets.hpp"

using merge_effort::Multiset;
using test_support::NaiveBag;

namespace {

Multiset<std::string> from_bag(const NaiveBag<std::string>& bag) {
    Multiset<std::string> ms;
    for (const auto& e : bag) ms.insert(e);
    return ms;
}

NaiveBag<std::string> to_bag(const Multiset<std::string>& ms) {
    NaiveBag<std::string> out;
    for (const auto& [elem, n] : ms)
        for (std::uint64_t i = 0; i < n; ++i) out.push_back(elem);
    return out;
}

NaiveBag<std::string> random_bag(std::mt19937& rng) {
    static const std::vector<std::string> alphabet = {"a", "b", "c", "d", "e"};
    std::uniform_int_distribution<int> len(0, 12);
    std::uniform_int_distribution<std::size_t> pick(0, alphabet.size() - 1);
    NaiveBag<std::string> bag;
    int n = len(rng);
    for (int i = 0; i < n; ++i) bag.push_back(alphabet[pick(rng)]);
    return bag;
}

}  // namespace

TEST_CASE("multiset basics: counting and cardinality") {
    Multiset<std::string> ms;
    CHECK(ms.empty());
    CHECK(ms.cardinality() == 0);

    ms.insert("x");
    ms.insert("x");
    ms.insert("y", 3);
    CHECK(ms.count("x") == 2);
    CHECK(ms.count("y") == 3);
    CHECK(ms.count("z") == 0);
    CHECK(ms.cardinality() == 5);
    CHECK(ms.distinct_count() == 2);
    CHECK_FALSE(ms.empty());
}

TEST_CASE("multiset rejects zero-count insertion") {
    Multiset<int> ms;
    CHECK_THROWS_AS(ms.insert(7, 0), std::invalid_argument);
    CHECK(ms.cardinality() == 0);
}

TEST_CASE("multiset iteration is ordered by element") {
    Multiset<std::string> ms{"pear", "apple", "pear", "fig"};
    std::vector<std::string> seen;
    for (const auto& [elem, n] : ms) {
        seen.push_back(elem);
        (void)n;
    }
    CHECK(seen == std::vector<std::string>{"apple", "fig", "pear"});
}

// Worked example with A = {a,a,b,c,c} and B = {a,b,b,c,c}: every operation's
// exact result is pinned.
TEST_CASE("multiset operations on a fixed pair of bags") {
    Multiset<std::string> a{"a", "a", "b", "c", "c"};
    Multiset<std::string> b{"a", "b", "b", "c", "c"};

    SECTION("difference keeps only surplus occurrences") {
        CHECK(difference(a, b) == Multiset<std::string>{"a"});
        CHECK(difference(b, a) == Multiset<std::string>{"b"});
    }
    SECTION("intersection takes the minimum multiplicity") {
        CHECK(intersection(a, b) == Multiset<std::string>{"a", "b", "c", "c"});
        CHECK(intersection(a, b) == intersection(b, a));
    }
    SECTION("union takes the maximum multiplicity") {
        CHECK(union_of(a, b) == Multiset<std::string>{"a", "a", "b", "b", "c", "c"});
        CHECK(union_of(a, b) == union_of(b, a));
    }
    SECTION("sum adds multiplicities") {
        Multiset<std::string> s = sum(a, b);
        CHECK(s.cardinality() == 10);
        CHECK(s.count("a") == 3);
        CHECK(s.count("b") == 3);
        CHECK(s.count("c") == 4);
    }
}

TEST_CASE("multiset operations match a naive sorted-vector model") {
    std::mt19937 rng(20240817);
    for (int round = 0; round < 500; ++round) {
        NaiveBag<std::string> ba = random_bag(rng);
        NaiveBag<std::string> bb = random_bag(rng);
        Multiset<std::string> a = from_bag(ba);
        Multiset<std::string> b = from_bag(bb);

        CAPTURE(round);
        CHECK(to_bag(sum(a, b)) == test_support::naive_sum(ba, bb));
        CHECK(to_bag(union_of(a, b)) == test_support::naive_union(ba, bb));
        CHECK(to_bag(intersection(a, b)) == test_support::naive_intersection(ba, bb));
        CHECK(to_bag(difference(a, b)) == test_support::naive_difference(ba, bb));
    }
}

TEST_CASE("multiset cardinality identities hold on random bags") {
    std::mt19937 rng(404);
    for (int round = 0; round < 500; ++round) {
        Multiset<std::string> a = from_bag(random_bag(rng));
        Multiset<std::string> b = from_bag(random_bag(rng));
        CAPTURE(round);

        // |A + B| = |A| + |B|
        CHECK(sum(a, b).cardinality() == a.cardinality() + b.cardinality());
        // |A \ B| + |A ∩ B| = |A|
        CHECK(difference(a, b).cardinality() + intersection(a, b).cardinality() ==
              a.cardinality());
        // |A ∪ B| + |A ∩ B| = |A| + |B|
        CHECK(union_of(a, b).cardinality() + intersection(a, b).cardinality() ==
              a.cardinality() + b.cardinality());
        // A ∩ B ⊆ A ∪ B elementwise
        for (const auto& [elem, n] : intersection(a, b))
            CHECK(union_of(a, b).count(elem) >= n);
    }
}
