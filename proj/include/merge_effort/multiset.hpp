#pragma once

#include <cstdint>
#include <initializer_list>
#include <map>
#include <stdexcept>

namespace merge_effort {

// Multiset (bag) over an ordered element type. Entries hold strictly
// positive multiplicities; iteration follows element order, so any
// serialization of a multiset is stable across runs and platforms.
template <typename E>
class Multiset {
public:
    using count_type = std::uint64_t;
    using storage_type = std::map<E, count_type>;
    using const_iterator = typename storage_type::const_iterator;

    Multiset() = default;

    Multiset(std::initializer_list<E> elems) {
        for (const E& e : elems) insert(e);
    }

    void insert(const E& elem, count_type n = 1) {
        if (n == 0)
            throw std::invalid_argument("Multiset::insert: count must be >= 1");
        entries_[elem] += n;
        total_ += n;
    }

    count_type count(const E& elem) const {
        auto it = entries_.find(elem);
        return it == entries_.end() ? 0 : it->second;
    }

    count_type cardinality() const { return total_; }
    bool empty() const { return entries_.empty(); }
    std::size_t distinct_count() const { return entries_.size(); }

    const_iterator begin() const { return entries_.begin(); }
    const_iterator end() const { return entries_.end(); }

    bool operator==(const Multiset& other) const { return entries_ == other.entries_; }

    // Multiplicity of each element is the sum of the two inputs.
    friend Multiset sum(const Multiset& a, const Multiset& b) {
        Multiset out = a;
        for (const auto& [elem, n] : b.entries_) {
            out.entries_[elem] += n;
            out.total_ += n;
        }
        return out;
    }

    // Multiplicity of each element is the max of the two inputs.
    friend Multiset union_of(const Multiset& a, const Multiset& b) {
        Multiset out = a;
        for (const auto& [elem, n] : b.entries_) {
            count_type& cur = out.entries_[elem];
            if (n > cur) {
                out.total_ += n - cur;
                cur = n;
            }
        }
        return out;
    }

    // Multiplicity of each element is the min of the two inputs.
    friend Multiset intersection(const Multiset& a, const Multiset& b) {
        Multiset out;
        auto ia = a.entries_.begin();
        auto ib = b.entries_.begin();
        while (ia != a.entries_.end() && ib != b.entries_.end()) {
            if (ia->first < ib->first) {
                ++ia;
            } else if (ib->first < ia->first) {
                ++ib;
            } else {
                count_type n = ia->second < ib->second ? ia->second : ib->second;
                out.entries_.emplace_hint(out.entries_.end(), ia->first, n);
                out.total_ += n;
                ++ia;
                ++ib;
            }
        }
        return out;
    }

    // Saturating per-element subtraction: max(0, count_a - count_b).
    friend Multiset difference(const Multiset& a, const Multiset& b) {
        Multiset out;
        for (const auto& [elem, n] : a.entries_) {
            count_type sub = b.count(elem);
            if (n > sub) {
                out.entries_.emplace_hint(out.entries_.end(), elem, n - sub);
                out.total_ += n - sub;
            }
        }
        return out;
    }

private:
    storage_type entries_;
    count_type total_ = 0;
};

template <typename E>
typename Multiset<E>::count_type cardinality(const Multiset<E>& ms) {
    return ms.cardinality();
}

}  // namespace merge_effort
