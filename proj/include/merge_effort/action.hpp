#pragma once

#include <compare>
#include <string>

#include "merge_effort/multiset.hpp"

namespace merge_effort {

// One elementary edit: a line added to or removed from a file.  Actions are
// the elements our multisets range over, so they need a total order; (path,
// kind, line) gives removals of a path before its additions, which is also
// the order diffs are conventionally printed in.
struct Action {
    enum class Kind { remove, add };

    Kind kind = Kind::add;
    std::string path;
    std::string line;

    friend std::strong_ordering operator<=>(const Action& a, const Action& b) {
        if (auto c = a.path <=> b.path; c != 0) return c;
        if (auto c = a.kind <=> b.kind; c != 0) return c;
        return a.line <=> b.line;
    }
    friend bool operator==(const Action&, const Action&) = default;
};

using ActionMultiset = Multiset<Action>;

// How two actions are considered "the same" when bags are compared:
//  - path_qualified: same operation, same file, same line text
//  - content_only:   same operation and line text, file ignored
enum class ActionIdentity { path_qualified, content_only };

inline Action make_action(Action::Kind kind, std::string path, std::string line,
                          ActionIdentity identity) {
    if (identity == ActionIdentity::content_only) path.clear();
    return Action{kind, std::move(path), std::move(line)};
}

}  // namespace merge_effort
