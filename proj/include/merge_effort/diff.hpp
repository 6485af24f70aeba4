#pragma once

#include <algorithm>
#include <cstddef>
#include <map>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "merge_effort/action.hpp"
#include "merge_effort/tree.hpp"

namespace merge_effort {

// Splits on LF only.  A trailing fragment without a final newline still
// counts as a line; CR bytes are kept as part of the line.
inline std::vector<std::string_view> split_lines(std::string_view text) {
    std::vector<std::string_view> lines;
    std::size_t pos = 0;
    while (pos < text.size()) {
        std::size_t nl = text.find('\n', pos);
        if (nl == std::string_view::npos) {
            lines.push_back(text.substr(pos));
            break;
        }
        lines.push_back(text.substr(pos, nl - pos));
        pos = nl + 1;
    }
    return lines;
}

// Same heuristic git uses: a NUL byte anywhere in the first 8000 bytes.
inline bool is_binary(std::string_view content) {
    return content.substr(0, std::min<std::size_t>(content.size(), 8000))
               .find('\0') != std::string_view::npos;
}

namespace detail {

// Myers O(ND) shortest-edit-script diff, linear-space divide-and-conquer
// variant.  Works over interned line ids; emits delete/insert callbacks in
// document order.  The edit script is minimal and, because the search order
// is fixed, fully deterministic.
class MyersDiff {
public:
    MyersDiff(const std::vector<int>& a, const std::vector<int>& b) : a_(a), b_(b) {}

    template <typename RemoveFn, typename InsertFn>
    void run(RemoveFn on_remove, InsertFn on_insert) const {
        recurse(0, a_.size(), 0, b_.size(), on_remove, on_insert);
    }

private:
    const std::vector<int>& a_;
    const std::vector<int>& b_;

    static std::size_t idx(long k, long z) {
        return static_cast<std::size_t>(((k % z) + z) % z);
    }

    template <typename RemoveFn, typename InsertFn>
    void recurse(std::size_t a0, std::size_t a1, std::size_t b0, std::size_t b1,
                 RemoveFn& on_remove, InsertFn& on_insert) const {
        while (a0 < a1 && b0 < b1 && a_[a0] == b_[b0]) { ++a0; ++b0; }
        while (a1 > a0 && b1 > b0 && a_[a1 - 1] == b_[b1 - 1]) { --a1; --b1; }

        const long n = static_cast<long>(a1 - a0);
        const long m = static_cast<long>(b1 - b0);
        if (n == 0) {
            for (std::size_t j = b0; j < b1; ++j) on_insert(j);
            return;
        }
        if (m == 0) {
            for (std::size_t i = a0; i < a1; ++i) on_remove(i);
            return;
        }

        // Find the middle snake: run the forward and backward searches in
        // lockstep until the frontiers overlap, then split around it.
        const long L = n + m;
        const long Z = 2 * std::min(n, m) + 2;
        const long w = n - m;
        std::vector<long> vf(static_cast<std::size_t>(Z), 0);
        std::vector<long> vb(static_cast<std::size_t>(Z), 0);
        for (long h = 0; h <= L / 2 + (L % 2 != 0 ? 1 : 0); ++h) {
            for (int r = 0; r < 2; ++r) {
                std::vector<long>& c = (r == 0) ? vf : vb;
                std::vector<long>& d = (r == 0) ? vb : vf;
                const long o = (r == 0) ? 1 : 0;
                for (long k = -(h - 2 * std::max(0L, h - m));
                     k <= h - 2 * std::max(0L, h - n); k += 2) {
                    long x = (k == -h || (k != h && c[idx(k - 1, Z)] < c[idx(k + 1, Z)]))
                                 ? c[idx(k + 1, Z)]
                                 : c[idx(k - 1, Z)] + 1;
                    long y = x - k;
                    const long sx = x;
                    const long sy = y;
                    if (o == 1) {
                        while (x < n && y < m &&
                               a_[a0 + static_cast<std::size_t>(x)] ==
                                   b_[b0 + static_cast<std::size_t>(y)]) { ++x; ++y; }
                    } else {
                        while (x < n && y < m &&
                               a_[a0 + static_cast<std::size_t>(n - 1 - x)] ==
                                   b_[b0 + static_cast<std::size_t>(m - 1 - y)]) { ++x; ++y; }
                    }
                    c[idx(k, Z)] = x;
                    const long z = -(k - w);
                    if (L % 2 == o && z >= -(h - o) && z <= h - o &&
                        c[idx(k, Z)] + d[idx(z, Z)] >= n) {
                        long D, px, py, pu, pv;
                        if (o == 1) {
                            D = 2 * h - 1; px = sx; py = sy; pu = x; pv = y;
                        } else {
                            D = 2 * h; px = n - x; py = m - y; pu = n - sx; pv = m - sy;
                        }
                        if (D > 1 || (px != pu && py != pv)) {
                            recurse(a0, a0 + static_cast<std::size_t>(px),
                                    b0, b0 + static_cast<std::size_t>(py),
                                    on_remove, on_insert);
                            recurse(a0 + static_cast<std::size_t>(pu), a1,
                                    b0 + static_cast<std::size_t>(pv), b1,
                                    on_remove, on_insert);
                        } else if (m > n) {
                            for (std::size_t j = b0 + static_cast<std::size_t>(n); j < b1; ++j)
                                on_insert(j);
                        } else if (m < n) {
                            for (std::size_t i = a0 + static_cast<std::size_t>(m); i < a1; ++i)
                                on_remove(i);
                        }
                        return;
                    }
                }
            }
        }
        throw std::logic_error("diff: frontier search failed to meet");
    }
};

inline std::vector<int> intern_lines(const std::vector<std::string_view>& lines,
                                     std::map<std::string_view, int>& table) {
    std::vector<int> ids;
    ids.reserve(lines.size());
    for (std::string_view line : lines) {
        auto [it, inserted] = table.try_emplace(line, static_cast<int>(table.size()));
        ids.push_back(it->second);
    }
    return ids;
}

}  // namespace detail

// A path we looked at but could not turn into line actions.
struct Warning {
    enum class Reason { binary_skipped, submodule_skipped };

    std::string path;
    Reason reason = Reason::binary_skipped;

    friend auto operator<=>(const Warning&, const Warning&) = default;
};

inline const char* to_string(Warning::Reason reason) {
    switch (reason) {
        case Warning::Reason::binary_skipped: return "binary-skipped";
        case Warning::Reason::submodule_skipped: return "submodule-skipped";
    }
    return "unknown";
}

struct DiffReport {
    ActionMultiset actions;
    std::vector<Warning> warnings;  // sorted, unique
};

// Minimal line edit script between two blobs, emitted as add/remove actions
// attributed to `path`.
inline void diff_content(const std::string& path, std::string_view old_text,
                         std::string_view new_text, ActionIdentity identity,
                         ActionMultiset& out) {
    const std::vector<std::string_view> old_lines = split_lines(old_text);
    const std::vector<std::string_view> new_lines = split_lines(new_text);
    std::map<std::string_view, int> table;
    const std::vector<int> a = detail::intern_lines(old_lines, table);
    const std::vector<int> b = detail::intern_lines(new_lines, table);
    detail::MyersDiff engine(a, b);
    engine.run(
        [&](std::size_t i) {
            out.insert(make_action(Action::Kind::remove, path,
                                   std::string(old_lines[i]), identity));
        },
        [&](std::size_t j) {
            out.insert(make_action(Action::Kind::add, path,
                                   std::string(new_lines[j]), identity));
        });
}

namespace detail {

inline void diff_path(const std::string& path, const TreeEntry* old_entry,
                      const TreeEntry* new_entry, ActionIdentity identity,
                      DiffReport& report) {
    auto is_submodule = [](const TreeEntry* e) {
        return e != nullptr && e->kind == TreeEntry::Kind::submodule;
    };
    if (is_submodule(old_entry) || is_submodule(new_entry)) {
        report.warnings.push_back({path, Warning::Reason::submodule_skipped});
        return;
    }
    auto binary_side = [](const TreeEntry* e) {
        return e != nullptr && e->kind == TreeEntry::Kind::regular && is_binary(e->content);
    };
    if (binary_side(old_entry) || binary_side(new_entry)) {
        report.warnings.push_back({path, Warning::Reason::binary_skipped});
        return;
    }
    // Symlinks take part as their one-line target text.
    std::string_view old_text = old_entry ? std::string_view(old_entry->content)
                                          : std::string_view();
    std::string_view new_text = new_entry ? std::string_view(new_entry->content)
                                          : std::string_view();
    diff_content(path, old_text, new_text, identity, report.actions);
}

}  // namespace detail

// Diff of two full snapshots.  Paths are matched by name only: a rename is
// seen as a delete plus an add, which is exactly what the effort metrics
// want to count.
inline DiffReport diff_trees(const TreeSnapshot& base, const TreeSnapshot& target,
                             ActionIdentity identity) {
    DiffReport report;
    auto ib = base.begin();
    auto it = target.begin();
    while (ib != base.end() || it != target.end()) {
        if (it == target.end() || (ib != base.end() && ib->first < it->first)) {
            detail::diff_path(ib->first, &ib->second, nullptr, identity, report);
            ++ib;
        } else if (ib == base.end() || it->first < ib->first) {
            detail::diff_path(it->first, nullptr, &it->second, identity, report);
            ++it;
        } else {
            if (ib->second != it->second)
                detail::diff_path(ib->first, &ib->second, &it->second, identity, report);
            ++ib;
            ++it;
        }
    }
    std::sort(report.warnings.begin(), report.warnings.end());
    report.warnings.erase(std::unique(report.warnings.begin(), report.warnings.end()),
                          report.warnings.end());
    return report;
}

}  // namespace merge_effort
