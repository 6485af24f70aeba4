#pragma once

#include <algorithm>
#include <cctype>
#include <charconv>
#include <cstdint>
#include <cstdlib>
#include <filesystem>
#include <map>
#include <mutex>
#include <optional>
#include <queue>
#include <set>
#include <sstream>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "merge_effort/process.hpp"
#include "merge_effort/tree.hpp"

namespace merge_effort {

struct RepoError : std::runtime_error {
    enum class Kind {
        not_a_repository,
        unreachable_remote,
        clone_failed,
        git_failed,
        object_missing,
    };

    RepoError(Kind k, const std::string& msg) : std::runtime_error(msg), kind(k) {}

    Kind kind;
};

// Where a repository lives.  Anything with a URL scheme or an scp-like
// "user@host:path" shape is remote and gets cloned; everything else is
// treated as a path on disk.
struct RepoSource {
    enum class Kind { local_path, remote_url };

    Kind kind = Kind::local_path;
    std::string location;
};

inline RepoSource classify_source(const std::string& spec) {
    if (spec.find("://") != std::string::npos)
        return {RepoSource::Kind::remote_url, spec};
    std::size_t colon = spec.find(':');
    std::size_t slash = spec.find('/');
    std::size_t at = spec.find('@');
    if (colon != std::string::npos && (slash == std::string::npos || colon < slash) &&
        at != std::string::npos && at < colon)
        return {RepoSource::Kind::remote_url, spec};
    return {RepoSource::Kind::local_path, spec};
}

enum class CaseStatus { analyzable, skipped };

enum class SkipReason { none, octopus, no_base, unknown_commit, read_error };

inline const char* to_string(SkipReason reason) {
    switch (reason) {
        case SkipReason::none: return "";
        case SkipReason::octopus: return "octopus";
        case SkipReason::no_base: return "no-base";
        case SkipReason::unknown_commit: return "unknown-commit";
        case SkipReason::read_error: return "read-error";
    }
    return "";
}

// One merge commit as selected for analysis.  `parent_ids` keeps the commit's
// own parent order; parent1/parent2 are set only for two-parent merges.  An
// analyzable case always carries a base.
struct MergeCase {
    std::string merge_id;
    std::vector<std::string> parent_ids;
    std::string parent1_id;
    std::string parent2_id;
    std::string base_id;
    CaseStatus status = CaseStatus::skipped;
    SkipReason skip_reason = SkipReason::none;
    std::string detail;
    bool base_ambiguous = false;

    bool is_error() const {
        return skip_reason == SkipReason::unknown_commit ||
               skip_reason == SkipReason::read_error;
    }
};

struct CommitInfo {
    long long commit_time = 0;
    std::vector<std::string> parents;
};

struct BaseResolution {
    std::optional<std::string> base;
    bool ambiguous = false;
};

// Read access to one repository through the git executable.  Remote sources
// are cloned into a scratch directory that lives (at most) as long as the
// handle.  All query methods are safe to call from several threads at once.
class RepoHandle {
public:
    RepoHandle(RepoHandle&& other) noexcept { *this = std::move(other); }
    RepoHandle& operator=(RepoHandle&& other) noexcept {
        if (this != &other) {
            dispose();
            root_ = std::move(other.root_);
            scratch_ = std::move(other.scratch_);
            keep_clone_ = other.keep_clone_;
            graph_loaded_ = other.graph_loaded_;
            commits_ = std::move(other.commits_);
            other.scratch_.clear();
        }
        return *this;
    }
    RepoHandle(const RepoHandle&) = delete;
    RepoHandle& operator=(const RepoHandle&) = delete;
    ~RepoHandle() { dispose(); }

    static RepoHandle open_or_clone(const RepoSource& source, bool keep_clone = false) {
        if (source.kind == RepoSource::Kind::local_path) {
            CommandResult probe = run_command(
                {"git", "-C", source.location, "rev-parse", "--git-dir"});
            if (!probe.ok())
                throw RepoError(RepoError::Kind::not_a_repository,
                                "not a git repository: " + source.location);
            return RepoHandle(source.location, {}, keep_clone);
        }

        CommandResult probe =
            run_command({"git", "ls-remote", "--", source.location, "HEAD"});
        if (!probe.ok())
            throw RepoError(RepoError::Kind::unreachable_remote,
                            "cannot reach remote: " + source.location + "\n" +
                                probe.err);

        std::string scratch =
            (std::filesystem::temp_directory_path() / "merge-effort-XXXXXX").string();
        if (::mkdtemp(scratch.data()) == nullptr)
            throw RepoError(RepoError::Kind::clone_failed,
                            "cannot create scratch directory");
        std::string clone_dir = scratch + "/clone";
        CommandResult clone = run_command(
            {"git", "clone", "--quiet", "--", source.location, clone_dir});
        if (!clone.ok()) {
            std::error_code ec;
            std::filesystem::remove_all(scratch, ec);
            throw RepoError(RepoError::Kind::clone_failed,
                            "clone failed: " + source.location + "\n" + clone.err);
        }
        return RepoHandle(clone_dir, scratch, keep_clone);
    }

    const std::string& root() const { return root_; }
    bool owns_clone() const { return !scratch_.empty(); }

    std::uint64_t total_commits() const {
        load_graph();
        return commits_.size();
    }

    const std::map<std::string, CommitInfo>& commit_graph() const {
        load_graph();
        return commits_;
    }

    // All merge commits (two or more parents) in a deterministic order:
    // parents always precede children and ties break toward the smaller
    // hash.  With `restrict_to`, only the named commits are returned (in the
    // same global order); ids that match nothing analyzable become trailing
    // unknown-commit entries, and named commits that are not merges are
    // dropped.
    std::vector<MergeCase> list_merge_commits(
        const std::optional<std::vector<std::string>>& restrict_to = {}) const {
        load_graph();

        std::optional<std::set<std::string>> wanted;
        std::vector<MergeCase> unknown;
        if (restrict_to) {
            wanted.emplace();
            for (const std::string& raw : *restrict_to) {
                std::string id = lowercase(raw);
                std::string resolved;
                std::string problem;
                if (!resolve_id(id, resolved, problem)) {
                    MergeCase bad;
                    bad.merge_id = raw;
                    bad.status = CaseStatus::skipped;
                    bad.skip_reason = SkipReason::unknown_commit;
                    bad.detail = problem;
                    unknown.push_back(std::move(bad));
                } else {
                    wanted->insert(resolved);
                }
            }
        }

        std::vector<MergeCase> cases;
        for (const std::string& hash : topo_order()) {
            const CommitInfo& info = commits_.at(hash);
            if (info.parents.size() < 2) continue;
            if (wanted && !wanted->count(hash)) continue;
            cases.push_back(make_case(hash, info));
        }
        for (MergeCase& bad : unknown) cases.push_back(std::move(bad));
        return cases;
    }

    // Common-ancestor choice for a two-parent merge.  When history offers
    // several best ancestors the newest one wins (larger committer time,
    // then smaller hash) and the case is flagged as ambiguous.
    BaseResolution resolve_base(const std::string& parent1,
                                const std::string& parent2) const {
        CommandResult r = run_command(
            {"git", "-C", root_, "merge-base", "--all", parent1, parent2});
        if (r.exit_code == 1 && r.out.empty()) return {std::nullopt, false};
        if (!r.ok())
            throw RepoError(RepoError::Kind::git_failed,
                            "merge-base failed for " + parent1 + " " + parent2 + ": " +
                                r.err);
        std::vector<std::string> candidates;
        std::istringstream lines(r.out);
        for (std::string line; std::getline(lines, line);)
            if (!line.empty()) candidates.push_back(line);
        if (candidates.empty()) return {std::nullopt, false};
        if (candidates.size() == 1) return {candidates.front(), false};

        load_graph();
        std::string best;
        long long best_time = 0;
        for (const std::string& cand : candidates) {
            long long t = 0;
            if (auto it = commits_.find(cand); it != commits_.end())
                t = it->second.commit_time;
            if (best.empty() || t > best_time || (t == best_time && cand < best)) {
                best = cand;
                best_time = t;
            }
        }
        return {best, true};
    }

    // Full snapshot of a commit's tree with blob contents loaded.
    TreeSnapshot read_tree(const std::string& commit) const {
        CommandResult listing = run_command(
            {"git", "-C", root_, "ls-tree", "-r", "-z", commit});
        if (!listing.ok())
            throw RepoError(RepoError::Kind::git_failed,
                            "ls-tree failed for " + commit + ": " + listing.err);

        struct RawEntry {
            std::string path;
            TreeEntry::Kind kind;
            std::string oid;
        };
        std::vector<RawEntry> entries;
        std::set<std::string> blob_oids;
        std::string_view rest = listing.out;
        while (!rest.empty()) {
            std::size_t nul = rest.find('\0');
            std::string_view record = rest.substr(0, nul);
            rest = nul == std::string_view::npos ? std::string_view()
                                                 : rest.substr(nul + 1);
            if (record.empty()) continue;
            // "<mode> <type> <oid>\t<path>"
            std::size_t sp1 = record.find(' ');
            std::size_t sp2 = record.find(' ', sp1 + 1);
            std::size_t tab = record.find('\t', sp2 + 1);
            if (sp1 == std::string_view::npos || sp2 == std::string_view::npos ||
                tab == std::string_view::npos)
                throw RepoError(RepoError::Kind::git_failed,
                                "unparsable ls-tree record for " + commit);
            std::string_view mode = record.substr(0, sp1);
            std::string_view type = record.substr(sp1 + 1, sp2 - sp1 - 1);
            std::string oid(record.substr(sp2 + 1, tab - sp2 - 1));
            std::string path(record.substr(tab + 1));

            if (type == "commit") {
                entries.push_back({std::move(path), TreeEntry::Kind::submodule,
                                   std::move(oid)});
            } else if (type == "blob") {
                TreeEntry::Kind kind = mode == "120000" ? TreeEntry::Kind::symlink
                                                        : TreeEntry::Kind::regular;
                blob_oids.insert(oid);
                entries.push_back({std::move(path), kind, std::move(oid)});
            }
            // anything else (trees only appear without -r) is ignored
        }

        std::map<std::string, std::string> blobs = read_blobs(blob_oids);

        TreeSnapshot snapshot;
        for (RawEntry& entry : entries) {
            if (entry.kind == TreeEntry::Kind::submodule) {
                snapshot.emplace(std::move(entry.path),
                                 TreeEntry{entry.kind, std::move(entry.oid)});
            } else {
                snapshot.emplace(std::move(entry.path),
                                 TreeEntry{entry.kind, blobs.at(entry.oid)});
            }
        }
        return snapshot;
    }

private:
    RepoHandle(std::string root, std::string scratch, bool keep_clone)
        : root_(std::move(root)), scratch_(std::move(scratch)), keep_clone_(keep_clone) {}

    void dispose() {
        if (!scratch_.empty() && !keep_clone_) {
            std::error_code ec;
            std::filesystem::remove_all(scratch_, ec);
        }
    }

    static std::string lowercase(std::string s) {
        std::transform(s.begin(), s.end(), s.begin(),
                       [](unsigned char c) { return std::tolower(c); });
        return s;
    }

    void load_graph() const {
        std::lock_guard<std::mutex> lock(graph_mutex_);
        if (graph_loaded_) return;
        CommandResult r = run_command({"git", "-C", root_, "rev-list", "--all",
                                       "--no-commit-header", "--format=%H %ct %P"});
        if (!r.ok())
            throw RepoError(RepoError::Kind::git_failed,
                            "rev-list failed: " + r.err);
        std::istringstream lines(r.out);
        for (std::string line; std::getline(lines, line);) {
            if (line.empty()) continue;
            std::istringstream fields(line);
            std::string hash;
            CommitInfo info;
            fields >> hash >> info.commit_time;
            for (std::string parent; fields >> parent;)
                info.parents.push_back(parent);
            commits_.emplace(std::move(hash), std::move(info));
        }
        graph_loaded_ = true;
    }

    // Kahn's algorithm with a min-heap: a commit appears after all of its
    // parents, equally-ready commits in hash order.
    std::vector<std::string> topo_order() const {
        std::map<std::string, std::vector<const std::string*>> children;
        std::map<std::string, std::size_t> pending;
        for (const auto& [hash, info] : commits_) {
            std::size_t in_repo = 0;
            for (const std::string& parent : info.parents) {
                if (auto it = commits_.find(parent); it != commits_.end()) {
                    children[parent].push_back(&hash);
                    ++in_repo;
                }
            }
            pending[hash] = in_repo;
        }
        std::priority_queue<std::string, std::vector<std::string>, std::greater<>>
            ready;
        for (const auto& [hash, degree] : pending)
            if (degree == 0) ready.push(hash);
        std::vector<std::string> order;
        order.reserve(commits_.size());
        while (!ready.empty()) {
            std::string hash = ready.top();
            ready.pop();
            if (auto it = children.find(hash); it != children.end())
                for (const std::string* child : it->second)
                    if (--pending[*child] == 0) ready.push(*child);
            order.push_back(std::move(hash));
        }
        if (order.size() != commits_.size())
            throw RepoError(RepoError::Kind::git_failed,
                            "commit graph contains a cycle");
        return order;
    }

    // Full hash or unique prefix (at least 4 hex chars) of a known commit.
    bool resolve_id(const std::string& id, std::string& resolved,
                    std::string& problem) const {
        if (id.size() < 4 || id.size() > 40 ||
            id.find_first_not_of("0123456789abcdef") != std::string::npos) {
            problem = "not a commit hash or prefix";
            return false;
        }
        auto it = commits_.lower_bound(id);
        if (it == commits_.end() || it->first.compare(0, id.size(), id) != 0) {
            problem = "no commit with this hash";
            return false;
        }
        auto next = std::next(it);
        if (next != commits_.end() && next->first.compare(0, id.size(), id) == 0) {
            problem = "ambiguous hash prefix";
            return false;
        }
        resolved = it->first;
        return true;
    }

    MergeCase make_case(const std::string& hash, const CommitInfo& info) const {
        MergeCase out;
        out.merge_id = hash;
        out.parent_ids = info.parents;
        if (info.parents.size() > 2) {
            out.status = CaseStatus::skipped;
            out.skip_reason = SkipReason::octopus;
            return out;
        }
        out.parent1_id = info.parents[0];
        out.parent2_id = info.parents[1];
        BaseResolution base = resolve_base(out.parent1_id, out.parent2_id);
        out.base_ambiguous = base.ambiguous;
        if (!base.base) {
            out.status = CaseStatus::skipped;
            out.skip_reason = SkipReason::no_base;
            return out;
        }
        out.base_id = *base.base;
        out.status = CaseStatus::analyzable;
        return out;
    }

    // One cat-file round trip for any number of blobs; responses come back
    // in request order.
    std::map<std::string, std::string> read_blobs(
        const std::set<std::string>& oids) const {
        std::map<std::string, std::string> blobs;
        if (oids.empty()) return blobs;
        std::string request;
        for (const std::string& oid : oids) {
            request += oid;
            request += '\n';
        }
        CommandResult r =
            run_command({"git", "-C", root_, "cat-file", "--batch"}, request);
        if (!r.ok())
            throw RepoError(RepoError::Kind::git_failed,
                            "cat-file failed: " + r.err);
        std::string_view rest = r.out;
        for (const std::string& oid : oids) {
            std::size_t nl = rest.find('\n');
            if (nl == std::string_view::npos)
                throw RepoError(RepoError::Kind::git_failed,
                                "cat-file response truncated");
            std::string_view header = rest.substr(0, nl);
            rest = rest.substr(nl + 1);
            if (header.find(" missing") != std::string_view::npos)
                throw RepoError(RepoError::Kind::object_missing,
                                "object missing: " + oid);
            std::size_t size_pos = header.rfind(' ');
            std::size_t size = 0;
            std::from_chars(header.data() + size_pos + 1,
                            header.data() + header.size(), size);
            if (rest.size() < size + 1)
                throw RepoError(RepoError::Kind::git_failed,
                                "cat-file response truncated");
            blobs.emplace(oid, std::string(rest.substr(0, size)));
            rest = rest.substr(size + 1);  // content plus closing LF
        }
        return blobs;
    }

    std::string root_;
    std::string scratch_;
    bool keep_clone_ = false;

    mutable std::mutex graph_mutex_;
    mutable bool graph_loaded_ = false;
    mutable std::map<std::string, CommitInfo> commits_;
};

}  // namespace merge_effort
