#pragma once

// Declarative construction of small git repositories for tests and
// experiments.  A history script is a plain-text document, one commit per
// stanza:
//
//   commit feature          # label, must be unique
//   time 120                # optional seconds offset for the commit date
//   message tweak parser    # optional, defaults to the label
//   parents root            # zero for a root commit, two+ for a merge
//   file src/main.py        # content follows, terminated by a lone "."
//   print("hi")
//   .
//   file blob.bin noeol     # noeol: drop the trailing newline
//   file raw.bin hex        # hex: content lines are hex-encoded bytes
//   symlink docs/latest releases/v2
//   submodule vendor/dep 1111111111111111111111111111111111111111
//   delete old/path.txt
//
// A commit's tree is its first parent's tree with the stanza's changes
// applied in order.  Content lines beginning with "." are written with an
// extra leading dot (so ".." reads back as "."); parsing strips one dot.
// Parents must be defined by earlier stanzas, which rules out cycles.

#include <cctype>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <map>
#include <optional>
#include <sstream>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "merge_effort/diff.hpp"
#include "merge_effort/process.hpp"
#include "merge_effort/tree.hpp"

namespace merge_effort {

struct ScriptError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct FileChange {
    enum class Op { write, symlink, submodule, remove };

    Op op = Op::write;
    std::string path;
    std::string content;  // file bytes / link target / pinned commit id
};

struct CommitSpec {
    std::string label;
    std::vector<std::string> parents;
    std::vector<FileChange> changes;
    std::optional<long long> time_offset;
    std::string message;
};

struct HistoryScript {
    std::vector<CommitSpec> commits;

    static HistoryScript parse(std::string_view text);
};

struct BuiltRepo {
    std::filesystem::path root;
    std::map<std::string, std::string> commit_ids;  // label -> commit hash
};

// Fixture hashes must not depend on the machine's git configuration.
inline std::vector<std::string> git_isolation_env() {
    return {"GIT_CONFIG_GLOBAL=/dev/null", "GIT_CONFIG_SYSTEM=/dev/null",
            "GIT_CONFIG_NOSYSTEM=1"};
}

namespace detail {

inline std::string_view trim(std::string_view s) {
    while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
    while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r'))
        s.remove_suffix(1);
    return s;
}

// Pops the next whitespace-delimited token off `rest`.
inline std::string_view next_token(std::string_view& rest) {
    rest = trim(rest);
    std::size_t end = rest.find_first_of(" \t");
    std::string_view tok = rest.substr(0, end);
    rest = end == std::string_view::npos ? std::string_view() : trim(rest.substr(end));
    return tok;
}

inline bool valid_label(std::string_view label) {
    if (label.empty() || label.front() == '-') return false;
    for (char c : label)
        if (!std::isalnum(static_cast<unsigned char>(c)) && c != '_' && c != '-' &&
            c != '.')
            return false;
    return true;
}

inline bool valid_path(std::string_view path) {
    if (path.empty() || path.front() == '/' || path.back() == '/') return false;
    if (path.find('\n') != std::string_view::npos) return false;
    if (path.front() == '"') return false;  // keeps fast-import manifests unquoted
    for (std::string_view rest = path;;) {
        std::size_t slash = rest.find('/');
        std::string_view seg = rest.substr(0, slash);
        if (seg.empty() || seg == "." || seg == ".." || seg == ".git") return false;
        if (slash == std::string_view::npos) break;
        rest = rest.substr(slash + 1);
    }
    return true;
}

inline bool valid_oid(std::string_view oid) {
    if (oid.size() != 40) return false;
    for (char c : oid)
        if (!std::isxdigit(static_cast<unsigned char>(c))) return false;
    return true;
}

[[noreturn]] inline void script_fail(std::size_t lineno, const std::string& what) {
    throw ScriptError("history script line " + std::to_string(lineno) + ": " + what);
}

}  // namespace detail

inline HistoryScript HistoryScript::parse(std::string_view text) {
    using namespace detail;

    HistoryScript script;
    std::map<std::string, std::size_t, std::less<>> known;  // label -> commit index
    CommitSpec* cur = nullptr;
    bool cur_has_parents = false;

    const std::vector<std::string_view> lines = split_lines(text);
    for (std::size_t i = 0; i < lines.size(); ++i) {
        const std::size_t lineno = i + 1;
        std::string_view line = trim(lines[i]);
        if (line.empty() || line.front() == '#') continue;

        std::string_view rest = line;
        std::string_view keyword = next_token(rest);

        if (keyword == "commit") {
            std::string_view label = next_token(rest);
            if (!valid_label(label)) script_fail(lineno, "bad commit label");
            if (!rest.empty()) script_fail(lineno, "unexpected trailing text");
            if (known.count(label)) script_fail(lineno, "duplicate commit label '" +
                                                            std::string(label) + "'");
            known.emplace(std::string(label), script.commits.size());
            script.commits.push_back({});
            cur = &script.commits.back();
            cur->label = std::string(label);
            cur_has_parents = false;
            continue;
        }
        if (cur == nullptr) script_fail(lineno, "directive before first commit");

        if (keyword == "time") {
            if (cur->time_offset) script_fail(lineno, "time given twice");
            try {
                std::string digits(rest);
                std::size_t used = 0;
                long long offset = std::stoll(digits, &used);
                if (used != digits.size()) throw std::invalid_argument(digits);
                cur->time_offset = offset;
            } catch (const std::exception&) {
                script_fail(lineno, "bad time offset");
            }
        } else if (keyword == "message") {
            cur->message = std::string(rest);
        } else if (keyword == "parents") {
            if (cur_has_parents) script_fail(lineno, "parents given twice");
            cur_has_parents = true;
            while (!rest.empty()) {
                std::string_view parent = next_token(rest);
                auto it = known.find(parent);
                if (it == known.end() || it->second + 1 == script.commits.size())
                    script_fail(lineno, "parent '" + std::string(parent) +
                                            "' is not an earlier commit");
                for (const auto& seen : cur->parents)
                    if (seen == parent) script_fail(lineno, "duplicate parent");
                cur->parents.emplace_back(parent);
            }
            if (cur->parents.empty()) script_fail(lineno, "parents directive is empty");
        } else if (keyword == "file") {
            std::string_view path = next_token(rest);
            if (!valid_path(path)) script_fail(lineno, "bad path");
            bool noeol = false;
            bool hex = false;
            if (!rest.empty()) {
                std::string_view flag = next_token(rest);
                if (flag == "noeol") noeol = true;
                else if (flag == "hex") hex = true;  // raw bytes, hex-encoded
                else script_fail(lineno, "unknown file flag");
                if (!rest.empty()) script_fail(lineno, "unexpected trailing text");
            }
            bool terminated = false;
            std::vector<std::string_view> body;
            while (i + 1 < lines.size()) {
                std::string_view raw = lines[++i];
                std::string_view stripped = raw;
                if (!stripped.empty() && stripped.back() == '\r')
                    stripped.remove_suffix(1);
                if (stripped == ".") {
                    terminated = true;
                    break;
                }
                if (!stripped.empty() && stripped.front() == '.')
                    stripped.remove_prefix(1);
                body.push_back(stripped);
            }
            if (!terminated) script_fail(lineno, "file block missing '.' terminator");
            std::string content;
            if (hex) {
                std::string digits;
                for (std::string_view part : body)
                    for (char c : part)
                        if (c != ' ' && c != '\t') digits.push_back(c);
                if (digits.size() % 2 != 0 ||
                    digits.find_first_not_of("0123456789abcdefABCDEF") !=
                        std::string::npos)
                    script_fail(lineno, "bad hex content");
                for (std::size_t b = 0; b < digits.size(); b += 2)
                    content.push_back(static_cast<char>(
                        std::stoi(digits.substr(b, 2), nullptr, 16)));
            } else {
                for (std::size_t b = 0; b < body.size(); ++b) {
                    content.append(body[b]);
                    if (b + 1 < body.size() || !noeol) content.push_back('\n');
                }
            }
            cur->changes.push_back(
                {FileChange::Op::write, std::string(path), std::move(content)});
        } else if (keyword == "symlink") {
            std::string_view path = next_token(rest);
            if (!valid_path(path)) script_fail(lineno, "bad path");
            if (rest.empty()) script_fail(lineno, "symlink needs a target");
            cur->changes.push_back(
                {FileChange::Op::symlink, std::string(path), std::string(rest)});
        } else if (keyword == "submodule") {
            std::string_view path = next_token(rest);
            if (!valid_path(path)) script_fail(lineno, "bad path");
            std::string_view oid = next_token(rest);
            if (!valid_oid(oid)) script_fail(lineno, "bad submodule commit id");
            if (!rest.empty()) script_fail(lineno, "unexpected trailing text");
            cur->changes.push_back(
                {FileChange::Op::submodule, std::string(path), std::string(oid)});
        } else if (keyword == "delete") {
            std::string_view path = next_token(rest);
            if (!valid_path(path)) script_fail(lineno, "bad path");
            if (!rest.empty()) script_fail(lineno, "unexpected trailing text");
            cur->changes.push_back({FileChange::Op::remove, std::string(path), {}});
        } else {
            script_fail(lineno, "unknown directive '" + std::string(keyword) + "'");
        }
    }
    if (script.commits.empty()) throw ScriptError("history script has no commits");
    return script;
}

namespace detail {

// Tree state per commit, following first parents.  Also usable on its own in
// tests that want the expected snapshot without a real repository.
inline std::map<std::string, TreeSnapshot> evolve_states(const HistoryScript& script) {
    std::map<std::string, TreeSnapshot> states;
    for (const CommitSpec& spec : script.commits) {
        TreeSnapshot state =
            spec.parents.empty() ? TreeSnapshot{} : states.at(spec.parents.front());
        for (const FileChange& change : spec.changes) {
            switch (change.op) {
                case FileChange::Op::write:
                    state[change.path] = {TreeEntry::Kind::regular, change.content};
                    break;
                case FileChange::Op::symlink:
                    state[change.path] = {TreeEntry::Kind::symlink, change.content};
                    break;
                case FileChange::Op::submodule:
                    state[change.path] = {TreeEntry::Kind::submodule, change.content};
                    break;
                case FileChange::Op::remove:
                    if (state.erase(change.path) == 0)
                        throw ScriptError("commit '" + spec.label + "' deletes '" +
                                          change.path + "' which does not exist");
                    break;
            }
        }
        states[spec.label] = std::move(state);
    }
    return states;
}

inline void run_git_or_throw(const std::vector<std::string>& argv,
                             std::string_view stdin_bytes = {}) {
    CommandResult r = run_command(argv, stdin_bytes, git_isolation_env());
    if (!r.ok())
        throw ScriptError("git failed (" + argv[1] + "): " + r.err);
}

}  // namespace detail

// Materializes the script as a real repository under `dir` (created if
// needed).  Every commit gets a branch named after its label and HEAD points
// at the last stanza.  Dates are pinned, so hashes are reproducible.
inline BuiltRepo build_repo(const HistoryScript& script,
                            const std::filesystem::path& dir) {
    constexpr long long kEpochBase = 1600000000;
    const std::string identity = "Fixture <fixture@example.invalid>";

    std::map<std::string, TreeSnapshot> states = detail::evolve_states(script);

    std::ostringstream stream;
    std::map<std::string, int, std::less<>> blob_marks;
    std::map<std::string, int> commit_marks;
    int next_mark = 1;

    for (std::size_t index = 0; index < script.commits.size(); ++index) {
        const CommitSpec& spec = script.commits[index];
        const TreeSnapshot& state = states.at(spec.label);

        for (const auto& [path, entry] : state) {
            if (entry.kind == TreeEntry::Kind::submodule) continue;
            if (blob_marks.count(entry.content)) continue;
            blob_marks.emplace(entry.content, next_mark);
            stream << "blob\nmark :" << next_mark++ << "\ndata "
                   << entry.content.size() << '\n'
                   << entry.content << '\n';
        }

        const long long when =
            kEpochBase + spec.time_offset.value_or(static_cast<long long>(index) * 60);
        const std::string message = spec.message.empty() ? spec.label : spec.message;

        commit_marks.emplace(spec.label, next_mark);
        stream << "commit refs/heads/" << spec.label << "\nmark :" << next_mark++
               << "\nauthor " << identity << ' ' << when << " +0000\ncommitter "
               << identity << ' ' << when << " +0000\ndata " << message.size() << '\n'
               << message << '\n';
        for (std::size_t p = 0; p < spec.parents.size(); ++p)
            stream << (p == 0 ? "from :" : "merge :")
                   << commit_marks.at(spec.parents[p]) << '\n';
        stream << "deleteall\n";
        for (const auto& [path, entry] : state) {
            switch (entry.kind) {
                case TreeEntry::Kind::regular:
                    stream << "M 100644 :" << blob_marks.at(entry.content);
                    break;
                case TreeEntry::Kind::symlink:
                    stream << "M 120000 :" << blob_marks.at(entry.content);
                    break;
                case TreeEntry::Kind::submodule:
                    stream << "M 160000 " << entry.content;
                    break;
            }
            stream << ' ' << path << '\n';
        }
        stream << '\n';
    }

    detail::run_git_or_throw({"git", "init", "-q", dir.string()});
    const std::filesystem::path marks_path = dir / ".git" / "history-script-marks";
    detail::run_git_or_throw({"git", "-C", dir.string(), "fast-import", "--quiet",
                              "--export-marks=" + marks_path.string()},
                             stream.str());

    // marks file: ":<mark> <sha>" per line, blobs and commits mixed
    std::map<int, std::string> mark_to_sha;
    {
        std::ifstream marks(marks_path);
        if (!marks) throw ScriptError("fast-import exported no marks");
        std::string line;
        while (std::getline(marks, line)) {
            std::size_t space = line.find(' ');
            if (line.size() < 3 || line[0] != ':' || space == std::string::npos)
                continue;
            mark_to_sha[std::stoi(line.substr(1, space - 1))] = line.substr(space + 1);
        }
    }

    BuiltRepo repo;
    repo.root = dir;
    for (const auto& [label, mark] : commit_marks) {
        auto it = mark_to_sha.find(mark);
        if (it == mark_to_sha.end())
            throw ScriptError("no commit created for label '" + label + "'");
        repo.commit_ids[label] = it->second;
    }
    detail::run_git_or_throw({"git", "-C", dir.string(), "symbolic-ref", "HEAD",
                              "refs/heads/" + script.commits.back().label});
    return repo;
}

}  // namespace merge_effort
