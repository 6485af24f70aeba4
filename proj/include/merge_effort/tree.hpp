#pragma once

#include <map>
#include <string>

namespace merge_effort {

// Flattened snapshot of a commit's tree: full path -> entry.  Directories are
// implicit.  For symlinks `content` is the link target; for submodules it is
// the pinned commit id (submodules are never diffed, only reported).
struct TreeEntry {
    enum class Kind { regular, symlink, submodule };

    Kind kind = Kind::regular;
    std::string content;

    friend bool operator==(const TreeEntry&, const TreeEntry&) = default;
};

using TreeSnapshot = std::map<std::string, TreeEntry>;

}  // namespace merge_effort
