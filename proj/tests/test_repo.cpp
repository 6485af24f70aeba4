#include <catch2/catch_amalgamated.hpp>

#include <filesystem>
#include <string>

#include "merge_effort/fixtures.hpp"
#include "merge_effort/repo.hpp"
#include "support/temp_dir.hpp"

using namespace merge_effort;
using test_support::TempDir;

namespace {

RepoHandle open_local(const std::filesystem::path& p) {
    return RepoHandle::open_or_clone({RepoSource::Kind::local_path, p.string()});
}

const std::string kDiamondScript = R"(commit root
file a.txt
one
.
commit left
parents root
file a.txt
one
two
.
commit right
parents root
file b.txt
bee
.
commit tip
parents left right
file a.txt
one
two
.
file b.txt
bee
.
)";

}  // namespace

TEST_CASE("source classification: URLs and scp-like specs are remote") {
    CHECK(classify_source("https://host/repo.git").kind == RepoSource::Kind::remote_url);
    CHECK(classify_source("ssh://git@host/repo").kind == RepoSource::Kind::remote_url);
    CHECK(classify_source("file:///srv/repo").kind == RepoSource::Kind::remote_url);
    CHECK(classify_source("git@host:org/repo.git").kind == RepoSource::Kind::remote_url);

    CHECK(classify_source("/srv/repo").kind == RepoSource::Kind::local_path);
    CHECK(classify_source("relative/dir").kind == RepoSource::Kind::local_path);
    CHECK(classify_source(".").kind == RepoSource::Kind::local_path);
    CHECK(classify_source("host:path").kind == RepoSource::Kind::local_path);
    CHECK(classify_source("./odd:name").kind == RepoSource::Kind::local_path);
    CHECK(classify_source("dir/with@at:colon").kind == RepoSource::Kind::local_path);
}

TEST_CASE("opening a non-repository fails cleanly") {
    TempDir tmp;
    try {
        open_local(tmp.path());
        FAIL("expected RepoError");
    } catch (const RepoError& e) {
        CHECK(e.kind == RepoError::Kind::not_a_repository);
    }
    CHECK_THROWS_AS(open_local(tmp.sub("missing")), RepoError);
}

TEST_CASE("merge listing on a plain diamond") {
    TempDir tmp;
    BuiltRepo built = build_repo(HistoryScript::parse(kDiamondScript), tmp.sub("r"));
    RepoHandle repo = open_local(built.root);

    CHECK(repo.total_commits() == 4);

    std::vector<MergeCase> cases = repo.list_merge_commits();
    REQUIRE(cases.size() == 1);
    const MergeCase& m = cases[0];
    CHECK(m.merge_id == built.commit_ids.at("tip"));
    CHECK(m.parent1_id == built.commit_ids.at("left"));
    CHECK(m.parent2_id == built.commit_ids.at("right"));
    CHECK(m.parent_ids == std::vector<std::string>{built.commit_ids.at("left"),
                                                   built.commit_ids.at("right")});
    CHECK(m.base_id == built.commit_ids.at("root"));
    CHECK(m.status == CaseStatus::analyzable);
    CHECK_FALSE(m.base_ambiguous);
    CHECK_FALSE(m.is_error());
}

TEST_CASE("a merge with three parents is listed but skipped") {
    TempDir tmp;
    BuiltRepo built = build_repo(HistoryScript::parse(R"(commit root
file f
x
.
commit a
parents root
file f
xa
.
commit b
parents root
file f
xb
.
commit c
parents root
file f
xc
.
commit octo
parents a b c
file f
xabc
.
)"),
                                 tmp.sub("r"));
    std::vector<MergeCase> cases = open_local(built.root).list_merge_commits();
    REQUIRE(cases.size() == 1);
    CHECK(cases[0].status == CaseStatus::skipped);
    CHECK(cases[0].skip_reason == SkipReason::octopus);
    CHECK(cases[0].parent_ids.size() == 3);
    CHECK(cases[0].base_id.empty());
    CHECK_FALSE(cases[0].is_error());
}

TEST_CASE("merging unrelated roots yields no base") {
    TempDir tmp;
    BuiltRepo built = build_repo(HistoryScript::parse(R"(commit r1
file a
1
.
commit r2
file b
2
.
commit m
parents r1 r2
file a
1
.
file b
2
.
)"),
                                 tmp.sub("r"));
    std::vector<MergeCase> cases = open_local(built.root).list_merge_commits();
    REQUIRE(cases.size() == 1);
    CHECK(cases[0].status == CaseStatus::skipped);
    CHECK(cases[0].skip_reason == SkipReason::no_base);
    CHECK_FALSE(cases[0].is_error());
}

TEST_CASE("criss-cross history flags an ambiguous base") {
    TempDir tmp;
    // a and b are both best common ancestors of x and y
    BuiltRepo built = build_repo(HistoryScript::parse(R"(commit root
file f
0
.
commit a
parents root
time 100
file f
a
.
commit b
parents root
time 200
file f
0
.
file g
b
.
commit x
parents a b
file f
a
.
file g
b
.
commit y
parents b a
file f
a
.
file g
b
.
commit m
parents x y
file f
a
.
file g
b
.
)"),
                                 tmp.sub("r"));
    std::vector<MergeCase> cases = open_local(built.root).list_merge_commits();
    REQUIRE(cases.size() == 3);  // x, y, m

    const MergeCase* top = nullptr;
    for (const MergeCase& c : cases)
        if (c.merge_id == built.commit_ids.at("m")) top = &c;
    REQUIRE(top != nullptr);
    CHECK(top->status == CaseStatus::analyzable);
    CHECK(top->base_ambiguous);
    // the newer of the two candidates wins
    CHECK(top->base_id == built.commit_ids.at("b"));
}

TEST_CASE("merge listing is parents-first and repeatable") {
    TempDir tmp;
    BuiltRepo built = build_repo(HistoryScript::parse(R"(commit root
file f
0
.
commit a
parents root
file f
a
.
commit b
parents root
file f
b0
.
commit inner
parents a b
file f
ab
.
commit c
parents root
file f
c
.
commit outer
parents inner c
file f
abc
.
)"),
                                 tmp.sub("r"));
    RepoHandle repo = open_local(built.root);
    std::vector<MergeCase> first = repo.list_merge_commits();
    REQUIRE(first.size() == 2);
    CHECK(first[0].merge_id == built.commit_ids.at("inner"));
    CHECK(first[1].merge_id == built.commit_ids.at("outer"));

    std::vector<MergeCase> again = repo.list_merge_commits();
    REQUIRE(again.size() == 2);
    CHECK(again[0].merge_id == first[0].merge_id);
    CHECK(again[1].merge_id == first[1].merge_id);
}

TEST_CASE("restricting the merge list") {
    TempDir tmp;
    BuiltRepo built = build_repo(HistoryScript::parse(kDiamondScript), tmp.sub("r"));
    RepoHandle repo = open_local(built.root);
    const std::string tip = built.commit_ids.at("tip");

    SECTION("full hash and unique prefix both match") {
        CHECK(repo.list_merge_commits({{tip}}).size() == 1);
        CHECK(repo.list_merge_commits({{tip.substr(0, 8)}}).size() == 1);
    }
    SECTION("matching is case-insensitive") {
        std::string upper = tip;
        for (char& c : upper) c = std::toupper(static_cast<unsigned char>(c));
        std::vector<MergeCase> cases = repo.list_merge_commits({{upper}});
        REQUIRE(cases.size() == 1);
        CHECK(cases[0].status == CaseStatus::analyzable);
    }
    SECTION("ids that match nothing become trailing unknown-commit entries") {
        std::vector<MergeCase> cases = repo.list_merge_commits(
            {{tip, "deadbeefdeadbeefdeadbeefdeadbeefdeadbeef", "xyz!", "ab"}});
        REQUIRE(cases.size() == 4);
        CHECK(cases[0].merge_id == tip);
        CHECK(cases[0].status == CaseStatus::analyzable);
        CHECK(cases[1].merge_id == "deadbeefdeadbeefdeadbeefdeadbeefdeadbeef");
        CHECK(cases[1].skip_reason == SkipReason::unknown_commit);
        CHECK(cases[1].is_error());
        CHECK(cases[2].merge_id == "xyz!");  // not hex
        CHECK(cases[2].is_error());
        CHECK(cases[3].merge_id == "ab");  // too short to be a prefix
        CHECK(cases[3].is_error());
    }
    SECTION("naming a non-merge commit selects nothing") {
        CHECK(repo.list_merge_commits({{built.commit_ids.at("root")}}).empty());
    }
}

TEST_CASE("read_tree loads full snapshots") {
    TempDir tmp;
    BuiltRepo built = build_repo(HistoryScript::parse(R"(commit snap
file dir/inner/data.txt
alpha
beta
.
file top.txt noeol
no newline
.
symlink here target/elsewhere
submodule vendor/dep 0123456789abcdef0123456789abcdef01234567
)"),
                                 tmp.sub("r"));
    RepoHandle repo = open_local(built.root);
    TreeSnapshot tree = repo.read_tree(built.commit_ids.at("snap"));

    REQUIRE(tree.size() == 4);
    CHECK(tree.at("dir/inner/data.txt").kind == TreeEntry::Kind::regular);
    CHECK(tree.at("dir/inner/data.txt").content == "alpha\nbeta\n");
    CHECK(tree.at("top.txt").content == "no newline");
    CHECK(tree.at("here").kind == TreeEntry::Kind::symlink);
    CHECK(tree.at("here").content == "target/elsewhere");
    CHECK(tree.at("vendor/dep").kind == TreeEntry::Kind::submodule);
    CHECK(tree.at("vendor/dep").content == "0123456789abcdef0123456789abcdef01234567");
}

TEST_CASE("remote sources are cloned and cleaned up") {
    TempDir tmp;
    BuiltRepo built = build_repo(HistoryScript::parse(kDiamondScript), tmp.sub("r"));
    const std::string url = "file://" + built.root.string();

    std::filesystem::path clone_root;
    {
        RepoHandle repo =
            RepoHandle::open_or_clone({RepoSource::Kind::remote_url, url});
        CHECK(repo.owns_clone());
        clone_root = repo.root();
        CHECK(repo.total_commits() == 4);
        CHECK(repo.list_merge_commits().size() == 1);
        CHECK(std::filesystem::exists(clone_root));
    }
    CHECK_FALSE(std::filesystem::exists(clone_root));

    SECTION("keep_clone leaves the scratch copy behind") {
        std::filesystem::path kept;
        {
            RepoHandle repo = RepoHandle::open_or_clone(
                {RepoSource::Kind::remote_url, url}, /*keep_clone=*/true);
            kept = repo.root();
        }
        CHECK(std::filesystem::exists(kept));
        std::filesystem::remove_all(std::filesystem::path(kept).parent_path());
    }
}

TEST_CASE("unreachable remotes are reported before cloning") {
    try {
        RepoHandle::open_or_clone(
            {RepoSource::Kind::remote_url, "file:///nonexistent/nowhere/repo"});
        FAIL("expected RepoError");
    } catch (const RepoError& e) {
        CHECK(e.kind == RepoError::Kind::unreachable_remote);
    }
}
