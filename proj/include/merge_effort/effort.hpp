#pragma once

#include <cstdint>
#include <optional>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include "merge_effort/action.hpp"
#include "merge_effort/diff.hpp"
#include "merge_effort/repo.hpp"

namespace merge_effort {

// The three action bags every metric is derived from: base->parent1,
// base->parent2 and base->merge.
struct EffortInputs {
    ActionMultiset branch1;
    ActionMultiset branch2;
    ActionMultiset merge;
};

// All six bags, for callers that want the evidence rather than the counts.
struct ActionSets {
    ActionMultiset branch1;
    ActionMultiset branch2;
    ActionMultiset merge;
    ActionMultiset rework;
    ActionMultiset wasted;
    ActionMultiset extra;
};

struct EffortRecord {
    std::string merge_id;
    std::uint64_t branch1_size = 0;
    std::uint64_t branch2_size = 0;
    std::uint64_t merge_size = 0;
    std::uint64_t rework = 0;
    std::uint64_t wasted = 0;
    std::uint64_t extra = 0;
    double rework_normalized = 0.0;
    double wasted_normalized = 0.0;
    double extra_normalized = 0.0;
    bool base_ambiguous = false;
    std::vector<Warning> warnings;  // sorted, unique
};

inline double safe_ratio(std::uint64_t numerator, std::uint64_t denominator) {
    return denominator == 0 ? 0.0
                            : static_cast<double>(numerator) /
                                  static_cast<double>(denominator);
}

// rework: actions both branches performed independently.
// wasted: actions performed on a branch that did not survive the merge;
//         a bag difference, so an action wasted twice counts twice.
// extra:  actions in the merge that neither branch accounts for.
inline ActionSets compute_effort_actions(const EffortInputs& in) {
    ActionSets sets;
    sets.branch1 = in.branch1;
    sets.branch2 = in.branch2;
    sets.merge = in.merge;
    sets.rework = intersection(in.branch1, in.branch2);
    ActionMultiset branches = sum(in.branch1, in.branch2);
    sets.wasted = difference(branches, in.merge);
    sets.extra = difference(in.merge, branches);
    return sets;
}

// Normalizations divide by the work that could have shown the symptom:
// distinct branch work for rework, all branch work for wasted, the merge's
// own work for extra.  Empty denominators mean "nothing happened": 0, not
// NaN.
inline EffortRecord compute_effort(const EffortInputs& in) {
    ActionSets sets = compute_effort_actions(in);

    EffortRecord rec;
    rec.branch1_size = in.branch1.cardinality();
    rec.branch2_size = in.branch2.cardinality();
    rec.merge_size = in.merge.cardinality();
    rec.rework = sets.rework.cardinality();
    rec.wasted = sets.wasted.cardinality();
    rec.extra = sets.extra.cardinality();
    rec.rework_normalized =
        safe_ratio(rec.rework, union_of(in.branch1, in.branch2).cardinality());
    rec.wasted_normalized =
        safe_ratio(rec.wasted, rec.branch1_size + rec.branch2_size);
    rec.extra_normalized = safe_ratio(rec.extra, rec.merge_size);
    return rec;
}

// Everything known about one merge after analysis.  `record` is present only
// for analyzable cases that could actually be read; a case that fails while
// reading comes back re-marked as a read-error skip.
struct MergeAnalysis {
    MergeCase merge_case;
    std::optional<EffortRecord> record;
    std::optional<ActionSets> actions;
};

inline MergeAnalysis analyze_merge(const RepoHandle& repo, MergeCase merge_case,
                                   ActionIdentity identity,
                                   bool with_actions = false) {
    if (merge_case.status != CaseStatus::analyzable)
        return {std::move(merge_case), std::nullopt, std::nullopt};

    try {
        TreeSnapshot base = repo.read_tree(merge_case.base_id);
        TreeSnapshot parent1 = repo.read_tree(merge_case.parent1_id);
        TreeSnapshot parent2 = repo.read_tree(merge_case.parent2_id);
        TreeSnapshot merged = repo.read_tree(merge_case.merge_id);

        DiffReport d1 = diff_trees(base, parent1, identity);
        DiffReport d2 = diff_trees(base, parent2, identity);
        DiffReport dm = diff_trees(base, merged, identity);

        EffortInputs inputs{std::move(d1.actions), std::move(d2.actions),
                            std::move(dm.actions)};
        EffortRecord record = compute_effort(inputs);
        record.merge_id = merge_case.merge_id;
        record.base_ambiguous = merge_case.base_ambiguous;

        std::set<Warning> merged_warnings;
        merged_warnings.insert(d1.warnings.begin(), d1.warnings.end());
        merged_warnings.insert(d2.warnings.begin(), d2.warnings.end());
        merged_warnings.insert(dm.warnings.begin(), dm.warnings.end());
        record.warnings.assign(merged_warnings.begin(), merged_warnings.end());

        MergeAnalysis analysis{std::move(merge_case), std::move(record),
                               std::nullopt};
        if (with_actions) analysis.actions = compute_effort_actions(inputs);
        return analysis;
    } catch (const RepoError& e) {
        merge_case.status = CaseStatus::skipped;
        merge_case.skip_reason = SkipReason::read_error;
        merge_case.detail = e.what();
        return {std::move(merge_case), std::nullopt, std::nullopt};
    }
}

}  // namespace merge_effort
