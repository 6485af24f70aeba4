#pragma once

#include <cstdint>
#include <vector>

#include "merge_effort/effort.hpp"

namespace merge_effort {

// Repository-level roll-up of one metric.  Sums are accumulated as integers
// and divided once at the end, so means are exact up to one final rounding.
struct MetricAggregate {
    std::uint64_t occurrences = 0;  // analyzed merges where the metric is > 0
    std::uint64_t action_sum = 0;   // metric total across analyzed merges
    double occurrence_pct = 0.0;    // 100 * occurrences / analyzed
    double mean_actions = 0.0;      // action_sum / analyzed
};

struct AggregateReport {
    std::uint64_t total_commits = 0;
    std::uint64_t merge_commits = 0;
    std::uint64_t analyzed = 0;
    std::uint64_t skipped_octopus = 0;
    std::uint64_t skipped_no_base = 0;
    std::uint64_t errored = 0;
    bool empty = false;  // no merge could be analyzed
    MetricAggregate rework;
    MetricAggregate wasted;
    MetricAggregate extra;
};

inline AggregateReport aggregate(const std::vector<MergeAnalysis>& analyses,
                                 std::uint64_t total_commits) {
    AggregateReport report;
    report.total_commits = total_commits;
    report.merge_commits = analyses.size();

    for (const MergeAnalysis& analysis : analyses) {
        if (analysis.record) {
            ++report.analyzed;
            const EffortRecord& rec = *analysis.record;
            report.rework.action_sum += rec.rework;
            report.wasted.action_sum += rec.wasted;
            report.extra.action_sum += rec.extra;
            if (rec.rework > 0) ++report.rework.occurrences;
            if (rec.wasted > 0) ++report.wasted.occurrences;
            if (rec.extra > 0) ++report.extra.occurrences;
            continue;
        }
        switch (analysis.merge_case.skip_reason) {
            case SkipReason::octopus: ++report.skipped_octopus; break;
            case SkipReason::no_base: ++report.skipped_no_base; break;
            default: ++report.errored; break;
        }
    }

    report.empty = report.analyzed == 0;
    if (report.analyzed > 0) {
        auto finalize = [&](MetricAggregate& m) {
            m.occurrence_pct = 100.0 * static_cast<double>(m.occurrences) /
                               static_cast<double>(report.analyzed);
            m.mean_actions = static_cast<double>(m.action_sum) /
                             static_cast<double>(report.analyzed);
        };
        finalize(report.rework);
        finalize(report.wasted);
        finalize(report.extra);
    }
    return report;
}

}  // namespace merge_effort
