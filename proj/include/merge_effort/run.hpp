#pragma once

#include <atomic>
#include <cstdint>
#include <cstdio>
#include <optional>
#include <string>
#include <thread>
#include <vector>

#include "merge_effort/aggregate.hpp"
#include "merge_effort/effort.hpp"
#include "merge_effort/repo.hpp"

namespace merge_effort {

enum class OutputFormat { json, csv };
enum class MetricView { absolute, normalized, both };

struct RunConfig {
    RepoSource source;
    std::optional<std::vector<std::string>> commits;
    ActionIdentity identity = ActionIdentity::path_qualified;
    OutputFormat format = OutputFormat::json;
    MetricView metric_view = MetricView::both;
    std::optional<std::string> output_path;
    unsigned jobs = 1;
    bool keep_clone = false;
    bool dump_actions = false;
};

struct RunOutcome {
    std::uint64_t total_commits = 0;
    std::vector<MergeAnalysis> analyses;
    bool had_errors = false;
};

// Analyzes every selected merge.  Workers pull cases off a shared counter;
// each result lands in the slot of its case, so the output order is the
// listing order no matter how many jobs run.
inline RunOutcome run_analysis(const RepoHandle& repo, const RunConfig& config) {
    RunOutcome outcome;
    outcome.total_commits = repo.total_commits();

    std::vector<MergeCase> cases = repo.list_merge_commits(config.commits);
    outcome.analyses.resize(cases.size());

    unsigned jobs = config.jobs == 0 ? 1 : config.jobs;
    if (jobs > cases.size()) jobs = cases.size() == 0 ? 1 : static_cast<unsigned>(cases.size());

    std::atomic<std::size_t> next{0};
    auto worker = [&]() {
        for (;;) {
            std::size_t slot = next.fetch_add(1);
            if (slot >= cases.size()) return;
            outcome.analyses[slot] = analyze_merge(repo, std::move(cases[slot]),
                                                   config.identity,
                                                   config.dump_actions);
        }
    };
    if (jobs <= 1) {
        worker();
    } else {
        std::vector<std::thread> pool;
        pool.reserve(jobs);
        for (unsigned j = 0; j < jobs; ++j) pool.emplace_back(worker);
        for (std::thread& t : pool) t.join();
    }

    for (const MergeAnalysis& analysis : outcome.analyses)
        if (analysis.merge_case.is_error()) outcome.had_errors = true;
    return outcome;
}

namespace detail {

// Valid JSON for arbitrary bytes: printable ASCII stays literal, everything
// else becomes a \u00XX byte escape.  Injective, so distinct inputs never
// collide after encoding.
inline void json_escape(std::string& out, std::string_view bytes) {
    static const char* hex = "0123456789abcdef";
    for (unsigned char c : bytes) {
        if (c == '"' || c == '\\') {
            out.push_back('\\');
            out.push_back(static_cast<char>(c));
        } else if (c >= 0x20 && c < 0x7f) {
            out.push_back(static_cast<char>(c));
        } else {
            out += "\\u00";
            out.push_back(hex[c >> 4]);
            out.push_back(hex[c & 0xf]);
        }
    }
}

inline void json_string(std::string& out, std::string_view bytes) {
    out.push_back('"');
    json_escape(out, bytes);
    out.push_back('"');
}

inline std::string fixed6(double value) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.6f", value);
    return buf;
}

inline std::string skip_reason_text(const MergeCase& merge_case) {
    std::string text = to_string(merge_case.skip_reason);
    if (!merge_case.detail.empty()) {
        text += ": ";
        text += merge_case.detail;
    }
    return text;
}

inline void append_action_array(std::string& out, const ActionMultiset& bag) {
    out.push_back('[');
    bool first = true;
    for (const auto& [action, count] : bag) {
        if (!first) out.push_back(',');
        first = false;
        out += "{\"kind\":";
        json_string(out, action.kind == Action::Kind::add ? "add" : "remove");
        out += ",\"path\":";
        json_string(out, action.path);
        out += ",\"line\":";
        json_string(out, action.line);
        out += ",\"count\":";
        out += std::to_string(count);
        out.push_back('}');
    }
    out.push_back(']');
}

inline void csv_field(std::string& out, std::string_view text) {
    if (text.find_first_of(",\"\n\r") == std::string_view::npos) {
        out += text;
        return;
    }
    out.push_back('"');
    for (char c : text) {
        if (c == '"') out.push_back('"');
        out.push_back(c);
    }
    out.push_back('"');
}

}  // namespace detail

// One JSON object per merge, keys in a fixed order so output is
// byte-reproducible.  Skipped merges keep the full key set with null
// metrics.  metric_view drops the unwanted metric fields; the three action
// counts always stay.
inline std::string to_json_lines(const std::vector<MergeAnalysis>& analyses,
                                 MetricView view, bool dump_actions = false) {
    const bool absolute = view != MetricView::normalized;
    const bool normalized = view != MetricView::absolute;

    std::string out;
    for (const MergeAnalysis& analysis : analyses) {
        const MergeCase& mc = analysis.merge_case;
        const EffortRecord* rec =
            analysis.record.has_value() ? &*analysis.record : nullptr;

        out += "{\"merge\":";
        detail::json_string(out, mc.merge_id);
        out += ",\"parents\":[";
        for (std::size_t i = 0; i < mc.parent_ids.size(); ++i) {
            if (i > 0) out.push_back(',');
            detail::json_string(out, mc.parent_ids[i]);
        }
        out += "],\"base\":";
        if (mc.base_id.empty()) out += "null";
        else detail::json_string(out, mc.base_id);
        out += ",\"status\":";
        detail::json_string(out, rec ? "analyzed" : "skipped");
        out += ",\"skip_reason\":";
        if (rec) out += "null";
        else detail::json_string(out, detail::skip_reason_text(mc));
        out += ",\"base_ambiguous\":";
        out += mc.base_ambiguous ? "true" : "false";

        auto int_field = [&](const char* name, std::uint64_t value) {
            out.push_back(',');
            out.push_back('"');
            out += name;
            out += "\":";
            if (rec) out += std::to_string(value);
            else out += "null";
        };
        auto float_field = [&](const char* name, double value) {
            out.push_back(',');
            out.push_back('"');
            out += name;
            out += "\":";
            if (rec) out += detail::fixed6(value);
            else out += "null";
        };

        int_field("branch1_actions", rec ? rec->branch1_size : 0);
        int_field("branch2_actions", rec ? rec->branch2_size : 0);
        int_field("merge_actions", rec ? rec->merge_size : 0);
        if (absolute) {
            int_field("rework", rec ? rec->rework : 0);
            int_field("wasted", rec ? rec->wasted : 0);
            int_field("extra", rec ? rec->extra : 0);
        }
        if (normalized) {
            float_field("rework_normalized", rec ? rec->rework_normalized : 0);
            float_field("wasted_normalized", rec ? rec->wasted_normalized : 0);
            float_field("extra_normalized", rec ? rec->extra_normalized : 0);
        }
        int_field("warnings",
                  rec ? static_cast<std::uint64_t>(rec->warnings.size()) : 0);

        if (dump_actions && analysis.actions) {
            const ActionSets& sets = *analysis.actions;
            out += ",\"actions\":{";
            const std::pair<const char*, const ActionMultiset*> parts[] = {
                {"branch1", &sets.branch1}, {"branch2", &sets.branch2},
                {"merge", &sets.merge},     {"rework", &sets.rework},
                {"wasted", &sets.wasted},   {"extra", &sets.extra},
            };
            for (std::size_t i = 0; i < 6; ++i) {
                if (i > 0) out.push_back(',');
                out.push_back('"');
                out += parts[i].first;
                out += "\":";
                detail::append_action_array(out, *parts[i].second);
            }
            out.push_back('}');
        }
        out += "}\n";
    }
    return out;
}

inline std::string to_csv(const std::vector<MergeAnalysis>& analyses,
                          MetricView view) {
    const bool absolute = view != MetricView::normalized;
    const bool normalized = view != MetricView::absolute;

    std::string out = "merge,parent1,parent2,base,status,skip_reason,base_ambiguous,"
                      "branch1_actions,branch2_actions,merge_actions";
    if (absolute) out += ",rework,wasted,extra";
    if (normalized) out += ",rework_normalized,wasted_normalized,extra_normalized";
    out += ",warnings\n";

    for (const MergeAnalysis& analysis : analyses) {
        const MergeCase& mc = analysis.merge_case;
        const EffortRecord* rec =
            analysis.record.has_value() ? &*analysis.record : nullptr;

        detail::csv_field(out, mc.merge_id);
        out.push_back(',');
        detail::csv_field(out, mc.parent_ids.size() > 0 ? mc.parent_ids[0] : "");
        out.push_back(',');
        detail::csv_field(out, mc.parent_ids.size() > 1 ? mc.parent_ids[1] : "");
        out.push_back(',');
        detail::csv_field(out, mc.base_id);
        out.push_back(',');
        out += rec ? "analyzed" : "skipped";
        out.push_back(',');
        if (!rec) detail::csv_field(out, detail::skip_reason_text(mc));
        out.push_back(',');
        out += mc.base_ambiguous ? "true" : "false";

        auto int_cell = [&](std::uint64_t value) {
            out.push_back(',');
            if (rec) out += std::to_string(value);
        };
        auto float_cell = [&](double value) {
            out.push_back(',');
            if (rec) out += detail::fixed6(value);
        };
        int_cell(rec ? rec->branch1_size : 0);
        int_cell(rec ? rec->branch2_size : 0);
        int_cell(rec ? rec->merge_size : 0);
        if (absolute) {
            int_cell(rec ? rec->rework : 0);
            int_cell(rec ? rec->wasted : 0);
            int_cell(rec ? rec->extra : 0);
        }
        if (normalized) {
            float_cell(rec ? rec->rework_normalized : 0);
            float_cell(rec ? rec->wasted_normalized : 0);
            float_cell(rec ? rec->extra_normalized : 0);
        }
        int_cell(rec ? static_cast<std::uint64_t>(rec->warnings.size()) : 0);
        out.push_back('\n');
    }
    return out;
}

inline std::string aggregate_to_json(const AggregateReport& report) {
    std::string out = "{\"total_commits\":" + std::to_string(report.total_commits);
    out += ",\"merge_commits\":" + std::to_string(report.merge_commits);
    out += ",\"analyzed\":" + std::to_string(report.analyzed);
    out += ",\"skipped_octopus\":" + std::to_string(report.skipped_octopus);
    out += ",\"skipped_no_base\":" + std::to_string(report.skipped_no_base);
    out += ",\"errored\":" + std::to_string(report.errored);
    out += ",\"empty\":";
    out += report.empty ? "true" : "false";
    const std::pair<const char*, const MetricAggregate*> metrics[] = {
        {"rework", &report.rework}, {"wasted", &report.wasted},
        {"extra", &report.extra}};
    for (const auto& [name, m] : metrics) {
        out += ",\"";
        out += name;
        out += "\":{\"occurrence_pct\":" + detail::fixed6(m->occurrence_pct);
        out += ",\"mean_actions\":" + detail::fixed6(m->mean_actions) + "}";
    }
    out += "}\n";
    return out;
}

inline std::string aggregate_to_csv(const AggregateReport& report) {
    std::string out =
        "total_commits,merge_commits,analyzed,skipped_octopus,skipped_no_base,"
        "errored,empty,rework_occurrence_pct,rework_mean_actions,"
        "wasted_occurrence_pct,wasted_mean_actions,extra_occurrence_pct,"
        "extra_mean_actions\n";
    out += std::to_string(report.total_commits) + ',';
    out += std::to_string(report.merge_commits) + ',';
    out += std::to_string(report.analyzed) + ',';
    out += std::to_string(report.skipped_octopus) + ',';
    out += std::to_string(report.skipped_no_base) + ',';
    out += std::to_string(report.errored) + ',';
    out += report.empty ? "true" : "false";
    for (const MetricAggregate* m : {&report.rework, &report.wasted, &report.extra}) {
        out += ',' + detail::fixed6(m->occurrence_pct);
        out += ',' + detail::fixed6(m->mean_actions);
    }
    out += '\n';
    return out;
}

// 0 clean, 1 bad arguments, 2 repository access failed, 3 finished but some
// commits could not be analyzed.
inline int exit_code_for(const RunOutcome& outcome) {
    return outcome.had_errors ? 3 : 0;
}

}  // namespace merge_effort
