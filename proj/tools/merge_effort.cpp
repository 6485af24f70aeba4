// merge-effort: per-merge and per-repository effort metrics for git
// histories.  `analyze` prints one JSON (or CSV) record per merge commit;
// `aggregate` folds the same analysis into a repository-level report.

#include <CLI11.hpp>

#include <cstdio>
#include <fstream>
#include <iostream>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "merge_effort/run.hpp"

namespace {

using namespace merge_effort;

struct CliOptions {
    std::string source;
    std::string commits_inline;
    std::string commits_file;
    ActionIdentity identity = ActionIdentity::path_qualified;
    OutputFormat format = OutputFormat::json;
    MetricView metrics = MetricView::both;
    std::string output;
    unsigned jobs = 1;
    bool keep_clone = false;
    bool dump_actions = false;
};

void add_common_options(CLI::App& cmd, CliOptions& opt) {
    cmd.add_option("source", opt.source,
                   "repository path or clone URL")->required();
    auto* inline_opt = cmd.add_option(
        "--commits", opt.commits_inline,
        "comma-separated merge commit hashes (default: all merges)");
    cmd.add_option("--commits-file", opt.commits_file,
                   "file with one commit hash per line")
        ->excludes(inline_opt);

    const std::map<std::string, ActionIdentity> identities{
        {"path", ActionIdentity::path_qualified},
        {"content", ActionIdentity::content_only}};
    cmd.add_option("--identity", opt.identity,
                   "action identity: path (default) or content")
        ->transform(CLI::CheckedTransformer(identities, CLI::ignore_case));

    const std::map<std::string, OutputFormat> formats{
        {"json", OutputFormat::json}, {"csv", OutputFormat::csv}};
    cmd.add_option("--format", opt.format, "output format: json (default) or csv")
        ->transform(CLI::CheckedTransformer(formats, CLI::ignore_case));

    const std::map<std::string, MetricView> views{
        {"absolute", MetricView::absolute},
        {"normalized", MetricView::normalized},
        {"both", MetricView::both}};
    cmd.add_option("--metrics", opt.metrics,
                   "metric view: absolute, normalized or both (default)")
        ->transform(CLI::CheckedTransformer(views, CLI::ignore_case));

    cmd.add_option("--output", opt.output, "write the report here instead of stdout");
    cmd.add_option("--jobs", opt.jobs, "number of merges analyzed in parallel")
        ->check(CLI::Range(1u, 1024u));
    cmd.add_flag("--keep-clone", opt.keep_clone,
                 "keep the temporary clone of a remote source");
}

std::optional<std::vector<std::string>> gather_commits(const CliOptions& opt,
                                                       std::string& problem) {
    if (opt.commits_inline.empty() && opt.commits_file.empty()) return std::nullopt;

    std::vector<std::string> ids;
    auto push_token = [&](std::string token) {
        std::size_t begin = token.find_first_not_of(" \t\r");
        std::size_t end = token.find_last_not_of(" \t\r");
        if (begin == std::string::npos) return;
        ids.push_back(token.substr(begin, end - begin + 1));
    };

    if (!opt.commits_inline.empty()) {
        std::istringstream stream(opt.commits_inline);
        for (std::string token; std::getline(stream, token, ',');) push_token(token);
    } else {
        std::ifstream file(opt.commits_file);
        if (!file) {
            problem = "cannot read commits file: " + opt.commits_file;
            return std::nullopt;
        }
        for (std::string line; std::getline(file, line);) push_token(line);
    }
    return ids;
}

int emit(const std::string& payload, const std::string& output_path) {
    if (output_path.empty()) {
        std::fwrite(payload.data(), 1, payload.size(), stdout);
        std::fflush(stdout);
        return 0;
    }
    std::ofstream file(output_path, std::ios::binary);
    if (!file) {
        std::cerr << "merge-effort: cannot open output file: " << output_path
                  << '\n';
        return 1;
    }
    file.write(payload.data(), static_cast<std::streamsize>(payload.size()));
    file.close();
    if (!file) {
        std::cerr << "merge-effort: failed writing output file: " << output_path
                  << '\n';
        return 1;
    }
    return 0;
}

int run(const CliOptions& opt, bool aggregate_mode) {
    RunConfig config;
    config.source = classify_source(opt.source);
    config.identity = opt.identity;
    config.format = opt.format;
    config.metric_view = opt.metrics;
    config.jobs = opt.jobs;
    config.keep_clone = opt.keep_clone;
    config.dump_actions = opt.dump_actions;

    if (config.dump_actions && config.format == OutputFormat::csv) {
        std::cerr << "merge-effort: --dump-actions requires --format json\n";
        return 1;
    }

    std::string problem;
    config.commits = gather_commits(opt, problem);
    if (!problem.empty()) {
        std::cerr << "merge-effort: " << problem << '\n';
        return 1;
    }

    try {
        RepoHandle repo = RepoHandle::open_or_clone(config.source, config.keep_clone);
        if (config.keep_clone && repo.owns_clone())
            std::cerr << "merge-effort: clone kept at " << repo.root() << '\n';

        RunOutcome outcome = run_analysis(repo, config);

        std::string payload;
        if (aggregate_mode) {
            AggregateReport report =
                aggregate(outcome.analyses, outcome.total_commits);
            payload = config.format == OutputFormat::json
                          ? aggregate_to_json(report)
                          : aggregate_to_csv(report);
        } else {
            payload = config.format == OutputFormat::json
                          ? to_json_lines(outcome.analyses, config.metric_view,
                                          config.dump_actions)
                          : to_csv(outcome.analyses, config.metric_view);
        }

        if (int rc = emit(payload, opt.output); rc != 0) return rc;

        for (const MergeAnalysis& analysis : outcome.analyses) {
            if (analysis.merge_case.is_error())
                std::cerr << "merge-effort: " << analysis.merge_case.merge_id << ": "
                          << detail::skip_reason_text(analysis.merge_case) << '\n';
        }
        return exit_code_for(outcome);
    } catch (const RepoError& e) {
        std::cerr << "merge-effort: " << e.what() << '\n';
        return 2;
    }
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Quantify the effort behind git merges: rework, wasted work "
                 "and extra work, per merge commit or per repository"};
    app.require_subcommand(1);

    CliOptions analyze_opt;
    CLI::App* analyze = app.add_subcommand(
        "analyze", "one record per merge commit");
    add_common_options(*analyze, analyze_opt);
    analyze->add_flag("--dump-actions", analyze_opt.dump_actions,
                      "include the full action multisets in each JSON record");

    CliOptions aggregate_opt;
    CLI::App* aggregate_cmd = app.add_subcommand(
        "aggregate", "repository-level summary of all merges");
    add_common_options(*aggregate_cmd, aggregate_opt);

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        int rc = app.exit(e);
        return rc == 0 ? 0 : 1;
    }

    if (analyze->parsed()) return run(analyze_opt, /*aggregate_mode=*/false);
    return run(aggregate_opt, /*aggregate_mode=*/true);
}
