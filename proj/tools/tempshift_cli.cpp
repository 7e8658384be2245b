// Command-line front end: config-driven experiment runs plus the smaller
// dataset/diagnostic utilities.
#include <algorithm>
#include <cstdio>
#include <filesystem>
#include <map>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "tempshift/drift.hpp"
#include "tempshift/experiment.hpp"

using namespace tempshift;
namespace fs = std::filesystem;

namespace {

struct CommonOpts {
    std::string config_path;
    std::vector<std::string> sets;
    std::string out_dir;
    std::size_t jobs = 0;
    bool drop_bad_rows = false;
};

void add_common(CLI::App* cmd, CommonOpts& opts, bool config_required) {
    auto* c = cmd->add_option("--config", opts.config_path, "config file path");
    if (config_required) c->required();
    cmd->add_option("--set", opts.sets, "override: key=value (repeatable)");
    cmd->add_option("--out", opts.out_dir, "output directory (overrides output.dir)");
    cmd->add_option("--jobs", opts.jobs, "parallel (preset x seed) runs");
    cmd->add_flag("--drop-bad-rows", opts.drop_bad_rows,
                  "skip unparseable CSV rows instead of erroring");
}

ExperimentConfig build_config(const CommonOpts& opts) {
    std::map<std::string, std::string> kv;
    if (!opts.config_path.empty()) kv = load_config_file(opts.config_path);
    for (const std::string& s : opts.sets) apply_override(kv, s);
    if (!opts.out_dir.empty()) kv["output.dir"] = opts.out_dir;
    if (opts.jobs > 0) kv["jobs"] = std::to_string(opts.jobs);
    if (opts.drop_bad_rows) kv["dataset.drop_bad_rows"] = "true";
    return config_from_map(kv);
}

int cmd_run(const CommonOpts& opts) {
    const ExperimentConfig cfg = build_config(opts);
    const ExperimentResult res = run_experiment(cfg);

    std::map<std::string, std::vector<double>> by_preset;
    for (const ScoreRow& r : res.scores) by_preset[r.split].push_back(r.value);
    std::printf("%zu/%zu runs completed; artifacts in %s\n", res.scores.size(),
                res.scores.size() + res.errors.size(), cfg.out_dir.c_str());
    for (const SplitName p : cfg.presets) {
        const std::string name = split_name_str(p);
        const auto it = by_preset.find(name);
        if (it == by_preset.end()) continue;
        const auto [mu, sigma] = mean_std(it->second);
        std::printf("  %-9s %.5f ± %.5f  (%zu seeds)\n", name.c_str(), mu, sigma,
                    it->second.size());
    }
    for (const RunError& e : res.errors)
        std::fprintf(stderr, "error: preset %s seed %llu: %s\n", e.preset.c_str(),
                     static_cast<unsigned long long>(e.seed), e.what.c_str());
    return res.exit_code;
}

int cmd_synth_gen(const CommonOpts& opts) {
    const ExperimentConfig cfg = build_config(opts);
    const TemporalDataset ds = generate(cfg.synth);
    const std::string dir = cfg.out_dir;
    const std::string base = (fs::path(dir) / cfg.dataset_name).string();
    atomic_write_file(base + ".csv", dataset_to_csv(ds));
    atomic_write_file(base + "_config.json", synth_config_to_json(cfg.synth) + "\n");
    std::printf("wrote %s.csv (%zu rows) and %s_config.json\n", base.c_str(),
                ds.n_rows(), base.c_str());
    return 0;
}

int cmd_heatmap(const CommonOpts& opts, std::size_t max_lag) {
    const ExperimentConfig cfg = build_config(opts);
    const TemporalDataset ds = load_experiment_dataset(cfg);

    // Standardize on the pre-test block, append the label column, slice.
    const auto [trainval, test] = make_test_holdout(ds, cfg.test_fraction);
    std::vector<std::size_t> pre_test(trainval.size());
    for (std::size_t i = 0; i < pre_test.size(); ++i) pre_test[i] = trainval.begin + i;
    TemporalDataset copy = ds;
    impute_with_mean(copy, pre_test);
    const Standardizer stats = fit_standardizer(copy, pre_test);
    stats.apply(copy);
    Matrix data(copy.n_rows(), copy.n_features() + 1);
    for (std::size_t i = 0; i < copy.n_rows(); ++i) {
        std::copy_n(copy.features.row_ptr(i), copy.n_features(), data.row_ptr(i));
        data(i, copy.n_features()) = copy.labels[i];
    }

    const TimeSliceIndex slices = slice_by_time(ds, cfg.slice_width);
    const DriftHeatmap H = heatmap(data, slices, HeatmapSource::RawFeatures);
    atomic_write_file((fs::path(cfg.out_dir) / "heatmap_raw.csv").string(),
                      heatmap_to_csv(H));
    if (cfg.write_pgm)
        atomic_write_file((fs::path(cfg.out_dir) / "heatmap_raw.pgm").string(),
                          heatmap_to_pgm(H));

    const std::size_t lag = std::min<std::size_t>(max_lag, H.n_slices() - 1);
    const std::vector<double> profile = band_profile(H, lag);
    std::printf("%zu slices of %lld s; band profile over lags 0..%zu:\n",
                H.n_slices(), static_cast<long long>(cfg.slice_width), lag);
    for (std::size_t l = 0; l <= lag; ++l)
        std::printf("  lag %3zu  %.6g\n", l, profile[l]);
    const std::vector<std::size_t> periods = detect_periods(profile);
    std::printf("detected periods (slice lags):");
    for (const std::size_t p : periods) std::printf(" %zu", p);
    std::printf("%s\n", periods.empty() ? " none" : "");
    return 0;
}

std::vector<ScoreRow> filter_split(std::vector<ScoreRow> rows, const std::string& split) {
    if (split.empty()) return rows;
    std::vector<ScoreRow> kept;
    for (ScoreRow& r : rows)
        if (r.split == split) kept.push_back(std::move(r));
    return kept;
}

int cmd_compare(const std::string& base_path, const std::string& next_path,
                const std::string& base_split, const std::string& next_split) {
    const auto base = filter_split(scores_from_csv(read_text_file(base_path)), base_split);
    const auto next = filter_split(scores_from_csv(read_text_file(next_path)), next_split);
    const CompareSummary summary = compare_reports(base, next);
    std::fputs(compare_to_text(summary).c_str(), stdout);
    return 0;
}

int cmd_split_inspect(const CommonOpts& opts) {
    const ExperimentConfig cfg = build_config(opts);
    const TemporalDataset ds = load_experiment_dataset(cfg);
    std::vector<SplitPlan> plans;
    for (const SplitName p : cfg.presets) {
        plans.push_back(preset_split(p, ds, cfg.test_fraction, cfg.split_seed));
        const SplitPlan& plan = plans.back();
        std::printf("%-9s train %6zu rows, val %5zu, test %5zu, "
                    "last pre-test t=%lld\n",
                    split_name_str(p).c_str(), plan.train_idx.size(),
                    plan.val_idx.size(), plan.test_idx.size(),
                    static_cast<long long>(plan.t_train_boundary));
    }
    const std::vector<std::string> violations = verify_plan_relations(plans);
    if (violations.empty()) {
        std::printf("all split relations hold\n");
        return 0;
    }
    for (const std::string& v : violations)
        std::fprintf(stderr, "violated: %s\n", v.c_str());
    return 1;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"temporal-shift training, splitting, and drift diagnostics"};
    app.require_subcommand(1);

    CommonOpts run_opts, synth_opts, heat_opts, inspect_opts;
    std::string compare_base, compare_next;
    std::size_t heat_max_lag = 30;

    CLI::App* run = app.add_subcommand("run", "run a config-driven experiment");
    add_common(run, run_opts, true);

    CLI::App* synth =
        app.add_subcommand("synth-gen", "generate a synthetic dataset + sidecar config");
    add_common(synth, synth_opts, false);

    CLI::App* heat =
        app.add_subcommand("heatmap", "raw feature+label drift heatmap of a dataset");
    add_common(heat, heat_opts, false);
    heat->add_option("--max-lag", heat_max_lag, "band profile depth (slices)");

    CLI::App* compare =
        app.add_subcommand("compare", "compare two score reports (baseline vs new)");
    std::string compare_base_split, compare_next_split;
    compare->add_option("base", compare_base, "baseline scores.csv")->required();
    compare->add_option("next", compare_next, "new scores.csv")->required();
    compare->add_option("--base-split", compare_base_split,
                        "keep only this split's rows from the baseline report");
    compare->add_option("--next-split", compare_next_split,
                        "keep only this split's rows from the new report");

    CLI::App* inspect =
        app.add_subcommand("split-inspect", "print split plans and relation checks");
    add_common(inspect, inspect_opts, false);

    CLI11_PARSE(app, argc, argv);

    try {
        if (run->parsed()) return cmd_run(run_opts);
        if (synth->parsed()) return cmd_synth_gen(synth_opts);
        if (heat->parsed()) return cmd_heatmap(heat_opts, heat_max_lag);
        if (compare->parsed())
            return cmd_compare(compare_base, compare_next, compare_base_split,
                               compare_next_split);
        if (inspect->parsed()) return cmd_split_inspect(inspect_opts);
    } catch (const std::exception& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 1;
    }
    return 0;
}
