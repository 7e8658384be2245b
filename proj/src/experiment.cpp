#include "tempshift/experiment.hpp"

#include "tempshift/civil_time.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <limits>
#include <sstream>
#include <stdexcept>
#include <thread>

#include <json.hpp>

#include "tempshift/drift.hpp"

namespace tempshift {

namespace {

std::string trim(const std::string& s) {
    std::size_t a = s.find_first_not_of(" \t\r\n");
    if (a == std::string::npos) return "";
    std::size_t b = s.find_last_not_of(" \t\r\n");
    return s.substr(a, b - a + 1);
}

std::vector<std::string> split_list(const std::string& s, char delim) {
    std::vector<std::string> out;
    std::string item;
    std::istringstream in(s);
    while (std::getline(in, item, delim)) {
        item = trim(item);
        if (!item.empty()) out.push_back(item);
    }
    return out;
}

bool parse_bool(const std::string& key, const std::string& v) {
    if (v == "true" || v == "1" || v == "yes" || v == "on") return true;
    if (v == "false" || v == "0" || v == "no" || v == "off") return false;
    throw std::invalid_argument("config: " + key + " is not a boolean: " + v);
}

double parse_double(const std::string& key, const std::string& v) {
    try {
        std::size_t pos = 0;
        const double d = std::stod(v, &pos);
        if (pos != v.size()) throw std::invalid_argument(v);
        return d;
    } catch (const std::exception&) {
        throw std::invalid_argument("config: " + key + " is not a number: " + v);
    }
}

std::int64_t parse_i64(const std::string& key, const std::string& v) {
    try {
        std::size_t pos = 0;
        const std::int64_t n = std::stoll(v, &pos);
        if (pos != v.size()) throw std::invalid_argument(v);
        return n;
    } catch (const std::exception&) {
        throw std::invalid_argument("config: " + key + " is not an integer: " + v);
    }
}

std::uint64_t parse_u64(const std::string& key, const std::string& v) {
    const std::int64_t n = parse_i64(key, v);
    if (n < 0) throw std::invalid_argument("config: " + key + " must be >= 0");
    return static_cast<std::uint64_t>(n);
}

// Unix seconds, given either as an integer or an ISO-8601 datetime.
std::int64_t parse_time(const std::string& key, const std::string& v) {
    if (const auto t = parse_iso8601(v)) return *t;
    return parse_i64(key, v);
}

std::string format_g17(double v) {
    if (std::isnan(v)) return "nan";
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

} // namespace

std::map<std::string, std::string> parse_config_text(const std::string& text) {
    std::map<std::string, std::string> kv;
    std::istringstream in(text);
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        const std::size_t hash = line.find('#');
        if (hash != std::string::npos) line.erase(hash);
        line = trim(line);
        if (line.empty()) continue;
        const std::size_t eq = line.find('=');
        if (eq == std::string::npos)
            throw std::invalid_argument("config line " + std::to_string(line_no) +
                                        ": expected 'key = value'");
        const std::string key = trim(line.substr(0, eq));
        if (key.empty())
            throw std::invalid_argument("config line " + std::to_string(line_no) +
                                        ": empty key");
        kv[key] = trim(line.substr(eq + 1));
    }
    return kv;
}

std::map<std::string, std::string> load_config_file(const std::string& path) {
    return parse_config_text(read_text_file(path));
}

void apply_override(std::map<std::string, std::string>& kv,
                    const std::string& assignment) {
    const std::size_t eq = assignment.find('=');
    if (eq == std::string::npos || eq == 0)
        throw std::invalid_argument("--set expects key=value, got: " + assignment);
    kv[trim(assignment.substr(0, eq))] = trim(assignment.substr(eq + 1));
}

ExperimentConfig config_from_map(const std::map<std::string, std::string>& kv) {
    ExperimentConfig cfg;
    bool synth_w_given = false;
    for (const auto& [key, v] : kv) {
        if (key == "dataset.source") {
            if (v != "synth" && v != "csv")
                throw std::invalid_argument("config: dataset.source must be synth|csv");
            cfg.source = v;
        } else if (key == "dataset.name") {
            cfg.dataset_name = v;
        } else if (key == "dataset.path") {
            cfg.csv_path = v;
        } else if (key == "dataset.timestamp_column") {
            cfg.schema.timestamp_column = v;
        } else if (key == "dataset.label_column") {
            cfg.schema.label_column = v;
        } else if (key == "dataset.feature_columns") {
            cfg.schema.feature_columns = split_list(v, ',');
        } else if (key == "dataset.task") {
            cfg.schema.task = task_from_name(v);
        } else if (key == "dataset.drop_bad_rows") {
            cfg.schema.drop_bad_rows = parse_bool(key, v);
        } else if (key == "dataset.allow_missing") {
            cfg.schema.allow_missing = parse_bool(key, v);
        } else if (key == "synth.n") {
            cfg.synth.n = parse_u64(key, v);
        } else if (key == "synth.d") {
            cfg.synth.d = parse_u64(key, v);
        } else if (key == "synth.w") {
            cfg.synth.w.clear();
            for (const std::string& tok : split_list(v, ','))
                cfg.synth.w.push_back(parse_double(key, tok));
            synth_w_given = true;
        } else if (key == "synth.trend_coeff") {
            cfg.synth.trend_coeff = parse_double(key, v);
        } else if (key == "synth.components") {
            // period:amplitude[:phase], e.g. "week:1.0:0.5,day:0.3"
            cfg.synth.components.clear();
            for (const std::string& tok : split_list(v, ',')) {
                const std::vector<std::string> parts = split_list(tok, ':');
                if (parts.size() < 2 || parts.size() > 3)
                    throw std::invalid_argument(
                        "config: synth.components entries are period:amplitude[:phase]");
                PeriodicComponent p;
                p.period = period_from_name(parts[0]);
                p.amplitude = parse_double(key, parts[1]);
                p.phase = parts.size() == 3 ? parse_double(key, parts[2]) : 0.0;
                cfg.synth.components.push_back(p);
            }
        } else if (key == "synth.noise_std") {
            cfg.synth.noise_std = parse_double(key, v);
        } else if (key == "synth.start") {
            cfg.synth.start = parse_time(key, v);
        } else if (key == "synth.end") {
            cfg.synth.end = parse_time(key, v);
        } else if (key == "synth.task") {
            cfg.synth.task = task_from_name(v);
        } else if (key == "synth.seed") {
            cfg.synth.seed = parse_u64(key, v);
        } else if (key == "split.test_fraction") {
            cfg.test_fraction = parse_double(key, v);
        } else if (key == "split.presets") {
            cfg.presets.clear();
            for (const std::string& tok : split_list(v, ','))
                cfg.presets.push_back(split_name_from_str(tok));
        } else if (key == "split.baseline") {
            cfg.baseline = split_name_from_str(v);
        } else if (key == "split.seed") {
            cfg.split_seed = parse_u64(key, v);
        } else if (key == "model.kind") {
            cfg.model_kind = model_kind_from_str(v);
        } else if (key == "model.hidden") {
            cfg.hidden.clear();
            for (const std::string& tok : split_list(v, ','))
                cfg.hidden.push_back(parse_u64(key, tok));
        } else if (key == "model.dropout") {
            cfg.dropout = parse_double(key, v);
        } else if (key == "temporal.mode") {
            cfg.encoder.mode = encoder_mode_from_str(v);
        } else if (key == "temporal.periods") {
            // period:order pairs, e.g. "week:4,day:4"
            cfg.encoder.spec.components.clear();
            for (const std::string& tok : split_list(v, ',')) {
                const std::vector<std::string> parts = split_list(tok, ':');
                if (parts.size() != 2)
                    throw std::invalid_argument(
                        "config: temporal.periods entries are period:order");
                cfg.encoder.spec.components.push_back(
                    {period_from_name(parts[0]),
                     static_cast<int>(parse_i64(key, parts[1]))});
            }
        } else if (key == "temporal.trend") {
            cfg.encoder.trend = parse_bool(key, v);
        } else if (key == "temporal.d_embedding") {
            cfg.encoder.d_embedding = static_cast<int>(parse_i64(key, v));
        } else if (key == "temporal.learnable_frequencies") {
            cfg.encoder.learnable_frequencies = parse_bool(key, v);
        } else if (key == "temporal.attachment") {
            cfg.encoder.attachment = attachment_from_str(v);
        } else if (key == "train.learning_rate") {
            cfg.train.learning_rate = parse_double(key, v);
        } else if (key == "train.weight_decay") {
            cfg.train.weight_decay = parse_double(key, v);
        } else if (key == "train.batch_size") {
            cfg.train.batch_size = parse_u64(key, v);
        } else if (key == "train.patience") {
            cfg.train.patience = parse_u64(key, v);
        } else if (key == "train.max_epochs") {
            cfg.train.max_epochs = parse_u64(key, v);
        } else if (key == "seeds") {
            cfg.seeds.clear();
            for (const std::string& tok : split_list(v, ','))
                cfg.seeds.push_back(parse_u64(key, tok));
        } else if (key == "jobs") {
            cfg.jobs = std::max<std::size_t>(1, parse_u64(key, v));
        } else if (key == "output.dir") {
            cfg.out_dir = v;
        } else if (key == "diagnostics.heatmaps") {
            cfg.heatmaps = parse_bool(key, v);
        } else if (key == "diagnostics.loss_curves") {
            cfg.loss_curves = parse_bool(key, v);
        } else if (key == "diagnostics.pgm") {
            cfg.write_pgm = parse_bool(key, v);
        } else if (key == "diagnostics.slice_width") {
            cfg.slice_width = parse_i64(key, v);
        } else if (key == "diagnostics.smoothing_sigma") {
            cfg.smoothing_sigma = parse_double(key, v);
        } else {
            throw std::invalid_argument("config: unknown key: " + key);
        }
    }
    if (cfg.source == "synth" && !synth_w_given)
        cfg.synth.w.assign(cfg.synth.d, 1.0);
    if (cfg.seeds.empty())
        throw std::invalid_argument("config: seeds must be non-empty");
    if (cfg.presets.empty())
        throw std::invalid_argument("config: split.presets must be non-empty");
    if (std::find(cfg.presets.begin(), cfg.presets.end(), cfg.baseline) ==
        cfg.presets.end())
        throw std::invalid_argument("config: split.baseline must be one of the presets");
    return cfg;
}

std::string method_label(const ExperimentConfig& cfg) {
    std::string label = model_kind_str(cfg.model_kind);
    if (cfg.encoder.mode != EncoderMode::None)
        label += "+" + encoder_mode_str(cfg.encoder.mode);
    return label;
}

TemporalDataset load_experiment_dataset(const ExperimentConfig& cfg) {
    if (cfg.source == "synth") return generate(cfg.synth);
    if (cfg.csv_path.empty())
        throw std::invalid_argument("config: dataset.path required for csv source");
    TemporalDataset ds = load_csv(cfg.csv_path, cfg.schema);
    return sort_by_time(ds);
}

namespace {

struct RunOutput {
    bool ok = false;
    double value = std::numeric_limits<double>::quiet_NaN();
    std::string error;
    FitResult fit;   // retained for the preset's first seed only
    bool kept = false;
};

struct PresetData {
    SplitPlan plan;
    TemporalDataset ds; // imputed + standardized for this preset's train rows
    Standardizer std;
};

RunOutput execute_run(const ExperimentConfig& cfg, const PresetData& pd,
                      std::uint64_t seed, bool keep_fit) {
    RunOutput out;
    const std::size_t d_in = pd.ds.n_features() + cfg.encoder.output_width();
    std::vector<std::size_t> dims;
    dims.push_back(d_in);
    if (cfg.model_kind == ModelKind::Mlp)
        dims.insert(dims.end(), cfg.hidden.begin(), cfg.hidden.end());
    dims.push_back(1);

    std::vector<std::int64_t> train_ts;
    train_ts.reserve(pd.plan.train_idx.size());
    for (std::size_t r : pd.plan.train_idx) train_ts.push_back(pd.ds.timestamps[r]);

    const EncoderParams enc = init_encoder(cfg.encoder, train_ts, seed);
    const PredictorState model =
        init_predictor(cfg.model_kind, dims, seed, cfg.dropout);
    TrainConfig tc = cfg.train;
    tc.seed = seed;

    FitResult fit = train(model, cfg.encoder, enc, pd.ds, pd.plan, tc, pd.std);

    const std::vector<double> preds = predict(fit.best_model, cfg.encoder,
                                              fit.best_encoder, pd.ds,
                                              pd.plan.test_idx, pd.std);
    std::vector<double> targets(pd.plan.test_idx.size());
    if (pd.ds.task == Task::Classification) {
        for (std::size_t i = 0; i < targets.size(); ++i)
            targets[i] = pd.ds.labels[pd.plan.test_idx[i]];
        out.value = auc(preds, targets);
    } else {
        for (std::size_t i = 0; i < targets.size(); ++i)
            targets[i] = pd.std.destandardize_label(pd.ds.labels[pd.plan.test_idx[i]]);
        out.value = rmse(preds, targets);
    }
    if (keep_fit) {
        out.fit = std::move(fit);
        out.kept = true;
    }
    out.ok = true;
    return out;
}

void write_loss_curve(const ExperimentConfig& cfg, const PresetData& pd,
                      const FitResult& fit, const TimeSliceIndex& slices,
                      const std::string& path) {
    std::vector<std::size_t> all(pd.ds.n_rows());
    for (std::size_t i = 0; i < all.size(); ++i) all[i] = i;
    const std::vector<double> losses = per_sample_losses(
        fit.best_model, cfg.encoder, fit.best_encoder, pd.ds, all, pd.std);
    const std::vector<double> raw = loss_over_time(losses, slices, 0.0);
    const std::vector<double> smooth =
        loss_over_time(losses, slices, cfg.smoothing_sigma);

    std::string csv = "slice_start,count,mean_loss,smoothed_loss\n";
    for (std::size_t s = 0; s < slices.n_slices(); ++s) {
        csv += std::to_string(slices.boundaries[s]);
        csv += "," + std::to_string(slices.ranges[s].second - slices.ranges[s].first);
        csv += "," + format_g17(raw[s]);
        csv += "," + format_g17(smooth[s]) + "\n";
    }
    atomic_write_file(path, csv);
}

Matrix standardized_features_with_label(const TemporalDataset& raw,
                                        std::size_t pre_test_rows) {
    std::vector<std::size_t> rows(pre_test_rows);
    for (std::size_t i = 0; i < pre_test_rows; ++i) rows[i] = i;
    TemporalDataset copy = raw;
    impute_with_mean(copy, rows);
    const Standardizer stats = fit_standardizer(copy, rows);
    stats.apply(copy);
    Matrix data(copy.n_rows(), copy.n_features() + 1);
    for (std::size_t i = 0; i < copy.n_rows(); ++i) {
        std::copy_n(copy.features.row_ptr(i), copy.n_features(), data.row_ptr(i));
        data(i, copy.n_features()) = copy.labels[i];
    }
    return data;
}

} // namespace

ExperimentResult run_experiment(const ExperimentConfig& cfg) {
    const TemporalDataset ds = load_experiment_dataset(cfg);
    const std::string method = method_label(cfg);
    const std::string metric = ds.task == Task::Classification ? "auc" : "rmse";

    std::vector<PresetData> prep(cfg.presets.size());
    for (std::size_t p = 0; p < cfg.presets.size(); ++p) {
        prep[p].plan = preset_split(cfg.presets[p], ds, cfg.test_fraction,
                                    cfg.split_seed);
        TemporalDataset d = ds;
        if (cfg.source == "csv" && cfg.schema.allow_missing)
            impute_with_mean(d, prep[p].plan.train_idx);
        validate_finite(d);
        prep[p].std = fit_standardizer(d, prep[p].plan.train_idx);
        prep[p].std.apply(d);
        prep[p].ds = std::move(d);
    }

    // All (preset x seed) cells, preset-major. Workers claim cells through an
    // atomic cursor; every output lands in its own slot so scheduling cannot
    // change any artifact.
    const std::size_t n_runs = cfg.presets.size() * cfg.seeds.size();
    std::vector<RunOutput> outputs(n_runs);
    std::atomic<std::size_t> cursor{0};
    auto worker = [&]() {
        for (;;) {
            const std::size_t i = cursor.fetch_add(1);
            if (i >= n_runs) return;
            const std::size_t p = i / cfg.seeds.size();
            const std::size_t s = i % cfg.seeds.size();
            try {
                outputs[i] = execute_run(cfg, prep[p], cfg.seeds[s], s == 0);
            } catch (const std::exception& e) {
                outputs[i].ok = false;
                outputs[i].error = e.what();
            }
        }
    };
    const std::size_t n_threads = std::min(cfg.jobs, n_runs);
    if (n_threads <= 1) {
        worker();
    } else {
        std::vector<std::thread> pool;
        for (std::size_t t = 0; t < n_threads; ++t) pool.emplace_back(worker);
        for (std::thread& t : pool) t.join();
    }

    ExperimentResult result;
    for (std::size_t p = 0; p < cfg.presets.size(); ++p)
        for (std::size_t s = 0; s < cfg.seeds.size(); ++s) {
            const RunOutput& out = outputs[p * cfg.seeds.size() + s];
            if (out.ok) {
                result.scores.push_back({method, split_name_str(cfg.presets[p]),
                                         cfg.dataset_name, ds.task, cfg.seeds[s],
                                         out.value});
            } else {
                result.errors.push_back(
                    {split_name_str(cfg.presets[p]), cfg.seeds[s], out.error});
            }
        }

    namespace fs = std::filesystem;
    fs::create_directories(cfg.out_dir);
    const auto out_path = [&](const std::string& name) {
        return (fs::path(cfg.out_dir) / name).string();
    };

    atomic_write_file(out_path("scores.csv"), scores_to_csv(result.scores));
    for (std::size_t p = 0; p < cfg.presets.size(); ++p)
        atomic_write_file(
            out_path("splitplan_" + split_name_str(cfg.presets[p]) + ".json"),
            split_plan_to_json(prep[p].plan, ds, false));

    // summary.json
    nlohmann::json summary;
    summary["dataset"] = {{"name", cfg.dataset_name},
                          {"task", task_name(ds.task)},
                          {"n_rows", ds.n_rows()},
                          {"n_features", ds.n_features()}};
    summary["method"] = method;
    summary["metric"] = metric;
    summary["baseline"] = split_name_str(cfg.baseline);
    summary["seeds"] = cfg.seeds;

    std::map<std::string, std::vector<double>> by_preset;
    for (const ScoreRow& row : result.scores) by_preset[row.split].push_back(row.value);
    double base_mean = std::numeric_limits<double>::quiet_NaN();
    {
        const auto it = by_preset.find(split_name_str(cfg.baseline));
        if (it != by_preset.end()) base_mean = mean_std(it->second).first;
    }
    for (std::size_t p = 0; p < cfg.presets.size(); ++p) {
        const std::string name = split_name_str(cfg.presets[p]);
        const auto it = by_preset.find(name);
        if (it == by_preset.end()) continue;
        const auto [mu, sigma] = mean_std(it->second);
        nlohmann::json block;
        block["values"] = it->second;
        block["n_completed"] = it->second.size();
        block["mean"] = mu;
        block["std"] = sigma;
        block["rs"] = {robustness_score(mu, sigma, 0), robustness_score(mu, sigma, 1),
                       robustness_score(mu, sigma, 2)};
        if (!std::isnan(base_mean) && base_mean > 0.0)
            block["improvement_vs_baseline"] =
                pct_improvement(base_mean, mu, ds.task);
        summary["presets"][name] = std::move(block);
    }
    atomic_write_file(out_path("summary.json"), summary.dump(2) + "\n");

    // Per-preset diagnostics from the first seed's fitted model.
    if (cfg.heatmaps || cfg.loss_curves) {
        const TimeSliceIndex slices = slice_by_time(ds, cfg.slice_width);
        Matrix raw_data; // shared across presets: standardization is fit on
                         // the pre-test rows, which every preset shares
        if (cfg.heatmaps && prep[0].plan.test_idx.size() < ds.n_rows())
            raw_data = standardized_features_with_label(
                ds, ds.n_rows() - prep[0].plan.test_idx.size());
        for (std::size_t p = 0; p < cfg.presets.size(); ++p) {
            const RunOutput& first = outputs[p * cfg.seeds.size()];
            if (!first.ok || !first.kept) continue;
            const std::string name = split_name_str(cfg.presets[p]);
            try {
            if (cfg.loss_curves)
                write_loss_curve(cfg, prep[p], first.fit, slices,
                                 out_path("loss_curve_" + name + ".csv"));
            if (cfg.heatmaps) {
                const DriftHeatmap raw_map =
                    heatmap(raw_data, slices, HeatmapSource::RawFeatures);
                atomic_write_file(out_path("heatmap_raw_" + name + ".csv"),
                                  heatmap_to_csv(raw_map));
                if (cfg.write_pgm)
                    atomic_write_file(out_path("heatmap_raw_" + name + ".pgm"),
                                      heatmap_to_pgm(raw_map));
                if (cfg.model_kind == ModelKind::Mlp) {
                    std::vector<std::size_t> all(ds.n_rows());
                    for (std::size_t i = 0; i < all.size(); ++i) all[i] = i;
                    const Matrix X = assemble_input(prep[p].ds, all, cfg.encoder,
                                                    first.fit.best_encoder);
                    const Matrix repr =
                        penultimate_representation(first.fit.best_model, X);
                    const DriftHeatmap repr_map =
                        heatmap(repr, slices, HeatmapSource::Representation);
                    atomic_write_file(out_path("heatmap_repr_" + name + ".csv"),
                                      heatmap_to_csv(repr_map));
                    if (cfg.write_pgm)
                        atomic_write_file(out_path("heatmap_repr_" + name + ".pgm"),
                                          heatmap_to_pgm(repr_map));
                }
            }
            } catch (const std::exception& e) {
                result.errors.push_back(
                    {name + " (diagnostics)", cfg.seeds[0], e.what()});
            }
        }
    }

    if (!result.errors.empty()) {
        nlohmann::json manifest = nlohmann::json::array();
        for (const RunError& e : result.errors)
            manifest.push_back(
                {{"preset", e.preset}, {"seed", e.seed}, {"error", e.what}});
        atomic_write_file(out_path("errors.json"), manifest.dump(2) + "\n");
        result.exit_code = 1;
    }
    return result;
}

std::string scores_to_csv(const std::vector<ScoreRow>& rows) {
    std::string out = "method,split,dataset,task,seed,metric,value\n";
    for (const ScoreRow& r : rows) {
        out += r.method + "," + r.split + "," + r.dataset + "," + task_name(r.task) +
               "," + std::to_string(r.seed) + ",";
        out += r.task == Task::Classification ? "auc" : "rmse";
        out += "," + format_g17(r.value) + "\n";
    }
    return out;
}

std::vector<ScoreRow> scores_from_csv(const std::string& text) {
    std::vector<ScoreRow> rows;
    std::istringstream in(text);
    std::string line;
    if (!std::getline(in, line))
        throw std::invalid_argument("scores csv: empty input");
    if (trim(line) != "method,split,dataset,task,seed,metric,value")
        throw std::invalid_argument("scores csv: unexpected header: " + line);
    std::size_t line_no = 1;
    while (std::getline(in, line)) {
        ++line_no;
        if (trim(line).empty()) continue;
        const std::vector<std::string> f = split_list(line, ',');
        if (f.size() != 7)
            throw std::invalid_argument("scores csv line " + std::to_string(line_no) +
                                        ": expected 7 fields");
        ScoreRow r;
        r.method = f[0];
        r.split = f[1];
        r.dataset = f[2];
        r.task = task_from_name(f[3]);
        r.seed = parse_u64("seed", f[4]);
        r.value = parse_double("value", f[6]);
        rows.push_back(std::move(r));
    }
    return rows;
}

namespace {

struct Group {
    Task task = Task::Regression;
    std::vector<double> values;
};

std::map<std::string, Group> group_rows(const std::vector<ScoreRow>& rows) {
    std::map<std::string, Group> groups;
    for (const ScoreRow& r : rows) {
        const std::string key = r.method + "\x1f" + r.dataset;
        Group& g = groups[key];
        if (!g.values.empty() && g.task != r.task)
            throw std::invalid_argument("compare: mixed tasks for " + r.method + "/" +
                                        r.dataset);
        g.task = r.task;
        g.values.push_back(r.value);
    }
    return groups;
}

} // namespace

CompareSummary compare_reports(const std::vector<ScoreRow>& base,
                               const std::vector<ScoreRow>& next) {
    const std::map<std::string, Group> base_groups = group_rows(base);
    const std::map<std::string, Group> next_groups = group_rows(next);
    if (base_groups.empty())
        throw std::invalid_argument("compare: no rows in the baseline report");
    for (const auto& [key, g] : base_groups)
        if (next_groups.find(key) == next_groups.end())
            throw std::invalid_argument("compare: reports cover different datasets");
    if (base_groups.size() != next_groups.size())
        throw std::invalid_argument("compare: reports cover different datasets");

    CompareSummary summary;
    std::map<std::string, std::vector<double>> imps;
    for (const auto& [key, bg] : base_groups) {
        const Group& ng = next_groups.at(key);
        if (ng.task != bg.task)
            throw std::invalid_argument("compare: task mismatch for " + key);
        CompareRow row;
        const std::size_t sep = key.find('\x1f');
        row.method = key.substr(0, sep);
        row.dataset = key.substr(sep + 1);
        row.task = bg.task;
        std::tie(row.base_mean, row.base_std) = mean_std(bg.values);
        std::tie(row.next_mean, row.next_std) = mean_std(ng.values);
        row.improvement = pct_improvement(row.base_mean, row.next_mean, row.task);
        for (int k = 0; k < 3; ++k) {
            row.base_rs[k] = robustness_score(row.base_mean, row.base_std, k);
            row.next_rs[k] = robustness_score(row.next_mean, row.next_std, k);
        }
        const bool next_better = row.task == Task::Classification
                                     ? row.next_mean > row.base_mean
                                     : row.next_mean < row.base_mean;
        const bool tie = row.next_mean == row.base_mean;
        row.base_rank = tie ? 1 : (next_better ? 2 : 1);
        row.next_rank = tie ? 1 : (next_better ? 1 : 2);
        imps[row.method].push_back(row.improvement);
        summary.rows.push_back(std::move(row));
    }
    for (const auto& [m, vals] : imps) {
        double acc = 0.0;
        for (double v : vals) acc += v;
        summary.mean_improvement_by_method[m] =
            acc / static_cast<double>(vals.size());
    }
    return summary;
}

std::string compare_to_text(const CompareSummary& summary) {
    std::string out;
    char buf[256];
    out += "method          dataset              task            base            "
           "next     imp%  ranks\n";
    for (const CompareRow& r : summary.rows) {
        std::snprintf(buf, sizeof(buf),
                      "%-15s %-20s %-6s %8.4f±%-6.4f %8.4f±%-6.4f %+7.2f   %d/%d\n",
                      r.method.c_str(), r.dataset.c_str(),
                      r.task == Task::Classification ? "auc" : "rmse", r.base_mean,
                      r.base_std, r.next_mean, r.next_std, r.improvement,
                      r.base_rank, r.next_rank);
        out += buf;
    }
    for (const auto& [m, imp] : summary.mean_improvement_by_method) {
        std::snprintf(buf, sizeof(buf), "%s: average improvement %+.2f%%\n", m.c_str(),
                      imp);
        out += buf;
    }
    return out;
}

std::string dataset_to_csv(const TemporalDataset& ds) {
    std::string out = "timestamp";
    for (const std::string& name : ds.feature_names) out += "," + name;
    out += ",label\n";
    for (std::size_t i = 0; i < ds.n_rows(); ++i) {
        out += std::to_string(ds.timestamps[i]);
        for (std::size_t j = 0; j < ds.n_features(); ++j)
            out += "," + format_g17(ds.features(i, j));
        out += "," + format_g17(ds.labels[i]) + "\n";
    }
    return out;
}

void atomic_write_file(const std::string& path, const std::string& content) {
    namespace fs = std::filesystem;
    const fs::path target(path);
    if (target.has_parent_path()) fs::create_directories(target.parent_path());
    const fs::path tmp = target.string() + ".tmp";
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        if (!out) throw std::runtime_error("cannot open for writing: " + tmp.string());
        out.write(content.data(),
                  static_cast<std::streamsize>(content.size()));
        if (!out) throw std::runtime_error("write failed: " + tmp.string());
    }
    fs::rename(tmp, target);
}

std::string read_text_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("cannot open file: " + path);
    std::ostringstream buf;
    buf << in.rdbuf();
    return buf.str();
}

} // namespace tempshift
