#include <alrnn/checkpoint.hpp>
#include <alrnn/runner.hpp>

#include <json.hpp>

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <map>
#include <ostream>
#include <sstream>

namespace alrnn {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

ScaleReading parse_reading(const std::string& s)
{
    if (s == "variance") return ScaleReading::variance;
    if (s == "stddev" || s == "sd") return ScaleReading::stddev;
    throw ConfigError("config: data.scale_reading must be variance or stddev, got '" + s + "'");
}

HeaderPolicy parse_header(const std::string& s)
{
    if (s == "none") return HeaderPolicy::none;
    if (s == "skip") return HeaderPolicy::skip;
    if (s == "detect") return HeaderPolicy::detect;
    throw ConfigError("config: data.header must be none, skip or detect, got '" + s + "'");
}

BenchmarkSet parse_set(const std::string& s)
{
    if (s == "synthetic_t10") return BenchmarkSet::synthetic_t10;
    if (s == "sp500") return BenchmarkSet::sp500;
    if (s == "synthetic_t500") return BenchmarkSet::synthetic_t500;
    throw ConfigError("config: baseline.set must be synthetic_t10, sp500 or synthetic_t500");
}

SyntheticSpec synthetic_from(const Config& cfg)
{
    SyntheticSpec s;
    s.dims = {cfg.get_int("data.n"), cfg.get_int("data.m"), cfg.get_int("data.r"),
              cfg.get_int("data.t_len")};
    s.weight_scale = cfg.get_double("data.weight_scale");
    s.noise_scale = cfg.get_double("data.noise_scale");
    s.reading = parse_reading(cfg.get("data.scale_reading", "variance"));
    s.input_low = cfg.get_double("data.input_low", -1.0);
    s.input_high = cfg.get_double("data.input_high", 1.0);
    if (!cfg.has("data.seed")) throw ConfigError("config: missing required key 'data.seed'");
    s.seed = cfg.get_u64("data.seed");
    return s;
}

void write_file(const fs::path& p, const std::string& text)
{
    std::ofstream out(p, std::ios::binary);
    if (!out) throw ConfigError("cannot write '" + p.string() + "'");
    out << text;
}

std::string hex64(std::uint64_t v)
{
    char buf[24];
    std::snprintf(buf, sizeof(buf), "%016llx", static_cast<unsigned long long>(v));
    return buf;
}

} // namespace

void check_config_keys(const Config& cfg)
{
    static const std::vector<std::string> known{
        "preset", "seed", "method", "activation", "init", "timing", "label",
        "data.*", "model.r", "reg.*", "alm.*", "bcd.*", "baseline.*"};
    const auto bad = cfg.unknown_keys(known);
    if (!bad.empty()) {
        std::string msg = "config: unknown key(s):";
        for (const auto& k : bad) msg += " " + k;
        throw ConfigError(msg);
    }
}

ExperimentData build_dataset(const Config& cfg)
{
    ExperimentData out;
    out.source = cfg.get("data.source", "synthetic");
    if (out.source == "synthetic") {
        const SyntheticSpec spec = synthetic_from(cfg);
        SyntheticData syn = generate_synthetic(spec);
        out.data = std::move(syn.data);
        out.truth = std::move(syn.truth);
        out.scale_reading = spec.reading == ScaleReading::variance ? "variance" : "stddev";
    } else if (out.source == "csv") {
        out.data = ingest_csv_file(cfg.get("data.path"), cfg.get_int("data.n"),
                                   cfg.get_int("data.m"),
                                   parse_header(cfg.get("data.header", "detect")));
    } else {
        throw ConfigError("config: data.source must be synthetic or csv, got '" + out.source + "'");
    }
    const std::string stdz = cfg.get("data.standardize", "none");
    if (stdz == "train") {
        out.data = standardize(out.data, StandardizeOrder::train_window).first;
    } else if (stdz == "full") {
        out.data = standardize(out.data, StandardizeOrder::full_series).first;
    } else if (stdz != "none") {
        throw ConfigError("config: data.standardize must be none, train or full");
    }
    return out;
}

RegWeights regularization_from(const Config& cfg, const Dims& dims)
{
    RegWeights w = RegWeights::from_tau(cfg.get_double("reg.tau"), dims, cfg.get_double("reg.l6"));
    w.l1 = cfg.get_double("reg.l1", w.l1);
    w.l2 = cfg.get_double("reg.l2", w.l2);
    w.l3 = cfg.get_double("reg.l3", w.l3);
    w.l4 = cfg.get_double("reg.l4", w.l4);
    w.l5 = cfg.get_double("reg.l5", w.l5);
    w.validate();
    return w;
}

AlmConfig alm_config_from(const Config& cfg)
{
    AlmConfig a;
    a.gamma0 = cfg.get_double("alm.gamma0", a.gamma0);
    a.eps0 = cfg.get_double("alm.eps0", a.eps0);
    a.eta1 = cfg.get_double("alm.eta1", a.eta1);
    a.eta2 = cfg.get_double("alm.eta2", a.eta2);
    a.eta3 = cfg.get_double("alm.eta3", a.eta3);
    a.eta4 = cfg.get_double("alm.eta4", a.eta4);
    a.max_outer = cfg.get_int("alm.max_outer", a.max_outer);
    a.gamma_cap = cfg.get_double("alm.gamma_cap", a.gamma_cap);
    const std::string mode = cfg.get("alm.mode", "fixed");
    if (mode != "fixed" && mode != "tolerance") {
        throw ConfigError("config: alm.mode must be fixed or tolerance, got '" + mode + "'");
    }
    a.tolerance_mode = mode == "tolerance";
    a.feas_tol = cfg.get_double("alm.feas_tol", a.feas_tol);
    a.kkt_tol = cfg.get_double("alm.kkt_tol", a.kkt_tol);
    a.validate();
    return a;
}

BcdConfig bcd_config_from(const Config& cfg)
{
    BcdConfig b;
    b.mu = cfg.get_double("bcd.mu", b.mu);
    b.max_inner = cfg.get_int("bcd.max_inner", b.max_inner);
    b.big_gamma = cfg.get_double("bcd.big_gamma", b.big_gamma);
    b.record_trace = cfg.get_bool("bcd.record_trace", true);
    b.validate();
    return b;
}

OptimizerSpec optimizer_from(const Config& cfg, OptimizerKind kind, const InitSpec& init)
{
    OptimizerSpec o;
    o.kind = kind;
    const std::optional<BenchmarkSet> set =
        cfg.has("baseline.set") ? std::optional(parse_set(cfg.get("baseline.set"))) : std::nullopt;
    if (cfg.has("baseline.lr")) {
        o.learning_rate = cfg.get_double("baseline.lr");
    } else if (set) {
        o.learning_rate = tuned_hyper(kind, *set, init).learning_rate;
    } else {
        throw ConfigError("config: set baseline.lr or baseline.set");
    }
    if (cfg.has("baseline.clip")) {
        o.clip_norm = cfg.get_double("baseline.clip");
    } else if (set && kind == OptimizerKind::gdc) {
        o.clip_norm = tuned_hyper(kind, *set, init).clip_norm;
    }
    o.momentum = cfg.get_double("baseline.momentum", o.momentum);
    o.batch_size = cfg.get_int("baseline.batch", set ? default_batch_size(*set) : o.batch_size);
    o.epochs = cfg.get_int("baseline.epochs", o.epochs);
    o.seed = cfg.get_u64("seed");
    o.validate();
    return o;
}

std::uint64_t cmd_generate(const Config& cfg, const std::string& out_dir)
{
    check_config_keys(cfg);
    const ExperimentData ed = build_dataset(cfg);
    fs::create_directories(out_dir);

    std::ostringstream csv;
    write_csv(csv, ed.data);
    const std::string text = csv.str();
    write_file(fs::path(out_dir) / "dataset.csv", text);
    if (ed.truth) {
        save_checkpoint((fs::path(out_dir) / "truth.ckpt").string(),
                        {*ed.truth, Activation::relu()});
    }
    const std::uint64_t sum = fnv1a(text);

    json manifest;
    manifest["schema"] = "alrnn-dataset";
    manifest["schema_version"] = 1;
    manifest["source"] = ed.source;
    manifest["n"] = ed.data.x.rows();
    manifest["m"] = ed.data.y.rows();
    manifest["t_len"] = ed.data.steps();
    manifest["t1"] = ed.data.t1;
    if (ed.truth) manifest["scale_reading"] = ed.scale_reading;
    manifest["config"] = cfg.values();
    manifest["checksum_fnv1a64"] = hex64(sum);
    write_file(fs::path(out_dir) / "manifest.json", manifest.dump(2) + "\n");
    return sum;
}

namespace {

json alm_record_json(const RunRecord& r, bool timing)
{
    json j;
    j["type"] = "alm";
    j["outer_iter"] = r.outer_iter;
    j["inner_iters"] = r.inner_iters;
    j["al_value"] = r.al_value;
    j["feas_vio"] = r.feas_vio;
    j["kkt_res"] = r.kkt_res;
    j["gamma"] = r.gamma;
    j["eps"] = r.eps;
    j["xi_norm"] = r.xi_norm;
    j["zeta_norm"] = r.zeta_norm;
    j["train_err"] = r.train_err;
    j["test_err"] = r.test_err;
    j["inner_converged"] = r.inner_converged;
    j["restarted"] = r.restarted;
    j["inner_bound"] = r.inner_bound;
    j["min_slack"] = r.min_slack;
    if (timing) j["wall_ms"] = r.wall_ms;
    return j;
}

json epoch_record_json(const EpochRecord& r, bool timing)
{
    json j;
    j["type"] = "epoch";
    j["epoch"] = r.epoch;
    j["objective"] = r.objective;
    j["train_err"] = r.train_err;
    j["test_err"] = r.test_err;
    j["grad_norm"] = r.grad_norm;
    if (timing) j["wall_ms"] = r.wall_ms;
    return j;
}

} // namespace

TrainOutcome cmd_train(const Config& cfg, const std::string& out_dir)
{
    check_config_keys(cfg);
    const std::string method = cfg.get("method", "alm");
    const bool is_alm = method == "alm";
    const OptimizerKind kind = is_alm ? OptimizerKind::gd : parse_optimizer(method);
    if (!cfg.has("seed")) throw ConfigError("config: missing required key 'seed'");
    const std::uint64_t seed = cfg.get_u64("seed");
    const Activation act = Activation::parse(cfg.get("activation", "relu"));
    const InitSpec init = InitSpec::parse(cfg.get("init", "normal:0.1"));
    const bool timing = cfg.get_bool("timing", false);

    const ExperimentData ed = build_dataset(cfg);
    const Dims dims{static_cast<int>(ed.data.x.rows()), static_cast<int>(ed.data.y.rows()),
                    cfg.get_int("model.r"), ed.data.t1};
    const RegWeights lambdas = regularization_from(cfg, dims);
    const RnnParams params0 = init_params(dims, init, seed);

    fs::create_directories(out_dir);
    std::ostringstream lines;
    json header;
    header["type"] = "header";
    header["schema"] = "alrnn-metrics";
    header["schema_version"] = kMetricsSchemaVersion;
    header["method"] = method;
    header["label"] = cfg.get("label", method);
    header["seed"] = seed;
    header["activation"] = act.name();
    header["init"] = init.name();
    header["data_source"] = ed.source;
    if (ed.truth) header["scale_reading"] = ed.scale_reading;
    header["config"] = cfg.values();
    lines << header.dump() << '\n';

    TrainOutcome outcome;
    json summary;
    summary["type"] = "summary";
    RnnParams final_params;
    if (is_alm) {
        const AlmResult res = alm_train(ed.data, lambdas, alm_config_from(cfg),
                                        bcd_config_from(cfg), params0, act, timing);
        for (const auto& r : res.records) lines << alm_record_json(r, timing).dump() << '\n';
        outcome.status = to_string(res.status);
        final_params = res.point.params;
        summary["warnings"] = res.warnings;
        summary["final_feas_vio"] = res.records.back().feas_vio;
        summary["final_kkt_res"] = res.records.back().kkt_res;
        summary["records"] = res.records.size();
        outcome.final_train_err = res.records.back().train_err;
        outcome.final_test_err = res.records.back().test_err;
    } else {
        const BaselineResult res = baseline_train(ed.data, lambdas, optimizer_from(cfg, kind, init),
                                                  params0, act, timing);
        for (const auto& r : res.records) lines << epoch_record_json(r, timing).dump() << '\n';
        outcome.status = res.diverged ? "diverged" : "completed";
        final_params = res.params;
        summary["records"] = res.records.size();
        outcome.final_train_err = res.records.back().train_err;
        outcome.final_test_err = res.records.back().test_err;
    }
    outcome.exit_code = outcome.status == "diverged" ? 2 : 0;
    summary["status"] = outcome.status;
    summary["final_train_err"] = outcome.final_train_err;
    summary["final_test_err"] = outcome.final_test_err;
    lines << summary.dump() << '\n';

    write_file(fs::path(out_dir) / "metrics.jsonl", lines.str());
    save_checkpoint((fs::path(out_dir) / "checkpoint.txt").string(), {final_params, act});
    return outcome;
}

namespace {

struct RunFile
{
    std::string dir;
    std::string label;
    std::string method;
    bool complete = false;
    double train_err = 0.0;
    double test_err = 0.0;
    std::vector<double> feas;
};

RunFile read_run(const std::string& dir)
{
    RunFile run;
    run.dir = dir;
    std::ifstream in(fs::path(dir) / "metrics.jsonl");
    if (!in) return run;
    std::string line;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        json j;
        try {
            j = json::parse(line);
        } catch (const json::exception&) {
            return run; // truncated file: leave as incomplete
        }
        const std::string type = j.value("type", "");
        if (type == "header") {
            run.label = j.value("label", j.value("method", ""));
            run.method = j.value("method", "");
        } else if (type == "alm") {
            run.feas.push_back(j.value("feas_vio", 0.0));
        } else if (type == "summary") {
            run.complete = j.value("status", "") != "diverged";
            run.train_err = j.value("final_train_err", 0.0);
            run.test_err = j.value("final_test_err", 0.0);
        }
    }
    return run;
}

std::pair<double, double> mean_sd(const std::vector<double>& v)
{
    if (v.empty()) return {0.0, 0.0};
    double mean = 0.0;
    for (const double x : v) mean += x;
    mean /= static_cast<double>(v.size());
    double var = 0.0;
    for (const double x : v) var += (x - mean) * (x - mean);
    return {mean, std::sqrt(var / static_cast<double>(v.size()))};
}

std::string fmt(double v)
{
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.6g", v);
    return buf;
}

} // namespace

std::vector<ReportRow> cmd_report(const std::vector<std::string>& run_dirs,
                                  const std::string& out_dir, std::ostream& table)
{
    if (run_dirs.empty()) throw ConfigError("report: no run directories given");
    std::vector<RunFile> runs;
    for (const auto& d : run_dirs) runs.push_back(read_run(d));

    std::map<std::string, std::vector<const RunFile*>> groups;
    for (const auto& r : runs) groups[r.label.empty() ? "unknown" : r.label].push_back(&r);

    std::vector<ReportRow> rows;
    for (const auto& [label, members] : groups) {
        ReportRow row;
        row.label = label;
        std::vector<double> tr, te;
        for (const RunFile* r : members) {
            if (!r->complete) {
                ++row.incomplete;
                continue;
            }
            tr.push_back(r->train_err);
            te.push_back(r->test_err);
        }
        row.runs = static_cast<int>(tr.size());
        std::tie(row.train_mean, row.train_sd) = mean_sd(tr);
        std::tie(row.test_mean, row.test_sd) = mean_sd(te);
        rows.push_back(row);
    }

    std::ostringstream tsv;
    tsv << "label\truns\tincomplete\ttrain_mean\ttrain_sd\ttest_mean\ttest_sd\n";
    table << std::left << std::setw(16) << "label" << std::setw(6) << "runs" << std::setw(26)
          << "TrainErr" << "TestErr\n";
    for (const auto& r : rows) {
        tsv << r.label << '\t' << r.runs << '\t' << r.incomplete << '\t' << fmt(r.train_mean) << '\t'
            << fmt(r.train_sd) << '\t' << fmt(r.test_mean) << '\t' << fmt(r.test_sd) << '\n';
        table << std::left << std::setw(16) << r.label << std::setw(6) << r.runs << std::setw(26)
              << (fmt(r.train_mean) + " +- " + fmt(r.train_sd))
              << (fmt(r.test_mean) + " +- " + fmt(r.test_sd));
        if (r.incomplete > 0) table << "  (" << r.incomplete << " incomplete)";
        table << '\n';
    }
    for (const auto& r : runs) {
        if (!r.complete) table << "incomplete run: " << r.dir << '\n';
    }

    std::ostringstream feas;
    std::vector<const RunFile*> alm_runs;
    std::size_t longest = 0;
    for (const auto& r : runs) {
        if (r.feas.empty()) continue;
        alm_runs.push_back(&r);
        longest = std::max(longest, r.feas.size());
    }
    feas << "outer_iter";
    for (const RunFile* r : alm_runs) feas << '\t' << fs::path(r->dir).filename().string();
    feas << '\n';
    for (std::size_t k = 0; k < longest; ++k) {
        feas << k;
        for (const RunFile* r : alm_runs) feas << '\t' << (k < r->feas.size() ? fmt(r->feas[k]) : "");
        feas << '\n';
    }

    fs::create_directories(out_dir);
    write_file(fs::path(out_dir) / "summary.tsv", tsv.str());
    write_file(fs::path(out_dir) / "feasvio.tsv", feas.str());
    return rows;
}

} // namespace alrnn
