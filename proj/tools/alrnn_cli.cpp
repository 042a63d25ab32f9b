// alrnn: generate datasets, train (ALM or a BPTT baseline) and summarize runs.
#include <alrnn/runner.hpp>

#include <CLI11.hpp>

#include <cstdlib>
#include <filesystem>
#include <iostream>
#include <mutex>
#include <thread>

namespace fs = std::filesystem;
using namespace alrnn;

namespace {

struct CommonArgs
{
    std::string config;
    std::string preset;
    std::string out;
    std::vector<std::string> sets;
};

Config load_config(const CommonArgs& args)
{
    Config cfg;
    if (!args.preset.empty()) cfg.apply_preset(args.preset);
    if (!args.config.empty()) {
        const Config file = Config::load(args.config);
        for (const auto& [k, v] : file.values()) cfg.set(k, v, args.config);
    }
    if (args.preset.empty() && args.config.empty()) {
        throw ConfigError("need --config or --preset");
    }
    for (const auto& kv : args.sets) {
        const auto eq = kv.find('=');
        if (eq == std::string::npos) throw ConfigError("--set expects key=value, got '" + kv + "'");
        cfg.set(kv.substr(0, eq), kv.substr(eq + 1), "--set");
    }
    return cfg;
}

fs::path out_root()
{
    const char* env = std::getenv("ALRNN_OUT_ROOT");
    return env && *env ? fs::path(env) : fs::path("runs");
}

std::pair<std::uint64_t, std::uint64_t> parse_seed_range(const std::string& text)
{
    const auto dots = text.find("..");
    if (dots == std::string::npos) throw ConfigError("--seeds expects a..b, got '" + text + "'");
    const std::uint64_t a = std::stoull(text.substr(0, dots));
    const std::uint64_t b = std::stoull(text.substr(dots + 2));
    if (b < a) throw ConfigError("--seeds: empty range '" + text + "'");
    return {a, b};
}

} // namespace

int main(int argc, char** argv)
{
    CLI::App app{"Augmented Lagrangian training of Elman RNNs"};
    app.require_subcommand(1);

    CommonArgs gen_args;
    std::string gen_seed;
    auto* gen = app.add_subcommand("generate", "write a dataset and its manifest");
    gen->add_option("--config", gen_args.config, "config file");
    gen->add_option("--preset", gen_args.preset, "built-in preset");
    gen->add_option("--seed", gen_seed, "data seed (overrides data.seed)");
    gen->add_option("--out", gen_args.out, "output directory");
    gen->add_option("--set", gen_args.sets, "key=value override")->take_all();

    CommonArgs train_args;
    std::string method, activation, seed, seeds;
    auto* train = app.add_subcommand("train", "train one model or a seed range");
    train->add_option("--config", train_args.config, "config file");
    train->add_option("--preset", train_args.preset, "built-in preset");
    train->add_option("--method", method, "alm, gd, gdc, gdnm, sgd or adam")
        ->check(CLI::IsMember({"alm", "gd", "gdc", "gdnm", "sgd", "adam"}));
    train->add_option("--activation", activation, "relu, leaky_relu:<slope> or elu");
    auto* seed_opt = train->add_option("--seed", seed, "run seed");
    train->add_option("--seeds", seeds, "seed range a..b, run in parallel")->excludes(seed_opt);
    train->add_option("--out", train_args.out, "output directory");
    train->add_option("--set", train_args.sets, "key=value override")->take_all();

    std::vector<std::string> run_dirs;
    std::string report_out;
    auto* report = app.add_subcommand("report", "summarize finished runs");
    report->add_option("runs", run_dirs, "run directories")->required();
    report->add_option("--out", report_out, "where to write summary.tsv and feasvio.tsv");

    CLI11_PARSE(app, argc, argv);

    try {
        if (*gen) {
            Config cfg = load_config(gen_args);
            if (!gen_seed.empty()) cfg.set("data.seed", gen_seed, "--seed");
            const std::string out =
                gen_args.out.empty()
                    ? (out_root() / ("data-seed" + cfg.get("data.seed", "unset"))).string()
                    : gen_args.out;
            const auto sum = cmd_generate(cfg, out);
            std::cout << "wrote " << out << " (checksum " << std::hex << sum << std::dec << ")\n";
            return 0;
        }
        if (*train) {
            Config cfg = load_config(train_args);
            if (!method.empty()) cfg.set("method", method, "--method");
            if (!activation.empty()) cfg.set("activation", activation, "--activation");
            if (!seed.empty()) cfg.set("seed", seed, "--seed");
            const std::string m = cfg.get("method", "alm");

            if (seeds.empty()) {
                const std::string out =
                    train_args.out.empty()
                        ? (out_root() / (m + "-seed" + cfg.get("seed", "unset"))).string()
                        : train_args.out;
                const TrainOutcome res = cmd_train(cfg, out);
                std::cout << out << ": " << res.status << " TrainErr " << res.final_train_err
                          << " TestErr " << res.final_test_err << '\n';
                return res.exit_code;
            }

            const auto [first, last] = parse_seed_range(seeds);
            const fs::path base = train_args.out.empty() ? out_root() / (m + "-seeds") : fs::path(train_args.out);
            std::mutex io;
            int worst = 0;
            std::vector<std::thread> pool;
            const unsigned width = std::max(1u, std::thread::hardware_concurrency());
            std::uint64_t next = first;
            auto worker = [&] {
                while (true) {
                    std::uint64_t s;
                    {
                        std::lock_guard lock(io);
                        if (next > last) return;
                        s = next++;
                    }
                    Config local = cfg;
                    local.set("seed", std::to_string(s), "--seeds");
                    const std::string out = (base / ("seed-" + std::to_string(s))).string();
                    try {
                        const TrainOutcome res = cmd_train(local, out);
                        std::lock_guard lock(io);
                        std::cout << out << ": " << res.status << " TrainErr "
                                  << res.final_train_err << " TestErr " << res.final_test_err
                                  << '\n';
                        worst = std::max(worst, res.exit_code);
                    } catch (const std::exception& e) {
                        std::lock_guard lock(io);
                        std::cerr << out << ": error: " << e.what() << '\n';
                        worst = std::max(worst, 1);
                    }
                }
            };
            for (unsigned i = 0; i < width; ++i) pool.emplace_back(worker);
            for (auto& t : pool) t.join();
            return worst;
        }
        if (*report) {
            const std::string out = report_out.empty() ? (out_root() / "report").string() : report_out;
            cmd_report(run_dirs, out, std::cout);
            return 0;
        }
    } catch (const ConfigError& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 1;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 1;
    }
    return 0;
}
