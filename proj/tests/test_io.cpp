#include <alrnn/checkpoint.hpp>
#include <alrnn/runner.hpp>

#include "helpers.hpp"

#include <gtest/gtest.h>
#include <json.hpp>

#include <filesystem>
#include <fstream>
#include <sstream>

using namespace alrnn;
using namespace alrnn::testing;
namespace fs = std::filesystem;
using json = nlohmann::json;

namespace {

fs::path scratch(const std::string& name)
{
    const fs::path p = fs::temp_directory_path() / ("alrnn-test-io-" + name);
    fs::remove_all(p);
    return p;
}

std::string slurp(const fs::path& p)
{
    std::ifstream in(p);
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

Config quick_t10(const std::string& method)
{
    Config c = Config::from_preset("table5.2-synthetic-T10");
    c.set("data.seed", "1");
    c.set("seed", "7");
    c.set("method", method);
    c.set("alm.max_outer", "3");
    c.set("bcd.max_inner", "20");
    c.set("baseline.epochs", "5");
    return c;
}

} // namespace

TEST(Checkpoint, RoundTripIsExact)
{
    Rng rng(60, "ckpt");
    const Checkpoint ck{random_params(rng, 3, 2, 4), Activation::leaky_relu(0.25)};
    std::ostringstream a;
    write_checkpoint(a, ck);
    std::istringstream in(a.str());
    const Checkpoint back = read_checkpoint(in);
    EXPECT_TRUE(back.params.pack() == ck.params.pack());
    EXPECT_EQ(back.act, ck.act);
    std::ostringstream b;
    write_checkpoint(b, back);
    EXPECT_EQ(a.str(), b.str());

    std::istringstream junk("not a checkpoint\n");
    EXPECT_ANY_THROW(read_checkpoint(junk));
}

TEST(Config, ParsePresetAndOverrides)
{
    std::istringstream in("# comment\npreset = table5.2-synthetic-T10\nreg.tau = 2.5  # inline\n"
                          "data.seed=4\n");
    const Config c = Config::parse(in, "test.cfg");
    EXPECT_EQ(c.get_double("reg.tau"), 2.5);
    EXPECT_EQ(c.get_int("data.t_len"), 10);
    EXPECT_EQ(c.get_u64("data.seed"), 4u);
    EXPECT_EQ(c.get("alm.mode"), "fixed");

    std::istringstream bad_line("just words\n");
    EXPECT_THROW(Config::parse(bad_line), ConfigError);
    std::istringstream bad_preset("preset = nope\n");
    EXPECT_THROW(Config::parse(bad_preset), ConfigError);
    Config n;
    n.set("x", "1.5e");
    EXPECT_THROW(n.get_double("x"), ConfigError);
    EXPECT_THROW(n.get_double("missing"), ConfigError);
    n.set("surprise", "1");
    EXPECT_THROW(check_config_keys(n), ConfigError);
    EXPECT_EQ(preset_names().size(), 3u);
}

TEST(Runner, TuningLookupAndOverrides)
{
    Config c = quick_t10("gdc");
    const OptimizerSpec s = optimizer_from(c, OptimizerKind::gdc, InitSpec::parse("he"));
    EXPECT_EQ(s.learning_rate, 1.0);
    EXPECT_EQ(s.clip_norm, 6.0);
    EXPECT_EQ(s.batch_size, 2);
    c.set("baseline.lr", "0.5");
    EXPECT_EQ(optimizer_from(c, OptimizerKind::gdc, InitSpec::parse("he")).learning_rate, 0.5);

    const Dims d{5, 3, 4, 9};
    const RegWeights w = regularization_from(c, d);
    EXPECT_DOUBLE_EQ(w.l2, 1.2 / 16);
    EXPECT_DOUBLE_EQ(w.l6, 1e-8);
    EXPECT_TRUE(alm_config_from(c).eta3 < 1.0);
    c.set("alm.mode", "sometimes");
    EXPECT_THROW(alm_config_from(c), ConfigError);
}

TEST(Generate, ChecksumAndManifest)
{
    const fs::path a = scratch("gen-a"), b = scratch("gen-b");
    Config c = quick_t10("alm");
    const auto s1 = cmd_generate(c, a.string());
    const auto s2 = cmd_generate(c, b.string());
    EXPECT_EQ(s1, s2);
    EXPECT_EQ(slurp(a / "dataset.csv"), slurp(b / "dataset.csv"));
    EXPECT_EQ(fnv1a(slurp(a / "dataset.csv")), s1);
    const json m = json::parse(slurp(a / "manifest.json"));
    EXPECT_EQ(m["t_len"], 10);
    EXPECT_EQ(m["t1"], 9);
    EXPECT_EQ(m["scale_reading"], "variance");
    EXPECT_TRUE(fs::exists(a / "truth.ckpt"));

    Config no_seed = Config::from_preset("table5.2-synthetic-T10");
    EXPECT_THROW(cmd_generate(no_seed, scratch("gen-c").string()), ConfigError);
}

TEST(Generate, CsvSourceWithStandardization)
{
    const fs::path dir = scratch("csv");
    fs::create_directories(dir);
    {
        std::ofstream f(dir / "series.csv");
        f << "a,b\n";
        for (int t = 0; t < 20; ++t) f << t << ',' << 0.5 * t * t << '\n';
    }
    Config c;
    c.set("data.source", "csv");
    c.set("data.path", (dir / "series.csv").string());
    c.set("data.n", "1");
    c.set("data.m", "1");
    c.set("data.standardize", "train");
    const ExperimentData ed = build_dataset(c);
    EXPECT_EQ(ed.data.steps(), 20);
    EXPECT_NEAR(ed.data.x.leftCols(ed.data.t1).mean(), 0.0, 1e-12);
}

TEST(Train, DeterministicStreamsAndSchema)
{
    const std::string schema_text = slurp(ALRNN_SCHEMA_PATH);
    ASSERT_FALSE(schema_text.empty());
    const json schema = json::parse(schema_text);
    std::map<std::string, std::vector<std::string>> required;
    for (const auto& alt : schema["oneOf"]) {
        required[alt["properties"]["type"]["const"]] = alt["required"].get<std::vector<std::string>>();
    }

    for (const std::string method : {"alm", "gd", "adam"}) {
        const fs::path a = scratch("train-a-" + method), b = scratch("train-b-" + method);
        const Config c = quick_t10(method);
        const TrainOutcome ra = cmd_train(c, a.string());
        cmd_train(c, b.string());
        EXPECT_EQ(ra.exit_code, 0);
        EXPECT_EQ(slurp(a / "metrics.jsonl"), slurp(b / "metrics.jsonl")) << method;
        EXPECT_EQ(slurp(a / "checkpoint.txt"), slurp(b / "checkpoint.txt")) << method;

        std::istringstream lines(slurp(a / "metrics.jsonl"));
        std::string line;
        int count = 0;
        while (std::getline(lines, line)) {
            const json j = json::parse(line);
            const std::string type = j.at("type");
            ASSERT_TRUE(required.count(type)) << type;
            for (const auto& key : required[type]) EXPECT_TRUE(j.contains(key)) << type << "." << key;
            EXPECT_FALSE(j.contains("wall_ms"));
            if (count == 0) {
                EXPECT_EQ(type, "header");
                EXPECT_EQ(j["schema_version"], kMetricsSchemaVersion);
            }
            ++count;
        }
        EXPECT_EQ(count, method == "alm" ? 1 + 4 + 1 : 1 + 6 + 1);
    }
}

TEST(Train, ErrorsAreReported)
{
    Config c = quick_t10("alm");
    c.set("method", "lbfgs");
    EXPECT_THROW(cmd_train(c, scratch("bad-method").string()), ConfigError);
    Config no_seed = Config::from_preset("table5.2-synthetic-T10");
    no_seed.set("data.seed", "1");
    EXPECT_THROW(cmd_train(no_seed, scratch("no-seed").string()), ConfigError);
}

TEST(Report, AggregatesByLabel)
{
    const fs::path root = scratch("report");
    std::vector<std::string> dirs;
    for (const std::string method : {"alm", "gd"}) {
        for (const int seed : {1, 2}) {
            Config c = quick_t10(method);
            c.set("seed", std::to_string(seed));
            const fs::path d = root / (method + std::to_string(seed));
            cmd_train(c, d.string());
            dirs.push_back(d.string());
        }
    }
    // a truncated run is flagged and left out
    fs::create_directories(root / "broken");
    std::ofstream(root / "broken" / "metrics.jsonl") << "{\"type\":\"header\",\"label\":\"gd\"}\n{\"type\":";
    dirs.push_back((root / "broken").string());

    std::ostringstream table;
    const auto rows = cmd_report(dirs, (root / "out").string(), table);
    ASSERT_EQ(rows.size(), 2u);
    EXPECT_EQ(rows[0].label, "alm");
    EXPECT_EQ(rows[0].runs, 2);
    EXPECT_EQ(rows[1].label, "gd");
    EXPECT_EQ(rows[1].runs, 2);
    EXPECT_EQ(rows[1].incomplete, 1);
    EXPECT_NE(table.str().find("incomplete run"), std::string::npos);
    EXPECT_TRUE(fs::exists(root / "out" / "summary.tsv"));
    const std::string feas = slurp(root / "out" / "feasvio.tsv");
    EXPECT_EQ(std::count(feas.begin(), feas.end(), '\n'), 5);

    const auto single = cmd_report({dirs[0]}, (root / "single").string(), table);
    ASSERT_EQ(single.size(), 1u);
    EXPECT_EQ(single[0].train_sd, 0.0);
    EXPECT_EQ(single[0].test_sd, 0.0);
}
