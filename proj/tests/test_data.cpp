#include <alrnn/data.hpp>

#include <gtest/gtest.h>

#include <sstream>

using namespace alrnn;

TEST(Synthetic, SmallShapes)
{
    const SyntheticData sd = generate_synthetic(SyntheticSpec::small_t10(1));
    EXPECT_EQ(sd.data.x.rows(), 5);
    EXPECT_EQ(sd.data.x.cols(), 10);
    EXPECT_EQ(sd.data.y.rows(), 3);
    EXPECT_EQ(sd.data.y.cols(), 10);
    EXPECT_EQ(sd.data.t1, 9);
    EXPECT_EQ(sd.truth.hidden_dim(), 4);
    EXPECT_LE(sd.data.x.maxCoeff(), 1.0);
    EXPECT_GE(sd.data.x.minCoeff(), -1.0);
}

TEST(Synthetic, NoiselessReplay)
{
    SyntheticSpec spec = SyntheticSpec::small_t10(9);
    spec.noise_scale = 0.0;
    const SyntheticData sd = generate_synthetic(spec);
    const ForwardResult fw = forward(sd.truth, sd.data.x, Activation::relu());
    EXPECT_EQ((fw.predictions - sd.data.y).cwiseAbs().maxCoeff(), 0.0);
}

TEST(Synthetic, DeterministicPerSeed)
{
    const SyntheticData a = generate_synthetic(SyntheticSpec::small_t10(4));
    const SyntheticData b = generate_synthetic(SyntheticSpec::small_t10(4));
    const SyntheticData c = generate_synthetic(SyntheticSpec::small_t10(5));
    EXPECT_TRUE(a.data.x == b.data.x);
    EXPECT_TRUE(a.data.y == b.data.y);
    EXPECT_FALSE(a.data.x == c.data.x);
}

TEST(Synthetic, ScaleReadings)
{
    SyntheticSpec spec = SyntheticSpec::small_t10(1);
    EXPECT_DOUBLE_EQ(spec.weight_sd(), std::sqrt(0.8));
    spec.reading = ScaleReading::stddev;
    EXPECT_DOUBLE_EQ(spec.weight_sd(), 0.8);
    const SyntheticSpec big = SyntheticSpec::large_t500(1);
    EXPECT_EQ(big.dims.t_len, 500);
    EXPECT_EQ(big.reading, ScaleReading::stddev);
}

TEST(Csv, DirectRead)
{
    std::istringstream in("1,2\n3,4\n5,6\n");
    const SequenceDataset d = ingest_csv(in, 1, 1, HeaderPolicy::none);
    EXPECT_EQ(d.x, (Mat(1, 3) << 1, 3, 5).finished());
    EXPECT_EQ(d.y, (Mat(1, 3) << 2, 4, 6).finished());
    EXPECT_EQ(d.t1, 2);
}

TEST(Csv, ErrorsNameTheCell)
{
    std::istringstream bad("1,2\nx,4\n5,6\n");
    try {
        ingest_csv(bad, 1, 1, HeaderPolicy::none);
        FAIL() << "expected an error";
    } catch (const std::exception& e) {
        EXPECT_NE(std::string(e.what()).find("row 2, col 1"), std::string::npos) << e.what();
    }
    std::istringstream nan("1,2\n3,nan\n5,6\n");
    EXPECT_ANY_THROW(ingest_csv(nan, 1, 1, HeaderPolicy::none));
    std::istringstream missing("1,2\n3,\n5,6\n");
    EXPECT_ANY_THROW(ingest_csv(missing, 1, 1, HeaderPolicy::none));
    std::istringstream short_row("1,2\n3\n5,6\n");
    EXPECT_ANY_THROW(ingest_csv(short_row, 1, 1, HeaderPolicy::none));
}

TEST(Csv, HeaderDetectionAndRoundTrip)
{
    std::ostringstream out;
    out << "open,high,low,close,vol,a,b,c,d,e,f,target\n";
    for (int t = 0; t < 437; ++t) {
        for (int j = 0; j < 12; ++j) out << (j ? "," : "") << 0.5 * t + j;
        out << '\n';
    }
    std::istringstream in(out.str());
    const SequenceDataset d = ingest_csv(in, 11, 1, HeaderPolicy::detect);
    EXPECT_EQ(d.x.rows(), 11);
    EXPECT_EQ(d.y.rows(), 1);
    EXPECT_EQ(d.steps(), 437);
    EXPECT_EQ(d.t1, 393);

    std::ostringstream again;
    write_csv(again, d);
    std::istringstream back(again.str());
    const SequenceDataset e = ingest_csv(back, 11, 1, HeaderPolicy::none);
    EXPECT_TRUE(e.x == d.x && e.y == d.y);
}

TEST(Standardize, ConstantMeanAndInverse)
{
    SequenceDataset d;
    d.x = Mat(2, 6);
    d.x << 1, 1, 1, 1, 1, 1, 0, 2, 4, 6, 8, 100;
    d.y = Mat(1, 6);
    d.y << 3, -1, 2, 5, 0, 7;
    d.t1 = 5;
    const auto [z, st] = standardize(d, StandardizeOrder::train_window);
    EXPECT_EQ(z.x.row(0).cwiseAbs().maxCoeff(), 0.0);
    EXPECT_NEAR(z.x.row(1).leftCols(5).mean(), 0.0, 1e-12);
    EXPECT_NEAR(z.y.leftCols(5).mean(), 0.0, 1e-12);
    const SequenceDataset back = st.invert(z);
    EXPECT_LE((back.x.row(1) - d.x.row(1)).norm() / d.x.row(1).norm(), 1e-12);
    EXPECT_LE((back.y - d.y).norm() / d.y.norm(), 1e-12);

    const auto [full, stf] = standardize(d, StandardizeOrder::full_series);
    EXPECT_NEAR(full.x.row(1).mean(), 0.0, 1e-12);
    EXPECT_NE(stf.x_mean[1], st.x_mean[1]);
}

TEST(Standardize, TestRowsDoNotLeak)
{
    SyntheticData sd = generate_synthetic(SyntheticSpec::small_t10(2));
    const auto [a, sa] = standardize(sd.data, StandardizeOrder::train_window);
    sd.data.x.col(9).array() += 50.0;
    sd.data.y.col(9).array() -= 20.0;
    const auto [b, sb] = standardize(sd.data, StandardizeOrder::train_window);
    EXPECT_TRUE(sa.x_mean == sb.x_mean && sa.x_sd == sb.x_sd);
    EXPECT_TRUE(sa.y_mean == sb.y_mean && sa.y_sd == sb.y_sd);
}

TEST(Fnv, KnownValues)
{
    EXPECT_EQ(fnv1a(""), 0xcbf29ce484222325ULL);
    EXPECT_EQ(fnv1a("a"), 0xaf63dc4c8601ec8cULL);
}
