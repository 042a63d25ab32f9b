#include <alrnn/data.hpp>
#include <alrnn/rng.hpp>

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <istream>
#include <ostream>
#include <vector>

namespace alrnn {

double SyntheticSpec::weight_sd() const
{
    return reading == ScaleReading::variance ? std::sqrt(weight_scale) : weight_scale;
}

double SyntheticSpec::noise_sd() const
{
    return reading == ScaleReading::variance ? std::sqrt(noise_scale) : noise_scale;
}

void SyntheticSpec::validate() const
{
    dims.validate();
    if (dims.t_len < 2) throw ConfigError("synthetic: T must be >= 2 to split");
    if (!(weight_scale > 0.0)) throw ConfigError("synthetic: weight scale must be > 0");
    if (!(noise_scale >= 0.0)) throw ConfigError("synthetic: noise scale must be >= 0");
    if (!(input_low < input_high)) throw ConfigError("synthetic: input_low must be < input_high");
}

SyntheticSpec SyntheticSpec::small_t10(std::uint64_t seed)
{
    SyntheticSpec s;
    s.dims = {5, 3, 4, 10};
    s.weight_scale = 0.8;
    s.noise_scale = 1e-3;
    s.seed = seed;
    return s;
}

SyntheticSpec SyntheticSpec::large_t500(std::uint64_t seed)
{
    SyntheticSpec s;
    s.dims = {80, 30, 100, 500};
    s.weight_scale = 0.05;
    s.noise_scale = 1e-5;
    s.reading = ScaleReading::stddev;
    s.seed = seed;
    return s;
}

SyntheticData generate_synthetic(const SyntheticSpec& spec)
{
    spec.validate();
    const Dims& d = spec.dims;
    Rng truth_rng(spec.seed, "synthetic.truth");
    Rng input_rng(spec.seed, "synthetic.input");
    Rng noise_rng(spec.seed, "synthetic.noise");

    const double sd = spec.weight_sd();
    auto draw = [&](Eigen::Index rows, Eigen::Index cols) {
        Mat m(rows, cols);
        for (Eigen::Index j = 0; j < cols; ++j) {
            for (Eigen::Index i = 0; i < rows; ++i) m(i, j) = truth_rng.normal(sd);
        }
        return m;
    };
    SyntheticData out;
    RnnParams& p = out.truth;
    p.a_mat = draw(d.m, d.r);
    p.w_mat = draw(d.r, d.r);
    p.v_mat = draw(d.r, d.n);
    p.b_vec = draw(d.r, 1).col(0);
    p.c_vec = draw(d.m, 1).col(0);

    Mat x(d.n, d.t_len);
    for (Eigen::Index j = 0; j < x.cols(); ++j) {
        for (Eigen::Index i = 0; i < x.rows(); ++i) {
            x(i, j) = input_rng.uniform(spec.input_low, spec.input_high);
        }
    }
    Mat y = forward(p, x, Activation::relu()).predictions;
    const double noise_sd = spec.noise_sd();
    if (noise_sd > 0.0) {
        for (Eigen::Index j = 0; j < y.cols(); ++j) {
            for (Eigen::Index i = 0; i < y.rows(); ++i) y(i, j) += noise_rng.normal(noise_sd);
        }
    }
    out.data = {std::move(x), std::move(y), default_split(d.t_len)};
    return out;
}

namespace {

std::vector<std::string_view> split_commas(std::string_view line)
{
    std::vector<std::string_view> cells;
    std::size_t pos = 0;
    while (true) {
        const auto comma = line.find(',', pos);
        cells.push_back(line.substr(pos, comma == std::string_view::npos ? line.npos : comma - pos));
        if (comma == std::string_view::npos) break;
        pos = comma + 1;
    }
    return cells;
}

std::string_view trim(std::string_view s)
{
    const auto b = s.find_first_not_of(" \t\r");
    if (b == std::string_view::npos) return {};
    const auto e = s.find_last_not_of(" \t\r");
    return s.substr(b, e - b + 1);
}

bool parse_cell(std::string_view cell, double& value)
{
    cell = trim(cell);
    if (cell.empty()) return false;
    if (cell.front() == '+') cell.remove_prefix(1);
    const auto [ptr, ec] = std::from_chars(cell.data(), cell.data() + cell.size(), value);
    return ec == std::errc() && ptr == cell.data() + cell.size();
}

} // namespace

SequenceDataset ingest_csv(std::istream& in, int n, int m, HeaderPolicy header)
{
    if (n < 1 || m < 1) throw ConfigError("csv: n and m must be >= 1");
    const int width = n + m;
    std::vector<std::vector<double>> rows;
    std::string line;
    int row_no = 0;
    while (std::getline(in, line)) {
        ++row_no;
        if (trim(line).empty()) continue;
        const auto cells = split_commas(line);
        if (row_no == 1 && header == HeaderPolicy::skip) continue;
        if (row_no == 1 && header == HeaderPolicy::detect) {
            double probe = 0.0;
            const bool numeric = std::all_of(cells.begin(), cells.end(),
                                             [&](std::string_view c) { return parse_cell(c, probe); });
            if (!numeric) continue;
        }
        if (static_cast<int>(cells.size()) != width) {
            throw ConfigError("csv: row " + std::to_string(row_no) + " has " +
                              std::to_string(cells.size()) + " columns, expected " +
                              std::to_string(width));
        }
        std::vector<double> vals(width);
        for (int c = 0; c < width; ++c) {
            const std::string where =
                "row " + std::to_string(row_no) + ", col " + std::to_string(c + 1);
            if (trim(cells[c]).empty()) throw ConfigError("csv: missing value at " + where);
            if (!parse_cell(cells[c], vals[c])) {
                throw ConfigError("csv: non-numeric value '" + std::string(trim(cells[c])) +
                                  "' at " + where);
            }
            if (!std::isfinite(vals[c])) throw ConfigError("csv: non-finite value at " + where);
        }
        rows.push_back(std::move(vals));
    }
    const int t_len = static_cast<int>(rows.size());
    if (t_len < 2) throw ConfigError("csv: need at least 2 data rows, got " + std::to_string(t_len));
    SequenceDataset ds;
    ds.x.resize(n, t_len);
    ds.y.resize(m, t_len);
    for (int t = 0; t < t_len; ++t) {
        for (int i = 0; i < n; ++i) ds.x(i, t) = rows[t][i];
        for (int i = 0; i < m; ++i) ds.y(i, t) = rows[t][n + i];
    }
    ds.t1 = default_split(t_len);
    return ds;
}

SequenceDataset ingest_csv_file(const std::string& path, int n, int m, HeaderPolicy header)
{
    std::ifstream in(path);
    if (!in) throw ConfigError("csv: cannot open '" + path + "'");
    return ingest_csv(in, n, m, header);
}

void write_csv(std::ostream& out, const SequenceDataset& data)
{
    char buf[40];
    for (int t = 0; t < data.steps(); ++t) {
        for (Eigen::Index i = 0; i < data.x.rows() + data.y.rows(); ++i) {
            const double v = i < data.x.rows() ? data.x(i, t) : data.y(i - data.x.rows(), t);
            std::snprintf(buf, sizeof(buf), "%.17g", v);
            if (i > 0) out << ',';
            out << buf;
        }
        out << '\n';
    }
}

namespace {

void moments(const Mat& block, Vec& mean, Vec& sd)
{
    const double count = static_cast<double>(block.cols());
    mean = block.rowwise().mean();
    sd = ((block.colwise() - mean).array().square().rowwise().sum() / count).sqrt();
    sd = sd.cwiseMax(1e-12);
}

} // namespace

SequenceDataset Standardization::apply(const SequenceDataset& data) const
{
    SequenceDataset out = data;
    out.x = ((data.x.colwise() - x_mean).array().colwise() / x_sd.array()).matrix();
    out.y = ((data.y.colwise() - y_mean).array().colwise() / y_sd.array()).matrix();
    return out;
}

SequenceDataset Standardization::invert(const SequenceDataset& data) const
{
    SequenceDataset out = data;
    out.x = (data.x.array().colwise() * x_sd.array()).matrix().colwise() + x_mean;
    out.y = (data.y.array().colwise() * y_sd.array()).matrix().colwise() + y_mean;
    return out;
}

std::pair<SequenceDataset, Standardization> standardize(const SequenceDataset& data,
                                                        StandardizeOrder order)
{
    data.validate();
    const int cols = order == StandardizeOrder::train_window ? data.t1 : data.steps();
    Standardization st;
    moments(data.x.leftCols(cols), st.x_mean, st.x_sd);
    moments(data.y.leftCols(cols), st.y_mean, st.y_sd);
    return {st.apply(data), st};
}

std::uint64_t fnv1a(std::string_view bytes)
{
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (const char ch : bytes) {
        h ^= static_cast<unsigned char>(ch);
        h *= 0x100000001b3ULL;
    }
    return h;
}

} // namespace alrnn
