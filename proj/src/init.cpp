#include <alrnn/data.hpp>
#include <alrnn/init.hpp>
#include <alrnn/rng.hpp>

#include <charconv>
#include <cmath>

namespace alrnn {

Rng::Rng(std::uint64_t seed, std::string_view stream)
{
    const std::uint64_t h = fnv1a(stream);
    std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                      static_cast<std::uint32_t>(h), static_cast<std::uint32_t>(h >> 32)};
    engine_.seed(seq);
}

InitSpec InitSpec::parse(std::string_view text)
{
    if (text == "he") return {InitKind::he, 0.0};
    if (text == "glorot") return {InitKind::glorot, 0.0};
    if (text == "lecun") return {InitKind::lecun, 0.0};
    if (text.rfind("normal:", 0) == 0) {
        const auto tail = text.substr(7);
        double sd = 0.0;
        const auto [ptr, ec] = std::from_chars(tail.data(), tail.data() + tail.size(), sd);
        if (ec != std::errc() || ptr != tail.data() + tail.size() || !(sd > 0.0)) {
            throw ConfigError("init: bad normal sd '" + std::string(tail) + "'");
        }
        return {InitKind::normal, sd};
    }
    throw ConfigError("unknown init '" + std::string(text) +
                      "' (expected normal:<sd>, he, glorot, lecun)");
}

std::string InitSpec::name() const
{
    switch (kind) {
    case InitKind::he:
        return "he";
    case InitKind::glorot:
        return "glorot";
    case InitKind::lecun:
        return "lecun";
    case InitKind::normal:
        break;
    }
    char buf[32];
    const auto res = std::to_chars(buf, buf + sizeof(buf), sd);
    return "normal:" + std::string(buf, res.ptr);
}

double InitSpec::stddev(Eigen::Index rows, Eigen::Index cols) const
{
    const double fan_in = static_cast<double>(cols);
    const double fan_out = static_cast<double>(rows);
    switch (kind) {
    case InitKind::he:
        return std::sqrt(2.0 / fan_in);
    case InitKind::glorot:
        return std::sqrt(2.0 / (fan_in + fan_out));
    case InitKind::lecun:
        return std::sqrt(1.0 / fan_in);
    case InitKind::normal:
        break;
    }
    return sd;
}

RnnParams init_params(const Dims& dims, const InitSpec& spec, std::uint64_t seed)
{
    dims.validate();
    Rng rng(seed, "init");
    RnnParams p = RnnParams::zeros(dims.n, dims.m, dims.r);
    auto fill = [&](Mat& m) {
        const double sd = spec.stddev(m.rows(), m.cols());
        for (Eigen::Index j = 0; j < m.cols(); ++j) {
            for (Eigen::Index i = 0; i < m.rows(); ++i) m(i, j) = rng.normal(sd);
        }
    };
    fill(p.w_mat);
    fill(p.v_mat);
    fill(p.a_mat);
    return p;
}

} // namespace alrnn
