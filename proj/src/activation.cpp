#include <alrnn/model.hpp>

#include <charconv>
#include <cmath>

namespace alrnn {

Activation Activation::leaky_relu(double slope)
{
    if (!(slope > 0.0 && slope < 1.0)) {
        throw ConfigError("leaky_relu slope must lie in (0,1), got " + std::to_string(slope));
    }
    return {ActivationKind::leaky_relu, slope};
}

Activation Activation::parse(std::string_view text)
{
    if (text == "relu") return relu();
    if (text == "elu") return elu();
    const auto colon = text.find(':');
    const auto head = text.substr(0, colon);
    if ((head == "leaky_relu" || head == "leaky") && colon != std::string_view::npos) {
        const auto tail = text.substr(colon + 1);
        double slope = 0.0;
        const auto [ptr, ec] = std::from_chars(tail.data(), tail.data() + tail.size(), slope);
        if (ec != std::errc() || ptr != tail.data() + tail.size()) {
            throw ConfigError("activation: bad leaky slope '" + std::string(tail) + "'");
        }
        return leaky_relu(slope);
    }
    throw ConfigError("unknown activation '" + std::string(text) +
                      "' (expected relu, leaky_relu:<slope>, elu)");
}

double Activation::value(double u) const
{
    switch (kind_) {
    case ActivationKind::relu:
        return u > 0.0 ? u : 0.0;
    case ActivationKind::leaky_relu:
        return u > 0.0 ? u : slope_ * u;
    case ActivationKind::elu:
        return u >= 0.0 ? u : std::expm1(u);
    }
    return u;
}

Vec Activation::apply(const Vec& u) const
{
    Vec out(u.size());
    for (Eigen::Index i = 0; i < u.size(); ++i) out[i] = value(u[i]);
    return out;
}

double Activation::derivative(double u) const
{
    switch (kind_) {
    case ActivationKind::relu:
        return u > 0.0 ? 1.0 : 0.0;
    case ActivationKind::leaky_relu:
        return u > 0.0 ? 1.0 : slope_;
    case ActivationKind::elu:
        return u >= 0.0 ? 1.0 : std::exp(u);
    }
    return 1.0;
}

double Activation::left_slope() const
{
    switch (kind_) {
    case ActivationKind::relu:
        return 0.0;
    case ActivationKind::leaky_relu:
        return slope_;
    case ActivationKind::elu:
        return 1.0;
    }
    return 1.0;
}

std::string Activation::name() const
{
    switch (kind_) {
    case ActivationKind::relu:
        return "relu";
    case ActivationKind::leaky_relu: {
        char buf[32];
        const auto res = std::to_chars(buf, buf + sizeof(buf), slope_);
        return "leaky_relu:" + std::string(buf, res.ptr);
    }
    case ActivationKind::elu:
        return "elu";
    }
    return "relu";
}

} // namespace alrnn
