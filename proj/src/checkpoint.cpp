#include <alrnn/checkpoint.hpp>

#include <cstdio>
#include <fstream>
#include <istream>
#include <ostream>

namespace alrnn {

namespace {

constexpr const char* kMagic = "alrnn-checkpoint";
constexpr int kVersion = 1;

void write_matrix(std::ostream& out, const char* name, const Mat& m)
{
    out << name << ' ' << m.rows() << ' ' << m.cols() << '\n';
    char buf[40];
    for (Eigen::Index i = 0; i < m.rows(); ++i) {
        for (Eigen::Index j = 0; j < m.cols(); ++j) {
            std::snprintf(buf, sizeof(buf), "%.17g", m(i, j));
            out << (j ? " " : "") << buf;
        }
        out << '\n';
    }
}

Mat read_matrix(std::istream& in, const std::string& expect, Eigen::Index rows, Eigen::Index cols)
{
    std::string name;
    Eigen::Index r = -1, c = -1;
    if (!(in >> name >> r >> c) || name != expect) {
        throw ConfigError("checkpoint: expected block '" + expect + "'");
    }
    if (r != rows || c != cols) {
        throw ShapeError("checkpoint: block " + expect + " is " + std::to_string(r) + "x" +
                         std::to_string(c) + ", dims say " + std::to_string(rows) + "x" +
                         std::to_string(cols));
    }
    Mat m(r, c);
    for (Eigen::Index i = 0; i < r; ++i) {
        for (Eigen::Index j = 0; j < c; ++j) {
            std::string tok;
            if (!(in >> tok)) throw ConfigError("checkpoint: truncated block " + expect);
            try {
                std::size_t used = 0;
                m(i, j) = std::stod(tok, &used);
                if (used != tok.size()) throw std::invalid_argument(tok);
            } catch (const std::exception&) {
                throw ConfigError("checkpoint: bad number '" + tok + "' in block " + expect);
            }
        }
    }
    return m;
}

} // namespace

void write_checkpoint(std::ostream& out, const Checkpoint& ckpt)
{
    const RnnParams& p = ckpt.params;
    p.validate();
    out << kMagic << ' ' << kVersion << '\n';
    out << "vec column-major\n";
    out << "activation " << ckpt.act.name() << '\n';
    out << "dims " << p.input_dim() << ' ' << p.output_dim() << ' ' << p.hidden_dim() << '\n';
    write_matrix(out, "W", p.w_mat);
    write_matrix(out, "V", p.v_mat);
    write_matrix(out, "b", p.b_vec);
    write_matrix(out, "A", p.a_mat);
    write_matrix(out, "c", p.c_vec);
}

Checkpoint read_checkpoint(std::istream& in)
{
    std::string magic, key, value;
    int version = 0;
    if (!(in >> magic >> version) || magic != kMagic) throw ConfigError("checkpoint: bad header");
    if (version != kVersion) {
        throw ConfigError("checkpoint: unsupported version " + std::to_string(version));
    }
    if (!(in >> key >> value) || key != "vec" || value != "column-major") {
        throw ConfigError("checkpoint: missing or unknown vec convention");
    }
    if (!(in >> key >> value) || key != "activation") throw ConfigError("checkpoint: missing activation");
    Checkpoint ck;
    ck.act = Activation::parse(value);
    int n = 0, m = 0, r = 0;
    if (!(in >> key >> n >> m >> r) || key != "dims") throw ConfigError("checkpoint: missing dims");
    const Dims dims{n, m, r, 1};
    dims.validate();
    RnnParams& p = ck.params;
    p.w_mat = read_matrix(in, "W", r, r);
    p.v_mat = read_matrix(in, "V", r, n);
    p.b_vec = read_matrix(in, "b", r, 1).col(0);
    p.a_mat = read_matrix(in, "A", m, r);
    p.c_vec = read_matrix(in, "c", m, 1).col(0);
    return ck;
}

void save_checkpoint(const std::string& path, const Checkpoint& ckpt)
{
    std::ofstream out(path);
    if (!out) throw ConfigError("checkpoint: cannot write '" + path + "'");
    write_checkpoint(out, ckpt);
}

Checkpoint load_checkpoint(const std::string& path)
{
    std::ifstream in(path);
    if (!in) throw ConfigError("checkpoint: cannot open '" + path + "'");
    return read_checkpoint(in);
}

} // namespace alrnn
