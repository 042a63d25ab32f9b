#pragma once

#include <alrnn/model.hpp>

#include <iosfwd>
#include <string>

namespace alrnn {

struct Checkpoint
{
    RnnParams params;
    Activation act;
};

/// Plain-text weights: a header with dims, activation and the vec() convention,
/// then each matrix row by row with 17 significant digits.
void write_checkpoint(std::ostream& out, const Checkpoint& ckpt);
Checkpoint read_checkpoint(std::istream& in);

void save_checkpoint(const std::string& path, const Checkpoint& ckpt);
Checkpoint load_checkpoint(const std::string& path);

} // namespace alrnn
