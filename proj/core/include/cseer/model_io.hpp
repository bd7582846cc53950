#pragma once

#include <string>

#include "cseer/model.hpp"

namespace cseer {

struct LoadedModel {
    Model model;
    Vocabulary vocab;
};

// Binary model artifact: magic "CSEER", format version, kind, threshold,
// dims (n, m, k, d, d_side), vocabulary tables, then every parameter block
// in declared order as row-major little-endian 64-bit floats. The write is
// atomic (temp file + rename) and a load/save round trip is bit-exact.
void save_model(const Model& model, const Vocabulary& vocab, const std::string& path);
LoadedModel load_model(const std::string& path);

}  // namespace cseer
