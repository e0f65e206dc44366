#pragma once

#include <string>
#include <variant>
#include <vector>

#include "rnla/nn/attention.hpp"
#include "rnla/nn/layers.hpp"

namespace rnla::nn {

struct ExactMhaLayer {
    MhaParams params;
};

enum class LayerType { DenseLinear, SkLinear, DenseConv2d, SkConv2d, ExactMha, RandMha, Relu };

using LayerVariant =
    std::variant<DenseLinear, SkLinear, DenseConv2d, SkConv2d, ExactMhaLayer, RandMha, Relu>;

LayerType layer_type(const LayerVariant& layer);
std::string layer_type_name(LayerType t);
LayerType layer_type_from_name(const std::string& name);

struct NamedLayer {
    std::string name; // dotted path, e.g. "encoder.0.fc"
    LayerVariant layer;
};

// Ordered sequence of named layers. Names must be unique.
struct Model {
    std::vector<NamedLayer> layers;
    std::string dtype = "f64"; // storage width of the serialized blob

    NamedLayer* find(const std::string& name);
    const NamedLayer* find(const std::string& name) const;
};

ParamCount layer_params(const LayerVariant& layer);
ParamCount model_params(const Model& model);

// Sequential forward for column-convention chains (Linear / SKLinear / ReLU).
Matrix model_forward(const Model& model, const Matrix& x);

// Structural and numerical equality (sketches compared by descriptor).
bool model_equal(const Model& a, const Model& b);

// On-disk format: a JSON manifest at `path` plus a binary blob at
// `path + ".bin"` ("PNTR" magic, version byte, then little-endian parameter
// arrays in manifest order, f64 or f32 per the model dtype). Sketches are
// stored as (dist, dims, seed, nnz) descriptors and re-realized on load.
void model_save(const Model& model, const std::string& path);
Model model_load(const std::string& path);

// Manifest text exactly as written by model_save (the `model inspect` view).
std::string model_manifest_json(const Model& model);

} // namespace rnla::nn
