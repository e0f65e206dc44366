#include "rnla/nn/model.hpp"

#include <bit>
#include <cstring>
#include <fstream>

#include <json.hpp>

#include "rnla/rng.hpp"

namespace rnla::nn {

using json = nlohmann::ordered_json;

LayerType layer_type(const LayerVariant& layer) {
    return std::visit(
        [](const auto& l) -> LayerType {
            using T = std::decay_t<decltype(l)>;
            if constexpr (std::is_same_v<T, DenseLinear>) return LayerType::DenseLinear;
            else if constexpr (std::is_same_v<T, SkLinear>) return LayerType::SkLinear;
            else if constexpr (std::is_same_v<T, DenseConv2d>) return LayerType::DenseConv2d;
            else if constexpr (std::is_same_v<T, SkConv2d>) return LayerType::SkConv2d;
            else if constexpr (std::is_same_v<T, ExactMhaLayer>) return LayerType::ExactMha;
            else if constexpr (std::is_same_v<T, RandMha>) return LayerType::RandMha;
            else return LayerType::Relu;
        },
        layer);
}

std::string layer_type_name(LayerType t) {
    switch (t) {
        case LayerType::DenseLinear: return "Linear";
        case LayerType::SkLinear: return "SKLinear";
        case LayerType::DenseConv2d: return "Conv2d";
        case LayerType::SkConv2d: return "SKConv2d";
        case LayerType::ExactMha: return "MultiheadAttention";
        case LayerType::RandMha: return "RandMultiheadAttention";
        case LayerType::Relu: return "ReLU";
    }
    return "Linear";
}

LayerType layer_type_from_name(const std::string& name) {
    if (name == "Linear") return LayerType::DenseLinear;
    if (name == "SKLinear") return LayerType::SkLinear;
    if (name == "Conv2d") return LayerType::DenseConv2d;
    if (name == "SKConv2d") return LayerType::SkConv2d;
    if (name == "MultiheadAttention") return LayerType::ExactMha;
    if (name == "RandMultiheadAttention") return LayerType::RandMha;
    if (name == "ReLU") return LayerType::Relu;
    throw load_error("unknown layer type: " + name);
}

NamedLayer* Model::find(const std::string& name) {
    for (auto& l : layers)
        if (l.name == name) return &l;
    return nullptr;
}

const NamedLayer* Model::find(const std::string& name) const {
    for (const auto& l : layers)
        if (l.name == name) return &l;
    return nullptr;
}

ParamCount layer_params(const LayerVariant& layer) {
    return std::visit(
        [](const auto& l) -> ParamCount {
            using T = std::decay_t<decltype(l)>;
            ParamCount p;
            if constexpr (std::is_same_v<T, DenseLinear>) {
                p.learnable = static_cast<std::uint64_t>(l.w.size()) + l.b.size();
                p.total_stored = p.learnable;
                p.dense_equivalent = p.learnable;
            } else if constexpr (std::is_same_v<T, SkLinear>) {
                p = l.params();
            } else if constexpr (std::is_same_v<T, DenseConv2d>) {
                p.learnable = static_cast<std::uint64_t>(l.inner.w.size()) + l.inner.b.size();
                p.total_stored = p.learnable;
                p.dense_equivalent = p.learnable;
            } else if constexpr (std::is_same_v<T, SkConv2d>) {
                p = l.params();
            } else if constexpr (std::is_same_v<T, ExactMhaLayer>) {
                const std::uint64_t d = l.params.d_model;
                p.learnable = 4 * d * d;
                p.total_stored = p.learnable;
                p.dense_equivalent = p.learnable;
            } else if constexpr (std::is_same_v<T, RandMha>) {
                const std::uint64_t d = l.params().d_model;
                const std::uint64_t rf = l.params().num_heads * l.num_features() * l.params().head_dim();
                p.learnable = 4 * d * d;
                p.total_stored = p.learnable + rf;
                p.dense_equivalent = p.learnable;
            }
            return p;
        },
        layer);
}

ParamCount model_params(const Model& model) {
    ParamCount total;
    for (const auto& nl : model.layers) {
        const ParamCount p = layer_params(nl.layer);
        total.learnable += p.learnable;
        total.total_stored += p.total_stored;
        total.dense_equivalent += p.dense_equivalent;
    }
    return total;
}

Matrix model_forward(const Model& model, const Matrix& x) {
    Matrix cur = x;
    for (const auto& nl : model.layers) {
        if (const auto* d = std::get_if<DenseLinear>(&nl.layer)) cur = d->forward(cur);
        else if (const auto* s = std::get_if<SkLinear>(&nl.layer)) cur = s->forward(cur);
        else if (const auto* r = std::get_if<Relu>(&nl.layer)) cur = r->forward(cur);
        else
            throw shape_error("model_forward: layer '" + nl.name +
                              "' is not part of a Linear/ReLU chain");
    }
    return cur;
}

namespace {

bool sketch_equal(const sketch::SketchOp& a, const sketch::SketchOp& b) {
    if (a.is_explicit() || b.is_explicit())
        return a.is_explicit() == b.is_explicit() && a.realized() == b.realized();
    return a.dist() == b.dist() && a.rows() == b.rows() && a.cols() == b.cols() &&
           a.seed() == b.seed() && a.nnz_per_col() == b.nnz_per_col();
}

bool mha_params_equal(const MhaParams& a, const MhaParams& b) {
    return a.d_model == b.d_model && a.num_heads == b.num_heads && a.w_q == b.w_q &&
           a.w_k == b.w_k && a.w_v == b.w_v && a.w_o == b.w_o;
}

bool conv_shape_equal(const ConvShape& a, const ConvShape& b) {
    return a.c_in == b.c_in && a.c_out == b.c_out && a.kernel_h == b.kernel_h &&
           a.kernel_w == b.kernel_w && a.stride == b.stride && a.padding == b.padding;
}

bool sk_linear_equal(const SkLinear& a, const SkLinear& b) {
    if (a.d_in != b.d_in || a.d_out != b.d_out || a.num_terms != b.num_terms ||
        a.low_rank != b.low_rank || a.bias != b.bias)
        return false;
    for (std::size_t i = 0; i < a.terms.size(); ++i) {
        if (!sketch_equal(a.terms[i].s1, b.terms[i].s1) ||
            !sketch_equal(a.terms[i].s2, b.terms[i].s2) || !(a.terms[i].u1 == b.terms[i].u1) ||
            !(a.terms[i].u2 == b.terms[i].u2))
            return false;
    }
    return true;
}

bool layer_equal(const LayerVariant& a, const LayerVariant& b) {
    if (a.index() != b.index()) return false;
    if (const auto* d = std::get_if<DenseLinear>(&a)) {
        const auto& e = std::get<DenseLinear>(b);
        return d->w == e.w && d->b == e.b;
    }
    if (const auto* s = std::get_if<SkLinear>(&a)) return sk_linear_equal(*s, std::get<SkLinear>(b));
    if (const auto* c = std::get_if<DenseConv2d>(&a)) {
        const auto& e = std::get<DenseConv2d>(b);
        return conv_shape_equal(c->shape, e.shape) && c->inner.w == e.inner.w &&
               c->inner.b == e.inner.b;
    }
    if (const auto* c = std::get_if<SkConv2d>(&a)) {
        const auto& e = std::get<SkConv2d>(b);
        return conv_shape_equal(c->shape, e.shape) && sk_linear_equal(c->inner, e.inner);
    }
    if (const auto* m = std::get_if<ExactMhaLayer>(&a))
        return mha_params_equal(m->params, std::get<ExactMhaLayer>(b).params);
    if (const auto* m = std::get_if<RandMha>(&a)) {
        const auto& e = std::get<RandMha>(b);
        return mha_params_equal(m->params(), e.params()) &&
               m->num_features() == e.num_features() && m->kernel() == e.kernel() &&
               m->rf_seed() == e.rf_seed() && m->epsilon() == e.epsilon();
    }
    return true; // Relu
}

} // namespace

bool model_equal(const Model& a, const Model& b) {
    if (a.dtype != b.dtype || a.layers.size() != b.layers.size()) return false;
    for (std::size_t i = 0; i < a.layers.size(); ++i) {
        if (a.layers[i].name != b.layers[i].name) return false;
        if (!layer_equal(a.layers[i].layer, b.layers[i].layer)) return false;
    }
    return true;
}

// --- serialization ---

namespace {

constexpr char kMagic[4] = {'P', 'N', 'T', 'R'};
constexpr unsigned char kBlobVersion = 1;

void append_array(std::vector<unsigned char>& blob, const double* src, std::size_t count,
                  bool f32) {
    static_assert(std::endian::native == std::endian::little,
                  "serialization assumes a little-endian host");
    if (f32) {
        for (std::size_t i = 0; i < count; ++i) {
            const float f = static_cast<float>(src[i]);
            unsigned char buf[4];
            std::memcpy(buf, &f, 4);
            blob.insert(blob.end(), buf, buf + 4);
        }
    } else {
        const unsigned char* raw = reinterpret_cast<const unsigned char*>(src);
        blob.insert(blob.end(), raw, raw + count * 8);
    }
}

class BlobReader {
public:
    BlobReader(const std::vector<unsigned char>& bytes, bool f32, std::size_t offset)
        : bytes_(bytes), f32_(f32), pos_(offset) {}

    void read_array(double* dst, std::size_t count) {
        const std::size_t width = f32_ ? 4 : 8;
        if (pos_ + count * width > bytes_.size())
            throw load_error("model blob too short for declared layers");
        if (f32_) {
            for (std::size_t i = 0; i < count; ++i) {
                float f;
                std::memcpy(&f, bytes_.data() + pos_, 4);
                dst[i] = static_cast<double>(f);
                pos_ += 4;
            }
        } else {
            std::memcpy(dst, bytes_.data() + pos_, count * 8);
            pos_ += count * 8;
        }
    }

    std::size_t pos() const noexcept { return pos_; }

private:
    const std::vector<unsigned char>& bytes_;
    bool f32_;
    std::size_t pos_;
};

json sketch_to_json(const sketch::SketchOp& s) {
    if (s.is_explicit())
        throw parameter_error("model_save: explicit (test-hook) sketches are not serializable");
    json j;
    j["dist"] = sketch::dist_name(s.dist());
    j["rows"] = s.rows();
    j["cols"] = s.cols();
    j["seed"] = s.seed();
    if (s.dist() == sketch::SketchDist::SparseSign) j["nnz_per_col"] = s.nnz_per_col();
    return j;
}

sketch::SketchOp sketch_from_json(const json& j) {
    return sketch::make_sketch(sketch::dist_from_name(j.at("dist").get<std::string>()),
                               j.at("rows").get<std::size_t>(), j.at("cols").get<std::size_t>(),
                               j.at("seed").get<std::uint64_t>(),
                               j.value("nnz_per_col", std::size_t{0}));
}

json sk_linear_to_json(const SkLinear& l) {
    json j;
    j["d_in"] = l.d_in;
    j["d_out"] = l.d_out;
    j["num_terms"] = l.num_terms;
    j["low_rank"] = l.low_rank;
    json sketches = json::array();
    for (const auto& t : l.terms) {
        sketches.push_back(sketch_to_json(t.s1));
        sketches.push_back(sketch_to_json(t.s2));
    }
    j["sketches"] = std::move(sketches);
    return j;
}

void sk_linear_blob(std::vector<unsigned char>& blob, const SkLinear& l, bool f32) {
    for (const auto& t : l.terms) {
        append_array(blob, t.u1.data(), t.u1.size(), f32);
        append_array(blob, t.u2.data(), t.u2.size(), f32);
    }
    append_array(blob, l.bias.data(), l.bias.size(), f32);
}

SkLinear sk_linear_from_json(const json& j, BlobReader& reader) {
    SkLinear l;
    l.d_in = j.at("d_in").get<std::size_t>();
    l.d_out = j.at("d_out").get<std::size_t>();
    l.num_terms = j.at("num_terms").get<std::size_t>();
    l.low_rank = j.at("low_rank").get<std::size_t>();
    const json& sketches = j.at("sketches");
    if (sketches.size() != 2 * l.num_terms)
        throw load_error("SKLinear manifest: expected 2*num_terms sketches");
    l.terms.resize(l.num_terms);
    for (std::size_t i = 0; i < l.num_terms; ++i) {
        l.terms[i].s1 = sketch_from_json(sketches[2 * i]);
        l.terms[i].s2 = sketch_from_json(sketches[2 * i + 1]);
        l.terms[i].u1 = Matrix(l.low_rank, l.d_in);
        reader.read_array(l.terms[i].u1.data(), l.terms[i].u1.size());
        l.terms[i].u2 = Matrix(l.d_out, l.low_rank);
        reader.read_array(l.terms[i].u2.data(), l.terms[i].u2.size());
    }
    l.bias.assign(l.d_out, 0.0);
    reader.read_array(l.bias.data(), l.bias.size());
    return l;
}

json conv_shape_to_json(const ConvShape& s) {
    json j;
    j["c_in"] = s.c_in;
    j["c_out"] = s.c_out;
    j["kernel_h"] = s.kernel_h;
    j["kernel_w"] = s.kernel_w;
    j["stride"] = s.stride;
    j["padding"] = s.padding;
    return j;
}

ConvShape conv_shape_from_json(const json& j) {
    ConvShape s;
    s.c_in = j.at("c_in").get<std::size_t>();
    s.c_out = j.at("c_out").get<std::size_t>();
    s.kernel_h = j.at("kernel_h").get<std::size_t>();
    s.kernel_w = j.at("kernel_w").get<std::size_t>();
    s.stride = j.at("stride").get<std::size_t>();
    s.padding = j.at("padding").get<std::size_t>();
    return s;
}

void mha_blob(std::vector<unsigned char>& blob, const MhaParams& p, bool f32) {
    append_array(blob, p.w_q.data(), p.w_q.size(), f32);
    append_array(blob, p.w_k.data(), p.w_k.size(), f32);
    append_array(blob, p.w_v.data(), p.w_v.size(), f32);
    append_array(blob, p.w_o.data(), p.w_o.size(), f32);
}

MhaParams mha_from_json(const json& j, BlobReader& reader) {
    MhaParams p;
    p.d_model = j.at("d_model").get<std::size_t>();
    p.num_heads = j.at("num_heads").get<std::size_t>();
    if (p.num_heads == 0 || p.d_model % p.num_heads != 0)
        throw load_error("attention manifest: d_model not divisible by num_heads");
    for (Matrix* w : {&p.w_q, &p.w_k, &p.w_v, &p.w_o}) {
        *w = Matrix(p.d_model, p.d_model);
        reader.read_array(w->data(), w->size());
    }
    return p;
}

std::string blob_path_for(const std::string& manifest_path) { return manifest_path + ".bin"; }

} // namespace

std::string model_manifest_json(const Model& model) {
    json root;
    root["format_version"] = 1;
    root["rng_algorithm"] = kRngAlgorithm;
    root["dtype"] = model.dtype;
    json layers = json::array();
    for (const auto& nl : model.layers) {
        json j;
        j["name"] = nl.name;
        j["type"] = layer_type_name(layer_type(nl.layer));
        if (const auto* d = std::get_if<DenseLinear>(&nl.layer)) {
            j["d_in"] = d->d_in();
            j["d_out"] = d->d_out();
        } else if (const auto* s = std::get_if<SkLinear>(&nl.layer)) {
            j.update(sk_linear_to_json(*s));
        } else if (const auto* c = std::get_if<DenseConv2d>(&nl.layer)) {
            j.update(conv_shape_to_json(c->shape));
        } else if (const auto* c = std::get_if<SkConv2d>(&nl.layer)) {
            j.update(conv_shape_to_json(c->shape));
            j.update(sk_linear_to_json(c->inner));
        } else if (const auto* m = std::get_if<ExactMhaLayer>(&nl.layer)) {
            j["d_model"] = m->params.d_model;
            j["num_heads"] = m->params.num_heads;
        } else if (const auto* m = std::get_if<RandMha>(&nl.layer)) {
            j["d_model"] = m->params().d_model;
            j["num_heads"] = m->params().num_heads;
            j["num_features"] = m->num_features();
            j["kernel"] = kernel_name(m->kernel());
            j["rf_seed"] = m->rf_seed();
            j["epsilon"] = m->epsilon();
        }
        layers.push_back(std::move(j));
    }
    root["layers"] = std::move(layers);
    return root.dump(2);
}

void model_save(const Model& model, const std::string& path) {
    if (model.dtype != "f64" && model.dtype != "f32")
        throw parameter_error("model_save: dtype must be f64 or f32");
    const bool f32 = model.dtype == "f32";

    std::vector<unsigned char> blob;
    blob.insert(blob.end(), kMagic, kMagic + 4);
    blob.push_back(kBlobVersion);
    for (const auto& nl : model.layers) {
        if (const auto* d = std::get_if<DenseLinear>(&nl.layer)) {
            append_array(blob, d->w.data(), d->w.size(), f32);
            append_array(blob, d->b.data(), d->b.size(), f32);
        } else if (const auto* s = std::get_if<SkLinear>(&nl.layer)) {
            sk_linear_blob(blob, *s, f32);
        } else if (const auto* c = std::get_if<DenseConv2d>(&nl.layer)) {
            append_array(blob, c->inner.w.data(), c->inner.w.size(), f32);
            append_array(blob, c->inner.b.data(), c->inner.b.size(), f32);
        } else if (const auto* c = std::get_if<SkConv2d>(&nl.layer)) {
            sk_linear_blob(blob, c->inner, f32);
        } else if (const auto* m = std::get_if<ExactMhaLayer>(&nl.layer)) {
            mha_blob(blob, m->params, f32);
        } else if (const auto* m = std::get_if<RandMha>(&nl.layer)) {
            mha_blob(blob, m->params(), f32);
        }
    }

    const std::string manifest = model_manifest_json(model);
    {
        std::ofstream out(path, std::ios::binary | std::ios::trunc);
        if (!out) throw load_error("model_save: cannot write " + path);
        out.write(manifest.data(), static_cast<std::streamsize>(manifest.size()));
        out.put('\n');
    }
    {
        std::ofstream out(blob_path_for(path), std::ios::binary | std::ios::trunc);
        if (!out) throw load_error("model_save: cannot write " + blob_path_for(path));
        out.write(reinterpret_cast<const char*>(blob.data()),
                  static_cast<std::streamsize>(blob.size()));
    }
}

Model model_load(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw load_error("model_load: cannot open " + path);
    std::string manifest((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());

    json root;
    try {
        root = json::parse(manifest);
    } catch (const json::exception& e) {
        throw load_error(std::string("model_load: malformed manifest: ") + e.what());
    }

    Model model;
    try {
        if (root.at("format_version").get<int>() != 1)
            throw load_error("model_load: unsupported format_version");
        if (root.at("rng_algorithm").get<std::string>() != kRngAlgorithm)
            throw load_error("model_load: manifest uses an unknown rng_algorithm");
        model.dtype = root.at("dtype").get<std::string>();
        if (model.dtype != "f64" && model.dtype != "f32")
            throw load_error("model_load: unsupported dtype " + model.dtype);

        std::ifstream bin(blob_path_for(path), std::ios::binary);
        if (!bin) throw load_error("model_load: cannot open " + blob_path_for(path));
        std::vector<unsigned char> blob((std::istreambuf_iterator<char>(bin)),
                                        std::istreambuf_iterator<char>());
        if (blob.size() < 5 || std::memcmp(blob.data(), kMagic, 4) != 0)
            throw load_error("model_load: bad blob magic");
        if (blob[4] != kBlobVersion) throw load_error("model_load: unsupported blob version");

        BlobReader reader(blob, model.dtype == "f32", 5);
        for (const json& j : root.at("layers")) {
            NamedLayer nl;
            nl.name = j.at("name").get<std::string>();
            const LayerType t = layer_type_from_name(j.at("type").get<std::string>());
            switch (t) {
                case LayerType::DenseLinear: {
                    DenseLinear d;
                    d.w = Matrix(j.at("d_out").get<std::size_t>(), j.at("d_in").get<std::size_t>());
                    reader.read_array(d.w.data(), d.w.size());
                    d.b.assign(d.w.rows(), 0.0);
                    reader.read_array(d.b.data(), d.b.size());
                    nl.layer = std::move(d);
                    break;
                }
                case LayerType::SkLinear: {
                    nl.layer = sk_linear_from_json(j, reader);
                    break;
                }
                case LayerType::DenseConv2d: {
                    DenseConv2d c;
                    c.shape = conv_shape_from_json(j);
                    c.inner.w = Matrix(c.shape.c_out, c.shape.lowered_d_in());
                    reader.read_array(c.inner.w.data(), c.inner.w.size());
                    c.inner.b.assign(c.shape.c_out, 0.0);
                    reader.read_array(c.inner.b.data(), c.inner.b.size());
                    nl.layer = std::move(c);
                    break;
                }
                case LayerType::SkConv2d: {
                    SkConv2d c;
                    c.shape = conv_shape_from_json(j);
                    c.inner = sk_linear_from_json(j, reader);
                    if (c.inner.d_in != c.shape.lowered_d_in() || c.inner.d_out != c.shape.c_out)
                        throw load_error("SKConv2d manifest: inner dims disagree with conv shape");
                    nl.layer = std::move(c);
                    break;
                }
                case LayerType::ExactMha: {
                    nl.layer = ExactMhaLayer{mha_from_json(j, reader)};
                    break;
                }
                case LayerType::RandMha: {
                    MhaParams p = mha_from_json(j, reader);
                    nl.layer = RandMha(std::move(p), j.at("num_features").get<std::size_t>(),
                                       kernel_from_name(j.at("kernel").get<std::string>()),
                                       j.at("rf_seed").get<std::uint64_t>(),
                                       j.value("epsilon", 1e-6));
                    break;
                }
                case LayerType::Relu: {
                    nl.layer = Relu{};
                    break;
                }
            }
            if (model.find(nl.name)) throw load_error("model_load: duplicate layer name " + nl.name);
            model.layers.push_back(std::move(nl));
        }
        if (reader.pos() != blob.size())
            throw load_error("model_load: blob length does not match manifest");
    } catch (const json::exception& e) {
        throw load_error(std::string("model_load: malformed manifest: ") + e.what());
    }
    return model;
}

} // namespace rnla::nn
