// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstring>
#include <fstream>
#include <string>
#include <vector>

#include "amc/core/binio.hpp"
#include "amc/core/rng.hpp"
#include "amc/core/tensor.hpp"
#include "amc/models/model_spec.hpp"
#include "amc/nn/init.hpp"

namespace amc::models {

/// A spec bound to concrete parameter tensors. Weights are glorot for
/// feed-forward kernels, orthogonal for recurrent kernels, zero biases
/// with the LSTM forget gate biased to 1. Conv and dense kernels carry the
/// max-norm constraint.
template <typename T>
struct Model {
    ModelSpec spec;
    std::size_t input_len = 128;
    std::vector<Parameter<T>> params;
    std::vector<std::size_t> layer_param_start;  // params index per layer (or npos)

    static constexpr std::size_t npos = static_cast<std::size_t>(-1);

    Model() = default;

    Model(const ModelSpec& s, std::size_t in_len, SeededRng* rng, T max_norm = T(3))
        : spec(s), input_len(in_len) {
        validate_model_spec(spec, input_len);
        const auto shapes = propagate_shapes(spec, input_len);
        LayerShape in{LayerShape::Domain::grid, 2, input_len};
        for (std::size_t li = 0; li < spec.layers.size(); ++li) {
            const LayerSpec& l = spec.layers[li];
            const std::string prefix = "l" + std::to_string(li) + ".";
            switch (l.kind) {
                case LayerKind::conv1d: {
                    layer_param_start.push_back(params.size());
                    Tensor<T> w = rng ? nn::init_params<T>({l.filters, in.a, l.kernel},
                                                           nn::InitScheme::glorot_uniform, *rng)
                                      : Tensor<T>({l.filters, in.a, l.kernel});
                    params.emplace_back(prefix + "w", std::move(w));
                    params.back().max_norm_limit = max_norm;
                    params.emplace_back(prefix + "b", Tensor<T>({l.filters}));
                    break;
                }
                case LayerKind::rnn: {
                    layer_param_start.push_back(params.size());
                    const std::size_t features =
                        in.domain == LayerShape::Domain::grid ? in.a : in.b;
                    const std::size_t rows = nn::gate_blocks(l.rnn_kind) * l.units;
                    Tensor<T> wx = rng ? nn::init_params<T>({rows, features},
                                                            nn::InitScheme::glorot_uniform, *rng)
                                       : Tensor<T>({rows, features});
                    Tensor<T> wh = rng ? nn::init_params<T>({rows, l.units},
                                                            nn::InitScheme::orthogonal, *rng)
                                       : Tensor<T>({rows, l.units});
                    Tensor<T> b({rows});
                    if (rng && l.rnn_kind == nn::RnnKind::lstm) {
                        // forget-gate bias 1 stabilizes early BPTT
                        for (std::size_t u = 0; u < l.units; ++u) b(l.units + u) = T(1);
                    }
                    params.emplace_back(prefix + "wx", std::move(wx));
                    params.emplace_back(prefix + "wh", std::move(wh));
                    params.emplace_back(prefix + "b", std::move(b));
                    break;
                }
                case LayerKind::dense: {
                    layer_param_start.push_back(params.size());
                    Tensor<T> w = rng ? nn::init_params<T>({l.units, in.a},
                                                           nn::InitScheme::glorot_uniform, *rng)
                                      : Tensor<T>({l.units, in.a});
                    params.emplace_back(prefix + "w", std::move(w));
                    params.back().max_norm_limit = max_norm;
                    params.emplace_back(prefix + "b", Tensor<T>({l.units}));
                    break;
                }
                default:
                    layer_param_start.push_back(npos);
                    break;
            }
            in = shapes[li];
        }
    }

    std::vector<Parameter<T>*> param_ptrs() {
        std::vector<Parameter<T>*> out;
        out.reserve(params.size());
        for (auto& p : params) out.push_back(&p);
        return out;
    }

    std::size_t total_params() const {
        std::size_t n = 0;
        for (const auto& p : params) n += p.value.numel();
        return n;
    }

    void zero_grads() {
        for (auto& p : params) p.grad.fill(T(0));
    }

    template <typename U>
    Model<U> cast() const {
        Model<U> out;
        out.spec = spec;
        out.input_len = input_len;
        out.layer_param_start = layer_param_start;
        out.params.reserve(params.size());
        for (const auto& p : params) {
            Parameter<U> q(p.name, p.value.template cast<U>());
            q.max_norm_limit = static_cast<U>(p.max_norm_limit);
            out.params.push_back(std::move(q));
        }
        return out;
    }
};

// ---------------------------------------------------------------------------
// weight file (little-endian):
//   magic "AMCW" | u16 version=1 | u32 spec blob length | canonical spec text
//   | u32 input_len | u32 tensor count
//   | per tensor: u8 name length + ascii, u8 rank, u32 dims..., f32 raw data
// ---------------------------------------------------------------------------

inline void save_weights(const Model<float>& model, const std::string& path) {
    std::string out;
    out += "AMCW";
    binio::put_u16(out, 1);
    const std::string blob = to_canonical_text(model.spec);
    binio::put_u32(out, static_cast<std::uint32_t>(blob.size()));
    out += blob;
    binio::put_u32(out, static_cast<std::uint32_t>(model.input_len));
    binio::put_u32(out, static_cast<std::uint32_t>(model.params.size()));
    for (const auto& p : model.params) {
        require(p.name.size() <= 255, "save_weights: tensor name too long");
        out.push_back(static_cast<char>(p.name.size()));
        out += p.name;
        out.push_back(static_cast<char>(p.value.rank()));
        for (std::size_t d : p.value.shape)
            binio::put_u32(out, static_cast<std::uint32_t>(d));
        for (float v : p.value.data) binio::put_f32(out, v);
    }
    binio::write_file(path, out);
}

inline Model<float> load_weights(const std::string& path) {
    const std::string buf = binio::read_file(path);
    binio::Reader r{buf, 0, path};
    r.need(4, "magic");
    if (buf.compare(0, 4, "AMCW") != 0)
        throw IoError(message("weights: bad magic in '", path, "' at byte offset 0 (expected AMCW)"));
    r.off = 4;
    const std::uint16_t version = r.u16("version");
    if (version != 1)
        throw IoError(message("weights: unsupported version ", version, " in '", path,
                              "' at byte offset 4 (expected 1)"));
    const std::uint32_t blob_len = r.u32("spec blob length");
    r.need(blob_len, "spec blob");
    const std::string blob = buf.substr(r.off, blob_len);
    r.off += blob_len;
    const ModelSpec spec = parse_model_spec_text(blob);
    const std::uint32_t input_len = r.u32("input length");

    Model<float> model(spec, input_len, nullptr);
    const std::uint32_t tensor_count = r.u32("tensor count");
    if (tensor_count != model.params.size())
        throw IoError(message("weights: shape-table mismatch in '", path, "': file has ",
                              tensor_count, " tensors, spec expects ", model.params.size()));
    for (std::uint32_t ti = 0; ti < tensor_count; ++ti) {
        const std::uint8_t name_len = r.u8("tensor name length");
        r.need(name_len, "tensor name");
        const std::string name = buf.substr(r.off, name_len);
        r.off += name_len;
        Parameter<float>& p = model.params[ti];
        if (name != p.name)
            throw IoError(message("weights: shape-table mismatch in '", path, "': tensor ", ti,
                                  " is '", name, "', spec expects '", p.name, "'"));
        const std::uint8_t rank = r.u8("tensor rank");
        std::vector<std::size_t> dims(rank);
        for (auto& d : dims) d = r.u32("tensor dim");
        if (dims != p.value.shape)
            throw IoError(message("weights: shape-table mismatch in '", path, "': tensor '", name,
                                  "' dims do not match the spec"));
        for (auto& v : p.value.data) v = r.f32("tensor data");
    }
    if (r.off != buf.size())
        throw IoError(message("weights: ", buf.size() - r.off, " trailing byte(s) in '", path,
                              "' at byte offset ", r.off));
    return model;
}

}  // namespace amc::models
