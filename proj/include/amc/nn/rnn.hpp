// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cmath>

#include "amc/core/tensor.hpp"
#include "amc/core/vec.hpp"
#include "amc/nn/activations.hpp"

namespace amc::nn {

enum class RnnKind { lstm, gru, simple };

/// State (candidate/output) activation of a recurrent cell. Gates are
/// always sigmoid.
enum class StateAct { tanh, relu };

inline std::size_t gate_blocks(RnnKind kind) {
    switch (kind) {
        case RnnKind::lstm: return 4;  // i, f, g, o
        case RnnKind::gru: return 3;   // z, r, n
        case RnnKind::simple: return 1;
    }
    return 0;
}

/// Recurrent cell parameters. Weight rows are grouped by gate in a fixed
/// order (lstm: i,f,g,o; gru: z,r,n) so weight files stay portable.
template <typename T>
struct RnnCellParams {
    RnnKind kind = RnnKind::lstm;
    std::size_t hidden = 0;
    StateAct state_activation = StateAct::tanh;
    Tensor<T> input_weights;      // [gates*H, F]
    Tensor<T> recurrent_weights;  // [gates*H, H]
    Tensor<T> biases;             // [gates*H]

    std::size_t input_size() const { return input_weights.dim(1); }

    void check() const {
        const std::size_t rows = gate_blocks(kind) * hidden;
        require(hidden >= 1, "rnn: hidden size must be >= 1");
        require(input_weights.rank() == 2 && input_weights.dim(0) == rows,
                "rnn: input_weights rows ", input_weights.dim(0), " != gates*H = ", rows);
        require(recurrent_weights.rank() == 2 && recurrent_weights.dim(0) == rows &&
                    recurrent_weights.dim(1) == hidden,
                "rnn: recurrent_weights shape ", shape_string(recurrent_weights), " != [", rows,
                ",", hidden, "]");
        require(biases.rank() == 1 && biases.dim(0) == rows, "rnn: biases shape ",
                shape_string(biases), " != [", rows, "]");
    }
};

template <typename T>
struct RnnState {
    Tensor<T> h;
    Tensor<T> c;  // lstm only

    static RnnState zero(const RnnCellParams<T>& p) {
        RnnState s;
        s.h = Tensor<T>({p.hidden});
        if (p.kind == RnnKind::lstm) s.c = Tensor<T>({p.hidden});
        return s;
    }
};

namespace detail {

template <typename T>
T state_act_apply(StateAct a, T v) {
    return a == StateAct::relu ? (v > T(0) ? v : T(0)) : std::tanh(v);
}

/// Activation derivative recovered from the post-activation value.
template <typename T>
T state_act_deriv(StateAct a, T post) {
    return a == StateAct::relu ? (post > T(0) ? T(1) : T(0)) : T(1) - post * post;
}

/// One cell update on raw rows. Inputs: x_t[F], h_prev[H], c_prev[H]
/// (lstm). Outputs: post-activation gates[G*H], h_new[H], plus c_new and
/// act_c (lstm) or rh = r (.) h_prev (gru). Throws when the new state is
/// non-finite, naming the time step.
template <typename T>
void cell_step(const RnnCellParams<T>& p, const T* x_t, const T* h_prev, const T* c_prev,
               T* gates, T* h_new, T* c_new, T* act_c, T* rh, long time_step) {
    const std::size_t hid = p.hidden;
    const std::size_t f_in = p.input_size();
    const T* wx = p.input_weights.data.data();
    const T* wh = p.recurrent_weights.data.data();
    const T* b = p.biases.data.data();

    if (p.kind == RnnKind::lstm) {
        for (std::size_t r = 0; r < 4 * hid; ++r) {
            const T pre = b[r] + vec::dot(wx + r * f_in, x_t, f_in) +
                          vec::dot(wh + r * hid, h_prev, hid);
            const bool is_candidate = r >= 2 * hid && r < 3 * hid;
            gates[r] = is_candidate ? state_act_apply(p.state_activation, pre)
                                    : sigmoid_scalar(pre);
        }
        for (std::size_t u = 0; u < hid; ++u) {
            const T c = gates[hid + u] * c_prev[u] + gates[u] * gates[2 * hid + u];
            c_new[u] = c;
            act_c[u] = state_act_apply(p.state_activation, c);
            h_new[u] = gates[3 * hid + u] * act_c[u];
        }
    } else if (p.kind == RnnKind::gru) {
        // z and r need only h_prev; the candidate n sees r (.) h_prev
        for (std::size_t r = 0; r < 2 * hid; ++r) {
            const T pre = b[r] + vec::dot(wx + r * f_in, x_t, f_in) +
                          vec::dot(wh + r * hid, h_prev, hid);
            gates[r] = sigmoid_scalar(pre);
        }
        for (std::size_t u = 0; u < hid; ++u) rh[u] = gates[hid + u] * h_prev[u];
        for (std::size_t u = 0; u < hid; ++u) {
            const std::size_t r = 2 * hid + u;
            const T pre = b[r] + vec::dot(wx + r * f_in, x_t, f_in) +
                          vec::dot(wh + r * hid, rh, hid);
            const T n = state_act_apply(p.state_activation, pre);
            gates[r] = n;
            h_new[u] = gates[u] * h_prev[u] + (T(1) - gates[u]) * n;
        }
    } else {
        for (std::size_t u = 0; u < hid; ++u) {
            const T pre = b[u] + vec::dot(wx + u * f_in, x_t, f_in) +
                          vec::dot(wh + u * hid, h_prev, hid);
            h_new[u] = state_act_apply(p.state_activation, pre);
        }
    }

    for (std::size_t u = 0; u < hid; ++u) {
        const bool bad_h = !std::isfinite(static_cast<double>(h_new[u]));
        const bool bad_c =
            p.kind == RnnKind::lstm && !std::isfinite(static_cast<double>(c_new[u]));
        if (bad_h || bad_c)
            throw NumericError(message("rnn_step: non-finite state at time step ", time_step));
    }
}

}  // namespace detail

/// One cell update; standard equations per kind. Pure: the input state is
/// untouched.
template <typename T>
RnnState<T> rnn_step(const RnnCellParams<T>& p, const Tensor<T>& x_t, const RnnState<T>& state) {
    p.check();
    require(x_t.rank() == 1 && x_t.dim(0) == p.input_size(), "rnn_step: input shape ",
            shape_string(x_t), " does not match input_weights columns ", p.input_size());
    require(state.h.numel() == p.hidden, "rnn_step: state h size ", state.h.numel(),
            " != hidden ", p.hidden);
    if (p.kind == RnnKind::lstm)
        require(state.c.numel() == p.hidden, "rnn_step: lstm state c size ", state.c.numel(),
                " != hidden ", p.hidden);

    const std::size_t hid = p.hidden;
    std::vector<T> gates(gate_blocks(p.kind) * hid), c_new(hid), act_c(hid), rh(hid);
    RnnState<T> next;
    next.h = Tensor<T>({hid});
    detail::cell_step(p, x_t.data.data(), state.h.data.data(),
                      p.kind == RnnKind::lstm ? state.c.data.data() : nullptr, gates.data(),
                      next.h.data.data(), c_new.data(), act_c.data(), rh.data(), -1);
    if (p.kind == RnnKind::lstm) next.c = Tensor<T>({hid}, std::move(c_new));
    return next;
}

/// Flat per-sequence forward record: everything BPTT needs, stored
/// post-activation, one row per step.
template <typename T>
struct RnnSequenceCache {
    Tensor<T> gates;  // [T, G*H]
    Tensor<T> h;      // [T+1, H]; row 0 is the zero initial state
    Tensor<T> c;      // [T+1, H] (lstm)
    Tensor<T> act_c;  // [T, H] (lstm)
    Tensor<T> rh;     // [T, H] (gru)
};

template <typename T>
struct RnnSequenceOut {
    Tensor<T> output;  // [T,H] if return_sequences else [H]
    RnnSequenceCache<T> cache;
};

/// Unrolls the cell over x: [T,F] from a zero initial state.
template <typename T>
RnnSequenceOut<T> rnn_sequence_forward(const RnnCellParams<T>& p, const Tensor<T>& x,
                                       bool return_sequences) {
    p.check();
    require(x.rank() == 2, "rnn_sequence: x rank ", x.rank(), " != 2");
    const std::size_t steps = x.dim(0);
    require(steps >= 1, "rnn_sequence: empty sequence (T=0)");
    require(x.dim(1) == p.input_size(), "rnn_sequence: x feature dim ", x.dim(1),
            " does not match input_weights columns ", p.input_size());
    const std::size_t hid = p.hidden;
    const bool lstm = p.kind == RnnKind::lstm;
    const bool gru = p.kind == RnnKind::gru;

    RnnSequenceOut<T> out;
    RnnSequenceCache<T>& cache = out.cache;
    cache.gates = Tensor<T>({steps, gate_blocks(p.kind) * hid});
    cache.h = Tensor<T>({steps + 1, hid});
    if (lstm) {
        cache.c = Tensor<T>({steps + 1, hid});
        cache.act_c = Tensor<T>({steps, hid});
    }
    if (gru) cache.rh = Tensor<T>({steps, hid});

    for (std::size_t t = 0; t < steps; ++t) {
        detail::cell_step(p, x.data.data() + t * x.dim(1), &cache.h(t, 0),
                          lstm ? &cache.c(t, 0) : nullptr, &cache.gates(t, 0),
                          &cache.h(t + 1, 0), lstm ? &cache.c(t + 1, 0) : nullptr,
                          lstm ? &cache.act_c(t, 0) : nullptr, gru ? &cache.rh(t, 0) : nullptr,
                          static_cast<long>(t));
    }

    if (return_sequences) {
        out.output = Tensor<T>({steps, hid});
        for (std::size_t i = 0; i < steps * hid; ++i) out.output.data[i] = cache.h.data[hid + i];
    } else {
        out.output = Tensor<T>({hid});
        for (std::size_t u = 0; u < hid; ++u) out.output(u) = cache.h(steps, u);
    }
    return out;
}

template <typename T>
struct RnnSequenceGrads {
    Tensor<T> gx;    // [T,F]
    Tensor<T> g_wx;  // like input_weights
    Tensor<T> g_wh;  // like recurrent_weights
    Tensor<T> g_b;   // like biases
};

/// Full backpropagation through time. gy is [T,H] when the forward
/// returned sequences, else [H] (the gradient at the last step).
template <typename T>
RnnSequenceGrads<T> rnn_sequence_backward(const RnnCellParams<T>& p, const Tensor<T>& x,
                                          const RnnSequenceCache<T>& cache, const Tensor<T>& gy,
                                          bool return_sequences) {
    const std::size_t steps = cache.gates.dim(0);
    const std::size_t hid = p.hidden;
    const std::size_t f_in = p.input_size();
    if (return_sequences)
        require(gy.rank() == 2 && gy.dim(0) == steps && gy.dim(1) == hid,
                "rnn_sequence_backward: gy shape ", shape_string(gy), " != [", steps, ",", hid,
                "]");
    else
        require(gy.rank() == 1 && gy.dim(0) == hid, "rnn_sequence_backward: gy shape ",
                shape_string(gy), " != [", hid, "]");

    RnnSequenceGrads<T> g{Tensor<T>({steps, f_in}), Tensor<T>(p.input_weights.shape),
                          Tensor<T>(p.recurrent_weights.shape), Tensor<T>(p.biases.shape)};

    const T* wx = p.input_weights.data.data();
    const T* wh = p.recurrent_weights.data.data();
    std::vector<T> dh(hid, T(0)), dc(hid, T(0));
    std::vector<T> dh_prev(hid), dgates(gate_blocks(p.kind) * hid);
    std::vector<T> dn_tilde(hid), drh(hid);

    for (std::size_t ti = steps; ti-- > 0;) {
        const T* gates = &cache.gates(ti, 0);
        const T* h_prev = &cache.h(ti, 0);
        const T* x_t = x.data.data() + ti * f_in;
        if (return_sequences) {
            for (std::size_t u = 0; u < hid; ++u) dh[u] += gy(ti, u);
        } else if (ti + 1 == steps) {
            for (std::size_t u = 0; u < hid; ++u) dh[u] += gy(u);
        }
        std::fill(dh_prev.begin(), dh_prev.end(), T(0));

        if (p.kind == RnnKind::lstm) {
            const T* c_prev = &cache.c(ti, 0);
            const T* act_c = &cache.act_c(ti, 0);
            for (std::size_t u = 0; u < hid; ++u) {
                const T i = gates[u];
                const T f = gates[hid + u];
                const T cand = gates[2 * hid + u];
                const T o = gates[3 * hid + u];
                const T d_o = dh[u] * act_c[u];
                const T d_c =
                    dh[u] * o * detail::state_act_deriv(p.state_activation, act_c[u]) + dc[u];
                const T d_i = d_c * cand;
                const T d_g = d_c * i;
                const T d_f = d_c * c_prev[u];
                dc[u] = d_c * f;
                dgates[u] = d_i * i * (T(1) - i);
                dgates[hid + u] = d_f * f * (T(1) - f);
                dgates[2 * hid + u] = d_g * detail::state_act_deriv(p.state_activation, cand);
                dgates[3 * hid + u] = d_o * o * (T(1) - o);
            }
            for (std::size_t r = 0; r < 4 * hid; ++r) {
                const T d = dgates[r];
                vec::axpy(&g.g_wx(r, 0), d, x_t, f_in);
                vec::axpy(&g.g_wh(r, 0), d, h_prev, hid);
                g.g_b(r) += d;
                vec::axpy(&g.gx(ti, 0), d, wx + r * f_in, f_in);
                vec::axpy(dh_prev.data(), d, wh + r * hid, hid);
            }
        } else if (p.kind == RnnKind::gru) {
            // h' = z (.) h_prev + (1-z) (.) n with n = act(Wn x + Rn (r (.) h_prev) + bn)
            for (std::size_t u = 0; u < hid; ++u) {
                const T z = gates[u];
                const T n = gates[2 * hid + u];
                const T d_z = dh[u] * (h_prev[u] - n);
                const T d_n = dh[u] * (T(1) - z);
                dh_prev[u] += dh[u] * z;
                dn_tilde[u] = d_n * detail::state_act_deriv(p.state_activation, n);
                dgates[u] = d_z * z * (T(1) - z);
                dgates[2 * hid + u] = dn_tilde[u];
            }
            std::fill(drh.begin(), drh.end(), T(0));
            for (std::size_t u = 0; u < hid; ++u)
                vec::axpy(drh.data(), dn_tilde[u], wh + (2 * hid + u) * hid, hid);
            for (std::size_t u = 0; u < hid; ++u) {
                const T r = gates[hid + u];
                const T d_r = drh[u] * h_prev[u];
                dh_prev[u] += drh[u] * r;
                dgates[hid + u] = d_r * r * (T(1) - r);
            }
            const T* rh = &cache.rh(ti, 0);
            for (std::size_t r = 0; r < 3 * hid; ++r) {
                const T d = dgates[r];
                vec::axpy(&g.g_wx(r, 0), d, x_t, f_in);
                vec::axpy(&g.g_wh(r, 0), d, r < 2 * hid ? h_prev : rh, hid);
                g.g_b(r) += d;
                vec::axpy(&g.gx(ti, 0), d, wx + r * f_in, f_in);
                if (r < 2 * hid) vec::axpy(dh_prev.data(), d, wh + r * hid, hid);
            }
        } else {
            const T* h_new = &cache.h(ti + 1, 0);
            for (std::size_t u = 0; u < hid; ++u)
                dgates[u] = dh[u] * detail::state_act_deriv(p.state_activation, h_new[u]);
            for (std::size_t r = 0; r < hid; ++r) {
                const T d = dgates[r];
                vec::axpy(&g.g_wx(r, 0), d, x_t, f_in);
                vec::axpy(&g.g_wh(r, 0), d, h_prev, hid);
                g.g_b(r) += d;
                vec::axpy(&g.gx(ti, 0), d, wx + r * f_in, f_in);
                vec::axpy(dh_prev.data(), d, wh + r * hid, hid);
            }
        }
        dh = dh_prev;
    }
    return g;
}

}  // namespace amc::nn
