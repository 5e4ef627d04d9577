// SPDX-License-Identifier: Apache-2.0

#include <catch2/catch_amalgamated.hpp>

#include "amc/core/rng.hpp"
#include "amc/nn/activations.hpp"
#include "amc/nn/conv.hpp"
#include "amc/nn/dense.hpp"
#include "amc/nn/dropout.hpp"
#include "amc/nn/init.hpp"
#include "amc/nn/loss.hpp"
#include "amc/nn/optimizer.hpp"
#include "amc/nn/pool.hpp"

using namespace amc;
using Catch::Approx;

namespace {

/// Direct triple-loop convolution, independent of the library kernel.
template <typename T>
Tensor<T> conv_oracle(const Tensor<T>& x, const Tensor<T>& w, const Tensor<T>& b) {
    const std::size_t c_in = x.dim(0), time = x.dim(1);
    const std::size_t c_out = w.dim(0), k = w.dim(2);
    const long pad = static_cast<long>((k - 1) / 2);
    Tensor<T> y({c_out, time});
    for (std::size_t o = 0; o < c_out; ++o)
        for (std::size_t t = 0; t < time; ++t) {
            double acc = b(o);
            for (std::size_t c = 0; c < c_in; ++c)
                for (std::size_t kk = 0; kk < k; ++kk) {
                    const long src = static_cast<long>(t) + static_cast<long>(kk) - pad;
                    if (src >= 0 && src < static_cast<long>(time))
                        acc += w(o, c, kk) * x(c, static_cast<std::size_t>(src));
                }
            y(o, t) = static_cast<T>(acc);
        }
    return y;
}

template <typename T>
Tensor<T> random_tensor(std::vector<std::size_t> shape, SeededRng& rng, double scale = 1.0) {
    Tensor<T> t(std::move(shape));
    for (auto& v : t.data) v = static_cast<T>(rng.normal() * scale);
    return t;
}

}  // namespace

TEST_CASE("conv1d: identity kernel") {
    Tensor<float> x({1, 4}, {1, 0, 0, 0});
    Tensor<float> w({1, 1, 3}, {0, 1, 0});
    Tensor<float> b({1}, {0});
    const auto y = nn::conv1d_forward(x, w, b);
    CHECK(y.data == std::vector<float>{1, 0, 0, 0});
}

TEST_CASE("conv1d: shift kernel with zero padding") {
    Tensor<float> x({1, 4}, {1, 2, 3, 4});
    Tensor<float> w({1, 1, 3}, {1, 0, 0});
    Tensor<float> b({1}, {0});
    const auto y = nn::conv1d_forward(x, w, b);
    CHECK(y.data == std::vector<float>{0, 1, 2, 3});
}

TEST_CASE("conv1d matches the direct summation oracle") {
    SeededRng rng(11);
    const auto x = random_tensor<double>({2, 8}, rng);
    const auto w = random_tensor<double>({3, 2, 5}, rng);
    const auto b = random_tensor<double>({3}, rng);
    const auto y = nn::conv1d_forward(x, w, b);
    const auto ref = conv_oracle(x, w, b);
    for (std::size_t i = 0; i < y.numel(); ++i)
        CHECK(y.data[i] == Approx(ref.data[i]).epsilon(1e-6));
}

TEST_CASE("conv1d names the offending dimension on mismatch") {
    Tensor<float> x({2, 8});
    Tensor<float> w({3, 1, 3});  // c_in mismatch
    Tensor<float> b({3});
    try {
        nn::conv1d_forward(x, w, b);
        FAIL("expected ContractError");
    } catch (const ContractError& e) {
        const std::string msg = e.what();
        CHECK(msg.find("w.dim(1)") != std::string::npos);
    }
    Tensor<float> weven({3, 2, 4});
    Tensor<float> b3({3});
    CHECK_THROWS_AS(nn::conv1d_forward(x, weven, b3), ContractError);
}

TEST_CASE("conv1d backward matches finite differences") {
    SeededRng rng(12);
    const auto x = random_tensor<double>({2, 6}, rng);
    const auto w = random_tensor<double>({2, 2, 3}, rng);
    const auto b = random_tensor<double>({2}, rng);
    const auto gy = random_tensor<double>({2, 6}, rng);
    const auto g = nn::conv1d_backward(x, w, gy);
    // scalar objective L = sum(gy . y)
    auto loss = [&](const Tensor<double>& xx, const Tensor<double>& ww, const Tensor<double>& bb) {
        const auto y = nn::conv1d_forward(xx, ww, bb);
        double acc = 0;
        for (std::size_t i = 0; i < y.numel(); ++i) acc += gy.data[i] * y.data[i];
        return acc;
    };
    const double eps = 1e-6;
    for (std::size_t i = 0; i < x.numel(); ++i) {
        auto xp = x, xm = x;
        xp.data[i] += eps;
        xm.data[i] -= eps;
        CHECK(g.gx.data[i] == Approx((loss(xp, w, b) - loss(xm, w, b)) / (2 * eps)).margin(1e-6));
    }
    for (std::size_t i = 0; i < w.numel(); ++i) {
        auto wp = w, wm = w;
        wp.data[i] += eps;
        wm.data[i] -= eps;
        CHECK(g.gw.data[i] == Approx((loss(x, wp, b) - loss(x, wm, b)) / (2 * eps)).margin(1e-6));
    }
    for (std::size_t i = 0; i < b.numel(); ++i) {
        auto bp = b, bm = b;
        bp.data[i] += eps;
        bm.data[i] -= eps;
        CHECK(g.gb.data[i] == Approx((loss(x, w, bp) - loss(x, w, bm)) / (2 * eps)).margin(1e-6));
    }
}

TEST_CASE("maxpool1d: basic window maxima") {
    Tensor<float> x({1, 6}, {3, 1, 2, 5, 4, 0});
    const auto out = nn::maxpool1d_forward(x, 3, 3);
    CHECK(out.y.data == std::vector<float>{3, 5});
}

TEST_CASE("maxpool1d: ties break to the lowest index") {
    Tensor<float> x({1, 3}, {1, 1, 1});
    const auto out = nn::maxpool1d_forward(x, 3, 3);
    CHECK(out.y.data == std::vector<float>{1});
    CHECK(out.argmax[0] == 0);
}

TEST_CASE("maxpool1d: 128 to 42 with size=stride=3") {
    Tensor<float> x({1, 128});
    const auto out = nn::maxpool1d_forward(x, 3, 3);
    CHECK(out.y.dim(1) == 42);
}

TEST_CASE("maxpool1d: window longer than input is an error") {
    Tensor<float> x({1, 2});
    CHECK_THROWS_AS(nn::maxpool1d_forward(x, 3, 3), ContractError);
}

TEST_CASE("maxpool1d backward conserves gradient mass") {
    SeededRng rng(13);
    const auto x = random_tensor<float>({3, 17}, rng);
    const auto out = nn::maxpool1d_forward(x, 3, 2);
    const auto gy = random_tensor<float>({3, out.y.dim(1)}, rng);
    const auto gx = nn::maxpool1d_backward(gy, out.argmax, 3, 17);
    double in_mass = 0, out_mass = 0;
    for (float v : gy.data) out_mass += v;
    for (float v : gx.data) in_mass += v;
    CHECK(in_mass == Approx(out_mass).margin(1e-4));
}

TEST_CASE("dense: identity and constant") {
    Tensor<float> w({2, 2}, {1, 0, 0, 1});
    Tensor<float> b({2}, {0, 0});
    Tensor<float> x({2}, {3, 4});
    CHECK(nn::dense_forward(x, w, b).data == std::vector<float>{3, 4});

    Tensor<float> wz({2, 2}, {0, 0, 0, 0});
    Tensor<float> bc({2}, {1, 2});
    CHECK(nn::dense_forward(x, wz, bc).data == std::vector<float>{1, 2});
}

TEST_CASE("dense matches the loop oracle on a random 11x64 case") {
    SeededRng rng(14);
    const auto w = random_tensor<double>({11, 64}, rng);
    const auto b = random_tensor<double>({11}, rng);
    const auto x = random_tensor<double>({64}, rng);
    const auto y = nn::dense_forward(x, w, b);
    for (std::size_t u = 0; u < 11; ++u) {
        double acc = b(u);
        for (std::size_t f = 0; f < 64; ++f) acc += w(u, f) * x(f);
        CHECK(y(u) == Approx(acc).epsilon(1e-6));
    }
    Tensor<double> bad({63});
    CHECK_THROWS_AS(nn::dense_forward(bad, w, b), ContractError);
}

TEST_CASE("dense backward identities") {
    SeededRng rng(15);
    const auto w = random_tensor<double>({4, 6}, rng);
    const auto x = random_tensor<double>({6}, rng);
    const auto gy = random_tensor<double>({4}, rng);
    const auto g = nn::dense_backward(x, w, gy);
    for (std::size_t f = 0; f < 6; ++f) {
        double acc = 0;
        for (std::size_t u = 0; u < 4; ++u) acc += w(u, f) * gy(u);
        CHECK(g.gx(f) == Approx(acc).epsilon(1e-12));
    }
    for (std::size_t u = 0; u < 4; ++u)
        for (std::size_t f = 0; f < 6; ++f)
            CHECK(g.gw(u, f) == Approx(gy(u) * x(f)).epsilon(1e-12));
}

TEST_CASE("relu and softmax basics") {
    CHECK(nn::relu(Tensor<float>({3}, {-1, 0, 2})).data == std::vector<float>{0, 0, 2});

    const auto uniform = nn::softmax(Tensor<double>({11}));
    for (double v : uniform.data) CHECK(v == Approx(1.0 / 11).epsilon(1e-9));

    const auto stable = nn::softmax(Tensor<double>({2}, {1000, 1000}));
    CHECK(stable(0) == Approx(0.5));
    CHECK(stable(1) == Approx(0.5));
}

TEST_CASE("softmax rows sum to one and stay in (0,1)") {
    SeededRng rng(16);
    auto x = random_tensor<float>({7, 11}, rng, 5.0);
    const auto y = nn::softmax(x);
    for (std::size_t r = 0; r < 7; ++r) {
        double sum = 0;
        for (std::size_t c = 0; c < 11; ++c) {
            CHECK(y(r, c) > 0.0f);
            CHECK(y(r, c) < 1.0f);
            sum += y(r, c);
        }
        CHECK(sum == Approx(1.0).margin(1e-6));
    }
}

TEST_CASE("dropout: rate 0 and inference mode are exact identities") {
    SeededRng rng(17);
    const auto x = random_tensor<float>({64}, rng);
    SeededRng r1(1);
    CHECK(nn::dropout(x, 0.0, r1, true).y.data == x.data);
    SeededRng r2(1);
    CHECK(nn::dropout(x, 0.5, r2, false).y.data == x.data);
    SeededRng r3(1);
    CHECK_THROWS_AS(nn::dropout(x, 1.0, r3, true), ContractError);
}

TEST_CASE("dropout: Monte-Carlo expectation within 2%") {
    const Tensor<float> x({1}, {2.0f});
    SeededRng rng(18);
    double sum = 0;
    const int n = 100000;
    for (int i = 0; i < n; ++i) sum += nn::dropout(x, 0.5, rng, true).y(0);
    CHECK(sum / n == Approx(2.0).epsilon(0.02));
}

TEST_CASE("dropout backward applies the stored mask") {
    SeededRng rng(19);
    const auto x = random_tensor<float>({32}, rng);
    const auto out = nn::dropout(x, 0.5, rng, true);
    const auto gx = nn::dropout_backward(Tensor<float>::full({32}, 1.0f), out.mask);
    for (std::size_t i = 0; i < 32; ++i) CHECK(gx(i) == out.mask(i));
}

TEST_CASE("cross entropy: perfect, uniform, and malformed labels") {
    Tensor<double> perfect({1, 11});
    perfect(0, 4) = 1.0;
    Tensor<double> label({1, 11});
    label(0, 4) = 1.0;
    CHECK(nn::cross_entropy(perfect, label).loss <= 1e-6);

    Tensor<double> uniform = Tensor<double>::full({1, 11}, 1.0 / 11);
    CHECK(nn::cross_entropy(uniform, label).loss == Approx(std::log(11.0)).epsilon(1e-9));

    Tensor<double> two({1, 11});
    two(0, 1) = two(0, 2) = 1.0;
    CHECK_THROWS_AS(nn::cross_entropy(uniform, two), ContractError);
    Tensor<double> frac({1, 11});
    frac(0, 1) = 0.5;
    CHECK_THROWS_AS(nn::cross_entropy(uniform, frac), ContractError);
}

TEST_CASE("fused softmax+CE gradient matches finite differences") {
    SeededRng rng(20);
    const std::size_t n = 3, classes = 11;
    auto logits = random_tensor<double>({n, classes}, rng, 2.0);
    Tensor<double> labels({n, classes});
    labels(0, 2) = labels(1, 7) = labels(2, 0) = 1.0;

    auto loss_of = [&](const Tensor<double>& lg) {
        return nn::cross_entropy(nn::softmax(lg), labels).loss;
    };
    const auto out = nn::cross_entropy(nn::softmax(logits), labels);
    const double eps = 1e-6;
    for (std::size_t i = 0; i < logits.numel(); ++i) {
        auto up = logits, down = logits;
        up.data[i] += eps;
        down.data[i] -= eps;
        const double numeric = (loss_of(up) - loss_of(down)) / (2 * eps);
        CHECK(out.dlogits.data[i] == Approx(numeric).margin(1e-5));
    }
}

TEST_CASE("adam: zero gradient is a fixed point and t increments") {
    Parameter<double> p("w", Tensor<double>({3}, {1, -2, 3}));
    std::vector<Parameter<double>*> params{&p};
    auto state = nn::AdamState<double>::for_params(params);
    nn::AdamHyper<double> hyper;
    nn::adam_step(params, state, hyper);
    nn::adam_step(params, state, hyper);
    CHECK(p.value.data == std::vector<double>{1, -2, 3});
    CHECK(state.t == 2);
    hyper.lr = 0;
    CHECK_THROWS_AS(nn::adam_step(params, state, hyper), ContractError);
}

TEST_CASE("adam: first step magnitude is lr * |g| / (|g| + eps)") {
    Parameter<double> p("w", Tensor<double>({1}, {0.5}));
    p.grad(0) = -0.37;
    std::vector<Parameter<double>*> params{&p};
    auto state = nn::AdamState<double>::for_params(params);
    nn::AdamHyper<double> hyper;  // lr 0.001
    nn::adam_step(params, state, hyper);
    const double expect = 0.001 * 0.37 / (0.37 + 1e-8);
    CHECK(p.value(0) - 0.5 == Approx(expect).epsilon(1e-9));
}

TEST_CASE("adam: 5-step trajectory on f(w)=w^2 matches an independent oracle") {
    const double lr = 0.1, b1 = 0.9, b2 = 0.999, eps = 1e-8;
    Parameter<double> p("w", Tensor<double>({1}, {1.0}));
    std::vector<Parameter<double>*> params{&p};
    auto state = nn::AdamState<double>::for_params(params);
    nn::AdamHyper<double> hyper{lr, b1, b2, eps};

    // textbook reference, written independently
    double w_ref = 1.0, m = 0, v = 0;
    for (int t = 1; t <= 5; ++t) {
        const double g_ref = 2.0 * w_ref;
        m = b1 * m + (1 - b1) * g_ref;
        v = b2 * v + (1 - b2) * g_ref * g_ref;
        const double m_hat = m / (1 - std::pow(b1, t));
        const double v_hat = v / (1 - std::pow(b2, t));
        w_ref -= lr * m_hat / (std::sqrt(v_hat) + eps);

        p.grad(0) = 2.0 * p.value(0);
        nn::adam_step(params, state, hyper);
        CHECK(p.value(0) == Approx(w_ref).margin(1e-10));
    }
}

TEST_CASE("max_norm_project row examples") {
    Tensor<float> w1({1, 2}, {3, 4});
    nn::max_norm_project(w1, 10.0f);
    CHECK(w1.data == std::vector<float>{3, 4});

    Tensor<float> w2({1, 2}, {3, 4});
    nn::max_norm_project(w2, 1.0f);
    CHECK(w2(0, 0) == Approx(0.6f).epsilon(1e-6));
    CHECK(w2(0, 1) == Approx(0.8f).epsilon(1e-6));
    CHECK_THROWS_AS(nn::max_norm_project(w2, 0.0f), ContractError);
}

TEST_CASE("max_norm_project: post-norm = min(pre-norm, limit), idempotent bit-exactly") {
    SeededRng rng(21);
    Tensor<float> w({16, 24});
    for (auto& v : w.data) v = static_cast<float>(rng.normal());
    std::vector<double> pre(16);
    for (std::size_t r = 0; r < 16; ++r) {
        double sq = 0;
        for (std::size_t c = 0; c < 24; ++c) sq += double(w(r, c)) * w(r, c);
        pre[r] = std::sqrt(sq);
    }
    const float limit = 1.5f;
    nn::max_norm_project(w, limit);
    for (std::size_t r = 0; r < 16; ++r) {
        double sq = 0;
        for (std::size_t c = 0; c < 24; ++c) sq += double(w(r, c)) * w(r, c);
        CHECK(std::sqrt(sq) == Approx(std::min(pre[r], double(limit))).margin(1e-6));
    }
    const auto once = w.data;
    nn::max_norm_project(w, limit);
    CHECK(w.data == once);  // bit-exact
}

TEST_CASE("init: zeros, glorot bound, determinism") {
    SeededRng rng(22);
    const auto z = nn::init_params<float>({4, 4}, nn::InitScheme::zeros, rng);
    for (float v : z.data) CHECK(v == 0.0f);

    const auto g = nn::init_params<float>({100, 100}, nn::InitScheme::glorot_uniform, rng);
    const double bound = std::sqrt(6.0 / 200.0);
    for (float v : g.data) CHECK(std::fabs(v) <= bound);

    SeededRng a(33), b(33);
    const auto ga = nn::init_params<float>({8, 8}, nn::InitScheme::glorot_uniform, a);
    const auto gb = nn::init_params<float>({8, 8}, nn::InitScheme::glorot_uniform, b);
    CHECK(ga.data == gb.data);
}

TEST_CASE("init: orthogonal columns") {
    SeededRng rng(23);
    const auto q = nn::init_params<double>({64, 64}, nn::InitScheme::orthogonal, rng);
    for (std::size_t a = 0; a < 64; ++a)
        for (std::size_t b = a; b < 64; ++b) {
            double dot = 0;
            for (std::size_t r = 0; r < 64; ++r) dot += q(r, a) * q(r, b);
            CHECK(std::fabs(dot - (a == b ? 1.0 : 0.0)) < 1e-5);
        }
    CHECK_THROWS_AS(nn::init_params<double>({4, 8}, nn::InitScheme::orthogonal, rng),
                    ContractError);
}
