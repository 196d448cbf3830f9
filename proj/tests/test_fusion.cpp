#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "vqalab/fusion/fusion.hpp"
#include "vqalab/nn/gradcheck.hpp"
#include "vqalab/nn/rng.hpp"
#include "vqalab/signal/sketch.hpp"

using namespace vqalab;
using fusion::FullFusion;
using fusion::McbFusion;
using fusion::SimpleFusion;
using nn::Tensor;
using nn::Var;

namespace {

Tensor random_vec(std::size_t n, nn::Rng& rng) {
    Tensor t({n});
    for (double& v : t.data()) v = rng.uniform(-1, 1);
    return t;
}

Tensor identity2() { return Tensor::matrix(2, 2, {1, 0, 0, 1}); }

}  // namespace

TEST_CASE("simple fusion: zero image branch with zero bias kills the output") {
    SimpleFusion sf(2, 3, 2, nn::InitMode{nn::InitTag::I2, 1}, 1);
    sf.proj_img().bias = Var::param(Tensor::vec({0, 0}));
    Var out = sf.fuse(Var::constant(Tensor::vec({0, 0})),
                      Var::constant(Tensor::vec({0.3, -0.7, 0.5})));
    for (double v : out.value().data()) CHECK(v == 0.0);
}

TEST_CASE("simple fusion: identity projections on all-ones give tanh(1)^2") {
    SimpleFusion sf(2, 2, 2, nn::InitMode{nn::InitTag::I2, 1}, 1);
    sf.proj_img() = nn::Linear(identity2(), Tensor::vec({0, 0}));
    sf.proj_q() = nn::Linear(identity2(), Tensor::vec({0, 0}));
    Var out = sf.fuse(Var::constant(Tensor::vec({1, 1})), Var::constant(Tensor::vec({1, 1})));
    double expect = std::tanh(1.0) * std::tanh(1.0);
    CHECK(expect == doctest::Approx(0.5800).epsilon(1e-4));
    for (double v : out.value().data()) CHECK(v == doctest::Approx(expect).epsilon(1e-12));
}

TEST_CASE("simple fusion with matching identity branches is swap-symmetric") {
    SimpleFusion sf(2, 2, 2, nn::InitMode{nn::InitTag::I2, 1}, 1);
    sf.proj_img() = nn::Linear(identity2(), Tensor::vec({0, 0}));
    sf.proj_q() = nn::Linear(identity2(), Tensor::vec({0, 0}));
    Tensor a = Tensor::vec({0.4, -0.9});
    Tensor b = Tensor::vec({-0.2, 0.6});
    Var ab = sf.fuse(Var::constant(a), Var::constant(b));
    Var ba = sf.fuse(Var::constant(b), Var::constant(a));
    CHECK(ab.value().data() == ba.value().data());
}

TEST_CASE("full fusion: all-zero weights and biases give zero output") {
    FullFusion ff(3, 3, 4, nn::InitMode{nn::InitTag::I2, 2}, 1);
    for (Var p : ff.parameters())
        for (double& v : p.mutable_value().data()) v = 0.0;
    nn::Rng rng(3);
    Var out = ff.fuse(Var::constant(random_vec(3, rng)), Var::constant(random_vec(3, rng)));
    for (double v : out.value().data()) CHECK(v == 0.0);
}

TEST_CASE("full fusion: a saturated-off gate reduces to tanh(Wo [p;0])") {
    nn::Rng rng(4);
    FullFusion ff(2, 2, 2, nn::InitMode{nn::InitTag::I2, 2}, 1);
    // Drive the gate logits to -40 so sigmoid is ~0 and the attention half of
    // the final concat vanishes.
    ff.gate() = nn::Linear(Tensor::matrix(4, 2, std::vector<double>(8, 0.0)),
                           Tensor::vec({-40, -40}));
    Tensor img = random_vec(2, rng), q = random_vec(2, rng);
    Var out = ff.fuse(Var::constant(img), Var::constant(q));

    Var u = nn::tanh_op(ff.proj_img().apply(Var::constant(img)));
    Var v = nn::tanh_op(ff.proj_q().apply(Var::constant(q)));
    Var p = nn::mul(u, v);
    Var expect = nn::tanh_op(ff.out_proj().apply(
        nn::concat_vec(p, Var::constant(Tensor::vec({0, 0})))));
    for (std::size_t i = 0; i < 2; ++i)
        CHECK(out.value()[i] == doctest::Approx(expect.value()[i]).epsilon(1e-12));
}

TEST_CASE("full fusion 4-entry hand trace") {
    FullFusion ff(2, 2, 2, nn::InitMode{nn::InitTag::I2, 2}, 1);
    ff.proj_img() = nn::Linear(Tensor::matrix(2, 2, {0.5, -0.3, 0.2, 0.8}),
                               Tensor::vec({0.1, -0.2}));
    ff.proj_q() = nn::Linear(Tensor::matrix(2, 2, {-0.4, 0.6, 0.7, -0.1}),
                             Tensor::vec({0.0, 0.3}));
    ff.gate() = nn::Linear(Tensor::matrix(4, 2, {0.2, -0.1, 0.3, 0.4, -0.5, 0.6, 0.1, -0.2}),
                           Tensor::vec({0.05, -0.05}));
    ff.out_proj() = nn::Linear(Tensor::matrix(4, 2, {0.9, -0.7, 0.2, 0.5, -0.3, 0.1, 0.6, 0.4}),
                               Tensor::vec({-0.1, 0.2}));
    double xi0 = 0.6, xi1 = -0.5, xq0 = 0.9, xq1 = 0.2;
    Var out = ff.fuse(Var::constant(Tensor::vec({xi0, xi1})),
                      Var::constant(Tensor::vec({xq0, xq1})));

    double u0 = std::tanh(xi0 * 0.5 + xi1 * 0.2 + 0.1);
    double u1 = std::tanh(xi0 * -0.3 + xi1 * 0.8 - 0.2);
    double v0 = std::tanh(xq0 * -0.4 + xq1 * 0.7 + 0.0);
    double v1 = std::tanh(xq0 * 0.6 + xq1 * -0.1 + 0.3);
    double p0 = u0 * v0, p1 = u1 * v1;
    auto sigmoid = [](double z) { return 1.0 / (1.0 + std::exp(-z)); };
    double g0 = sigmoid(u0 * 0.2 + u1 * 0.3 + v0 * -0.5 + v1 * 0.1 + 0.05);
    double g1 = sigmoid(u0 * -0.1 + u1 * 0.4 + v0 * 0.6 + v1 * -0.2 - 0.05);
    double a0 = g0 * (u0 + v0), a1 = g1 * (u1 + v1);
    double o0 = std::tanh(p0 * 0.9 + p1 * 0.2 + a0 * -0.3 + a1 * 0.6 - 0.1);
    double o1 = std::tanh(p0 * -0.7 + p1 * 0.5 + a0 * 0.1 + a1 * 0.4 + 0.2);
    CHECK(out.value()[0] == doctest::Approx(o0).epsilon(1e-12));
    CHECK(out.value()[1] == doctest::Approx(o1).epsilon(1e-12));
}

TEST_CASE("mcb: zero inputs give a zero pre-normalization output") {
    McbFusion mcb(5, 4, 8, 9);
    Var out = mcb.fuse_raw(Var::constant(Tensor::zeros({5})), Var::constant(Tensor::zeros({4})));
    for (double v : out.value().data()) CHECK(v == 0.0);
}

TEST_CASE("mcb core equals the sketched outer product") {
    nn::Rng rng(10);
    for (std::uint64_t seed : {1ull, 2ull, 3ull}) {
        McbFusion mcb(6, 5, 16, seed);
        Tensor x = random_vec(6, rng), y = random_vec(5, rng);
        Var raw = mcb.fuse_raw(Var::constant(x), Var::constant(y));

        std::vector<double> outer(6 * 5);
        for (std::size_t i = 0; i < 6; ++i)
            for (std::size_t j = 0; j < 5; ++j) outer[i * 5 + j] = x[i] * y[j];
        std::vector<double> oracle = signal::count_sketch(
            outer, signal::product_plan(mcb.plan_img(), mcb.plan_q()));
        for (std::size_t k = 0; k < 16; ++k)
            CHECK(raw.value()[k] == doctest::Approx(oracle[k]).epsilon(1e-9));
    }
}

TEST_CASE("mcb output is unit length after normalization") {
    nn::Rng rng(11);
    McbFusion mcb(6, 6, 8, 4);
    Var out = mcb.fuse(Var::constant(random_vec(6, rng)), Var::constant(random_vec(6, rng)));
    double norm = 0;
    for (double v : out.value().data()) norm += v * v;
    CHECK(std::sqrt(norm) == doctest::Approx(1.0).epsilon(1e-9));
}

TEST_CASE("mcb core is bilinear") {
    nn::Rng rng(12);
    McbFusion mcb(4, 4, 8, 5);
    Tensor x = random_vec(4, rng), y = random_vec(4, rng);
    Tensor x2 = x, y3 = y;
    for (double& v : x2.data()) v *= 2.0;
    for (double& v : y3.data()) v *= 3.0;
    Var base = mcb.fuse_raw(Var::constant(x), Var::constant(y));
    Var left = mcb.fuse_raw(Var::constant(x2), Var::constant(y));
    Var right = mcb.fuse_raw(Var::constant(x), Var::constant(y3));
    for (std::size_t k = 0; k < 8; ++k) {
        CHECK(left.value()[k] == doctest::Approx(2.0 * base.value()[k]).epsilon(1e-12));
        CHECK(right.value()[k] == doctest::Approx(3.0 * base.value()[k]).epsilon(1e-12));
    }
}

TEST_CASE("every fusion strategy passes a finite-difference check") {
    for (fusion::Strategy strat :
         {fusion::Strategy::simple, fusion::Strategy::full, fusion::Strategy::mcb}) {
        nn::InitMode init{nn::InitTag::I2, 21};
        nn::Rng rng(22);
        nn::Linear up_i(4, 8, init, 1), up_q(3, 8, init, 2);
        fusion::Fuser fuser(strat, 8, 8, 5, 8, init, 3);
        Tensor img = random_vec(4, rng), q = random_vec(3, rng);
        if (strat == fusion::Strategy::mcb) {
            // Keep the signed square root away from its kink at zero.
            auto safe = [&] {
                Var vi = nn::tanh_op(up_i.apply(Var::constant(img)));
                Var vq = nn::tanh_op(up_q.apply(Var::constant(q)));
                Var raw = fuser.mcb().fuse_raw(vi, vq);
                for (double v : raw.value().data())
                    if (std::abs(v) < 3e-3) return false;
                return true;
            };
            while (!safe()) {
                img = random_vec(4, rng);
                q = random_vec(3, rng);
            }
        }
        Tensor target = random_vec(fuser.out_dim(), rng);
        std::vector<Var> params = {up_i.weight, up_i.bias, up_q.weight, up_q.bias};
        for (const Var& p : fuser.parameters()) params.push_back(p);
        auto rep = nn::gradient_check(
            [&] {
                Var vi = nn::tanh_op(up_i.apply(Var::constant(img)));
                Var vq = nn::tanh_op(up_q.apply(Var::constant(q)));
                return nn::mse_against(fuser.fuse(vi, vq), target);
            },
            params, 1e-5);
        CHECK(rep.max_rel_err < 1e-4);
    }
}

TEST_CASE("strategy names roundtrip and unknown names are rejected") {
    for (fusion::Strategy s :
         {fusion::Strategy::simple, fusion::Strategy::full, fusion::Strategy::mcb})
        CHECK(fusion::strategy_from_name(fusion::strategy_name(s)) == s);
    CHECK_THROWS_AS(fusion::strategy_from_name("bilinear"), ConfigError);
}
