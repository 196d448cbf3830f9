#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <limits>

#include "vqalab/nn/gradcheck.hpp"
#include "vqalab/nn/layers.hpp"
#include "vqalab/nn/optim.hpp"
#include "vqalab/nn/rnn.hpp"

using namespace vqalab;
using nn::Tensor;
using nn::Var;

TEST_CASE("linear layer with identity weights is the identity") {
    nn::Linear lin(Tensor::matrix(3, 3, {1, 0, 0, 0, 1, 0, 0, 0, 1}), Tensor::vec({0, 0, 0}));
    Var out = lin.apply(Var::constant(Tensor::vec({1, 2, 3})));
    CHECK(out.value()[0] == doctest::Approx(1.0));
    CHECK(out.value()[1] == doctest::Approx(2.0));
    CHECK(out.value()[2] == doctest::Approx(3.0));
}

TEST_CASE("tanh of all-zero input is all zero") {
    Var out = nn::tanh_op(Var::constant(Tensor::vec({0, 0, 0, 0})));
    for (double v : out.value().data()) CHECK(v == 0.0);
}

TEST_CASE("2x2 linear hand multiply") {
    // x * W with W = [[1,2],[3,4]] read as [in,out]; x=[1,1] -> [1+3, 2+4]
    nn::Linear lin(Tensor::matrix(2, 2, {1, 2, 3, 4}), Tensor::vec({0, 0}));
    Var out = lin.apply(Var::constant(Tensor::vec({1, 1})));
    CHECK(out.value()[0] == doctest::Approx(4.0));
    CHECK(out.value()[1] == doctest::Approx(6.0));
}

TEST_CASE("mlp rejects a shape mismatch naming the layer") {
    nn::Mlp mlp({{3, 4, 2}, nn::Act::tanh, nn::Act::none, 0.0, false},
                nn::InitMode{nn::InitTag::I2, 1}, 9);
    CHECK_THROWS_WITH_AS(mlp.forward(Var::constant(Tensor::vec({1, 2})), false),
                         doctest::Contains("layer 0"), ShapeError);
}

TEST_CASE("grad of sum is all ones") {
    Var x = Var::param(Tensor::matrix(2, 3, {1, -2, 3, 4, 0, -1}));
    nn::Tape tape;
    tape.backward_scalar(nn::sum(x));
    Tensor g = x.grad();
    for (double v : g.data()) CHECK(v == doctest::Approx(1.0));
}

TEST_CASE("grad of tanh(w*1) at w=0 is 1") {
    Var w = Var::param(Tensor::scalar(0.0));
    nn::Tape tape;
    tape.backward_scalar(nn::tanh_op(w));
    CHECK(w.grad()[0] == doctest::Approx(1.0));
}

TEST_CASE("3-layer mlp matches central finite differences at seed 42") {
    nn::Mlp mlp({{4, 5, 5, 3}, nn::Act::tanh, nn::Act::none, 0.0, false},
                nn::InitMode{nn::InitTag::I2, 42}, 1);
    nn::Rng rng(42);
    Tensor x({4}), target({3});
    for (double& v : x.data()) v = rng.uniform(-1, 1);
    for (double& v : target.data()) v = rng.uniform(-1, 1);
    auto report = nn::gradient_check(
        [&] { return nn::mse_against(mlp.forward(Var::constant(x), false), target); },
        mlp.parameters(), 1e-5);
    CHECK(report.max_rel_err < 1e-4);
}

TEST_CASE("backward twice on one tape is rejected") {
    Var x = Var::param(Tensor::vec({1, 2}));
    nn::Tape tape;
    Var loss = nn::sum(x);
    tape.backward_scalar(loss);
    CHECK_THROWS_AS(tape.backward_scalar(loss), std::logic_error);
}

TEST_CASE("I1 weights stay within the clip bound 0.04") {
    Tensor w = nn::init_weights(64, 64, nn::InitMode{nn::InitTag::I1, 7}, 0);
    for (double v : w.data()) CHECK(std::abs(v) <= 0.04);
}

TEST_CASE("I2 with fan_in=fan_out=3 stays within 1") {
    Tensor w = nn::init_weights(3, 3, nn::InitMode{nn::InitTag::I2, 7}, 0);
    for (double v : w.data()) CHECK(std::abs(v) <= 1.0);
}

TEST_CASE("same init mode and seed is bit-identical") {
    for (nn::InitTag tag : {nn::InitTag::I1, nn::InitTag::I2}) {
        Tensor a = nn::init_weights(8, 5, nn::InitMode{tag, 123}, 4);
        Tensor b = nn::init_weights(8, 5, nn::InitMode{tag, 123}, 4);
        CHECK(a.data() == b.data());
    }
}

TEST_CASE("sgd with alpha=0 leaves params unchanged") {
    Var w = Var::param(Tensor::vec({1.5, -2.0}));
    w.accumulate_grad(Tensor::vec({3.0, 4.0}));
    std::vector<Var> ps = {w};
    nn::Sgd{0.0}.step(ps);
    CHECK(w.value()[0] == 1.5);
    CHECK(w.value()[1] == -2.0);
}

TEST_CASE("sgd arithmetic: w=1, grad=2, alpha=0.1 -> 0.8") {
    Var w = Var::param(Tensor::scalar(1.0));
    w.accumulate_grad(Tensor::scalar(2.0));
    std::vector<Var> ps = {w};
    nn::Sgd{0.1}.step(ps);
    CHECK(w.value()[0] == doctest::Approx(0.8));
}

TEST_CASE("sgd converges on the quadratic (w-3)^2") {
    Var w = Var::param(Tensor::scalar(0.0));
    std::vector<Var> ps = {w};
    for (int i = 0; i < 200; ++i) {
        nn::Sgd::zero_grads(ps);
        nn::Tape tape;
        Var diff = nn::add_const(w, Tensor::scalar(-3.0));
        tape.backward_scalar(nn::mul(diff, diff));
        nn::Sgd{0.1}.step(ps);
    }
    CHECK(w.value()[0] == doctest::Approx(3.0).epsilon(1e-6));
}

TEST_CASE("sgd rejects non-finite gradients") {
    Var w = Var::param(Tensor::scalar(1.0));
    w.accumulate_grad(Tensor::scalar(std::numeric_limits<double>::quiet_NaN()));
    std::vector<Var> ps = {w};
    CHECK_THROWS_AS(nn::Sgd{0.1}.step(ps), NumericalError);
}

TEST_CASE("rnn: empty sequence gives the zero initial state") {
    nn::RnnEncoder rnn(5, 3, 4, nn::InitMode{nn::InitTag::I2, 1}, 2);
    Var h = rnn.encode({});
    CHECK(h.value().size() == 4);
    for (double v : h.value().data()) CHECK(v == 0.0);
}

TEST_CASE("rnn: zero weights give zero output for any sequence") {
    nn::RnnEncoder rnn(5, 3, 4, nn::InitMode{nn::InitTag::I2, 1}, 2);
    for (Var p : rnn.parameters())
        for (double& v : p.mutable_value().data()) v = 0.0;
    Var h = rnn.encode({0, 3, 1, 4});
    for (double v : h.value().data()) CHECK(v == 0.0);
}

TEST_CASE("rnn: 1-token hand recurrence at dim 2") {
    nn::RnnEncoder rnn(3, 2, 2, nn::InitMode{nn::InitTag::I2, 1}, 2);
    rnn.embed() = Var::param(Tensor::matrix(3, 2, {0.1, 0.2, 0.3, -0.4, 0.5, 0.6}));
    rnn.wx() = Var::param(Tensor::matrix(2, 2, {1.0, 0.5, -0.5, 2.0}));
    rnn.wh() = Var::param(Tensor::matrix(2, 2, {9, 9, 9, 9}));  // h_0=0 so unused
    rnn.bias() = Var::param(Tensor::vec({0.05, -0.1}));
    Var h = rnn.encode({1});
    // e = [0.3, -0.4]; pre = e*Wx + b = [0.3+0.2+0.05, 0.15-0.8-0.1]
    CHECK(h.value()[0] == doctest::Approx(std::tanh(0.55)).epsilon(1e-12));
    CHECK(h.value()[1] == doctest::Approx(std::tanh(-0.75)).epsilon(1e-12));
}

TEST_CASE("rnn rejects out-of-vocabulary tokens with the position") {
    nn::RnnEncoder rnn(3, 2, 2, nn::InitMode{nn::InitTag::I2, 1}, 2);
    CHECK_THROWS_WITH_AS(rnn.encode({0, 7}), doctest::Contains("position 1"), ConfigError);
}

TEST_CASE("softmax rows are non-negative and sum to one") {
    nn::Rng rng(3);
    Tensor x({4, 6});
    for (double& v : x.data()) v = rng.uniform(-5, 5);
    Var sm = nn::softmax_rows(Var::constant(x));
    for (std::size_t r = 0; r < 4; ++r) {
        double s = 0;
        for (std::size_t c = 0; c < 6; ++c) {
            CHECK(sm.value().at(r, c) >= 0.0);
            s += sm.value().at(r, c);
        }
        CHECK(s == doctest::Approx(1.0).epsilon(1e-9));
    }
}

TEST_CASE("dropout is the identity at rate 0 and in eval mode") {
    nn::Rng rng(5);
    Tensor x = Tensor::vec({1, -2, 3, -4});
    Var a = nn::dropout(Var::constant(x), 0.0, rng, true);
    Var b = nn::dropout(Var::constant(x), 0.5, rng, false);
    CHECK(a.value().data() == x.data());
    CHECK(b.value().data() == x.data());
}

TEST_CASE("dropout rejects rates outside [0,1)") {
    nn::Rng rng(5);
    CHECK_THROWS_AS(nn::dropout(Var::constant(Tensor::vec({1})), 1.0, rng, true), ConfigError);
    CHECK_THROWS_AS(nn::dropout(Var::constant(Tensor::vec({1})), -0.1, rng, true), ConfigError);
}

TEST_CASE("layernorm output has zero mean and unit variance") {
    nn::Rng rng(11);
    Tensor x({3, 8});
    for (double& v : x.data()) v = rng.uniform(-4, 4);
    Var ln = nn::layernorm_rows(Var::constant(x));
    for (std::size_t r = 0; r < 3; ++r) {
        double mu = 0, var = 0;
        for (std::size_t c = 0; c < 8; ++c) mu += ln.value().at(r, c);
        mu /= 8;
        for (std::size_t c = 0; c < 8; ++c) {
            double d = ln.value().at(r, c) - mu;
            var += d * d;
        }
        var /= 8;
        CHECK(std::abs(mu) < 1e-9);
        CHECK(var == doctest::Approx(1.0).epsilon(1e-6));
    }
}

TEST_CASE("per-layer gradient checks over 20 seeds") {
    for (std::uint64_t seed = 1; seed <= 20; ++seed) {
        nn::Rng rng(seed);
        for (nn::Act act : {nn::Act::tanh, nn::Act::relu, nn::Act::sigmoid, nn::Act::softmax}) {
            nn::Mlp mlp({{3, 4, 2}, nn::Act::tanh, act, 0.0, false},
                        nn::InitMode{nn::InitTag::I2, seed}, 3);
            Tensor x({3}), target({2});
            for (double& v : x.data()) v = rng.uniform(-1, 1);
            for (double& v : target.data()) v = rng.uniform(0.1, 0.9);
            auto rep = nn::gradient_check(
                [&] { return nn::mse_against(mlp.forward(Var::constant(x), false), target); },
                mlp.parameters(), 1e-5);
            CHECK(rep.max_rel_err < 1e-4);
        }
    }
}

TEST_CASE("identical seeds give bit-identical forward and gradients") {
    auto run = [] {
        nn::Mlp mlp({{3, 5, 2}, nn::Act::tanh, nn::Act::none, 0.0, false},
                    nn::InitMode{nn::InitTag::I1, 77}, 5);
        nn::Tape tape;
        Var out = mlp.forward(Var::constant(Tensor::vec({0.3, -0.2, 0.9})), false);
        tape.backward_scalar(nn::sum(out));
        std::vector<double> flat;
        for (const Var& p : mlp.parameters()) {
            auto g = p.grad().data();
            flat.insert(flat.end(), g.begin(), g.end());
        }
        auto o = out.value().data();
        flat.insert(flat.end(), o.begin(), o.end());
        return flat;
    };
    CHECK(run() == run());
}
