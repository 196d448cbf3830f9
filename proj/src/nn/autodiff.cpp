#include "vqalab/nn/autodiff.hpp"

#include <algorithm>
#include <cmath>
#include <cstring>

namespace vqalab::nn {

namespace {
thread_local Tape* t_current = nullptr;
}

// ---- Var --------------------------------------------------------------------

Var Var::constant(Tensor t) {
    auto n = std::make_shared<detail::Node>();
    n->value = std::move(t);
    return Var(std::move(n));
}

Var Var::param(Tensor t) {
    auto n = std::make_shared<detail::Node>();
    n->value = std::move(t);
    n->requires_grad = true;
    return Var(std::move(n));
}

Tensor Var::grad() const {
    if (n_->has_grad) return n_->grad;
    return Tensor::zeros(n_->value.shape());
}

void Var::accumulate_grad(const Tensor& g) {
    if (!n_ || !n_->requires_grad) return;
    if (!n_->has_grad) {
        n_->grad = g;
        if (!n_->grad.same_shape(n_->value)) throw ShapeError("gradient shape mismatch");
        n_->has_grad = true;
    } else {
        n_->grad.add_inplace(g);
    }
}

void Var::zero_grad() {
    if (!n_) return;
    n_->has_grad = false;
    n_->grad = Tensor();
}

Var Var::detach() const {
    return Var::constant(n_->value);
}

// ---- Tape -------------------------------------------------------------------

Tape::Tape() : prev_(t_current) { t_current = this; }

Tape::~Tape() { t_current = prev_; }

Tape* Tape::current() { return t_current; }

void Tape::record(detail::NodePtr n) { trace_.push_back(std::move(n)); }

void Tape::backward(const Var& output, const Tensor& upstream) {
    if (consumed_) throw std::logic_error("backward called twice on one tape");
    consumed_ = true;
    if (!output.requires_grad()) return;
    if (!upstream.same_shape(output.value()))
        throw ShapeError("upstream gradient shape does not match output");
    const_cast<Var&>(output).accumulate_grad(upstream);
    for (auto it = trace_.rbegin(); it != trace_.rend(); ++it) {
        detail::Node& node = **it;
        if (node.has_grad && node.backprop) node.backprop();
    }
}

void Tape::backward_scalar(const Var& loss) {
    if (loss.value().size() != 1) throw ShapeError("backward_scalar expects a scalar loss");
    backward(loss, Tensor::full(loss.value().shape(), 1.0));
}

// ---- op factory ---------------------------------------------------------------

Var make_op(Tensor value, std::vector<Var> parents,
            std::function<void(const Tensor&, std::vector<Var>&)> backward) {
    auto n = std::make_shared<detail::Node>();
    n->value = std::move(value);
    bool needs = false;
    for (const Var& p : parents)
        if (p.requires_grad()) needs = true;
    Var out(n);
    if (needs) {
        Tape* tape = Tape::current();
        if (!tape) return out;  // eval-mode forward: no trace kept
        n->requires_grad = true;
        detail::Node* self = n.get();
        n->backprop = [self, parents = std::move(parents), bwd = std::move(backward)]() mutable {
            bwd(self->grad, parents);
        };
        tape->record(std::move(n));
    }
    return out;
}

// ---- helpers ----------------------------------------------------------------

namespace {

void require_same_shape(const Var& a, const Var& b, const char* op) {
    if (!a.value().same_shape(b.value()))
        throw ShapeError(std::string(op) + ": shape mismatch");
}

Tensor map_unary(const Tensor& a, double (*f)(double)) {
    Tensor out = a;
    for (double& v : out.data()) v = f(v);
    return out;
}

// C (r x c) += or = A (r x k) * B (k x c)
void mm(const double* a, std::size_t r, std::size_t k, const double* b, std::size_t c,
        double* out) {
    std::memset(out, 0, sizeof(double) * r * c);
    for (std::size_t i = 0; i < r; ++i)
        for (std::size_t p = 0; p < k; ++p) {
            double av = a[i * k + p];
            if (av == 0.0) continue;
            const double* brow = b + p * c;
            double* orow = out + i * c;
            for (std::size_t j = 0; j < c; ++j) orow[j] += av * brow[j];
        }
}

// C (r x c) = A^T with A (k x r), times B (k x c)
void mm_at_b(const double* a, std::size_t k, std::size_t r, const double* b, std::size_t c,
             double* out) {
    std::memset(out, 0, sizeof(double) * r * c);
    for (std::size_t p = 0; p < k; ++p)
        for (std::size_t i = 0; i < r; ++i) {
            double av = a[p * r + i];
            if (av == 0.0) continue;
            const double* brow = b + p * c;
            double* orow = out + i * c;
            for (std::size_t j = 0; j < c; ++j) orow[j] += av * brow[j];
        }
}

// C (r x c) = A (r x k) times B^T with B (c x k)
void mm_a_bt(const double* a, std::size_t r, std::size_t k, const double* b, std::size_t c,
             double* out) {
    for (std::size_t i = 0; i < r; ++i)
        for (std::size_t j = 0; j < c; ++j) {
            double s = 0.0;
            const double* arow = a + i * k;
            const double* brow = b + j * k;
            for (std::size_t p = 0; p < k; ++p) s += arow[p] * brow[p];
            out[i * c + j] = s;
        }
}

}  // namespace

// ---- arithmetic ---------------------------------------------------------------

Var add(const Var& a, const Var& b) {
    require_same_shape(a, b, "add");
    Tensor out = a.value();
    out.add_inplace(b.value());
    return make_op(std::move(out), {a, b}, [](const Tensor& g, std::vector<Var>& ps) {
        ps[0].accumulate_grad(g);
        ps[1].accumulate_grad(g);
    });
}

Var sub(const Var& a, const Var& b) {
    require_same_shape(a, b, "sub");
    Tensor out = a.value();
    for (std::size_t i = 0; i < out.size(); ++i) out[i] -= b.value()[i];
    return make_op(std::move(out), {a, b}, [](const Tensor& g, std::vector<Var>& ps) {
        ps[0].accumulate_grad(g);
        Tensor neg = g;
        for (double& v : neg.data()) v = -v;
        ps[1].accumulate_grad(neg);
    });
}

Var mul(const Var& a, const Var& b) {
    require_same_shape(a, b, "mul");
    Tensor out = a.value();
    for (std::size_t i = 0; i < out.size(); ++i) out[i] *= b.value()[i];
    return make_op(std::move(out), {a, b}, [](const Tensor& g, std::vector<Var>& ps) {
        Tensor ga = g, gb = g;
        for (std::size_t i = 0; i < g.size(); ++i) {
            ga[i] *= ps[1].value()[i];
            gb[i] *= ps[0].value()[i];
        }
        ps[0].accumulate_grad(ga);
        ps[1].accumulate_grad(gb);
    });
}

Var scale(const Var& a, double c) {
    Tensor out = a.value();
    for (double& v : out.data()) v *= c;
    return make_op(std::move(out), {a}, [c](const Tensor& g, std::vector<Var>& ps) {
        Tensor ga = g;
        for (double& v : ga.data()) v *= c;
        ps[0].accumulate_grad(ga);
    });
}

Var add_const(const Var& a, const Tensor& t) {
    if (!a.value().same_shape(t)) throw ShapeError("add_const: shape mismatch");
    Tensor out = a.value();
    out.add_inplace(t);
    return make_op(std::move(out), {a}, [](const Tensor& g, std::vector<Var>& ps) {
        ps[0].accumulate_grad(g);
    });
}

Var matmul(const Var& a, const Var& b) {
    const Tensor& av = a.value();
    const Tensor& bv = b.value();
    if (bv.rank() != 2) throw ShapeError("matmul: rhs must be rank 2");
    std::size_t n = av.rows(), k = av.cols(), m = bv.cols();
    if (bv.rows() != k) throw ShapeError("matmul: inner dimensions differ");
    std::vector<std::size_t> out_shape =
        av.rank() == 1 ? std::vector<std::size_t>{m} : std::vector<std::size_t>{n, m};
    Tensor out(out_shape);
    mm(av.data().data(), n, k, bv.data().data(), m, out.data().data());
    return make_op(std::move(out), {a, b}, [n, k, m](const Tensor& g, std::vector<Var>& ps) {
        // dA = g * B^T, dB = A^T * g
        if (ps[0].requires_grad()) {
            Tensor ga(ps[0].value().shape());
            mm_a_bt(g.data().data(), n, m, ps[1].value().data().data(), k, ga.data().data());
            ps[0].accumulate_grad(ga);
        }
        if (ps[1].requires_grad()) {
            Tensor gb(ps[1].value().shape());
            mm_at_b(ps[0].value().data().data(), n, k, g.data().data(), m, gb.data().data());
            ps[1].accumulate_grad(gb);
        }
    });
}

Var add_rows(const Var& m, const Var& bias) {
    const Tensor& mv = m.value();
    const Tensor& bv = bias.value();
    if (bv.rank() != 1 || bv.size() != mv.cols())
        throw ShapeError("add_rows: bias length does not match row width");
    Tensor out = mv;
    std::size_t r = mv.rows(), c = mv.cols();
    for (std::size_t i = 0; i < r; ++i)
        for (std::size_t j = 0; j < c; ++j) out.data()[i * c + j] += bv[j];
    return make_op(std::move(out), {m, bias}, [r, c](const Tensor& g, std::vector<Var>& ps) {
        ps[0].accumulate_grad(g);
        if (ps[1].requires_grad()) {
            Tensor gb({c});
            for (std::size_t i = 0; i < r; ++i)
                for (std::size_t j = 0; j < c; ++j) gb[j] += g.data()[i * c + j];
            ps[1].accumulate_grad(gb);
        }
    });
}

// ---- activations --------------------------------------------------------------

Var tanh_op(const Var& a) {
    Tensor out = map_unary(a.value(), [](double x) { return std::tanh(x); });
    return make_op(std::move(out), {a}, [](const Tensor& g, std::vector<Var>& ps) {
        Tensor ga = g;
        for (std::size_t i = 0; i < g.size(); ++i) {
            double y = std::tanh(ps[0].value()[i]);
            ga[i] *= 1.0 - y * y;
        }
        ps[0].accumulate_grad(ga);
    });
}

Var relu_op(const Var& a) {
    Tensor out = map_unary(a.value(), [](double x) { return x > 0.0 ? x : 0.0; });
    return make_op(std::move(out), {a}, [](const Tensor& g, std::vector<Var>& ps) {
        Tensor ga = g;
        for (std::size_t i = 0; i < g.size(); ++i)
            if (ps[0].value()[i] <= 0.0) ga[i] = 0.0;
        ps[0].accumulate_grad(ga);
    });
}

namespace {
double sigmoid(double x) { return x >= 0.0 ? 1.0 / (1.0 + std::exp(-x)) : std::exp(x) / (1.0 + std::exp(x)); }
}

Var sigmoid_op(const Var& a) {
    Tensor out = map_unary(a.value(), [](double x) { return sigmoid(x); });
    return make_op(std::move(out), {a}, [](const Tensor& g, std::vector<Var>& ps) {
        Tensor ga = g;
        for (std::size_t i = 0; i < g.size(); ++i) {
            double y = sigmoid(ps[0].value()[i]);
            ga[i] *= y * (1.0 - y);
        }
        ps[0].accumulate_grad(ga);
    });
}

Var softmax_rows(const Var& a) {
    const Tensor& av = a.value();
    std::size_t r = av.rows(), c = av.cols();
    Tensor out = av;
    for (std::size_t i = 0; i < r; ++i) {
        double mx = out.data()[i * c];
        for (std::size_t j = 1; j < c; ++j) mx = std::max(mx, out.data()[i * c + j]);
        double z = 0.0;
        for (std::size_t j = 0; j < c; ++j) {
            double e = std::exp(out.data()[i * c + j] - mx);
            out.data()[i * c + j] = e;
            z += e;
        }
        for (std::size_t j = 0; j < c; ++j) out.data()[i * c + j] /= z;
    }
    Tensor y = out;
    return make_op(std::move(out), {a}, [r, c, y](const Tensor& g, std::vector<Var>& ps) {
        Tensor ga(ps[0].value().shape());
        for (std::size_t i = 0; i < r; ++i) {
            double dot = 0.0;
            for (std::size_t j = 0; j < c; ++j) dot += g.data()[i * c + j] * y.data()[i * c + j];
            for (std::size_t j = 0; j < c; ++j)
                ga.data()[i * c + j] = y.data()[i * c + j] * (g.data()[i * c + j] - dot);
        }
        ps[0].accumulate_grad(ga);
    });
}

Var layernorm_rows(const Var& a) {
    constexpr double kEps = 1e-12;
    const Tensor& av = a.value();
    std::size_t r = av.rows(), c = av.cols();
    Tensor out = av;
    std::vector<double> inv_sd(r);
    for (std::size_t i = 0; i < r; ++i) {
        double mu = 0.0;
        for (std::size_t j = 0; j < c; ++j) mu += av.data()[i * c + j];
        mu /= static_cast<double>(c);
        double var = 0.0;
        for (std::size_t j = 0; j < c; ++j) {
            double d = av.data()[i * c + j] - mu;
            var += d * d;
        }
        var /= static_cast<double>(c);
        inv_sd[i] = 1.0 / std::sqrt(var + kEps);
        for (std::size_t j = 0; j < c; ++j)
            out.data()[i * c + j] = (av.data()[i * c + j] - mu) * inv_sd[i];
    }
    Tensor y = out;
    return make_op(std::move(out), {a}, [r, c, y, inv_sd](const Tensor& g, std::vector<Var>& ps) {
        Tensor ga(ps[0].value().shape());
        for (std::size_t i = 0; i < r; ++i) {
            double gmean = 0.0, gydot = 0.0;
            for (std::size_t j = 0; j < c; ++j) {
                gmean += g.data()[i * c + j];
                gydot += g.data()[i * c + j] * y.data()[i * c + j];
            }
            gmean /= static_cast<double>(c);
            gydot /= static_cast<double>(c);
            for (std::size_t j = 0; j < c; ++j)
                ga.data()[i * c + j] =
                    inv_sd[i] * (g.data()[i * c + j] - gmean - y.data()[i * c + j] * gydot);
        }
        ps[0].accumulate_grad(ga);
    });
}

// ---- losses -------------------------------------------------------------------

Var log_clamped(const Var& a, double eps, long* saturation_count) {
    Tensor out = a.value();
    std::vector<char> clamped(out.size(), 0);
    for (std::size_t i = 0; i < out.size(); ++i) {
        double x = out[i];
        if (x < eps || x > 1.0 - eps) {
            clamped[i] = 1;
            if (saturation_count) ++*saturation_count;
            x = std::clamp(x, eps, 1.0 - eps);
        }
        out[i] = std::log(x);
    }
    return make_op(std::move(out), {a}, [clamped, eps](const Tensor& g, std::vector<Var>& ps) {
        Tensor ga = g;
        for (std::size_t i = 0; i < g.size(); ++i) {
            if (clamped[i]) {
                ga[i] = 0.0;
            } else {
                ga[i] /= ps[0].value()[i];
            }
        }
        ps[0].accumulate_grad(ga);
    });
}

Var cross_entropy_with_logits(const Var& logits, const std::vector<int>& labels) {
    const Tensor& lv = logits.value();
    std::size_t r = lv.rows(), c = lv.cols();
    if (labels.size() != r) throw ShapeError("cross_entropy: label count does not match rows");
    Tensor probs({r, c});
    double loss = 0.0;
    for (std::size_t i = 0; i < r; ++i) {
        double mx = lv.data()[i * c];
        for (std::size_t j = 1; j < c; ++j) mx = std::max(mx, lv.data()[i * c + j]);
        double z = 0.0;
        for (std::size_t j = 0; j < c; ++j) {
            double e = std::exp(lv.data()[i * c + j] - mx);
            probs.data()[i * c + j] = e;
            z += e;
        }
        for (std::size_t j = 0; j < c; ++j) probs.data()[i * c + j] /= z;
        int lab = labels[i];
        if (lab < 0 || static_cast<std::size_t>(lab) >= c)
            throw ShapeError("cross_entropy: label out of range");
        loss -= std::log(std::max(probs.data()[i * c + lab], 1e-300));
    }
    loss /= static_cast<double>(r);
    return make_op(Tensor::scalar(loss), {logits},
                   [r, c, probs, labels](const Tensor& g, std::vector<Var>& ps) {
                       double s = g[0] / static_cast<double>(r);
                       Tensor ga(ps[0].value().shape());
                       for (std::size_t i = 0; i < r; ++i)
                           for (std::size_t j = 0; j < c; ++j) {
                               double p = probs.data()[i * c + j];
                               double onehot = (static_cast<std::size_t>(labels[i]) == j) ? 1.0 : 0.0;
                               ga.data()[i * c + j] = s * (p - onehot);
                           }
                       ps[0].accumulate_grad(ga);
                   });
}

Var mse_against(const Var& a, const Tensor& target) {
    if (!a.value().same_shape(target)) throw ShapeError("mse: shape mismatch");
    std::size_t n = a.value().size();
    double loss = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        double d = a.value()[i] - target[i];
        loss += d * d;
    }
    loss /= static_cast<double>(n);
    return make_op(Tensor::scalar(loss), {a}, [target, n](const Tensor& g, std::vector<Var>& ps) {
        Tensor ga(ps[0].value().shape());
        double s = 2.0 * g[0] / static_cast<double>(n);
        for (std::size_t i = 0; i < n; ++i) ga[i] = s * (ps[0].value()[i] - target[i]);
        ps[0].accumulate_grad(ga);
    });
}

Var sum(const Var& a) {
    double s = 0.0;
    for (double v : a.value().data()) s += v;
    return make_op(Tensor::scalar(s), {a}, [](const Tensor& g, std::vector<Var>& ps) {
        ps[0].accumulate_grad(Tensor::full(ps[0].value().shape(), g[0]));
    });
}

Var mean(const Var& a) {
    std::size_t n = a.value().size();
    double s = 0.0;
    for (double v : a.value().data()) s += v;
    s /= static_cast<double>(n);
    return make_op(Tensor::scalar(s), {a}, [n](const Tensor& g, std::vector<Var>& ps) {
        ps[0].accumulate_grad(Tensor::full(ps[0].value().shape(), g[0] / static_cast<double>(n)));
    });
}

// ---- structure ------------------------------------------------------------------

Var concat_vec(const Var& a, const Var& b) {
    std::size_t na = a.value().size(), nb = b.value().size();
    std::vector<double> out;
    out.reserve(na + nb);
    out.insert(out.end(), a.value().data().begin(), a.value().data().end());
    out.insert(out.end(), b.value().data().begin(), b.value().data().end());
    return make_op(Tensor::vec(std::move(out)), {a, b},
                   [na, nb](const Tensor& g, std::vector<Var>& ps) {
                       if (ps[0].requires_grad()) {
                           Tensor ga(ps[0].value().shape());
                           for (std::size_t i = 0; i < na; ++i) ga[i] = g[i];
                           ps[0].accumulate_grad(ga);
                       }
                       if (ps[1].requires_grad()) {
                           Tensor gb(ps[1].value().shape());
                           for (std::size_t i = 0; i < nb; ++i) gb[i] = g[na + i];
                           ps[1].accumulate_grad(gb);
                       }
                   });
}

Var concat_rows(const std::vector<Var>& rows) {
    if (rows.empty()) throw ShapeError("concat_rows: empty row list");
    std::size_t d = rows[0].value().size();
    Tensor out({rows.size(), d});
    for (std::size_t i = 0; i < rows.size(); ++i) {
        if (rows[i].value().size() != d) throw ShapeError("concat_rows: row width mismatch");
        for (std::size_t j = 0; j < d; ++j) out.data()[i * d + j] = rows[i].value()[j];
    }
    return make_op(std::move(out), rows, [d](const Tensor& g, std::vector<Var>& ps) {
        for (std::size_t i = 0; i < ps.size(); ++i) {
            if (!ps[i].requires_grad()) continue;
            Tensor gi(ps[i].value().shape());
            for (std::size_t j = 0; j < d; ++j) gi[j] = g.data()[i * d + j];
            ps[i].accumulate_grad(gi);
        }
    });
}

Var reshape(const Var& a, std::vector<std::size_t> shape) {
    if (shape_size(shape) != a.value().size()) throw ShapeError("reshape: size mismatch");
    Tensor out(std::move(shape), a.value().data());
    return make_op(std::move(out), {a}, [](const Tensor& g, std::vector<Var>& ps) {
        ps[0].accumulate_grad(Tensor(ps[0].value().shape(), g.data()));
    });
}

Var slice_row(const Var& m, std::size_t row) {
    const Tensor& mv = m.value();
    std::size_t c = mv.cols();
    if (row >= mv.rows()) throw ShapeError("slice_row: row out of range");
    std::vector<double> out(mv.data().begin() + row * c, mv.data().begin() + (row + 1) * c);
    return make_op(Tensor::vec(std::move(out)), {m}, [row, c](const Tensor& g, std::vector<Var>& ps) {
        Tensor gm(ps[0].value().shape());
        for (std::size_t j = 0; j < c; ++j) gm.data()[row * c + j] = g[j];
        ps[0].accumulate_grad(gm);
    });
}

Var lookup_row(const Var& table, std::size_t id) { return slice_row(table, id); }

Var dropout(const Var& a, double rate, Rng& rng, bool train) {
    if (rate < 0.0 || rate >= 1.0) throw ConfigError("dropout rate must be in [0,1)");
    if (!train || rate == 0.0) return a;
    double keep = 1.0 - rate;
    std::vector<double> mask(a.value().size());
    for (double& m : mask) m = (rng.uniform() < keep) ? 1.0 / keep : 0.0;
    Tensor out = a.value();
    for (std::size_t i = 0; i < out.size(); ++i) out[i] *= mask[i];
    return make_op(std::move(out), {a}, [mask](const Tensor& g, std::vector<Var>& ps) {
        Tensor ga = g;
        for (std::size_t i = 0; i < g.size(); ++i) ga[i] *= mask[i];
        ps[0].accumulate_grad(ga);
    });
}

Var signed_sqrt(const Var& a) {
    Tensor out = map_unary(a.value(), [](double x) {
        return x >= 0.0 ? std::sqrt(x) : -std::sqrt(-x);
    });
    return make_op(std::move(out), {a}, [](const Tensor& g, std::vector<Var>& ps) {
        Tensor ga = g;
        for (std::size_t i = 0; i < g.size(); ++i) {
            double x = std::abs(ps[0].value()[i]);
            // Zero subgradient at the kink; entries pinned at (numerical) zero
            // otherwise blow the update up by 1/sqrt(roundoff).
            ga[i] = x < 1e-10 ? 0.0 : ga[i] / (2.0 * std::sqrt(x));
        }
        ps[0].accumulate_grad(ga);
    });
}

Var l2_normalize(const Var& a) {
    double norm2 = 0.0;
    for (double v : a.value().data()) norm2 += v * v;
    double norm = std::sqrt(norm2);
    if (norm == 0.0) return a;
    Tensor out = a.value();
    for (double& v : out.data()) v /= norm;
    Tensor y = out;
    return make_op(std::move(out), {a}, [norm, y](const Tensor& g, std::vector<Var>& ps) {
        double dot = 0.0;
        for (std::size_t i = 0; i < g.size(); ++i) dot += g[i] * y[i];
        Tensor ga = g;
        for (std::size_t i = 0; i < g.size(); ++i) ga[i] = (g[i] - y[i] * dot) / norm;
        ps[0].accumulate_grad(ga);
    });
}

}  // namespace vqalab::nn
