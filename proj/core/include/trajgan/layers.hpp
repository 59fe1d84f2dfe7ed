#pragma once

#include <cmath>
#include <memory>
#include <string>
#include <utility>
#include <vector>

#include "trajgan/tensor.hpp"

namespace trajgan::nn {

template <class S>
struct Param {
    std::string name;
    Tensor<S> value;
    Tensor<S> grad;
};

// A layer owns its parameters and the caches needed for one forward/backward
// round trip. backward() must follow the forward() it differentiates.
//
// penalty_forward() is the second pass used by the one-sided Lipschitz
// penalty: it pushes a cotangent-of-the-input-gradient forward through the
// frozen linearization of the layer and, for parameterized layers,
// accumulates the penalty's parameter gradients against the cotangent cached
// by the preceding backward(accumulate=false) call. Only piecewise-linear
// layers support it.
template <class S>
class Layer {
public:
    virtual ~Layer() = default;
    virtual Tensor<S> forward(const Tensor<S>& x, bool train) = 0;
    virtual Tensor<S> backward(const Tensor<S>& dy, bool accumulate = true) = 0;
    virtual void collect(std::vector<Param<S>*>& /*out*/) {}
    virtual void collect_buffers(
        std::vector<std::pair<std::string, Tensor<S>*>>& /*out*/) {}
    virtual bool supports_penalty() const { return false; }
    virtual Tensor<S> penalty_forward(const Tensor<S>& /*rho*/) {
        throw TrainingError("penalty pass unsupported for layer kind " + kind());
    }
    virtual std::string kind() const = 0;
};

namespace detail {

inline int conv_out_dim(int in, int k, int stride, int pad) {
    const int num = in + 2 * pad - k;
    if (num < 0 || num % stride != 0)
        throw ShapeError("conv geometry: (in + 2*pad - k) must be a "
                         "non-negative multiple of stride");
    return num / stride + 1;
}

// x [C,H,W] -> cols [C*k*k, Ho*Wo]
template <class S>
void im2col(const S* x, int c, int h, int w, int k, int stride, int pad,
            int ho, int wo, S* cols) {
    for (int ch = 0; ch < c; ++ch)
        for (int ky = 0; ky < k; ++ky)
            for (int kx = 0; kx < k; ++kx) {
                S* row = cols + ((static_cast<std::size_t>(ch) * k + ky) * k + kx) *
                                    (static_cast<std::size_t>(ho) * wo);
                for (int oy = 0; oy < ho; ++oy) {
                    const int iy = oy * stride - pad + ky;
                    for (int ox = 0; ox < wo; ++ox) {
                        const int ix = ox * stride - pad + kx;
                        row[oy * wo + ox] =
                            (iy >= 0 && iy < h && ix >= 0 && ix < w)
                                ? x[(static_cast<std::size_t>(ch) * h + iy) * w + ix]
                                : S(0);
                    }
                }
            }
}

// cols [C*k*k, Ho*Wo] accumulated back into x [C,H,W]
template <class S>
void col2im(const S* cols, int c, int h, int w, int k, int stride, int pad,
            int ho, int wo, S* x) {
    for (int ch = 0; ch < c; ++ch)
        for (int ky = 0; ky < k; ++ky)
            for (int kx = 0; kx < k; ++kx) {
                const S* row = cols + ((static_cast<std::size_t>(ch) * k + ky) * k + kx) *
                                          (static_cast<std::size_t>(ho) * wo);
                for (int oy = 0; oy < ho; ++oy) {
                    const int iy = oy * stride - pad + ky;
                    if (iy < 0 || iy >= h) continue;
                    for (int ox = 0; ox < wo; ++ox) {
                        const int ix = ox * stride - pad + kx;
                        if (ix < 0 || ix >= w) continue;
                        x[(static_cast<std::size_t>(ch) * h + iy) * w + ix] +=
                            row[oy * wo + ox];
                    }
                }
            }
}

}  // namespace detail

template <class S>
class Conv2d : public Layer<S> {
public:
    Conv2d(int in_c, int out_c, int k, int stride, int pad, bool bias = true)
        : in_c_(in_c), out_c_(out_c), k_(k), stride_(stride), pad_(pad),
          use_bias_(bias) {
        weight_.name = "weight";
        weight_.value = Tensor<S>({out_c, in_c, k, k});
        weight_.grad = Tensor<S>({out_c, in_c, k, k});
        if (use_bias_) {
            bias_.name = "bias";
            bias_.value = Tensor<S>({out_c});
            bias_.grad = Tensor<S>({out_c});
        }
    }

    Tensor<S> forward(const Tensor<S>& x, bool) override;
    Tensor<S> backward(const Tensor<S>& dy, bool accumulate) override;
    Tensor<S> penalty_forward(const Tensor<S>& rho) override;
    bool supports_penalty() const override { return true; }

    void collect(std::vector<Param<S>*>& out) override {
        out.push_back(&weight_);
        if (use_bias_) out.push_back(&bias_);
    }
    std::string kind() const override { return "conv2d"; }

    Param<S> weight_, bias_;

private:
    Tensor<S> run_conv(const Tensor<S>& x, bool with_bias);

    int in_c_, out_c_, k_, stride_, pad_;
    bool use_bias_;
    int h_ = 0, w_ = 0, ho_ = 0, wo_ = 0;
    Tensor<S> x_cache_, cot_;
    std::vector<S> cols_;
};

template <class S>
class ConvTranspose2d : public Layer<S> {
public:
    ConvTranspose2d(int in_c, int out_c, int k, int stride, int pad,
                    bool bias = true)
        : in_c_(in_c), out_c_(out_c), k_(k), stride_(stride), pad_(pad),
          use_bias_(bias) {
        weight_.name = "weight";
        weight_.value = Tensor<S>({in_c, out_c, k, k});
        weight_.grad = Tensor<S>({in_c, out_c, k, k});
        if (use_bias_) {
            bias_.name = "bias";
            bias_.value = Tensor<S>({out_c});
            bias_.grad = Tensor<S>({out_c});
        }
    }

    Tensor<S> forward(const Tensor<S>& x, bool) override;
    Tensor<S> backward(const Tensor<S>& dy, bool accumulate) override;

    void collect(std::vector<Param<S>*>& out) override {
        out.push_back(&weight_);
        if (use_bias_) out.push_back(&bias_);
    }
    std::string kind() const override { return "conv_transpose2d"; }

    Param<S> weight_, bias_;

private:
    int in_c_, out_c_, k_, stride_, pad_;
    bool use_bias_;
    int h_ = 0, w_ = 0, ho_ = 0, wo_ = 0;
    Tensor<S> x_cache_;
    std::vector<S> cols_;
};

template <class S>
class Linear : public Layer<S> {
public:
    Linear(int in_f, int out_f, bool bias = true)
        : in_f_(in_f), out_f_(out_f), use_bias_(bias) {
        weight_.name = "weight";
        weight_.value = Tensor<S>({out_f, in_f});
        weight_.grad = Tensor<S>({out_f, in_f});
        if (use_bias_) {
            bias_.name = "bias";
            bias_.value = Tensor<S>({out_f});
            bias_.grad = Tensor<S>({out_f});
        }
    }

    Tensor<S> forward(const Tensor<S>& x, bool) override;
    Tensor<S> backward(const Tensor<S>& dy, bool accumulate) override;
    Tensor<S> penalty_forward(const Tensor<S>& rho) override;
    bool supports_penalty() const override { return true; }

    void collect(std::vector<Param<S>*>& out) override {
        out.push_back(&weight_);
        if (use_bias_) out.push_back(&bias_);
    }
    std::string kind() const override { return "linear"; }

    Param<S> weight_, bias_;

private:
    int in_f_, out_f_;
    bool use_bias_;
    Tensor<S> x_cache_, cot_;
};

template <class S>
class BatchNorm2d : public Layer<S> {
public:
    explicit BatchNorm2d(int channels, double eps = 1e-5, double momentum = 0.1)
        : c_(channels), eps_(static_cast<S>(eps)),
          momentum_(static_cast<S>(momentum)) {
        gamma_.name = "gamma";
        gamma_.value = Tensor<S>({channels});
        gamma_.value.fill(S(1));
        gamma_.grad = Tensor<S>({channels});
        beta_.name = "beta";
        beta_.value = Tensor<S>({channels});
        beta_.grad = Tensor<S>({channels});
        running_mean_ = Tensor<S>({channels});
        running_var_ = Tensor<S>({channels});
        running_var_.fill(S(1));
    }

    Tensor<S> forward(const Tensor<S>& x, bool train) override;
    Tensor<S> backward(const Tensor<S>& dy, bool accumulate) override;

    void collect(std::vector<Param<S>*>& out) override {
        out.push_back(&gamma_);
        out.push_back(&beta_);
    }
    void collect_buffers(
        std::vector<std::pair<std::string, Tensor<S>*>>& out) override {
        out.emplace_back("running_mean", &running_mean_);
        out.emplace_back("running_var", &running_var_);
    }
    std::string kind() const override { return "batch_norm"; }

    Param<S> gamma_, beta_;

private:
    int c_;
    S eps_, momentum_;
    bool train_mode_ = true;
    Tensor<S> running_mean_, running_var_;
    Tensor<S> xhat_;
    std::vector<S> inv_std_;
    int b_ = 0, h_ = 0, w_ = 0;
};

template <class S>
class GroupNorm : public Layer<S> {
public:
    GroupNorm(int channels, int groups = 0, double eps = 1e-5)
        : c_(channels), g_(groups > 0 ? groups : std::min(32, channels)),
          eps_(static_cast<S>(eps)) {
        if (c_ % g_ != 0)
            throw ArgumentError("group_norm: channels must be divisible by groups");
        gamma_.name = "gamma";
        gamma_.value = Tensor<S>({channels});
        gamma_.value.fill(S(1));
        gamma_.grad = Tensor<S>({channels});
        beta_.name = "beta";
        beta_.value = Tensor<S>({channels});
        beta_.grad = Tensor<S>({channels});
    }

    Tensor<S> forward(const Tensor<S>& x, bool train) override;
    Tensor<S> backward(const Tensor<S>& dy, bool accumulate) override;

    void collect(std::vector<Param<S>*>& out) override {
        out.push_back(&gamma_);
        out.push_back(&beta_);
    }
    std::string kind() const override { return "group_norm"; }

    Param<S> gamma_, beta_;

private:
    int c_, g_;
    S eps_;
    Tensor<S> xhat_;
    std::vector<S> inv_std_;  // per (sample, group)
    int b_ = 0, h_ = 0, w_ = 0;
};

template <class S>
class LeakyReLU : public Layer<S> {
public:
    explicit LeakyReLU(double slope = 0.2) : slope_(static_cast<S>(slope)) {}

    Tensor<S> forward(const Tensor<S>& x, bool) override {
        deriv_ = Tensor<S>(x.shape);
        Tensor<S> y(x.shape);
        for (std::size_t i = 0; i < x.v.size(); ++i) {
            const bool pos = x.v[i] > S(0);
            deriv_.v[i] = pos ? S(1) : slope_;
            y.v[i] = pos ? x.v[i] : slope_ * x.v[i];
        }
        return y;
    }
    Tensor<S> backward(const Tensor<S>& dy, bool) override {
        Tensor<S> dx(dy.shape);
        for (std::size_t i = 0; i < dy.v.size(); ++i)
            dx.v[i] = dy.v[i] * deriv_.v[i];
        return dx;
    }
    Tensor<S> penalty_forward(const Tensor<S>& rho) override {
        Tensor<S> out(rho.shape);
        for (std::size_t i = 0; i < rho.v.size(); ++i)
            out.v[i] = rho.v[i] * deriv_.v[i];
        return out;
    }
    bool supports_penalty() const override { return true; }
    std::string kind() const override { return "leaky_relu"; }

private:
    S slope_;
    Tensor<S> deriv_;
};

template <class S>
class ReLU : public Layer<S> {
public:
    Tensor<S> forward(const Tensor<S>& x, bool) override {
        deriv_ = Tensor<S>(x.shape);
        Tensor<S> y(x.shape);
        for (std::size_t i = 0; i < x.v.size(); ++i) {
            const bool pos = x.v[i] > S(0);
            deriv_.v[i] = pos ? S(1) : S(0);
            y.v[i] = pos ? x.v[i] : S(0);
        }
        return y;
    }
    Tensor<S> backward(const Tensor<S>& dy, bool) override {
        Tensor<S> dx(dy.shape);
        for (std::size_t i = 0; i < dy.v.size(); ++i)
            dx.v[i] = dy.v[i] * deriv_.v[i];
        return dx;
    }
    Tensor<S> penalty_forward(const Tensor<S>& rho) override {
        Tensor<S> out(rho.shape);
        for (std::size_t i = 0; i < rho.v.size(); ++i)
            out.v[i] = rho.v[i] * deriv_.v[i];
        return out;
    }
    bool supports_penalty() const override { return true; }
    std::string kind() const override { return "relu"; }

private:
    Tensor<S> deriv_;
};

template <class S>
class Sigmoid : public Layer<S> {
public:
    Tensor<S> forward(const Tensor<S>& x, bool) override {
        y_ = Tensor<S>(x.shape);
        for (std::size_t i = 0; i < x.v.size(); ++i)
            y_.v[i] = S(1) / (S(1) + std::exp(-x.v[i]));
        return y_;
    }
    Tensor<S> backward(const Tensor<S>& dy, bool) override {
        Tensor<S> dx(dy.shape);
        for (std::size_t i = 0; i < dy.v.size(); ++i)
            dx.v[i] = dy.v[i] * y_.v[i] * (S(1) - y_.v[i]);
        return dx;
    }
    std::string kind() const override { return "sigmoid"; }

private:
    Tensor<S> y_;
};

template <class S>
class Tanh : public Layer<S> {
public:
    Tensor<S> forward(const Tensor<S>& x, bool) override {
        y_ = Tensor<S>(x.shape);
        for (std::size_t i = 0; i < x.v.size(); ++i) y_.v[i] = std::tanh(x.v[i]);
        return y_;
    }
    Tensor<S> backward(const Tensor<S>& dy, bool) override {
        Tensor<S> dx(dy.shape);
        for (std::size_t i = 0; i < dy.v.size(); ++i)
            dx.v[i] = dy.v[i] * (S(1) - y_.v[i] * y_.v[i]);
        return dx;
    }
    std::string kind() const override { return "tanh"; }

private:
    Tensor<S> y_;
};

// Per-sample reshape (batch dimension preserved).
template <class S>
class Reshape : public Layer<S> {
public:
    explicit Reshape(std::vector<int> target) : target_(std::move(target)) {}

    Tensor<S> forward(const Tensor<S>& x, bool) override {
        in_shape_ = x.shape;
        Tensor<S> y;
        y.shape = {x.dim(0)};
        y.shape.insert(y.shape.end(), target_.begin(), target_.end());
        y.v = x.v;
        if (y.numel() != x.numel())
            throw ShapeError("reshape: element count mismatch");
        return y;
    }
    Tensor<S> backward(const Tensor<S>& dy, bool) override {
        Tensor<S> dx;
        dx.shape = in_shape_;
        dx.v = dy.v;
        return dx;
    }
    Tensor<S> penalty_forward(const Tensor<S>& rho) override {
        Tensor<S> out;
        out.shape = {rho.dim(0)};
        out.shape.insert(out.shape.end(), target_.begin(), target_.end());
        out.v = rho.v;
        return out;
    }
    bool supports_penalty() const override { return true; }
    std::string kind() const override { return "reshape"; }

private:
    std::vector<int> target_, in_shape_;
};

template <class S>
class Sequential {
public:
    Sequential& add(const std::string& name, std::unique_ptr<Layer<S>> layer) {
        names_.push_back(name);
        layers_.push_back(std::move(layer));
        return *this;
    }

    Tensor<S> forward(const Tensor<S>& x, bool train) {
        Tensor<S> cur = x;
        for (auto& l : layers_) cur = l->forward(cur, train);
        return cur;
    }

    Tensor<S> backward(const Tensor<S>& dy, bool accumulate = true) {
        Tensor<S> cur = dy;
        for (auto it = layers_.rbegin(); it != layers_.rend(); ++it)
            cur = (*it)->backward(cur, accumulate);
        return cur;
    }

    // Gradient w.r.t. the input only; layer cotangent caches stay populated
    // for a following penalty_accumulate().
    Tensor<S> input_gradient(const Tensor<S>& dy) { return backward(dy, false); }

    void penalty_accumulate(const Tensor<S>& rho) {
        Tensor<S> cur = rho;
        for (auto& l : layers_) cur = l->penalty_forward(cur);
    }

    bool supports_penalty() const {
        for (const auto& l : layers_)
            if (!l->supports_penalty()) return false;
        return true;
    }

    std::vector<Param<S>*> params() {
        std::vector<Param<S>*> out;
        for (std::size_t i = 0; i < layers_.size(); ++i) {
            std::vector<Param<S>*> lp;
            layers_[i]->collect(lp);
            for (auto* p : lp) {
                if (p->name.rfind(names_[i] + ".", 0) != 0)
                    p->name = names_[i] + "." + p->name;
                out.push_back(p);
            }
        }
        return out;
    }

    std::vector<std::pair<std::string, Tensor<S>*>> buffers() {
        std::vector<std::pair<std::string, Tensor<S>*>> out;
        for (std::size_t i = 0; i < layers_.size(); ++i) {
            std::vector<std::pair<std::string, Tensor<S>*>> lb;
            layers_[i]->collect_buffers(lb);
            for (auto& [n, t] : lb) out.emplace_back(names_[i] + "." + n, t);
        }
        return out;
    }

    void zero_grad() {
        for (auto* p : params()) p->grad.fill(S(0));
    }

    void scale_grads(S s) {
        for (auto* p : params())
            for (auto& g : p->grad.v) g *= s;
    }

    std::size_t n_layers() const { return layers_.size(); }
    Layer<S>& layer(std::size_t i) { return *layers_[i]; }

private:
    std::vector<std::string> names_;
    std::vector<std::unique_ptr<Layer<S>>> layers_;
};

// Named-parameter checkpoint: ASCII magic+version line, then one record per
// tensor (params and buffers): u32 name length, name bytes, u32 ndim,
// u32 dims, little-endian f32 payload.
template <class S>
void save_checkpoint(Sequential<S>& model, const std::string& path);
template <class S>
void load_checkpoint(Sequential<S>& model, const std::string& path);

// Max relative error between analytic gradients and central finite
// differences of the scalar probe sum(y * r) over all inputs and parameters.
double grad_check(Sequential<double>& model, const std::vector<int>& input_shape,
                  std::uint64_t seed, double h = 1e-5);

extern template class Conv2d<float>;
extern template class Conv2d<double>;
extern template class ConvTranspose2d<float>;
extern template class ConvTranspose2d<double>;
extern template class Linear<float>;
extern template class Linear<double>;
extern template class BatchNorm2d<float>;
extern template class BatchNorm2d<double>;
extern template class GroupNorm<float>;
extern template class GroupNorm<double>;
extern template void save_checkpoint<float>(Sequential<float>&, const std::string&);
extern template void save_checkpoint<double>(Sequential<double>&, const std::string&);
extern template void load_checkpoint<float>(Sequential<float>&, const std::string&);
extern template void load_checkpoint<double>(Sequential<double>&, const std::string&);

}  // namespace trajgan::nn
