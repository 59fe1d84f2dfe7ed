#include "trajgan/layers.hpp"

#include <cstring>
#include <fstream>

namespace trajgan::nn {

using detail::col2im;
using detail::conv_out_dim;
using detail::im2col;

// ---------------------------------------------------------------- Conv2d

template <class S>
Tensor<S> Conv2d<S>::run_conv(const Tensor<S>& x, bool with_bias) {
    const int b = x.dim(0);
    check_shape(x, {b, in_c_, h_, w_}, "conv2d");
    const int ckk = in_c_ * k_ * k_;
    const int owo = ho_ * wo_;
    Tensor<S> y({b, out_c_, ho_, wo_});
    cols_.resize(static_cast<std::size_t>(ckk) * owo);
    for (int s = 0; s < b; ++s) {
        const S* xs = x.data() + static_cast<std::size_t>(s) * in_c_ * h_ * w_;
        S* ys = y.data() + static_cast<std::size_t>(s) * out_c_ * owo;
        im2col(xs, in_c_, h_, w_, k_, stride_, pad_, ho_, wo_, cols_.data());
        gemm(false, false, out_c_, owo, ckk, S(1), weight_.value.data(), ckk,
             cols_.data(), owo, S(0), ys);
        if (with_bias && use_bias_)
            for (int oc = 0; oc < out_c_; ++oc)
                for (int i = 0; i < owo; ++i)
                    ys[static_cast<std::size_t>(oc) * owo + i] += bias_.value.v[oc];
    }
    return y;
}

template <class S>
Tensor<S> Conv2d<S>::forward(const Tensor<S>& x, bool) {
    if (x.shape.size() != 4 || x.dim(1) != in_c_)
        throw ShapeError("conv2d: expected [B," + std::to_string(in_c_) +
                         ",H,W], got " + x.shape_str());
    h_ = x.dim(2);
    w_ = x.dim(3);
    ho_ = conv_out_dim(h_, k_, stride_, pad_);
    wo_ = conv_out_dim(w_, k_, stride_, pad_);
    x_cache_ = x;
    return run_conv(x, true);
}

template <class S>
Tensor<S> Conv2d<S>::backward(const Tensor<S>& dy, bool accumulate) {
    const int b = x_cache_.dim(0);
    check_shape(dy, {b, out_c_, ho_, wo_}, "conv2d backward");
    const int ckk = in_c_ * k_ * k_;
    const int owo = ho_ * wo_;
    cot_ = dy;
    Tensor<S> dx(x_cache_.shape);
    std::vector<S> dcols(static_cast<std::size_t>(ckk) * owo);
    // Per-sample weight grads go through a scratch product and an explicit
    // elementwise add so batched accumulation matches summing single-sample
    // backward passes bit for bit.
    std::vector<S> wscratch(weight_.grad.v.size());
    cols_.resize(dcols.size());
    for (int s = 0; s < b; ++s) {
        const S* dys = dy.data() + static_cast<std::size_t>(s) * out_c_ * owo;
        S* dxs = dx.data() + static_cast<std::size_t>(s) * in_c_ * h_ * w_;
        gemm(true, false, ckk, owo, out_c_, S(1), weight_.value.data(), ckk, dys,
             owo, S(0), dcols.data());
        col2im(dcols.data(), in_c_, h_, w_, k_, stride_, pad_, ho_, wo_, dxs);
        if (accumulate) {
            const S* xs =
                x_cache_.data() + static_cast<std::size_t>(s) * in_c_ * h_ * w_;
            im2col(xs, in_c_, h_, w_, k_, stride_, pad_, ho_, wo_, cols_.data());
            gemm(false, true, out_c_, ckk, owo, S(1), dys, owo, cols_.data(), owo,
                 S(0), wscratch.data());
            for (std::size_t i = 0; i < wscratch.size(); ++i)
                weight_.grad.v[i] += wscratch[i];
            if (use_bias_)
                for (int oc = 0; oc < out_c_; ++oc) {
                    S acc = S(0);
                    for (int i = 0; i < owo; ++i)
                        acc += dys[static_cast<std::size_t>(oc) * owo + i];
                    bias_.grad.v[oc] += acc;
                }
        }
    }
    return dx;
}

template <class S>
Tensor<S> Conv2d<S>::penalty_forward(const Tensor<S>& rho) {
    const int b = rho.dim(0);
    check_shape(rho, {b, in_c_, h_, w_}, "conv2d penalty");
    const int ckk = in_c_ * k_ * k_;
    const int owo = ho_ * wo_;
    Tensor<S> out({b, out_c_, ho_, wo_});
    cols_.resize(static_cast<std::size_t>(ckk) * owo);
    std::vector<S> wscratch(weight_.grad.v.size());
    for (int s = 0; s < b; ++s) {
        const S* rs = rho.data() + static_cast<std::size_t>(s) * in_c_ * h_ * w_;
        S* os = out.data() + static_cast<std::size_t>(s) * out_c_ * owo;
        const S* cs = cot_.data() + static_cast<std::size_t>(s) * out_c_ * owo;
        im2col(rs, in_c_, h_, w_, k_, stride_, pad_, ho_, wo_, cols_.data());
        gemm(false, false, out_c_, owo, ckk, S(1), weight_.value.data(), ckk,
             cols_.data(), owo, S(0), os);
        // d(penalty)/dW = weight-grad with input rho against the cached
        // input-gradient cotangent; bias does not enter the input gradient.
        gemm(false, true, out_c_, ckk, owo, S(1), cs, owo, cols_.data(), owo,
             S(0), wscratch.data());
        for (std::size_t i = 0; i < wscratch.size(); ++i)
            weight_.grad.v[i] += wscratch[i];
    }
    return out;
}

// ------------------------------------------------------- ConvTranspose2d

template <class S>
Tensor<S> ConvTranspose2d<S>::forward(const Tensor<S>& x, bool) {
    if (x.shape.size() != 4 || x.dim(1) != in_c_)
        throw ShapeError("conv_transpose2d: expected [B," + std::to_string(in_c_) +
                         ",H,W], got " + x.shape_str());
    const int b = x.dim(0);
    h_ = x.dim(2);
    w_ = x.dim(3);
    ho_ = (h_ - 1) * stride_ - 2 * pad_ + k_;
    wo_ = (w_ - 1) * stride_ - 2 * pad_ + k_;
    if (ho_ < 1 || wo_ < 1)
        throw ShapeError("conv_transpose2d: non-positive output size");
    x_cache_ = x;

    const int ockk = out_c_ * k_ * k_;
    const int hw = h_ * w_;
    Tensor<S> y({b, out_c_, ho_, wo_});
    cols_.resize(static_cast<std::size_t>(ockk) * hw);
    for (int s = 0; s < b; ++s) {
        const S* xs = x.data() + static_cast<std::size_t>(s) * in_c_ * hw;
        S* ys = y.data() + static_cast<std::size_t>(s) * out_c_ * ho_ * wo_;
        gemm(true, false, ockk, hw, in_c_, S(1), weight_.value.data(), ockk, xs,
             hw, S(0), cols_.data());
        col2im(cols_.data(), out_c_, ho_, wo_, k_, stride_, pad_, h_, w_, ys);
        if (use_bias_)
            for (int oc = 0; oc < out_c_; ++oc)
                for (int i = 0; i < ho_ * wo_; ++i)
                    ys[static_cast<std::size_t>(oc) * ho_ * wo_ + i] +=
                        bias_.value.v[oc];
    }
    return y;
}

template <class S>
Tensor<S> ConvTranspose2d<S>::backward(const Tensor<S>& dy, bool accumulate) {
    const int b = x_cache_.dim(0);
    check_shape(dy, {b, out_c_, ho_, wo_}, "conv_transpose2d backward");
    const int ockk = out_c_ * k_ * k_;
    const int hw = h_ * w_;
    Tensor<S> dx(x_cache_.shape);
    cols_.resize(static_cast<std::size_t>(ockk) * hw);
    std::vector<S> wscratch(weight_.grad.v.size());
    for (int s = 0; s < b; ++s) {
        const S* dys = dy.data() + static_cast<std::size_t>(s) * out_c_ * ho_ * wo_;
        S* dxs = dx.data() + static_cast<std::size_t>(s) * in_c_ * hw;
        im2col(dys, out_c_, ho_, wo_, k_, stride_, pad_, h_, w_, cols_.data());
        gemm(false, false, in_c_, hw, ockk, S(1), weight_.value.data(), ockk,
             cols_.data(), hw, S(0), dxs);
        if (accumulate) {
            const S* xs = x_cache_.data() + static_cast<std::size_t>(s) * in_c_ * hw;
            gemm(false, true, in_c_, ockk, hw, S(1), xs, hw, cols_.data(), hw,
                 S(0), wscratch.data());
            for (std::size_t i = 0; i < wscratch.size(); ++i)
                weight_.grad.v[i] += wscratch[i];
            if (use_bias_)
                for (int oc = 0; oc < out_c_; ++oc) {
                    S acc = S(0);
                    for (int i = 0; i < ho_ * wo_; ++i)
                        acc += dys[static_cast<std::size_t>(oc) * ho_ * wo_ + i];
                    bias_.grad.v[oc] += acc;
                }
        }
    }
    return dx;
}

// ----------------------------------------------------------------- Linear

template <class S>
Tensor<S> Linear<S>::forward(const Tensor<S>& x, bool) {
    const int b = x.dim(0);
    check_shape(x, {b, in_f_}, "linear");
    x_cache_ = x;
    Tensor<S> y({b, out_f_});
    for (int s = 0; s < b; ++s)
        gemm(false, false, out_f_, 1, in_f_, S(1), weight_.value.data(), in_f_,
             x.data() + static_cast<std::size_t>(s) * in_f_, 1, S(0),
             y.data() + static_cast<std::size_t>(s) * out_f_, 1);
    if (use_bias_)
        for (int s = 0; s < b; ++s)
            for (int o = 0; o < out_f_; ++o)
                y.v[static_cast<std::size_t>(s) * out_f_ + o] += bias_.value.v[o];
    return y;
}

template <class S>
Tensor<S> Linear<S>::backward(const Tensor<S>& dy, bool accumulate) {
    const int b = x_cache_.dim(0);
    check_shape(dy, {b, out_f_}, "linear backward");
    cot_ = dy;
    Tensor<S> dx({b, in_f_});
    std::vector<S> wscratch(weight_.grad.v.size());
    for (int s = 0; s < b; ++s) {
        const S* dys = dy.data() + static_cast<std::size_t>(s) * out_f_;
        gemm(true, false, in_f_, 1, out_f_, S(1), weight_.value.data(), in_f_,
             dys, 1, S(0), dx.data() + static_cast<std::size_t>(s) * in_f_, 1);
        if (accumulate) {
            const S* xs = x_cache_.data() + static_cast<std::size_t>(s) * in_f_;
            gemm(false, false, out_f_, in_f_, 1, S(1), dys, 1, xs, in_f_, S(0),
                 wscratch.data(), in_f_);
            for (std::size_t i = 0; i < wscratch.size(); ++i)
                weight_.grad.v[i] += wscratch[i];
            if (use_bias_)
                for (int o = 0; o < out_f_; ++o) bias_.grad.v[o] += dys[o];
        }
    }
    return dx;
}

template <class S>
Tensor<S> Linear<S>::penalty_forward(const Tensor<S>& rho) {
    const int b = rho.dim(0);
    check_shape(rho, {b, in_f_}, "linear penalty");
    Tensor<S> out({b, out_f_});
    std::vector<S> wscratch(weight_.grad.v.size());
    for (int s = 0; s < b; ++s) {
        const S* rs = rho.data() + static_cast<std::size_t>(s) * in_f_;
        const S* cs = cot_.data() + static_cast<std::size_t>(s) * out_f_;
        gemm(false, false, out_f_, 1, in_f_, S(1), weight_.value.data(), in_f_,
             rs, 1, S(0), out.data() + static_cast<std::size_t>(s) * out_f_, 1);
        gemm(false, false, out_f_, in_f_, 1, S(1), cs, 1, rs, in_f_, S(0),
             wscratch.data(), in_f_);
        for (std::size_t i = 0; i < wscratch.size(); ++i)
            weight_.grad.v[i] += wscratch[i];
    }
    return out;
}

// ------------------------------------------------------------ BatchNorm2d

template <class S>
Tensor<S> BatchNorm2d<S>::forward(const Tensor<S>& x, bool train) {
    if (x.shape.size() != 4 || x.dim(1) != c_)
        throw ShapeError("batch_norm: expected [B," + std::to_string(c_) +
                         ",H,W], got " + x.shape_str());
    b_ = x.dim(0);
    h_ = x.dim(2);
    w_ = x.dim(3);
    train_mode_ = train;
    const std::size_t plane = static_cast<std::size_t>(h_) * w_;
    const std::size_t n = static_cast<std::size_t>(b_) * plane;

    xhat_ = Tensor<S>(x.shape);
    inv_std_.assign(c_, S(0));
    Tensor<S> y(x.shape);
    for (int ch = 0; ch < c_; ++ch) {
        S mean, var;
        if (train) {
            S acc = S(0);
            for (int s = 0; s < b_; ++s) {
                const S* p = x.data() + (static_cast<std::size_t>(s) * c_ + ch) * plane;
                for (std::size_t i = 0; i < plane; ++i) acc += p[i];
            }
            mean = acc / static_cast<S>(n);
            S vacc = S(0);
            for (int s = 0; s < b_; ++s) {
                const S* p = x.data() + (static_cast<std::size_t>(s) * c_ + ch) * plane;
                for (std::size_t i = 0; i < plane; ++i) {
                    const S d = p[i] - mean;
                    vacc += d * d;
                }
            }
            var = vacc / static_cast<S>(n);
            running_mean_.v[ch] =
                (S(1) - momentum_) * running_mean_.v[ch] + momentum_ * mean;
            running_var_.v[ch] =
                (S(1) - momentum_) * running_var_.v[ch] + momentum_ * var;
        } else {
            mean = running_mean_.v[ch];
            var = running_var_.v[ch];
        }
        const S istd = S(1) / std::sqrt(var + eps_);
        inv_std_[ch] = istd;
        for (int s = 0; s < b_; ++s) {
            const S* p = x.data() + (static_cast<std::size_t>(s) * c_ + ch) * plane;
            S* xh = xhat_.data() + (static_cast<std::size_t>(s) * c_ + ch) * plane;
            S* yp = y.data() + (static_cast<std::size_t>(s) * c_ + ch) * plane;
            for (std::size_t i = 0; i < plane; ++i) {
                xh[i] = (p[i] - mean) * istd;
                yp[i] = gamma_.value.v[ch] * xh[i] + beta_.value.v[ch];
            }
        }
    }
    return y;
}

template <class S>
Tensor<S> BatchNorm2d<S>::backward(const Tensor<S>& dy, bool accumulate) {
    check_shape(dy, xhat_.shape, "batch_norm backward");
    const std::size_t plane = static_cast<std::size_t>(h_) * w_;
    const std::size_t n = static_cast<std::size_t>(b_) * plane;
    Tensor<S> dx(dy.shape);
    for (int ch = 0; ch < c_; ++ch) {
        S sum_dy = S(0), sum_dy_xhat = S(0);
        for (int s = 0; s < b_; ++s) {
            const S* d = dy.data() + (static_cast<std::size_t>(s) * c_ + ch) * plane;
            const S* xh = xhat_.data() + (static_cast<std::size_t>(s) * c_ + ch) * plane;
            for (std::size_t i = 0; i < plane; ++i) {
                sum_dy += d[i];
                sum_dy_xhat += d[i] * xh[i];
            }
        }
        if (accumulate) {
            gamma_.grad.v[ch] += sum_dy_xhat;
            beta_.grad.v[ch] += sum_dy;
        }
        const S g = gamma_.value.v[ch];
        const S istd = inv_std_[ch];
        for (int s = 0; s < b_; ++s) {
            const S* d = dy.data() + (static_cast<std::size_t>(s) * c_ + ch) * plane;
            const S* xh = xhat_.data() + (static_cast<std::size_t>(s) * c_ + ch) * plane;
            S* dxp = dx.data() + (static_cast<std::size_t>(s) * c_ + ch) * plane;
            for (std::size_t i = 0; i < plane; ++i) {
                if (train_mode_) {
                    dxp[i] = g * istd / static_cast<S>(n) *
                             (static_cast<S>(n) * d[i] - sum_dy -
                              xh[i] * sum_dy_xhat);
                } else {
                    dxp[i] = g * istd * d[i];
                }
            }
        }
    }
    return dx;
}

// -------------------------------------------------------------- GroupNorm

template <class S>
Tensor<S> GroupNorm<S>::forward(const Tensor<S>& x, bool) {
    if (x.shape.size() != 4 || x.dim(1) != c_)
        throw ShapeError("group_norm: expected [B," + std::to_string(c_) +
                         ",H,W], got " + x.shape_str());
    b_ = x.dim(0);
    h_ = x.dim(2);
    w_ = x.dim(3);
    const int cpg = c_ / g_;
    const std::size_t plane = static_cast<std::size_t>(h_) * w_;
    const std::size_t gsize = static_cast<std::size_t>(cpg) * plane;

    xhat_ = Tensor<S>(x.shape);
    inv_std_.assign(static_cast<std::size_t>(b_) * g_, S(0));
    Tensor<S> y(x.shape);
    for (int s = 0; s < b_; ++s) {
        for (int grp = 0; grp < g_; ++grp) {
            const S* base =
                x.data() + (static_cast<std::size_t>(s) * c_ + grp * cpg) * plane;
            S acc = S(0);
            for (std::size_t i = 0; i < gsize; ++i) acc += base[i];
            const S mean = acc / static_cast<S>(gsize);
            S vacc = S(0);
            for (std::size_t i = 0; i < gsize; ++i) {
                const S d = base[i] - mean;
                vacc += d * d;
            }
            const S var = vacc / static_cast<S>(gsize);
            const S istd = S(1) / std::sqrt(var + eps_);
            inv_std_[static_cast<std::size_t>(s) * g_ + grp] = istd;
            S* xh = xhat_.data() +
                    (static_cast<std::size_t>(s) * c_ + grp * cpg) * plane;
            S* yp =
                y.data() + (static_cast<std::size_t>(s) * c_ + grp * cpg) * plane;
            for (int cc = 0; cc < cpg; ++cc) {
                const int ch = grp * cpg + cc;
                for (std::size_t i = 0; i < plane; ++i) {
                    const std::size_t off = static_cast<std::size_t>(cc) * plane + i;
                    xh[off] = (base[off] - mean) * istd;
                    yp[off] = gamma_.value.v[ch] * xh[off] + beta_.value.v[ch];
                }
            }
        }
    }
    return y;
}

template <class S>
Tensor<S> GroupNorm<S>::backward(const Tensor<S>& dy, bool accumulate) {
    check_shape(dy, xhat_.shape, "group_norm backward");
    const int cpg = c_ / g_;
    const std::size_t plane = static_cast<std::size_t>(h_) * w_;
    const std::size_t gsize = static_cast<std::size_t>(cpg) * plane;
    Tensor<S> dx(dy.shape);

    if (accumulate) {
        // Per-sample partial sums first, so batched accumulation matches a
        // per-sample gradient loop bit for bit.
        for (int ch = 0; ch < c_; ++ch) {
            for (int s = 0; s < b_; ++s) {
                const S* d =
                    dy.data() + (static_cast<std::size_t>(s) * c_ + ch) * plane;
                const S* xh =
                    xhat_.data() + (static_cast<std::size_t>(s) * c_ + ch) * plane;
                S dgamma = S(0), dbeta = S(0);
                for (std::size_t i = 0; i < plane; ++i) {
                    dgamma += d[i] * xh[i];
                    dbeta += d[i];
                }
                gamma_.grad.v[ch] += dgamma;
                beta_.grad.v[ch] += dbeta;
            }
        }
    }

    std::vector<S> dxhat(gsize);
    for (int s = 0; s < b_; ++s) {
        for (int grp = 0; grp < g_; ++grp) {
            const std::size_t base_off =
                (static_cast<std::size_t>(s) * c_ + grp * cpg) * plane;
            const S* d = dy.data() + base_off;
            const S* xh = xhat_.data() + base_off;
            S* dxp = dx.data() + base_off;
            S sum_dxhat = S(0), sum_dxhat_xhat = S(0);
            for (int cc = 0; cc < cpg; ++cc) {
                const int ch = grp * cpg + cc;
                for (std::size_t i = 0; i < plane; ++i) {
                    const std::size_t off = static_cast<std::size_t>(cc) * plane + i;
                    dxhat[off] = d[off] * gamma_.value.v[ch];
                    sum_dxhat += dxhat[off];
                    sum_dxhat_xhat += dxhat[off] * xh[off];
                }
            }
            const S istd = inv_std_[static_cast<std::size_t>(s) * g_ + grp];
            for (std::size_t i = 0; i < gsize; ++i)
                dxp[i] = istd / static_cast<S>(gsize) *
                         (static_cast<S>(gsize) * dxhat[i] - sum_dxhat -
                          xh[i] * sum_dxhat_xhat);
        }
    }
    return dx;
}

// -------------------------------------------------------------- checkpoint

namespace {
constexpr char kCkptMagic[] = "TGCKPT1\n";

template <class S>
void write_record(std::ofstream& out, const std::string& name,
                  const Tensor<S>& t) {
    const std::uint32_t nlen = static_cast<std::uint32_t>(name.size());
    out.write(reinterpret_cast<const char*>(&nlen), 4);
    out.write(name.data(), nlen);
    const std::uint32_t ndim = static_cast<std::uint32_t>(t.shape.size());
    out.write(reinterpret_cast<const char*>(&ndim), 4);
    for (int d : t.shape) {
        const std::uint32_t ud = static_cast<std::uint32_t>(d);
        out.write(reinterpret_cast<const char*>(&ud), 4);
    }
    std::vector<float> buf(t.v.size());
    for (std::size_t i = 0; i < t.v.size(); ++i)
        buf[i] = static_cast<float>(t.v[i]);
    out.write(reinterpret_cast<const char*>(buf.data()),
              static_cast<std::streamsize>(buf.size() * sizeof(float)));
}

template <class S>
bool read_record(std::ifstream& in, std::string& name, Tensor<S>& t) {
    std::uint32_t nlen = 0;
    if (!in.read(reinterpret_cast<char*>(&nlen), 4)) return false;
    name.resize(nlen);
    in.read(name.data(), nlen);
    std::uint32_t ndim = 0;
    in.read(reinterpret_cast<char*>(&ndim), 4);
    std::vector<int> shape(ndim);
    for (auto& d : shape) {
        std::uint32_t ud = 0;
        in.read(reinterpret_cast<char*>(&ud), 4);
        d = static_cast<int>(ud);
    }
    t = Tensor<S>(shape);
    std::vector<float> buf(t.numel());
    in.read(reinterpret_cast<char*>(buf.data()),
            static_cast<std::streamsize>(buf.size() * sizeof(float)));
    if (!in) throw FormatError("truncated checkpoint record");
    for (std::size_t i = 0; i < buf.size(); ++i) t.v[i] = static_cast<S>(buf[i]);
    return true;
}
}  // namespace

template <class S>
void save_checkpoint(Sequential<S>& model, const std::string& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw FormatError("cannot write checkpoint: " + path);
    out.write(kCkptMagic, sizeof(kCkptMagic) - 1);
    for (auto* p : model.params()) write_record(out, p->name, p->value);
    for (auto& [name, buf] : model.buffers()) write_record(out, name, *buf);
}

template <class S>
void load_checkpoint(Sequential<S>& model, const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw FormatError("cannot open checkpoint: " + path);
    char magic[sizeof(kCkptMagic) - 1];
    in.read(magic, sizeof(magic));
    if (!in || std::memcmp(magic, kCkptMagic, sizeof(magic)) != 0)
        throw FormatError("checkpoint version mismatch: " + path);

    auto params = model.params();
    auto buffers = model.buffers();
    std::string name;
    Tensor<S> t;
    std::size_t loaded = 0;
    while (read_record(in, name, t)) {
        bool found = false;
        for (auto* p : params)
            if (p->name == name) {
                if (p->value.shape != t.shape)
                    throw FormatError("checkpoint shape mismatch for " + name);
                p->value = t;
                found = true;
                break;
            }
        if (!found)
            for (auto& [bn, buf] : buffers)
                if (bn == name) {
                    if (buf->shape != t.shape)
                        throw FormatError("checkpoint shape mismatch for " + name);
                    *buf = t;
                    found = true;
                    break;
                }
        if (!found) throw FormatError("unknown checkpoint tensor: " + name);
        ++loaded;
    }
    if (loaded != params.size() + buffers.size())
        throw FormatError("checkpoint is missing tensors: " + path);
}

// -------------------------------------------------------------- grad_check

double grad_check(Sequential<double>& model, const std::vector<int>& input_shape,
                  std::uint64_t seed, double h) {
    Rng rng(seed);
    Tensor<double> x(input_shape);
    rng.fill_normal(x, 1.0);

    Tensor<double> y0 = model.forward(x, true);
    Tensor<double> probe(y0.shape);
    rng.fill_normal(probe, 1.0);

    model.zero_grad();
    Tensor<double> dx = model.backward(probe, true);

    auto loss_at = [&](Tensor<double>& xin) {
        Tensor<double> y = model.forward(xin, true);
        double acc = 0.0;
        for (std::size_t i = 0; i < y.v.size(); ++i) acc += y.v[i] * probe.v[i];
        return acc;
    };

    double max_rel = 0.0;
    auto compare = [&](double analytic, double* slot) {
        const double orig = *slot;
        *slot = orig + h;
        const double lp = loss_at(x);
        *slot = orig - h;
        const double lm = loss_at(x);
        *slot = orig;
        const double fd = (lp - lm) / (2.0 * h);
        const double rel =
            std::abs(analytic - fd) / std::max(1.0, std::abs(analytic) + std::abs(fd));
        max_rel = std::max(max_rel, rel);
    };

    for (std::size_t i = 0; i < x.v.size(); ++i) compare(dx.v[i], &x.v[i]);
    for (auto* p : model.params())
        for (std::size_t i = 0; i < p->value.v.size(); ++i)
            compare(p->grad.v[i], &p->value.v[i]);
    return max_rel;
}

template class Conv2d<float>;
template class Conv2d<double>;
template class ConvTranspose2d<float>;
template class ConvTranspose2d<double>;
template class Linear<float>;
template class Linear<double>;
template class BatchNorm2d<float>;
template class BatchNorm2d<double>;
template class GroupNorm<float>;
template class GroupNorm<double>;
template void save_checkpoint<float>(Sequential<float>&, const std::string&);
template void save_checkpoint<double>(Sequential<double>&, const std::string&);
template void load_checkpoint<float>(Sequential<float>&, const std::string&);
template void load_checkpoint<double>(Sequential<double>&, const std::string&);

}  // namespace trajgan::nn
