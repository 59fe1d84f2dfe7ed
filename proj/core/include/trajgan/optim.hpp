#pragma once

#include <cmath>
#include <vector>

#include "trajgan/layers.hpp"

namespace trajgan::nn {

// Standard Adam with bias correction.
template <class S>
class Adam {
public:
    explicit Adam(std::vector<Param<S>*> params, double beta1 = 0.9,
                  double beta2 = 0.999, double eps = 1e-8)
        : params_(std::move(params)), beta1_(static_cast<S>(beta1)),
          beta2_(static_cast<S>(beta2)), eps_(static_cast<S>(eps)) {
        for (auto* p : params_) {
            m_.emplace_back(p->value.shape);
            v_.emplace_back(p->value.shape);
        }
    }

    void step(double lr) {
        ++t_;
        const S bc1 = S(1) - static_cast<S>(std::pow(static_cast<double>(beta1_), t_));
        const S bc2 = S(1) - static_cast<S>(std::pow(static_cast<double>(beta2_), t_));
        const S slr = static_cast<S>(lr);
        for (std::size_t pi = 0; pi < params_.size(); ++pi) {
            auto& p = *params_[pi];
            for (std::size_t i = 0; i < p.value.v.size(); ++i) {
                const S g = p.grad.v[i];
                if (!std::isfinite(static_cast<double>(g)))
                    throw TrainingError("non-finite gradient in " + p.name);
                m_[pi].v[i] = beta1_ * m_[pi].v[i] + (S(1) - beta1_) * g;
                v_[pi].v[i] = beta2_ * v_[pi].v[i] + (S(1) - beta2_) * g * g;
                const S mhat = m_[pi].v[i] / bc1;
                const S vhat = v_[pi].v[i] / bc2;
                p.value.v[i] -= slr * mhat / (std::sqrt(vhat) + eps_);
            }
        }
    }

    long steps_taken() const { return t_; }

private:
    std::vector<Param<S>*> params_;
    std::vector<Tensor<S>> m_, v_;
    S beta1_, beta2_, eps_;
    long t_ = 0;
};

// lr = base * factor^(number of milestones passed at `step`).
inline double scheduled_lr(double base, long step,
                           const std::vector<long>& milestones, double factor) {
    double lr = base;
    for (long m : milestones)
        if (step >= m) lr *= factor;
    return lr;
}

extern template class Adam<float>;
extern template class Adam<double>;

}  // namespace trajgan::nn
