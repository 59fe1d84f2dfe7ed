#pragma once

#include <algorithm>
#include <cstdint>
#include <random>
#include <string>
#include <vector>

#include "trajgan/errors.hpp"

namespace trajgan::nn {

// Dense n-d array. Training uses float, finite-difference checks use double.
template <class S>
struct Tensor {
    std::vector<int> shape;
    std::vector<S> v;

    Tensor() = default;
    explicit Tensor(std::vector<int> shp) : shape(std::move(shp)) {
        v.assign(numel(), S(0));
    }

    std::size_t numel() const {
        std::size_t n = 1;
        for (int d : shape) n *= static_cast<std::size_t>(d);
        return n;
    }

    int dim(int i) const { return shape[static_cast<std::size_t>(i)]; }

    S* data() { return v.data(); }
    const S* data() const { return v.data(); }

    void fill(S x) { std::fill(v.begin(), v.end(), x); }

    std::string shape_str() const {
        std::string s = "[";
        for (std::size_t i = 0; i < shape.size(); ++i)
            s += (i ? "," : "") + std::to_string(shape[i]);
        return s + "]";
    }
};

template <class S>
void check_shape(const Tensor<S>& t, const std::vector<int>& expected,
                 const char* where) {
    if (t.shape != expected) {
        Tensor<S> e(expected);
        throw ShapeError(std::string(where) + ": expected shape " + e.shape_str() +
                         ", got " + t.shape_str());
    }
}

// C[M,N] = alpha * op(A) * op(B) + beta * C, row-major.
void gemm(bool trans_a, bool trans_b, int m, int n, int k, float alpha,
          const float* a, int lda, const float* b, int ldb, float beta, float* c,
          int ldc);
void gemm(bool trans_a, bool trans_b, int m, int n, int k, double alpha,
          const double* a, int lda, const double* b, int ldb, double beta,
          double* c, int ldc);

// Contiguous-C shorthand (ldc = n).
template <class S>
void gemm(bool trans_a, bool trans_b, int m, int n, int k, S alpha, const S* a,
          int lda, const S* b, int ldb, S beta, S* c) {
    gemm(trans_a, trans_b, m, n, k, alpha, a, lda, b, ldb, beta, c, n);
}

// Deterministic RNG: mt19937_64 with explicit uniform/normal draws so streams
// do not depend on standard-library distribution internals.
class Rng {
public:
    explicit Rng(std::uint64_t seed) : eng_(seed) {}

    std::uint64_t next_u64() { return eng_(); }

    double uniform() {  // [0,1)
        return (eng_() >> 11) * (1.0 / 9007199254740992.0);
    }

    double normal() {  // N(0,1), Box-Muller
        if (have_spare_) {
            have_spare_ = false;
            return spare_;
        }
        double u1 = std::max(uniform(), 1e-300), u2 = uniform();
        double r = std::sqrt(-2.0 * std::log(u1));
        double a = 6.283185307179586 * u2;
        spare_ = r * std::sin(a);
        have_spare_ = true;
        return r * std::cos(a);
    }

    template <class S>
    void fill_normal(Tensor<S>& t, double stddev) {
        for (auto& x : t.v) x = static_cast<S>(normal() * stddev);
    }

private:
    std::mt19937_64 eng_;
    double spare_ = 0.0;
    bool have_spare_ = false;
};

}  // namespace trajgan::nn
