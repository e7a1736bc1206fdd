#pragma once

// Structured tensor ops for the network blocks: 2-D convolution
// (cross-correlation), global average pooling, fully connected layers and
// sub-pixel shuffling. Convolution parallelizes over independent output
// slices; every output element keeps a fixed sequential reduction order, so
// results are bitwise identical for any thread count.

#include "fagan/tensor.hpp"

#ifdef _OPENMP
#include <omp.h>
#endif

namespace fagan {

// input [N,C,H,W], weight [K,C,S,S], bias [K] -> [N,K,H',W']
template <typename T>
Tensor<T> conv2d(const Tensor<T>& input, const Tensor<T>& weight, const Tensor<T>& bias, std::size_t stride = 1,
                 std::size_t padding = 0) {
    if (input.rank() != 4) throw DimensionError("conv2d: input must be [N,C,H,W]");
    if (weight.rank() != 4 || weight.dim(2) != weight.dim(3))
        throw DimensionError("conv2d: weight must be [K,C,S,S]");
    if (input.dim(1) != weight.dim(1))
        throw DimensionError("conv2d: input channels " + std::to_string(input.dim(1)) +
                             " != weight channels " + std::to_string(weight.dim(1)));
    if (bias.rank() != 1 || bias.dim(0) != weight.dim(0)) throw DimensionError("conv2d: bias must be [K]");
    if (stride == 0) throw ContractError("conv2d: stride must be positive");

    const std::size_t N = input.dim(0), C = input.dim(1), H = input.dim(2), W = input.dim(3);
    const std::size_t K = weight.dim(0), S = weight.dim(2);
    if (H + 2 * padding < S || W + 2 * padding < S) throw DimensionError("conv2d: kernel larger than padded input");
    const std::size_t Ho = (H + 2 * padding - S) / stride + 1;
    const std::size_t Wo = (W + 2 * padding - S) / stride + 1;

    auto in = input.node();
    auto wn = weight.node();
    auto bn = bias.node();
    std::vector<T> out(N * K * Ho * Wo);

    const long NK = static_cast<long>(N * K);
#ifdef _OPENMP
#pragma omp parallel for schedule(static)
#endif
    for (long nk = 0; nk < NK; ++nk) {
        const std::size_t n = static_cast<std::size_t>(nk) / K;
        const std::size_t k = static_cast<std::size_t>(nk) % K;
        const T* wbase = wn->data.data() + k * C * S * S;
        T* obase = out.data() + (n * K + k) * Ho * Wo;
        const T b = bn->data[k];
        for (std::size_t oy = 0; oy < Ho; ++oy)
            for (std::size_t ox = 0; ox < Wo; ++ox) {
                T acc = b;
                for (std::size_t c = 0; c < C; ++c) {
                    const T* ibase = in->data.data() + (n * C + c) * H * W;
                    const T* wk = wbase + c * S * S;
                    for (std::size_t ky = 0; ky < S; ++ky) {
                        const std::ptrdiff_t iy = static_cast<std::ptrdiff_t>(oy * stride + ky) -
                                                  static_cast<std::ptrdiff_t>(padding);
                        if (iy < 0 || iy >= static_cast<std::ptrdiff_t>(H)) continue;
                        for (std::size_t kx = 0; kx < S; ++kx) {
                            const std::ptrdiff_t ix = static_cast<std::ptrdiff_t>(ox * stride + kx) -
                                                      static_cast<std::ptrdiff_t>(padding);
                            if (ix < 0 || ix >= static_cast<std::ptrdiff_t>(W)) continue;
                            acc += ibase[iy * static_cast<std::ptrdiff_t>(W) + ix] * wk[ky * S + kx];
                        }
                    }
                }
                obase[oy * Wo + ox] = acc;
            }
    }

    auto backward = [in, wn, bn, N, C, H, W, K, S, Ho, Wo, stride, padding](TensorNode<T>& o) {
        const bool need_in = in->requires_grad || in->backward_fn;
        const bool need_w = wn->requires_grad || wn->backward_fn;
        const bool need_b = bn->requires_grad || bn->backward_fn;
        if (need_in) in->ensure_grad();
        if (need_w) wn->ensure_grad();
        if (need_b) bn->ensure_grad();

        if (need_in) {
            // parallel over (n, c): each thread owns disjoint input-grad slices
            const long NC = static_cast<long>(N * C);
#ifdef _OPENMP
#pragma omp parallel for schedule(static)
#endif
            for (long nc = 0; nc < NC; ++nc) {
                const std::size_t n = static_cast<std::size_t>(nc) / C;
                const std::size_t c = static_cast<std::size_t>(nc) % C;
                T* gbase = in->grad.data() + (n * C + c) * H * W;
                for (std::size_t k = 0; k < K; ++k) {
                    const T* wk = wn->data.data() + (k * C + c) * S * S;
                    const T* ogrid = o.grad.data() + (n * K + k) * Ho * Wo;
                    for (std::size_t oy = 0; oy < Ho; ++oy)
                        for (std::size_t ox = 0; ox < Wo; ++ox) {
                            const T g = ogrid[oy * Wo + ox];
                            if (g == T(0)) continue;
                            for (std::size_t ky = 0; ky < S; ++ky) {
                                const std::ptrdiff_t iy = static_cast<std::ptrdiff_t>(oy * stride + ky) -
                                                          static_cast<std::ptrdiff_t>(padding);
                                if (iy < 0 || iy >= static_cast<std::ptrdiff_t>(H)) continue;
                                for (std::size_t kx = 0; kx < S; ++kx) {
                                    const std::ptrdiff_t ix = static_cast<std::ptrdiff_t>(ox * stride + kx) -
                                                              static_cast<std::ptrdiff_t>(padding);
                                    if (ix < 0 || ix >= static_cast<std::ptrdiff_t>(W)) continue;
                                    gbase[iy * static_cast<std::ptrdiff_t>(W) + ix] += g * wk[ky * S + kx];
                                }
                            }
                        }
                }
            }
        }
        if (need_w) {
            // parallel over k: each thread owns disjoint weight-grad slices
            const long Kl = static_cast<long>(K);
#ifdef _OPENMP
#pragma omp parallel for schedule(static)
#endif
            for (long kl = 0; kl < Kl; ++kl) {
                const std::size_t k = static_cast<std::size_t>(kl);
                T* wg = wn->grad.data() + k * C * S * S;
                for (std::size_t n = 0; n < N; ++n) {
                    const T* ogrid = o.grad.data() + (n * K + k) * Ho * Wo;
                    for (std::size_t c = 0; c < C; ++c) {
                        const T* ibase = in->data.data() + (n * C + c) * H * W;
                        for (std::size_t oy = 0; oy < Ho; ++oy)
                            for (std::size_t ox = 0; ox < Wo; ++ox) {
                                const T g = ogrid[oy * Wo + ox];
                                if (g == T(0)) continue;
                                for (std::size_t ky = 0; ky < S; ++ky) {
                                    const std::ptrdiff_t iy = static_cast<std::ptrdiff_t>(oy * stride + ky) -
                                                              static_cast<std::ptrdiff_t>(padding);
                                    if (iy < 0 || iy >= static_cast<std::ptrdiff_t>(H)) continue;
                                    for (std::size_t kx = 0; kx < S; ++kx) {
                                        const std::ptrdiff_t ix = static_cast<std::ptrdiff_t>(ox * stride + kx) -
                                                                  static_cast<std::ptrdiff_t>(padding);
                                        if (ix < 0 || ix >= static_cast<std::ptrdiff_t>(W)) continue;
                                        wg[c * S * S + ky * S + kx] +=
                                            g * ibase[iy * static_cast<std::ptrdiff_t>(W) + ix];
                                    }
                                }
                            }
                    }
                }
            }
        }
        if (need_b) {
            for (std::size_t n = 0; n < N; ++n)
                for (std::size_t k = 0; k < K; ++k) {
                    const T* ogrid = o.grad.data() + (n * K + k) * Ho * Wo;
                    T acc = T(0);
                    for (std::size_t i = 0; i < Ho * Wo; ++i) acc += ogrid[i];
                    bn->grad[k] += acc;
                }
        }
    };
    return detail::make_result<T>(Shape{N, K, Ho, Wo}, std::move(out), "conv2d", {in, wn, bn}, backward);
}

// [N,C,H,W] -> [N,C], mean over the spatial grid
template <typename T>
Tensor<T> global_avg_pool(const Tensor<T>& x) {
    if (x.rank() != 4) throw DimensionError("global_avg_pool: input must be [N,C,H,W]");
    const std::size_t N = x.dim(0), C = x.dim(1), HW = x.dim(2) * x.dim(3);
    auto xn = x.node();
    std::vector<T> out(N * C);
    for (std::size_t i = 0; i < N * C; ++i) {
        T acc = T(0);
        for (std::size_t j = 0; j < HW; ++j) acc += xn->data[i * HW + j];
        out[i] = acc / static_cast<T>(HW);
    }
    auto backward = [xn, N, C, HW](TensorNode<T>& o) {
        xn->ensure_grad();
        for (std::size_t i = 0; i < N * C; ++i) {
            const T g = o.grad[i] / static_cast<T>(HW);
            for (std::size_t j = 0; j < HW; ++j) xn->grad[i * HW + j] += g;
        }
    };
    return detail::make_result<T>(Shape{N, C}, std::move(out), "global_avg_pool", {xn}, backward);
}

// x [N,C] * weight [C,D] + bias [D]
template <typename T>
Tensor<T> fully_connected(const Tensor<T>& x, const Tensor<T>& weight, const Tensor<T>& bias) {
    if (x.rank() != 2 || weight.rank() != 2) throw DimensionError("fully_connected: rank-2 operands required");
    if (bias.rank() != 1 || bias.dim(0) != weight.dim(1))
        throw DimensionError("fully_connected: bias shape mismatch");
    return add(matmul(x, weight), bias);
}

// [N, C*r*r, H, W] -> [N, C, r*H, r*W]
template <typename T>
Tensor<T> pixel_shuffle(const Tensor<T>& x, std::size_t r) {
    if (x.rank() != 4) throw DimensionError("pixel_shuffle: input must be [N,C,H,W]");
    if (r == 0 || x.dim(1) % (r * r) != 0)
        throw DimensionError("pixel_shuffle: channels " + std::to_string(x.dim(1)) + " not divisible by r^2");
    const std::size_t N = x.dim(0), Cin = x.dim(1), H = x.dim(2), W = x.dim(3);
    const std::size_t C = Cin / (r * r);
    auto xn = x.node();
    std::vector<T> out(x.numel());
    auto src_index = [=](std::size_t n, std::size_t c, std::size_t y, std::size_t x_) {
        const std::size_t cy = y % r, cx = x_ % r;
        const std::size_t cin = c * r * r + cy * r + cx;
        return ((n * Cin + cin) * H + y / r) * W + x_ / r;
    };
    for (std::size_t n = 0; n < N; ++n)
        for (std::size_t c = 0; c < C; ++c)
            for (std::size_t y = 0; y < H * r; ++y)
                for (std::size_t x_ = 0; x_ < W * r; ++x_)
                    out[((n * C + c) * H * r + y) * W * r + x_] = xn->data[src_index(n, c, y, x_)];
    auto backward = [xn, N, C, H, W, r, src_index](TensorNode<T>& o) {
        xn->ensure_grad();
        for (std::size_t n = 0; n < N; ++n)
            for (std::size_t c = 0; c < C; ++c)
                for (std::size_t y = 0; y < H * r; ++y)
                    for (std::size_t x_ = 0; x_ < W * r; ++x_)
                        xn->grad[src_index(n, c, y, x_)] += o.grad[((n * C + c) * H * r + y) * W * r + x_];
    };
    return detail::make_result<T>(Shape{N, C, H * r, W * r}, std::move(out), "pixel_shuffle", {xn}, backward);
}

// inverse of pixel_shuffle
template <typename T>
Tensor<T> pixel_unshuffle(const Tensor<T>& x, std::size_t r) {
    if (x.rank() != 4) throw DimensionError("pixel_unshuffle: input must be [N,C,H,W]");
    if (r == 0 || x.dim(2) % r != 0 || x.dim(3) % r != 0)
        throw DimensionError("pixel_unshuffle: spatial dims not divisible by r");
    const std::size_t N = x.dim(0), C = x.dim(1), Hr = x.dim(2), Wr = x.dim(3);
    const std::size_t H = Hr / r, W = Wr / r, Cout = C * r * r;
    auto xn = x.node();
    std::vector<T> out(x.numel());
    auto dst_index = [=](std::size_t n, std::size_t c, std::size_t y, std::size_t x_) {
        const std::size_t cy = y % r, cx = x_ % r;
        const std::size_t cout = c * r * r + cy * r + cx;
        return ((n * Cout + cout) * H + y / r) * W + x_ / r;
    };
    for (std::size_t n = 0; n < N; ++n)
        for (std::size_t c = 0; c < C; ++c)
            for (std::size_t y = 0; y < Hr; ++y)
                for (std::size_t x_ = 0; x_ < Wr; ++x_)
                    out[dst_index(n, c, y, x_)] = xn->data[((n * C + c) * Hr + y) * Wr + x_];
    auto backward = [xn, N, C, Hr, Wr, dst_index](TensorNode<T>& o) {
        xn->ensure_grad();
        for (std::size_t n = 0; n < N; ++n)
            for (std::size_t c = 0; c < C; ++c)
                for (std::size_t y = 0; y < Hr; ++y)
                    for (std::size_t x_ = 0; x_ < Wr; ++x_)
                        xn->grad[((n * C + c) * Hr + y) * Wr + x_] += o.grad[dst_index(n, c, y, x_)];
    };
    return detail::make_result<T>(Shape{N, Cout, H, W}, std::move(out), "pixel_unshuffle", {xn}, backward);
}

}  // namespace fagan
