#pragma once

// Network building blocks: the multi-scale local fusion block, channel and
// self attention, the two fusion operators, spectral normalization, and the
// generator / discriminator assemblies.

#include "fagan/conv.hpp"
#include "fagan/cubic_kernel.hpp"
#include "fagan/tensor.hpp"

#include <array>
#include <optional>
#include <string>
#include <vector>

namespace fagan {

template <typename T>
struct NamedParam {
    std::string name;
    Tensor<T> tensor;
};

template <typename T>
using ParamList = std::vector<NamedParam<T>>;

// fan-in scaled uniform init, [-g/sqrt(fan_in), g/sqrt(fan_in)]
template <typename T>
Tensor<T> init_weight(Shape shape, std::size_t fan_in, std::mt19937& rng, double gain = 1.0) {
    const T bound = static_cast<T>(gain / std::sqrt(static_cast<double>(fan_in)));
    return Tensor<T>::uniform(std::move(shape), -bound, bound, rng, true);
}

template <typename T>
struct ConvLayer {
    Tensor<T> weight;  // [K,C,S,S]
    Tensor<T> bias;    // [K]

    static ConvLayer make(std::size_t in_ch, std::size_t out_ch, std::size_t kernel, std::mt19937& rng,
                          double gain = 1.0) {
        ConvLayer l;
        l.weight = init_weight<T>({out_ch, in_ch, kernel, kernel}, in_ch * kernel * kernel, rng, gain);
        l.bias = Tensor<T>::zeros({out_ch}, true);
        return l;
    }
    Tensor<T> forward(const Tensor<T>& x, std::size_t stride = 1) const {
        const std::size_t S = weight.dim(2);
        return conv2d(x, weight, bias, stride, (S - 1) / 2);
    }
    void collect(const std::string& prefix, ParamList<T>& out) {
        out.push_back({prefix + ".weight", weight});
        out.push_back({prefix + ".bias", bias});
    }
    std::size_t numel() const { return weight.numel() + bias.numel(); }
};

template <typename T>
struct FcLayer {
    Tensor<T> weight;  // [C,D]
    Tensor<T> bias;    // [D]

    static FcLayer make(std::size_t in_dim, std::size_t out_dim, std::mt19937& rng) {
        FcLayer l;
        l.weight = init_weight<T>({in_dim, out_dim}, in_dim, rng);
        l.bias = Tensor<T>::zeros({out_dim}, true);
        return l;
    }
    Tensor<T> forward(const Tensor<T>& x) const { return fully_connected(x, weight, bias); }
    void collect(const std::string& prefix, ParamList<T>& out) {
        out.push_back({prefix + ".weight", weight});
        out.push_back({prefix + ".bias", bias});
    }
    std::size_t numel() const { return weight.numel() + bias.numel(); }
};

// ---------------------------------------------------------------------------
// LFFB: three parallel branches with kernel sizes 3/5/7 (three convs each,
// ReLU between), concatenated, fused by a 1x1 conv, residual-added.

template <typename T>
struct LFFBParams {
    std::vector<ConvLayer<T>> branch3, branch5, branch7;  // three convs each
    ConvLayer<T> fusion;                                  // [C, 3C, 1, 1]
    std::size_t channels = 0;

    static LFFBParams make(std::size_t channels, std::mt19937& rng) {
        LFFBParams p;
        p.channels = channels;
        for (std::size_t k : {std::size_t(3), std::size_t(5), std::size_t(7)}) {
            auto& branch = k == 3 ? p.branch3 : (k == 5 ? p.branch5 : p.branch7);
            for (int i = 0; i < 3; ++i) branch.push_back(ConvLayer<T>::make(channels, channels, k, rng));
        }
        p.fusion = ConvLayer<T>::make(3 * channels, channels, 1, rng);
        return p;
    }
    void collect(const std::string& prefix, ParamList<T>& out) {
        const char* names[3] = {"branch3", "branch5", "branch7"};
        std::vector<ConvLayer<T>>* branches[3] = {&branch3, &branch5, &branch7};
        for (int b = 0; b < 3; ++b)
            for (std::size_t i = 0; i < branches[b]->size(); ++i)
                (*branches[b])[i].collect(prefix + "." + names[b] + ".conv" + std::to_string(i + 1), out);
        fusion.collect(prefix + ".fusion", out);
    }
};

template <typename T>
Tensor<T> lffb_forward(const Tensor<T>& x, const LFFBParams<T>& p) {
    if (x.rank() != 4 || x.dim(1) != p.channels)
        throw DimensionError("lffb_forward: expected " + std::to_string(p.channels) + " channels, got " +
                             shape_str(x.shape()));
    auto run_branch = [&](const std::vector<ConvLayer<T>>& branch) {
        Tensor<T> h = branch[0].forward(x);
        h = relu(h);
        h = branch[1].forward(h);
        h = relu(h);
        return branch[2].forward(h);
    };
    auto f = concat<T>({run_branch(p.branch3), run_branch(p.branch5), run_branch(p.branch7)}, 1);
    return add(p.fusion.forward(f), x);
}

// plain residual conv block, used when the LFFB ablation is active
template <typename T>
struct PlainBlockParams {
    ConvLayer<T> conv;

    static PlainBlockParams make(std::size_t channels, std::mt19937& rng) {
        return PlainBlockParams{ConvLayer<T>::make(channels, channels, 3, rng)};
    }
    void collect(const std::string& prefix, ParamList<T>& out) { conv.collect(prefix + ".conv", out); }
};

template <typename T>
Tensor<T> plain_block_forward(const Tensor<T>& x, const PlainBlockParams<T>& p) {
    return add(p.conv.forward(relu(x)), x);
}

// ---------------------------------------------------------------------------
// Channel attention: GAP -> FC(C -> C/r) -> ReLU -> FC(C/r -> C) -> sigmoid,
// result rescales the input per channel.

template <typename T>
struct ChannelAttentionParams {
    std::size_t ratio = 8;
    FcLayer<T> reduce;  // [C, C/r]
    FcLayer<T> expand;  // [C/r, C]

    static ChannelAttentionParams make(std::size_t channels, std::size_t ratio, std::mt19937& rng) {
        if (ratio == 0 || channels % ratio != 0)
            throw ConfigError("channel attention: channels " + std::to_string(channels) +
                              " not divisible by ratio " + std::to_string(ratio));
        ChannelAttentionParams p;
        p.ratio = ratio;
        p.reduce = FcLayer<T>::make(channels, channels / ratio, rng);
        p.expand = FcLayer<T>::make(channels / ratio, channels, rng);
        return p;
    }
    void collect(const std::string& prefix, ParamList<T>& out) {
        reduce.collect(prefix + ".reduce", out);
        expand.collect(prefix + ".expand", out);
    }
};

template <typename T>
Tensor<T> channel_attention_scales(const Tensor<T>& x, const ChannelAttentionParams<T>& p) {
    if (x.rank() != 4) throw DimensionError("channel_attention: input must be [N,C,H,W]");
    if (x.dim(1) != p.reduce.weight.dim(0))
        throw ConfigError("channel_attention: channel count mismatch with parameters");
    auto z = relu(p.reduce.forward(global_avg_pool(x)));
    return sigmoid(p.expand.forward(z));  // [N,C], entries in (0,1)
}

template <typename T>
Tensor<T> channel_attention_forward(const Tensor<T>& x, const ChannelAttentionParams<T>& p) {
    auto s = channel_attention_scales(x, p);
    return mul(x, reshape(s, {x.dim(0), x.dim(1), 1, 1}));
}

// ---------------------------------------------------------------------------
// Self attention (SAGAN style): f/g project to C/8 channels, the [HW x HW]
// attention map is a row-softmax of g^T f, the result is gated by a learned
// scalar gamma that starts at 0.

template <typename T>
struct SelfAttentionParams {
    Tensor<T> wf, wg;  // [C/8, C, 1, 1]
    Tensor<T> wh, wv;  // [C, C, 1, 1]
    Tensor<T> gamma;   // scalar, initialized to 0
    Tensor<T> zero_bias_c8, zero_bias_c;

    static SelfAttentionParams make(std::size_t channels, std::mt19937& rng) {
        if (channels < 8 || channels % 8 != 0)
            throw ConfigError("self attention: channels must be a positive multiple of 8, got " +
                              std::to_string(channels));
        const std::size_t c8 = channels / 8;
        SelfAttentionParams p;
        p.wf = init_weight<T>({c8, channels, 1, 1}, channels, rng);
        p.wg = init_weight<T>({c8, channels, 1, 1}, channels, rng);
        p.wh = init_weight<T>({channels, channels, 1, 1}, channels, rng);
        p.wv = init_weight<T>({channels, channels, 1, 1}, channels, rng);
        p.gamma = Tensor<T>({1}, {T(0)}, true);
        p.zero_bias_c8 = Tensor<T>::zeros({c8});
        p.zero_bias_c = Tensor<T>::zeros({channels});
        return p;
    }
    void collect(const std::string& prefix, ParamList<T>& out) {
        out.push_back({prefix + ".wf", wf});
        out.push_back({prefix + ".wg", wg});
        out.push_back({prefix + ".wh", wh});
        out.push_back({prefix + ".wv", wv});
        out.push_back({prefix + ".gamma", gamma});
    }
};

// row-stochastic attention map of one batch sample, [HW, HW]
template <typename T>
Tensor<T> self_attention_map(const Tensor<T>& x, const SelfAttentionParams<T>& p, std::size_t sample) {
    const std::size_t HW = x.dim(2) * x.dim(3);
    const std::size_t c8 = p.wf.dim(0);
    auto xi = narrow(x, 0, sample, 1);
    auto f = reshape(conv2d(xi, p.wf, p.zero_bias_c8), {c8, HW});
    auto g = reshape(conv2d(xi, p.wg, p.zero_bias_c8), {c8, HW});
    auto scores = matmul(transpose2(g), f);  // scores[j,i] = g(x_j) . f(x_i)
    return softmax(scores, 1);
}

template <typename T>
Tensor<T> self_attention_forward(const Tensor<T>& x, const SelfAttentionParams<T>& p) {
    if (x.rank() != 4) throw DimensionError("self_attention: input must be [N,C,H,W]");
    if (x.dim(1) != p.wh.dim(0)) throw ConfigError("self_attention: channel count mismatch with parameters");
    const std::size_t N = x.dim(0), C = x.dim(1), H = x.dim(2), W = x.dim(3), HW = H * W;
    const std::size_t c8 = p.wf.dim(0);
    std::vector<Tensor<T>> outs;
    for (std::size_t n = 0; n < N; ++n) {
        auto xi = narrow(x, 0, n, 1);
        auto f = reshape(conv2d(xi, p.wf, p.zero_bias_c8), {c8, HW});
        auto g = reshape(conv2d(xi, p.wg, p.zero_bias_c8), {c8, HW});
        auto h = reshape(conv2d(xi, p.wh, p.zero_bias_c), {C, HW});
        auto attn = softmax(matmul(transpose2(g), f), 1);         // [HW, HW]
        auto o_pre = matmul(attn, transpose2(h));                 // [HW, C]
        auto o_sp = reshape(transpose2(o_pre), {std::size_t(1), C, H, W});
        outs.push_back(conv2d(o_sp, p.wv, p.zero_bias_c));
    }
    auto o = outs.size() == 1 ? outs[0] : concat(outs, 0);
    return add(mul(o, p.gamma), x);
}

// ---------------------------------------------------------------------------
// Fusion operators

enum class FusionMode { Direct, Weighted };

struct FusionConfig {
    FusionMode mode = FusionMode::Weighted;
    double alpha = 0.5;
    double beta = 0.5;
    double eps = 1e-8;  // denominator guard, weighted mode only
};

template <typename T>
Tensor<T> fuse(const Tensor<T>& r, const Tensor<T>& y, const FusionConfig& cfg) {
    if (r.shape() != y.shape())
        throw DimensionError("fuse: shape mismatch " + shape_str(r.shape()) + " vs " + shape_str(y.shape()));
    auto ra = scalar_mul(r, cfg.alpha);
    auto yb = scalar_mul(y, cfg.beta);
    if (cfg.mode == FusionMode::Direct) return add(ra, yb);
    auto den = add(add(ra, yb), Tensor<T>::full(r.shape(), static_cast<T>(cfg.eps)));
    return div(add(abs_square(ra), abs_square(yb)), den);
}

// ---------------------------------------------------------------------------
// Spectral normalization: one (configurable) power-iteration update of the
// leading singular pair, then W / sigma_hat. Gradients pass through the 1/sigma
// scaling with u, v held constant.

template <typename T>
struct SpectralNormState {
    std::vector<T> u;  // left singular vector estimate, unit norm
    std::size_t power_iterations = 1;
    T last_sigma = T(0);
    bool degenerate = false;  // sigma below threshold on the last call
};

template <typename T>
Tensor<T> spectral_normalize(const Tensor<T>& w, SpectralNormState<T>& state) {
    if (w.rank() == 0 || w.numel() == 0) throw DimensionError("spectral_normalize: empty weight");
    const std::size_t rows = w.dim(0);
    const std::size_t cols = w.numel() / rows;
    std::span<const T> m = w.data();

    if (state.u.size() != rows) {
        // deterministic start vector
        std::mt19937 rng(0x5eedu + static_cast<unsigned>(rows * 131 + cols));
        state.u.resize(rows);
        for (auto& v : state.u) v = static_cast<T>(static_cast<double>(rng()) / 4294967296.0 - 0.5);
        T n = T(0);
        for (T v : state.u) n += v * v;
        n = std::sqrt(n);
        for (auto& v : state.u) v /= n;
    }

    std::vector<T> v(cols);
    T sigma = T(0);
    for (std::size_t it = 0; it < std::max<std::size_t>(1, state.power_iterations); ++it) {
        // v = normalize(W^T u)
        std::fill(v.begin(), v.end(), T(0));
        for (std::size_t i = 0; i < rows; ++i) {
            const T ui = state.u[i];
            for (std::size_t j = 0; j < cols; ++j) v[j] += m[i * cols + j] * ui;
        }
        T nv = T(0);
        for (T x : v) nv += x * x;
        nv = std::sqrt(nv);
        if (nv < T(1e-12)) {
            state.last_sigma = T(0);
            state.degenerate = true;
            return w;
        }
        for (auto& x : v) x /= nv;
        // u = normalize(W v)
        std::vector<T> wu(rows, T(0));
        for (std::size_t i = 0; i < rows; ++i) {
            T acc = T(0);
            for (std::size_t j = 0; j < cols; ++j) acc += m[i * cols + j] * v[j];
            wu[i] = acc;
        }
        T nu = T(0);
        for (T x : wu) nu += x * x;
        nu = std::sqrt(nu);
        if (nu < T(1e-12)) {
            state.last_sigma = T(0);
            state.degenerate = true;
            return w;
        }
        for (std::size_t i = 0; i < rows; ++i) state.u[i] = wu[i] / nu;
        sigma = nu;  // ||W v|| with unit v equals u^T W v for the updated u
    }
    state.last_sigma = sigma;
    state.degenerate = sigma < T(1e-12);
    if (state.degenerate) return w;
    return scalar_mul(w, T(1) / sigma);
}

// ---------------------------------------------------------------------------
// Differentiable integer-factor bicubic upsampling (the fixed inverse-mapping
// path the generator's learned residual is added onto).

template <typename T>
Tensor<T> upsample_bicubic(const Tensor<T>& x, std::size_t r) {
    if (x.rank() != 4) throw DimensionError("upsample_bicubic: input must be [N,C,H,W]");
    if (r == 0) throw ContractError("upsample_bicubic: factor must be positive");
    const std::size_t N = x.dim(0), C = x.dim(1), H = x.dim(2), W = x.dim(3);
    const std::size_t Ho = H * r, Wo = W * r;
    // per output coordinate: 4 source taps and weights along each axis
    auto make_taps = [r](std::size_t out_len, std::size_t in_len) {
        std::vector<std::array<std::ptrdiff_t, 4>> idx(out_len);
        std::vector<std::array<T, 4>> wgt(out_len);
        for (std::size_t o = 0; o < out_len; ++o) {
            const double src = (static_cast<double>(o) + 0.5) / static_cast<double>(r) - 0.5;
            const std::ptrdiff_t base = static_cast<std::ptrdiff_t>(std::floor(src)) - 1;
            for (int k = 0; k < 4; ++k) {
                std::ptrdiff_t i = base + k;
                wgt[o][k] = static_cast<T>(cubic_weight(src - static_cast<double>(base + k)));
                idx[o][k] = std::clamp<std::ptrdiff_t>(i, 0, static_cast<std::ptrdiff_t>(in_len) - 1);
            }
        }
        return std::pair(idx, wgt);
    };
    auto [yi, yw] = make_taps(Ho, H);
    auto [xi, xw] = make_taps(Wo, W);
    auto xn = x.node();
    std::vector<T> out(N * C * Ho * Wo);
    for (std::size_t nc = 0; nc < N * C; ++nc) {
        const T* src = xn->data.data() + nc * H * W;
        T* dst = out.data() + nc * Ho * Wo;
        for (std::size_t oy = 0; oy < Ho; ++oy)
            for (std::size_t ox = 0; ox < Wo; ++ox) {
                T acc = T(0);
                for (int a = 0; a < 4; ++a)
                    for (int b = 0; b < 4; ++b)
                        acc += yw[oy][a] * xw[ox][b] * src[yi[oy][a] * static_cast<std::ptrdiff_t>(W) + xi[ox][b]];
                dst[oy * Wo + ox] = acc;
            }
    }
    auto backward = [xn, N, C, H, W, Ho, Wo, yi = yi, yw = yw, xi = xi, xw = xw](TensorNode<T>& o) {
        xn->ensure_grad();
        for (std::size_t nc = 0; nc < N * C; ++nc) {
            T* g = xn->grad.data() + nc * H * W;
            const T* og = o.grad.data() + nc * Ho * Wo;
            for (std::size_t oy = 0; oy < Ho; ++oy)
                for (std::size_t ox = 0; ox < Wo; ++ox) {
                    const T gv = og[oy * Wo + ox];
                    for (int a = 0; a < 4; ++a)
                        for (int b = 0; b < 4; ++b)
                            g[yi[oy][a] * static_cast<std::ptrdiff_t>(W) + xi[ox][b]] += gv * yw[oy][a] * xw[ox][b];
                }
        }
    };
    return detail::make_result<T>(Shape{N, C, Ho, Wo}, std::move(out), "upsample_bicubic", {xn}, backward);
}

// ---------------------------------------------------------------------------
// Generator

struct GeneratorConfig {
    std::size_t in_channels = 1;
    std::size_t width = 32;     // trunk channel count C
    std::size_t num_blocks = 4; // LFFB chain length
    std::size_t scale = 2;      // {2,4,8}
    std::size_t ca_ratio = 8;
    bool use_lffb = true;
    bool use_ca = true;
    bool use_sa = true;
    bool global_residual = true;  // add bicubic-upsampled input to the output
    FusionConfig fusion;

    std::size_t upsample_stages() const {
        switch (scale) {
            case 2: return 1;
            case 4: return 2;
            case 8: return 3;
            default: throw ConfigError("generator: scale must be 2, 4 or 8, got " + std::to_string(scale));
        }
    }
    void validate() const {
        upsample_stages();
        if (use_ca && (ca_ratio == 0 || width % ca_ratio != 0))
            throw ConfigError("generator: width not divisible by channel-attention ratio");
        if (use_sa && (width < 8 || width % 8 != 0))
            throw ConfigError("generator: self-attention requires width to be a multiple of 8");
    }
};

template <typename T>
struct GeneratorParams {
    GeneratorConfig cfg;
    ConvLayer<T> head;
    std::vector<LFFBParams<T>> lffbs;
    std::vector<PlainBlockParams<T>> plain_blocks;  // used when use_lffb is off
    ConvLayer<T> mid;
    std::vector<ConvLayer<T>> upsample;  // C -> 4C per stage
    std::optional<ChannelAttentionParams<T>> ca;
    std::optional<SelfAttentionParams<T>> sa;
    ConvLayer<T> tail;

    static GeneratorParams make(const GeneratorConfig& cfg, std::mt19937& rng) {
        cfg.validate();
        GeneratorParams p;
        p.cfg = cfg;
        const std::size_t C = cfg.width;
        p.head = ConvLayer<T>::make(cfg.in_channels, C, 3, rng);
        for (std::size_t i = 0; i < cfg.num_blocks; ++i) {
            if (cfg.use_lffb)
                p.lffbs.push_back(LFFBParams<T>::make(C, rng));
            else
                p.plain_blocks.push_back(PlainBlockParams<T>::make(C, rng));
        }
        p.mid = ConvLayer<T>::make(C, C, 3, rng);
        for (std::size_t s = 0; s < cfg.upsample_stages(); ++s)
            p.upsample.push_back(ConvLayer<T>::make(C, 4 * C, 3, rng));
        if (cfg.use_ca) p.ca = ChannelAttentionParams<T>::make(C, cfg.ca_ratio, rng);
        if (cfg.use_sa) p.sa = SelfAttentionParams<T>::make(C, rng);
        // small tail gain keeps the initial output close to the bicubic path
        p.tail = ConvLayer<T>::make(C, cfg.in_channels, 3, rng, 0.1);
        return p;
    }

    void collect(const std::string& prefix, ParamList<T>& out) {
        head.collect(prefix + ".head", out);
        for (std::size_t i = 0; i < lffbs.size(); ++i) lffbs[i].collect(prefix + ".lffb." + std::to_string(i), out);
        for (std::size_t i = 0; i < plain_blocks.size(); ++i)
            plain_blocks[i].collect(prefix + ".block." + std::to_string(i), out);
        mid.collect(prefix + ".mid", out);
        for (std::size_t i = 0; i < upsample.size(); ++i)
            upsample[i].collect(prefix + ".upsample." + std::to_string(i), out);
        if (ca) ca->collect(prefix + ".ca", out);
        if (sa) sa->collect(prefix + ".sa", out);
        tail.collect(prefix + ".tail", out);
    }
    std::size_t num_parameters() {
        ParamList<T> l;
        collect("g", l);
        std::size_t n = 0;
        for (auto& p : l) n += p.tensor.numel();
        return n;
    }
};

template <typename T>
Tensor<T> generator_forward(const Tensor<T>& lr, const GeneratorParams<T>& p) {
    if (lr.rank() != 4 || lr.dim(1) != p.cfg.in_channels)
        throw DimensionError("generator: input must be [N," + std::to_string(p.cfg.in_channels) + ",h,w]");
    auto x = relu(p.head.forward(lr));
    for (auto& b : p.lffbs) x = lffb_forward(x, b);
    for (auto& b : p.plain_blocks) x = plain_block_forward(x, b);
    x = p.mid.forward(x);
    for (auto& up : p.upsample) x = relu(pixel_shuffle(up.forward(x), 2));
    if (p.ca && p.sa) {
        auto r = channel_attention_forward(x, *p.ca);
        auto y = self_attention_forward(x, *p.sa);
        x = fuse(r, y, p.cfg.fusion);
    } else if (p.ca) {
        x = channel_attention_forward(x, *p.ca);
    } else if (p.sa) {
        x = self_attention_forward(x, *p.sa);
    }
    auto out = p.tail.forward(x);
    if (p.cfg.global_residual) out = add(out, upsample_bicubic(lr, p.cfg.scale));
    return out;
}

// ---------------------------------------------------------------------------
// Discriminator: strided conv stack with leaky ReLU 0.2, GAP head, sigmoid
// output. With SN enabled every conv and FC weight is spectrally normalized
// before use; the per-weight u estimates live in the params struct.

struct DiscriminatorConfig {
    std::size_t in_channels = 1;
    std::size_t width = 32;
    bool sn_enabled = true;
    std::size_t sn_power_iterations = 1;
    double lrelu_slope = 0.2;
};

template <typename T>
struct DiscriminatorParams {
    DiscriminatorConfig cfg;
    std::vector<ConvLayer<T>> convs;     // alternating stride 1 / 2
    std::vector<std::size_t> strides;
    FcLayer<T> fc1, fc2;
    mutable std::vector<SpectralNormState<T>> sn;  // one per conv, then fc1, fc2

    static DiscriminatorParams make(const DiscriminatorConfig& cfg, std::mt19937& rng) {
        DiscriminatorParams p;
        p.cfg = cfg;
        const std::size_t d = cfg.width;
        const std::size_t plan[6][2] = {{cfg.in_channels, d}, {d, d}, {d, 2 * d}, {2 * d, 2 * d}, {2 * d, 4 * d}, {4 * d, 4 * d}};
        for (int i = 0; i < 6; ++i) {
            p.convs.push_back(ConvLayer<T>::make(plan[i][0], plan[i][1], 3, rng));
            p.strides.push_back(i % 2 == 0 ? 1 : 2);
        }
        p.fc1 = FcLayer<T>::make(4 * d, 4 * d, rng);
        p.fc2 = FcLayer<T>::make(4 * d, 1, rng);
        p.sn.resize(p.convs.size() + 2);
        for (auto& s : p.sn) s.power_iterations = cfg.sn_power_iterations;
        return p;
    }

    void collect(const std::string& prefix, ParamList<T>& out) {
        for (std::size_t i = 0; i < convs.size(); ++i) convs[i].collect(prefix + ".conv" + std::to_string(i), out);
        fc1.collect(prefix + ".fc1", out);
        fc2.collect(prefix + ".fc2", out);
    }
};

template <typename T>
Tensor<T> discriminator_forward(const Tensor<T>& img, const DiscriminatorParams<T>& p) {
    if (img.rank() != 4 || img.dim(1) != p.cfg.in_channels)
        throw DimensionError("discriminator: input must be [N," + std::to_string(p.cfg.in_channels) + ",H,W]");
    const bool sn = p.cfg.sn_enabled;
    Tensor<T> x = img;
    for (std::size_t i = 0; i < p.convs.size(); ++i) {
        auto w = sn ? spectral_normalize(p.convs[i].weight, p.sn[i]) : p.convs[i].weight;
        const std::size_t S = w.dim(2);
        x = leaky_relu(conv2d(x, w, p.convs[i].bias, p.strides[i], (S - 1) / 2), p.cfg.lrelu_slope);
    }
    x = global_avg_pool(x);
    auto w1 = sn ? spectral_normalize(p.fc1.weight, p.sn[p.convs.size()]) : p.fc1.weight;
    x = leaky_relu(fully_connected(x, w1, p.fc1.bias), p.cfg.lrelu_slope);
    auto w2 = sn ? spectral_normalize(p.fc2.weight, p.sn[p.convs.size() + 1]) : p.fc2.weight;
    return sigmoid(fully_connected(x, w2, p.fc2.bias));
}

}  // namespace fagan
