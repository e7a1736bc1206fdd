#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "fagan/blocks.hpp"
#include "fagan/gradcheck.hpp"

#include <Eigen/Dense>
#include <Eigen/SVD>

#include <random>

using namespace fagan;

namespace {

// independent spectral-norm oracle
template <typename T>
double svd_spectral_norm(const Tensor<T>& w) {
    const std::size_t rows = w.dim(0);
    const std::size_t cols = w.numel() / rows;
    Eigen::MatrixXd m(rows, cols);
    for (std::size_t i = 0; i < rows; ++i)
        for (std::size_t j = 0; j < cols; ++j) m(i, j) = static_cast<double>(w.at(i * cols + j));
    Eigen::JacobiSVD<Eigen::MatrixXd> svd(m);
    return svd.singularValues()(0);
}

template <typename T>
std::vector<T> flatten(const Tensor<T>& t) {
    return {t.data().begin(), t.data().end()};
}

}  // namespace

TEST_CASE("lffb preserves shape and zero maps to zero") {
    std::mt19937 rng(1);
    auto p = LFFBParams<double>::make(4, rng);
    // zero biases already; zero input -> branches produce 0, fusion bias 0, residual 0
    auto zero = Tensor<double>::zeros({1, 4, 9, 9});
    auto y = lffb_forward(zero, p);
    CHECK(y.shape() == Shape{1, 4, 9, 9});
    for (std::size_t i = 0; i < y.numel(); ++i) CHECK(y.at(i) == 0.0);

    auto x = Tensor<double>::uniform({2, 4, 7, 10}, -1.0, 1.0, rng);
    CHECK(lffb_forward(x, p).shape() == x.shape());

    auto bad = Tensor<double>::zeros({1, 3, 9, 9});
    CHECK_THROWS_AS(lffb_forward(bad, p), DimensionError);
}

TEST_CASE("lffb with zero branch weights is the identity") {
    std::mt19937 rng(2);
    auto p = LFFBParams<double>::make(4, rng);
    for (auto* br : {&p.branch3, &p.branch5, &p.branch7})
        for (auto& c : *br) std::fill(c.weight.mutable_data().begin(), c.weight.mutable_data().end(), 0.0);
    std::fill(p.fusion.weight.mutable_data().begin(), p.fusion.weight.mutable_data().end(), 0.0);
    auto x = Tensor<double>::uniform({1, 4, 8, 8}, -1.0, 1.0, rng);
    auto y = lffb_forward(x, p);
    for (std::size_t i = 0; i < x.numel(); ++i) CHECK(y.at(i) == x.at(i));
}

TEST_CASE("lffb end-to-end gradient check") {
    std::mt19937 rng(3);
    auto p = LFFBParams<double>::make(4, rng);
    auto x = Tensor<double>::uniform({1, 4, 8, 8}, -1.0, 1.0, rng);
    ParamList<double> params;
    p.collect("lffb", params);
    std::vector<Tensor<double>> inputs{x};
    for (auto& np : params) inputs.push_back(np.tensor);
    auto res = gradcheck<double>(
        [&p](const std::vector<Tensor<double>>& in) { return mean(abs_square(lffb_forward(in[0], p))); }, inputs);
    CHECK(res.max_rel_error < 1e-7);
}

TEST_CASE("channel attention: zero weights give 0.5 scaling") {
    std::mt19937 rng(4);
    auto p = ChannelAttentionParams<double>::make(8, 4, rng);
    std::fill(p.reduce.weight.mutable_data().begin(), p.reduce.weight.mutable_data().end(), 0.0);
    std::fill(p.expand.weight.mutable_data().begin(), p.expand.weight.mutable_data().end(), 0.0);
    auto x = Tensor<double>::uniform({2, 8, 5, 5}, -1.0, 1.0, rng);
    auto y = channel_attention_forward(x, p);
    for (std::size_t i = 0; i < x.numel(); ++i) CHECK(y.at(i) == doctest::Approx(0.5 * x.at(i)));
}

TEST_CASE("channel attention: scales in (0,1), symmetric weights give equal scales") {
    std::mt19937 rng(5);
    auto p = ChannelAttentionParams<double>::make(8, 4, rng);
    auto x = Tensor<double>::uniform({1, 8, 6, 6}, -1.0, 1.0, rng);
    auto s = channel_attention_scales(x, p);
    for (std::size_t i = 0; i < s.numel(); ++i) {
        CHECK(s.at(i) > 0.0);
        CHECK(s.at(i) < 1.0);
    }

    // identical channel statistics + channel-symmetric weights -> equal scales
    auto xs = Tensor<double>::uniform({1, 1, 6, 6}, -1.0, 1.0, rng);
    std::vector<double> rep;
    for (int c = 0; c < 8; ++c) rep.insert(rep.end(), xs.data().begin(), xs.data().end());
    Tensor<double> xsym({1, 8, 6, 6}, rep);
    auto psym = ChannelAttentionParams<double>::make(8, 4, rng);
    for (std::size_t j = 0; j < 2; ++j)
        for (std::size_t c = 0; c < 8; ++c) psym.reduce.weight.mutable_data()[c * 2 + j] = 0.1 * (j + 1);
    for (std::size_t j = 0; j < 2; ++j)
        for (std::size_t c = 0; c < 8; ++c) psym.expand.weight.mutable_data()[j * 8 + c] = 0.2 * (j + 1);
    auto ssym = channel_attention_scales(xsym, psym);
    for (std::size_t c = 1; c < 8; ++c) CHECK(ssym.at(c) == doctest::Approx(ssym.at(0)).epsilon(1e-12));
}

TEST_CASE("channel attention: channel permutation equivariance") {
    std::mt19937 rng(6);
    const std::size_t C = 8, r = 4;
    auto p = ChannelAttentionParams<double>::make(C, r, rng);
    auto x = Tensor<double>::uniform({1, C, 4, 4}, -1.0, 1.0, rng);
    auto y = channel_attention_forward(x, p);

    std::vector<std::size_t> perm = {3, 1, 7, 0, 5, 2, 6, 4};
    const std::size_t HW = 16;
    std::vector<double> xd(x.numel());
    for (std::size_t c = 0; c < C; ++c)
        std::copy_n(x.data().begin() + perm[c] * HW, HW, xd.begin() + c * HW);
    Tensor<double> xp({1, C, 4, 4}, xd);

    auto pp = ChannelAttentionParams<double>::make(C, r, rng);
    for (std::size_t c = 0; c < C; ++c)
        for (std::size_t j = 0; j < C / r; ++j)
            pp.reduce.weight.mutable_data()[c * (C / r) + j] = p.reduce.weight.at(perm[c] * (C / r) + j);
    for (std::size_t j = 0; j < C / r; ++j)
        for (std::size_t c = 0; c < C; ++c)
            pp.expand.weight.mutable_data()[j * C + c] = p.expand.weight.at(j * C + perm[c]);
    auto yp = channel_attention_forward(xp, pp);
    for (std::size_t c = 0; c < C; ++c)
        for (std::size_t i = 0; i < HW; ++i)
            CHECK(yp.at(c * HW + i) == doctest::Approx(y.at(perm[c] * HW + i)).epsilon(1e-12));
}

TEST_CASE("channel attention: config errors and gradient check") {
    std::mt19937 rng(7);
    CHECK_THROWS_AS(ChannelAttentionParams<double>::make(6, 4, rng), ConfigError);

    auto p = ChannelAttentionParams<double>::make(8, 4, rng);
    auto x = Tensor<double>::uniform({1, 8, 4, 4}, -1.0, 1.0, rng);
    std::vector<Tensor<double>> inputs{x, p.reduce.weight, p.reduce.bias, p.expand.weight, p.expand.bias};
    auto res = gradcheck<double>(
        [&p](const std::vector<Tensor<double>>& in) {
            return mean(abs_square(channel_attention_forward(in[0], p)));
        },
        inputs);
    CHECK(res.max_rel_error < 1e-7);
}

TEST_CASE("self attention: gamma=0 is the exact identity") {
    std::mt19937 rng(8);
    auto p = SelfAttentionParams<double>::make(8, rng);
    auto x = Tensor<double>::uniform({2, 8, 4, 4}, -1.0, 1.0, rng);
    auto y = self_attention_forward(x, p);
    for (std::size_t i = 0; i < x.numel(); ++i) CHECK(y.at(i) == x.at(i));
}

TEST_CASE("self attention: attention map rows sum to 1") {
    std::mt19937 rng(9);
    auto p = SelfAttentionParams<double>::make(8, rng);
    for (int trial = 0; trial < 10; ++trial) {
        auto x = Tensor<double>::uniform({1, 8, 4, 4}, -2.0, 2.0, rng);
        auto a = self_attention_map(x, p, 0);
        const std::size_t hw = 16;
        REQUIRE(a.shape() == Shape{hw, hw});
        for (std::size_t j = 0; j < hw; ++j) {
            double row = 0;
            for (std::size_t i = 0; i < hw; ++i) {
                CHECK(a.at(j * hw + i) >= 0.0);
                row += a.at(j * hw + i);
            }
            CHECK(row == doctest::Approx(1.0).epsilon(1e-6));
        }
    }
}

TEST_CASE("self attention: config errors and gradient check including gamma") {
    std::mt19937 rng(10);
    CHECK_THROWS_AS(SelfAttentionParams<double>::make(4, rng), ConfigError);

    auto p = SelfAttentionParams<double>::make(8, rng);
    p.gamma.mutable_data()[0] = 0.3;  // make the attention path active
    auto x = Tensor<double>::uniform({1, 8, 4, 4}, -1.0, 1.0, rng);
    std::vector<Tensor<double>> inputs{x, p.wf, p.wg, p.wh, p.wv, p.gamma};
    auto res = gradcheck<double>(
        [&p](const std::vector<Tensor<double>>& in) { return mean(abs_square(self_attention_forward(in[0], p))); },
        inputs);
    CHECK(res.max_rel_error < 1e-7);
}

TEST_CASE("fuse: direct mode") {
    std::mt19937 rng(11);
    auto x = Tensor<double>::uniform({2, 3, 4, 4}, -1.0, 1.0, rng);
    FusionConfig cfg{FusionMode::Direct, 0.5, 0.5, 1e-8};
    auto y = fuse(x, x, cfg);
    for (std::size_t i = 0; i < x.numel(); ++i) CHECK(y.at(i) == doctest::Approx(x.at(i)));

    // linear in (R, Y)
    auto r1 = Tensor<double>::uniform({8}, -1.0, 1.0, rng);
    auto r2 = Tensor<double>::uniform({8}, -1.0, 1.0, rng);
    auto yv = Tensor<double>::uniform({8}, -1.0, 1.0, rng);
    FusionConfig c2{FusionMode::Direct, 0.3, 0.7, 1e-8};
    auto lhs = fuse(add(r1, r2), yv, c2);
    auto rhs = add(fuse(r1, yv, c2), fuse(r2, Tensor<double>::zeros({8}), c2));
    for (std::size_t i = 0; i < 8; ++i) CHECK(lhs.at(i) == doctest::Approx(rhs.at(i)).epsilon(1e-12));

    Tensor<double> bad({4}, {0, 0, 0, 0});
    CHECK_THROWS_AS(fuse(x, bad, cfg), DimensionError);
}

TEST_CASE("fuse: weighted mode analytic value and eps guard") {
    std::mt19937 rng(12);
    auto x = Tensor<double>::uniform({16}, 0.5, 2.0, rng);  // strictly positive
    FusionConfig cfg{FusionMode::Weighted, 0.5, 0.5, 1e-12};
    auto y = fuse(x, x, cfg);
    // (0.25x^2 + 0.25x^2) / (x + eps) -> 0.5 x
    for (std::size_t i = 0; i < x.numel(); ++i) CHECK(y.at(i) == doctest::Approx(0.5 * x.at(i)).epsilon(1e-9));

    // alpha R + beta Y == 0 stays finite through the guard
    Tensor<double> r({2}, {1.0, 0.0});
    Tensor<double> yv({2}, {-1.0, 0.0});
    FusionConfig g{FusionMode::Weighted, 0.5, 0.5, 1e-8};
    auto z = fuse(r, yv, g);
    for (std::size_t i = 0; i < 2; ++i) CHECK(std::isfinite(z.at(i)));
}

TEST_CASE("fuse: weighted mode positive 1-homogeneity") {
    std::mt19937 rng(13);
    FusionConfig cfg{FusionMode::Weighted, 0.5, 0.5, 1e-12};
    auto r = Tensor<double>::uniform({32}, 0.1, 1.0, rng);
    auto y = Tensor<double>::uniform({32}, 0.1, 1.0, rng);
    const double c = 2.7;
    auto scaled = fuse(scalar_mul(r, c), scalar_mul(y, c), cfg);
    auto base = fuse(r, y, cfg);
    for (std::size_t i = 0; i < 32; ++i)
        CHECK(scaled.at(i) == doctest::Approx(c * base.at(i)).epsilon(1e-5));
}

TEST_CASE("fuse: gradient check both modes") {
    std::mt19937 rng(14);
    for (auto mode : {FusionMode::Direct, FusionMode::Weighted}) {
        FusionConfig cfg{mode, 0.5, 0.5, 1e-8};
        auto r = Tensor<double>::uniform({2, 2, 3, 3}, 0.2, 1.0, rng);
        auto y = Tensor<double>::uniform({2, 2, 3, 3}, 0.2, 1.0, rng);
        auto res = gradcheck<double>(
            [cfg](const std::vector<Tensor<double>>& in) { return mean(abs_square(fuse(in[0], in[1], cfg))); },
            {r, y});
        CHECK(res.max_rel_error < 1e-7);
    }
}

TEST_CASE("spectral normalization: diag(3,1) oracle") {
    Tensor<double> w({2, 2}, {3.0, 0.0, 0.0, 1.0});
    SpectralNormState<double> st;
    st.power_iterations = 20;
    auto wn = spectral_normalize(w, st);
    CHECK(st.last_sigma == doctest::Approx(3.0).epsilon(1e-4));
    CHECK(svd_spectral_norm(wn) == doctest::Approx(1.0).epsilon(1e-4));
    // u stays unit-norm
    double un = 0;
    for (double v : st.u) un += v * v;
    CHECK(std::sqrt(un) == doctest::Approx(1.0).epsilon(1e-6));
}

TEST_CASE("spectral normalization: orthogonal weight is returned unchanged") {
    const double c = std::cos(0.7), s = std::sin(0.7);
    Tensor<double> w({2, 2}, {c, -s, s, c});
    SpectralNormState<double> st;
    st.power_iterations = 30;
    auto wn = spectral_normalize(w, st);
    for (std::size_t i = 0; i < 4; ++i) CHECK(wn.at(i) == doctest::Approx(w.at(i)).epsilon(1e-5));
}

TEST_CASE("spectral normalization: zero weight degenerates gracefully") {
    Tensor<double> w({3, 3}, std::vector<double>(9, 0.0));
    SpectralNormState<double> st;
    auto wn = spectral_normalize(w, st);
    CHECK(st.degenerate);
    for (std::size_t i = 0; i < 9; ++i) CHECK(wn.at(i) == 0.0);
}

TEST_CASE("spectral normalization: interleaved updates on random weight walks") {
    std::mt19937 rng(15);
    std::normal_distribution<double> step(0.0, 0.02);
    auto w = Tensor<double>::uniform({16, 16}, -0.5, 0.5, rng);
    SpectralNormState<double> st;  // one iteration per call, training style
    for (int iter = 0; iter < 200; ++iter) {
        auto wn = spectral_normalize(w, st);
        if (iter >= 20) {
            double sigma = svd_spectral_norm(wn);
            CHECK(sigma > 0.95);
            CHECK(sigma < 1.05);
        }
        for (auto& v : w.mutable_data()) v += step(rng);
    }
}

TEST_CASE("generator: output shapes for all scales") {
    std::mt19937 rng(16);
    for (std::size_t scale : {2, 4, 8}) {
        GeneratorConfig cfg;
        cfg.width = 8;
        cfg.num_blocks = 1;
        cfg.ca_ratio = 4;
        cfg.scale = scale;
        auto p = GeneratorParams<double>::make(cfg, rng);
        const std::size_t h = scale == 8 ? 4 : 16;  // keep the HWxHW attention map small
        auto lr = Tensor<double>::uniform({1, 1, h, h}, 0.0, 1.0, rng);
        auto sr = generator_forward(lr, p);
        CHECK(sr.shape() == Shape{1, 1, h * scale, h * scale});
    }
    GeneratorConfig bad;
    bad.scale = 3;
    CHECK_THROWS_AS(bad.validate(), ConfigError);
}

TEST_CASE("generator: -SA ablation ignores self-attention parameters") {
    std::mt19937 rng(17);
    GeneratorConfig cfg;
    cfg.width = 8;
    cfg.num_blocks = 1;
    cfg.ca_ratio = 4;
    cfg.use_sa = false;
    auto p = GeneratorParams<double>::make(cfg, rng);
    CHECK(!p.sa.has_value());

    GeneratorConfig full = cfg;
    full.use_sa = true;
    auto pf = GeneratorParams<double>::make(full, rng);
    CHECK(p.num_parameters() < pf.num_parameters());
}

TEST_CASE("generator: full-graph gradient check at 64-bit") {
    std::mt19937 rng(18);
    GeneratorConfig cfg;
    cfg.width = 8;
    cfg.num_blocks = 1;
    cfg.ca_ratio = 4;
    cfg.scale = 2;
    // direct fusion: the weighted denominator can pass near zero on signed
    // activations, where finite differences cannot track the true gradient
    // (the weighted path has its own check on positive inputs)
    cfg.fusion.mode = FusionMode::Direct;
    auto p = GeneratorParams<double>::make(cfg, rng);
    if (p.sa) p.sa->gamma.mutable_data()[0] = 0.2;
    auto lr = Tensor<double>::uniform({1, 1, 8, 8}, 0.0, 1.0, rng);
    ParamList<double> params;
    p.collect("generator", params);
    std::vector<Tensor<double>> inputs{lr};
    for (auto& np : params) inputs.push_back(np.tensor);
    auto res = gradcheck<double>(
        [&p](const std::vector<Tensor<double>>& in) { return mean(abs_square(generator_forward(in[0], p))); },
        inputs);
    CHECK(res.max_rel_error < 1e-7);
}

TEST_CASE("discriminator: outputs in (0,1), SN does not change shapes") {
    std::mt19937 rng(19);
    DiscriminatorConfig cfg;
    cfg.width = 8;
    for (bool sn : {false, true}) {
        cfg.sn_enabled = sn;
        auto p = DiscriminatorParams<double>::make(cfg, rng);
        auto img = Tensor<double>::uniform({3, 1, 16, 16}, 0.0, 1.0, rng);
        auto d = discriminator_forward(img, p);
        CHECK(d.shape() == Shape{3, 1});
        for (std::size_t i = 0; i < d.numel(); ++i) {
            CHECK(d.at(i) > 0.0);
            CHECK(d.at(i) < 1.0);
        }
    }
    auto p = DiscriminatorParams<double>::make(cfg, rng);
    auto bad = Tensor<double>::uniform({1, 2, 16, 16}, 0.0, 1.0, rng);
    CHECK_THROWS_AS(discriminator_forward(bad, p), DimensionError);
}

TEST_CASE("discriminator: gradient check (SN off so sigma is not perturbed)") {
    std::mt19937 rng(20);
    DiscriminatorConfig cfg;
    cfg.width = 8;
    cfg.sn_enabled = false;
    auto p = DiscriminatorParams<double>::make(cfg, rng);
    auto img = Tensor<double>::uniform({1, 1, 8, 8}, 0.0, 1.0, rng);
    ParamList<double> params;
    p.collect("d", params);
    std::vector<Tensor<double>> inputs{img};
    for (auto& np : params) inputs.push_back(np.tensor);
    auto res = gradcheck<double>(
        [&p](const std::vector<Tensor<double>>& in) { return mean(discriminator_forward(in[0], p)); }, inputs);
    CHECK(res.max_rel_error < 1e-7);
}

TEST_CASE("upsample_bicubic: constant image, shape, gradient") {
    std::mt19937 rng(21);
    auto c = Tensor<double>::full({1, 1, 4, 4}, 0.37);
    auto up = upsample_bicubic(c, 2);
    CHECK(up.shape() == Shape{1, 1, 8, 8});
    for (std::size_t i = 0; i < up.numel(); ++i) CHECK(up.at(i) == doctest::Approx(0.37).epsilon(1e-12));

    auto res = gradcheck<double>(
        [](const std::vector<Tensor<double>>& in) { return mean(abs_square(upsample_bicubic(in[0], 2))); },
        {Tensor<double>::uniform({1, 2, 4, 4}, -1.0, 1.0, rng)});
    CHECK(res.max_rel_error < 1e-7);
}
