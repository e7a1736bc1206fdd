// Acceptance gate: eight criteria, one PASS/FAIL line each. Exit code is the
// number of failed criteria.

#include <Eigen/Dense>

#include "fagan/gradcheck.hpp"
#include "fagan/train.hpp"

#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <random>

using namespace fagan;
namespace fs = std::filesystem;

namespace {

struct Criterion {
    bool ok = true;
    std::vector<std::string> notes;
    void require(bool cond, const std::string& what) {
        if (!cond) {
            ok = false;
            notes.push_back(what);
        }
    }
};

std::string temp_dir(const char* tag) {
    auto p = fs::temp_directory_path() / (std::string("fagan_acceptance_") + tag);
    fs::remove_all(p);
    fs::create_directories(p);
    return p.string();
}

std::vector<char> slurp(const std::string& path) {
    std::ifstream is(path, std::ios::binary);
    return {std::istreambuf_iterator<char>(is), std::istreambuf_iterator<char>()};
}

double svd_norm(const Tensor<double>& w) {
    const auto rows = static_cast<Eigen::Index>(w.dim(0));
    const auto cols = static_cast<Eigen::Index>(w.numel() / w.dim(0));
    Eigen::MatrixXd m(rows, cols);
    for (Eigen::Index i = 0; i < rows; ++i)
        for (Eigen::Index j = 0; j < cols; ++j)
            m(i, j) = w.at(static_cast<std::size_t>(i * cols + j));
    return m.jacobiSvd().singularValues()(0);
}

// FD check on a random subset of the parameter tensors plus any extra inputs
template <typename F>
double subset_gradcheck(F&& f, ParamList<double>& params, std::vector<Tensor<double>> extra,
                        std::size_t take, std::mt19937& rng) {
    std::vector<std::size_t> order(params.size());
    for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
    std::shuffle(order.begin(), order.end(), rng);
    for (std::size_t i = 0; i < std::min(take, order.size()); ++i)
        extra.push_back(params[order[i]].tensor);
    return gradcheck<double>(f, extra).max_rel_error;
}

constexpr int kInstances = 20;
constexpr double kGradTol = 1e-7;

// ---------------------------------------------------------------- criterion 1

Criterion criterion_gradients() {
    Criterion c;
    std::mt19937 rng(101);
    double worst = 0;
    auto track = [&](double err, const char* what) {
        worst = std::max(worst, err);
        c.require(err < kGradTol, std::string(what) + " rel error " + std::to_string(err));
    };

    for (int t = 0; t < kInstances; ++t) {
        // elementwise suite, bounded away from non-smooth points
        auto x = Tensor<double>::uniform({2, 3}, 0.2, 1.5, rng);
        auto y = Tensor<double>::uniform({2, 3}, 0.2, 1.5, rng);
        auto xn = Tensor<double>::uniform({2, 3}, -1.5, -0.2, rng);
        track(gradcheck<double>([](const std::vector<Tensor<double>>& in) {
                  return sum(relu(in[0]));
              }, {x}).max_rel_error, "relu");
        track(gradcheck<double>([](const std::vector<Tensor<double>>& in) {
                  return sum(leaky_relu(in[0], 0.2));
              }, {xn}).max_rel_error, "leaky_relu");
        track(gradcheck<double>([](const std::vector<Tensor<double>>& in) {
                  return sum(sigmoid(in[0]));
              }, {x}).max_rel_error, "sigmoid");
        track(gradcheck<double>([](const std::vector<Tensor<double>>& in) {
                  return mean(abs_square(add(in[0], in[1])));
              }, {x, y}).max_rel_error, "add/abs_square/mean");
        track(gradcheck<double>([](const std::vector<Tensor<double>>& in) {
                  return sum(mul(sub(in[0], scalar_mul(in[1], 0.3)), in[1]));
              }, {x, y}).max_rel_error, "sub/mul/scalar_mul/sum");
        track(gradcheck<double>([](const std::vector<Tensor<double>>& in) {
                  return sum(log(in[0]));
              }, {x}).max_rel_error, "log");

        // conv2d + pooling heads
        auto ci = Tensor<double>::uniform({1, 2, 5, 5}, -1.0, 1.0, rng);
        auto cw = Tensor<double>::uniform({3, 2, 3, 3}, -0.5, 0.5, rng);
        auto cb = Tensor<double>::uniform({3}, -0.5, 0.5, rng);
        track(gradcheck<double>([](const std::vector<Tensor<double>>& in) {
                  return sum(abs_square(conv2d(in[0], in[1], in[2], 1, 1)));
              }, {ci, cw, cb}).max_rel_error, "conv2d");
        track(gradcheck<double>([](const std::vector<Tensor<double>>& in) {
                  return sum(abs_square(global_avg_pool(in[0])));
              }, {ci}).max_rel_error, "global_avg_pool");
        track(gradcheck<double>([](const std::vector<Tensor<double>>& in) {
                  return sum(abs_square(pixel_shuffle(in[0], 2)));
              }, {Tensor<double>::uniform({1, 4, 2, 2}, -1.0, 1.0, rng)}).max_rel_error,
              "pixel_shuffle");

        // matmul / softmax / fully connected
        auto ma = Tensor<double>::uniform({4, 3}, -1.0, 1.0, rng);
        auto mb = Tensor<double>::uniform({3, 5}, -1.0, 1.0, rng);
        track(gradcheck<double>([](const std::vector<Tensor<double>>& in) {
                  return sum(abs_square(matmul(in[0], in[1])));
              }, {ma, mb}).max_rel_error, "matmul");
        track(gradcheck<double>([](const std::vector<Tensor<double>>& in) {
                  return sum(abs_square(softmax(in[0], 1)));
              }, {Tensor<double>::uniform({1, 6}, -2.0, 2.0, rng)}).max_rel_error, "softmax");
        auto fw = Tensor<double>::uniform({3, 4}, -1.0, 1.0, rng);
        auto fb = Tensor<double>::uniform({4}, -0.5, 0.5, rng);
        track(gradcheck<double>([](const std::vector<Tensor<double>>& in) {
                  return sum(abs_square(fully_connected(in[0], in[1], in[2])));
              }, {ma, fw, fb}).max_rel_error, "fully_connected");
    }

    // composite blocks; FD probes the input plus a random parameter subset
    for (int t = 0; t < kInstances; ++t) {
        {
            auto p = LFFBParams<double>::make(2, rng);
            auto x = Tensor<double>::uniform({1, 2, 4, 4}, -1.0, 1.0, rng);
            ParamList<double> params;
            p.collect("lffb", params);
            track(subset_gradcheck([&](const std::vector<Tensor<double>>&) {
                      return sum(abs_square(lffb_forward(x, p)));
                  }, params, {x}, 3, rng), "lffb");
        }
        {
            auto p = ChannelAttentionParams<double>::make(8, 4, rng);
            auto x = Tensor<double>::uniform({1, 8, 3, 3}, -1.0, 1.0, rng);
            ParamList<double> params;
            p.collect("ca", params);
            track(subset_gradcheck([&](const std::vector<Tensor<double>>&) {
                      return sum(abs_square(channel_attention_forward(x, p)));
                  }, params, {x}, 4, rng), "channel_attention");
        }
        {
            auto p = SelfAttentionParams<double>::make(8, rng);
            p.gamma.mutable_data()[0] = 0.3;
            auto x = Tensor<double>::uniform({1, 8, 3, 3}, -1.0, 1.0, rng);
            ParamList<double> params;
            p.collect("sa", params);
            track(subset_gradcheck([&](const std::vector<Tensor<double>>&) {
                      return sum(abs_square(self_attention_forward(x, p)));
                  }, params, {x}, 4, rng), "self_attention");
        }
        {
            auto r = Tensor<double>::uniform({1, 2, 3, 3}, 0.5, 1.5, rng);
            auto y = Tensor<double>::uniform({1, 2, 3, 3}, 0.5, 1.5, rng);
            FusionConfig direct{FusionMode::Direct, 0.4, 0.6};
            FusionConfig weighted{FusionMode::Weighted, 0.5, 0.5};
            track(gradcheck<double>([&](const std::vector<Tensor<double>>& in) {
                      return sum(abs_square(fuse(in[0], in[1], direct)));
                  }, {r, y}).max_rel_error, "fuse_direct");
            track(gradcheck<double>([&](const std::vector<Tensor<double>>& in) {
                      return sum(abs_square(fuse(in[0], in[1], weighted)));
                  }, {r, y}).max_rel_error, "fuse_weighted");
        }
        {
            GeneratorConfig cfg;
            cfg.width = 8;
            cfg.num_blocks = 1;
            cfg.ca_ratio = 4;
            cfg.fusion.mode = FusionMode::Direct;
            auto g = GeneratorParams<double>::make(cfg, rng);
            auto lr = Tensor<double>::uniform({1, 1, 3, 3}, 0.0, 1.0, rng);
            ParamList<double> params;
            g.collect("g", params);
            track(subset_gradcheck([&](const std::vector<Tensor<double>>&) {
                      return sum(abs_square(generator_forward(lr, g)));
                  }, params, {lr}, 3, rng), "generator");
        }
        {
            DiscriminatorConfig cfg;
            cfg.width = 8;
            cfg.sn_enabled = false;
            auto d = DiscriminatorParams<double>::make(cfg, rng);
            auto x = Tensor<double>::uniform({1, 1, 8, 8}, 0.0, 1.0, rng);
            ParamList<double> params;
            d.collect("d", params);
            track(subset_gradcheck([&](const std::vector<Tensor<double>>&) {
                      return sum(abs_square(discriminator_forward(x, d)));
                  }, params, {x}, 3, rng), "discriminator");
        }
        {
            // losses through sigmoid outputs and a frozen feature extractor
            auto lr_logit = Tensor<double>::uniform({3, 1}, -2.0, 2.0, rng);
            auto lf_logit = Tensor<double>::uniform({3, 1}, -2.0, 2.0, rng);
            track(gradcheck<double>([](const std::vector<Tensor<double>>& in) {
                      return discriminator_loss(sigmoid(in[0]), sigmoid(in[1]));
                  }, {lr_logit, lf_logit}).max_rel_error, "discriminator_loss");
            track(gradcheck<double>([](const std::vector<Tensor<double>>& in) {
                      return adversarial_loss_g(sigmoid(in[0]), BatchReduction::Mean);
                  }, {lf_logit}).max_rel_error, "adversarial_loss");
            FeatureExtractor<double> fx(FeatureMode::RandomConv, 17u + static_cast<unsigned>(t));
            auto sr = Tensor<double>::uniform({1, 1, 8, 8}, 0.0, 1.0, rng);
            auto hr = Tensor<double>::uniform({1, 1, 8, 8}, 0.0, 1.0, rng);
            track(gradcheck<double>([&](const std::vector<Tensor<double>>& in) {
                      return combined_loss_g(content_loss(in[0], hr, fx),
                                             adversarial_loss_g(sigmoid(mean(in[0]))));
                  }, {sr}).max_rel_error, "combined_loss");
        }
    }
    c.notes.insert(c.notes.begin(), "worst rel error " + std::to_string(worst));
    return c;
}

// ---------------------------------------------------------------- criterion 2

Criterion criterion_attention() {
    Criterion c;
    std::mt19937 rng(202);
    for (int t = 0; t < 20; ++t) {
        auto p = SelfAttentionParams<double>::make(8, rng);  // gamma starts at 0
        auto x = Tensor<double>::uniform({2, 8, 4, 4}, -2.0, 2.0, rng);
        auto y = self_attention_forward(x, p);
        bool exact = y.shape() == x.shape();
        for (std::size_t i = 0; exact && i < x.numel(); ++i) exact = (y.at(i) == x.at(i));
        c.require(exact, "gamma=0 self-attention is not an exact identity");
    }
    for (int t = 0; t < 100; ++t) {
        auto p = SelfAttentionParams<double>::make(8, rng);
        auto x = Tensor<double>::uniform({1, 8, 3, 3}, -2.0, 2.0, rng);
        auto map = self_attention_map(x, p, 0);
        const std::size_t hw = map.dim(0);
        for (std::size_t r = 0; r < hw; ++r) {
            double s = 0;
            for (std::size_t q = 0; q < hw; ++q) s += map.at(r * hw + q);
            c.require(std::abs(s - 1.0) < 1e-6, "attention row does not sum to 1");
        }
    }
    for (int t = 0; t < 100; ++t) {
        auto p = ChannelAttentionParams<double>::make(8, 4, rng);
        auto x = Tensor<double>::uniform({1, 8, 4, 4}, -2.0, 2.0, rng);
        auto s = channel_attention_scales(x, p);
        for (std::size_t i = 0; i < s.numel(); ++i)
            c.require(s.at(i) > 0.0 && s.at(i) < 1.0, "channel-attention scale outside (0,1)");
    }
    return c;
}

// ---------------------------------------------------------------- criterion 3

Criterion criterion_spectral_norm() {
    Criterion c;
    std::mt19937 rng(303);
    double worst_sigma = 0, worst_unit = 0;
    for (int t = 0; t < 20; ++t) {
        auto w = Tensor<double>::uniform({64, 64}, -1.0, 1.0, rng);
        SpectralNormState<double> st;
        st.power_iterations = 500;
        auto wn = spectral_normalize(w, st);
        const double svd_sigma = svd_norm(w);
        worst_sigma = std::max(worst_sigma, std::abs(st.last_sigma - svd_sigma));
        c.require(std::abs(st.last_sigma - svd_sigma) < 1e-4, "power-iteration sigma off oracle");
        const double unit = svd_norm(wn);
        worst_unit = std::max(worst_unit, std::abs(unit - 1.0));
        c.require(std::abs(unit - 1.0) < 1e-4, "normalized weight spectral norm not 1");
    }
    c.notes.insert(c.notes.begin(), "max |sigma error| " + std::to_string(worst_sigma) +
                                        ", max |norm-1| " + std::to_string(worst_unit));
    return c;
}

// ---------------------------------------------------------------- criterion 4

Criterion criterion_metrics() {
    Criterion c;
    ImageBuffer a(16, 16, 100.0), b(16, 16, 101.0);
    c.require(std::abs(psnr(a, b) - 48.1308) < 1e-4, "unit-offset PSNR mismatch");

    std::mt19937 rng(404);
    std::uniform_real_distribution<double> u(0.0, 255.0);
    ImageBuffer x(16, 16);
    for (auto& v : x.values) v = u(rng);
    c.require(ssim(x, x, SsimMode::Global) == 1.0, "SSIM(x,x) global != 1");
    c.require(ssim(x, x, SsimMode::Windowed) == 1.0, "SSIM(x,x) windowed != 1");

    const std::size_t d = 5;
    GaussianStats s0;
    s0.mean.assign(d, 0.0);
    s0.cov.assign(d * d, 0.0);
    std::uniform_real_distribution<double> uc(-1.0, 1.0);
    std::vector<double> bmat(d * d);
    for (auto& v : bmat) v = uc(rng);
    for (std::size_t i = 0; i < d; ++i)
        for (std::size_t j = 0; j < d; ++j) {
            double acc = 0;
            for (std::size_t k = 0; k < d; ++k) acc += bmat[i * d + k] * bmat[j * d + k];
            s0.cov[i * d + j] = acc;
        }
    s0.n = 10;
    c.require(std::abs(fid(s0, s0)) < 1e-8, "FID(a,a) not ~ 0");

    GaussianStats u0, u1;
    u0.mean.assign(d, 0.0);
    u1.mean = {1.0, -0.5, 0.25, 2.0, 0.0};
    u0.cov.assign(d * d, 0.0);
    for (std::size_t i = 0; i < d; ++i) u0.cov[i * d + i] = 1.0;
    u1.cov = u0.cov;
    u0.n = u1.n = 10;
    double m2 = 0;
    for (double v : u1.mean) m2 += v * v;
    c.require(std::abs(fid(u0, u1) - m2) < 1e-6, "mean-shift FID != ||m||^2");

    for (std::size_t dim : {2u, 16u, 64u}) {
        std::vector<double> bb(dim * dim), psd(dim * dim, 0.0);
        for (auto& v : bb) v = uc(rng);
        for (std::size_t i = 0; i < dim; ++i)
            for (std::size_t j = 0; j < dim; ++j) {
                double acc = 0;
                for (std::size_t k = 0; k < dim; ++k) acc += bb[i * dim + k] * bb[j * dim + k];
                psd[i * dim + j] = acc + (i == j ? 1e-9 : 0.0);
            }
        auto r = psd_sqrt(psd, dim);
        double num = 0, den = 0;
        for (std::size_t i = 0; i < dim; ++i)
            for (std::size_t j = 0; j < dim; ++j) {
                double acc = 0;
                for (std::size_t k = 0; k < dim; ++k) acc += r[i * dim + k] * r[k * dim + j];
                num += (acc - psd[i * dim + j]) * (acc - psd[i * dim + j]);
                den += psd[i * dim + j] * psd[i * dim + j];
            }
        c.require(std::sqrt(num / den) < 1e-8,
                  "matrix-sqrt reconstruction above 1e-8 at D=" + std::to_string(dim));
    }
    return c;
}

// ---------------------------------------------------------------- criterion 5

Criterion criterion_fusion() {
    Criterion c;
    std::mt19937 rng(505);
    for (int t = 0; t < 20; ++t) {
        auto x = Tensor<double>::uniform({1, 2, 3, 3}, 0.1, 2.0, rng);
        FusionConfig direct{FusionMode::Direct, 0.5, 0.5};
        auto fd = fuse(x, x, direct);
        for (std::size_t i = 0; i < x.numel(); ++i)
            c.require(std::abs(fd.at(i) - x.at(i)) < 1e-12, "direct fuse not identity");

        FusionConfig weighted{FusionMode::Weighted, 0.5, 0.5};
        auto fw = fuse(x, x, weighted);
        for (std::size_t i = 0; i < x.numel(); ++i)
            c.require(std::abs(fw.at(i) - 0.5 * x.at(i)) < 1e-7, "weighted fuse(x,x) != 0.5x");

        // positive homogeneity: fuse(cR, cY) = c fuse(R, Y) within 1e-5 proportional
        auto r = Tensor<double>::uniform({1, 2, 3, 3}, 0.1, 2.0, rng);
        auto y = Tensor<double>::uniform({1, 2, 3, 3}, 0.1, 2.0, rng);
        const double k = 2.7;
        auto base = fuse(r, y, weighted);
        auto scaled = fuse(scalar_mul(r, k), scalar_mul(y, k), weighted);
        for (std::size_t i = 0; i < base.numel(); ++i)
            c.require(std::abs(scaled.at(i) - k * base.at(i)) < 1e-5 * std::abs(k * base.at(i)) + 1e-12,
                      "weighted fuse not positively homogeneous");
    }
    return c;
}

// ---------------------------------------------------------------- criterion 6

std::string acceptance_train_config(bool sn) {
    std::string cfg;
    cfg += "iterations = 500\n";
    cfg += "generator_width = 8\n";
    cfg += "num_blocks = 2\n";
    cfg += "discriminator_width = 8\n";
    cfg += "batch_size = 1\n";
    cfg += "checkpoint_interval = 500\n";
    cfg += "val_interval = 100\n";
    cfg += "seed = 33\n";
    cfg += "learning_rate = 0.0005\n";
    if (!sn) cfg += "sn_enabled = false\n";
    return cfg;
}

Criterion criterion_training() {
    Criterion c;
    const auto data_dir = temp_dir("train_data");
    auto ds = build_dataset(16, 4, 2, 33, data_dir, 64);

    auto cfg_sn = parse_config_text(acceptance_train_config(true));
    auto res_sn = train(cfg_sn, ds.train, ds.val, temp_dir("train_sn"));
    c.require(res_sn.log.rows.size() == 500, "run did not complete 500 iterations");
    for (const auto& r : res_sn.log.rows)
        if (!std::isfinite(r.g_loss) || !std::isfinite(r.d_loss)) {
            c.require(false, "non-finite loss logged");
            break;
        }

    FeatureExtractor<double> fx(FeatureMode::RandomConv, 2024);
    const double bicubic_psnr = evaluate_bicubic(ds.val, fx).mean_psnr;
    const double model_psnr = res_sn.log.vals.back().psnr;
    c.notes.push_back("model " + std::to_string(model_psnr) + " dB vs bicubic " +
                      std::to_string(bicubic_psnr) + " dB");
    c.require(model_psnr >= bicubic_psnr + 0.5,
              "validation PSNR does not beat bicubic by 0.5 dB");

    auto cfg_nosn = parse_config_text(acceptance_train_config(false));
    auto res_nosn = train(cfg_nosn, ds.train, ds.val, temp_dir("train_nosn"));
    auto tail_std = [](const TrainLog& log) {
        double m = 0;
        for (std::size_t i = 400; i < 500; ++i) m += log.rows[i].g_loss;
        m /= 100.0;
        double v = 0;
        for (std::size_t i = 400; i < 500; ++i)
            v += (log.rows[i].g_loss - m) * (log.rows[i].g_loss - m);
        return std::sqrt(v / 100.0);
    };
    const double sd_sn = tail_std(res_sn.log), sd_nosn = tail_std(res_nosn.log);
    c.notes.push_back("g_loss tail std: SN " + std::to_string(sd_sn) + " vs no-SN " +
                      std::to_string(sd_nosn));
    c.require(sd_sn < sd_nosn, "SN did not reduce generator-loss spread");
    return c;
}

// ---------------------------------------------------------------- criterion 7

Criterion criterion_ablation() {
    Criterion c;
    const auto data_dir = temp_dir("abl_data");
    auto ds = build_dataset(2, 2, 2, 7, data_dir, 32);
    TrainConfig cfg;
    cfg.iterations = 1;
    cfg.batch_size = 1;
    cfg.generator_width = 8;
    cfg.num_blocks = 1;
    cfg.discriminator_width = 8;
    cfg.checkpoint_interval = 0;
    cfg.val_interval = 0;
    cfg.seed = 7;

    const auto out1 = temp_dir("abl_run1");
    const auto out2 = temp_dir("abl_run2");
    auto rows1 = ablate(cfg, ds.train, ds.val, out1);
    auto rows2 = ablate(cfg, ds.train, ds.val, out2);
    c.require(rows1.size() == 12, "expected 7 + 2 + 3 grid rows");
    if (rows1.size() == 12) {
        c.require(rows1[0].label == "full" && rows1[1].label == "-SA", "grid row order unexpected");
        c.require(rows1[1].g_params < rows1[0].g_params, "-SA did not shrink the generator");
    }
    write_ablation_csv(out1 + "/ablation.csv", rows1);
    write_ablation_csv(out2 + "/ablation.csv", rows2);
    c.require(!slurp(out1 + "/ablation.csv").empty() &&
                  slurp(out1 + "/ablation.csv") == slurp(out2 + "/ablation.csv"),
              "ablation CSV not byte-reproducible");
    return c;
}

// ---------------------------------------------------------------- criterion 8

Criterion criterion_determinism() {
    Criterion c;
    const auto data_dir = temp_dir("det_data");
    auto ds = build_dataset(2, 2, 2, 9, data_dir, 32);
    TrainConfig cfg;
    cfg.iterations = 3;
    cfg.batch_size = 1;
    cfg.generator_width = 8;
    cfg.num_blocks = 1;
    cfg.discriminator_width = 8;
    cfg.checkpoint_interval = 0;
    cfg.val_interval = 3;
    cfg.seed = 9;

    const auto out1 = temp_dir("det_run1");
    const auto out2 = temp_dir("det_run2");
    auto res1 = train(cfg, ds.train, ds.val, out1);
    train(cfg, ds.train, ds.val, out2);
    c.require(!slurp(out1 + "/train.csv").empty() &&
                  slurp(out1 + "/train.csv") == slurp(out2 + "/train.csv"),
              "training logs differ between identical runs");
    c.require(slurp(out1 + "/ckpt_000003.ckpt") == slurp(out2 + "/ckpt_000003.ckpt"),
              "checkpoints differ between identical runs");

    auto loaded = load_checkpoint(out1 + "/ckpt_000003.ckpt");
    std::mt19937 rng(1);
    auto probe = Tensor<float>::uniform({1, 1, 16, 16}, 0.0f, 1.0f, rng);
    auto y1 = generator_forward(probe, res1.checkpoint.generator);
    auto y2 = generator_forward(probe, loaded.generator);
    bool bitwise = y1.shape() == y2.shape();
    for (std::size_t i = 0; bitwise && i < y1.numel(); ++i) bitwise = (y1.at(i) == y2.at(i));
    c.require(bitwise, "checkpoint round-trip changed generator outputs");
    return c;
}

int report(int index, const char* label, Criterion (*fn)()) {
    const auto t0 = std::chrono::steady_clock::now();
    Criterion c;
    try {
        c = fn();
    } catch (const std::exception& e) {
        c.ok = false;
        c.notes.push_back(std::string("exception: ") + e.what());
    }
    const double secs =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    std::printf("%s criterion %d (%s) [%.1fs]", c.ok ? "PASS" : "FAIL", index, label, secs);
    for (const auto& n : c.notes) std::printf("  | %s", n.c_str());
    std::printf("\n");
    std::fflush(stdout);
    return c.ok ? 0 : 1;
}

}  // namespace

int main() {
    int failures = 0;
    failures += report(1, "gradient oracle suite", criterion_gradients);
    failures += report(2, "attention invariants", criterion_attention);
    failures += report(3, "spectral normalization vs SVD oracle", criterion_spectral_norm);
    failures += report(4, "metric oracles", criterion_metrics);
    failures += report(5, "fusion operators", criterion_fusion);
    failures += report(6, "end-to-end toy training", criterion_training);
    failures += report(7, "ablation harness", criterion_ablation);
    failures += report(8, "determinism and persistence", criterion_determinism);
    if (failures == 0)
        std::printf("acceptance: all 8 criteria passed\n");
    else
        std::printf("acceptance: %d criteria FAILED\n", failures);
    return failures;
}
