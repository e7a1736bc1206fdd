#pragma once

// Alternating GAN training with Adam, configuration files, CSV logs,
// checkpointing, evaluation, and the ablation grid.

#include "fagan/blocks.hpp"
#include "fagan/dataset.hpp"
#include "fagan/losses.hpp"
#include "fagan/metrics.hpp"

#include <cmath>
#include <string>
#include <vector>

namespace fagan {

struct TrainConfig {
    double learning_rate = 1e-4;
    double adam_beta1 = 0.9;
    double adam_beta2 = 0.999;
    double adam_eps = 1e-8;
    std::size_t scale = 2;
    std::size_t iterations = 2000;
    std::size_t batch_size = 4;
    unsigned seed = 1;
    bool sn_enabled = true;
    std::size_t sn_power_iterations = 1;
    bool disable_sa = false;
    bool disable_ca = false;
    bool disable_lffb = false;
    FusionMode fusion_mode = FusionMode::Weighted;
    double alpha = 0.5;
    double beta = 0.5;
    std::size_t generator_width = 32;
    std::size_t num_blocks = 4;
    std::size_t discriminator_width = 32;
    std::size_t checkpoint_interval = 500;
    std::size_t val_interval = 100;
    FeatureMode feature_mode = FeatureMode::Identity;
    unsigned feature_seed = 2024;

    void validate() const;
    GeneratorConfig generator_config() const;
    DiscriminatorConfig discriminator_config() const;
};

// line-oriented `key = value` text; '#' starts a comment; unknown keys error
TrainConfig parse_config(const std::string& path);
TrainConfig parse_config_text(const std::string& text, const std::string& origin = "<config>");
std::string serialize_config(const TrainConfig& cfg);  // deterministic key order

// Adam first/second moments aligned with a ParamList's order.
template <typename T>
struct AdamState {
    std::vector<std::vector<T>> m, v;
    std::size_t step = 0;

    void init(const ParamList<T>& params) {
        m.clear();
        v.clear();
        for (const auto& p : params) {
            m.emplace_back(p.tensor.numel(), T(0));
            v.emplace_back(p.tensor.numel(), T(0));
        }
        step = 0;
    }
};

// standard bias-corrected Adam; gradients are read from the tensors' grad
// buffers, parameters updated in place
template <typename T>
void adam_step(ParamList<T>& params, AdamState<T>& state, const TrainConfig& cfg) {
    if (state.m.size() != params.size())
        throw ContractError("adam_step: state not initialized for this parameter list");
    ++state.step;
    const T b1 = static_cast<T>(cfg.adam_beta1), b2 = static_cast<T>(cfg.adam_beta2);
    const T bc1 = T(1) - static_cast<T>(std::pow(cfg.adam_beta1, static_cast<double>(state.step)));
    const T bc2 = T(1) - static_cast<T>(std::pow(cfg.adam_beta2, static_cast<double>(state.step)));
    const T lr = static_cast<T>(cfg.learning_rate), eps = static_cast<T>(cfg.adam_eps);
    for (std::size_t i = 0; i < params.size(); ++i) {
        auto& t = params[i].tensor;
        auto g = t.grad();
        auto d = t.mutable_data();
        if (state.m[i].size() != t.numel())
            throw ContractError("adam_step: moment shape mismatch for " + params[i].name);
        for (std::size_t j = 0; j < t.numel(); ++j) {
            if (!std::isfinite(static_cast<double>(g[j])))
                throw NumericError("adam_step: non-finite gradient in " + params[i].name);
            state.m[i][j] = b1 * state.m[i][j] + (T(1) - b1) * g[j];
            state.v[i][j] = b2 * state.v[i][j] + (T(1) - b2) * g[j] * g[j];
            d[j] -= lr * (state.m[i][j] / bc1) / (std::sqrt(state.v[i][j] / bc2) + eps);
        }
    }
}

struct TrainRow {
    std::size_t iter = 0;
    double g_loss = 0, d_loss = 0, content = 0, adversarial = 0;
};
struct ValRow {
    std::size_t iter = 0;
    double psnr = 0, ssim = 0;
};
struct TrainLog {
    std::vector<TrainRow> rows;
    std::vector<ValRow> vals;
};

void write_train_log(const std::string& path, const TrainLog& log);      // iter,g_loss,d_loss,content,adversarial
void write_val_log(const std::string& path, const TrainLog& log);       // iter,val_psnr,val_ssim

struct Checkpoint {
    TrainConfig cfg;
    std::size_t iteration = 0;
    GeneratorParams<float> generator;
    DiscriminatorParams<float> discriminator;
    AdamState<float> g_adam, d_adam;
};

// binary container: config text block, then named FATN tensor records for
// parameters, Adam moments, and spectral-norm power-iteration vectors
void save_checkpoint(const std::string& path, const Checkpoint& ck);
Checkpoint load_checkpoint(const std::string& path);

struct TrainResult {
    TrainLog log;
    Checkpoint checkpoint;
};

// Alternating optimization: per iteration one discriminator step on
// (HR, detached G(LR)) then one generator step on the combined loss.
// Writes train.csv / val.csv and periodic ckpt_NNNNNN.ckpt files to out_dir.
// Non-finite losses dump a final checkpoint and raise NumericError.
TrainResult train(const TrainConfig& cfg, const DatasetManifest& train_m, const DatasetManifest& val_m,
                  const std::string& out_dir);

// Runs the checkpointed generator on every manifest record (sorted by HR
// path) and reports PSNR/SSIM per pair plus FID over the sets.
MetricReport evaluate(const Checkpoint& ck, const DatasetManifest& manifest,
                      SsimMode mode = SsimMode::Windowed);

// same metrics for the bicubic-upscale baseline
MetricReport evaluate_bicubic(const DatasetManifest& manifest, const FeatureExtractor<double>& fx,
                              SsimMode mode = SsimMode::Windowed);

struct AblationRow {
    std::string label;
    std::size_t g_params = 0;
    double psnr = 0, ssim = 0, fid = 0;
};

// the three grids: 7 ablation rows, 2 fusion rows, 3 alpha/beta rows
std::vector<AblationRow> ablate(const TrainConfig& base, const DatasetManifest& train_m,
                                const DatasetManifest& val_m, const std::string& out_dir);
void write_ablation_csv(const std::string& path, const std::vector<AblationRow>& rows);

}  // namespace fagan
