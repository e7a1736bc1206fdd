#include "fagan/train.hpp"

#include "fagan/bicubic.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>

namespace fagan {

namespace fs = std::filesystem;

namespace {

// images enter the networks range-normalized to [0,1]
Tensor<float> batch_tensor(const std::vector<DatasetPair>& pairs, const std::vector<std::size_t>& idx,
                           bool lr_side) {
    const ImageBuffer& first = lr_side ? pairs[idx[0]].lr : pairs[idx[0]].hr;
    const std::size_t H = first.height, W = first.width;
    std::vector<float> data;
    data.reserve(idx.size() * H * W);
    for (std::size_t i : idx) {
        const ImageBuffer& img = lr_side ? pairs[i].lr : pairs[i].hr;
        if (img.height != H || img.width != W)
            throw ContractError("train: all images in a batch must share dimensions");
        for (double v : img.values) data.push_back(static_cast<float>(v / img.range));
    }
    return Tensor<float>({idx.size(), 1, H, W}, std::move(data));
}

Tensor<float> detach(const Tensor<float>& t) {
    return Tensor<float>(t.shape(), std::vector<float>(t.data().begin(), t.data().end()));
}

void zero_grads(ParamList<float>& params) {
    for (auto& p : params) p.tensor.zero_grad();
}

ImageBuffer sr_to_image(const Tensor<float>& sr, std::size_t sample, double range) {
    const std::size_t H = sr.dim(2), W = sr.dim(3);
    ImageBuffer img(H, W, 0.0, range);
    for (std::size_t i = 0; i < H * W; ++i) {
        const double v = static_cast<double>(sr.at(sample * H * W + i)) * range;
        img.values[i] = std::min(range, std::max(0.0, v));
    }
    return img;
}

ValRow validate_now(std::size_t iter, const GeneratorParams<float>& g,
                    const std::vector<DatasetPair>& val_pairs) {
    ValRow row;
    row.iter = iter;
    for (const auto& p : val_pairs) {
        Tensor<float> lr({1, 1, p.lr.height, p.lr.width}, [&] {
            std::vector<float> d;
            d.reserve(p.lr.values.size());
            for (double v : p.lr.values) d.push_back(static_cast<float>(v / p.lr.range));
            return d;
        }());
        auto sr = generator_forward(lr, g);
        auto img = sr_to_image(sr, 0, p.hr.range);
        row.psnr += psnr(p.hr, img);
        row.ssim += ssim(p.hr, img);
    }
    row.psnr /= static_cast<double>(val_pairs.size());
    row.ssim /= static_cast<double>(val_pairs.size());
    return row;
}

std::string ckpt_path(const std::string& out_dir, std::size_t iter) {
    char name[32];
    std::snprintf(name, sizeof(name), "ckpt_%06zu.ckpt", iter);
    return (fs::path(out_dir) / name).string();
}

}  // namespace

void write_train_log(const std::string& path, const TrainLog& log) {
    std::ofstream os(path);
    if (!os) throw IoError("write_train_log: cannot open " + path);
    os.precision(10);
    os << "iter,g_loss,d_loss,content,adversarial\n";
    for (const auto& r : log.rows)
        os << r.iter << "," << r.g_loss << "," << r.d_loss << "," << r.content << "," << r.adversarial
           << "\n";
    if (!os) throw IoError("write_train_log: write failure on " + path);
}

void write_val_log(const std::string& path, const TrainLog& log) {
    std::ofstream os(path);
    if (!os) throw IoError("write_val_log: cannot open " + path);
    os.precision(10);
    os << "iter,val_psnr,val_ssim\n";
    for (const auto& v : log.vals) os << v.iter << "," << v.psnr << "," << v.ssim << "\n";
    if (!os) throw IoError("write_val_log: write failure on " + path);
}

TrainResult train(const TrainConfig& cfg, const DatasetManifest& train_m, const DatasetManifest& val_m,
                  const std::string& out_dir) {
    cfg.validate();
    for (const auto& r : train_m.records)
        if (r.scale != cfg.scale) throw ConfigError("train: manifest scale differs from config scale");
    const auto train_pairs = load_dataset(train_m);
    const auto val_pairs = load_dataset(val_m);
    if (train_pairs.empty()) throw ContractError("train: empty training manifest");

    std::error_code ec;
    fs::create_directories(out_dir, ec);
    if (ec) throw IoError("train: cannot create " + out_dir + ": " + ec.message());

    TrainResult result;
    Checkpoint& ck = result.checkpoint;
    ck.cfg = cfg;
    std::mt19937 rng(cfg.seed);
    ck.generator = GeneratorParams<float>::make(cfg.generator_config(), rng);
    ck.discriminator = DiscriminatorParams<float>::make(cfg.discriminator_config(), rng);

    ParamList<float> g_params, d_params;
    ck.generator.collect("generator", g_params);
    ck.discriminator.collect("discriminator", d_params);
    ck.g_adam.init(g_params);
    ck.d_adam.init(d_params);

    FeatureExtractor<float> fx(cfg.feature_mode, cfg.feature_seed);
    std::mt19937 sampler(cfg.seed ^ 0x9e3779b9u);
    std::uniform_int_distribution<std::size_t> pick(0, train_pairs.size() - 1);

    for (std::size_t iter = 1; iter <= cfg.iterations; ++iter) {
        std::vector<std::size_t> idx(cfg.batch_size);
        for (auto& i : idx) i = pick(sampler);
        auto lr = batch_tensor(train_pairs, idx, true);
        auto hr = batch_tensor(train_pairs, idx, false);

        // one generator forward per iteration; the discriminator step sees a
        // detached copy so its gradients stop at the generator output
        auto sr = generator_forward(lr, ck.generator);

        auto d_real = discriminator_forward(hr, ck.discriminator);
        auto d_fake_det = discriminator_forward(detach(sr), ck.discriminator);
        auto d_loss = discriminator_loss(d_real, d_fake_det);
        zero_grads(d_params);
        d_loss.backward();
        adam_step(d_params, ck.d_adam, cfg);

        auto d_fake = discriminator_forward(sr, ck.discriminator);
        auto content = content_loss(sr, hr, fx);
        auto adversarial = adversarial_loss_g(d_fake, BatchReduction::Mean);
        auto g_loss = combined_loss_g(content, adversarial);
        zero_grads(g_params);
        g_loss.backward();
        adam_step(g_params, ck.g_adam, cfg);

        TrainRow row;
        row.iter = iter;
        row.g_loss = static_cast<double>(g_loss.item());
        row.d_loss = static_cast<double>(d_loss.item());
        row.content = static_cast<double>(content.item());
        row.adversarial = static_cast<double>(adversarial.item());
        if (!std::isfinite(row.g_loss) || !std::isfinite(row.d_loss)) {
            ck.iteration = iter;
            save_checkpoint(ckpt_path(out_dir, iter), ck);
            write_train_log((fs::path(out_dir) / "train.csv").string(), result.log);
            throw NumericError("train: non-finite loss at iteration " + std::to_string(iter) +
                               "; checkpoint dumped to " + ckpt_path(out_dir, iter));
        }
        result.log.rows.push_back(row);

        if (cfg.val_interval > 0 && (iter % cfg.val_interval == 0 || iter == cfg.iterations))
            result.log.vals.push_back(validate_now(iter, ck.generator, val_pairs));
        if (cfg.checkpoint_interval > 0 && iter % cfg.checkpoint_interval == 0) {
            ck.iteration = iter;
            save_checkpoint(ckpt_path(out_dir, iter), ck);
        }
    }

    ck.iteration = cfg.iterations;
    save_checkpoint(ckpt_path(out_dir, cfg.iterations), ck);
    write_train_log((fs::path(out_dir) / "train.csv").string(), result.log);
    write_val_log((fs::path(out_dir) / "val.csv").string(), result.log);
    return result;
}

namespace {

MetricReport evaluate_candidates(const DatasetManifest& manifest, const FeatureExtractor<double>& fx,
                                 SsimMode mode,
                                 const std::function<ImageBuffer(const DatasetPair&)>& candidate_of) {
    auto records = manifest.records;
    std::sort(records.begin(), records.end(),
              [](const DatasetRecord& a, const DatasetRecord& b) { return a.hr_path < b.hr_path; });
    DatasetManifest sorted{records, manifest.split, manifest.seed};
    auto pairs = load_dataset(sorted);
    std::vector<ImageBuffer> reference, candidate;
    std::vector<std::string> names;
    for (std::size_t i = 0; i < pairs.size(); ++i) {
        reference.push_back(pairs[i].hr);
        candidate.push_back(candidate_of(pairs[i]));
        names.push_back(fs::path(records[i].hr_path).filename().string());
    }
    return evaluate_pairs(reference, candidate, names, fx, mode);
}

}  // namespace

MetricReport evaluate(const Checkpoint& ck, const DatasetManifest& manifest, SsimMode mode) {
    for (const auto& r : manifest.records)
        if (r.scale != ck.cfg.scale)
            throw ConfigError("evaluate: checkpoint scale " + std::to_string(ck.cfg.scale) +
                              " does not match manifest scale " + std::to_string(r.scale));
    FeatureExtractor<double> fx(FeatureMode::RandomConv, ck.cfg.feature_seed);
    return evaluate_candidates(manifest, fx, mode, [&](const DatasetPair& p) {
        std::vector<float> d;
        d.reserve(p.lr.values.size());
        for (double v : p.lr.values) d.push_back(static_cast<float>(v / p.lr.range));
        Tensor<float> lr({1, 1, p.lr.height, p.lr.width}, std::move(d));
        auto sr = generator_forward(lr, ck.generator);
        return sr_to_image(sr, 0, p.hr.range);
    });
}

MetricReport evaluate_bicubic(const DatasetManifest& manifest, const FeatureExtractor<double>& fx,
                              SsimMode mode) {
    return evaluate_candidates(manifest, fx, mode, [](const DatasetPair& p) {
        return bicubic_resize(p.lr, p.hr.height, p.hr.width);
    });
}

std::vector<AblationRow> ablate(const TrainConfig& base, const DatasetManifest& train_m,
                                const DatasetManifest& val_m, const std::string& out_dir) {
    struct Variant {
        std::string label;
        std::function<void(TrainConfig&)> apply;
    };
    const std::vector<Variant> variants = {
        {"full", [](TrainConfig&) {}},
        {"-SA", [](TrainConfig& c) { c.disable_sa = true; }},
        {"-CA", [](TrainConfig& c) { c.disable_ca = true; }},
        {"-LFFB", [](TrainConfig& c) { c.disable_lffb = true; }},
        {"-SA-CA", [](TrainConfig& c) { c.disable_sa = c.disable_ca = true; }},
        {"-SA-LFFB", [](TrainConfig& c) { c.disable_sa = c.disable_lffb = true; }},
        {"-CA-LFFB", [](TrainConfig& c) { c.disable_ca = c.disable_lffb = true; }},
        {"fusion=direct", [](TrainConfig& c) { c.fusion_mode = FusionMode::Direct; }},
        {"fusion=weighted", [](TrainConfig& c) { c.fusion_mode = FusionMode::Weighted; }},
        {"alpha=0.4,beta=0.6", [](TrainConfig& c) { c.alpha = 0.4; c.beta = 0.6; }},
        {"alpha=0.5,beta=0.5", [](TrainConfig& c) { c.alpha = 0.5; c.beta = 0.5; }},
        {"alpha=0.6,beta=0.4", [](TrainConfig& c) { c.alpha = 0.6; c.beta = 0.4; }},
    };
    std::vector<AblationRow> rows;
    for (std::size_t i = 0; i < variants.size(); ++i) {
        TrainConfig cfg = base;
        variants[i].apply(cfg);
        cfg.validate();
        const std::string run_dir = (fs::path(out_dir) / ("run_" + std::to_string(i))).string();
        auto res = train(cfg, train_m, val_m, run_dir);
        auto rep = evaluate(res.checkpoint, val_m);
        AblationRow row;
        row.label = variants[i].label;
        row.g_params = res.checkpoint.generator.num_parameters();
        row.psnr = rep.mean_psnr;
        row.ssim = rep.mean_ssim;
        row.fid = rep.fid;
        rows.push_back(std::move(row));
    }
    return rows;
}

void write_ablation_csv(const std::string& path, const std::vector<AblationRow>& rows) {
    std::ofstream os(path);
    if (!os) throw IoError("write_ablation_csv: cannot open " + path);
    os.precision(10);
    os << "variant,g_params,psnr,ssim,fid\n";
    for (const auto& r : rows)
        os << r.label << "," << r.g_params << "," << r.psnr << "," << r.ssim << "," << r.fid << "\n";
    if (!os) throw IoError("write_ablation_csv: write failure on " + path);
}

}  // namespace fagan
