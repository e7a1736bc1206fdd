// Command-line front end: train / eval / degrade / metrics / ablate /
// gradcheck / synth.

#include <CLI11.hpp>

#include "fagan/bicubic.hpp"
#include "fagan/gradcheck.hpp"
#include "fagan/phantom.hpp"
#include "fagan/train.hpp"

#include <algorithm>
#include <filesystem>
#include <iostream>

namespace fs = std::filesystem;
using namespace fagan;

namespace {

ImageBuffer read_image_any(const std::string& path) {
    if (fs::path(path).extension() == ".pgm") return read_pgm(path);
    return read_image_fatn(path);
}

std::vector<std::string> list_images(const std::string& dir) {
    std::vector<std::string> out;
    for (const auto& e : fs::directory_iterator(dir)) {
        const auto ext = e.path().extension();
        if (ext == ".pgm" || ext == ".fatn") out.push_back(e.path().string());
    }
    std::sort(out.begin(), out.end());
    return out;
}

int cmd_train(const std::string& config, const std::string& data, const std::string& val,
              const std::string& out) {
    const TrainConfig cfg = config.empty() ? TrainConfig{} : parse_config(config);
    const auto train_m = read_manifest(data);
    const std::string val_path =
        val.empty() ? (fs::path(data).parent_path() / "val.manifest").string() : val;
    const auto val_m = read_manifest(val_path);
    auto res = train(cfg, train_m, val_m, out);
    const auto& last = res.log.rows.back();
    std::cout << "finished " << last.iter << " iterations; g_loss " << last.g_loss << ", d_loss "
              << last.d_loss << "\n";
    if (!res.log.vals.empty())
        std::cout << "final validation PSNR " << res.log.vals.back().psnr << " dB, SSIM "
                  << res.log.vals.back().ssim << "\n";
    std::cout << "logs and checkpoints in " << out << "\n";
    return 0;
}

int cmd_eval(const std::string& ckpt, const std::string& data, const std::string& out) {
    auto ck = load_checkpoint(ckpt);
    auto rep = evaluate(ck, read_manifest(data));
    write_metric_csv(out, rep);
    std::cout << "mean PSNR " << rep.mean_psnr << " dB, mean SSIM " << rep.mean_ssim << ", FID "
              << rep.fid << "\n";
    std::cout << "report written to " << out << "\n";
    return 0;
}

int cmd_degrade(const std::string& input, std::size_t scale, const std::string& out) {
    std::vector<std::string> files =
        fs::is_directory(input) ? list_images(input) : std::vector<std::string>{input};
    if (files.empty()) throw IoError("degrade: no .pgm or .fatn images in " + input);
    fs::create_directories(out);
    DatasetManifest m;
    m.split = "test";
    for (const auto& f : files) {
        auto hr = read_image_any(f);
        if (hr.height % scale != 0 || hr.width % scale != 0)
            throw ContractError("degrade: dimensions of " + f + " not divisible by scale");
        auto lr = bicubic_resize(hr, hr.height / scale, hr.width / scale);
        const auto stem = fs::path(f).stem().string();
        DatasetRecord r;
        r.hr_path = (fs::path(out) / (stem + "_hr.fatn")).string();
        r.lr_path = (fs::path(out) / (stem + "_lr.fatn")).string();
        r.scale = scale;
        write_image_fatn(r.hr_path, hr);
        write_image_fatn(r.lr_path, lr);
        write_pgm((fs::path(out) / (stem + "_lr.pgm")).string(), lr);
        m.records.push_back(std::move(r));
    }
    const auto manifest_path = (fs::path(out) / "degraded.manifest").string();
    write_manifest(manifest_path, m);
    std::cout << files.size() << " image(s) degraded; manifest " << manifest_path << "\n";
    return 0;
}

int cmd_metrics(const std::string& reference, const std::string& candidate, const std::string& out) {
    auto ref_files = list_images(reference);
    auto cand_files = list_images(candidate);
    if (ref_files.size() != cand_files.size() || ref_files.empty())
        throw ContractError("metrics: directories must contain the same nonzero number of images");
    std::vector<ImageBuffer> ref, cand;
    std::vector<std::string> names;
    for (std::size_t i = 0; i < ref_files.size(); ++i) {
        ref.push_back(read_image_any(ref_files[i]));
        cand.push_back(read_image_any(cand_files[i]));
        names.push_back(fs::path(ref_files[i]).filename().string());
    }
    FeatureExtractor<double> fx(FeatureMode::RandomConv, 2024);
    auto rep = evaluate_pairs(ref, cand, names, fx);
    write_metric_csv(out, rep);
    std::cout << "mean PSNR " << rep.mean_psnr << " dB, mean SSIM " << rep.mean_ssim << ", FID "
              << rep.fid << "\n";
    return 0;
}

int cmd_ablate(const std::string& config, const std::string& data, const std::string& val,
               const std::string& out) {
    const TrainConfig cfg = config.empty() ? TrainConfig{} : parse_config(config);
    const auto train_m = read_manifest(data);
    const std::string val_path =
        val.empty() ? (fs::path(data).parent_path() / "val.manifest").string() : val;
    auto rows = ablate(cfg, train_m, read_manifest(val_path), out);
    const auto csv = (fs::path(out) / "ablation.csv").string();
    write_ablation_csv(csv, rows);
    for (const auto& r : rows)
        std::cout << r.label << ": params " << r.g_params << ", PSNR " << r.psnr << ", SSIM " << r.ssim
                  << ", FID " << r.fid << "\n";
    std::cout << "table written to " << csv << "\n";
    return 0;
}

int cmd_synth(std::size_t n_train, std::size_t n_val, std::size_t scale, unsigned seed,
              std::size_t size, const std::string& out) {
    auto build = build_dataset(n_train, n_val, scale, seed, out, size);
    std::cout << build.train.records.size() << " training and " << build.val.records.size()
              << " validation pairs in " << out << "\n";
    return 0;
}

// quick finite-difference battery, one line per check
int cmd_gradcheck(const std::string& module) {
    struct Check {
        std::string module;
        std::string name;
        std::function<double()> run;
    };
    std::mt19937 rng(2024);
    std::vector<Check> checks;

    checks.push_back({"tensor", "conv2d", [&] {
        auto x = Tensor<double>::uniform({1, 2, 5, 5}, -1.0, 1.0, rng);
        auto w = Tensor<double>::uniform({3, 2, 3, 3}, -0.5, 0.5, rng);
        auto b = Tensor<double>::uniform({3}, -0.5, 0.5, rng);
        return gradcheck<double>(
                   [](const std::vector<Tensor<double>>& in) {
                       return sum(abs_square(conv2d(in[0], in[1], in[2], 1, 1)));
                   },
                   {x, w, b})
            .max_rel_error;
    }});
    checks.push_back({"tensor", "matmul_softmax", [&] {
        auto a = Tensor<double>::uniform({4, 3}, -1.0, 1.0, rng);
        auto b = Tensor<double>::uniform({3, 5}, -1.0, 1.0, rng);
        return gradcheck<double>(
                   [](const std::vector<Tensor<double>>& in) {
                       return sum(abs_square(softmax(matmul(in[0], in[1]), 1)));
                   },
                   {a, b})
            .max_rel_error;
    }});
    checks.push_back({"blocks", "lffb", [&] {
        auto p = LFFBParams<double>::make(4, rng);
        auto x = Tensor<double>::uniform({1, 4, 5, 5}, -1.0, 1.0, rng);
        ParamList<double> params{{"x", x}};
        p.collect("lffb", params);
        std::vector<Tensor<double>> inputs;
        for (auto& np : params) inputs.push_back(np.tensor);
        return gradcheck<double>(
                   [&](const std::vector<Tensor<double>>&) { return sum(abs_square(lffb_forward(x, p))); },
                   inputs)
            .max_rel_error;
    }});
    checks.push_back({"blocks", "generator", [&] {
        GeneratorConfig cfg;
        cfg.width = 8;
        cfg.num_blocks = 1;
        cfg.ca_ratio = 4;
        cfg.fusion.mode = FusionMode::Direct;
        auto g = GeneratorParams<double>::make(cfg, rng);
        auto lr = Tensor<double>::uniform({1, 1, 4, 4}, 0.0, 1.0, rng);
        ParamList<double> params;
        g.collect("g", params);
        std::vector<Tensor<double>> inputs;
        for (auto& np : params) inputs.push_back(np.tensor);
        return gradcheck<double>(
                   [&](const std::vector<Tensor<double>>&) {
                       return sum(abs_square(generator_forward(lr, g)));
                   },
                   inputs)
            .max_rel_error;
    }});
    checks.push_back({"losses", "combined", [&] {
        GeneratorConfig gc;
        gc.width = 8;
        gc.num_blocks = 1;
        gc.ca_ratio = 4;
        gc.fusion.mode = FusionMode::Direct;
        auto g = GeneratorParams<double>::make(gc, rng);
        DiscriminatorConfig dc;
        dc.width = 8;
        dc.sn_enabled = false;
        auto d = DiscriminatorParams<double>::make(dc, rng);
        FeatureExtractor<double> fx(FeatureMode::Identity);
        auto lr = Tensor<double>::uniform({1, 1, 4, 4}, 0.0, 1.0, rng);
        auto hr = Tensor<double>::uniform({1, 1, 8, 8}, 0.0, 1.0, rng);
        ParamList<double> params;
        g.collect("g", params);
        std::vector<Tensor<double>> inputs;
        for (auto& np : params) inputs.push_back(np.tensor);
        return gradcheck<double>(
                   [&](const std::vector<Tensor<double>>&) {
                       auto sr = generator_forward(lr, g);
                       return combined_loss_g(
                           content_loss(sr, hr, fx),
                           adversarial_loss_g(discriminator_forward(sr, d), BatchReduction::Mean));
                   },
                   inputs)
            .max_rel_error;
    }});

    bool all_ok = true;
    for (auto& c : checks) {
        if (!module.empty() && c.module != module) continue;
        const double err = c.run();
        const bool ok = err < 1e-7;
        all_ok = all_ok && ok;
        std::cout << (ok ? "PASS" : "FAIL") << "  " << c.module << "/" << c.name
                  << "  max rel error " << err << "\n";
    }
    return all_ok ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"FA-GAN style super-resolution: training, evaluation and tooling"};
    app.require_subcommand(1);

    std::string config, data, val, out, ckpt, reference, candidate, input, module;
    std::size_t scale = 2, n_train = 8, n_val = 4, size = 64;
    unsigned seed = 1;

    auto* t = app.add_subcommand("train", "train a model");
    t->add_option("--config", config, "key = value config file (defaults used when omitted)");
    t->add_option("--data", data, "training manifest")->required();
    t->add_option("--val", val, "validation manifest (default: val.manifest next to --data)");
    t->add_option("--out", out, "output directory")->required();

    auto* e = app.add_subcommand("eval", "evaluate a checkpoint");
    e->add_option("--ckpt", ckpt, "checkpoint file")->required();
    e->add_option("--data", data, "manifest to evaluate")->required();
    e->add_option("--out", out, "output CSV path")->required();

    auto* d = app.add_subcommand("degrade", "bicubic-downscale images");
    d->add_option("input", input, "image file or directory (.pgm / .fatn)")->required();
    d->add_option("--scale", scale, "downscale factor")->check(CLI::IsMember({2, 4, 8}));
    d->add_option("--out", out, "output directory")->required();

    auto* m = app.add_subcommand("metrics", "PSNR/SSIM/FID between two image directories");
    m->add_option("reference", reference, "reference image directory")->required();
    m->add_option("candidate", candidate, "candidate image directory")->required();
    m->add_option("--out", out, "output CSV path")->required();

    auto* a = app.add_subcommand("ablate", "run the ablation / fusion / alpha-beta grids");
    a->add_option("--config", config, "base config file (defaults used when omitted)");
    a->add_option("--data", data, "training manifest")->required();
    a->add_option("--val", val, "validation manifest (default: val.manifest next to --data)");
    a->add_option("--out", out, "output directory")->required();

    auto* g = app.add_subcommand("gradcheck", "finite-difference gradient battery");
    g->add_option("--module", module, "restrict to one module (tensor, blocks, losses)");

    auto* s = app.add_subcommand("synth", "generate a synthetic phantom dataset");
    s->add_option("--train", n_train, "number of training images");
    s->add_option("--val", n_val, "number of validation images");
    s->add_option("--scale", scale, "downscale factor")->check(CLI::IsMember({2, 4, 8}));
    s->add_option("--seed", seed, "generation seed");
    s->add_option("--size", size, "HR image size");
    s->add_option("--out", out, "output directory")->required();

    CLI11_PARSE(app, argc, argv);

    try {
        if (t->parsed()) return cmd_train(config, data, val, out);
        if (e->parsed()) return cmd_eval(ckpt, data, out);
        if (d->parsed()) return cmd_degrade(input, scale, out);
        if (m->parsed()) return cmd_metrics(reference, candidate, out);
        if (a->parsed()) return cmd_ablate(config, data, val, out);
        if (g->parsed()) return cmd_gradcheck(module);
        if (s->parsed()) return cmd_synth(n_train, n_val, scale, seed, size, out);
    } catch (const std::exception& ex) {
        std::cerr << "error: " << ex.what() << "\n";
        return 1;
    }
    return 0;
}
