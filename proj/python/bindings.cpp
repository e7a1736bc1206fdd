// Python bindings for the main operations: phantoms, bicubic resampling,
// metrics, dataset assembly, training, and checkpointed super-resolution.

#include <pybind11/pybind11.h>
#include <pybind11/numpy.h>
#include <pybind11/stl.h>

#include "fagan/bicubic.hpp"
#include "fagan/phantom.hpp"
#include "fagan/train.hpp"

namespace py = pybind11;
using namespace fagan;

namespace {

ImageBuffer image_from_array(const py::array_t<double, py::array::c_style | py::array::forcecast>& a,
                             double range) {
    if (a.ndim() != 2) throw DimensionError("expected a 2-D array");
    ImageBuffer img(static_cast<std::size_t>(a.shape(0)), static_cast<std::size_t>(a.shape(1)), 0.0,
                    range);
    const double* src = a.data();
    for (std::size_t i = 0; i < img.values.size(); ++i)
        img.values[i] = std::min(range, std::max(0.0, src[i]));
    return img;
}

py::array_t<double> image_to_array(const ImageBuffer& img) {
    py::array_t<double> a({img.height, img.width});
    std::copy(img.values.begin(), img.values.end(), a.mutable_data());
    return a;
}

}  // namespace

PYBIND11_MODULE(_fagan, m) {
    m.doc() = "super-resolution GAN: phantoms, metrics, training, inference";

    m.def(
        "synthesize_phantom",
        [](unsigned seed, std::size_t size, double range) {
            return image_to_array(synthesize_phantom(seed, size, range));
        },
        py::arg("seed"), py::arg("size"), py::arg("range") = 255.0);

    m.def(
        "bicubic_resize",
        [](const py::array_t<double, py::array::c_style | py::array::forcecast>& img, std::size_t out_h,
           std::size_t out_w, double range) {
            return image_to_array(bicubic_resize(image_from_array(img, range), out_h, out_w));
        },
        py::arg("img"), py::arg("out_h"), py::arg("out_w"), py::arg("range") = 255.0);

    m.def(
        "psnr",
        [](const py::array_t<double, py::array::c_style | py::array::forcecast>& x,
           const py::array_t<double, py::array::c_style | py::array::forcecast>& y, double range) {
            return psnr(image_from_array(x, range), image_from_array(y, range), range);
        },
        py::arg("x"), py::arg("y"), py::arg("range") = 255.0);

    m.def(
        "ssim",
        [](const py::array_t<double, py::array::c_style | py::array::forcecast>& x,
           const py::array_t<double, py::array::c_style | py::array::forcecast>& y, double range,
           bool windowed) {
            return ssim(image_from_array(x, range), image_from_array(y, range),
                        windowed ? SsimMode::Windowed : SsimMode::Global);
        },
        py::arg("x"), py::arg("y"), py::arg("range") = 255.0, py::arg("windowed") = true);

    m.def(
        "build_dataset",
        [](std::size_t n_train, std::size_t n_val, std::size_t scale, unsigned seed,
           const std::string& out_dir, std::size_t hr_size) {
            auto b = build_dataset(n_train, n_val, scale, seed, out_dir, hr_size);
            return py::make_tuple(out_dir + "/train.manifest", out_dir + "/val.manifest");
        },
        py::arg("n_train"), py::arg("n_val"), py::arg("scale"), py::arg("seed"), py::arg("out_dir"),
        py::arg("hr_size") = 64);

    m.def("default_config", [] { return serialize_config(TrainConfig{}); });

    m.def(
        "train",
        [](const std::string& config_text, const std::string& train_manifest,
           const std::string& val_manifest, const std::string& out_dir) {
            auto cfg = parse_config_text(config_text);
            auto res = train(cfg, read_manifest(train_manifest), read_manifest(val_manifest), out_dir);
            py::dict d;
            d["iterations"] = res.log.rows.size();
            d["final_g_loss"] = res.log.rows.back().g_loss;
            d["final_d_loss"] = res.log.rows.back().d_loss;
            if (!res.log.vals.empty()) {
                d["val_psnr"] = res.log.vals.back().psnr;
                d["val_ssim"] = res.log.vals.back().ssim;
            }
            return d;
        },
        py::arg("config_text"), py::arg("train_manifest"), py::arg("val_manifest"), py::arg("out_dir"));

    m.def(
        "super_resolve",
        [](const std::string& checkpoint_path,
           const py::array_t<double, py::array::c_style | py::array::forcecast>& lr, double range) {
            auto ck = load_checkpoint(checkpoint_path);
            auto img = image_from_array(lr, range);
            std::vector<float> data;
            data.reserve(img.values.size());
            for (double v : img.values) data.push_back(static_cast<float>(v / range));
            Tensor<float> t({1, 1, img.height, img.width}, std::move(data));
            auto sr = generator_forward(t, ck.generator);
            ImageBuffer out(sr.dim(2), sr.dim(3), 0.0, range);
            for (std::size_t i = 0; i < out.values.size(); ++i)
                out.values[i] =
                    std::min(range, std::max(0.0, static_cast<double>(sr.at(i)) * range));
            return image_to_array(out);
        },
        py::arg("checkpoint_path"), py::arg("lr"), py::arg("range") = 255.0);

    m.def(
        "evaluate_checkpoint",
        [](const std::string& checkpoint_path, const std::string& manifest) {
            auto rep = evaluate(load_checkpoint(checkpoint_path), read_manifest(manifest));
            py::dict d;
            d["mean_psnr"] = rep.mean_psnr;
            d["mean_ssim"] = rep.mean_ssim;
            d["fid"] = rep.fid;
            return d;
        },
        py::arg("checkpoint_path"), py::arg("manifest"));
}
