#pragma once

// 2-D grayscale image with an explicit value range [0, L]. Interchange is
// 8-bit binary PGM for inspection and the FATN container for exact
// real-valued round-trips.

#include "fagan/fatn.hpp"
#include "fagan/tensor.hpp"

#include <string>
#include <vector>

namespace fagan {

struct ImageBuffer {
    std::size_t height = 0;
    std::size_t width = 0;
    std::vector<double> values;  // row-major, within [0, range]
    double range = 255.0;

    ImageBuffer() = default;
    ImageBuffer(std::size_t h, std::size_t w, double fill = 0.0, double L = 255.0);

    double& at(std::size_t r, std::size_t c) { return values[r * width + c]; }
    double at(std::size_t r, std::size_t c) const { return values[r * width + c]; }

    void validate() const;  // throws ContractError on invariant violation
};

// conversions to/from [N=1, C=1, H, W] tensors used by the models
template <typename T>
Tensor<T> image_to_tensor(const ImageBuffer& img) {
    std::vector<T> data(img.values.begin(), img.values.end());
    return Tensor<T>({1, 1, img.height, img.width}, std::move(data));
}

template <typename T>
ImageBuffer tensor_to_image(const Tensor<T>& t, double range = 255.0) {
    if (t.rank() != 4 || t.shape()[0] != 1 || t.shape()[1] != 1)
        throw DimensionError("tensor_to_image: expected [1,1,H,W], got " + shape_str(t.shape()));
    ImageBuffer img(t.shape()[2], t.shape()[3], 0.0, range);
    for (std::size_t i = 0; i < t.numel(); ++i)
        img.values[i] = std::min(range, std::max(0.0, static_cast<double>(t.at(i))));
    return img;
}

// 8-bit binary PGM (P5); writing quantizes values to [0,255] via the range tag
void write_pgm(const std::string& path, const ImageBuffer& img);
ImageBuffer read_pgm(const std::string& path);

// exact round-trip through FATN: a rank-2 f64 record of the pixel values
// followed by a rank-1 single-element record carrying the range tag
void write_image_fatn(const std::string& path, const ImageBuffer& img);
ImageBuffer read_image_fatn(const std::string& path);

}  // namespace fagan
