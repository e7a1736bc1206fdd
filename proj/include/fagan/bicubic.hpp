#pragma once

// Separable bicubic resampling (a = -0.5), align-centers convention,
// edge-clamped sampling, output clamped to the image range.

#include "fagan/image.hpp"

namespace fagan {

ImageBuffer bicubic_resize(const ImageBuffer& img, std::size_t out_h, std::size_t out_w);

}  // namespace fagan
