#include "fagan/bicubic.hpp"

#include "fagan/cubic_kernel.hpp"

#include <algorithm>
#include <cmath>

namespace fagan {

namespace {

struct Taps {
    std::size_t idx[4];
    double w[4];
};

// 4-tap cubic footprint for one output coordinate; align-centers mapping
// src = (o + 0.5) * in / out - 0.5, indices clamped to the valid range
std::vector<Taps> plan_axis(std::size_t in, std::size_t out) {
    std::vector<Taps> plan(out);
    const double ratio = static_cast<double>(in) / static_cast<double>(out);
    for (std::size_t o = 0; o < out; ++o) {
        const double src = (static_cast<double>(o) + 0.5) * ratio - 0.5;
        const double base = std::floor(src);
        for (int k = 0; k < 4; ++k) {
            const double tap = base + static_cast<double>(k - 1);
            plan[o].w[k] = cubic_weight(src - tap);
            const double clamped = std::min(static_cast<double>(in - 1), std::max(0.0, tap));
            plan[o].idx[k] = static_cast<std::size_t>(clamped);
        }
    }
    return plan;
}

}  // namespace

ImageBuffer bicubic_resize(const ImageBuffer& img, std::size_t out_h, std::size_t out_w) {
    img.validate();
    if (out_h < 1 || out_w < 1) throw ContractError("bicubic_resize: output dims must be >= 1");

    const auto cols = plan_axis(img.width, out_w);
    const auto rows = plan_axis(img.height, out_h);

    // horizontal pass, unclamped intermediate
    std::vector<double> mid(img.height * out_w);
    for (std::size_t r = 0; r < img.height; ++r)
        for (std::size_t c = 0; c < out_w; ++c) {
            double acc = 0;
            for (int k = 0; k < 4; ++k) acc += cols[c].w[k] * img.at(r, cols[c].idx[k]);
            mid[r * out_w + c] = acc;
        }

    ImageBuffer out(out_h, out_w, 0.0, img.range);
    for (std::size_t r = 0; r < out_h; ++r)
        for (std::size_t c = 0; c < out_w; ++c) {
            double acc = 0;
            for (int k = 0; k < 4; ++k) acc += rows[r].w[k] * mid[rows[r].idx[k] * out_w + c];
            out.at(r, c) = std::min(img.range, std::max(0.0, acc));
        }
    return out;
}

}  // namespace fagan
