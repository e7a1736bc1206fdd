#include "fagan/phantom.hpp"

#include <cmath>
#include <random>

namespace fagan {

namespace {

double smoothstep(double e0, double e1, double x) {
    const double t = std::min(1.0, std::max(0.0, (x - e0) / (e1 - e0)));
    return t * t * (3.0 - 2.0 * t);
}

}  // namespace

ImageBuffer synthesize_phantom(unsigned seed, std::size_t size, double range) {
    if (size < 32) throw ContractError("synthesize_phantom: size must be >= 32");
    std::mt19937 rng(seed);
    std::uniform_real_distribution<double> unit(0.0, 1.0);

    struct Ellipse {
        double cx, cy, rx, ry, angle, level;
    };
    std::uniform_int_distribution<int> count_dist(5, 9);
    const int count = count_dist(rng);
    std::vector<Ellipse> ellipses(static_cast<std::size_t>(count));
    for (auto& e : ellipses) {
        e.cx = 0.15 + 0.7 * unit(rng);
        e.cy = 0.15 + 0.7 * unit(rng);
        e.rx = 0.06 + 0.25 * unit(rng);
        e.ry = 0.06 + 0.25 * unit(rng);
        e.angle = 2.0 * M_PI * unit(rng);
        e.level = (unit(rng) < 0.25 ? -1.0 : 1.0) * (0.15 + 0.35 * unit(rng));
    }
    const double tex_amp = 0.015 + 0.02 * unit(rng);
    const double tex_fx = 4.0 + 8.0 * unit(rng);
    const double tex_fy = 4.0 + 8.0 * unit(rng);
    const double tex_px = 2.0 * M_PI * unit(rng);
    const double tex_py = 2.0 * M_PI * unit(rng);
    const double grad_x = 0.05 * (unit(rng) - 0.5);
    const double grad_y = 0.05 * (unit(rng) - 0.5);

    ImageBuffer img(size, size, 0.0, range);
    const double inv = 1.0 / static_cast<double>(size);
    for (std::size_t r = 0; r < size; ++r)
        for (std::size_t c = 0; c < size; ++c) {
            const double x = (static_cast<double>(c) + 0.5) * inv;
            const double y = (static_cast<double>(r) + 0.5) * inv;
            double v = 0.12 + grad_x * x + grad_y * y;
            for (const auto& e : ellipses) {
                const double dx = x - e.cx, dy = y - e.cy;
                const double u = dx * std::cos(e.angle) + dy * std::sin(e.angle);
                const double w = -dx * std::sin(e.angle) + dy * std::cos(e.angle);
                const double rad = std::sqrt((u / e.rx) * (u / e.rx) + (w / e.ry) * (w / e.ry));
                // feathered edge: full level inside rad 0.85, fades out by 1.0
                v += e.level * (1.0 - smoothstep(0.85, 1.0, rad));
            }
            v += tex_amp * std::sin(tex_fx * 2.0 * M_PI * x + tex_px) *
                 std::sin(tex_fy * 2.0 * M_PI * y + tex_py);
            img.at(r, c) = std::min(range, std::max(0.0, v * range));
        }
    return img;
}

}  // namespace fagan
