#include "fagan/image.hpp"

#include <cmath>
#include <fstream>

namespace fagan {

ImageBuffer::ImageBuffer(std::size_t h, std::size_t w, double fill, double L)
    : height(h), width(w), values(h * w, fill), range(L) {
    validate();
}

void ImageBuffer::validate() const {
    if (height < 1 || width < 1) throw ContractError("ImageBuffer: dimensions must be >= 1");
    if (values.size() != height * width) throw ContractError("ImageBuffer: value count mismatch");
    if (!(range > 0)) throw ContractError("ImageBuffer: range must be positive");
    for (double v : values)
        if (!(v >= 0.0 && v <= range)) throw ContractError("ImageBuffer: value outside [0, range]");
}

void write_pgm(const std::string& path, const ImageBuffer& img) {
    std::ofstream os(path, std::ios::binary);
    if (!os) throw IoError("write_pgm: cannot open " + path);
    os << "P5\n" << img.width << " " << img.height << "\n255\n";
    for (double v : img.values) {
        const double scaled = v / img.range * 255.0;
        const int q = static_cast<int>(std::lround(std::min(255.0, std::max(0.0, scaled))));
        os.put(static_cast<char>(q));
    }
    if (!os) throw IoError("write_pgm: write failure on " + path);
}

ImageBuffer read_pgm(const std::string& path) {
    std::ifstream is(path, std::ios::binary);
    if (!is) throw IoError("read_pgm: cannot open " + path);
    std::string magic;
    is >> magic;
    if (magic != "P5") throw IoError("read_pgm: not a binary PGM: " + path);
    std::size_t w = 0, h = 0;
    int maxval = 0;
    is >> w >> h >> maxval;
    if (!is || w < 1 || h < 1 || maxval != 255) throw IoError("read_pgm: bad header in " + path);
    is.get();  // single whitespace after maxval
    ImageBuffer img(h, w);
    for (auto& v : img.values) {
        const int c = is.get();
        if (c == EOF) throw IoError("read_pgm: truncated data in " + path);
        v = static_cast<double>(c);
    }
    return img;
}

void write_image_fatn(const std::string& path, const ImageBuffer& img) {
    std::ofstream os(path, std::ios::binary);
    if (!os) throw IoError("write_image_fatn: cannot open " + path);
    fatn_write<double>(os, {img.height, img.width}, img.values);
    const double range[1] = {img.range};
    fatn_write<double>(os, {1}, std::span<const double>(range, 1));
}

ImageBuffer read_image_fatn(const std::string& path) {
    std::ifstream is(path, std::ios::binary);
    if (!is) throw IoError("read_image_fatn: cannot open " + path);
    auto [shape, data] = fatn_read<double>(is);
    if (shape.size() != 2) throw IoError("read_image_fatn: expected rank-2 record in " + path);
    auto [rshape, rdata] = fatn_read<double>(is);
    if (rshape != Shape{1}) throw IoError("read_image_fatn: missing range record in " + path);
    ImageBuffer img;
    img.height = shape[0];
    img.width = shape[1];
    img.values = std::move(data);
    img.range = rdata[0];
    img.validate();
    return img;
}

}  // namespace fagan
