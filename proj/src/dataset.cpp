#include "fagan/dataset.hpp"

#include "fagan/bicubic.hpp"
#include "fagan/phantom.hpp"

#include <filesystem>
#include <fstream>
#include <sstream>

namespace fagan {

namespace fs = std::filesystem;

void write_manifest(const std::string& path, const DatasetManifest& m) {
    std::ofstream os(path);
    if (!os) throw IoError("write_manifest: cannot open " + path);
    os << "# split\t" << m.split << "\n";
    os << "# seed\t" << m.seed << "\n";
    for (const auto& r : m.records) os << r.hr_path << "\t" << r.lr_path << "\t" << r.scale << "\n";
    if (!os) throw IoError("write_manifest: write failure on " + path);
}

DatasetManifest read_manifest(const std::string& path) {
    std::ifstream is(path);
    if (!is) throw IoError("read_manifest: cannot open " + path);
    DatasetManifest m;
    std::string line;
    while (std::getline(is, line)) {
        if (line.empty()) continue;
        std::istringstream ls(line);
        if (line[0] == '#') {
            std::string hash, key;
            ls >> hash >> key;
            if (key == "split")
                ls >> m.split;
            else if (key == "seed")
                ls >> m.seed;
            continue;
        }
        DatasetRecord r;
        std::string scale_str;
        if (!std::getline(ls, r.hr_path, '\t') || !std::getline(ls, r.lr_path, '\t') ||
            !std::getline(ls, scale_str))
            throw IoError("read_manifest: malformed line in " + path + ": " + line);
        r.scale = std::stoul(scale_str);
        if (r.scale != 2 && r.scale != 4 && r.scale != 8)
            throw IoError("read_manifest: scale must be 2, 4 or 8 in " + path);
        m.records.push_back(std::move(r));
    }
    return m;
}

namespace {

DatasetManifest build_split(const std::string& split, std::size_t count, std::size_t scale,
                            unsigned seed, unsigned seed_offset, const std::string& out_dir,
                            std::size_t hr_size) {
    DatasetManifest m;
    m.split = split;
    m.seed = seed;
    for (std::size_t i = 0; i < count; ++i) {
        char name[64];
        std::snprintf(name, sizeof(name), "%s_%03zu", split.c_str(), i);
        const auto hr = synthesize_phantom(seed + seed_offset + static_cast<unsigned>(i), hr_size);
        const auto lr = bicubic_resize(hr, hr_size / scale, hr_size / scale);
        DatasetRecord r;
        r.hr_path = (fs::path(out_dir) / (std::string(name) + "_hr.fatn")).string();
        r.lr_path = (fs::path(out_dir) / (std::string(name) + "_lr.fatn")).string();
        r.scale = scale;
        write_image_fatn(r.hr_path, hr);
        write_image_fatn(r.lr_path, lr);
        write_pgm((fs::path(out_dir) / (std::string(name) + "_hr.pgm")).string(), hr);
        write_pgm((fs::path(out_dir) / (std::string(name) + "_lr.pgm")).string(), lr);
        m.records.push_back(std::move(r));
    }
    write_manifest((fs::path(out_dir) / (split + ".manifest")).string(), m);
    return m;
}

}  // namespace

DatasetBuild build_dataset(std::size_t n_train, std::size_t n_val, std::size_t scale, unsigned seed,
                           const std::string& out_dir, std::size_t hr_size) {
    if (n_train < 1 || n_val < 1) throw ContractError("build_dataset: counts must be >= 1");
    if (scale != 2 && scale != 4 && scale != 8)
        throw ConfigError("build_dataset: scale must be 2, 4 or 8");
    if (hr_size % scale != 0) throw ConfigError("build_dataset: hr_size must be divisible by scale");
    std::error_code ec;
    fs::create_directories(out_dir, ec);
    if (ec) throw IoError("build_dataset: cannot create " + out_dir + ": " + ec.message());
    DatasetBuild b;
    b.train = build_split("train", n_train, scale, seed, 0, out_dir, hr_size);
    b.val = build_split("val", n_val, scale, seed, 100000u, out_dir, hr_size);
    return b;
}

std::vector<DatasetPair> load_dataset(const DatasetManifest& m) {
    std::vector<DatasetPair> pairs;
    pairs.reserve(m.records.size());
    for (const auto& r : m.records) {
        DatasetPair p{read_image_fatn(r.hr_path), read_image_fatn(r.lr_path)};
        if (p.lr.height * r.scale != p.hr.height || p.lr.width * r.scale != p.hr.width)
            throw ContractError("load_dataset: LR dims x scale != HR dims for " + r.hr_path);
        pairs.push_back(std::move(p));
    }
    return pairs;
}

}  // namespace fagan
