#pragma once

// Dataset assembly: seeded phantoms degraded by bicubic downscaling, stored
// as FATN files (exact values) plus PGM copies for inspection, described by
// a tab-separated plain-text manifest.

#include "fagan/image.hpp"

#include <string>
#include <vector>

namespace fagan {

struct DatasetRecord {
    std::string hr_path;
    std::string lr_path;
    std::size_t scale = 2;

    bool operator==(const DatasetRecord&) const = default;
};

struct DatasetManifest {
    std::vector<DatasetRecord> records;
    std::string split = "train";  // {train, val, test}
    unsigned seed = 0;

    bool operator==(const DatasetManifest&) const = default;
};

// Lines: "# split\t<tag>", "# seed\t<n>", then one "hr\tlr\tscale" per record.
void write_manifest(const std::string& path, const DatasetManifest& m);
DatasetManifest read_manifest(const std::string& path);

struct DatasetBuild {
    DatasetManifest train;
    DatasetManifest val;
};

// Generates n_train + n_val phantoms of hr_size x hr_size, downscales each by
// `scale`, writes <out_dir>/{train,val}_NNN_{hr,lr}.{fatn,pgm} and
// <out_dir>/{train,val}.manifest. Deterministic for a fixed seed.
DatasetBuild build_dataset(std::size_t n_train, std::size_t n_val, std::size_t scale, unsigned seed,
                           const std::string& out_dir, std::size_t hr_size = 64);

// Loads every record's HR and LR images (FATN), checking the dimension contract.
struct DatasetPair {
    ImageBuffer hr;
    ImageBuffer lr;
};
std::vector<DatasetPair> load_dataset(const DatasetManifest& m);

}  // namespace fagan
