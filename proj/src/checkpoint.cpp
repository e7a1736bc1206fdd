#include "fagan/train.hpp"

#include <cstdint>
#include <fstream>
#include <map>

namespace fagan {

namespace {

void write_u32(std::ostream& os, std::uint32_t v) {
    unsigned char b[4] = {static_cast<unsigned char>(v), static_cast<unsigned char>(v >> 8),
                          static_cast<unsigned char>(v >> 16), static_cast<unsigned char>(v >> 24)};
    os.write(reinterpret_cast<const char*>(b), 4);
}

std::uint32_t read_u32(std::istream& is) {
    unsigned char b[4];
    is.read(reinterpret_cast<char*>(b), 4);
    if (!is) throw IoError("checkpoint: truncated file");
    return std::uint32_t(b[0]) | (std::uint32_t(b[1]) << 8) | (std::uint32_t(b[2]) << 16) |
           (std::uint32_t(b[3]) << 24);
}

void write_u64(std::ostream& os, std::uint64_t v) {
    write_u32(os, static_cast<std::uint32_t>(v));
    write_u32(os, static_cast<std::uint32_t>(v >> 32));
}

std::uint64_t read_u64(std::istream& is) {
    const std::uint64_t lo = read_u32(is);
    const std::uint64_t hi = read_u32(is);
    return lo | (hi << 32);
}

void write_str(std::ostream& os, const std::string& s) {
    write_u32(os, static_cast<std::uint32_t>(s.size()));
    os.write(s.data(), static_cast<std::streamsize>(s.size()));
}

std::string read_str(std::istream& is) {
    const std::uint32_t n = read_u32(is);
    std::string s(n, '\0');
    is.read(s.data(), n);
    if (!is) throw IoError("checkpoint: truncated string");
    return s;
}

void write_record(std::ostream& os, const std::string& name, const Shape& shape,
                  std::span<const float> data) {
    write_str(os, name);
    fatn_write<float>(os, shape, data);
}

// every named value in the checkpoint, in a fixed deterministic order
template <typename Fn>
void for_each_record(Checkpoint& ck, Fn&& fn) {
    ParamList<float> gp, dp;
    ck.generator.collect("generator", gp);
    ck.discriminator.collect("discriminator", dp);
    if (ck.g_adam.m.size() != gp.size()) throw ContractError("checkpoint: generator Adam state size mismatch");
    if (ck.d_adam.m.size() != dp.size()) throw ContractError("checkpoint: discriminator Adam state size mismatch");
    for (std::size_t i = 0; i < gp.size(); ++i) {
        fn(gp[i].name, gp[i].tensor.shape(),
           std::span<float>(gp[i].tensor.mutable_data().data(), gp[i].tensor.numel()));
        fn(gp[i].name + ".adam_m", Shape{ck.g_adam.m[i].size()}, std::span<float>(ck.g_adam.m[i]));
        fn(gp[i].name + ".adam_v", Shape{ck.g_adam.v[i].size()}, std::span<float>(ck.g_adam.v[i]));
    }
    for (std::size_t i = 0; i < dp.size(); ++i) {
        fn(dp[i].name, dp[i].tensor.shape(),
           std::span<float>(dp[i].tensor.mutable_data().data(), dp[i].tensor.numel()));
        fn(dp[i].name + ".adam_m", Shape{ck.d_adam.m[i].size()}, std::span<float>(ck.d_adam.m[i]));
        fn(dp[i].name + ".adam_v", Shape{ck.d_adam.v[i].size()}, std::span<float>(ck.d_adam.v[i]));
    }
}

}  // namespace

void save_checkpoint(const std::string& path, const Checkpoint& ck) {
    std::ofstream os(path, std::ios::binary);
    if (!os) throw IoError("save_checkpoint: cannot open " + path);
    os.write("FACK", 4);
    os.put(1);  // version
    write_u64(os, ck.iteration);
    write_u64(os, ck.g_adam.step);
    write_u64(os, ck.d_adam.step);
    write_str(os, serialize_config(ck.cfg));

    std::size_t count = 0;
    auto& mck = const_cast<Checkpoint&>(ck);
    for_each_record(mck, [&](const std::string&, const Shape&, std::span<float>) { ++count; });
    write_u32(os, static_cast<std::uint32_t>(count));
    for_each_record(mck, [&](const std::string& name, const Shape& shape, std::span<float> data) {
        write_record(os, name, shape, data);
    });
    // spectral-norm power-iteration vectors (lazily sized: empty until the
    // first discriminator forward)
    write_u32(os, static_cast<std::uint32_t>(ck.discriminator.sn.size()));
    for (std::size_t i = 0; i < ck.discriminator.sn.size(); ++i) {
        auto& u = ck.discriminator.sn[i].u;
        write_record(os, "discriminator.sn." + std::to_string(i) + ".u", Shape{u.size()},
                     std::span<const float>(u));
    }
    if (!os) throw IoError("save_checkpoint: write failure on " + path);
}

Checkpoint load_checkpoint(const std::string& path) {
    std::ifstream is(path, std::ios::binary);
    if (!is) throw IoError("load_checkpoint: cannot open " + path);
    char magic[4];
    is.read(magic, 4);
    if (!is || std::string(magic, 4) != "FACK") throw IoError("load_checkpoint: bad magic in " + path);
    if (is.get() != 1) throw IoError("load_checkpoint: unsupported version in " + path);

    Checkpoint ck;
    ck.iteration = read_u64(is);
    const std::uint64_t g_step = read_u64(is);
    const std::uint64_t d_step = read_u64(is);
    ck.cfg = parse_config_text(read_str(is), path);

    std::mt19937 rng(ck.cfg.seed);
    ck.generator = GeneratorParams<float>::make(ck.cfg.generator_config(), rng);
    ck.discriminator = DiscriminatorParams<float>::make(ck.cfg.discriminator_config(), rng);
    ParamList<float> gp, dp;
    ck.generator.collect("generator", gp);
    ck.discriminator.collect("discriminator", dp);
    ck.g_adam.init(gp);
    ck.d_adam.init(dp);
    ck.g_adam.step = g_step;
    ck.d_adam.step = d_step;

    std::map<std::string, std::pair<Shape, std::vector<float>>> records;
    const std::uint32_t count = read_u32(is);
    for (std::uint32_t i = 0; i < count; ++i) {
        auto name = read_str(is);
        records[name] = fatn_read<float>(is);
    }

    for_each_record(ck, [&](const std::string& name, const Shape& shape, std::span<float> dst) {
        auto it = records.find(name);
        if (it == records.end()) throw IoError("load_checkpoint: missing record " + name);
        if (it->second.first != shape) throw IoError("load_checkpoint: shape mismatch for " + name);
        std::copy(it->second.second.begin(), it->second.second.end(), dst.begin());
        records.erase(it);
    });
    if (!records.empty())
        throw IoError("load_checkpoint: unexpected record " + records.begin()->first + " in " + path);

    const std::uint32_t sn_count = read_u32(is);
    if (sn_count != ck.discriminator.sn.size())
        throw IoError("load_checkpoint: spectral-norm state count mismatch in " + path);
    for (std::uint32_t i = 0; i < sn_count; ++i) {
        const std::string expected = "discriminator.sn." + std::to_string(i) + ".u";
        if (read_str(is) != expected) throw IoError("load_checkpoint: missing record " + expected);
        auto [shape, data] = fatn_read<float>(is);
        ck.discriminator.sn[i].u = std::move(data);
    }
    return ck;
}

}  // namespace fagan
