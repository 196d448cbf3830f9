#include "vqalab/models/checkpoint.hpp"

#include <bit>
#include <fstream>

#include "vqalab/common.hpp"

static_assert(std::endian::native == std::endian::little,
              "checkpoint format assumes a little-endian host");

namespace vqalab::models {

namespace {

constexpr std::uint32_t kMagic = 0x434c5156;  // "VQLC"
constexpr std::uint32_t kVersion = 1;

template <typename T>
void write_pod(std::ostream& os, const T& v) {
    os.write(reinterpret_cast<const char*>(&v), sizeof(T));
}

template <typename T>
T read_pod(std::istream& is) {
    T v{};
    is.read(reinterpret_cast<char*>(&v), sizeof(T));
    if (!is) throw ConfigError("checkpoint: truncated file");
    return v;
}

CheckpointHeader read_header(std::istream& is) {
    if (read_pod<std::uint32_t>(is) != kMagic) throw ConfigError("checkpoint: bad magic");
    if (read_pod<std::uint32_t>(is) != kVersion) throw ConfigError("checkpoint: unsupported version");
    CheckpointHeader h;
    h.arch_tag = read_pod<std::uint32_t>(is);
    h.init_tag = read_pod<std::uint32_t>(is);
    h.seed = read_pod<std::uint64_t>(is);
    auto n_dims = read_pod<std::uint32_t>(is);
    h.dims.resize(n_dims);
    for (auto& d : h.dims) d = read_pod<std::uint64_t>(is);
    return h;
}

}  // namespace

void save_checkpoint(const std::string& path, const CheckpointHeader& header,
                     const std::vector<nn::Var>& params) {
    std::ofstream os(path, std::ios::binary);
    if (!os) throw ConfigError("checkpoint: cannot open for writing: " + path);
    write_pod(os, kMagic);
    write_pod(os, kVersion);
    write_pod(os, header.arch_tag);
    write_pod(os, header.init_tag);
    write_pod(os, header.seed);
    write_pod(os, static_cast<std::uint32_t>(header.dims.size()));
    for (std::uint64_t d : header.dims) write_pod(os, d);
    write_pod(os, static_cast<std::uint32_t>(params.size()));
    for (const nn::Var& p : params) {
        const nn::Tensor& t = p.value();
        write_pod(os, static_cast<std::uint32_t>(t.rank()));
        for (std::size_t d : t.shape()) write_pod(os, static_cast<std::uint64_t>(d));
        os.write(reinterpret_cast<const char*>(t.data().data()),
                 static_cast<std::streamsize>(t.size() * sizeof(double)));
    }
    if (!os) throw ConfigError("checkpoint: write failed: " + path);
}

CheckpointHeader load_checkpoint(const std::string& path, std::vector<nn::Var>& params) {
    std::ifstream is(path, std::ios::binary);
    if (!is) throw ConfigError("checkpoint: cannot open: " + path);
    CheckpointHeader h = read_header(is);
    auto n_tensors = read_pod<std::uint32_t>(is);
    if (n_tensors != params.size())
        throw ConfigError("checkpoint: tensor count does not match model");
    for (nn::Var& p : params) {
        auto rank = read_pod<std::uint32_t>(is);
        std::vector<std::size_t> shape(rank);
        for (auto& d : shape) d = static_cast<std::size_t>(read_pod<std::uint64_t>(is));
        if (shape != p.value().shape())
            throw ConfigError("checkpoint: tensor shape does not match model");
        nn::Tensor& t = p.mutable_value();
        is.read(reinterpret_cast<char*>(t.data().data()),
                static_cast<std::streamsize>(t.size() * sizeof(double)));
        if (!is) throw ConfigError("checkpoint: truncated tensor data");
    }
    return h;
}

CheckpointHeader read_checkpoint_header(const std::string& path) {
    std::ifstream is(path, std::ios::binary);
    if (!is) throw ConfigError("checkpoint: cannot open: " + path);
    return read_header(is);
}

}  // namespace vqalab::models
