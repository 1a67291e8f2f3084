#include "csigan/checkpoint.hpp"

#include <cstring>
#include <fstream>
#include <vector>

#include "csigan/errors.hpp"

namespace csigan {

namespace {

constexpr char kMagic[4] = {'C', 'S', 'G', 'N'};
constexpr std::uint32_t kVersion = 1;

void write_u32(std::ostream& os, std::uint32_t v) {
    os.write(reinterpret_cast<const char*>(&v), sizeof(v));
}

void write_u64(std::ostream& os, std::uint64_t v) {
    os.write(reinterpret_cast<const char*>(&v), sizeof(v));
}

void write_string(std::ostream& os, const std::string& s) {
    write_u32(os, static_cast<std::uint32_t>(s.size()));
    os.write(s.data(), static_cast<std::streamsize>(s.size()));
}

std::uint32_t read_u32(std::istream& is) {
    std::uint32_t v = 0;
    is.read(reinterpret_cast<char*>(&v), sizeof(v));
    return v;
}

std::uint64_t read_u64(std::istream& is) {
    std::uint64_t v = 0;
    is.read(reinterpret_cast<char*>(&v), sizeof(v));
    return v;
}

std::string read_string(std::istream& is) {
    const std::uint32_t len = read_u32(is);
    ensure(len <= 4096, "checkpoint: implausible string length");
    std::string s(len, '\0');
    is.read(s.data(), len);
    return s;
}

void save_arrays(const std::string& path, const std::string& kind, std::uint64_t seed,
                 const std::vector<ParamRef>& refs) {
    std::ofstream os(path, std::ios::binary | std::ios::trunc);
    ensure(os.good(), "checkpoint: cannot open for writing: " + path);
    os.write(kMagic, 4);
    write_u32(os, kVersion);
    write_string(os, kind);
    write_u64(os, seed);
    write_u32(os, static_cast<std::uint32_t>(refs.size()));
    for (const auto& r : refs) {
        write_string(os, r.name);
        write_u64(os, static_cast<std::uint64_t>(r.rows));
        write_u64(os, static_cast<std::uint64_t>(r.cols));
        os.write(reinterpret_cast<const char*>(r.value),
                 static_cast<std::streamsize>(r.size() * sizeof(double)));
    }
    ensure(os.good(), "checkpoint: write failed: " + path);
}

struct Header {
    std::string kind;
    std::uint64_t seed = 0;
    std::uint32_t count = 0;
};

Header read_header(std::istream& is, const std::string& path) {
    char magic[4] = {};
    is.read(magic, 4);
    ensure(is.good() && std::memcmp(magic, kMagic, 4) == 0,
           "checkpoint: bad magic in " + path);
    const std::uint32_t version = read_u32(is);
    ensure(version == kVersion, "checkpoint: unsupported version in " + path);
    Header h;
    h.kind = read_string(is);
    h.seed = read_u64(is);
    h.count = read_u32(is);
    ensure(is.good(), "checkpoint: truncated header in " + path);
    return h;
}

void load_arrays(std::istream& is, const std::string& path, std::uint32_t count,
                 std::vector<ParamRef> refs) {
    ensure(count == refs.size(), "checkpoint: array count mismatch in " + path);
    for (std::uint32_t i = 0; i < count; ++i) {
        const std::string name = read_string(is);
        const auto rows = static_cast<Eigen::Index>(read_u64(is));
        const auto cols = static_cast<Eigen::Index>(read_u64(is));
        ensure(name == refs[i].name, "checkpoint: array name mismatch: expected " +
                                         refs[i].name + ", found " + name);
        ensure(rows == refs[i].rows && cols == refs[i].cols,
               "checkpoint: shape mismatch for array " + name);
        is.read(reinterpret_cast<char*>(refs[i].value),
                static_cast<std::streamsize>(refs[i].size() * sizeof(double)));
    }
    ensure(is.good(), "checkpoint: truncated arrays in " + path);
}

}  // namespace

void save_checkpoint(const std::string& path, Generator& gen) {
    save_arrays(path, std::string(gen.kind()), gen.build_seed(), gen.params());
}

void save_checkpoint(const std::string& path, DiscClassNet& net) {
    save_arrays(path, "disc_classifier", net.build_seed(), net.params());
}

std::unique_ptr<Generator> load_generator(const std::string& path) {
    std::ifstream is(path, std::ios::binary);
    ensure(is.good(), "checkpoint: cannot open: " + path);
    const Header h = read_header(is, path);
    ensure(h.kind == "generator" || h.kind == "simplified_generator",
           "checkpoint: not a generator checkpoint: " + path + " (kind " + h.kind + ")");
    auto gen = make_generator(h.kind == "simplified_generator", h.seed);
    load_arrays(is, path, h.count, gen->params());
    return gen;
}

std::unique_ptr<DiscClassNet> load_discriminator(const std::string& path) {
    std::ifstream is(path, std::ios::binary);
    ensure(is.good(), "checkpoint: cannot open: " + path);
    const Header h = read_header(is, path);
    ensure(h.kind == "disc_classifier",
           "checkpoint: not a discriminator checkpoint: " + path + " (kind " + h.kind + ")");
    auto net = std::make_unique<DiscClassNet>(h.seed);
    load_arrays(is, path, h.count, net->params());
    return net;
}

std::string checkpoint_kind(const std::string& path) {
    std::ifstream is(path, std::ios::binary);
    ensure(is.good(), "checkpoint: cannot open: " + path);
    return read_header(is, path).kind;
}

}  // namespace csigan
