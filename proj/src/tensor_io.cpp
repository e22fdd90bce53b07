#include "fdwm/tensor_io.hpp"

#include <bit>
#include <cmath>
#include <cstring>
#include <fstream>
#include <stdexcept>

namespace fdwm {

namespace {

constexpr char kMagic[4] = {'F', 'D', 'W', 'M'};
constexpr std::uint16_t kVersion = 1;

void put_u16(std::ostream& out, std::uint16_t v) {
    unsigned char b[2] = {static_cast<unsigned char>(v & 0xFF),
                          static_cast<unsigned char>(v >> 8)};
    out.write(reinterpret_cast<const char*>(b), 2);
}

void put_u32(std::ostream& out, std::uint32_t v) {
    unsigned char b[4];
    for (int i = 0; i < 4; ++i) b[i] = static_cast<unsigned char>((v >> (8 * i)) & 0xFF);
    out.write(reinterpret_cast<const char*>(b), 4);
}

void put_f32(std::ostream& out, float v) {
    static_assert(sizeof(float) == 4);
    std::uint32_t bits;
    std::memcpy(&bits, &v, 4);
    put_u32(out, bits);
}

std::uint16_t get_u16(std::istream& in) {
    unsigned char b[2];
    in.read(reinterpret_cast<char*>(b), 2);
    return static_cast<std::uint16_t>(b[0] | (b[1] << 8));
}

std::uint32_t get_u32(std::istream& in) {
    unsigned char b[4];
    in.read(reinterpret_cast<char*>(b), 4);
    std::uint32_t v = 0;
    for (int i = 0; i < 4; ++i) v |= static_cast<std::uint32_t>(b[i]) << (8 * i);
    return v;
}

float get_f32(std::istream& in) {
    std::uint32_t bits = get_u32(in);
    float v;
    std::memcpy(&v, &bits, 4);
    return v;
}

}  // namespace

void write_tensor(std::ostream& out, const TensorFile& t) {
    if (t.dims.empty() || t.dims.size() > 255)
        throw std::invalid_argument("write_tensor: rank must be in [1,255]");
    if (t.values.size() != t.element_count())
        throw std::invalid_argument("write_tensor: value count does not match dims");
    out.write(kMagic, 4);
    put_u16(out, kVersion);
    const unsigned char rank = static_cast<unsigned char>(t.dims.size());
    out.write(reinterpret_cast<const char*>(&rank), 1);
    for (auto d : t.dims) put_u32(out, d);
    for (double v : t.values) put_f32(out, static_cast<float>(v));
}

void write_tensor(const std::filesystem::path& path, const TensorFile& t) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("write_tensor: cannot open " + path.string());
    write_tensor(out, t);
    if (!out) throw std::runtime_error("write_tensor: write failed for " + path.string());
}

TensorFile read_tensor(std::istream& in, const std::string& what) {
    char magic[4];
    in.read(magic, 4);
    if (!in || std::memcmp(magic, kMagic, 4) != 0)
        throw std::runtime_error("read_tensor: bad magic in " + what);
    const std::uint16_t version = get_u16(in);
    if (version != kVersion)
        throw std::runtime_error("read_tensor: unsupported version in " + what);
    unsigned char rank = 0;
    in.read(reinterpret_cast<char*>(&rank), 1);
    TensorFile t;
    t.dims.resize(rank);
    for (auto& d : t.dims) d = get_u32(in);
    t.values.resize(t.element_count());
    for (auto& v : t.values) v = static_cast<double>(get_f32(in));
    if (!in) throw std::runtime_error("read_tensor: truncated data in " + what);
    return t;
}

TensorFile read_tensor(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("read_tensor: cannot open " + path.string());
    return read_tensor(in, path.string());
}

void write_pgm(const std::filesystem::path& path, std::span<const double> gray, int h, int w) {
    if (gray.size() != static_cast<std::size_t>(h) * w)
        throw std::invalid_argument("write_pgm: size mismatch");
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("write_pgm: cannot open " + path.string());
    out << "P5\n" << w << " " << h << "\n255\n";
    for (double v : gray) {
        double s = std::floor(v * 255.0 + 0.5);  // round half up
        if (s < 0.0) s = 0.0;
        if (s > 255.0) s = 255.0;
        const unsigned char b = static_cast<unsigned char>(s);
        out.write(reinterpret_cast<const char*>(&b), 1);
    }
    if (!out) throw std::runtime_error("write_pgm: write failed for " + path.string());
}

void write_pbm(const std::filesystem::path& path, std::span<const std::uint8_t> mask, int h,
               int w) {
    if (mask.size() != static_cast<std::size_t>(h) * w)
        throw std::invalid_argument("write_pbm: size mismatch");
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("write_pbm: cannot open " + path.string());
    out << "P4\n" << w << " " << h << "\n";
    for (int y = 0; y < h; ++y) {
        unsigned char byte = 0;
        int nbits = 0;
        for (int x = 0; x < w; ++x) {
            byte = static_cast<unsigned char>((byte << 1) | (mask[static_cast<std::size_t>(y) * w + x] ? 1 : 0));
            if (++nbits == 8) {
                out.write(reinterpret_cast<const char*>(&byte), 1);
                byte = 0;
                nbits = 0;
            }
        }
        if (nbits > 0) {
            byte = static_cast<unsigned char>(byte << (8 - nbits));
            out.write(reinterpret_cast<const char*>(&byte), 1);
        }
    }
    if (!out) throw std::runtime_error("write_pbm: write failed for " + path.string());
}

std::uint64_t fnv1a64(std::span<const unsigned char> bytes) {
    std::uint64_t h = 0xcbf29ce484222325ull;
    for (unsigned char b : bytes) {
        h ^= b;
        h *= 0x100000001b3ull;
    }
    return h;
}

std::uint64_t hash_file(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("hash_file: cannot open " + path.string());
    std::uint64_t h = 0xcbf29ce484222325ull;
    char buf[65536];
    while (in.read(buf, sizeof(buf)) || in.gcount() > 0) {
        const std::streamsize n = in.gcount();
        for (std::streamsize i = 0; i < n; ++i) {
            h ^= static_cast<unsigned char>(buf[i]);
            h *= 0x100000001b3ull;
        }
        if (!in) break;
    }
    return h;
}

std::string hash_hex(std::uint64_t h) {
    static const char* digits = "0123456789abcdef";
    std::string s(16, '0');
    for (int i = 15; i >= 0; --i) {
        s[i] = digits[h & 0xF];
        h >>= 4;
    }
    return s;
}

}  // namespace fdwm
