#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <span>
#include <string>
#include <vector>

namespace fdwm {

/// Shared tensor file format used by every artifact:
///   magic "FDWM" | u16 version | u8 rank | u32 dims[rank] (LE) |
///   f32 payload (LE, row-major).
/// Values are widened to double in memory; complex data is stored as a
/// trailing dimension of size 2 (re, im interleaved).
struct TensorFile {
    std::vector<std::uint32_t> dims;
    std::vector<double> values;  // row-major

    std::size_t element_count() const {
        std::size_t n = 1;
        for (auto d : dims) n *= d;
        return n;
    }
};

void write_tensor(const std::filesystem::path& path, const TensorFile& t);
TensorFile read_tensor(const std::filesystem::path& path);

/// Stream forms, used to embed tensors inside checkpoint files.
void write_tensor(std::ostream& out, const TensorFile& t);
TensorFile read_tensor(std::istream& in, const std::string& what);

/// Binary PGM (P5), one byte per pixel. `gray` holds values in [0,1],
/// rendered as round-half-up of v*255.
void write_pgm(const std::filesystem::path& path, std::span<const double> gray, int h, int w);

/// Binary PBM (P4), bits packed MSB-first per row; nonzero mask value = 1.
void write_pbm(const std::filesystem::path& path, std::span<const std::uint8_t> mask, int h,
               int w);

/// FNV-1a 64-bit content hash (not cryptographic; used for artifact
/// staleness checks and manifests).
std::uint64_t fnv1a64(std::span<const unsigned char> bytes);
std::uint64_t hash_file(const std::filesystem::path& path);
std::string hash_hex(std::uint64_t h);

}  // namespace fdwm
