#pragma once

#include <complex>
#include <span>
#include <utility>
#include <vector>

#include "fdwm/image.hpp"

namespace fdwm {

/// 2D spectrum in CENTERED (shifted) layout: the lowest frequency sits at
/// (floor(h/2), floor(w/2)). A spectrum of a real channel is conjugate
/// point-symmetric about that center.
struct Spectrum {
    int height = 0;
    int width = 0;
    std::vector<std::complex<double>> coef;  // row-major, centered

    Spectrum() = default;
    Spectrum(int h, int w) : height(h), width(w), coef(static_cast<std::size_t>(h) * w) {}

    std::complex<double>& at(int i, int j) { return coef[static_cast<std::size_t>(i) * width + j]; }
    std::complex<double> at(int i, int j) const { return coef[static_cast<std::size_t>(i) * width + j]; }
};

/// Real spatial matrix with unit L2 norm whose spectrum is supported on one
/// centered position and its point-symmetric partner (a single coefficient
/// when the position is self-symmetric).
///
/// Phase convention: the cosine is centered on the pixel grid
/// ((h-1)/2, (w-1)/2), so horizontal/vertical flips map the basis at (u,v)
/// exactly onto the basis at (u,-v)/(-u,v); self-symmetric positions use
/// zero phase (pixel-centering degenerates at Nyquist).
struct FourierBasis {
    int i = 0, j = 0;           // centered position (canonical for its pair)
    int height = 0, width = 0;
    bool self_symmetric = false;
    std::complex<double> spectrum_value;  // coefficient at (i,j); conj at sym(i,j)
    std::vector<double> spatial;          // h*w, row-major
};

/// Position whose unshifted frequency is the negation of (i,j)'s;
/// sym(sym(p)) == p, and the spectrum center maps to itself.
std::pair<int, int> sym_index(int i, int j, int h, int w);

/// Horizontal-mirror position: column frequency negated, row kept. A
/// horizontal flip of the image moves spectral energy from (i,j) to here.
std::pair<int, int> mirror_index(int i, int j, int h, int w);

/// Representative of the symmetric pair {p, sym(p)}: the lexicographically
/// smaller of the two.
std::pair<int, int> canonical_index(int i, int j, int h, int w);

/// All canonical positions of an h×w grid in row-major order.
std::vector<std::pair<int, int>> canonical_positions(int h, int w);

/// Forward transform, unnormalized (DC coefficient = sum of pixels),
/// returned centered.
Spectrum dft2(std::span<const double> channel, int h, int w);

struct InverseResult {
    std::vector<double> real;
    double max_imag_residue = 0.0;  // reported, not thrown
};

/// Inverse transform with 1/(h*w) normalization; returns the real part and
/// the largest |imaginary| residue so callers can assert it is negligible.
InverseResult idft2(const Spectrum& spectrum);

FourierBasis fourier_basis(int i, int j, int h, int w);

/// One perturbation to apply: canonical centered position, channel index,
/// and the perturbation coefficient lambda.
struct PerturbEntry {
    int i = 0;
    int j = 0;
    int channel = 0;
    double lambda = 0.0;
};

/// Adds lambda * F(basis) to each addressed channel spectrum, inverts, takes
/// the real part and clips to [0,1]. Entries are canonicalized internally;
/// a duplicate (canonical position, channel) pair is an argument error.
/// When max_imag_residue is non-null it receives the largest |imaginary|
/// component observed before clipping.
Image perturb(const Image& image, std::span<const PerturbEntry> entries,
              double* max_imag_residue = nullptr);

}  // namespace fdwm
