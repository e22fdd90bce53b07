#include "fdwm/spectral.hpp"

#include <algorithm>
#include <cmath>
#include <set>
#include <stdexcept>

namespace fdwm {

namespace {

constexpr double kTau = 6.283185307179586476925286766559;

// Exp table for one dimension: w_n[k] = exp(-i * 2*pi * k / n), k in [0, n).
std::vector<std::complex<double>> twiddles(int n, double sign) {
    std::vector<std::complex<double>> w(n);
    for (int k = 0; k < n; ++k) {
        double a = sign * kTau * k / n;
        w[k] = {std::cos(a), std::sin(a)};
    }
    return w;
}

// 1D transform of every row of a row-major h×w complex buffer (length-w
// transforms), unnormalized, via direct summation with an exponent table.
// sign = -1 forward, +1 inverse.
void transform_rows(std::vector<std::complex<double>>& a, int h, int w, double sign) {
    const auto tw = twiddles(w, sign);
    std::vector<std::complex<double>> row(w);
    for (int r = 0; r < h; ++r) {
        std::complex<double>* p = a.data() + static_cast<std::size_t>(r) * w;
        for (int v = 0; v < w; ++v) {
            std::complex<double> acc{0.0, 0.0};
            for (int y = 0; y < w; ++y) acc += p[y] * tw[(static_cast<long long>(v) * y) % w];
            row[v] = acc;
        }
        std::copy(row.begin(), row.end(), p);
    }
}

void transform_cols(std::vector<std::complex<double>>& a, int h, int w, double sign) {
    const auto tw = twiddles(h, sign);
    std::vector<std::complex<double>> col(h);
    for (int c = 0; c < w; ++c) {
        for (int u = 0; u < h; ++u) {
            std::complex<double> acc{0.0, 0.0};
            for (int x = 0; x < h; ++x)
                acc += a[static_cast<std::size_t>(x) * w + c] * tw[(static_cast<long long>(u) * x) % h];
            col[u] = acc;
        }
        for (int u = 0; u < h; ++u) a[static_cast<std::size_t>(u) * w + c] = col[u];
    }
}

inline int shift_index(int u, int n) { return (u + n / 2) % n; }    // unshifted -> centered
inline int unshift_index(int i, int n) { return (i - n / 2 + n) % n; }

}  // namespace

std::pair<int, int> sym_index(int i, int j, int h, int w) {
    const int u = unshift_index(i, h);
    const int v = unshift_index(j, w);
    const int un = (h - u) % h;
    const int vn = (w - v) % w;
    return {shift_index(un, h), shift_index(vn, w)};
}

std::pair<int, int> mirror_index(int i, int j, int h, int w) {
    const int v = unshift_index(j, w);
    return {i, shift_index((w - v) % w, w)};
}

std::pair<int, int> canonical_index(int i, int j, int h, int w) {
    const auto s = sym_index(i, j, h, w);
    return std::min(std::pair<int, int>{i, j}, s);
}

std::vector<std::pair<int, int>> canonical_positions(int h, int w) {
    std::vector<std::pair<int, int>> out;
    out.reserve(static_cast<std::size_t>(h) * w / 2 + 2);
    for (int i = 0; i < h; ++i)
        for (int j = 0; j < w; ++j)
            if (canonical_index(i, j, h, w) == std::pair<int, int>{i, j})
                out.emplace_back(i, j);
    return out;
}

Spectrum dft2(std::span<const double> channel, int h, int w) {
    if (h < 1 || w < 1) throw std::invalid_argument("dft2: dimensions must be >= 1");
    if (channel.size() != static_cast<std::size_t>(h) * w)
        throw std::invalid_argument("dft2: buffer size does not match dimensions");
    std::vector<std::complex<double>> a(channel.size());
    for (std::size_t k = 0; k < channel.size(); ++k) a[k] = {channel[k], 0.0};
    transform_rows(a, h, w, -1.0);
    transform_cols(a, h, w, -1.0);
    Spectrum s(h, w);
    for (int u = 0; u < h; ++u)
        for (int v = 0; v < w; ++v)
            s.at(shift_index(u, h), shift_index(v, w)) = a[static_cast<std::size_t>(u) * w + v];
    return s;
}

InverseResult idft2(const Spectrum& spectrum) {
    const int h = spectrum.height, w = spectrum.width;
    std::vector<std::complex<double>> a(static_cast<std::size_t>(h) * w);
    for (int i = 0; i < h; ++i)
        for (int j = 0; j < w; ++j)
            a[static_cast<std::size_t>(unshift_index(i, h)) * w + unshift_index(j, w)] =
                spectrum.at(i, j);
    transform_rows(a, h, w, +1.0);
    transform_cols(a, h, w, +1.0);
    InverseResult r;
    r.real.resize(a.size());
    const double norm = 1.0 / (static_cast<double>(h) * w);
    for (std::size_t k = 0; k < a.size(); ++k) {
        r.real[k] = a[k].real() * norm;
        r.max_imag_residue = std::max(r.max_imag_residue, std::abs(a[k].imag() * norm));
    }
    return r;
}

FourierBasis fourier_basis(int i, int j, int h, int w) {
    if (i < 0 || i >= h || j < 0 || j >= w)
        throw std::invalid_argument("fourier_basis: position out of range");
    FourierBasis b;
    const auto canon = canonical_index(i, j, h, w);
    b.i = canon.first;
    b.j = canon.second;
    b.height = h;
    b.width = w;
    b.self_symmetric = (sym_index(i, j, h, w) == std::pair<int, int>{i, j});

    // Signed frequencies: the half-integer pixel center makes aliased
    // frequency representatives (u vs u-h) differ by a pi phase, so the
    // choice matters.
    const int u_s = b.i - h / 2;
    const int v_s = b.j - w / 2;
    // Unit spatial norm fixes the spectrum magnitude: sum of cos^2 over the
    // grid is hw for a self-symmetric frequency and hw/2 otherwise.
    const double hw = static_cast<double>(h) * w;
    const double amp = b.self_symmetric ? 1.0 / std::sqrt(hw) : std::sqrt(2.0 / hw);
    const double theta =
        b.self_symmetric ? 0.0
                         : -kTau * (u_s * ((h - 1) / 2.0) / h + v_s * ((w - 1) / 2.0) / w);
    b.spectrum_value = (b.self_symmetric ? std::sqrt(hw) : std::sqrt(hw / 2.0)) *
                       std::complex<double>(std::cos(theta), std::sin(theta));

    b.spatial.resize(static_cast<std::size_t>(h) * w);
    for (int x = 0; x < h; ++x)
        for (int y = 0; y < w; ++y)
            b.spatial[static_cast<std::size_t>(x) * w + y] =
                amp * std::cos(kTau * (static_cast<double>(u_s) * x / h +
                                       static_cast<double>(v_s) * y / w) +
                               theta);
    return b;
}

Image perturb(const Image& image, std::span<const PerturbEntry> entries,
              double* max_imag_residue) {
    const int h = image.height, w = image.width;
    std::set<std::pair<std::pair<int, int>, int>> seen;
    std::vector<PerturbEntry> canon(entries.begin(), entries.end());
    for (auto& e : canon) {
        if (e.i < 0 || e.i >= h || e.j < 0 || e.j >= w)
            throw std::invalid_argument("perturb: position out of range");
        if (e.channel < 0 || e.channel >= image.channels)
            throw std::invalid_argument("perturb: channel out of range");
        const auto c = canonical_index(e.i, e.j, h, w);
        if (!seen.insert({c, e.channel}).second)
            throw std::invalid_argument("perturb: duplicate (position, channel) entry");
        e.i = c.first;
        e.j = c.second;
    }

    Image out = image;
    double residue = 0.0;
    for (int k = 0; k < image.channels; ++k) {
        bool touched = false;
        for (const auto& e : canon) touched |= (e.channel == k);
        if (!touched) continue;

        Spectrum s = dft2(image.channel(k), h, w);
        for (const auto& e : canon) {
            if (e.channel != k) continue;
            const FourierBasis b = fourier_basis(e.i, e.j, h, w);
            s.at(b.i, b.j) += e.lambda * b.spectrum_value;
            if (!b.self_symmetric) {
                const auto sp = sym_index(b.i, b.j, h, w);
                s.at(sp.first, sp.second) += e.lambda * std::conj(b.spectrum_value);
            }
        }
        InverseResult inv = idft2(s);
        residue = std::max(residue, inv.max_imag_residue);
        auto ch = out.channel(k);
        for (std::size_t p = 0; p < ch.size(); ++p) ch[p] = clamp01(inv.real[p]);
    }
    if (max_imag_residue) *max_imag_residue = residue;
    return out;
}

}  // namespace fdwm
