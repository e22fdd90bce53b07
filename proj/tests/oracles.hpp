// Test-only reference implementations, kept independent of the library code
// paths they check.
#pragma once

#include <array>
#include <cmath>
#include <complex>
#include <span>
#include <utility>
#include <vector>

namespace oracle {

constexpr double kPi = 3.14159265358979323846;

// Direct O(n^2) double-sum DFT, centered afterward by explicit index shift.
inline std::vector<std::complex<double>> dft2_centered(std::span<const double> x, int h, int w) {
    std::vector<std::complex<double>> out(static_cast<std::size_t>(h) * w);
    for (int u = 0; u < h; ++u)
        for (int v = 0; v < w; ++v) {
            std::complex<double> acc{0.0, 0.0};
            for (int a = 0; a < h; ++a)
                for (int b = 0; b < w; ++b) {
                    const double ang =
                        -2.0 * kPi * (static_cast<double>(u) * a / h + static_cast<double>(v) * b / w);
                    acc += x[static_cast<std::size_t>(a) * w + b] *
                           std::complex<double>(std::cos(ang), std::sin(ang));
                }
            const int ci = (u + h / 2) % h;
            const int cj = (v + w / 2) % w;
            out[static_cast<std::size_t>(ci) * w + cj] = acc;
        }
    return out;
}

// Symmetric position via the definition: unshift, negate modulo the grid,
// reshift.
inline std::pair<int, int> sym_position(int i, int j, int h, int w) {
    const int u = (i - h / 2 + h) % h;
    const int v = (j - w / 2 + w) % w;
    const int nu = (h - u) % h;
    const int nv = (w - v) % w;
    return {(nu + h / 2) % h, (nv + w / 2) % w};
}

// Plain Lloyd iterations from given initial centroids; same tie rules as the
// contract (nearest centroid, tie to the lower index), no fancy repairs.
struct Lloyd2Result {
    std::vector<int> assign;
    std::array<std::array<double, 2>, 2> centroids;
};

inline Lloyd2Result lloyd2(const std::vector<std::array<double, 2>>& pts,
                           std::array<std::array<double, 2>, 2> cent, int max_iters,
                           double tol) {
    const auto d2 = [](const std::array<double, 2>& a, const std::array<double, 2>& b) {
        return (a[0] - b[0]) * (a[0] - b[0]) + (a[1] - b[1]) * (a[1] - b[1]);
    };
    Lloyd2Result r;
    r.assign.assign(pts.size(), 0);
    for (int it = 0; it < max_iters; ++it) {
        for (std::size_t k = 0; k < pts.size(); ++k)
            r.assign[k] = d2(pts[k], cent[1]) < d2(pts[k], cent[0]) ? 1 : 0;
        std::array<std::array<double, 2>, 2> next{{{0.0, 0.0}, {0.0, 0.0}}};
        std::array<std::size_t, 2> n{0, 0};
        for (std::size_t k = 0; k < pts.size(); ++k) {
            next[r.assign[k]][0] += pts[k][0];
            next[r.assign[k]][1] += pts[k][1];
            ++n[r.assign[k]];
        }
        for (int c = 0; c < 2; ++c) {
            if (n[c] == 0) {  // mirror of the library's reseed rule
                std::size_t far = 0;
                double best = -1.0;
                for (std::size_t k = 0; k < pts.size(); ++k) {
                    const double dd = d2(pts[k], cent[r.assign[k]]);
                    if (dd > best) {
                        best = dd;
                        far = k;
                    }
                }
                next[c] = pts[far];
                r.assign[far] = c;
                n[c] = 1;
                next[1 - c] = {0.0, 0.0};
                n[1 - c] = 0;
                for (std::size_t k = 0; k < pts.size(); ++k)
                    if (r.assign[k] == 1 - c) {
                        next[1 - c][0] += pts[k][0];
                        next[1 - c][1] += pts[k][1];
                        ++n[1 - c];
                    }
            }
        }
        for (int c = 0; c < 2; ++c) {
            next[c][0] /= static_cast<double>(n[c]);
            next[c][1] /= static_cast<double>(n[c]);
        }
        const double move = std::sqrt(std::max(d2(cent[0], next[0]), d2(cent[1], next[1])));
        cent = next;
        if (move < tol) break;
    }
    for (std::size_t k = 0; k < pts.size(); ++k)
        r.assign[k] = d2(pts[k], cent[1]) < d2(pts[k], cent[0]) ? 1 : 0;
    r.centroids = cent;
    return r;
}

}  // namespace oracle
