#pragma once

#include <cstdint>
#include <filesystem>
#include <span>
#include <string>
#include <vector>

#include "fdwm/image.hpp"
#include "fdwm/nn.hpp"

namespace fdwm {

/// Per-frequency test-error surface of a classifier, point-symmetric about
/// the spectrum center by construction.
struct FourierHeatMap {
    int height = 0;
    int width = 0;
    std::vector<double> t;  // row-major, centered coords, values in [0,1]

    // provenance
    std::string model_id;
    int samples_per_freq = 0;
    double lambda_lo = 0.0, lambda_hi = 0.0;
    std::uint64_t seed = 0;

    double at(int i, int j) const { return t[static_cast<std::size_t>(i) * width + j]; }
};

/// Binary thresholding of the heat map: 1 iff t >= rho (inclusive).
struct SensitivityMap {
    int height = 0;
    int width = 0;
    double rho = 0.0;
    std::vector<std::uint8_t> s;

    std::uint8_t at(int i, int j) const { return s[static_cast<std::size_t>(i) * width + j]; }
    std::size_t ones() const {
        std::size_t n = 0;
        for (auto v : s) n += v;
        return n;
    }
};

struct HeatmapConfig {
    int samples_per_freq = 256;
    double lambda_lo = -1.0;
    double lambda_hi = 1.0;
    std::uint64_t seed = 0;
    int threads = 1;  // results are identical for any thread count
};

/// Sweeps every canonical frequency position: the same seeded sample draw is
/// perturbed with per-(position, draw, channel) lambdas and classified; the
/// error rate is written at the position and its symmetric partner.
FourierHeatMap compute_heatmap(const Classifier& model,
                               std::span<const LabeledSample> eval_set,
                               const HeatmapConfig& cfg);

SensitivityMap sensitivity_map(const FourierHeatMap& heatmap, double rho);

/// Writes <base>.fdwm (tensor), <base>.pgm (8-bit rendering) and
/// <base>.meta (key=value sidecar).
void export_heatmap(const FourierHeatMap& heatmap, const std::filesystem::path& base);

FourierHeatMap import_heatmap(const std::filesystem::path& base);

}  // namespace fdwm
