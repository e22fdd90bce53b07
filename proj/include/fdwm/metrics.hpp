#pragma once

#include <filesystem>
#include <span>
#include <vector>

#include "fdwm/image.hpp"

namespace fdwm {

/// 10*log10(1/MSE) with MAX = 1, MSE over all pixels and channels;
/// identical images yield +infinity.
double psnr(const Image& a, const Image& b);

/// Single-scale SSIM: 8x8 uniform sliding window (stride 1), population
/// moments, C1 = 0.01^2, C2 = 0.03^2, averaged over windows and channels.
/// Requires min(h,w) >= 8.
double ssim(const Image& a, const Image& b);

/// Indicator of equality (the delta of Eq.-style accuracy sums).
inline int delta(int x, int y) { return x == y ? 1 : 0; }

struct QualityReport {
    std::vector<double> psnr_db;  // +inf sentinel allowed
    std::vector<double> ssim_value;
    double mean_psnr = 0.0;   // over finite entries only
    int psnr_excluded = 0;    // +inf entries left out of the mean
    double mean_ssim = 0.0;
};

QualityReport quality_report(std::span<const Image> originals,
                             std::span<const Image> perturbed);

/// CSV rows: pair id, psnr_db, ssim ("inf" for the sentinel).
void write_quality_csv(const std::filesystem::path& path, const QualityReport& report);

}  // namespace fdwm
