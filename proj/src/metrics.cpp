#include "fdwm/metrics.hpp"

#include <cmath>
#include <fstream>
#include <limits>
#include <stdexcept>

namespace fdwm {

double psnr(const Image& a, const Image& b) {
    if (!a.same_shape(b)) throw std::invalid_argument("psnr: image dims differ");
    double mse = 0.0;
    for (std::size_t k = 0; k < a.pixels.size(); ++k) {
        const double d = a.pixels[k] - b.pixels[k];
        mse += d * d;
    }
    mse /= static_cast<double>(a.pixels.size());
    if (mse == 0.0) return std::numeric_limits<double>::infinity();
    return 10.0 * std::log10(1.0 / mse);
}

double ssim(const Image& a, const Image& b) {
    if (!a.same_shape(b)) throw std::invalid_argument("ssim: image dims differ");
    constexpr int kWin = 8;
    if (a.height < kWin || a.width < kWin)
        throw std::invalid_argument("ssim: images smaller than the 8x8 window");
    constexpr double kC1 = 0.01 * 0.01;
    constexpr double kC2 = 0.03 * 0.03;
    constexpr double kInvN = 1.0 / (kWin * kWin);

    double total = 0.0;
    std::size_t windows = 0;
    for (int c = 0; c < a.channels; ++c) {
        const auto pa = a.channel(c);
        const auto pb = b.channel(c);
        for (int y = 0; y + kWin <= a.height; ++y)
            for (int x = 0; x + kWin <= a.width; ++x) {
                double sx = 0.0, sy = 0.0, sxx = 0.0, syy = 0.0, sxy = 0.0;
                for (int dy = 0; dy < kWin; ++dy) {
                    const double* ra = pa.data() + static_cast<std::size_t>(y + dy) * a.width + x;
                    const double* rb = pb.data() + static_cast<std::size_t>(y + dy) * a.width + x;
                    for (int dx = 0; dx < kWin; ++dx) {
                        sx += ra[dx];
                        sy += rb[dx];
                        sxx += ra[dx] * ra[dx];
                        syy += rb[dx] * rb[dx];
                        sxy += ra[dx] * rb[dx];
                    }
                }
                const double mx = sx * kInvN, my = sy * kInvN;
                const double vx = sxx * kInvN - mx * mx;
                const double vy = syy * kInvN - my * my;
                const double cov = sxy * kInvN - mx * my;
                total += ((2.0 * mx * my + kC1) * (2.0 * cov + kC2)) /
                         ((mx * mx + my * my + kC1) * (vx + vy + kC2));
                ++windows;
            }
    }
    return total / static_cast<double>(windows);
}

QualityReport quality_report(std::span<const Image> originals,
                             std::span<const Image> perturbed) {
    if (originals.size() != perturbed.size())
        throw std::invalid_argument("quality_report: list sizes differ");
    if (originals.empty()) throw std::invalid_argument("quality_report: empty lists");
    QualityReport r;
    double psnr_sum = 0.0, ssim_sum = 0.0;
    for (std::size_t k = 0; k < originals.size(); ++k) {
        const double p = psnr(originals[k], perturbed[k]);
        const double s = ssim(originals[k], perturbed[k]);
        r.psnr_db.push_back(p);
        r.ssim_value.push_back(s);
        if (std::isinf(p))
            ++r.psnr_excluded;
        else
            psnr_sum += p;
        ssim_sum += s;
    }
    const int finite = static_cast<int>(originals.size()) - r.psnr_excluded;
    r.mean_psnr = finite > 0 ? psnr_sum / finite : std::numeric_limits<double>::infinity();
    r.mean_ssim = ssim_sum / static_cast<double>(originals.size());
    return r;
}

void write_quality_csv(const std::filesystem::path& path, const QualityReport& report) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("write_quality_csv: cannot open " + path.string());
    out << "pair,psnr_db,ssim\n";
    for (std::size_t k = 0; k < report.psnr_db.size(); ++k) {
        out << k << ",";
        if (std::isinf(report.psnr_db[k]))
            out << "inf";
        else
            out << report.psnr_db[k];
        out << "," << report.ssim_value[k] << "\n";
    }
    if (!out) throw std::runtime_error("write_quality_csv: write failed for " + path.string());
}

}  // namespace fdwm
