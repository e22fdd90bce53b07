#include "fdwm/heatmap.hpp"

#include <algorithm>
#include <fstream>
#include <map>
#include <stdexcept>
#include <thread>

#include "fdwm/rng.hpp"
#include "fdwm/spectral.hpp"
#include "fdwm/tensor_io.hpp"

namespace fdwm {

FourierHeatMap compute_heatmap(const Classifier& model,
                               std::span<const LabeledSample> eval_set,
                               const HeatmapConfig& cfg) {
    if (eval_set.empty()) throw std::invalid_argument("compute_heatmap: empty eval set");
    if (cfg.lambda_lo > cfg.lambda_hi)
        throw std::invalid_argument("compute_heatmap: lambda_lo > lambda_hi");
    if (cfg.samples_per_freq < 1)
        throw std::invalid_argument("compute_heatmap: samples_per_freq must be >= 1");

    const int h = eval_set[0].image.height;
    const int w = eval_set[0].image.width;
    const int d = eval_set[0].image.channels;
    for (const auto& s : eval_set)
        if (s.image.height != h || s.image.width != w || s.image.channels != d)
            throw std::invalid_argument("compute_heatmap: mixed image shapes in eval set");

    // One sample draw shared by every position: with replacement only when
    // the eval set is smaller than the requested count.
    const std::size_t n = eval_set.size();
    const std::size_t spf = static_cast<std::size_t>(cfg.samples_per_freq);
    std::vector<std::size_t> draw;
    Rng draw_rng(mix64(cfg.seed, 0xD0A7ull));
    if (spf <= n) {
        draw = draw_rng.sample_without_replacement(n, spf);
    } else {
        draw.resize(spf);
        for (auto& idx : draw) idx = draw_rng.index(n);
    }

    const auto positions = canonical_positions(h, w);

    // The forward transform of each drawn sample does not depend on the
    // swept position; cache it so each draw only pays for the coefficient
    // update and the inverse transform (the Eq.-route stays intact).
    std::vector<std::size_t> slot_of(n, static_cast<std::size_t>(-1));
    std::vector<std::vector<Spectrum>> spectra;
    std::vector<int> labels;
    for (auto idx : draw)
        if (slot_of[idx] == static_cast<std::size_t>(-1)) {
            slot_of[idx] = spectra.size();
            std::vector<Spectrum> per_channel;
            per_channel.reserve(d);
            for (int c = 0; c < d; ++c)
                per_channel.push_back(dft2(eval_set[idx].image.channel(c), h, w));
            spectra.push_back(std::move(per_channel));
            labels.push_back(eval_set[idx].label);
        }

    FourierHeatMap hm;
    hm.height = h;
    hm.width = w;
    hm.t.assign(static_cast<std::size_t>(h) * w, 0.0);
    hm.samples_per_freq = cfg.samples_per_freq;
    hm.lambda_lo = cfg.lambda_lo;
    hm.lambda_hi = cfg.lambda_hi;
    hm.seed = cfg.seed;

    const auto worker = [&](std::size_t begin, std::size_t end) {
        Predictor pred(model);
        Image buf(h, w, d);
        Spectrum scratch(h, w);
        for (std::size_t pi = begin; pi < end; ++pi) {
            const auto [i, j] = positions[pi];
            const FourierBasis basis = fourier_basis(i, j, h, w);
            const auto sym = sym_index(basis.i, basis.j, h, w);
            // Position-keyed stream: results are independent of how
            // positions are distributed over threads.
            Rng rng(mix64(cfg.seed, mix64(static_cast<std::uint64_t>(i) + 1,
                                          static_cast<std::uint64_t>(j) + 1)));
            std::size_t errors = 0;
            for (std::size_t k = 0; k < draw.size(); ++k) {
                const std::size_t slot = slot_of[draw[k]];
                for (int c = 0; c < d; ++c) {
                    const double lambda = rng.uniform(cfg.lambda_lo, cfg.lambda_hi);
                    scratch = spectra[slot][c];
                    scratch.at(basis.i, basis.j) += lambda * basis.spectrum_value;
                    if (!basis.self_symmetric)
                        scratch.at(sym.first, sym.second) +=
                            lambda * std::conj(basis.spectrum_value);
                    const InverseResult inv = idft2(scratch);
                    auto ch = buf.channel(c);
                    for (std::size_t p = 0; p < ch.size(); ++p) ch[p] = clamp01(inv.real[p]);
                }
                errors += (pred.predict(buf) != labels[slot]);
            }
            const double err = static_cast<double>(errors) / static_cast<double>(draw.size());
            hm.t[static_cast<std::size_t>(i) * w + j] = err;
            const auto [si, sj] = sym_index(i, j, h, w);
            hm.t[static_cast<std::size_t>(si) * w + sj] = err;
        }
    };

    const int threads = std::max(1, cfg.threads);
    if (threads == 1 || positions.size() < 2) {
        worker(0, positions.size());
    } else {
        std::vector<std::thread> pool;
        const std::size_t chunk = (positions.size() + threads - 1) / threads;
        for (int t = 0; t < threads; ++t) {
            const std::size_t b = std::min(positions.size(), t * chunk);
            const std::size_t e = std::min(positions.size(), b + chunk);
            if (b < e) pool.emplace_back(worker, b, e);
        }
        for (auto& th : pool) th.join();
    }
    return hm;
}

SensitivityMap sensitivity_map(const FourierHeatMap& heatmap, double rho) {
    if (!(rho >= 0.0 && rho <= 1.0))
        throw std::invalid_argument("sensitivity_map: rho must be in [0,1]");
    SensitivityMap sm;
    sm.height = heatmap.height;
    sm.width = heatmap.width;
    sm.rho = rho;
    sm.s.resize(heatmap.t.size());
    for (std::size_t k = 0; k < heatmap.t.size(); ++k)
        sm.s[k] = heatmap.t[k] >= rho ? 1 : 0;
    return sm;
}

void export_heatmap(const FourierHeatMap& hm, const std::filesystem::path& base) {
    TensorFile t;
    t.dims = {static_cast<std::uint32_t>(hm.height), static_cast<std::uint32_t>(hm.width)};
    t.values = hm.t;
    std::filesystem::path tensor_path = base;
    tensor_path += ".fdwm";
    write_tensor(tensor_path, t);

    std::filesystem::path pgm_path = base;
    pgm_path += ".pgm";
    write_pgm(pgm_path, hm.t, hm.height, hm.width);

    std::filesystem::path meta_path = base;
    meta_path += ".meta";
    std::ofstream meta(meta_path);
    if (!meta) throw std::runtime_error("export_heatmap: cannot open " + meta_path.string());
    meta << "model_id=" << hm.model_id << "\n"
         << "samples_per_freq=" << hm.samples_per_freq << "\n"
         << "lambda_lo=" << hm.lambda_lo << "\n"
         << "lambda_hi=" << hm.lambda_hi << "\n"
         << "seed=" << hm.seed << "\n"
         << "height=" << hm.height << "\n"
         << "width=" << hm.width << "\n";
    if (!meta) throw std::runtime_error("export_heatmap: write failed for " + meta_path.string());
}

FourierHeatMap import_heatmap(const std::filesystem::path& base) {
    std::filesystem::path tensor_path = base;
    tensor_path += ".fdwm";
    TensorFile t = read_tensor(tensor_path);
    if (t.dims.size() != 2) throw std::runtime_error("import_heatmap: expected rank-2 tensor");
    FourierHeatMap hm;
    hm.height = static_cast<int>(t.dims[0]);
    hm.width = static_cast<int>(t.dims[1]);
    hm.t = std::move(t.values);

    std::filesystem::path meta_path = base;
    meta_path += ".meta";
    std::ifstream meta(meta_path);
    if (meta) {
        std::string line;
        std::map<std::string, std::string> kv;
        while (std::getline(meta, line)) {
            const auto eq = line.find('=');
            if (eq != std::string::npos) kv[line.substr(0, eq)] = line.substr(eq + 1);
        }
        if (kv.count("model_id")) hm.model_id = kv["model_id"];
        if (kv.count("samples_per_freq")) hm.samples_per_freq = std::stoi(kv["samples_per_freq"]);
        if (kv.count("lambda_lo")) hm.lambda_lo = std::stod(kv["lambda_lo"]);
        if (kv.count("lambda_hi")) hm.lambda_hi = std::stod(kv["lambda_hi"]);
        if (kv.count("seed")) hm.seed = std::stoull(kv["seed"]);
    }
    return hm;
}

}  // namespace fdwm
