#include "fdwm/attacks.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <sstream>
#include <stdexcept>

#include "fdwm/rng.hpp"
#include "fdwm/spectral.hpp"

namespace fdwm {

namespace {

// Annex-K base quantization tables (luminance, chrominance), row-major.
constexpr std::array<int, 64> kAnnexKLuma = {
    16, 11, 10, 16, 24,  40,  51,  61,   //
    12, 12, 14, 19, 26,  58,  60,  55,   //
    14, 13, 16, 24, 40,  57,  69,  56,   //
    14, 17, 22, 29, 51,  87,  80,  62,   //
    18, 22, 37, 56, 68,  109, 103, 77,   //
    24, 35, 55, 64, 81,  104, 113, 92,   //
    49, 64, 78, 87, 103, 121, 120, 101,  //
    72, 92, 95, 98, 112, 100, 103, 99};
constexpr std::array<int, 64> kAnnexKChroma = {
    17, 18, 24, 47, 99, 99, 99, 99,  //
    18, 21, 26, 66, 99, 99, 99, 99,  //
    24, 26, 56, 99, 99, 99, 99, 99,  //
    47, 66, 99, 99, 99, 99, 99, 99,  //
    99, 99, 99, 99, 99, 99, 99, 99,  //
    99, 99, 99, 99, 99, 99, 99, 99,  //
    99, 99, 99, 99, 99, 99, 99, 99,  //
    99, 99, 99, 99, 99, 99, 99, 99};

struct DctTables {
    // cos((2x+1)*u*pi/16) and the orthonormal scale factors
    double c[8][8];
    double alpha[8];
    DctTables() {
        for (int u = 0; u < 8; ++u) {
            alpha[u] = u == 0 ? std::sqrt(1.0 / 8.0) : std::sqrt(2.0 / 8.0);
            for (int x = 0; x < 8; ++x)
                c[x][u] = std::cos((2.0 * x + 1.0) * u * 3.14159265358979323846 / 16.0);
        }
    }
};

const DctTables& dct_tables() {
    static const DctTables t;
    return t;
}

void dct8x8(const double in[64], double out[64]) {
    const auto& t = dct_tables();
    double tmp[64];
    for (int x = 0; x < 8; ++x)
        for (int v = 0; v < 8; ++v) {
            double acc = 0.0;
            for (int y = 0; y < 8; ++y) acc += in[x * 8 + y] * t.c[y][v];
            tmp[x * 8 + v] = acc * t.alpha[v];
        }
    for (int v = 0; v < 8; ++v)
        for (int u = 0; u < 8; ++u) {
            double acc = 0.0;
            for (int x = 0; x < 8; ++x) acc += tmp[x * 8 + v] * t.c[x][u];
            out[u * 8 + v] = acc * t.alpha[u];
        }
}

void idct8x8(const double in[64], double out[64]) {
    const auto& t = dct_tables();
    double tmp[64];
    for (int u = 0; u < 8; ++u)
        for (int y = 0; y < 8; ++y) {
            double acc = 0.0;
            for (int v = 0; v < 8; ++v) acc += in[u * 8 + v] * t.alpha[v] * t.c[y][v];
            tmp[u * 8 + y] = acc;
        }
    for (int y = 0; y < 8; ++y)
        for (int x = 0; x < 8; ++x) {
            double acc = 0.0;
            for (int u = 0; u < 8; ++u) acc += tmp[u * 8 + y] * t.alpha[u] * t.c[x][u];
            out[x * 8 + y] = acc;
        }
}

// Lossy round trip of one padded component plane (values on the [0,255]
// scale, level shift applied around 128).
void jpeg_plane(std::vector<double>& plane, int ph, int pw, const std::array<int, 64>& table) {
    double block[64], coef[64];
    for (int by = 0; by < ph; by += 8)
        for (int bx = 0; bx < pw; bx += 8) {
            for (int y = 0; y < 8; ++y)
                for (int x = 0; x < 8; ++x)
                    block[y * 8 + x] = plane[static_cast<std::size_t>(by + y) * pw + bx + x] - 128.0;
            dct8x8(block, coef);
            for (int k = 0; k < 64; ++k)
                coef[k] = std::round(coef[k] / table[k]) * table[k];
            idct8x8(coef, block);
            for (int y = 0; y < 8; ++y)
                for (int x = 0; x < 8; ++x)
                    plane[static_cast<std::size_t>(by + y) * pw + bx + x] = block[y * 8 + x] + 128.0;
        }
}

std::vector<double> pad_replicate(std::span<const double> src, int h, int w, int ph, int pw) {
    std::vector<double> out(static_cast<std::size_t>(ph) * pw);
    for (int y = 0; y < ph; ++y) {
        const int sy = std::min(y, h - 1);
        for (int x = 0; x < pw; ++x)
            out[static_cast<std::size_t>(y) * pw + x] =
                src[static_cast<std::size_t>(sy) * w + std::min(x, w - 1)];
    }
    return out;
}

}  // namespace

std::string AttackDescriptor::to_string() const {
    std::ostringstream os;
    switch (kind) {
        case Kind::Finetune:
            os << "finetune:epochs=" << epochs << ",fraction=" << fraction;
            break;
        case Kind::Prune:
            os << "prune:rate=" << rate;
            break;
        case Kind::Jpeg:
            os << "jpeg:qf=" << qf;
            break;
        case Kind::Hflip:
            os << "hflip";
            break;
        case Kind::Lowpass:
            os << "lowpass:B=" << bandwidth;
            break;
    }
    return os.str();
}

AttackDescriptor AttackDescriptor::parse(const std::string& text) {
    AttackDescriptor d;
    const auto colon = text.find(':');
    const std::string name = text.substr(0, colon);
    if (name == "finetune") d.kind = Kind::Finetune;
    else if (name == "prune") d.kind = Kind::Prune;
    else if (name == "jpeg") d.kind = Kind::Jpeg;
    else if (name == "hflip") d.kind = Kind::Hflip;
    else if (name == "lowpass") d.kind = Kind::Lowpass;
    else throw std::invalid_argument("attack: unknown kind '" + name + "'");

    if (colon != std::string::npos) {
        std::stringstream ss(text.substr(colon + 1));
        std::string kv;
        while (std::getline(ss, kv, ',')) {
            const auto eq = kv.find('=');
            if (eq == std::string::npos)
                throw std::invalid_argument("attack: bad parameter '" + kv + "'");
            const std::string key = kv.substr(0, eq);
            const std::string val = kv.substr(eq + 1);
            if (key == "epochs") d.epochs = std::stoi(val);
            else if (key == "fraction") d.fraction = std::stod(val);
            else if (key == "rate") d.rate = std::stod(val);
            else if (key == "qf") d.qf = std::stoi(val);
            else if (key == "B") d.bandwidth = std::stoi(val);
            else if (key == "seed") d.seed = std::stoull(val);
            else throw std::invalid_argument("attack: unknown parameter '" + key + "'");
        }
    }
    if (d.kind == Kind::Prune && (d.rate < 0.0 || d.rate > 1.0))
        throw std::invalid_argument("attack: prune rate must be in [0,1]");
    if (d.kind == Kind::Jpeg && (d.qf < 1 || d.qf > 100))
        throw std::invalid_argument("attack: jpeg qf must be in [1,100]");
    if (d.kind == Kind::Finetune && !(d.fraction > 0.0 && d.fraction <= 1.0))
        throw std::invalid_argument("attack: finetune fraction must be in (0,1]");
    return d;
}

Classifier finetune(const Classifier& model, std::span<const LabeledSample> val_samples,
                    double fraction, int epochs, const TrainConfig& cfg) {
    if (!(fraction > 0.0 && fraction <= 1.0))
        throw std::invalid_argument("finetune: fraction must be in (0,1]");
    const std::size_t take =
        std::max<std::size_t>(1, static_cast<std::size_t>(fraction * val_samples.size()));
    if (val_samples.empty()) throw std::invalid_argument("finetune: empty validation set");
    Rng rng(mix64(cfg.seed, 0xF1DEull));
    const auto idx = rng.sample_without_replacement(val_samples.size(), take);
    std::vector<LabeledSample> selected;
    selected.reserve(idx.size());
    for (auto i : idx) selected.push_back(val_samples[i]);

    Classifier tuned = model;
    if (epochs > 0) {
        TrainConfig ft = cfg;
        ft.epochs = epochs;
        train(tuned, selected, {}, ft);
    }
    return tuned;
}

Classifier prune_l1(const Classifier& model, double rate) {
    if (rate < 0.0 || rate > 1.0) throw std::invalid_argument("prune_l1: rate must be in [0,1]");
    struct Ref {
        double mag;
        std::size_t tensor, index;
    };
    std::vector<Ref> weights;
    for (std::size_t t = 0; t < model.params.size(); ++t) {
        if (!model.param_is_weight[t]) continue;
        for (std::size_t i = 0; i < model.params[t].size(); ++i)
            weights.push_back({std::abs(model.params[t].v[i]), t, i});
    }
    const std::size_t n_zero = static_cast<std::size_t>(rate * static_cast<double>(weights.size()));
    // stable sort keeps tensor-then-index order among equal magnitudes
    std::stable_sort(weights.begin(), weights.end(),
                     [](const Ref& a, const Ref& b) { return a.mag < b.mag; });
    Classifier pruned = model;
    for (std::size_t k = 0; k < n_zero; ++k)
        pruned.params[weights[k].tensor].v[weights[k].index] = 0.0;
    return pruned;
}

JpegTables jpeg_tables(int qf) {
    if (qf < 1 || qf > 100) throw std::invalid_argument("jpeg_tables: qf must be in [1,100]");
    const double scale = qf >= 50 ? (200.0 - 2.0 * qf) / 100.0 : 50.0 / qf;
    JpegTables t;
    for (int k = 0; k < 64; ++k) {
        t.luma[k] = std::clamp(static_cast<int>(std::round(kAnnexKLuma[k] * scale)), 1, 255);
        t.chroma[k] = std::clamp(static_cast<int>(std::round(kAnnexKChroma[k] * scale)), 1, 255);
    }
    return t;
}

Image jpeg(const Image& image, int qf) {
    if (image.channels != 1 && image.channels != 3)
        throw std::invalid_argument("jpeg: channel count must be 1 or 3");
    const JpegTables tables = jpeg_tables(qf);
    const int h = image.height, w = image.width;
    const int ph = (h + 7) / 8 * 8, pw = (w + 7) / 8 * 8;

    // component planes on the [0,255] scale
    std::vector<std::vector<double>> planes;
    if (image.channels == 1) {
        std::vector<double> y(static_cast<std::size_t>(h) * w);
        const auto src = image.channel(0);
        for (std::size_t k = 0; k < y.size(); ++k) y[k] = src[k] * 255.0;
        planes.push_back(std::move(y));
    } else {
        std::vector<double> y(static_cast<std::size_t>(h) * w), cb(y.size()), cr(y.size());
        const auto r = image.channel(0), g = image.channel(1), b = image.channel(2);
        for (std::size_t k = 0; k < y.size(); ++k) {
            const double R = r[k] * 255.0, G = g[k] * 255.0, B = b[k] * 255.0;
            y[k] = 0.299 * R + 0.587 * G + 0.114 * B;
            cb[k] = -0.168735892 * R - 0.331264108 * G + 0.5 * B + 128.0;
            cr[k] = 0.5 * R - 0.418687589 * G - 0.081312411 * B + 128.0;
        }
        planes.push_back(std::move(y));
        planes.push_back(std::move(cb));
        planes.push_back(std::move(cr));
    }

    for (std::size_t c = 0; c < planes.size(); ++c) {
        auto padded = pad_replicate(planes[c], h, w, ph, pw);
        jpeg_plane(padded, ph, pw, c == 0 ? tables.luma : tables.chroma);
        for (int yy = 0; yy < h; ++yy)
            for (int xx = 0; xx < w; ++xx)
                planes[c][static_cast<std::size_t>(yy) * w + xx] =
                    padded[static_cast<std::size_t>(yy) * pw + xx];
    }

    Image out(h, w, image.channels);
    if (image.channels == 1) {
        auto dst = out.channel(0);
        for (std::size_t k = 0; k < dst.size(); ++k) dst[k] = clamp01(planes[0][k] / 255.0);
    } else {
        auto r = out.channel(0);
        auto g = out.channel(1);
        auto b = out.channel(2);
        for (std::size_t k = 0; k < r.size(); ++k) {
            const double Y = planes[0][k], Cb = planes[1][k] - 128.0, Cr = planes[2][k] - 128.0;
            r[k] = clamp01((Y + 1.402 * Cr) / 255.0);
            g[k] = clamp01((Y - 0.344136286 * Cb - 0.714136286 * Cr) / 255.0);
            b[k] = clamp01((Y + 1.772 * Cb) / 255.0);
        }
    }
    return out;
}

Image hflip(const Image& image) {
    Image out(image.height, image.width, image.channels);
    for (int c = 0; c < image.channels; ++c)
        for (int y = 0; y < image.height; ++y)
            for (int x = 0; x < image.width; ++x)
                out.at(c, y, x) = image.at(c, y, image.width - 1 - x);
    return out;
}

Image lowpass(const Image& image, int bandwidth, bool clip) {
    const int h = image.height, w = image.width;
    if (bandwidth < 0 || bandwidth > std::min(h, w))
        throw std::invalid_argument("lowpass: bandwidth must be in [0, min(h,w)]");
    const int ci = h / 2, cj = w / 2;
    const int i_lo = ci - bandwidth / 2, i_hi = ci + (bandwidth + 1) / 2;  // [lo, hi)
    const int j_lo = cj - bandwidth / 2, j_hi = cj + (bandwidth + 1) / 2;

    Image out(h, w, image.channels);
    for (int c = 0; c < image.channels; ++c) {
        Spectrum s = dft2(image.channel(c), h, w);
        for (int i = 0; i < h; ++i)
            for (int j = 0; j < w; ++j)
                if (i < i_lo || i >= i_hi || j < j_lo || j >= j_hi) s.at(i, j) = {0.0, 0.0};
        const InverseResult inv = idft2(s);
        auto dst = out.channel(c);
        for (std::size_t k = 0; k < dst.size(); ++k)
            dst[k] = clip ? clamp01(inv.real[k]) : inv.real[k];
    }
    return out;
}

std::vector<LabeledSample> augment_uda(std::span<const LabeledSample> train_set,
                                       const AttackDescriptor& attack) {
    if (!attack.image_attack())
        throw std::invalid_argument("augment_uda: only image attacks can augment training data");
    std::vector<LabeledSample> out(train_set.begin(), train_set.end());
    out.reserve(train_set.size() * 2);
    for (const auto& s : train_set) {
        LabeledSample a = s;
        a.image = apply_image_attack(attack, s.image);
        out.push_back(std::move(a));
    }
    return out;
}

Image apply_image_attack(const AttackDescriptor& attack, const Image& image) {
    switch (attack.kind) {
        case AttackDescriptor::Kind::Jpeg: return jpeg(image, attack.qf);
        case AttackDescriptor::Kind::Hflip: return hflip(image);
        case AttackDescriptor::Kind::Lowpass: return lowpass(image, attack.bandwidth);
        default:
            throw std::invalid_argument("apply_image_attack: '" + attack.to_string() +
                                        "' is a model attack");
    }
}

Classifier apply_model_attack(const AttackDescriptor& attack, const Classifier& model,
                              std::span<const LabeledSample> val_samples,
                              const TrainConfig& base_cfg) {
    switch (attack.kind) {
        case AttackDescriptor::Kind::Finetune: {
            TrainConfig cfg = base_cfg;
            cfg.seed = mix64(base_cfg.seed, attack.seed);
            return finetune(model, val_samples, attack.fraction, attack.epochs, cfg);
        }
        case AttackDescriptor::Kind::Prune:
            return prune_l1(model, attack.rate);
        default:
            throw std::invalid_argument("apply_model_attack: '" + attack.to_string() +
                                        "' is an image attack");
    }
}

}  // namespace fdwm
