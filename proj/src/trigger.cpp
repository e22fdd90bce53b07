#include "fdwm/trigger.hpp"

#include <algorithm>
#include <cmath>
#include <cstring>
#include <map>
#include <stdexcept>

#include "fdwm/rng.hpp"

namespace fdwm {

std::uint64_t PerturbationKey::fingerprint() const {
    std::uint64_t h = mix64(0xF17E9ull, seed);
    std::uint64_t lo_bits, hi_bits;
    static_assert(sizeof(double) == 8);
    std::memcpy(&lo_bits, &lo, 8);
    std::memcpy(&hi_bits, &hi, 8);
    h = mix64(h, lo_bits);
    h = mix64(h, hi_bits);
    h = mix64(h, per_channel ? 1 : 0);
    return mix64(h, 0x0FD17ull);  // second pass, digest only
}

double auto_intensity(const ClusteringMap& mask, double psnr_db) {
    const std::size_t m = mask.canonical_ones().size();
    if (m == 0) throw std::invalid_argument("auto_intensity: empty clustering map");
    const double target_mse = std::pow(10.0, -psnr_db / 10.0);
    const double a =
        std::sqrt(3.0 * target_mse * mask.height * mask.width / static_cast<double>(m));
    return std::min(a, 1.0);
}

std::vector<PerturbEntry> derive_lambdas(const PerturbationKey& key, const ClusteringMap& mask,
                                         int channels) {
    if (key.lo > key.hi) throw std::invalid_argument("derive_lambdas: lo > hi");
    if (channels < 1) throw std::invalid_argument("derive_lambdas: channels must be >= 1");
    const auto ones = mask.canonical_ones();
    if (ones.empty()) throw std::invalid_argument("derive_lambdas: empty clustering map");
    std::vector<PerturbEntry> entries;
    entries.reserve(ones.size() * channels);
    for (const auto& [i, j] : ones) {
        // Key the stream on the flip orbit {p, sym(p), mirror(p),
        // sym(mirror(p))}: axis-mirrored mask positions then share their
        // coefficient, which together with the pixel-centered basis phase
        // makes the embedded pattern invariant under horizontal flips
        // whenever the map itself is mirror-symmetric.
        const auto m = mirror_index(i, j, mask.height, mask.width);
        auto rep = canonical_index(i, j, mask.height, mask.width);
        rep = std::min(rep, canonical_index(m.first, m.second, mask.height, mask.width));
        const std::uint64_t pos_key =
            mix64(key.seed, mix64(static_cast<std::uint64_t>(rep.first) + 1,
                                  static_cast<std::uint64_t>(rep.second) + 1));
        double shared = Rng(pos_key).uniform(key.lo, key.hi);
        for (int c = 0; c < channels; ++c) {
            const double lambda =
                key.per_channel
                    ? Rng(mix64(pos_key, 0xC0D5ull + static_cast<std::uint64_t>(c))).uniform(key.lo, key.hi)
                    : shared;
            entries.push_back({i, j, c, lambda});
        }
    }
    return entries;
}

TriggerSet gen_triggers(std::span<const LabeledSample> sources, const ClusteringMap& mask,
                        const PerturbationKey& key) {
    if (sources.empty()) throw std::invalid_argument("gen_triggers: no source samples");
    for (const auto& s : sources)
        if (s.image.height != mask.height || s.image.width != mask.width)
            throw std::invalid_argument("gen_triggers: source dims do not match mask");
    const int channels = sources[0].image.channels;
    const auto entries = derive_lambdas(key, mask, channels);

    TriggerSet ts;
    ts.key_fingerprint = key.fingerprint();
    ts.samples.reserve(sources.size());
    for (const auto& s : sources) {
        if (s.image.channels != channels)
            throw std::invalid_argument("gen_triggers: mixed channel counts");
        ts.samples.push_back(perturb(s.image, entries));
        ts.source_ids.push_back(s.id);
        ts.source_labels.push_back(s.label);
    }
    return ts;
}

void assign_labels(TriggerSet& triggers, const LabelStrategy& strategy, int class_count) {
    if (strategy.kind == LabelStrategy::Kind::NewClass) {
        triggers.assigned_label = class_count;
        return;
    }
    // RandomFixed: one shared existing label, never the majority source
    // class of the trigger set.
    std::map<int, int> counts;
    for (int l : triggers.source_labels) ++counts[l];
    int majority = -1, best = -1;
    for (const auto& [label, cnt] : counts)
        if (cnt > best) {
            best = cnt;
            majority = label;
        }
    std::vector<int> candidates;
    for (int l = 0; l < class_count; ++l)
        if (l != majority) candidates.push_back(l);
    if (candidates.empty())
        throw std::invalid_argument("assign_labels: no admissible label for RandomFixed");
    Rng rng(mix64(strategy.seed, 0x1ABE1ull));
    triggers.assigned_label = candidates[rng.index(candidates.size())];
}

namespace {

Image default_logo() {
    return Image(8, 8, 1, 1.0);  // white square
}

}  // namespace

TriggerSet baseline_triggers(BaselineKind kind, std::span<const LabeledSample> sources,
                             const BaselineParams& params, std::uint64_t seed) {
    TriggerSet ts;
    switch (kind) {
        case BaselineKind::URS: {
            if (params.pool.empty())
                throw std::invalid_argument("baseline_triggers: URS needs a sample pool");
            for (const auto& s : params.pool) {
                ts.samples.push_back(s.image);
                ts.source_ids.push_back(s.id);
                ts.source_labels.push_back(s.label);
            }
            break;
        }
        case BaselineKind::LBT: {
            if (sources.empty())
                throw std::invalid_argument("baseline_triggers: LBT needs source samples");
            const Image logo = params.logo ? *params.logo : default_logo();
            for (const auto& s : sources) {
                Image img = s.image;
                const int py = params.logo_y >= 0 ? params.logo_y : img.height - logo.height;
                const int px = params.logo_x >= 0 ? params.logo_x : img.width - logo.width;
                if (py < 0 || px < 0 || py + logo.height > img.height ||
                    px + logo.width > img.width)
                    throw std::invalid_argument("baseline_triggers: logo does not fit");
                for (int c = 0; c < img.channels; ++c)
                    for (int y = 0; y < logo.height; ++y)
                        for (int x = 0; x < logo.width; ++x)
                            img.at(c, py + y, px + x) =
                                logo.at(logo.channels == 1 ? 0 : c, y, x);
                ts.samples.push_back(std::move(img));
                ts.source_ids.push_back(s.id);
                ts.source_labels.push_back(s.label);
            }
            break;
        }
        case BaselineKind::NBT: {
            if (sources.empty())
                throw std::invalid_argument("baseline_triggers: NBT needs source samples");
            if (params.variance < 0.0)
                throw std::invalid_argument("baseline_triggers: negative noise variance");
            const double sigma = std::sqrt(params.variance);
            Rng rng(mix64(seed, 0xB017ull));
            for (const auto& s : sources) {
                Image img = s.image;
                for (auto& p : img.pixels) p = clamp01(p + sigma * rng.normal());
                ts.samples.push_back(std::move(img));
                ts.source_ids.push_back(s.id);
                ts.source_labels.push_back(s.label);
            }
            break;
        }
    }
    return ts;
}

}  // namespace fdwm
