#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "fdwm/clustering.hpp"
#include "fdwm/image.hpp"
#include "fdwm/spectral.hpp"

namespace fdwm {

/// Secret key: master seed plus intensity range. Deterministically expands
/// to one perturbation coefficient per (canonical masked position, channel);
/// with per_channel=false all channels of a position share one coefficient.
struct PerturbationKey {
    std::uint64_t seed = 0;
    double lo = -1.0;
    double hi = 1.0;
    bool per_channel = true;

    std::uint64_t fingerprint() const;  // one-way-ish digest, not the key
};

/// Intensity for which the expected trigger PSNR hits `psnr_db` given the
/// mask size (clamped to <= 1).
double auto_intensity(const ClusteringMap& mask, double psnr_db = 32.0);

/// Keyed expansion: one lambda per (canonical masked position, channel),
/// uniform in [lo,hi], position-keyed (order independent). Symmetric partner
/// positions carry no separate entry; the basis already covers both.
std::vector<PerturbEntry> derive_lambdas(const PerturbationKey& key, const ClusteringMap& mask,
                                         int channels);

struct TriggerSet {
    std::vector<Image> samples;
    int assigned_label = -1;
    std::vector<std::int64_t> source_ids;
    std::vector<int> source_labels;
    std::string mask_id;
    std::uint64_t key_fingerprint = 0;
};

/// Algorithm-1 core: every source is perturbed with the SAME lambda list.
TriggerSet gen_triggers(std::span<const LabeledSample> sources, const ClusteringMap& mask,
                        const PerturbationKey& key);

struct LabelStrategy {
    enum class Kind { NewClass, RandomFixed } kind = Kind::NewClass;
    std::uint64_t seed = 0;  // RandomFixed only
};

/// NewClass assigns the fresh class c to every trigger; RandomFixed draws a
/// single existing label shared by all triggers, never the majority source
/// class.
void assign_labels(TriggerSet& triggers, const LabelStrategy& strategy, int class_count);

enum class BaselineKind { URS, LBT, NBT };

struct BaselineParams {
    std::span<const LabeledSample> pool;  // URS: out-of-distribution samples
    std::optional<Image> logo;            // LBT: defaults to an 8x8 white square
    int logo_y = -1, logo_x = -1;         // LBT: defaults to bottom-right
    double variance = 0.01;               // NBT
};

/// Comparison-harness generators: unrelated samples, logo patch, Gaussian
/// noise.
TriggerSet baseline_triggers(BaselineKind kind, std::span<const LabeledSample> sources,
                             const BaselineParams& params, std::uint64_t seed);

}  // namespace fdwm
