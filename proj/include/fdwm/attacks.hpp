#pragma once

#include <array>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "fdwm/image.hpp"
#include "fdwm/nn.hpp"

namespace fdwm {

/// Attack parsed from CLI strings such as "jpeg:qf=60", "prune:rate=0.3",
/// "lowpass:B=12", "finetune:epochs=10,fraction=0.5", "hflip".
struct AttackDescriptor {
    enum class Kind { Finetune, Prune, Jpeg, Hflip, Lowpass };
    Kind kind = Kind::Hflip;
    int epochs = 10;        // finetune
    double fraction = 0.5;  // finetune
    double rate = 0.3;      // prune
    int qf = 80;            // jpeg
    int bandwidth = 8;      // lowpass
    std::uint64_t seed = 0;

    bool image_attack() const { return kind == Kind::Jpeg || kind == Kind::Hflip || kind == Kind::Lowpass; }
    std::string to_string() const;
    static AttackDescriptor parse(const std::string& text);
};

/// Continues SGD on a seeded random fraction of the clean validation
/// samples; the input model is left untouched.
Classifier finetune(const Classifier& model, std::span<const LabeledSample> val_samples,
                    double fraction, int epochs, const TrainConfig& cfg);

/// Zeroes the floor(rate*N) weights of smallest |w| globally across weight
/// tensors (biases exempt); ties resolve by tensor order then index.
Classifier prune_l1(const Classifier& model, double rate);

/// Single-pass JPEG-equivalent loss: BT.601 YCbCr (3-channel inputs, no
/// chroma subsampling), 8x8 block DCT, Annex-K tables scaled by the IJG
/// quality formula, dequantize, inverse. Blocks are padded by edge
/// replication when dims are not multiples of 8.
Image jpeg(const Image& image, int qf);

/// Quantization tables for a quality factor (entries clamped to [1,255];
/// qf=50 reproduces Annex-K exactly, qf=100 is all ones).
struct JpegTables {
    std::array<int, 64> luma;
    std::array<int, 64> chroma;
};
JpegTables jpeg_tables(int qf);

Image hflip(const Image& image);

/// Zeroes every centered-spectrum coefficient outside the center square of
/// width B, then inverts. clip=false skips the [0,1] clamp (analysis only).
Image lowpass(const Image& image, int bandwidth, bool clip = true);

/// Appends attacked copies of the normal training samples (original labels
/// kept); model attacks are rejected.
std::vector<LabeledSample> augment_uda(std::span<const LabeledSample> train_set,
                                       const AttackDescriptor& attack);

Image apply_image_attack(const AttackDescriptor& attack, const Image& image);

/// Dispatch for finetune/prune; image attacks are rejected.
Classifier apply_model_attack(const AttackDescriptor& attack, const Classifier& model,
                              std::span<const LabeledSample> val_samples,
                              const TrainConfig& base_cfg);

}  // namespace fdwm
