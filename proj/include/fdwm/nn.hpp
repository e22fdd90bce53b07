#pragma once

#include <cstdint>
#include <filesystem>
#include <memory>
#include <span>
#include <string>
#include <vector>

#include "fdwm/image.hpp"

namespace fdwm {

enum class LayerKind { Conv3x3, ReLU, MaxPool2, Flatten, Dense };

struct LayerSpec {
    LayerKind kind;
    int units = 0;  // conv: output channels; dense: output units
};

/// Layer-list descriptor with a canonical text form, e.g.
/// "input:32x32x1|conv3x3:8|relu|maxpool2|conv3x3:16|relu|maxpool2|flatten|dense:48|relu|dense:4"
struct Architecture {
    int in_h = 0, in_w = 0, in_ch = 0;
    std::vector<LayerSpec> layers;

    std::string to_text() const;
    static Architecture from_text(const std::string& text);
    int output_units() const;  // units of the last dense layer
};

/// Two 3x3 conv blocks with max pooling, one hidden dense layer
/// (~50k parameters at 32x32x1 with the defaults).
Architecture tinycnn_arch(int h, int w, int d, int classes, int conv1 = 8, int conv2 = 16,
                          int hidden = 48);
Architecture mlp_arch(int h, int w, int d, int classes, int hidden = 64);

struct Tensor {
    std::vector<int> shape;
    std::vector<double> v;
    std::size_t size() const { return v.size(); }
};

struct Classifier {
    Architecture arch;
    int class_count = 0;
    std::vector<Tensor> params;          // weight, bias per conv/dense layer
    std::vector<bool> param_is_weight;   // biases are exempt from pruning
    std::uint64_t init_seed = 0;
    int epochs_seen = 0;

    std::size_t parameter_count() const {
        std::size_t n = 0;
        for (const auto& t : params) n += t.size();
        return n;
    }
};

struct TrainConfig {
    double lr = 0.01;
    double momentum = 0.9;
    int batch = 512;
    int epochs = 30;
    std::uint64_t seed = 0;
};

struct EpochStats {
    double train_loss = 0.0;
    double val_accuracy = 0.0;
};

struct TrainHistory {
    std::vector<EpochStats> epochs;
};

/// v <- momentum*v - lr*g; theta <- theta + v. Exposed separately so the
/// update rule can be checked against the closed-form recurrence.
struct SgdMomentum {
    double lr = 0.01;
    double momentum = 0.9;
    std::vector<Tensor> velocity;

    void init(const std::vector<Tensor>& params);
    void step(std::vector<Tensor>& params, const std::vector<Tensor>& grads);
};

/// Deterministic scaled-uniform fan-in initialization (weights uniform in
/// +-1/sqrt(fan_in), biases zero).
Classifier init(const Architecture& arch, int class_count, std::uint64_t seed);

/// Raw class scores; the prediction is the argmax with ties broken toward
/// the lowest index.
std::vector<double> forward(const Classifier& model, const Image& image);
int predict(const Classifier& model, const Image& image);
std::vector<double> softmax(std::span<const double> scores);

/// Reusable forward-pass buffers over a read-only model; the heat-map sweep
/// issues hundreds of thousands of predictions and must not reallocate per
/// call. Each thread owns its own Predictor.
class Predictor {
public:
    explicit Predictor(const Classifier& model);
    ~Predictor();
    Predictor(Predictor&&) noexcept;
    Predictor& operator=(Predictor&&) noexcept;

    int predict(const Image& image);

private:
    struct Impl;
    std::unique_ptr<Impl> impl_;
};

/// SGD with momentum over seeded shuffled minibatches; mutates the model and
/// returns per-epoch train loss / validation accuracy. Aborts with
/// diagnostics if the loss turns non-finite. Single-threaded, fully
/// deterministic for a fixed seed.
TrainHistory train(Classifier& model, std::span<const LabeledSample> train_set,
                   std::span<const LabeledSample> val_set, const TrainConfig& cfg);

double evaluate(const Classifier& model, std::span<const LabeledSample> samples);

struct GradCheckResult {
    double max_rel_error = 0.0;
    bool skipped_kink = false;  // a ReLU/pool decision sat within the margin
};

/// Central-difference check of the analytic gradient on one sample.
/// Samples whose forward pass crosses close to a ReLU or pooling kink are
/// flagged and should be excluded from aggregate statistics.
GradCheckResult grad_check(const Classifier& model, const LabeledSample& sample,
                           double step = 1e-4, double kink_margin = 1e-6);

/// Checkpoint: magic "FDWM-CKPT", u16 version, length-prefixed architecture
/// text, u32 class_count, then parameter tensors in the shared tensor
/// format. save(load(f)) reproduces f byte-exactly.
void save_checkpoint(const std::filesystem::path& path, const Classifier& model);
Classifier load_checkpoint(const std::filesystem::path& path);

}  // namespace fdwm
