#pragma once

#include <filesystem>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "fdwm/attacks.hpp"
#include "fdwm/dataset.hpp"
#include "fdwm/nn.hpp"
#include "fdwm/trigger.hpp"

namespace fdwm {

/// Query-only model interface: ownership verification may issue forward
/// queries and nothing else.
struct BlackBoxModel {
    virtual ~BlackBoxModel() = default;
    virtual int predict(const Image& image) const = 0;
};

/// Adapter presenting a Classifier through the query-only interface.
class ClassifierBox : public BlackBoxModel {
public:
    explicit ClassifierBox(const Classifier& model) : model_(&model) {}
    int predict(const Image& image) const override { return fdwm::predict(*model_, image); }

private:
    const Classifier* model_;
};

/// Everything needed to train the marked model from scratch on D1 ∪ B1 with
/// validation D2 ∪ B2.
struct EmbeddingJob {
    const DatasetBundle* data = nullptr;
    const PartitionPlan* plan = nullptr;  // provenance; b1/b2 are derived from it
    TriggerSet b1;                        // training triggers (labels assigned)
    TriggerSet b2;                        // validation triggers
    Architecture arch;                    // output units must cover the trigger label
    TrainConfig cfg;
    std::filesystem::path checkpoint;     // written after training when non-empty
};

/// Trains the marked model M1 from scratch. Labels are validated before any
/// training step.
Classifier embed(const EmbeddingJob& job, TrainHistory* history = nullptr);

/// |acc(m0, U) - acc(m1, U)|. A marked model predicting its extra class on
/// clean data simply scores an error.
double fidelity_gap(const BlackBoxModel& m0, const BlackBoxModel& m1,
                    std::span<const LabeledSample> unseen);

/// Fraction of triggers classified as the assigned label.
double trigger_accuracy(const BlackBoxModel& model, const TriggerSet& t2);

struct VerificationReport {
    double trigger_accuracy = 0.0;
    double delta = 0.0;
    bool verified = false;
    std::vector<int> predictions;  // per trigger sample
    std::vector<int> expected;
    std::string attack;  // descriptor applied to the triggers, empty if none

    /// decision = (1 - accuracy <= delta), recomputable from the stored
    /// per-sample predictions. The boundary is inclusive; the epsilon keeps
    /// it inclusive under floating-point rounding (error rates are coarse
    /// rationals, so no genuine > case can sit within 1e-12 of delta).
    static bool decide(double accuracy, double delta) {
        return 1.0 - accuracy <= delta + 1e-12;
    }
};

/// Ownership check per the attacked-trigger protocol: the optional image
/// attack is applied to every trigger before it is queried. Touches the
/// model only through BlackBoxModel::predict.
VerificationReport verify(const BlackBoxModel& model, const TriggerSet& t2, double delta,
                          const std::optional<AttackDescriptor>& attack = std::nullopt);

void write_verification_report(const std::filesystem::path& txt_path,
                               const VerificationReport& report);
void write_verification_csv(const std::filesystem::path& csv_path,
                            const VerificationReport& report);

}  // namespace fdwm
