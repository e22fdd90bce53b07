#include "fdwm/watermark.hpp"

#include <fstream>
#include <stdexcept>

namespace fdwm {

Classifier embed(const EmbeddingJob& job, TrainHistory* history) {
    if (!job.data) throw std::invalid_argument("embed: no dataset");
    const int classes = job.arch.output_units();
    const auto check_set = [&](const TriggerSet& ts, const char* name) {
        if (ts.samples.empty()) return;
        if (ts.assigned_label < 0 || ts.assigned_label >= classes)
            throw std::invalid_argument(std::string("embed: ") + name + " label " +
                                        std::to_string(ts.assigned_label) +
                                        " out of range for " + std::to_string(classes) +
                                        " classes");
    };
    check_set(job.b1, "B1");
    check_set(job.b2, "B2");
    for (const auto& s : job.data->d1)
        if (s.label >= classes)
            throw std::invalid_argument("embed: training label out of range");

    std::vector<LabeledSample> train_set(job.data->d1.begin(), job.data->d1.end());
    for (std::size_t k = 0; k < job.b1.samples.size(); ++k)
        train_set.push_back({job.b1.samples[k], job.b1.assigned_label,
                             job.b1.source_ids.empty() ? -1 : job.b1.source_ids[k]});
    std::vector<LabeledSample> val_set(job.data->d2.begin(), job.data->d2.end());
    for (std::size_t k = 0; k < job.b2.samples.size(); ++k)
        val_set.push_back({job.b2.samples[k], job.b2.assigned_label,
                           job.b2.source_ids.empty() ? -1 : job.b2.source_ids[k]});

    Classifier model = init(job.arch, classes, job.cfg.seed);
    TrainHistory h = train(model, train_set, val_set, job.cfg);
    if (history) *history = std::move(h);
    if (!job.checkpoint.empty()) save_checkpoint(job.checkpoint, model);
    return model;
}

double fidelity_gap(const BlackBoxModel& m0, const BlackBoxModel& m1,
                    std::span<const LabeledSample> unseen) {
    if (unseen.empty()) throw std::invalid_argument("fidelity_gap: empty evaluation set");
    std::size_t c0 = 0, c1 = 0;
    for (const auto& s : unseen) {
        c0 += (m0.predict(s.image) == s.label);
        c1 += (m1.predict(s.image) == s.label);
    }
    const double n = static_cast<double>(unseen.size());
    const double gap = (static_cast<double>(c0) - static_cast<double>(c1)) / n;
    return gap < 0.0 ? -gap : gap;
}

double trigger_accuracy(const BlackBoxModel& model, const TriggerSet& t2) {
    if (t2.samples.empty()) throw std::invalid_argument("trigger_accuracy: empty trigger set");
    std::size_t correct = 0;
    for (const auto& img : t2.samples) correct += (model.predict(img) == t2.assigned_label);
    return static_cast<double>(correct) / static_cast<double>(t2.samples.size());
}

VerificationReport verify(const BlackBoxModel& model, const TriggerSet& t2, double delta,
                          const std::optional<AttackDescriptor>& attack) {
    if (t2.samples.empty()) throw std::invalid_argument("verify: empty trigger set");
    if (!(delta >= 0.0 && delta <= 1.0))
        throw std::invalid_argument("verify: delta must be in [0,1]");
    if (attack && !attack->image_attack())
        throw std::invalid_argument("verify: only image attacks apply to triggers");

    VerificationReport rep;
    rep.delta = delta;
    rep.attack = attack ? attack->to_string() : "";
    std::size_t correct = 0;
    for (const auto& img : t2.samples) {
        const Image queried = attack ? apply_image_attack(*attack, img) : img;
        const int pred = model.predict(queried);
        rep.predictions.push_back(pred);
        rep.expected.push_back(t2.assigned_label);
        correct += (pred == t2.assigned_label);
    }
    rep.trigger_accuracy = static_cast<double>(correct) / static_cast<double>(t2.samples.size());
    rep.verified = VerificationReport::decide(rep.trigger_accuracy, delta);
    return rep;
}

void write_verification_report(const std::filesystem::path& txt_path,
                               const VerificationReport& rep) {
    std::ofstream out(txt_path);
    if (!out) throw std::runtime_error("write_verification_report: cannot open " +
                                       txt_path.string());
    out << "trigger_accuracy = " << rep.trigger_accuracy << "\n"
        << "delta = " << rep.delta << "\n"
        << "decision = " << (rep.verified ? "verified" : "not-verified") << "\n"
        << "attack = " << (rep.attack.empty() ? "none" : rep.attack) << "\n"
        << "samples = " << rep.predictions.size() << "\n";
    if (!out) throw std::runtime_error("write_verification_report: write failed");
}

void write_verification_csv(const std::filesystem::path& csv_path,
                            const VerificationReport& rep) {
    std::ofstream out(csv_path);
    if (!out) throw std::runtime_error("write_verification_csv: cannot open " +
                                       csv_path.string());
    out << "id,predicted,expected,correct\n";
    for (std::size_t k = 0; k < rep.predictions.size(); ++k)
        out << k << "," << rep.predictions[k] << "," << rep.expected[k] << ","
            << (rep.predictions[k] == rep.expected[k] ? 1 : 0) << "\n";
    if (!out) throw std::runtime_error("write_verification_csv: write failed");
}

}  // namespace fdwm
