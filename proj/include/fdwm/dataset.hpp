#pragma once

#include <cstdint>
#include <filesystem>
#include <vector>

#include "fdwm/image.hpp"

namespace fdwm {

/// Disjoint training (D1) / validation (D2) / test (E) splits plus the
/// class count of the label set.
struct DatasetBundle {
    std::vector<LabeledSample> d1;
    std::vector<LabeledSample> d2;
    std::vector<LabeledSample> e;
    int class_count = 0;
};

/// Index sets into a DatasetBundle realizing the experiment partition:
/// A1 ⊂ D1 and A2 ⊂ D2 seed the trigger sets, V ⊂ E seeds the verification
/// triggers, U = E \ V is the untouched evaluation set.
struct PartitionPlan {
    std::vector<int> a1;  // indices into d1
    std::vector<int> a2;  // indices into d2
    std::vector<int> v;   // indices into e
    std::vector<int> u;   // indices into e, complement of v
    int q_t = 0;
    std::uint64_t seed = 0;
};

struct SplitSizes {
    std::size_t d1, d2, e;
};

/// 75% / 5% / 20% split; fractional sizes round down, remainder goes to the
/// test set.
SplitSizes split_sizes(std::size_t total);

/// Loads CIFAR-10 binary batches (3073-byte records: label byte + 3072
/// planar RGB pixel bytes). `path` may be a directory holding the six
/// standard batch files or a single .bin file. Pixels are scaled to [0,1]
/// by division by 255; the 75/5/20 split is drawn with `seed`.
DatasetBundle load_cifar10(const std::filesystem::path& path, std::uint64_t seed);

/// Seeded synthetic dataset: each class is a texture built from a small set
/// of class-specific spatial frequencies with per-sample amplitude and phase
/// jitter, separable enough for the shipped small CNN to exceed 90% clean
/// accuracy under the default training budget.
DatasetBundle gen_synthetic(std::uint64_t seed, int class_count, int per_class, int h, int w,
                            int d);

/// Uniform without-replacement draw of A1, A2 and V (all of size q_t);
/// reproducible from the seed.
PartitionPlan make_partition(const DatasetBundle& bundle, int q_t, std::uint64_t seed);

/// Gathers the samples addressed by an index list.
std::vector<LabeledSample> subset(const std::vector<LabeledSample>& pool,
                                  const std::vector<int>& indices);

}  // namespace fdwm
