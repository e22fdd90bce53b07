#include <cstdio>
#include <filesystem>
#include <fstream>
#include <set>

#include "doctest.h"
#include "fdwm/dataset.hpp"
#include "fdwm/nn.hpp"

using namespace fdwm;
namespace fs = std::filesystem;

namespace {

struct TempDir {
    fs::path path;
    TempDir() {
        path = fs::temp_directory_path() /
               ("fdwm_test_" + std::to_string(static_cast<unsigned long>(::getpid())) + "_" +
                std::to_string(counter()++));
        fs::create_directories(path);
    }
    ~TempDir() {
        std::error_code ec;
        fs::remove_all(path, ec);
    }
    static int& counter() {
        static int c = 0;
        return c;
    }
};

void write_cifar_batch(const fs::path& file, int records, unsigned char label,
                       unsigned char pixel) {
    std::ofstream out(file, std::ios::binary);
    std::vector<unsigned char> rec(3073, pixel);
    rec[0] = label;
    for (int r = 0; r < records; ++r)
        out.write(reinterpret_cast<const char*>(rec.data()), rec.size());
}

std::set<std::int64_t> ids_of(const std::vector<LabeledSample>& v) {
    std::set<std::int64_t> s;
    for (const auto& x : v) s.insert(x.id);
    return s;
}

}  // namespace

TEST_SUITE_BEGIN("dataset");

TEST_CASE("split sizes follow 75/5/20 with round-down") {
    const SplitSizes s = split_sizes(60000);
    CHECK(s.d1 == 45000);
    CHECK(s.d2 == 3000);
    CHECK(s.e == 12000);
    // remainder goes to the test set
    const SplitSizes odd = split_sizes(1003);
    CHECK(odd.d1 == 752);
    CHECK(odd.d2 == 50);
    CHECK(odd.e == 201);
    CHECK(odd.d1 + odd.d2 + odd.e == 1003);
}

TEST_CASE("cifar loader scales bytes, assigns labels and splits") {
    TempDir tmp;
    write_cifar_batch(tmp.path / "batch.bin", 40, 3, 255);
    const DatasetBundle b = load_cifar10(tmp.path / "batch.bin", 1);
    CHECK(b.class_count == 10);
    CHECK(b.d1.size() == 30);
    CHECK(b.d2.size() == 2);
    CHECK(b.e.size() == 8);
    for (const auto& s : b.d1) {
        CHECK(s.label == 3);
        for (double p : s.image.pixels) CHECK(p == 1.0);
    }
}

TEST_CASE("cifar loader: zero pixel bytes map to 0.0") {
    TempDir tmp;
    write_cifar_batch(tmp.path / "batch.bin", 25, 0, 0);
    const DatasetBundle b = load_cifar10(tmp.path / "batch.bin", 1);
    for (double p : b.e.at(0).image.pixels) CHECK(p == 0.0);
}

TEST_CASE("cifar loader: directory layout requires the six batch files") {
    TempDir tmp;
    write_cifar_batch(tmp.path / "data_batch_1.bin", 5, 1, 10);
    CHECK_THROWS_WITH_AS((void)load_cifar10(tmp.path, 0),
                         doctest::Contains("missing file"), std::runtime_error);
    for (int i = 2; i <= 5; ++i)
        write_cifar_batch(tmp.path / ("data_batch_" + std::to_string(i) + ".bin"), 5, 1, 10);
    write_cifar_batch(tmp.path / "test_batch.bin", 5, 1, 10);
    const DatasetBundle b = load_cifar10(tmp.path, 0);
    CHECK(b.d1.size() + b.d2.size() + b.e.size() == 30);
}

TEST_CASE("cifar loader flags truncation with a byte offset") {
    TempDir tmp;
    {
        std::ofstream out(tmp.path / "bad.bin", std::ios::binary);
        std::vector<char> garbage(3073 + 100, 0);
        out.write(garbage.data(), garbage.size());
    }
    CHECK_THROWS_WITH_AS((void)load_cifar10(tmp.path / "bad.bin", 0),
                         doctest::Contains("byte offset 3073"), std::runtime_error);
}

TEST_CASE("cifar loader flags corrupt label bytes") {
    TempDir tmp;
    write_cifar_batch(tmp.path / "bad.bin", 3, 11, 0);
    CHECK_THROWS_WITH_AS((void)load_cifar10(tmp.path / "bad.bin", 0),
                         doctest::Contains("label byte 11"), std::runtime_error);
}

TEST_CASE("full-size split counts: 60000 records -> 45000/3000/12000") {
    TempDir tmp;
    for (int i = 1; i <= 5; ++i)
        write_cifar_batch(tmp.path / ("data_batch_" + std::to_string(i) + ".bin"), 10000, 1, 128);
    write_cifar_batch(tmp.path / "test_batch.bin", 10000, 1, 128);
    const DatasetBundle b = load_cifar10(tmp.path, 7);
    CHECK(b.d1.size() == 45000);
    CHECK(b.d2.size() == 3000);
    CHECK(b.e.size() == 12000);
    CHECK(b.d1.at(0).image.pixels.at(0) == doctest::Approx(128.0 / 255.0));
}

TEST_CASE("synthetic generator is deterministic and balanced") {
    const DatasetBundle a = gen_synthetic(1, 3, 200, 16, 16, 1);
    const DatasetBundle b = gen_synthetic(1, 3, 200, 16, 16, 1);
    CHECK(a.d1.size() + a.d2.size() + a.e.size() == 600);
    std::vector<int> counts(3, 0);
    for (const auto* part : {&a.d1, &a.d2, &a.e})
        for (const auto& s : *part) {
            ++counts[s.label];
            for (double p : s.image.pixels) {
                CHECK(p >= 0.0);
                CHECK(p <= 1.0);
            }
        }
    CHECK(counts == std::vector<int>{200, 200, 200});
    // bit-identical across runs
    REQUIRE(a.d1.size() == b.d1.size());
    for (std::size_t k = 0; k < a.d1.size(); ++k) {
        CHECK(a.d1[k].id == b.d1[k].id);
        CHECK(a.d1[k].image.pixels == b.d1[k].image.pixels);
    }
    // different seeds differ
    const DatasetBundle c = gen_synthetic(2, 3, 200, 16, 16, 1);
    CHECK(a.d1.at(0).image.pixels != c.d1.at(0).image.pixels);
}

TEST_CASE("synthetic generator validates arguments") {
    CHECK_THROWS_AS((void)gen_synthetic(1, 1, 100, 16, 16, 1), std::invalid_argument);
    CHECK_THROWS_AS((void)gen_synthetic(1, 3, 10, 16, 16, 1), std::invalid_argument);
    CHECK_THROWS_AS((void)gen_synthetic(1, 3, 100, 16, 16, 2), std::invalid_argument);
}

TEST_CASE("bundle splits are disjoint by id") {
    const DatasetBundle b = gen_synthetic(5, 3, 40, 8, 8, 1);
    const auto i1 = ids_of(b.d1), i2 = ids_of(b.d2), ie = ids_of(b.e);
    CHECK(i1.size() == b.d1.size());
    for (auto id : i2) CHECK(i1.count(id) == 0);
    for (auto id : ie) {
        CHECK(i1.count(id) == 0);
        CHECK(i2.count(id) == 0);
    }
}

TEST_CASE("partition plan: q_t=0 leaves U = E") {
    const DatasetBundle b = gen_synthetic(5, 2, 40, 8, 8, 1);
    const PartitionPlan p = make_partition(b, 0, 9);
    CHECK(p.a1.empty());
    CHECK(p.a2.empty());
    CHECK(p.v.empty());
    CHECK(p.u.size() == b.e.size());
}

TEST_CASE("partition plan respects sizes, disjointness and determinism") {
    const DatasetBundle b = gen_synthetic(6, 3, 200, 8, 8, 1);  // 600 -> 450/30/120
    const PartitionPlan p = make_partition(b, 25, 3);
    CHECK(p.a1.size() == 25);
    CHECK(p.a2.size() == 25);
    CHECK(p.v.size() == 25);
    CHECK(p.u.size() == b.e.size() - 25);
    std::set<int> v_set(p.v.begin(), p.v.end()), u_set(p.u.begin(), p.u.end());
    for (int i : v_set) CHECK(u_set.count(i) == 0);
    CHECK(v_set.size() + u_set.size() == b.e.size());

    const PartitionPlan q = make_partition(b, 25, 3);
    CHECK(p.a1 == q.a1);
    CHECK(p.a2 == q.a2);
    CHECK(p.v == q.v);

    CHECK_THROWS_AS((void)make_partition(b, 31, 3), std::invalid_argument);  // |D2| = 30
}

TEST_CASE("cifar-like q_t=500 partition arithmetic") {
    // counts only; mirrors the documented 45000/3000/12000 split
    DatasetBundle b;
    b.class_count = 10;
    b.d1.resize(45000);
    b.d2.resize(3000);
    b.e.resize(12000);
    for (std::size_t i = 0; i < b.d1.size(); ++i) b.d1[i].id = static_cast<int>(i);
    for (std::size_t i = 0; i < b.d2.size(); ++i) b.d2[i].id = 100000 + static_cast<int>(i);
    for (std::size_t i = 0; i < b.e.size(); ++i) b.e[i].id = 200000 + static_cast<int>(i);
    const PartitionPlan p = make_partition(b, 500, 11);
    CHECK(p.a1.size() == 500);
    CHECK(p.a2.size() == 500);
    CHECK(p.v.size() == 500);
    CHECK(p.u.size() == 11500);
}

TEST_SUITE_END();
