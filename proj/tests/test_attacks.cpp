#include <algorithm>
#include <cmath>

#include "doctest.h"
#include "fdwm/attacks.hpp"
#include "fdwm/dataset.hpp"
#include "fdwm/rng.hpp"
#include "fdwm/spectral.hpp"

using namespace fdwm;

namespace {

Image random_image(Rng& rng, int h, int w, int d, double lo = 0.0, double hi = 1.0) {
    Image img(h, w, d);
    for (auto& p : img.pixels) p = rng.uniform(lo, hi);
    return img;
}

double linf(const Image& a, const Image& b) {
    double m = 0.0;
    for (std::size_t k = 0; k < a.pixels.size(); ++k)
        m = std::max(m, std::abs(a.pixels[k] - b.pixels[k]));
    return m;
}

}  // namespace

TEST_SUITE_BEGIN("attacks");

TEST_CASE("descriptor parsing round-trips and validates") {
    const AttackDescriptor j = AttackDescriptor::parse("jpeg:qf=60");
    CHECK(j.kind == AttackDescriptor::Kind::Jpeg);
    CHECK(j.qf == 60);
    const AttackDescriptor p = AttackDescriptor::parse("prune:rate=0.3");
    CHECK(p.rate == doctest::Approx(0.3));
    const AttackDescriptor l = AttackDescriptor::parse("lowpass:B=12");
    CHECK(l.bandwidth == 12);
    const AttackDescriptor f = AttackDescriptor::parse("finetune:epochs=10,fraction=0.5");
    CHECK(f.epochs == 10);
    CHECK(f.fraction == doctest::Approx(0.5));
    const AttackDescriptor h = AttackDescriptor::parse("hflip");
    CHECK(h.kind == AttackDescriptor::Kind::Hflip);
    CHECK(AttackDescriptor::parse(h.to_string()).kind == h.kind);
    CHECK_THROWS_AS((void)AttackDescriptor::parse("melt:rate=1"), std::invalid_argument);
    CHECK_THROWS_AS((void)AttackDescriptor::parse("jpeg:qf=0"), std::invalid_argument);
    CHECK_THROWS_AS((void)AttackDescriptor::parse("prune:rate=1.5"), std::invalid_argument);
}

TEST_CASE("prune_l1 frozen example: rate 0.5 on {0.1,-0.2,0.3,-0.4}") {
    Classifier m = init(Architecture::from_text("input:2x2x1|flatten|dense:1"), 1, 0);
    m.params[0].v = {0.1, -0.2, 0.3, -0.4};
    m.params[1].v = {0.7};  // bias, exempt
    const Classifier pruned = prune_l1(m, 0.5);
    CHECK(pruned.params[0].v == std::vector<double>{0.0, 0.0, 0.3, -0.4});
    CHECK(pruned.params[1].v == std::vector<double>{0.7});
}

TEST_CASE("prune_l1 zero count is exact and matches the sort oracle") {
    const Classifier m = init(mlp_arch(6, 6, 1, 3, 10), 3, 77);
    for (const double rate : {0.0, 0.25, 0.3, 0.77, 1.0}) {
        const Classifier pruned = prune_l1(m, rate);
        std::vector<double> mags;
        std::size_t zeros = 0, total = 0;
        for (std::size_t t = 0; t < m.params.size(); ++t) {
            if (!m.param_is_weight[t]) {
                CHECK(pruned.params[t].v == m.params[t].v);  // biases untouched
                continue;
            }
            for (std::size_t i = 0; i < m.params[t].size(); ++i) {
                mags.push_back(std::abs(m.params[t].v[i]));
                zeros += (pruned.params[t].v[i] == 0.0 && m.params[t].v[i] != 0.0);
                ++total;
            }
        }
        const std::size_t expected = static_cast<std::size_t>(rate * total);
        CHECK(zeros == expected);
        // survivors are exactly the top-(N - expected) magnitudes
        std::sort(mags.begin(), mags.end());
        if (expected > 0 && expected < total) {
            const double threshold = mags[expected - 1];
            for (std::size_t t = 0; t < m.params.size(); ++t) {
                if (!m.param_is_weight[t]) continue;
                for (std::size_t i = 0; i < m.params[t].size(); ++i)
                    if (std::abs(m.params[t].v[i]) > threshold)
                        CHECK(pruned.params[t].v[i] == m.params[t].v[i]);
            }
        }
    }
    const Classifier all = prune_l1(m, 1.0);
    for (std::size_t t = 0; t < m.params.size(); ++t)
        if (m.param_is_weight[t])
            for (double v : all.params[t].v) CHECK(v == 0.0);
}

TEST_CASE("jpeg tables: qf=50 is Annex-K exactly, qf=100 all ones") {
    const JpegTables t50 = jpeg_tables(50);
    CHECK(t50.luma[0] == 16);
    CHECK(t50.luma[1] == 11);
    CHECK(t50.luma[63] == 99);
    CHECK(t50.chroma[0] == 17);
    CHECK(t50.chroma[63] == 99);
    const JpegTables t100 = jpeg_tables(100);
    for (int k = 0; k < 64; ++k) {
        CHECK(t100.luma[k] == 1);
        CHECK(t100.chroma[k] == 1);
    }
    // scale formula spot checks: qf=80 -> 0.4, qf=25 -> 2.0
    CHECK(jpeg_tables(80).luma[0] == 6);    // round(16*0.4)
    CHECK(jpeg_tables(25).luma[0] == 32);   // 16*2
    CHECK_THROWS_AS((void)jpeg_tables(0), std::invalid_argument);
    CHECK_THROWS_AS((void)jpeg_tables(101), std::invalid_argument);
}

TEST_CASE("jpeg at qf=100 is rounding-bounded") {
    Rng rng(1);
    const Image g = random_image(rng, 32, 32, 1);
    CHECK(linf(jpeg(g, 100), g) <= 0.02);
    const Image c = random_image(rng, 16, 24, 3);
    CHECK(linf(jpeg(c, 100), c) <= 0.02);
}

TEST_CASE("jpeg keeps constant images constant") {
    for (const int qf : {100, 80, 50, 20, 1}) {
        const Image in(16, 16, 3, 0.5);
        const Image out = jpeg(in, qf);
        const double first = out.pixels[0];
        for (double p : out.pixels) CHECK(p == doctest::Approx(first).epsilon(1e-9));
        CHECK(std::abs(first - 0.5) <= 0.02);
    }
}

TEST_CASE("jpeg handles dims that are not multiples of 8") {
    Rng rng(2);
    const Image g = random_image(rng, 19, 13, 1);
    const Image out = jpeg(g, 90);
    CHECK(out.height == 19);
    CHECK(out.width == 13);
    for (double p : out.pixels) {
        CHECK(p >= 0.0);
        CHECK(p <= 1.0);
    }
}

TEST_CASE("repeated jpeg is gentler than a fresh lower quality factor") {
    Rng rng(3);
    const Image img = random_image(rng, 32, 32, 1, 0.2, 0.8);
    const Image once = jpeg(img, 80);
    const Image twice = jpeg(once, 80);
    double drift = 0.0, fresh = 0.0;
    for (std::size_t k = 0; k < img.pixels.size(); ++k) {
        drift += std::abs(twice.pixels[k] - once.pixels[k]);
        fresh += std::abs(jpeg(img, 60).pixels[k] - img.pixels[k]);
    }
    CHECK(drift < fresh);
}

TEST_CASE("hflip is an exact involution and reverses columns") {
    Rng rng(4);
    const Image img = random_image(rng, 5, 7, 3);
    const Image f = hflip(img);
    for (int c = 0; c < 3; ++c)
        for (int y = 0; y < 5; ++y)
            for (int x = 0; x < 7; ++x) CHECK(f.at(c, y, x) == img.at(c, y, 6 - x));
    CHECK(hflip(f).pixels == img.pixels);

    Image symmetric(4, 5, 1);
    for (int y = 0; y < 4; ++y)
        for (int x = 0; x < 5; ++x) symmetric.at(0, y, x) = 0.1 * std::min(x, 4 - x) + 0.2 * y / 4.0;
    CHECK(hflip(symmetric).pixels == symmetric.pixels);
}

TEST_CASE("hflip mirrors spectrum magnitudes across the center column") {
    Rng rng(5);
    const Image img = random_image(rng, 8, 8, 1);
    const Spectrum orig = dft2(img.channel(0), 8, 8);
    const Spectrum flip = dft2(hflip(img).channel(0), 8, 8);
    for (int i = 0; i < 8; ++i)
        for (int j = 0; j < 8; ++j) {
            // column mirror: same row, symmetric column
            const auto [si, sj] = sym_index(i, j, 8, 8);
            (void)si;
            CHECK(std::abs(std::abs(flip.at(i, j)) - std::abs(orig.at(i, sj))) < 1e-9);
        }
}

TEST_CASE("lowpass boundary bandwidths") {
    Rng rng(6);
    const Image img = random_image(rng, 8, 8, 1);
    const Image full = lowpass(img, 8, /*clip=*/false);
    CHECK(linf(full, img) < 1e-9);  // nothing removed at B = min(h,w)
    const Image odd = random_image(rng, 9, 9, 1);
    CHECK(linf(lowpass(odd, 9, false), odd) < 1e-9);

    const Image zero = lowpass(img, 0);
    for (double p : zero.pixels) CHECK(p == 0.0);

    const Image flat(8, 8, 1, 0.42);
    for (int b = 1; b <= 8; ++b) CHECK(linf(lowpass(flat, b, false), flat) < 1e-9);

    CHECK_THROWS_AS((void)lowpass(img, 9), std::invalid_argument);
    CHECK_THROWS_AS((void)lowpass(img, -1), std::invalid_argument);
}

TEST_CASE("lowpass composition law (pre-clipping)") {
    Rng rng(7);
    for (const auto [h, w] : {std::pair{8, 8}, {9, 7}, {16, 12}}) {
        const Image img = random_image(rng, h, w, 1);
        for (const auto [b1, b2] : {std::pair{6, 4}, {4, 6}, {5, 5}, {3, 7}}) {
            const Image lhs = lowpass(lowpass(img, b1, false), b2, false);
            const Image rhs = lowpass(img, std::min(b1, b2), false);
            CHECK(linf(lhs, rhs) < 1e-9);
        }
    }
}

TEST_CASE("image attacks preserve shape and range") {
    Rng rng(8);
    const Image img = random_image(rng, 12, 12, 3);
    for (const char* spec : {"jpeg:qf=40", "hflip", "lowpass:B=5"}) {
        const Image out = apply_image_attack(AttackDescriptor::parse(spec), img);
        CHECK(out.height == img.height);
        CHECK(out.width == img.width);
        CHECK(out.channels == img.channels);
        for (double p : out.pixels) {
            CHECK(p >= 0.0);
            CHECK(p <= 1.0);
        }
    }
}

TEST_CASE("finetune with zero epochs or zero lr is a no-op; prune 0 is identity") {
    const DatasetBundle b = gen_synthetic(9, 2, 25, 8, 8, 1);
    const Classifier m = init(mlp_arch(8, 8, 1, 2, 6), 2, 5);
    TrainConfig cfg;
    cfg.batch = 8;
    const Classifier same_epochs = finetune(m, b.d2, 0.5, 0, cfg);
    for (std::size_t t = 0; t < m.params.size(); ++t)
        CHECK(same_epochs.params[t].v == m.params[t].v);

    TrainConfig zero_lr = cfg;
    zero_lr.lr = 0.0;
    const Classifier same_lr = finetune(m, b.d2, 0.5, 3, zero_lr);
    for (std::size_t t = 0; t < m.params.size(); ++t)
        CHECK(same_lr.params[t].v == m.params[t].v);

    const Classifier same_prune = prune_l1(m, 0.0);
    for (std::size_t t = 0; t < m.params.size(); ++t)
        CHECK(same_prune.params[t].v == m.params[t].v);

    CHECK_THROWS_AS((void)finetune(m, b.d2, 0.0, 1, cfg), std::invalid_argument);
}

TEST_CASE("uda augmentation doubles the set with attacked copies") {
    const DatasetBundle b = gen_synthetic(10, 2, 20, 8, 8, 1);
    const std::vector<LabeledSample> train(b.d1.begin(), b.d1.end());
    const auto aug = augment_uda(train, AttackDescriptor::parse("hflip"));
    REQUIRE(aug.size() == 2 * train.size());
    for (std::size_t k = 0; k < train.size(); ++k) {
        CHECK(aug[k].image.pixels == train[k].image.pixels);
        CHECK(aug[train.size() + k].label == train[k].label);
        CHECK(aug[train.size() + k].image.pixels == hflip(train[k].image).pixels);
    }
    CHECK_THROWS_AS((void)augment_uda(train, AttackDescriptor::parse("prune:rate=0.1")),
                    std::invalid_argument);
    CHECK_THROWS_AS(
        (void)apply_image_attack(AttackDescriptor::parse("finetune:epochs=1"), b.d1[0].image),
        std::invalid_argument);
}

TEST_SUITE_END();
