#include <filesystem>
#include <fstream>
#include <unistd.h>

#include "doctest.h"
#include "fdwm/manifest.hpp"
#include "fdwm/nn.hpp"
#include "fdwm/rng.hpp"
#include "fdwm/tensor_io.hpp"

using namespace fdwm;
namespace fs = std::filesystem;

namespace {

fs::path temp_file(const std::string& name) {
    static int counter = 0;
    return fs::temp_directory_path() /
           ("fdwm_io_" + std::to_string(::getpid()) + "_" + std::to_string(counter++) + "_" + name);
}

std::vector<unsigned char> slurp(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

}  // namespace

TEST_SUITE_BEGIN("io");

TEST_CASE("tensor files round-trip float32 payloads bit-exactly") {
    Rng rng(21);
    TensorFile t;
    t.dims = {3, 4, 2};
    t.values.resize(24);
    for (auto& v : t.values) v = static_cast<double>(static_cast<float>(rng.uniform(-5.0, 5.0)));
    const auto path = temp_file("t.fdwm");
    write_tensor(path, t);
    const TensorFile u = read_tensor(path);
    CHECK(u.dims == t.dims);
    CHECK(u.values == t.values);
    // header layout: magic, version u16, rank u8
    const auto bytes = slurp(path);
    REQUIRE(bytes.size() == 4 + 2 + 1 + 3 * 4 + 24 * 4);
    CHECK(bytes[0] == 'F');
    CHECK(bytes[1] == 'D');
    CHECK(bytes[2] == 'W');
    CHECK(bytes[3] == 'M');
    CHECK(bytes[6] == 3);  // rank
    fs::remove(path);
}

TEST_CASE("tensor write validates shape consistency") {
    TensorFile t;
    t.dims = {2, 2};
    t.values = {1.0, 2.0, 3.0};
    CHECK_THROWS_AS(write_tensor(temp_file("bad.fdwm"), t), std::invalid_argument);
}

TEST_CASE("pgm renders with round-half-up") {
    const auto path = temp_file("g.pgm");
    std::vector<double> gray = {0.0, 1.0, 0.5, 0.25};
    write_pgm(path, gray, 2, 2);
    const auto bytes = slurp(path);
    const std::string header = "P5\n2 2\n255\n";
    REQUIRE(bytes.size() == header.size() + 4);
    CHECK(bytes[header.size() + 0] == 0);
    CHECK(bytes[header.size() + 1] == 255);
    CHECK(bytes[header.size() + 2] == 128);  // 127.5 rounds up
    CHECK(bytes[header.size() + 3] == 64);   // 63.75 rounds to 64
    fs::remove(path);
}

TEST_CASE("pbm packs bits MSB-first per row") {
    const auto path = temp_file("m.pbm");
    std::vector<std::uint8_t> mask = {1, 0, 1, 0, 0, 0, 0, 0, 0, 1, 1, 0, 0, 0, 0, 1, 1, 0};
    write_pbm(path, mask, 2, 9);  // 9 columns -> 2 bytes per row
    const auto bytes = slurp(path);
    const std::string header = "P4\n9 2\n";
    REQUIRE(bytes.size() == header.size() + 4);
    CHECK(bytes[header.size() + 0] == 0b10100000);
    CHECK(bytes[header.size() + 1] == 0b00000000);
    CHECK(bytes[header.size() + 2] == 0b11000011);
    CHECK(bytes[header.size() + 3] == 0b00000000);
    fs::remove(path);
}

TEST_CASE("checkpoints round-trip byte-exactly through save/load/save") {
    const Architecture arch = mlp_arch(4, 4, 1, 3, 8);
    const Classifier m = init(arch, 3, 99);
    const auto p1 = temp_file("a.ckpt");
    const auto p2 = temp_file("b.ckpt");
    save_checkpoint(p1, m);
    const Classifier loaded = load_checkpoint(p1);
    CHECK(loaded.class_count == 3);
    CHECK(loaded.arch.to_text() == arch.to_text());
    save_checkpoint(p2, loaded);
    CHECK(slurp(p1) == slurp(p2));
    fs::remove(p1);
    fs::remove(p2);
}

TEST_CASE("architecture text round-trips") {
    const Architecture a = tinycnn_arch(32, 32, 1, 4);
    const Architecture b = Architecture::from_text(a.to_text());
    CHECK(b.to_text() == a.to_text());
    CHECK(b.output_units() == 4);
    CHECK_THROWS_AS((void)Architecture::from_text("input:4x4x1|warp:3"), std::invalid_argument);
}

TEST_CASE("manifests round-trip and detect staleness") {
    const auto art = temp_file("artifact.bin");
    const auto input = temp_file("input.bin");
    {
        std::ofstream(art) << "artifact-bytes";
        std::ofstream(input) << "input-bytes";
    }
    RunManifest m;
    m.command = "gen-triggers";
    m.config["trigger.psnr_target"] = "32";
    m.seeds["key"] = 1234;
    m.add_input(input);
    m.add_output(art);
    m.timings_ms.emplace_back("total", 12.5);
    m.write(manifest_path_for(art));

    const RunManifest r = RunManifest::read(manifest_path_for(art));
    CHECK(r.command == "gen-triggers");
    CHECK(r.seeds.at("key") == 1234);
    CHECK(r.inputs.size() == 1);
    CHECK(r.outputs.size() == 1);

    CHECK(check_artifact_fresh(art).empty());
    {
        std::ofstream(input) << "changed";
    }
    const std::string msg = check_artifact_fresh(art);
    CHECK(msg.find("stale") != std::string::npos);
    {
        std::ofstream(art) << "tampered";
    }
    CHECK(check_artifact_fresh(art).find("does not match") != std::string::npos);
    fs::remove(art);
    fs::remove(input);
    fs::remove(manifest_path_for(art));
}

TEST_SUITE_END();
