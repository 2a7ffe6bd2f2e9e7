#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <random>

#include "comprint/image_io.hpp"
#include "comprint/jpeg_sim.hpp"

using namespace comprint;
using namespace comprint::jpegsim;

namespace {

GrayImage random_image(int w, int h, std::mt19937_64& rng) {
    GrayImage img(w, h);
    std::uniform_int_distribution<int> dist(0, 255);
    for (auto& s : img.samples) s = static_cast<float>(dist(rng));
    return img;
}

// Smooth-ish random content so compression artifacts behave like they do on
// natural images (pure white noise has no structure to destroy).
GrayImage random_textured_image(int w, int h, std::mt19937_64& rng) {
    GrayImage img(w, h);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    const double fx = 0.02 + 0.2 * u(rng), fy = 0.02 + 0.2 * u(rng);
    const double phase = 6.28 * u(rng);
    std::normal_distribution<double> noise(0.0, 12.0);
    for (int y = 0; y < h; ++y)
        for (int x = 0; x < w; ++x) {
            const double v = 128.0 + 80.0 * std::sin(6.28318 * (fx * x + fy * y) + phase) + noise(rng);
            img.at(y, x) = static_cast<float>(std::clamp(v, 0.0, 255.0));
        }
    return img;
}

}  // namespace

TEST_CASE("qf_to_table endpoints and scaling") {
    const QuantTable q50 = qf_to_table(50);
    CHECK(q50.values == standard_luminance_table());
    CHECK(q50.label == "QF50");

    const QuantTable q100 = qf_to_table(100);
    for (int v : q100.values) CHECK(v == 1);

    // Entry (0,0) at qf=35 against an independent scalar evaluation of the
    // scaling law (integer scale factor, as reference encoders compute it).
    const long s = 5000 / 35;
    const long expect = std::clamp((16 * s + 50) / 100, 1L, 255L);
    CHECK(qf_to_table(35).values[0] == expect);

    CHECK_THROWS_AS(qf_to_table(0), InvalidArgument);
    CHECK_THROWS_AS(qf_to_table(101), InvalidArgument);
}

TEST_CASE("qf_to_table matches the reference encoder's emitted DQT") {
    // The tables libjpeg writes at a given quality are the ground truth for
    // the scaling law; compare across the whole range used in training.
    for (int qf : {20, 25, 30, 35, 40, 50, 60, 70, 80, 90}) {
        GrayImage img(16, 16, 128.0f);
        const auto bytes = io::encode_jpeg_gray(img, qf);
        const auto parsed = parse_dqt(bytes);
        REQUIRE(parsed.size() == 1);
        CHECK(parsed[0].values == qf_to_table(qf).values);
    }
}

TEST_CASE("compress on a constant image is a fixed point up to DC granularity") {
    const GrayImage img(32, 24, 128.0f);
    for (int qf : {20, 90}) {
        const QuantTable t = qf_to_table(qf);
        const GrayImage out = compress(img, t);
        const double bound = t.values[0] / 16.0;
        for (float v : out.samples) CHECK(std::abs(v - 128.0f) <= bound);
    }
}

TEST_CASE("compress with an all-ones table is within one gray level") {
    std::mt19937_64 rng(7);
    const GrayImage img = random_image(24, 16, rng);
    QuantTable ones;
    ones.values.fill(1);
    ones.label = "unit";
    const GrayImage out = compress(img, ones);
    for (std::size_t i = 0; i < img.samples.size(); ++i)
        CHECK(std::abs(out.samples[i] - img.samples[i]) <= 1.0f);
}

TEST_CASE("compress rejects bad dimensions") {
    CHECK_THROWS_AS(compress(GrayImage(12, 16), qf_to_table(50)), InvalidArgument);
    CHECK_THROWS_AS(compress(GrayImage(4, 4), qf_to_table(50)), InvalidArgument);
    CHECK(compress_center_cropped(GrayImage(12, 17, 10.0f), qf_to_table(50)).width == 8);
}

TEST_CASE("compress agrees with a reference JPEG codec round-trip") {
    std::mt19937_64 rng(123);
    for (int qf : {20, 50, 90}) {
        const QuantTable t = qf_to_table(qf);
        for (int rep = 0; rep < 10; ++rep) {
            const GrayImage block = random_image(8, 8, rng);
            const GrayImage mine = compress(block, t);
            const GrayImage ref = io::decode_jpeg_gray(io::encode_jpeg_gray(block, qf));
            REQUIRE(ref.width == 8);
            for (int i = 0; i < 64; ++i)
                CHECK(std::abs(mine.samples[i] - ref.samples[i]) <= 1.0f);
        }
    }
}

TEST_CASE("compression_noise definitional identity and unit-table bound") {
    std::mt19937_64 rng(99);
    const GrayImage img = random_image(16, 16, rng);
    const QuantTable t = qf_to_table(30);
    const GrayImage noise = compression_noise(img, t);
    const GrayImage comp = compress(img, t);
    for (std::size_t i = 0; i < img.samples.size(); ++i)
        CHECK(img.samples[i] + noise.samples[i] == comp.samples[i]);

    QuantTable ones;
    ones.values.fill(1);
    ones.label = "unit";
    for (float v : compression_noise(img, ones).samples) CHECK(std::abs(v) <= 1.0f);

    const GrayImage flat(16, 16, 128.0f);
    const double bound = t.values[0] / 16.0;
    for (float v : compression_noise(flat, t).samples) CHECK(std::abs(v) <= bound);
}

TEST_CASE("DCT orthonormality: forward then inverse reproduces the block") {
    std::mt19937_64 rng(5);
    std::uniform_real_distribution<double> dist(-200.0, 200.0);
    for (int rep = 0; rep < 20; ++rep) {
        double block[64], coeff[64], back[64];
        for (double& v : block) v = dist(rng);
        forward_dct8(block, coeff);
        inverse_dct8(coeff, back);
        for (int i = 0; i < 64; ++i) CHECK(std::abs(back[i] - block[i]) < 1e-10);
    }
}

TEST_CASE("requantization with the same table is near-stable") {
    std::mt19937_64 rng(2024);
    std::vector<double> errs;
    for (int rep = 0; rep < 100; ++rep) {
        const GrayImage img = random_textured_image(32, 32, rng);
        const QuantTable t = qf_to_table(20 + 10 * (rep % 8));
        const GrayImage once = compress(img, t);
        const GrayImage twice = compress(once, t);
        for (std::size_t i = 0; i < once.samples.size(); ++i)
            errs.push_back(std::abs(twice.samples[i] - once.samples[i]));
    }
    std::sort(errs.begin(), errs.end());
    const double p99 = errs[static_cast<std::size_t>(errs.size() * 0.99)];
    CHECK(p99 <= 1.0);
}

TEST_CASE("mean noise magnitude decreases from QF20 to QF90") {
    std::mt19937_64 rng(31);
    double sum20 = 0.0, sum90 = 0.0;
    for (int i = 0; i < 20; ++i) {
        const GrayImage img = random_textured_image(64, 64, rng);
        for (float v : compression_noise(img, qf_to_table(20)).samples) sum20 += std::abs(v);
        for (float v : compression_noise(img, qf_to_table(90)).samples) sum90 += std::abs(v);
    }
    CHECK(sum20 >= sum90);
}

TEST_CASE("parse_dqt on a hand-constructed single-table stream") {
    QuantTable t;
    t.values.fill(16);
    t.label = "all16";
    const auto bytes = serialize_dqt({t});
    const auto parsed = parse_dqt(bytes);
    REQUIRE(parsed.size() == 1);
    for (int v : parsed[0].values) CHECK(v == 16);
    CHECK(parsed[0].origin == TableOrigin::Parsed);
}

TEST_CASE("parse_dqt round-trips serialized tables, both precisions") {
    std::mt19937_64 rng(8);
    std::uniform_int_distribution<int> dist(1, 255);
    std::vector<QuantTable> tables(3);
    for (auto& t : tables) {
        for (auto& v : t.values) v = dist(rng);
        t.label = "t";
    }
    tables[0].label = "a", tables[1].label = "b", tables[2].label = "c";
    for (bool wide : {false, true}) {
        const auto parsed = parse_dqt(serialize_dqt(tables, wide));
        REQUIRE(parsed.size() == tables.size());
        for (std::size_t i = 0; i < tables.size(); ++i) CHECK(parsed[i].values == tables[i].values);
    }
}

TEST_CASE("parse_dqt error paths") {
    // PNG signature is not a JPEG.
    const std::vector<std::uint8_t> png = {0x89, 'P', 'N', 'G', 0x0D, 0x0A, 0x1A, 0x0A};
    CHECK_THROWS_AS(parse_dqt(png), NotAJpeg);
    CHECK_THROWS_AS(parse_dqt({}), NotAJpeg);

    QuantTable t;
    t.values.fill(9);
    t.label = "t";
    auto bytes = serialize_dqt({t});
    bytes.resize(bytes.size() - 20);  // chop mid-table
    try {
        parse_dqt(bytes);
        FAIL("expected MalformedStream");
    } catch (const MalformedStream& e) {
        CHECK(e.offset > 0);
    }
}

TEST_CASE("parse_dqt finds the table in a real encoder's output") {
    GrayImage img(32, 32);
    for (int y = 0; y < 32; ++y)
        for (int x = 0; x < 32; ++x) img.at(y, x) = static_cast<float>((x * 8 + y * 3) % 256);
    const auto parsed = parse_dqt(io::encode_jpeg_gray(img, 50));
    REQUIRE(parsed.size() == 1);
    CHECK(parsed[0].values == qf_to_table(50).values);
}

TEST_CASE("nearest_standard_qf") {
    const auto exact = nearest_standard_qf(qf_to_table(70));
    CHECK(exact.qf == 70);
    CHECK(exact.distance == 0);

    QuantTable ones;
    ones.values.fill(1);
    ones.label = "ones";
    const auto top = nearest_standard_qf(ones);
    CHECK(top.qf == 100);
    CHECK(top.distance == 0);

    // Brute-force oracle over all 100 candidates for a Photoshop table.
    const QuantTable ps = builtin_photoshop_tables()[3];  // PS7
    long best_d = -1;
    int best_qf = 0;
    for (int qf = 1; qf <= 100; ++qf) {
        long d = 0;
        const QuantTable cand = qf_to_table(qf);
        for (int i = 0; i < 64; ++i) d += std::abs(cand.values[i] - ps.values[i]);
        if (best_d < 0 || d <= best_d) {
            best_d = d;
            best_qf = qf;
        }
    }
    const auto got = nearest_standard_qf(ps);
    CHECK(got.qf == best_qf);
    CHECK(got.distance == best_d);
}

TEST_CASE("default registry has the 19 documented classes") {
    const auto reg = default_registry();
    CHECK(reg.size() == 19);
    int std_count = 0, ps_count = 0;
    for (const auto& t : reg.tables) {
        if (t.origin == TableOrigin::StandardQf) ++std_count;
        if (t.origin == TableOrigin::Photoshop) ++ps_count;
    }
    CHECK(std_count == 10);
    CHECK(ps_count == 9);
    CHECK(reg.by_label("QF35").values == qf_to_table(35).values);
    CHECK_THROWS_AS(reg.by_label("QF99"), InvalidArgument);

    CompressionClassRegistry dup;
    dup.add(qf_to_table(50));
    CHECK_THROWS_AS(dup.add(qf_to_table(50)), InvalidArgument);
}

TEST_CASE("shipped table data file matches the built-in tables") {
    const auto from_file = load_table_file(std::filesystem::path(COMPRINT_DATA_DIR) /
                                               "photoshop_tables.txt",
                                           TableOrigin::Photoshop);
    const auto builtin = builtin_photoshop_tables();
    REQUIRE(from_file.size() == builtin.size());
    for (std::size_t i = 0; i < builtin.size(); ++i) {
        CHECK(from_file[i].label == builtin[i].label);
        CHECK(from_file[i].values == builtin[i].values);
    }
}
