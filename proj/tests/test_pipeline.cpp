#include <gtest/gtest.h>

#include <cstring>
#include <filesystem>
#include <fstream>
#include <random>

#include "oracles.hpp"
#include "toonfuse/checkpoint.hpp"
#include "toonfuse/pipeline.hpp"
#include "toonfuse/png_io.hpp"
#include "toonfuse/rng.hpp"

using namespace toonfuse;
namespace fs = std::filesystem;

namespace {

bool bit_equal(const ImageBuffer& a, const ImageBuffer& b) {
    return a.same_shape(b) && std::memcmp(a.values().data(), b.values().data(), a.size() * sizeof(double)) == 0;
}

struct Rig {
    Checkpoint ck;
    std::mt19937_64 rng;
    ImageBuffer x, s, s2;

    explicit Rig(std::uint64_t seed, std::uint32_t res = 32)
        : ck(make_checkpoint(oracle::toy_config(res, 8, seed, 4, 8), 3)), rng(seed) {
        x = oracle::random_image(rng, res, res);
        s = oracle::random_image(rng, res, res);
        s2 = oracle::random_image(rng, res, res);
    }
    const Generator& g() const { return ck.generator; }
    const EncoderSet& e() const { return ck.encoders; }
    std::size_t L() const { return ck.generator.layer_count(); }

    ToonAgingRequest request(double age, ControlWeights cw) const {
        ToonAgingRequest r;
        r.input = x;
        r.style = s;
        r.target_age = AgeValue(age);
        r.control = std::move(cw);
        return r;
    }
};

}  // namespace

TEST(Sam, EqualsHandComposedChain) {
    Rig r(1);
    const AgeValue a(63);
    const auto w = add_latents(encode_age(r.e(), r.x, a), encode_inv_wplus(r.e(), r.x));
    EXPECT_TRUE(bit_equal(sam_reage(r.g(), r.e(), r.x, a), synthesize(r.g(), w)));
    EXPECT_TRUE(bit_equal(sam_reage(r.g(), r.e(), r.x, a), sam_reage(r.g(), r.e(), r.x, a)));
}

TEST(Sam, NullAgeEncoderRevertsToReconstruction) {
    Rig r(2);
    const EncoderSet null = r.e().with_null_age();
    EXPECT_TRUE(bit_equal(sam_reage(r.g(), null, r.x, AgeValue(20)), reconstruct(r.g(), null, r.x)));
    EXPECT_TRUE(bit_equal(reconstruct(r.g(), null, r.x), synthesize(r.g(), encode_inv_wplus(null, r.x))));
}

TEST(DualTransfer, EqualsHandComposedChain) {
    Rig r(3);
    const auto cw = make_control_weights(4, 0.5, 1.0, r.L());
    const auto expect = synthesize_dual(r.g(), encode_inv_wplus(r.e(), r.x),
                                        extrinsic_transform(r.g(), encode_inv_zplus(r.e(), r.s)), cw);
    EXPECT_TRUE(bit_equal(dual_style_transfer(r.g(), r.e(), r.x, r.s, cw), expect));
    EXPECT_TRUE(bit_equal(dual_style_transfer(r.g(), r.e(), r.x, r.s, make_control_weights(0, 0, 0, r.L())),
                          reconstruct(r.g(), r.e(), r.x)));
}

TEST(ToonAging, ZeroWeightsDegradeToSam) {
    Rig r(4);
    for (double age : {0.0, 35.0, 100.0}) {
        const auto req = r.request(age, make_control_weights(0, 0.0, 0.0, r.L()));
        EXPECT_TRUE(bit_equal(toon_aging(req, r.g(), r.e(), r.ck.age_probe), sam_reage(r.g(), r.e(), r.x, AgeValue(age))));
    }
}

TEST(ToonAging, AdaptiveEqualsExplicitScaledAge) {
    Rig r(5);
    auto req = r.request(40, make_control_weights(7, 0.5, 1.0, r.L()));
    req.adaptive = true;
    const auto resolved = resolve_age(req, r.ck.age_probe);
    EXPECT_EQ(resolved.effective.years(), 80.0);
    auto plain = r.request(80, make_control_weights(7, 0.5, 1.0, r.L()));
    EXPECT_TRUE(bit_equal(toon_aging(req, r.g(), r.e(), r.ck.age_probe), toon_aging(plain, r.g(), r.e(), r.ck.age_probe)));
}

TEST(ToonAging, ReferenceEqualsEstimatedAge) {
    Rig r(6);
    const ImageBuffer ref = oracle::random_image(r.rng, 32, 32);
    ToonAgingRequest req = r.request(10, make_control_weights(4, 0.5, 1.0, r.L()));
    req.target_age.reset();
    req.age_reference = ref;
    const AgeValue est = estimate_age(r.ck.age_probe, ref);
    const auto explicit_req = r.request(est.years(), req.control);
    EXPECT_TRUE(bit_equal(toon_aging(req, r.g(), r.e(), r.ck.age_probe),
                          toon_aging(explicit_req, r.g(), r.e(), r.ck.age_probe)));
}

TEST(ToonAging, AgeConflictPolicy) {
    Rig r(7);
    ToonAgingRequest req = r.request(10, make_control_weights(4, 0.5, 1.0, r.L()));
    req.age_reference = r.s2;
    EXPECT_THROW(toon_aging(req, r.g(), r.e(), r.ck.age_probe), ValidationError);
    req.prefer_reference = true;
    EXPECT_TRUE(resolve_age(req, r.ck.age_probe).from_reference);
    req.age_reference.reset();
    req.target_age.reset();
    EXPECT_THROW(resolve_age(req, r.ck.age_probe), ValidationError);
}

TEST(ToonAging, OverridesReplaceEncoderOutputs) {
    Rig r(8);
    const auto cw = make_control_weights(4, 0.5, 1.0, r.L());
    auto by_image = r.request(30, cw);
    auto by_latent = r.request(30, cw);
    by_latent.style.reset();
    by_latent.style_latent_override = encode_inv_zplus(r.e(), r.s);
    by_latent.reconstruction_override = encode_inv_wplus(r.e(), r.x);
    EXPECT_TRUE(bit_equal(toon_aging(by_image, r.g(), r.e(), r.ck.age_probe),
                          toon_aging(by_latent, r.g(), r.e(), r.ck.age_probe)));
    by_latent.style_latent_override.reset();
    EXPECT_THROW(toon_aging(by_latent, r.g(), r.e(), r.ck.age_probe), ValidationError);
}

TEST(RandomGenerate, DeterministicAndSeedSensitive) {
    Rig r(9);
    EXPECT_TRUE(bit_equal(random_generate(r.g(), 3), random_generate(r.g(), 3)));
    EXPECT_FALSE(random_generate(r.g(), 3) == random_generate(r.g(), 4));
}

TEST(RandomGenerate, StreamMatchesReferenceVectors) {
    // Raw 64-bit Mersenne Twister outputs.
    Rng standard(5489);
    const std::uint64_t first[] = {14514284786278117030ull, 4620546740167642908ull, 13109570281517897720ull,
                                   17462938647148434322ull};
    for (auto v : first) EXPECT_EQ(standard.next_u64(), v);
    Rng seven(7);
    const std::uint64_t seven_raw[] = {13915952638675311015ull, 17511516338625233250ull, 2165911192842364878ull,
                                       16452894106784333046ull};
    for (auto v : seven_raw) EXPECT_EQ(seven.next_u64(), v);

    // First four normal draws of z_in for seed 7.
    const auto z = sample_random_latents(16, 7);
    const double expect[] = {0x1.9765fb74c31bep+0, 0x1.8e3ca64978f4bp-2, 0x1.09d0f5cde98a5p-1, 0x1.88cb7c625b2adp+0};
    for (int i = 0; i < 4; ++i) EXPECT_DOUBLE_EQ(z.z_in.values()[i], expect[i]) << i;
}

TEST(RandomGenerate, ComposesMappingAndExtrinsicPaths) {
    Rig r(10);
    const auto z = sample_random_latents(8, 5);
    const auto w_in = LatentWPlus::broadcast(map_z_to_w(r.g(), z.z_in), r.L());
    const auto codes = extrinsic_transform(r.g(), LatentZPlus::broadcast(z.z_ex.values(), r.L()));
    EXPECT_TRUE(bit_equal(random_generate(r.g(), 5),
                          synthesize_dual(r.g(), w_in, codes, default_control_weights(r.g().config()))));
}

TEST(Grid, CellsEqualStandaloneCalls) {
    Rig r(11);
    ToonAgingRequest base = r.request(0, make_control_weights(4, 0.5, 1.0, r.L()));
    const std::vector<AgeValue> ages{AgeValue(10), AgeValue(55)};
    const GridResult grid = style_age_grid(base, r.g(), r.e(), r.ck.age_probe, r.s, r.s2, ages, 3);
    ASSERT_EQ(grid.rows, 2u);
    ASSERT_EQ(grid.cols, 3u);
    EXPECT_EQ(grid.row_labels, (std::vector<std::string>{"age=10", "age=55"}));
    EXPECT_EQ(grid.col_labels, (std::vector<std::string>{"t=0", "t=0.5", "t=1"}));
    const auto codes_a = style_codes(r.g(), r.e(), r.s);
    const auto codes_b = style_codes(r.g(), r.e(), r.s2);
    for (std::size_t i = 0; i < 2; ++i) {
        for (std::size_t j = 0; j < 3; ++j) {
            ToonAgingRequest req = base;
            req.target_age = ages[i];
            req.style.reset();
            req.extrinsic_override = lerp_latents(codes_a, codes_b, j / 2.0);
            EXPECT_TRUE(bit_equal(grid.cell(i, j), toon_aging(req, r.g(), r.e(), r.ck.age_probe))) << i << "," << j;
        }
        ToonAgingRequest single = base;
        single.target_age = ages[i];
        single.style = r.s;
        EXPECT_TRUE(bit_equal(grid.cell(i, 0), toon_aging(single, r.g(), r.e(), r.ck.age_probe)));
        single.style = r.s2;
        EXPECT_TRUE(bit_equal(grid.cell(i, 2), toon_aging(single, r.g(), r.e(), r.ck.age_probe)));
    }
    EXPECT_THROW(style_age_grid(base, r.g(), r.e(), r.ck.age_probe, r.s, r.s2, ages, 1), ValidationError);
    EXPECT_THROW(style_age_grid(base, r.g(), r.e(), r.ck.age_probe, r.s, r.s2, {}, 2), ValidationError);
}

TEST(Sweep, CutoffSweepShapeLabelsAndLatentDrift) {
    Rig r(12);
    const ToonAgingRequest base = r.request(45, make_control_weights(4, 0.5, 1.0, r.L()));
    std::vector<std::size_t> ms;
    for (std::size_t m = 1; m <= r.L(); ++m) ms.push_back(m);
    const GridResult grid = sweep_m(base, r.g(), r.e(), r.ck.age_probe, ms, 0.5, 1.0);
    ASSERT_EQ(grid.cells.size(), r.L());
    EXPECT_EQ(grid.col_labels.front(), "m=1");
    double prev = -1.0;
    for (std::size_t m : ms) {
        ToonAgingRequest req = base;
        req.control = make_control_weights(m, 0.5, 1.0, r.L());
        EXPECT_TRUE(bit_equal(grid.cell(0, m - 1), toon_aging(req, r.g(), r.e(), r.ck.age_probe)));
        const auto fused = toon_aging_fused_latent(req, r.g(), r.e(), r.ck.age_probe);
        const double d = frobenius_distance(fused.values(), style_codes(r.g(), r.e(), r.s).values());
        EXPECT_GE(d, prev) << m;
        prev = d;
    }
    EXPECT_THROW(sweep_m(base, r.g(), r.e(), r.ck.age_probe, {r.L() + 1}, 0.5, 1.0), ValidationError);
}

TEST(Sweep, SingletonWeightSweepEqualsDefaultRun) {
    Rig r(13);
    const auto cw = default_control_weights(r.g().config());
    const ToonAgingRequest base = r.request(30, cw);
    const GridResult grid = sweep_c(base, r.g(), r.e(), r.ck.age_probe, cw.m(), {0.5}, 1.0);
    ASSERT_EQ(grid.cells.size(), 1u);
    EXPECT_EQ(grid.col_labels, (std::vector<std::string>{"c=0.5"}));
    EXPECT_TRUE(bit_equal(grid.cells[0], toon_aging(base, r.g(), r.e(), r.ck.age_probe)));
}

TEST(Frames, PerFrameEqualsSingleCalls) {
    Rig r(14);
    const fs::path dir = fs::temp_directory_path() / "toonfuse_frames_ok";
    fs::remove_all(dir);
    fs::create_directories(dir);
    const ImageBuffer frame = decode_png(encode_png(r.x));
    const ImageBuffer other = decode_png(encode_png(r.s2));
    write_png(dir / "f002.png", frame);
    write_png(dir / "f000.png", frame);
    write_png(dir / "f001.png", other);
    std::ofstream(dir / "notes.txt") << "ignored";

    ToonAgingRequest base = r.request(50, make_control_weights(4, 0.5, 1.0, r.L()));
    const FrameResult out = process_frames(r.g(), r.e(), r.ck.age_probe, dir, base);
    ASSERT_EQ(out.frames.size(), 3u);
    EXPECT_EQ(out.frames[0].filename(), "f000.png");
    EXPECT_EQ(out.frames[2].filename(), "f002.png");
    EXPECT_TRUE(bit_equal(out.outputs[0], out.outputs[2]));
    for (std::size_t i = 0; i < 3; ++i) {
        ToonAgingRequest req = base;
        req.input = read_png(out.frames[i]);
        EXPECT_TRUE(bit_equal(out.outputs[i], toon_aging(req, r.g(), r.e(), r.ck.age_probe))) << i;
    }
}

TEST(Frames, EmptyAndUnreadable) {
    Rig r(15);
    const ToonAgingRequest base = r.request(50, make_control_weights(4, 0.5, 1.0, r.L()));
    const fs::path empty = fs::temp_directory_path() / "toonfuse_frames_empty";
    fs::remove_all(empty);
    fs::create_directories(empty);
    EXPECT_THROW(process_frames(r.g(), r.e(), r.ck.age_probe, empty, base), ValidationError);

    const fs::path bad = fs::temp_directory_path() / "toonfuse_frames_bad";
    fs::remove_all(bad);
    fs::create_directories(bad);
    write_png(bad / "a.png", r.x);
    std::ofstream(bad / "b.png") << "corrupt";
    try {
        process_frames(r.g(), r.e(), r.ck.age_probe, bad, base);
        FAIL() << "expected IoError";
    } catch (const IoError& e) {
        EXPECT_NE(std::string(e.what()).find("b.png"), std::string::npos);
    }
}
