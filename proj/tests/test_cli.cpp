#include <gtest/gtest.h>

#include <sys/wait.h>
#include <unistd.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "toonfuse/binary_io.hpp"
#include "toonfuse/manifest.hpp"

using namespace toonfuse;
namespace fs = std::filesystem;

namespace {

const fs::path kRoot = fs::temp_directory_path() / ("toonfuse_test_cli_" + std::to_string(getpid()));

struct CliRun {
    int code;
    std::string out;
    std::string err;
};

std::string slurp(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

CliRun cli(const std::string& args) {
    const fs::path out = kRoot / "stdout.txt";
    const fs::path err = kRoot / "stderr.txt";
    const std::string cmd = "cd '" + kRoot.string() + "' && '" TOONFUSE_CLI_PATH "' " + args + " > '" + out.string() +
                            "' 2> '" + err.string() + "'";
    const int status = std::system(cmd.c_str());
    return {WIFEXITED(status) ? WEXITSTATUS(status) : -1, slurp(out), slurp(err)};
}

class Cli : public ::testing::Test {
protected:
    static void SetUpTestSuite() {
        fs::remove_all(kRoot);
        fs::create_directories(kRoot);
        ASSERT_EQ(cli("init --out m.tagn --max-res 16 --seed 3 --latent-dim 16 --coarse-max-res 8").code, 0);
        ASSERT_EQ(cli("generate --ckpt m.tagn --seed 1 --out x.png").code, 0);
        ASSERT_EQ(cli("generate --ckpt m.tagn --seed 2 --out s.png").code, 0);
        ASSERT_EQ(cli("generate --ckpt m.tagn --seed 3 --out s2.png").code, 0);
    }
    static void TearDownTestSuite() { fs::remove_all(kRoot); }
};

}  // namespace

TEST_F(Cli, InitWritesMagicAndIsReproducible) {
    ASSERT_EQ(cli("init --out a.tagn").code, 0);
    ASSERT_EQ(cli("init --out b.tagn").code, 0);
    const std::string a = slurp(kRoot / "a.tagn");
    EXPECT_EQ(a.substr(0, 4), "TAGN");
    EXPECT_EQ(a, slurp(kRoot / "b.tagn"));
}

TEST_F(Cli, InspectReportsEighteenLayersAtFullResolution) {
    ASSERT_EQ(cli("init --out big.tagn --max-res 1024 --channel-base 1 --channel-max 1 --latent-dim 4 "
                  "--encoder-channels 1")
                  .code,
              0);
    const CliRun r = cli("inspect --ckpt big.tagn");
    ASSERT_EQ(r.code, 0) << r.err;
    EXPECT_NE(r.out.find("L=18"), std::string::npos);
    EXPECT_NE(r.out.find("default_m 7"), std::string::npos);
    EXPECT_NE(r.out.find("enc/age_probe.weight [256]"), std::string::npos);
}

TEST_F(Cli, InvalidConfigIsValidationExit) {
    const CliRun r = cli("init --out bad.tagn --max-res 48");
    EXPECT_EQ(r.code, 2);
    EXPECT_NE(r.err.find("max_resolution"), std::string::npos);
    EXPECT_FALSE(fs::exists(kRoot / "bad.tagn"));
    EXPECT_EQ(cli("init --out bad.tagn --channel-base 64 --channel-max 32").code, 2);
    EXPECT_EQ(cli("init").code, 2);
    EXPECT_EQ(cli("frobnicate").code, 2);
}

TEST_F(Cli, ZeroWeightsMatchReage) {
    ASSERT_EQ(cli("toonage --ckpt m.tagn --input x.png --style s.png --age 40 --c 0 --s 0 --out t0.png").code, 0);
    ASSERT_EQ(cli("reage --ckpt m.tagn --input x.png --age 40 --out r0.png").code, 0);
    EXPECT_EQ(slurp(kRoot / "t0.png"), slurp(kRoot / "r0.png"));
    ASSERT_EQ(cli("toonage --ckpt m.tagn --input x.png --style s.png --age 40 --out t1.png").code, 0);
    EXPECT_NE(slurp(kRoot / "t1.png"), slurp(kRoot / "r0.png"));
}

TEST_F(Cli, AgeOutOfRange) {
    const CliRun r = cli("toonage --ckpt m.tagn --input x.png --style s.png --age 101 --out bad.png");
    EXPECT_EQ(r.code, 2);
    EXPECT_NE(r.err.find("[0,100]"), std::string::npos);
    EXPECT_FALSE(fs::exists(kRoot / "bad.png"));
}

TEST_F(Cli, ValidationBeforeCompute) {
    EXPECT_EQ(cli("toonage --ckpt m.tagn --input x.png --style s.png --age 30 --c 1.5 --out bad.png").code, 2);
    EXPECT_EQ(cli("toonage --ckpt m.tagn --input x.png --style s.png --age 30 --convention both --out bad.png").code, 2);
    EXPECT_EQ(cli("toonage --ckpt m.tagn --input x.png --style s.png --age 30 --m 9 --out bad.png").code, 2);
    EXPECT_EQ(cli("toonage --ckpt m.tagn --input x.png --style s.png --out bad.png").code, 2);
    EXPECT_EQ(cli("toonage --ckpt m.tagn --input x.png --style s.png --age 30 --age-ref s2.png --out bad.png").code, 2);
    EXPECT_EQ(cli("toonage --ckpt m.tagn --input x.png --style s.png --age 30 --age-ref s2.png --prefer-age-ref "
                  "--out ok.png")
                  .code,
              0);
    EXPECT_EQ(cli("toonage --ckpt m.tagn --input x.png --style s.png --age 30 --adaptive --c 0 --out bad.png").code, 2);
}

TEST_F(Cli, IoErrors) {
    EXPECT_EQ(cli("toonage --ckpt m.tagn --input missing.png --style s.png --age 30 --out o.png").code, 1);
    EXPECT_EQ(cli("reage --ckpt missing.tagn --input x.png --age 30 --out o.png").code, 1);

    std::string bytes = slurp(kRoot / "m.tagn");
    bytes[0] = 'X';
    std::ofstream(kRoot / "badmagic.tagn", std::ios::binary) << bytes;
    CliRun r = cli("reage --ckpt badmagic.tagn --input x.png --age 30 --out o.png");
    EXPECT_EQ(r.code, 1);
    bytes = slurp(kRoot / "m.tagn");
    bytes[4] = 7;
    std::ofstream(kRoot / "badversion.tagn", std::ios::binary) << bytes;
    EXPECT_EQ(cli("inspect --ckpt badversion.tagn").code, 1);

    std::ofstream(kRoot / "badmagic.lat", std::ios::binary) << "XALW\1\0\0\0";
    EXPECT_EQ(cli("inspect --latent badmagic.lat").code, 1);
}

TEST_F(Cli, ManifestDigestsMatchFiles) {
    ASSERT_EQ(cli("toonage --ckpt m.tagn --input x.png --style s.png --age 25 --out man.png").code, 0);
    const RunManifest m = manifest_from_json(slurp(kRoot / "man.png.manifest.json"));
    EXPECT_EQ(m.command, "toonage");
    EXPECT_EQ(m.tool_version, kToolVersion);
    EXPECT_EQ(m.parameters.at("m"), 4);
    EXPECT_EQ(m.parameters.at("c"), 0.5);
    EXPECT_EQ(m.parameters.at("s"), 1.0);
    ASSERT_EQ(m.outputs.size(), 1u);
    ASSERT_EQ(m.inputs.size(), 3u);
    for (const auto& d : m.inputs) EXPECT_EQ(digest_file(kRoot / d.path).fnv1a64, d.fnv1a64) << d.path;
    EXPECT_EQ(digest_file(kRoot / "man.png").fnv1a64, m.outputs[0].fnv1a64);
    EXPECT_FALSE(fs::exists(kRoot / "man.png.tmp"));
}

TEST_F(Cli, SweepCutoffProducesSeventeenCells) {
    ASSERT_EQ(cli("init --out big.tagn --max-res 1024 --channel-base 1 --channel-max 1 --latent-dim 4 "
                  "--encoder-channels 1")
                  .code,
              0);
    ASSERT_EQ(cli("generate --ckpt big.tagn --seed 1 --out bx.png").code, 0);
    ASSERT_EQ(cli("generate --ckpt big.tagn --seed 2 --out bs.png").code, 0);
    const CliRun r =
        cli("sweep --ckpt big.tagn --input bx.png --style bs.png --age 30 --param m --values 1..17 --out-dir sweep");
    ASSERT_EQ(r.code, 0) << r.err;
    for (int j = 0; j < 17; ++j) EXPECT_TRUE(fs::exists(kRoot / "sweep" / ("cell_r0_c" + std::to_string(j) + ".png")));
    EXPECT_FALSE(fs::exists(kRoot / "sweep" / "cell_r0_c17.png"));
    EXPECT_TRUE(fs::exists(kRoot / "sweep" / "grid.png"));
    const RunManifest m = manifest_from_json(slurp(kRoot / "sweep" / "manifest.json"));
    EXPECT_EQ(m.parameters.at("col_labels").size(), 17u);
    EXPECT_EQ(m.parameters.at("col_labels")[16], "m=17");
}

TEST_F(Cli, InterpEndpointsMatchSingleStyleRuns) {
    ASSERT_EQ(cli("interp --ckpt m.tagn --input x.png --style-a s.png --style-b s2.png --ages 20,60 --t-steps 2 "
                  "--out-dir interp")
                  .code,
              0);
    ASSERT_EQ(cli("toonage --ckpt m.tagn --input x.png --style s.png --age 60 --out ia.png").code, 0);
    ASSERT_EQ(cli("toonage --ckpt m.tagn --input x.png --style s2.png --age 60 --out ib.png").code, 0);
    EXPECT_EQ(slurp(kRoot / "interp" / "cell_r1_c0.png"), slurp(kRoot / "ia.png"));
    EXPECT_EQ(slurp(kRoot / "interp" / "cell_r1_c1.png"), slurp(kRoot / "ib.png"));
    EXPECT_NE(slurp(kRoot / "ia.png"), slurp(kRoot / "ib.png"));
    EXPECT_EQ(cli("interp --ckpt m.tagn --input x.png --style-a s.png --style-b s2.png --t-steps 1 --out-dir i1").code,
              2);
}

TEST_F(Cli, InvertReducesLossTenfold) {
    ASSERT_EQ(cli("reage --ckpt m.tagn --input x.png --age 30 --out target.png").code, 0);
    const CliRun r = cli("invert --ckpt m.tagn --target target.png --out inv.lat --steps 200");
    ASSERT_EQ(r.code, 0) << r.err;
    std::istringstream trace(slurp(kRoot / "inv.lat.trace.txt"));
    std::vector<double> losses;
    std::size_t idx;
    double loss;
    while (trace >> idx >> loss) losses.push_back(loss);
    ASSERT_GE(losses.size(), 2u);
    EXPECT_LE(losses.size(), 201u);
    EXPECT_LE(losses.back(), 0.1 * losses.front());
    EXPECT_EQ(slurp(kRoot / "inv.lat").substr(0, 4), "TALW");
    const CliRun info = cli("inspect --latent inv.lat");
    EXPECT_NE(info.out.find("L=6 D=16"), std::string::npos);
}

TEST_F(Cli, LatentInputsSubstituteEncoders) {
    ASSERT_EQ(cli("invert --ckpt m.tagn --target x.png --out xin.lat --steps 3").code, 0);
    ASSERT_EQ(cli("toonage --ckpt m.tagn --input x.png --input-latent xin.lat --style s.png --age 30 --out lat.png").code,
              0);
    EXPECT_EQ(cli("toonage --ckpt m.tagn --input x.png --style-latent xin.lat --age 30 --out lat2.png").code, 0);
}

TEST_F(Cli, FramesDirectory) {
    fs::create_directories(kRoot / "frames");
    fs::copy_file(kRoot / "x.png", kRoot / "frames" / "a.png", fs::copy_options::overwrite_existing);
    fs::copy_file(kRoot / "x.png", kRoot / "frames" / "b.png", fs::copy_options::overwrite_existing);
    ASSERT_EQ(cli("frames --ckpt m.tagn --frames-dir frames --style s.png --age 50 --out-dir fout").code, 0);
    EXPECT_EQ(slurp(kRoot / "fout" / "a.png"), slurp(kRoot / "fout" / "b.png"));
    ASSERT_EQ(cli("toonage --ckpt m.tagn --input x.png --style s.png --age 50 --out single.png").code, 0);
    EXPECT_EQ(slurp(kRoot / "fout" / "a.png"), slurp(kRoot / "single.png"));
    fs::create_directories(kRoot / "noframes");
    EXPECT_EQ(cli("frames --ckpt m.tagn --frames-dir noframes --style s.png --age 50 --out-dir f2").code, 2);
}

TEST_F(Cli, HelpAndVersion) {
    EXPECT_EQ(cli("--help").code, 0);
    const CliRun v = cli("--version");
    EXPECT_EQ(v.code, 0);
    EXPECT_NE(v.out.find(kToolVersion), std::string::npos);
}
