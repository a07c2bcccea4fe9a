#include <catch2/catch_amalgamated.hpp>

#include <json.hpp>

#include "test_util.hpp"

using namespace cpmri;
using test_util::run_cli;

TEST_CASE("field files round-trip bit-exactly", "[io]") {
    const auto dir = test_util::fresh_dir("fieldio");
    std::mt19937_64 rng(151);
    const ComplexField x = test_util::random_field(9, 7, rng);
    write_field(dir / "x.cfld", x);
    CHECK(test_util::bit_equal(read_field(dir / "x.cfld"), x));
    std::filesystem::remove_all(dir);
}

TEST_CASE("mask files round-trip with their tuning metadata", "[io]") {
    const auto dir = test_util::fresh_dir("maskio");
    const SamplingMask m = generate_poisson_mask(32, 32, 3.0, 4, 12);
    write_mask(dir / "m.cmsk", m);
    const SamplingMask r = read_mask(dir / "m.cmsk");
    CHECK(r.kept == m.kept);
    CHECK(r.target_R == m.target_R);
    CHECK(r.calib_radius == m.calib_radius);
    CHECK(r.seed == m.seed);
    CHECK(r.min_distance == m.min_distance);
    std::filesystem::remove_all(dir);
}

TEST_CASE("corrupt containers are reported as I/O errors", "[io]") {
    const auto dir = test_util::fresh_dir("badio");
    {
        std::ofstream os(dir / "junk.cfld", std::ios::binary);
        os << "not a container";
    }
    CHECK_THROWS_AS(read_field(dir / "junk.cfld"), io_error);
    CHECK_THROWS_AS(read_field(dir / "missing.cfld"), io_error);

    // truncated payload
    std::mt19937_64 rng(157);
    write_field(dir / "x.cfld", test_util::random_field(8, 8, rng));
    const std::string full = test_util::slurp(dir / "x.cfld");
    {
        std::ofstream os(dir / "trunc.cfld", std::ios::binary);
        os.write(full.data(), static_cast<std::streamsize>(full.size() - 32));
    }
    CHECK_THROWS_AS(read_field(dir / "trunc.cfld"), io_error);
    std::filesystem::remove_all(dir);
}

TEST_CASE("pgm emission writes a well-formed image", "[io]") {
    const auto dir = test_util::fresh_dir("pgm");
    write_pgm(dir / "img.pgm", {0.0, 0.5, 1.0, 2.0}, 2, 2);
    const std::string bytes = test_util::slurp(dir / "img.pgm");
    CHECK(bytes.rfind("P5\n2 2\n255\n", 0) == 0);
    CHECK(bytes.size() == std::string("P5\n2 2\n255\n").size() + 4);
    CHECK(static_cast<unsigned char>(bytes.back()) == 255); // clamped
    std::filesystem::remove_all(dir);
}

TEST_CASE("cli help lists every flag with its default", "[cli]") {
    const auto dir = test_util::fresh_dir("clihelp");
    const auto top = run_cli("--help", dir);
    CHECK(top.exit_code == 0);
    for (const char* sub : {"phantom", "mask", "undersample", "recon", "train", "eval"})
        CHECK(top.output.find(sub) != std::string::npos);

    const struct {
        const char* sub;
        std::vector<const char*> flags;
    } expected[] = {
        {"phantom", {"--out-dir", "--prefix", "--count", "--height", "--width", "--jitter", "--seed"}},
        {"mask", {"--out", "--height", "--width", "--accel", "--calib", "--seed"}},
        {"undersample", {"--image", "--mask", "--out"}},
        {"recon",
         {"--method", "--kspace", "--mask", "--out", "--weights", "--trace", "--lambda", "--sigma",
          "--tau", "--theta", "--iters", "--tol"}},
        {"train",
         {"--config", "--out-dir", "--height", "--width", "--train-count", "--val-count", "--accel",
          "--calib", "--augment", "--jitter", "--epochs", "--batch-size", "--lr", "--beta1",
          "--beta2", "--eps", "--seed", "--threads", "--resume"}},
        {"eval", {"--ref", "--recon", "--label", "--accel", "--out", "--images", "--amplify"}},
    };
    for (const auto& e : expected) {
        const auto res = run_cli(std::string(e.sub) + " --help", dir);
        CHECK(res.exit_code == 0);
        for (const char* flag : e.flags) {
            CAPTURE(e.sub, flag);
            CHECK(res.output.find(flag) != std::string::npos);
        }
    }
    // defaults are rendered for value options
    const auto mask_help = run_cli("mask --help", dir);
    CHECK(mask_help.output.find("[4]") != std::string::npos);  // --accel default
    CHECK(mask_help.output.find("[64]") != std::string::npos); // --height default
    std::filesystem::remove_all(dir);
}

TEST_CASE("cli exit codes distinguish failure classes", "[cli]") {
    const auto dir = test_util::fresh_dir("cliexit");
    CHECK(run_cli("recon --bogus-flag", dir).exit_code == 2);
    CHECK(run_cli("undersample --image nope.cfld --mask nope.cmsk --out o.cfld", dir).exit_code == 3);
    CHECK(run_cli("mask --out m.cmsk --height 32 --width 32 --accel 40 --calib 5", dir).exit_code == 5);
    // malformed header
    {
        std::ofstream os(dir / "junk.cfld", std::ios::binary);
        os << "garbage";
    }
    CHECK(run_cli("recon --method zf --kspace junk.cfld --mask junk.cfld --out o.cfld", dir).exit_code == 3);
    std::filesystem::remove_all(dir);
}

TEST_CASE("phantom command is deterministic", "[cli]") {
    const auto dir = test_util::fresh_dir("cliphantom");
    CHECK(run_cli("phantom --out-dir a --count 2 --height 24 --width 24 --jitter 1 --seed 5", dir)
              .exit_code == 0);
    CHECK(run_cli("phantom --out-dir b --count 2 --height 24 --width 24 --jitter 1 --seed 5", dir)
              .exit_code == 0);
    CHECK(test_util::slurp(dir / "a" / "phantom_000.cfld") ==
          test_util::slurp(dir / "b" / "phantom_000.cfld"));
    CHECK(test_util::slurp(dir / "a" / "phantom_001.cfld") ==
          test_util::slurp(dir / "b" / "phantom_001.cfld"));
    CHECK(run_cli("phantom --count 0", dir).exit_code == 0);

    // manifests agree once the timing field is stripped
    auto manifest_without_timing = [](const std::filesystem::path& p) {
        nlohmann::json j = nlohmann::json::parse(test_util::slurp(p));
        j.erase("timing");
        return j;
    };
    const nlohmann::json ma = manifest_without_timing(dir / "a" / "phantom_000.cfld.manifest.json");
    const nlohmann::json mb = manifest_without_timing(dir / "b" / "phantom_000.cfld.manifest.json");
    CHECK(ma.at("command") == "phantom");
    CHECK(ma.at("seeds").at("seed") == 5);
    CHECK(ma.at("outputs").size() == 2);
    const nlohmann::json raw = nlohmann::json::parse(
        test_util::slurp(dir / "a" / "phantom_000.cfld.manifest.json"));
    CHECK(raw.contains("timing")); // wall clock lives in its own field
    std::filesystem::remove_all(dir);
}

TEST_CASE("zero-filled reconstruction of fully sampled data recovers the image", "[cli]") {
    const auto dir = test_util::fresh_dir("clizf");
    REQUIRE(run_cli("phantom --out-dir . --count 1 --height 32 --width 32", dir).exit_code == 0);
    REQUIRE(run_cli("mask --out full.cmsk --height 32 --width 32 --accel 1 --calib 2", dir).exit_code == 0);
    REQUIRE(run_cli("undersample --image phantom_000.cfld --mask full.cmsk --out y.cfld", dir)
                .exit_code == 0);
    REQUIRE(run_cli("recon --method zf --kspace y.cfld --mask full.cmsk --out rec.cfld", dir)
                .exit_code == 0);
    const ComplexField p = read_field(dir / "phantom_000.cfld");
    const ComplexField rec = read_field(dir / "rec.cfld");
    CHECK(test_util::rel_l2_error(rec, p) < 1e-12);

    // evaluating an image against itself gives the SSIM = 1 row
    REQUIRE(run_cli("eval --ref phantom_000.cfld --recon phantom_000.cfld --label self "
                    "--accel 1 --out report.csv",
                    dir)
                .exit_code == 0);
    const std::string csv = test_util::slurp(dir / "report.csv");
    CHECK(csv.find("self,1,0,1,inf") != std::string::npos);
    std::filesystem::remove_all(dir);
}

TEST_CASE("train config file is applied with flag precedence", "[cli]") {
    const auto dir = test_util::fresh_dir("clicfg");
    {
        std::ofstream os(dir / "train.ini");
        os << "# tiny configuration\n"
           << "height=16\nwidth=16\ntrain-count=6\nval-count=2\naccel=2\ncalib=2\n"
           << "epochs=2\nbatch-size=2\nlr=0.001\nseed=3\n";
    }
    // flag overrides the file's epoch count
    const auto r = run_cli("train --config train.ini --out-dir run --epochs 1", dir);
    REQUIRE(r.exit_code == 0);
    nlohmann::json man = nlohmann::json::parse(test_util::slurp(dir / "run" / "train.manifest.json"));
    CHECK(man.at("config").at("height") == 16);
    CHECK(man.at("config").at("train_count") == 6);
    CHECK(man.at("config").at("epochs") == 1); // flag wins over file
    CHECK(man.at("seeds").at("seed") == 3);

    // unknown keys are rejected as malformed input
    {
        std::ofstream os(dir / "bad.ini");
        os << "heigth=16\n";
    }
    CHECK(run_cli("train --config bad.ini --out-dir run2", dir).exit_code == 3);
    std::filesystem::remove_all(dir);
}

TEST_CASE("cp reconstruction via cli writes a trace", "[cli]") {
    const auto dir = test_util::fresh_dir("clicp");
    REQUIRE(run_cli("phantom --out-dir . --count 1 --height 32 --width 32", dir).exit_code == 0);
    REQUIRE(run_cli("mask --out m.cmsk --height 32 --width 32 --accel 3 --calib 3 --seed 2", dir)
                .exit_code == 0);
    REQUIRE(run_cli("undersample --image phantom_000.cfld --mask m.cmsk --out y.cfld", dir)
                .exit_code == 0);
    REQUIRE(run_cli("recon --method cp --kspace y.cfld --mask m.cmsk --out rec.cfld "
                    "--iters 60 --trace trace.csv",
                    dir)
                .exit_code == 0);
    const std::string trace = test_util::slurp(dir / "trace.csv");
    CHECK(trace.rfind("iteration,objective,relative_change\n", 0) == 0);
    const ComplexField rec = read_field(dir / "rec.cfld");
    CHECK(all_finite(rec));
    std::filesystem::remove_all(dir);
}
