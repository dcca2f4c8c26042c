// End-to-end tests that drive the installed CLI binary. The test runner
// passes its path through the SALRATE_CLI environment variable.

#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <sstream>
#include <string>

#include "doctest.h"
#include "salrate/codec.hpp"
#include "salrate/io.hpp"
#include "salrate/postprocess.hpp"
#include "salrate/qp_solver.hpp"
#include "salrate/saliency.hpp"
#include "support.hpp"

using namespace salrate;
namespace fs = std::filesystem;

namespace {

struct CliResult {
  int exit_code = -1;
  std::string output;  // stdout + stderr
};

std::string cli_path() {
  const char* env = std::getenv("SALRATE_CLI");
  REQUIRE_MESSAGE(env != nullptr, "SALRATE_CLI must point at the salrate binary");
  return env;
}

CliResult run_cli(const std::string& args, const fs::path& capture_dir) {
  static int counter = 0;
  fs::path log = capture_dir / ("cli-" + std::to_string(counter++) + ".log");
  std::string command = cli_path() + " " + args + " >" + log.string() + " 2>&1";
  int status = std::system(command.c_str());
  CliResult result;
  result.exit_code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
  std::ifstream in(log);
  std::stringstream buffer;
  buffer << in.rdbuf();
  result.output = buffer.str();
  return result;
}

// 32x16 single-frame fixture: the left macroblock sits below the 80th
// percentile pixel value, the right one above it.
void write_two_block_fixture(const fs::path& dir, fs::path& video_path, fs::path& saliency_dir) {
  VideoSequence video = testsupport::textured_video(32, 16, 1, 5150);
  video_path = dir / "clip.y4m";
  write_y4m(video, video_path);

  SaliencyMap map(32, 16);
  for (int y = 0; y < 16; ++y) {
    for (int x = 0; x < 32; ++x) {
      if (x < 16) {
        map.at(x, y) = 0.2;
      } else {
        map.at(x, y) = (y * 32 + x) % 8 < 5 ? 0.5 : 0.9;
      }
    }
  }
  saliency_dir = dir / "sal";
  fs::create_directories(saliency_dir);
  write_pgm(map, saliency_dir / "000000.pgm", 16);
}

// Frame 1 carries a single fixation so closed-form kernel checks apply.
void write_fixation_fixture(const fs::path& csv) {
  std::ofstream out(csv);
  out << "frame,observer,x,y\n";
  out << "0,1,16.0,12.0\n";
  out << "0,2,40.0,20.0\n";
  out << "1,1,30.0,16.0\n";
}

}  // namespace

TEST_CASE("cli: gt writes numbered maps with sigma defaults") {
  testsupport::TempDir dir;
  fs::path csv = dir.file("fix.csv");
  write_fixation_fixture(csv);

  CliResult r = run_cli("gt --fixations " + csv.string() + " --width 64 --height 32 --out " +
                            (dir.path() / "gt").string(),
                        dir.path());
  CHECK(r.exit_code == 0);
  CHECK(fs::exists(dir.path() / "gt" / "000000.pgm"));
  CHECK(fs::exists(dir.path() / "gt" / "000001.pgm"));

  // Default sigma is 120: check the kernel falloff against the closed form.
  SaliencyMap map = read_pgm(dir.path() / "gt" / "000001.pgm");
  const double expected = std::exp(-(20.0 * 20.0) / (2.0 * 120.0 * 120.0));
  CHECK(std::abs(map.at(50, 16) - expected) < 1e-3);

  CliResult missing = run_cli("gt --fixations /no/such/file.csv --width 4 --height 4 --out x",
                              dir.path());
  CHECK(missing.exit_code != 0);
  CHECK(missing.output.find("/no/such/file.csv") != std::string::npos);
}

TEST_CASE("cli: gt --observer switches to the single-observer map") {
  testsupport::TempDir dir;
  fs::path csv = dir.file("fix.csv");
  write_fixation_fixture(csv);

  CliResult r = run_cli("gt --fixations " + csv.string() +
                            " --width 64 --height 32 --observer 1 --out " +
                            (dir.path() / "solo").string(),
                        dir.path());
  CHECK(r.exit_code == 0);

  FixationSet fix = read_fixations_csv(csv);
  SaliencyMap expected = single_observer_map(fix, 1, 0, 64, 32, {120.0});
  SaliencyMap produced = read_pgm(dir.path() / "solo" / "000000.pgm");
  double worst = 0.0;
  for (size_t i = 0; i < expected.values.size(); ++i) {
    worst = std::max(worst, std::abs(expected.values[i] - produced.values[i]));
  }
  CHECK(worst < 1e-4);

  CliResult unknown = run_cli("gt --fixations " + csv.string() +
                                  " --width 64 --height 32 --observer 99 --out " +
                                  (dir.path() / "none").string(),
                              dir.path());
  CHECK(unknown.exit_code != 0);
  CHECK(unknown.output.find("UNKNOWN_OBSERVER") != std::string::npos);
}

TEST_CASE("cli: qpmap reproduces the two-block fixture with default p and b") {
  testsupport::TempDir dir;
  fs::path video;
  fs::path saliency;
  write_two_block_fixture(dir.path(), video, saliency);

  fs::path out = dir.file("maps.qpmap");
  CliResult r = run_cli("qpmap --video " + video.string() + " --saliency-dir " +
                            saliency.string() + " --base-qp 30 --out " + out.string(),
                        dir.path());
  CHECK(r.exit_code == 0);

  std::ifstream in(out);
  std::stringstream buffer;
  buffer << in.rdbuf();
  CHECK(buffer.str() == "QPMAP v1 2 1 1\n27 34\n");
  CHECK(fs::exists(dir.file("maps.qpmap.diag.csv")));
}

TEST_CASE("cli: qpmap rejects saliency frame-count mismatches") {
  testsupport::TempDir dir;
  VideoSequence video = testsupport::textured_video(32, 16, 2, 6);
  fs::path video_path = dir.file("two.y4m");
  write_y4m(video, video_path);
  fs::path saliency = dir.path() / "sal";
  fs::create_directories(saliency);
  write_pgm(SaliencyMap(32, 16, 0.5), saliency / "000000.pgm", 8);  // only one frame

  CliResult r = run_cli("qpmap --video " + video_path.string() + " --saliency-dir " +
                            saliency.string() + " --out " + dir.file("x.qpmap").string(),
                        dir.path());
  CHECK(r.exit_code != 0);
  CHECK(r.output.find("IO_FAILURE") != std::string::npos);
  CHECK(r.output.find("frame 1") != std::string::npos);
}

TEST_CASE("cli: encode/decode round-trip matches the library") {
  testsupport::TempDir dir;
  VideoSequence video = testsupport::textured_video(48, 32, 3, 777);
  fs::path video_path = dir.file("clip.y4m");
  write_y4m(video, video_path);

  std::vector<QpMap> maps(3, uniform_qp_map(48, 32, 30));
  fs::path qpmap_path = dir.file("maps.qpmap");
  write_qpmap(maps, qpmap_path);

  fs::path bitstream = dir.file("clip.salc");
  CliResult enc = run_cli("encode --video " + video_path.string() + " --qpmap " +
                              qpmap_path.string() + " --out " + bitstream.string(),
                          dir.path());
  CHECK(enc.exit_code == 0);
  CHECK(enc.output.find("total_bits") != std::string::npos);

  fs::path decoded_path = dir.file("decoded.y4m");
  CliResult dec = run_cli("decode --bitstream " + bitstream.string() + " --out " +
                              decoded_path.string(),
                          dir.path());
  CHECK(dec.exit_code == 0);

  SequenceEncodeResult expected = encode_sequence(video, maps);
  VideoSequence expected_decode = decode_sequence(expected, 48, 32);
  VideoSequence produced = read_y4m(decoded_path);
  CHECK(produced.frames == expected_decode.frames);

  // Corrupt container fails with the typed name.
  std::ofstream tamper(bitstream, std::ios::binary | std::ios::trunc);
  tamper << "SALC1 48 32 3\nxx";
  tamper.close();
  CliResult bad = run_cli("decode --bitstream " + bitstream.string() + " --out " +
                              dir.file("no.y4m").string(),
                          dir.path());
  CHECK(bad.exit_code != 0);
  CHECK(bad.output.find("CORRUPT_BITSTREAM") != std::string::npos);
}

TEST_CASE("cli: encode --regions reports the bit split") {
  testsupport::TempDir dir;
  fs::path video;
  fs::path saliency;
  write_two_block_fixture(dir.path(), video, saliency);

  std::vector<QpMap> maps = {uniform_qp_map(32, 16, 30)};
  maps[0].qp = {27, 34};
  fs::path qpmap_path = dir.file("maps.qpmap");
  write_qpmap(maps, qpmap_path);

  CliResult r = run_cli("encode --video " + video.string() + " --qpmap " + qpmap_path.string() +
                            " --out " + dir.file("o.salc").string() + " --regions " +
                            saliency.string(),
                        dir.path());
  CHECK(r.exit_code == 0);
  CHECK(r.output.find("nonsalient_bits") != std::string::npos);
  CHECK(r.output.find("nonsalient_share") != std::string::npos);
}

TEST_CASE("cli: metrics on pred == gt reaches the metric ceilings") {
  testsupport::TempDir dir;
  fs::path csv = dir.file("fix.csv");
  write_fixation_fixture(csv);

  // Narrow kernel: the maps stay peaked, so AUC and NSS have headroom.
  CliResult gt = run_cli("gt --fixations " + csv.string() +
                             " --width 64 --height 32 --sigma 12 --out " +
                             (dir.path() / "maps").string(),
                         dir.path());
  REQUIRE(gt.exit_code == 0);

  CliResult r = run_cli("metrics --pred-dir " + (dir.path() / "maps").string() + " --gt-dir " +
                            (dir.path() / "maps").string() + " --fixations " + csv.string() +
                            " --model-name self",
                        dir.path());
  CHECK(r.exit_code == 0);
  CHECK(r.output.find("model,auc_j,cc,kl,nss,sim\n") != std::string::npos);

  // Parse the row: self,<auc>,<cc>,<kl>,<nss>,<sim>
  size_t row_at = r.output.find("self,");
  REQUIRE(row_at != std::string::npos);
  double auc = 0;
  double ccv = 0;
  double kl = 0;
  double nssv = 0;
  double simv = 0;
  REQUIRE(std::sscanf(r.output.c_str() + row_at, "self,%lf,%lf,%lf,%lf,%lf", &auc, &ccv, &kl,
                      &nssv, &simv) == 5);
  CHECK(auc > 0.95);
  CHECK(ccv > 0.999);
  CHECK(kl < 1e-3);
  CHECK(simv > 0.999);
  CHECK(nssv > 1.5);
}

TEST_CASE("cli: metrics names the missing frame") {
  testsupport::TempDir dir;
  fs::path csv = dir.file("fix.csv");
  write_fixation_fixture(csv);
  fs::create_directories(dir.path() / "gt");
  fs::create_directories(dir.path() / "pred");
  write_pgm(SaliencyMap(8, 8, 0.5), dir.path() / "gt" / "000000.pgm", 8);
  write_pgm(SaliencyMap(8, 8, 0.5), dir.path() / "gt" / "000001.pgm", 8);
  write_pgm(SaliencyMap(8, 8, 0.5), dir.path() / "pred" / "000000.pgm", 8);

  CliResult r = run_cli("metrics --pred-dir " + (dir.path() / "pred").string() + " --gt-dir " +
                            (dir.path() / "gt").string() + " --fixations " + csv.string(),
                        dir.path());
  CHECK(r.exit_code != 0);
  CHECK(r.output.find("frame 1") != std::string::npos);
}

TEST_CASE("cli: ewssim identical videos score one and emit per-frame rows") {
  testsupport::TempDir dir;
  VideoSequence video = testsupport::textured_video(48, 32, 2, 12);
  fs::path a = dir.file("a.y4m");
  write_y4m(video, a);

  fs::path weights = dir.path() / "w";
  fs::create_directories(weights);
  for (int f = 0; f < 2; ++f) {
    write_pgm(testsupport::two_lobe_map(48, 32, f / 1.0), weights / (f == 0 ? "000000.pgm" : "000001.pgm"), 16);
  }

  fs::path csv = dir.file("per_frame.csv");
  CliResult r = run_cli("ewssim --original " + a.string() + " --compressed " + a.string() +
                            " --weights-dir " + weights.string() + " --out " + csv.string(),
                        dir.path());
  CHECK(r.exit_code == 0);
  CHECK(r.output.find("ewssim 1.000000") != std::string::npos);

  std::ifstream in(csv);
  std::string line;
  int rows = 0;
  while (std::getline(in, line)) ++rows;
  CHECK(rows == 3);  // header + one row per frame

  // Zero-weight frame kills the run with the typed error.
  write_pgm(SaliencyMap(48, 32, 0.0), weights / "000001.pgm", 16);
  CliResult bad = run_cli("ewssim --original " + a.string() + " --compressed " + a.string() +
                              " --weights-dir " + weights.string(),
                          dir.path());
  CHECK(bad.exit_code != 0);
  CHECK(bad.output.find("DEGENERATE_MAP") != std::string::npos);
}

TEST_CASE("cli: rank recovers a planted order deterministically") {
  testsupport::TempDir dir;
  // Deterministic comparisons: "good" beats "mid" beats "poor" most of the time.
  std::vector<ComparisonRecord> records;
  auto add = [&](const std::string& a, const std::string& b, int a_wins, int total, int salt) {
    for (int i = 0; i < total; ++i) {
      records.push_back({"v" + std::to_string(i % 3), a, b,
                         i < a_wins ? Outcome::A_WINS : Outcome::B_WINS,
                         "p" + std::to_string((i + salt) % 41)});
    }
  };
  add("good", "mid", 70, 100, 0);
  add("mid", "poor", 72, 100, 7);
  add("good", "poor", 85, 100, 13);
  fs::path tsv = dir.file("comparisons.tsv");
  write_comparisons(records, tsv);

  CliResult r1 = run_cli("rank --comparisons " + tsv.string() + " --boot 200 --seed 5 --out " +
                             dir.file("rank1.csv").string(),
                         dir.path());
  CHECK(r1.exit_code == 0);
  CHECK(r1.output.find("method,scale,ci_low,ci_high") != std::string::npos);
  size_t good_at = r1.output.find("good,");
  size_t mid_at = r1.output.find("mid,");
  size_t poor_at = r1.output.find("poor,");
  REQUIRE(good_at != std::string::npos);
  double s_good = std::stod(r1.output.substr(good_at + 5));
  double s_mid = std::stod(r1.output.substr(mid_at + 4));
  double s_poor = std::stod(r1.output.substr(poor_at + 5));
  CHECK(s_good > s_mid);
  CHECK(s_mid > s_poor);

  CliResult r2 = run_cli("rank --comparisons " + tsv.string() + " --boot 200 --seed 5 --out " +
                             dir.file("rank2.csv").string(),
                         dir.path());
  CHECK(r1.output == r2.output);

  // Default level equals --level 0.85 explicitly.
  CliResult r3 = run_cli("rank --comparisons " + tsv.string() +
                             " --level 0.85 --boot 200 --seed 5",
                         dir.path());
  size_t csv_start = r3.output.find("method,");
  size_t csv_start1 = r1.output.find("method,");
  CHECK(r3.output.substr(csv_start) == r1.output.substr(csv_start1));
}

TEST_CASE("cli: rank verification filter drops failing participants") {
  testsupport::TempDir dir;
  std::vector<ComparisonRecord> records;
  // Participant pass answers the check correctly and prefers m1; fail gets it wrong.
  for (int i = 0; i < 30; ++i) {
    std::string pid = "pass" + std::to_string(i);
    records.push_back({"check", "hq", "lq", Outcome::A_WINS, pid});
    records.push_back({"v1", "m1", "m2", Outcome::A_WINS, pid});
  }
  for (int i = 0; i < 30; ++i) {
    std::string pid = "fail" + std::to_string(i);
    records.push_back({"check", "hq", "lq", Outcome::B_WINS, pid});
    records.push_back({"v1", "m1", "m2", Outcome::B_WINS, pid});
  }
  fs::path tsv = dir.file("comparisons.tsv");
  write_comparisons(records, tsv);
  std::ofstream verify(dir.file("verify.tsv"));
  verify << "check\thq\tlq\tA\n";
  verify.close();

  CliResult r = run_cli("rank --comparisons " + tsv.string() + " --verify-file " +
                            dir.file("verify.tsv").string() + " --boot 100 --seed 2",
                        dir.path());
  CHECK(r.exit_code == 0);
  // Only the passing participants remain, so m1 dominates.
  size_t m1_at = r.output.find("m1,");
  REQUIRE(m1_at != std::string::npos);
  CHECK(std::stod(r.output.substr(m1_at + 3)) > 0.0);
}

TEST_CASE("cli: rd sweep emits one row per source and target") {
  testsupport::TempDir dir;
  VideoSequence video = testsupport::textured_video(64, 48, 2, 909);
  fs::path video_path = dir.file("clip.y4m");
  write_y4m(video, video_path);

  fs::path weights = dir.path() / "weights";
  fs::create_directories(weights);
  auto lobes = testsupport::two_lobe_sequence(64, 48, 2);
  write_pgm(lobes[0], weights / "000000.pgm", 16);
  write_pgm(lobes[1], weights / "000001.pgm", 16);

  SequenceEncodeResult mid =
      encode_sequence(video, std::vector<QpMap>(2, uniform_qp_map(64, 48, 30)));

  std::ofstream cfg(dir.file("rd.cfg"));
  cfg << "video=" << video_path.string() << "\n";
  cfg << "weights=" << weights.string() << "\n";
  cfg << "saliency.lobes=" << weights.string() << "\n";
  cfg << "targets=" << mid.total_bits << ",64\n";  // 64 bits is unreachable
  cfg << "out=" << (dir.path() / "rd-out").string() << "\n";
  cfg.close();

  CliResult r = run_cli("rd --config " + dir.file("rd.cfg").string(), dir.path());
  CHECK(r.exit_code == 0);
  CHECK(r.output.find("source,target_bits,actual_bits,ewssim") != std::string::npos);
  CHECK(r.output.find("uniform," + std::to_string(mid.total_bits)) != std::string::npos);
  CHECK(r.output.find("lobes," + std::to_string(mid.total_bits)) != std::string::npos);
  CHECK(r.output.find(",NA,NA") != std::string::npos);  // unreachable rows flagged
  CHECK(fs::exists(dir.path() / "rd-out" / "rd.csv"));
}

TEST_CASE("cli: fit-pp and apply-pp round out the postprocess interchange") {
  testsupport::TempDir dir;
  fs::path pred_dir = dir.path() / "pred";
  fs::path gt_dir = dir.path() / "gt";
  fs::path out_dir = dir.path() / "posted";
  fs::create_directories(pred_dir);
  fs::create_directories(gt_dir);

  SaliencyMap cp = center_prior(24, 20, 0.28, 0.28);
  fs::path cp_path = dir.file("cp.pgm");
  write_pgm(cp, cp_path, 16);
  SaliencyMap cp_quantized = read_pgm(cp_path);

  std::mt19937 rng(77);
  PostprocessParams planted{gamma_grid_point(22), blend_grid_point(8), cp_quantized};
  for (int f = 0; f < 2; ++f) {
    PixelMap m = testsupport::random_map(24, 20, rng);
    double peak = *std::max_element(m.values.begin(), m.values.end());
    for (double& v : m.values) v /= peak;
    char name[16];
    std::snprintf(name, sizeof(name), "%06d.pgm", f);
    write_pgm(m, pred_dir / name, 16);
    SaliencyMap quantized = read_pgm(pred_dir / name);
    write_pgm(apply_postprocess(quantized, planted), gt_dir / name, 16);
  }

  CliResult fit = run_cli("fit-pp --pred-dir " + pred_dir.string() + " --gt-dir " +
                              gt_dir.string() + " --cp " + cp_path.string() + " --stride 1 " +
                              "--out " + dir.file("pp.txt").string(),
                          dir.path());
  CHECK(fit.exit_code == 0);
  PostprocessParamsFile fitted = read_postprocess_params(dir.file("pp.txt"));
  CHECK(std::abs(std::log2(fitted.gamma) - std::log2(planted.gamma)) <= 6.0 / 32 + 1e-9);
  CHECK(std::abs(fitted.blend_w - planted.blend_w) <= 0.05 + 1e-9);

  CliResult apply = run_cli("apply-pp --params " + dir.file("pp.txt").string() + " --in-dir " +
                                pred_dir.string() + " --out-dir " + out_dir.string(),
                            dir.path());
  CHECK(apply.exit_code == 0);
  CHECK(fs::exists(out_dir / "000000.pgm"));
  CHECK(fs::exists(out_dir / "000001.pgm"));
}
