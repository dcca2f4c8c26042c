// salrate: saliency-aware bit allocation toolkit.
//
// Subcommands cover the full pipeline: ground-truth map generation from
// fixations, QP map solving, encoding/decoding with the built-in intra
// codec, the objective saliency metric battery, EWSSIM, Thurstone Case V
// ranking of pairwise comparisons, and rate-distortion sweeps.

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "salrate/codec.hpp"
#include "salrate/error.hpp"
#include "salrate/io.hpp"
#include "salrate/metrics.hpp"
#include "salrate/postprocess.hpp"
#include "salrate/qp_solver.hpp"
#include "salrate/ranking.hpp"
#include "salrate/saliency.hpp"
#include "salrate/types.hpp"

namespace fs = std::filesystem;
using namespace salrate;

namespace {

fs::path frame_path(const fs::path& dir, int frame) {
  char name[32];
  std::snprintf(name, sizeof(name), "%06d.pgm", frame);
  return dir / name;
}

// Loads 000000.pgm, 000001.pgm, ... When expected >= 0, exactly that many
// frames must be present; otherwise the contiguous run defines the count.
std::vector<SaliencyMap> load_map_dir(const fs::path& dir, int expected) {
  std::vector<SaliencyMap> maps;
  for (int i = 0; expected < 0 || i < expected; ++i) {
    fs::path path = frame_path(dir, i);
    if (!fs::exists(path)) {
      if (expected < 0) break;
      fail(ErrorCode::IO_FAILURE,
           "frame " + std::to_string(i) + ": missing map file " + path.string());
    }
    maps.push_back(read_pgm(path));
  }
  if (maps.empty()) fail(ErrorCode::EMPTY_FILE, "no frame maps under " + dir.string());
  return maps;
}

void require_map_dims(const std::vector<SaliencyMap>& maps, int width, int height) {
  for (size_t i = 0; i < maps.size(); ++i) {
    if (maps[i].width != width || maps[i].height != height) {
      fail(ErrorCode::DIMENSION_MISMATCH,
           "frame " + std::to_string(i) + ": map is " + std::to_string(maps[i].width) + "x" +
               std::to_string(maps[i].height) + ", video is " + std::to_string(width) + "x" +
               std::to_string(height));
    }
  }
}

std::ofstream open_out_file(const fs::path& path) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) fail(ErrorCode::IO_FAILURE, "cannot open " + path.string());
  return out;
}

// ---------------------------------------------------------------------------
// gt: fixations -> per-frame ground-truth saliency PGMs

struct GtArgs {
  std::string fixations;
  int width = 0;
  int height = 0;
  double sigma = 120.0;
  std::string out_dir;
  int observer = 0;
  bool have_observer = false;
  int frames = -1;
  int bits = 16;
};

int run_gt(const GtArgs& args) {
  FixationSet fix = read_fixations_csv(fs::path(args.fixations));
  GaussianKernelSpec kernel{args.sigma};

  int frames = args.frames;
  if (frames < 0) {
    int max_frame = -1;
    for (const Fixation& f : fix.records) max_frame = std::max(max_frame, f.frame);
    frames = max_frame + 1;
  }
  if (frames <= 0) fail(ErrorCode::NO_FIXATIONS, "fixation set covers no frames");

  fs::create_directories(args.out_dir);
  for (int f = 0; f < frames; ++f) {
    SaliencyMap map =
        args.have_observer
            ? single_observer_map(fix, args.observer, f, args.width, args.height, kernel)
            : fixations_to_map(fix, f, args.width, args.height, kernel);
    write_pgm(map, frame_path(args.out_dir, f), args.bits);
  }
  std::cout << "wrote " << frames << " maps to " << args.out_dir << "\n";
  return 0;
}

// ---------------------------------------------------------------------------
// qpmap: video + saliency -> QPMAP v1 + diagnostics CSV

struct QpmapArgs {
  std::string video;
  std::string saliency_dir;
  int base_qp = 30;
  double p = 80.0;
  double b = 70.0;
  std::string model = "analytic";
  std::string out;
  std::string diag;
};

BitCostModel make_model(const std::string& name, const VideoSequence& video) {
  if (name == "analytic") return BitCostModel::analytic();
  if (name == "lut") {
    if (video.frame_count() == 0) fail(ErrorCode::EMPTY_INPUT, "no frame to calibrate on");
    return calibrate_bit_cost(codec_probe(), video.frames[0], video.width, video.height);
  }
  fail(ErrorCode::BAD_CONFIG, "model must be 'analytic' or 'lut'");
}

int run_qpmap(const QpmapArgs& args) {
  VideoSequence video = read_y4m(fs::path(args.video));
  std::vector<SaliencyMap> saliency = load_map_dir(args.saliency_dir, video.frame_count());
  require_map_dims(saliency, video.width, video.height);
  BitCostModel model = make_model(args.model, video);

  std::vector<FrameDiagnostics> diag;
  std::vector<QpMap> maps =
      build_qp_maps(video.width, video.height, saliency, args.base_qp, args.p, args.b,
                    model, &diag);
  write_qpmap(maps, fs::path(args.out));

  fs::path diag_path = args.diag.empty() ? fs::path(args.out + ".diag.csv") : fs::path(args.diag);
  std::ofstream diag_out = open_out_file(diag_path);
  diag_out << "frame,alpha,beta,s_p,share,clamped\n";
  char buf[256];
  for (const FrameDiagnostics& d : diag) {
    std::snprintf(buf, sizeof(buf), "%d,%.9g,%.9g,%.9g,%.9g,%d\n", d.frame, d.alpha, d.beta,
                  d.s_p, d.share, d.clamped);
    diag_out << buf;
  }
  std::cout << "wrote " << maps.size() << " QP maps to " << args.out << "\n";
  return 0;
}

// ---------------------------------------------------------------------------
// encode / decode

struct EncodeArgs {
  std::string video;
  std::string qpmap;
  std::string out;
  std::string regions_dir;
  double p = 80.0;
};

int run_encode(const EncodeArgs& args) {
  VideoSequence video = read_y4m(fs::path(args.video));
  std::vector<QpMap> maps = read_qpmap(fs::path(args.qpmap));
  SequenceEncodeResult enc = encode_sequence(video, maps);
  write_container(enc, video.width, video.height, fs::path(args.out));
  std::cout << "total_bits " << enc.total_bits << "\n";
  std::cout << "coded_bits " << enc.total_coded_bits << "\n";

  if (!args.regions_dir.empty()) {
    std::vector<SaliencyMap> saliency = load_map_dir(args.regions_dir, video.frame_count());
    require_map_dims(saliency, video.width, video.height);
    std::vector<RegionMaps> regions;
    regions.reserve(saliency.size());
    for (const SaliencyMap& map : saliency) regions.push_back(region_maps(map, args.p));
    RegionBitTotals split = region_bit_split(enc, regions);
    char buf[160];
    std::snprintf(buf, sizeof(buf), "nonsalient_bits %llu\nsalient_bits %llu\nnonsalient_share %.6f\n",
                  static_cast<unsigned long long>(split.nonsalient_bits),
                  static_cast<unsigned long long>(split.salient_bits), split.nonsalient_share());
    std::cout << buf;
  }
  return 0;
}

int run_decode(const std::string& bitstream, const std::string& out) {
  ContainerData data = read_container(fs::path(bitstream));
  VideoSequence video = decode_container(data);
  write_y4m(video, fs::path(out));
  std::cout << "decoded " << video.frame_count() << " frames\n";
  return 0;
}

// ---------------------------------------------------------------------------
// metrics: objective battery averaged over frames

struct MetricsArgs {
  std::string pred_dir;
  std::string gt_dir;
  std::string fixations;
  std::string model_name;
  std::string out;
};

int run_metrics(const MetricsArgs& args) {
  std::vector<SaliencyMap> gt = load_map_dir(args.gt_dir, -1);
  std::vector<SaliencyMap> pred = load_map_dir(args.pred_dir, static_cast<int>(gt.size()));
  FixationSet fix = read_fixations_csv(fs::path(args.fixations));

  MetricReport report;
  for (size_t f = 0; f < gt.size(); ++f) {
    report.auc_j += auc_judd(pred[f], fix, static_cast<int>(f));
    report.cc += cc(pred[f], gt[f]);
    report.kl += kl_div(pred[f], gt[f]);
    report.nss += nss(pred[f], fix, static_cast<int>(f));
    report.sim += sim(pred[f], gt[f]);
  }
  const double n = static_cast<double>(gt.size());
  report.auc_j /= n;
  report.cc /= n;
  report.kl /= n;
  report.nss /= n;
  report.sim /= n;

  std::string model =
      args.model_name.empty() ? fs::path(args.pred_dir).filename().string() : args.model_name;
  std::string row = metric_report_csv_row(model, report);
  std::cout << "model,auc_j,cc,kl,nss,sim\n" << row << "\n";
  if (!args.out.empty()) {
    std::ofstream out = open_out_file(fs::path(args.out));
    out << "model,auc_j,cc,kl,nss,sim\n" << row << "\n";
  }
  return 0;
}

// ---------------------------------------------------------------------------
// ewssim

struct EwssimArgs {
  std::string original;
  std::string compressed;
  std::string weights_dir;
  std::string out;
};

int run_ewssim(const EwssimArgs& args) {
  VideoSequence original = read_y4m(fs::path(args.original));
  VideoSequence compressed = read_y4m(fs::path(args.compressed));
  std::vector<SaliencyMap> weights = load_map_dir(args.weights_dir, original.frame_count());
  std::vector<double> per_frame = ewssim_per_frame(original, compressed, weights);

  double mean = 0.0;
  for (double v : per_frame) mean += v;
  mean /= static_cast<double>(per_frame.size());

  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.6f", mean);
  std::cout << "ewssim " << buf << "\n";
  if (!args.out.empty()) {
    std::ofstream out = open_out_file(fs::path(args.out));
    out << "frame,ewssim\n";
    for (size_t f = 0; f < per_frame.size(); ++f) {
      std::snprintf(buf, sizeof(buf), "%zu,%.6f\n", f, per_frame[f]);
      out << buf;
    }
  }
  return 0;
}

// ---------------------------------------------------------------------------
// rank

struct RankArgs {
  std::string comparisons;
  std::string verify_file;
  double level = 0.85;
  int boot = 1000;
  uint64_t seed = 1;
  std::string out;
};

std::vector<VerificationQuestion> read_verification_file(const fs::path& path) {
  std::ifstream in(path);
  if (!in) fail(ErrorCode::IO_FAILURE, "cannot open " + path.string());
  std::vector<VerificationQuestion> questions;
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    VerificationQuestion q;
    std::vector<std::string> fields;
    size_t start = 0;
    while (true) {
      size_t pos = line.find('\t', start);
      if (pos == std::string::npos) {
        fields.push_back(line.substr(start));
        break;
      }
      fields.push_back(line.substr(start, pos - start));
      start = pos + 1;
    }
    if (fields.size() != 4 || fields[0].empty() || fields[1].empty() || fields[2].empty()) {
      fail(ErrorCode::BAD_ROW, "verification line " + std::to_string(line_no));
    }
    q.item_id = fields[0];
    q.method_a = fields[1];
    q.method_b = fields[2];
    if (fields[3] == "A") {
      q.required = Outcome::A_WINS;
    } else if (fields[3] == "B") {
      q.required = Outcome::B_WINS;
    } else if (fields[3] == "TIE") {
      q.required = Outcome::TIE;
    } else {
      fail(ErrorCode::BAD_ROW, "verification line " + std::to_string(line_no));
    }
    questions.push_back(std::move(q));
  }
  return questions;
}

int run_rank(const RankArgs& args) {
  std::vector<ComparisonRecord> records = read_comparisons(fs::path(args.comparisons));
  if (!args.verify_file.empty()) {
    std::vector<VerificationQuestion> questions = read_verification_file(args.verify_file);
    FilterResult filtered = filter_participants(records, questions);
    std::cerr << "filtered participants: " << filtered.dropped_failed << " failed checks, "
              << filtered.dropped_missing << " had none\n";
    records = std::move(filtered.records);
    if (records.empty()) fail(ErrorCode::EMPTY_INPUT, "no records survived filtering");
  }
  RankResult result = bootstrap_ci(records, args.level, args.boot, args.seed);
  std::string csv = rank_result_csv(result);
  std::cout << csv;
  if (!args.out.empty()) {
    std::ofstream out = open_out_file(fs::path(args.out));
    out << csv;
  }
  return 0;
}

// ---------------------------------------------------------------------------
// rd: rate-distortion sweep from a key=value config file

struct RdConfig {
  fs::path video;
  fs::path weights_dir;
  fs::path fixations;
  double sigma = 120.0;
  std::vector<std::pair<std::string, fs::path>> sources;
  double p = 80.0;
  double b = 70.0;
  std::string model = "analytic";
  std::vector<uint64_t> targets;
  fs::path out_dir;
};

RdConfig parse_rd_config(const fs::path& path) {
  std::ifstream in(path);
  if (!in) fail(ErrorCode::IO_FAILURE, "cannot open " + path.string());
  RdConfig cfg;
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty() || line[0] == '#') continue;
    size_t eq = line.find('=');
    if (eq == std::string::npos) {
      fail(ErrorCode::BAD_CONFIG, "line " + std::to_string(line_no) + ": expected key=value");
    }
    std::string key = line.substr(0, eq);
    std::string value = line.substr(eq + 1);
    if (key == "video") {
      cfg.video = value;
    } else if (key == "weights") {
      cfg.weights_dir = value;
    } else if (key == "fixations") {
      cfg.fixations = value;
    } else if (key == "sigma") {
      cfg.sigma = std::stod(value);
    } else if (key == "p") {
      cfg.p = std::stod(value);
    } else if (key == "b") {
      cfg.b = std::stod(value);
    } else if (key == "model") {
      cfg.model = value;
    } else if (key == "out") {
      cfg.out_dir = value;
    } else if (key == "seed") {
      // accepted for reproducibility bookkeeping; the sweep itself is
      // deterministic
    } else if (key == "targets") {
      size_t start = 0;
      while (start <= value.size()) {
        size_t pos = value.find(',', start);
        std::string tok =
            pos == std::string::npos ? value.substr(start) : value.substr(start, pos - start);
        if (!tok.empty()) cfg.targets.push_back(std::stoull(tok));
        if (pos == std::string::npos) break;
        start = pos + 1;
      }
    } else if (key.rfind("saliency.", 0) == 0) {
      cfg.sources.emplace_back(key.substr(9), fs::path(value));
    } else {
      fail(ErrorCode::BAD_CONFIG, "line " + std::to_string(line_no) + ": unknown key '" + key + "'");
    }
  }
  if (cfg.video.empty()) fail(ErrorCode::BAD_CONFIG, "config needs video=");
  if (cfg.targets.empty()) fail(ErrorCode::BAD_CONFIG, "config needs targets=");
  if (cfg.out_dir.empty()) fail(ErrorCode::BAD_CONFIG, "config needs out=");
  if (cfg.weights_dir.empty() && cfg.fixations.empty()) {
    fail(ErrorCode::BAD_CONFIG, "config needs weights= or fixations=");
  }
  if (!fs::exists(cfg.video)) fail(ErrorCode::IO_FAILURE, "missing video " + cfg.video.string());
  for (const auto& [name, dir] : cfg.sources) {
    if (!fs::exists(dir)) {
      fail(ErrorCode::IO_FAILURE, "missing saliency dir " + dir.string() + " for " + name);
    }
  }
  return cfg;
}

int run_rd(const std::string& config_path) {
  RdConfig cfg = parse_rd_config(config_path);
  VideoSequence video = read_y4m(cfg.video);

  std::vector<SaliencyMap> weights;
  if (!cfg.weights_dir.empty()) {
    weights = load_map_dir(cfg.weights_dir, video.frame_count());
  } else {
    FixationSet fix = read_fixations_csv(cfg.fixations);
    GaussianKernelSpec kernel{cfg.sigma};
    for (int f = 0; f < video.frame_count(); ++f) {
      weights.push_back(fixations_to_map(fix, f, video.width, video.height, kernel));
    }
  }
  require_map_dims(weights, video.width, video.height);

  BitCostModel model = make_model(cfg.model, video);

  // The uniform baseline rides the same pipeline: constant saliency makes
  // every frame degenerate, so the solver passes the base QP through.
  std::vector<std::pair<std::string, std::vector<SaliencyMap>>> sources;
  sources.emplace_back(
      "uniform", std::vector<SaliencyMap>(video.frames.size(),
                                          SaliencyMap(video.width, video.height, 1.0)));
  for (const auto& [name, dir] : cfg.sources) {
    std::vector<SaliencyMap> maps = load_map_dir(dir, video.frame_count());
    require_map_dims(maps, video.width, video.height);
    sources.emplace_back(name, std::move(maps));
  }

  fs::create_directories(cfg.out_dir);
  std::ofstream csv = open_out_file(cfg.out_dir / "rd.csv");
  auto emit = [&](const std::string& row) {
    std::cout << row << "\n";
    csv << row << "\n";
  };
  emit("source,target_bits,actual_bits,ewssim");

  char buf[256];
  for (const auto& [name, maps] : sources) {
    for (uint64_t target : cfg.targets) {
      try {
        RateSearchResult found =
            rate_search_base_qp(video, maps, target, cfg.p, cfg.b, model);
        VideoSequence decoded =
            decode_sequence(found.encoded, video.width, video.height);
        double score = ewssim(video, decoded, weights);
        std::snprintf(buf, sizeof(buf), "%s,%llu,%llu,%.6f", name.c_str(),
                      static_cast<unsigned long long>(target),
                      static_cast<unsigned long long>(found.encoded.total_bits), score);
        emit(buf);
      } catch (const Error& e) {
        if (e.code() != ErrorCode::TARGET_UNREACHABLE) throw;
        std::snprintf(buf, sizeof(buf), "%s,%llu,NA,NA", name.c_str(),
                      static_cast<unsigned long long>(target));
        emit(buf);
      }
    }
  }
  return 0;
}

// ---------------------------------------------------------------------------
// fit-pp / apply-pp: brightness-correction + center-prior blending

struct FitPpArgs {
  std::string pred_dir;
  std::string gt_dir;
  std::string cp;
  int stride = 25;
  std::string out;
};

int run_fit_pp(const FitPpArgs& args) {
  std::vector<SaliencyMap> gt_all = load_map_dir(args.gt_dir, -1);
  std::vector<SaliencyMap> pred_all = load_map_dir(args.pred_dir, static_cast<int>(gt_all.size()));
  SaliencyMap cp = read_pgm(fs::path(args.cp));

  std::vector<SaliencyMap> pred;
  std::vector<SaliencyMap> gt;
  for (size_t f = 0; f < gt_all.size(); f += static_cast<size_t>(args.stride)) {
    pred.push_back(pred_all[f]);
    gt.push_back(gt_all[f]);
  }
  PostprocessParams params = fit_postprocess(pred, gt, cp);
  write_postprocess_params({params.gamma, params.blend_w, args.cp}, fs::path(args.out));
  char buf[96];
  std::snprintf(buf, sizeof(buf), "gamma %.9g blend_w %.9g\n", params.gamma, params.blend_w);
  std::cout << buf;
  return 0;
}

struct ApplyPpArgs {
  std::string params;
  std::string in_dir;
  std::string out_dir;
  int bits = 16;
};

int run_apply_pp(const ApplyPpArgs& args) {
  PostprocessParamsFile file = read_postprocess_params(fs::path(args.params));
  PostprocessParams params;
  params.gamma = file.gamma;
  params.blend_w = file.blend_w;
  params.cp = read_pgm(fs::path(file.cp_path));

  std::vector<SaliencyMap> maps = load_map_dir(args.in_dir, -1);
  fs::create_directories(args.out_dir);
  for (size_t f = 0; f < maps.size(); ++f) {
    write_pgm(apply_postprocess(maps[f], params), frame_path(args.out_dir, static_cast<int>(f)),
              args.bits);
  }
  std::cout << "wrote " << maps.size() << " maps to " << args.out_dir << "\n";
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"saliency-aware bit allocation toolkit"};
  app.require_subcommand(1);

  GtArgs gt_args;
  CLI::App* gt = app.add_subcommand("gt", "convert fixations to ground-truth saliency maps");
  gt->add_option("--fixations", gt_args.fixations, "fixation CSV")->required()
      ->check(CLI::ExistingFile);
  gt->add_option("--width", gt_args.width)->required()->check(CLI::PositiveNumber);
  gt->add_option("--height", gt_args.height)->required()->check(CLI::PositiveNumber);
  gt->add_option("--sigma", gt_args.sigma, "Gaussian sigma in pixels (default 120)");
  gt->add_option("--out", gt_args.out_dir, "output directory")->required();
  CLI::Option* observer_opt = gt->add_option("--observer", gt_args.observer,
                                             "restrict to one observer's fixations");
  gt->add_option("--frames", gt_args.frames, "frame count (default: max fixation frame + 1)");
  gt->add_option("--bits", gt_args.bits)->check(CLI::IsMember({8, 16}));

  QpmapArgs qpmap_args;
  CLI::App* qpmap = app.add_subcommand("qpmap", "solve per-macroblock QP maps");
  qpmap->add_option("--video", qpmap_args.video)->required()->check(CLI::ExistingFile);
  qpmap->add_option("--saliency-dir", qpmap_args.saliency_dir)->required()
      ->check(CLI::ExistingDirectory);
  qpmap->add_option("--base-qp", qpmap_args.base_qp)->check(CLI::Range(0, 51));
  qpmap->add_option("--p", qpmap_args.p, "least-salient pixel percent (default 80)");
  qpmap->add_option("--b", qpmap_args.b, "bitrate percent for them (default 70)");
  qpmap->add_option("--model", qpmap_args.model)->check(CLI::IsMember({"analytic", "lut"}));
  qpmap->add_option("--out", qpmap_args.out)->required();
  qpmap->add_option("--diag", qpmap_args.diag, "diagnostics CSV (default <out>.diag.csv)");

  EncodeArgs encode_args;
  CLI::App* encode = app.add_subcommand("encode", "encode a video with a QP map file");
  encode->add_option("--video", encode_args.video)->required()->check(CLI::ExistingFile);
  encode->add_option("--qpmap", encode_args.qpmap)->required()->check(CLI::ExistingFile);
  encode->add_option("--out", encode_args.out)->required();
  encode->add_option("--regions", encode_args.regions_dir,
                     "saliency dir for a per-region bit split report")
      ->check(CLI::ExistingDirectory);
  encode->add_option("--p", encode_args.p, "percentile for --regions (default 80)");

  std::string decode_bitstream;
  std::string decode_out;
  CLI::App* decode = app.add_subcommand("decode", "decode a SALC1 container to Y4M");
  decode->add_option("--bitstream", decode_bitstream)->required()->check(CLI::ExistingFile);
  decode->add_option("--out", decode_out)->required();

  MetricsArgs metrics_args;
  CLI::App* metrics = app.add_subcommand("metrics", "objective saliency metric battery");
  metrics->add_option("--pred-dir", metrics_args.pred_dir)->required()
      ->check(CLI::ExistingDirectory);
  metrics->add_option("--gt-dir", metrics_args.gt_dir)->required()
      ->check(CLI::ExistingDirectory);
  metrics->add_option("--fixations", metrics_args.fixations)->required()
      ->check(CLI::ExistingFile);
  metrics->add_option("--model-name", metrics_args.model_name);
  metrics->add_option("--out", metrics_args.out);

  EwssimArgs ewssim_args;
  CLI::App* ewssim_cmd = app.add_subcommand("ewssim", "saliency-weighted SSIM");
  ewssim_cmd->add_option("--original", ewssim_args.original)->required()
      ->check(CLI::ExistingFile);
  ewssim_cmd->add_option("--compressed", ewssim_args.compressed)->required()
      ->check(CLI::ExistingFile);
  ewssim_cmd->add_option("--weights-dir", ewssim_args.weights_dir)->required()
      ->check(CLI::ExistingDirectory);
  ewssim_cmd->add_option("--out", ewssim_args.out, "per-frame CSV");

  RankArgs rank_args;
  CLI::App* rank = app.add_subcommand("rank", "Thurstone Case V subjective ranking");
  rank->add_option("--comparisons", rank_args.comparisons)->required()->check(CLI::ExistingFile);
  rank->add_option("--verify-file", rank_args.verify_file)->check(CLI::ExistingFile);
  rank->add_option("--level", rank_args.level, "confidence level (default 0.85)");
  rank->add_option("--boot", rank_args.boot, "bootstrap replicates (default 1000)");
  rank->add_option("--seed", rank_args.seed);
  rank->add_option("--out", rank_args.out);

  std::string rd_config;
  CLI::App* rd = app.add_subcommand("rd", "rate-distortion sweep from a config file");
  rd->add_option("--config", rd_config)->required()->check(CLI::ExistingFile);

  FitPpArgs fit_args;
  CLI::App* fit_pp = app.add_subcommand("fit-pp", "fit postprocess parameters on a training set");
  fit_pp->add_option("--pred-dir", fit_args.pred_dir)->required()->check(CLI::ExistingDirectory);
  fit_pp->add_option("--gt-dir", fit_args.gt_dir)->required()->check(CLI::ExistingDirectory);
  fit_pp->add_option("--cp", fit_args.cp, "center-prior PGM")->required()
      ->check(CLI::ExistingFile);
  fit_pp->add_option("--stride", fit_args.stride, "fit on every k-th frame (default 25)")
      ->check(CLI::PositiveNumber);
  fit_pp->add_option("--out", fit_args.out)->required();

  ApplyPpArgs apply_args;
  CLI::App* apply_pp = app.add_subcommand("apply-pp", "apply postprocess parameters to maps");
  apply_pp->add_option("--params", apply_args.params)->required()->check(CLI::ExistingFile);
  apply_pp->add_option("--in-dir", apply_args.in_dir)->required()->check(CLI::ExistingDirectory);
  apply_pp->add_option("--out-dir", apply_args.out_dir)->required();
  apply_pp->add_option("--bits", apply_args.bits)->check(CLI::IsMember({8, 16}));

  CLI11_PARSE(app, argc, argv);

  try {
    gt_args.have_observer = observer_opt->count() > 0;
    if (gt->parsed()) return run_gt(gt_args);
    if (qpmap->parsed()) return run_qpmap(qpmap_args);
    if (encode->parsed()) return run_encode(encode_args);
    if (decode->parsed()) return run_decode(decode_bitstream, decode_out);
    if (metrics->parsed()) return run_metrics(metrics_args);
    if (ewssim_cmd->parsed()) return run_ewssim(ewssim_args);
    if (rank->parsed()) return run_rank(rank_args);
    if (rd->parsed()) return run_rd(rd_config);
    if (fit_pp->parsed()) return run_fit_pp(fit_args);
    if (apply_pp->parsed()) return run_apply_pp(apply_args);
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
