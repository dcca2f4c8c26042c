#include "salrate/codec.hpp"

#include <algorithm>
#include <array>
#include <bit>
#include <cmath>
#include <istream>
#include <numbers>
#include <ostream>
#include <sstream>
#include <vector>

#include "io_util.hpp"
#include "salrate/error.hpp"
#include "salrate/parallel.hpp"

namespace salrate {

namespace {

constexpr int kSub = 8;  // transform block size; a macroblock holds four

constexpr std::array<uint8_t, 64> kZigzag = {
    0,  1,  8,  16, 9,  2,  3,  10, 17, 24, 32, 25, 18, 11, 4,  5,
    12, 19, 26, 33, 40, 48, 41, 34, 27, 20, 13, 6,  7,  14, 21, 28,
    35, 42, 49, 56, 57, 50, 43, 36, 29, 22, 15, 23, 30, 37, 44, 51,
    58, 59, 52, 45, 38, 31, 39, 46, 53, 60, 61, 54, 47, 55, 62, 63};

// Orthonormal DCT-II basis: C[u][x] = k(u) * cos((2x+1)*u*pi/16).
struct DctBasis {
  double c[kSub][kSub];
};

const DctBasis& dct_basis() {
  static const DctBasis basis = [] {
    DctBasis b;
    for (int u = 0; u < kSub; ++u) {
      const double k = u == 0 ? std::sqrt(1.0 / kSub) : std::sqrt(2.0 / kSub);
      for (int x = 0; x < kSub; ++x) {
        b.c[u][x] = k * std::cos((2 * x + 1) * u * std::numbers::pi / (2 * kSub));
      }
    }
    return b;
  }();
  return basis;
}

void forward_dct(const double in[64], double out[64]) {
  const DctBasis& b = dct_basis();
  double tmp[64];
  for (int y = 0; y < kSub; ++y) {
    for (int u = 0; u < kSub; ++u) {
      double acc = 0.0;
      for (int x = 0; x < kSub; ++x) acc += b.c[u][x] * in[y * kSub + x];
      tmp[y * kSub + u] = acc;
    }
  }
  for (int v = 0; v < kSub; ++v) {
    for (int u = 0; u < kSub; ++u) {
      double acc = 0.0;
      for (int y = 0; y < kSub; ++y) acc += b.c[v][y] * tmp[y * kSub + u];
      out[v * kSub + u] = acc;
    }
  }
}

void inverse_dct(const double in[64], double out[64]) {
  const DctBasis& b = dct_basis();
  double tmp[64];
  for (int v = 0; v < kSub; ++v) {
    for (int x = 0; x < kSub; ++x) {
      double acc = 0.0;
      for (int u = 0; u < kSub; ++u) acc += b.c[u][x] * in[v * kSub + u];
      tmp[v * kSub + x] = acc;
    }
  }
  for (int y = 0; y < kSub; ++y) {
    for (int x = 0; x < kSub; ++x) {
      double acc = 0.0;
      for (int v = 0; v < kSub; ++v) acc += b.c[v][y] * tmp[v * kSub + x];
      out[y * kSub + x] = acc;
    }
  }
}

class BitWriter {
 public:
  explicit BitWriter(std::vector<uint8_t>& bytes) : bytes_(bytes) {}

  void put_bit(int bit) {
    cur_ = static_cast<uint8_t>((cur_ << 1) | (bit & 1));
    if (++cur_bits_ == 8) {
      bytes_.push_back(cur_);
      cur_ = 0;
      cur_bits_ = 0;
    }
    ++bit_count_;
  }

  void put_bits(uint64_t value, int n) {
    for (int i = n - 1; i >= 0; --i) put_bit(static_cast<int>((value >> i) & 1));
  }

  // Unsigned exp-Golomb: v+1 in binary preceded by bit_width-1 zeros.
  void put_ue(uint64_t v) {
    const uint64_t coded = v + 1;
    const int width = std::bit_width(coded);
    for (int i = 0; i < width - 1; ++i) put_bit(0);
    put_bits(coded, width);
  }

  // Signed exp-Golomb: positive v maps to 2v-1, non-positive to -2v.
  void put_se(int64_t v) {
    put_ue(v > 0 ? static_cast<uint64_t>(2 * v - 1) : static_cast<uint64_t>(-2 * v));
  }

  uint64_t bit_count() const { return bit_count_; }

  void flush() {
    while (cur_bits_ != 0) {
      cur_ = static_cast<uint8_t>(cur_ << 1);
      if (++cur_bits_ == 8) {
        bytes_.push_back(cur_);
        cur_ = 0;
        cur_bits_ = 0;
      }
    }
  }

 private:
  std::vector<uint8_t>& bytes_;
  uint64_t bit_count_ = 0;
  uint8_t cur_ = 0;
  int cur_bits_ = 0;
};

class BitReader {
 public:
  BitReader(const uint8_t* data, size_t size_bytes)
      : data_(data), size_bits_(size_bytes * 8) {}

  int get_bit() {
    if (pos_ >= size_bits_) {
      fail(ErrorCode::CORRUPT_BITSTREAM,
           "bitstream exhausted at bit " + std::to_string(pos_));
    }
    const int bit = (data_[pos_ >> 3] >> (7 - (pos_ & 7))) & 1;
    ++pos_;
    return bit;
  }

  uint64_t get_ue() {
    int zeros = 0;
    while (get_bit() == 0) {
      if (++zeros > 48) {
        fail(ErrorCode::CORRUPT_BITSTREAM,
             "oversized exp-Golomb code at bit " + std::to_string(pos_));
      }
    }
    uint64_t value = 1;
    for (int i = 0; i < zeros; ++i) value = (value << 1) | static_cast<uint64_t>(get_bit());
    return value - 1;
  }

  int64_t get_se() {
    const uint64_t v = get_ue();
    return (v & 1) ? static_cast<int64_t>((v + 1) / 2) : -static_cast<int64_t>(v / 2);
  }

  uint64_t bit_pos() const { return pos_; }
  uint64_t bits_remaining() const { return size_bits_ - pos_; }

 private:
  const uint8_t* data_;
  uint64_t size_bits_;
  uint64_t pos_ = 0;
};

// 16x16 source padded to whole macroblocks by edge replication.
std::vector<uint8_t> pad_plane(const std::vector<uint8_t>& frame, int width,
                               int height, int padded_w, int padded_h) {
  std::vector<uint8_t> padded(static_cast<size_t>(padded_w) * padded_h);
  for (int y = 0; y < padded_h; ++y) {
    const int sy = std::min(y, height - 1);
    const uint8_t* src = &frame[static_cast<size_t>(sy) * width];
    uint8_t* dst = &padded[static_cast<size_t>(y) * padded_w];
    std::copy(src, src + width, dst);
    std::fill(dst + width, dst + padded_w, src[width - 1]);
  }
  return padded;
}

double left_neighbor_mean(const std::vector<uint8_t>& recon, int padded_w, int mx, int my) {
  if (mx == 0) return 128.0;
  long sum = 0;
  const int x0 = (mx - 1) * kMacroblockSize;
  const int y0 = my * kMacroblockSize;
  for (int y = 0; y < kMacroblockSize; ++y) {
    const uint8_t* row = &recon[static_cast<size_t>(y0 + y) * padded_w + x0];
    for (int x = 0; x < kMacroblockSize; ++x) sum += row[x];
  }
  return static_cast<double>(sum) / (kMacroblockSize * kMacroblockSize);
}

uint8_t clip_sample(double v) {
  const long r = std::lround(v);
  return static_cast<uint8_t>(std::clamp(r, 0L, 255L));
}

void check_frame_args(size_t frame_size, int width, int height) {
  if (width <= 0 || height <= 0) {
    fail(ErrorCode::DIMENSION_MISMATCH, "frame dimensions must be positive");
  }
  if (frame_size != static_cast<size_t>(width) * height) {
    fail(ErrorCode::DIMENSION_MISMATCH, "frame size does not match dimensions");
  }
}

}  // namespace

double quantizer_step(int qp) {
  if (qp < kMinQp || qp > kMaxQp) {
    fail(ErrorCode::OUT_OF_RANGE, "qp " + std::to_string(qp) + " outside [0, 51]");
  }
  return 0.625 * std::exp2(qp / 6.0);
}

EncodedFrame encode_frame(const std::vector<uint8_t>& frame, int width, int height,
                          const QpMap& qp_map) {
  check_frame_args(frame.size(), width, height);
  const int mbw = mb_count_for(width);
  const int mbh = mb_count_for(height);
  if (qp_map.mb_width != mbw || qp_map.mb_height != mbh) {
    fail(ErrorCode::DIMENSION_MISMATCH, "QP map does not match the frame's macroblock grid");
  }

  const int padded_w = mbw * kMacroblockSize;
  const int padded_h = mbh * kMacroblockSize;
  const std::vector<uint8_t> src = pad_plane(frame, width, height, padded_w, padded_h);
  std::vector<uint8_t> recon(src.size());

  EncodedFrame enc;
  enc.qp_map = qp_map;
  enc.bits_per_mb.resize(static_cast<size_t>(mbw) * mbh);
  enc.payload.reserve(enc.bits_per_mb.size() + frame.size() / 4);
  for (int qp : qp_map.qp) {
    if (qp < kMinQp || qp > kMaxQp) {
      fail(ErrorCode::OUT_OF_RANGE, "qp " + std::to_string(qp) + " outside [0, 51]");
    }
    enc.payload.push_back(static_cast<uint8_t>(qp));
  }

  BitWriter writer(enc.payload);
  double block_in[64];
  double coef[64];
  double rec[64];
  int levels[64];

  for (int my = 0; my < mbh; ++my) {
    for (int mx = 0; mx < mbw; ++mx) {
      const double step = quantizer_step(qp_map.at(mx, my));
      const double dc_pred = left_neighbor_mean(recon, padded_w, mx, my);
      const uint64_t bits_before = writer.bit_count();

      for (int sub = 0; sub < 4; ++sub) {
        const int bx = mx * kMacroblockSize + (sub & 1) * kSub;
        const int by = my * kMacroblockSize + (sub >> 1) * kSub;
        for (int y = 0; y < kSub; ++y) {
          const uint8_t* row = &src[static_cast<size_t>(by + y) * padded_w + bx];
          for (int x = 0; x < kSub; ++x) block_in[y * kSub + x] = row[x] - dc_pred;
        }
        forward_dct(block_in, coef);
        for (int i = 0; i < 64; ++i) {
          levels[i] = static_cast<int>(std::llround(coef[i] / step));
        }

        // (run, level) pairs in zig-zag order: ue(run+1) then se(level);
        // ue(0) closes the block.
        int run = 0;
        for (int i = 0; i < 64; ++i) {
          const int level = levels[kZigzag[static_cast<size_t>(i)]];
          if (level == 0) {
            ++run;
            continue;
          }
          writer.put_ue(static_cast<uint64_t>(run) + 1);
          writer.put_se(level);
          run = 0;
        }
        writer.put_ue(0);

        for (int i = 0; i < 64; ++i) coef[i] = levels[i] * step;
        inverse_dct(coef, rec);
        for (int y = 0; y < kSub; ++y) {
          uint8_t* row = &recon[static_cast<size_t>(by + y) * padded_w + bx];
          for (int x = 0; x < kSub; ++x) row[x] = clip_sample(rec[y * kSub + x] + dc_pred);
        }
      }
      enc.bits_per_mb[static_cast<size_t>(my) * mbw + mx] =
          static_cast<uint32_t>(writer.bit_count() - bits_before);
    }
  }
  enc.payload_bits = writer.bit_count();
  writer.flush();

  enc.reconstruction.resize(frame.size());
  for (int y = 0; y < height; ++y) {
    const uint8_t* srow = &recon[static_cast<size_t>(y) * padded_w];
    std::copy(srow, srow + width, &enc.reconstruction[static_cast<size_t>(y) * width]);
  }
  return enc;
}

std::vector<uint8_t> decode_frame_payload(const std::vector<uint8_t>& payload,
                                          int width, int height) {
  if (width <= 0 || height <= 0) {
    fail(ErrorCode::DIMENSION_MISMATCH, "frame dimensions must be positive");
  }
  const int mbw = mb_count_for(width);
  const int mbh = mb_count_for(height);
  const size_t mb_count = static_cast<size_t>(mbw) * mbh;
  if (payload.size() < mb_count) {
    fail(ErrorCode::CORRUPT_BITSTREAM, "payload shorter than its QP header");
  }
  for (size_t i = 0; i < mb_count; ++i) {
    if (payload[i] > kMaxQp) {
      fail(ErrorCode::CORRUPT_BITSTREAM, "QP byte " + std::to_string(payload[i]) +
                                             " at block " + std::to_string(i));
    }
  }

  const int padded_w = mbw * kMacroblockSize;
  const int padded_h = mbh * kMacroblockSize;
  std::vector<uint8_t> recon(static_cast<size_t>(padded_w) * padded_h);
  BitReader reader(payload.data() + mb_count, payload.size() - mb_count);

  double coef[64];
  double rec[64];

  for (int my = 0; my < mbh; ++my) {
    for (int mx = 0; mx < mbw; ++mx) {
      const double step =
          quantizer_step(payload[static_cast<size_t>(my) * mbw + mx]);
      const double dc_pred = left_neighbor_mean(recon, padded_w, mx, my);

      for (int sub = 0; sub < 4; ++sub) {
        const int bx = mx * kMacroblockSize + (sub & 1) * kSub;
        const int by = my * kMacroblockSize + (sub >> 1) * kSub;

        std::fill(std::begin(coef), std::end(coef), 0.0);
        int pos = 0;
        while (true) {
          const uint64_t marker = reader.get_ue();
          if (marker == 0) break;  // end of block
          pos += static_cast<int>(marker) - 1;
          if (pos >= 64) {
            fail(ErrorCode::CORRUPT_BITSTREAM,
                 "coefficient run past block end at bit " + std::to_string(reader.bit_pos()));
          }
          const int64_t level = reader.get_se();
          if (level == 0) {
            fail(ErrorCode::CORRUPT_BITSTREAM,
                 "zero level at bit " + std::to_string(reader.bit_pos()));
          }
          coef[kZigzag[static_cast<size_t>(pos)]] = static_cast<double>(level) * step;
          ++pos;
        }

        inverse_dct(coef, rec);
        for (int y = 0; y < kSub; ++y) {
          uint8_t* row = &recon[static_cast<size_t>(by + y) * padded_w + bx];
          for (int x = 0; x < kSub; ++x) row[x] = clip_sample(rec[y * kSub + x] + dc_pred);
        }
      }
    }
  }

  if (reader.bits_remaining() >= 8) {
    fail(ErrorCode::CORRUPT_BITSTREAM,
         "excess payload after last block at bit " + std::to_string(reader.bit_pos()));
  }
  while (reader.bits_remaining() > 0) {
    if (reader.get_bit() != 0) {
      fail(ErrorCode::CORRUPT_BITSTREAM,
           "nonzero padding at bit " + std::to_string(reader.bit_pos() - 1));
    }
  }

  std::vector<uint8_t> frame(static_cast<size_t>(width) * height);
  for (int y = 0; y < height; ++y) {
    const uint8_t* srow = &recon[static_cast<size_t>(y) * padded_w];
    std::copy(srow, srow + width, &frame[static_cast<size_t>(y) * width]);
  }
  return frame;
}

std::vector<uint8_t> decode_frame(const EncodedFrame& enc, int width, int height) {
  return decode_frame_payload(enc.payload, width, height);
}

SequenceEncodeResult encode_sequence(const VideoSequence& video,
                                     const std::vector<QpMap>& qp_maps) {
  if (qp_maps.size() != video.frames.size()) {
    fail(ErrorCode::DIMENSION_MISMATCH, "one QP map per frame required");
  }
  SequenceEncodeResult result;
  result.frames.resize(video.frames.size());
  parallel_for(static_cast<int64_t>(video.frames.size()), [&](int64_t f) {
    result.frames[static_cast<size_t>(f)] =
        encode_frame(video.frames[static_cast<size_t>(f)], video.width, video.height,
                     qp_maps[static_cast<size_t>(f)]);
  });
  for (const EncodedFrame& frame : result.frames) {
    result.total_bits += frame.stored_bits();
    result.total_coded_bits += frame.payload_bits;
  }
  return result;
}

VideoSequence decode_sequence(const SequenceEncodeResult& enc, int width, int height) {
  VideoSequence video;
  video.width = width;
  video.height = height;
  video.frames.resize(enc.frames.size());
  parallel_for(static_cast<int64_t>(enc.frames.size()), [&](int64_t f) {
    video.frames[static_cast<size_t>(f)] =
        decode_frame(enc.frames[static_cast<size_t>(f)], width, height);
  });
  return video;
}

RegionBitTotals region_bit_split(const SequenceEncodeResult& enc,
                                 const std::vector<RegionMaps>& regions) {
  if (enc.frames.size() != regions.size()) {
    fail(ErrorCode::DIMENSION_MISMATCH, "one region map per frame required");
  }
  RegionBitTotals totals;
  for (size_t f = 0; f < enc.frames.size(); ++f) {
    const EncodedFrame& frame = enc.frames[f];
    const RegionMaps& region = regions[f];
    if (frame.qp_map.mb_width != region.mb_width ||
        frame.qp_map.mb_height != region.mb_height) {
      fail(ErrorCode::DIMENSION_MISMATCH, "region grid does not match frame grid");
    }
    for (size_t i = 0; i < frame.bits_per_mb.size(); ++i) {
      if (region.nonsalient(i)) {
        totals.nonsalient_bits += frame.bits_per_mb[i];
      } else {
        totals.salient_bits += frame.bits_per_mb[i];
      }
    }
  }
  return totals;
}

EncoderProbe codec_probe() {
  return [](const std::vector<uint8_t>& frame, int width, int height, int qp) {
    const EncodedFrame enc = encode_frame(frame, width, height, uniform_qp_map(width, height, qp));
    uint64_t total = 0;
    for (uint32_t bits : enc.bits_per_mb) total += bits;
    return static_cast<double>(total) / static_cast<double>(enc.bits_per_mb.size());
  };
}

RateSearchResult rate_search_base_qp(const VideoSequence& video,
                                     const std::vector<SaliencyMap>& saliency_seq,
                                     uint64_t target_bits, double p, double b,
                                     const BitCostModel& model) {
  if (video.frame_count() == 0) fail(ErrorCode::EMPTY_INPUT, "empty video");

  auto encode_at = [&](int base_qp) {
    RateSearchResult candidate;
    candidate.base_qp = base_qp;
    candidate.qp_maps =
        build_qp_maps(video.width, video.height, saliency_seq, base_qp, p, b, model);
    candidate.encoded = encode_sequence(video, candidate.qp_maps);
    return candidate;
  };

  RateSearchResult floor_result = encode_at(kMaxQp);
  if (floor_result.encoded.total_bits > target_bits) {
    fail(ErrorCode::TARGET_UNREACHABLE,
         "target " + std::to_string(target_bits) + " bits below the QP 51 floor of " +
             std::to_string(floor_result.encoded.total_bits));
  }
  RateSearchResult ceiling_result = encode_at(kMinQp);
  if (ceiling_result.encoded.total_bits <= target_bits) return ceiling_result;

  // Invariant: bits(lo) > target >= bits(hi).
  int lo = kMinQp;
  int hi = kMaxQp;
  RateSearchResult best = std::move(floor_result);
  while (hi - lo > 1) {
    const int mid = (lo + hi) / 2;
    RateSearchResult candidate = encode_at(mid);
    if (candidate.encoded.total_bits <= target_bits) {
      hi = mid;
      best = std::move(candidate);
    } else {
      lo = mid;
    }
  }
  return best;
}

void write_container(const SequenceEncodeResult& enc, int width, int height,
                     std::ostream& out) {
  if (width <= 0 || height <= 0) {
    fail(ErrorCode::DIMENSION_MISMATCH, "container dimensions must be positive");
  }
  out << "SALC1 " << width << " " << height << " " << enc.frames.size() << "\n";
  for (const EncodedFrame& frame : enc.frames) {
    const uint32_t len = static_cast<uint32_t>(frame.payload.size());
    const uint8_t be[4] = {static_cast<uint8_t>(len >> 24), static_cast<uint8_t>(len >> 16),
                           static_cast<uint8_t>(len >> 8), static_cast<uint8_t>(len)};
    out.write(reinterpret_cast<const char*>(be), 4);
    out.write(reinterpret_cast<const char*>(frame.payload.data()),
              static_cast<std::streamsize>(frame.payload.size()));
  }
  if (!out) fail(ErrorCode::IO_FAILURE, "container write failed");
}

void write_container(const SequenceEncodeResult& enc, int width, int height,
                     const std::filesystem::path& path) {
  std::ofstream out = detail::open_output(path);
  write_container(enc, width, height, out);
}

ContainerData read_container(std::istream& in) {
  std::string line;
  if (!std::getline(in, line)) fail(ErrorCode::MALFORMED_HEADER, "missing SALC1 header");
  std::istringstream header(std::string(detail::trim_cr(line)));
  std::string magic;
  long width = 0;
  long height = 0;
  long frames = 0;
  header >> magic >> width >> height >> frames;
  if (header.fail() || magic != "SALC1") {
    fail(ErrorCode::MALFORMED_HEADER, "not a SALC1 container");
  }
  if (width <= 0 || height <= 0 || frames < 0 || width > detail::kMaxDim ||
      height > detail::kMaxDim || width * height > detail::kMaxPixels ||
      frames > detail::kMaxFrames) {
    fail(ErrorCode::MALFORMED_HEADER, "implausible container dimensions");
  }

  ContainerData data;
  data.width = static_cast<int>(width);
  data.height = static_cast<int>(height);
  data.payloads.reserve(static_cast<size_t>(frames));
  for (long f = 0; f < frames; ++f) {
    uint8_t be[4];
    in.read(reinterpret_cast<char*>(be), 4);
    if (in.gcount() != 4) {
      fail(ErrorCode::CORRUPT_BITSTREAM, "frame " + std::to_string(f) + ": missing length");
    }
    const uint32_t len = (static_cast<uint32_t>(be[0]) << 24) |
                         (static_cast<uint32_t>(be[1]) << 16) |
                         (static_cast<uint32_t>(be[2]) << 8) | be[3];
    if (len > (1u << 30)) {
      fail(ErrorCode::CORRUPT_BITSTREAM, "frame " + std::to_string(f) + ": implausible length");
    }
    std::vector<uint8_t> payload(len);
    in.read(reinterpret_cast<char*>(payload.data()), static_cast<std::streamsize>(len));
    if (static_cast<size_t>(in.gcount()) != len) {
      fail(ErrorCode::CORRUPT_BITSTREAM, "frame " + std::to_string(f) + ": payload short");
    }
    data.payloads.push_back(std::move(payload));
  }
  return data;
}

ContainerData read_container(const std::filesystem::path& path) {
  std::ifstream in = detail::open_input(path);
  return read_container(in);
}

VideoSequence decode_container(const ContainerData& data) {
  VideoSequence video;
  video.width = data.width;
  video.height = data.height;
  video.frames.resize(data.payloads.size());
  parallel_for(static_cast<int64_t>(data.payloads.size()), [&](int64_t f) {
    video.frames[static_cast<size_t>(f)] =
        decode_frame_payload(data.payloads[static_cast<size_t>(f)], data.width, data.height);
  });
  return video;
}

}  // namespace salrate
