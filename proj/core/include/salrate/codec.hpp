#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <vector>

#include "salrate/qp_solver.hpp"
#include "salrate/types.hpp"

namespace salrate {

/// Quantizer step for a QP, mirroring the H.264 law: 0.625 * 2^(qp/6).
double quantizer_step(int qp);

/// One intra-coded frame. The payload is self-contained: one QP byte per
/// macroblock (raster order) followed by the entropy-coded block data,
/// zero-padded to a byte boundary. bits_per_mb counts entropy bits only,
/// and their sum equals payload_bits exactly. The encoder keeps its own
/// reconstruction; decode_frame reproduces it bit-exactly.
struct EncodedFrame {
  std::vector<uint8_t> payload;
  uint64_t payload_bits = 0;
  std::vector<uint32_t> bits_per_mb;
  QpMap qp_map;
  std::vector<uint8_t> reconstruction;

  /// Stored size including the per-macroblock QP header bytes.
  uint64_t stored_bits() const { return payload.size() * 8ull; }
};

EncodedFrame encode_frame(const std::vector<uint8_t>& frame, int width,
                          int height, const QpMap& qp_map);
std::vector<uint8_t> decode_frame(const EncodedFrame& enc, int width, int height);
std::vector<uint8_t> decode_frame_payload(const std::vector<uint8_t>& payload,
                                          int width, int height);

struct SequenceEncodeResult {
  std::vector<EncodedFrame> frames;
  uint64_t total_bits = 0;        // stored bits, summed over frames
  uint64_t total_coded_bits = 0;  // entropy bits only
};

/// Intra-only: frames encode independently, one QP map per frame.
SequenceEncodeResult encode_sequence(const VideoSequence& video,
                                     const std::vector<QpMap>& qp_maps);
VideoSequence decode_sequence(const SequenceEncodeResult& enc, int width, int height);

/// Entropy-bit totals split by the {SN>0} region partition.
struct RegionBitTotals {
  uint64_t nonsalient_bits = 0;
  uint64_t salient_bits = 0;

  double nonsalient_share() const {
    uint64_t total = nonsalient_bits + salient_bits;
    return total == 0 ? 0.0 : static_cast<double>(nonsalient_bits) / total;
  }
};

RegionBitTotals region_bit_split(const SequenceEncodeResult& enc,
                                 const std::vector<RegionMaps>& regions);

/// Probe for calibrate_bit_cost backed by this codec.
EncoderProbe codec_probe();

struct RateSearchResult {
  int base_qp = 0;
  std::vector<QpMap> qp_maps;
  SequenceEncodeResult encoded;
};

/// Integer bisection on base_qp over the saliency-aware pipeline
/// (build_qp_maps then encode_sequence). Returns the base QP whose total
/// stored bits is the largest not exceeding target_bits, or the QP 0 result
/// when even that stays under target.
RateSearchResult rate_search_base_qp(const VideoSequence& video,
                                     const std::vector<SaliencyMap>& saliency_seq,
                                     uint64_t target_bits, double p, double b,
                                     const BitCostModel& model);

// SALC1 container: ASCII header line `SALC1 <width> <height> <frames>\n`,
// then per frame a 32-bit big-endian payload byte length followed by the
// payload bytes.
void write_container(const SequenceEncodeResult& enc, int width, int height,
                     std::ostream& out);
void write_container(const SequenceEncodeResult& enc, int width, int height,
                     const std::filesystem::path& path);

struct ContainerData {
  int width = 0;
  int height = 0;
  std::vector<std::vector<uint8_t>> payloads;
};

ContainerData read_container(std::istream& in);
ContainerData read_container(const std::filesystem::path& path);
VideoSequence decode_container(const ContainerData& data);

}  // namespace salrate
