#pragma once

#include <filesystem>
#include <iosfwd>
#include <vector>

#include "salrate/types.hpp"

namespace salrate {

// YUV4MPEG2. Reading accepts 4:2:0 and mono input and keeps luma only;
// writing always emits Cmono. Round-trips are bit-exact on the luma planes.
VideoSequence read_y4m(std::istream& in);
VideoSequence read_y4m(const std::filesystem::path& path);
void write_y4m(const VideoSequence& seq, std::ostream& out);
void write_y4m(const VideoSequence& seq, const std::filesystem::path& path);

// Binary PGM (P5), maxval 255 or 65535. Values are scaled to [0,1] on read.
// Writing max-normalizes first when any value exceeds 1, then quantizes with
// round-half-up; negative values clamp to 0.
SaliencyMap read_pgm(std::istream& in);
SaliencyMap read_pgm(const std::filesystem::path& path);
void write_pgm(const SaliencyMap& map, std::ostream& out, int bit_depth);
void write_pgm(const SaliencyMap& map, const std::filesystem::path& path, int bit_depth);

// Fixation CSV with the exact header `frame,observer,x,y`. Records are kept
// in file order; coordinate range checks against a frame size happen later
// via filter_to_bounds, since the file carries no dimensions.
FixationSet read_fixations_csv(std::istream& in);
FixationSet read_fixations_csv(const std::filesystem::path& path);
void write_fixations_csv(const FixationSet& fix, std::ostream& out);
void write_fixations_csv(const FixationSet& fix, const std::filesystem::path& path);

// QPMAP v1 text format:
//   QPMAP v1 <mb_width> <mb_height> <frames>\n
// followed per frame by mb_height lines of mb_width space-separated integers.
void write_qpmap(const std::vector<QpMap>& maps, std::ostream& out);
void write_qpmap(const std::vector<QpMap>& maps, const std::filesystem::path& path);
std::vector<QpMap> read_qpmap(std::istream& in);
std::vector<QpMap> read_qpmap(const std::filesystem::path& path);

// Tab-separated comparison log: item_id, method_a, method_b, outcome (A, B
// or TIE), participant_id. One record per line.
std::vector<ComparisonRecord> read_comparisons(std::istream& in);
std::vector<ComparisonRecord> read_comparisons(const std::filesystem::path& path);
void write_comparisons(const std::vector<ComparisonRecord>& records, std::ostream& out);
void write_comparisons(const std::vector<ComparisonRecord>& records,
                       const std::filesystem::path& path);

}  // namespace salrate
