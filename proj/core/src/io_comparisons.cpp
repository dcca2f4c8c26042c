#include <istream>
#include <ostream>
#include <string>
#include <vector>

#include "io_util.hpp"
#include "salrate/io.hpp"

namespace salrate {

namespace {

const char* outcome_token(Outcome o) {
  switch (o) {
    case Outcome::A_WINS: return "A";
    case Outcome::B_WINS: return "B";
    case Outcome::TIE: return "TIE";
  }
  return "?";
}

bool parse_outcome(std::string_view token, Outcome& out) {
  if (token == "A") {
    out = Outcome::A_WINS;
  } else if (token == "B") {
    out = Outcome::B_WINS;
  } else if (token == "TIE") {
    out = Outcome::TIE;
  } else {
    return false;
  }
  return true;
}

}  // namespace

std::vector<ComparisonRecord> read_comparisons(std::istream& in) {
  std::vector<ComparisonRecord> records;
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    std::string_view body = detail::trim_cr(line);
    if (body.empty()) continue;

    std::vector<std::string_view> fields;
    size_t start = 0;
    while (true) {
      size_t pos = body.find('\t', start);
      if (pos == std::string_view::npos) {
        fields.push_back(body.substr(start));
        break;
      }
      fields.push_back(body.substr(start, pos - start));
      start = pos + 1;
    }

    ComparisonRecord rec;
    bool ok = fields.size() == 5 && !fields[0].empty() && !fields[1].empty() &&
              !fields[2].empty() && !fields[4].empty() && fields[1] != fields[2] &&
              parse_outcome(fields[3], rec.outcome);
    if (!ok) fail(ErrorCode::BAD_ROW, "line " + std::to_string(line_no));
    rec.item_id = std::string(fields[0]);
    rec.method_a = std::string(fields[1]);
    rec.method_b = std::string(fields[2]);
    rec.participant_id = std::string(fields[4]);
    records.push_back(std::move(rec));
  }
  if (records.empty()) fail(ErrorCode::EMPTY_FILE, "no comparison records");
  return records;
}

std::vector<ComparisonRecord> read_comparisons(const std::filesystem::path& path) {
  std::ifstream in = detail::open_input(path);
  return read_comparisons(in);
}

void write_comparisons(const std::vector<ComparisonRecord>& records, std::ostream& out) {
  for (const ComparisonRecord& rec : records) {
    out << rec.item_id << '\t' << rec.method_a << '\t' << rec.method_b << '\t'
        << outcome_token(rec.outcome) << '\t' << rec.participant_id << '\n';
  }
  if (!out) fail(ErrorCode::IO_FAILURE, "comparison log write failed");
}

void write_comparisons(const std::vector<ComparisonRecord>& records,
                       const std::filesystem::path& path) {
  std::ofstream out = detail::open_output(path);
  write_comparisons(records, out);
}

}  // namespace salrate
