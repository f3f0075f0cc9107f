#include "blockmc/trace.hpp"

#include <charconv>
#include <cstdio>
#include <sstream>
#include <stdexcept>

#include "blockmc/errors.hpp"

namespace blockmc {

const char* to_string(TraceMove m) {
  switch (m) {
    case TraceMove::kNone: return "none";
    case TraceMove::kSplit: return "split";
    case TraceMove::kMerge: return "merge";
    case TraceMove::kSkipped: return "skipped";
  }
  return "?";
}

TraceMove trace_move_from_string(const std::string& s) {
  for (TraceMove m : {TraceMove::kNone, TraceMove::kSplit, TraceMove::kMerge,
                      TraceMove::kSkipped}) {
    if (s == to_string(m)) return m;
  }
  throw DataError("unknown move kind in trace: " + s);
}

std::string format_double(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

TraceWriter::TraceWriter(const std::string& path) : out_(path) {
  if (!out_) throw DataError("cannot open trace file for writing: " + path);
  out_ << "iteration,chain,log_q,num_blocks,move,accepted,log_t_fwd,log_t_rev,partition\n";
}

void TraceWriter::write(const TraceRow& r) {
  out_ << r.iteration << ',' << r.chain << ',' << format_double(r.log_q) << ','
       << r.num_blocks << ',' << to_string(r.move) << ',' << (r.accepted ? 1 : 0)
       << ',' << format_double(r.log_t_fwd) << ',' << format_double(r.log_t_rev)
       << ',' << r.partition << '\n';
}

TimingWriter::TimingWriter(const std::string& path) : out_(path) {
  if (!out_) throw DataError("cannot open timing file for writing: " + path);
  out_ << "iteration,chain,kernel_ns,gibbs_ns\n";
}

void TimingWriter::write(const TimingRow& r) {
  out_ << r.iteration << ',' << r.chain << ',' << r.kernel_ns << ',' << r.gibbs_ns
       << '\n';
}

namespace {

// Splits into at most max_fields columns; the final column keeps any further
// commas (the partition text uses them).
std::vector<std::string> split_csv_line(const std::string& line, size_t max_fields) {
  std::vector<std::string> out;
  std::string cur;
  for (char c : line) {
    if (c == ',' && out.size() + 1 < max_fields) {
      out.push_back(std::move(cur));
      cur.clear();
    } else if (c != '\r') {
      cur += c;
    }
  }
  out.push_back(std::move(cur));
  return out;
}

double parse_double(const std::string& s) {
  try {
    size_t pos = 0;
    double v = std::stod(s, &pos);
    if (pos != s.size()) throw DataError("bad number in trace: " + s);
    return v;
  } catch (const std::logic_error&) {
    throw DataError("bad number in trace: " + s);
  }
}

int parse_int(const std::string& s) {
  int v = 0;
  auto [p, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || p != s.data() + s.size()) {
    throw DataError("bad integer in trace: " + s);
  }
  return v;
}

}  // namespace

std::vector<TraceRow> read_trace(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot open trace file: " + path);
  std::string line;
  if (!std::getline(in, line)) throw DataError("empty trace file: " + path);
  std::vector<TraceRow> rows;
  while (std::getline(in, line)) {
    if (line.empty() || line[0] == '#') continue;
    auto f = split_csv_line(line, 9);
    if (f.size() != 9) throw DataError("malformed trace row in " + path);
    TraceRow r;
    r.iteration = parse_int(f[0]);
    r.chain = parse_int(f[1]);
    r.log_q = parse_double(f[2]);
    r.num_blocks = parse_int(f[3]);
    r.move = trace_move_from_string(f[4]);
    r.accepted = parse_int(f[5]) != 0;
    r.log_t_fwd = parse_double(f[6]);
    r.log_t_rev = parse_double(f[7]);
    r.partition = f[8];
    rows.push_back(std::move(r));
  }
  return rows;
}

std::vector<TimingRow> read_timings(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot open timing file: " + path);
  std::string line;
  if (!std::getline(in, line)) throw DataError("empty timing file: " + path);
  std::vector<TimingRow> rows;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    auto f = split_csv_line(line, 4);
    if (f.size() != 4) throw DataError("malformed timing row in " + path);
    TimingRow r;
    r.iteration = parse_int(f[0]);
    r.chain = parse_int(f[1]);
    r.kernel_ns = std::stoll(f[2]);
    r.gibbs_ns = std::stoll(f[3]);
    rows.push_back(r);
  }
  return rows;
}

}  // namespace blockmc
