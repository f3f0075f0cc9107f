// Per-(chain, iteration) run records and their CSV serialization. Timing
// columns live in a separate file so trace files are byte-identical across
// runs regardless of machine load or thread count.
#ifndef BLOCKMC_TRACE_HPP
#define BLOCKMC_TRACE_HPP

#include <cstdint>
#include <fstream>
#include <string>
#include <vector>

namespace blockmc {

enum class TraceMove { kNone, kSplit, kMerge, kSkipped };

const char* to_string(TraceMove m);
TraceMove trace_move_from_string(const std::string& s);

struct TraceRow {
  int iteration = 0;
  int chain = 0;
  double log_q = 0;
  int num_blocks = 0;
  TraceMove move = TraceMove::kNone;
  bool accepted = false;
  double log_t_fwd = 0;
  double log_t_rev = 0;
  std::string partition;  // canonical text form, 1-based
};

struct TimingRow {
  int iteration = 0;
  int chain = 0;
  std::int64_t kernel_ns = 0;
  std::int64_t gibbs_ns = 0;
};

class TraceWriter {
 public:
  explicit TraceWriter(const std::string& path);
  void write(const TraceRow& row);

 private:
  std::ofstream out_;
};

class TimingWriter {
 public:
  explicit TimingWriter(const std::string& path);
  void write(const TimingRow& row);

 private:
  std::ofstream out_;
};

std::vector<TraceRow> read_trace(const std::string& path);
std::vector<TimingRow> read_timings(const std::string& path);

// Shortest decimal form that round-trips a double.
std::string format_double(double v);

}  // namespace blockmc

#endif
