#pragma once

#include <algorithm>
#include <cstdint>
#include <limits>
#include <map>
#include <stdexcept>
#include <string>
#include <vector>

namespace stem {

enum class ErrorCode { io = 1, parse = 2, invalid = 3, state = 4, numeric = 5 };

class Error : public std::runtime_error {
 public:
  Error(ErrorCode c, std::string msg) : std::runtime_error(std::move(msg)), code_(c) {}
  ErrorCode code() const { return code_; }

 private:
  ErrorCode code_;
};

[[noreturn]] inline void fail(ErrorCode c, const std::string& msg) { throw Error(c, msg); }

enum class Strand : uint8_t { forward, reverse };

// One mapped sequencing tag. Coordinates are 0-based, half-open [start, end).
struct TagRecord {
  std::string chrom;
  int64_t start = 0;
  int64_t end = 0;
  Strand strand = Strand::forward;

  // Tag location: beginning address for forward tags, the higher address
  // (end - 1) for reverse tags.
  int64_t location() const { return strand == Strand::forward ? start : end - 1; }
};

inline constexpr int64_t kUnknownLength = std::numeric_limits<int64_t>::max() / 4;

// Sorted sparse nonzero counts for one chromosome. Prefix sums give O(log n)
// window queries.
struct ChromCounts {
  std::vector<int64_t> pos;    // strictly increasing
  std::vector<int32_t> count;  // all >= 1
  std::vector<int64_t> cum;    // cum[i] = sum of count[0..i); size pos.size()+1

  void finalize() {
    cum.assign(pos.size() + 1, 0);
    for (size_t i = 0; i < pos.size(); ++i) cum[i + 1] = cum[i] + count[i];
  }

  // Sum of counts at positions in [lo, hi] (inclusive).
  int64_t window_sum(int64_t lo, int64_t hi) const {
    if (hi < lo || pos.empty()) return 0;
    const auto b = std::lower_bound(pos.begin(), pos.end(), lo) - pos.begin();
    const auto e = std::upper_bound(pos.begin(), pos.end(), hi) - pos.begin();
    return cum[e] - cum[b];
  }

  int64_t total() const { return cum.empty() ? 0 : cum.back(); }
  int64_t max_pos() const { return pos.empty() ? -1 : pos.back(); }
};

// Genome-wide sparse count track. Unlisted positions have count zero.
struct CountTrack {
  std::map<std::string, ChromCounts> chroms;
  std::map<std::string, int64_t> lengths;  // may be empty (lengths unknown)

  int64_t length_of(const std::string& chrom) const {
    auto it = lengths.find(chrom);
    return it == lengths.end() ? kUnknownLength : it->second;
  }

  int64_t total_count() const {
    int64_t t = 0;
    for (const auto& [_, c] : chroms) t += c.total();
    return t;
  }

  int64_t n_positions() const {
    int64_t t = 0;
    for (const auto& [_, c] : chroms) t += static_cast<int64_t>(c.pos.size());
    return t;
  }

  bool empty() const { return total_count() == 0; }

  void finalize() {
    for (auto& [_, c] : chroms) c.finalize();
  }
};

}  // namespace stem
