#pragma once

#include <iosfwd>
#include <map>
#include <string>
#include <vector>

#include "types.hpp"

namespace stem {

// Tab-separated tag table: chrom, start, end, strand (+/-). Lines starting
// with '#' and blank lines are skipped. Extra columns are ignored.
std::vector<TagRecord> parse_tags(std::istream& in, const std::string& name);
std::vector<TagRecord> read_tags(const std::string& path);

// Keep at most one tag per (chrom, location, strand); survivor order
// preserved.
std::vector<TagRecord> dedup_tags(const std::vector<TagRecord>& tags);

struct AlignedCounts {
  CountTrack track;
  int64_t n_dropped = 0;  // tags shifted off a chromosome end
};

// Shift forward tag locations by +shift, reverse by -shift, and accumulate
// counts per location. Locations < 0 or >= chromosome length are dropped.
AlignedCounts shift_and_count(const std::vector<TagRecord>& tags, int64_t shift,
                              const std::map<std::string, int64_t>& lengths);

std::map<std::string, int64_t> read_chrom_lengths(const std::string& path);

// Track serialization: tab-separated (chrom, position, count), sorted.
void write_track(const std::string& path, const CountTrack& track);
CountTrack read_track(const std::string& path, const std::map<std::string, int64_t>& lengths = {});

}  // namespace stem
