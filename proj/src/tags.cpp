#include "tags.hpp"

#include <charconv>
#include <fstream>
#include <istream>
#include <unordered_set>

namespace stem {

namespace {

int64_t parse_int(std::string_view field, const std::string& name, int64_t lineno, const char* what) {
  int64_t v = 0;
  const auto [ptr, ec] = std::from_chars(field.data(), field.data() + field.size(), v);
  if (ec != std::errc() || ptr != field.data() + field.size())
    fail(ErrorCode::parse,
         name + ":" + std::to_string(lineno) + ": bad " + what + " '" + std::string(field) + "'");
  return v;
}

}  // namespace

std::vector<TagRecord> parse_tags(std::istream& in, const std::string& name) {
  std::vector<TagRecord> tags;
  std::string line;
  int64_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty() || line[0] == '#') continue;

    std::string_view rest(line);
    std::string_view field[4];
    for (int i = 0; i < 4; ++i) {
      const size_t tab = rest.find('\t');
      if (tab == std::string_view::npos) {
        if (i < 3)
          fail(ErrorCode::parse, name + ":" + std::to_string(lineno) + ": expected 4 tab-separated fields");
        field[i] = rest;
        rest = {};
      } else {
        field[i] = rest.substr(0, tab);
        rest = rest.substr(tab + 1);
      }
    }

    TagRecord t;
    t.chrom = std::string(field[0]);
    t.start = parse_int(field[1], name, lineno, "start coordinate");
    t.end = parse_int(field[2], name, lineno, "end coordinate");
    if (t.start >= t.end)
      fail(ErrorCode::parse, name + ":" + std::to_string(lineno) + ": start must be < end");
    if (field[3] == "+")
      t.strand = Strand::forward;
    else if (field[3] == "-")
      t.strand = Strand::reverse;
    else
      fail(ErrorCode::parse,
           name + ":" + std::to_string(lineno) + ": unknown strand '" + std::string(field[3]) + "'");
    tags.push_back(std::move(t));
  }
  return tags;
}

std::vector<TagRecord> read_tags(const std::string& path) {
  std::ifstream in(path);
  if (!in) fail(ErrorCode::io, "cannot open tag file: " + path);
  return parse_tags(in, path);
}

std::vector<TagRecord> dedup_tags(const std::vector<TagRecord>& tags) {
  std::vector<TagRecord> out;
  out.reserve(tags.size());
  std::unordered_set<std::string> seen;
  seen.reserve(tags.size() * 2);
  std::string key;
  for (const auto& t : tags) {
    key = t.chrom;
    key += t.strand == Strand::forward ? '+' : '-';
    key += std::to_string(t.location());
    if (seen.insert(key).second) out.push_back(t);
  }
  return out;
}

AlignedCounts shift_and_count(const std::vector<TagRecord>& tags, int64_t shift,
                              const std::map<std::string, int64_t>& lengths) {
  if (shift < 0) fail(ErrorCode::invalid, "shift must be nonnegative, got " + std::to_string(shift));
  AlignedCounts out;
  out.track.lengths = lengths;
  std::map<std::string, std::vector<int64_t>> locs;
  for (const auto& t : tags) {
    const int64_t loc =
        t.strand == Strand::forward ? t.location() + shift : t.location() - shift;
    const auto it = lengths.find(t.chrom);
    const int64_t len = it == lengths.end() ? kUnknownLength : it->second;
    if (loc < 0 || loc >= len) {
      ++out.n_dropped;
      continue;
    }
    locs[t.chrom].push_back(loc);
  }
  for (auto& [chrom, v] : locs) {
    std::sort(v.begin(), v.end());
    ChromCounts cc;
    for (size_t i = 0; i < v.size();) {
      size_t j = i;
      while (j < v.size() && v[j] == v[i]) ++j;
      cc.pos.push_back(v[i]);
      cc.count.push_back(static_cast<int32_t>(j - i));
      i = j;
    }
    cc.finalize();
    out.track.chroms.emplace(chrom, std::move(cc));
  }
  return out;
}

std::map<std::string, int64_t> read_chrom_lengths(const std::string& path) {
  std::ifstream in(path);
  if (!in) fail(ErrorCode::io, "cannot open chromosome lengths file: " + path);
  std::map<std::string, int64_t> lengths;
  std::string line;
  int64_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty() || line[0] == '#') continue;
    const size_t tab = line.find('\t');
    if (tab == std::string::npos)
      fail(ErrorCode::parse, path + ":" + std::to_string(lineno) + ": expected chrom<TAB>length");
    const std::string chrom = line.substr(0, tab);
    const int64_t len = parse_int(std::string_view(line).substr(tab + 1), path, lineno, "length");
    if (len <= 0) fail(ErrorCode::parse, path + ":" + std::to_string(lineno) + ": nonpositive length");
    lengths[chrom] = len;
  }
  return lengths;
}

void write_track(const std::string& path, const CountTrack& track) {
  std::ofstream out(path);
  if (!out) fail(ErrorCode::io, "cannot write track file: " + path);
  out << "#chrom\tposition\tcount\n";
  for (const auto& [chrom, cc] : track.chroms)
    for (size_t i = 0; i < cc.pos.size(); ++i)
      out << chrom << '\t' << cc.pos[i] << '\t' << cc.count[i] << '\n';
  if (!out) fail(ErrorCode::io, "error writing track file: " + path);
}

CountTrack read_track(const std::string& path, const std::map<std::string, int64_t>& lengths) {
  std::ifstream in(path);
  if (!in) fail(ErrorCode::io, "cannot open track file: " + path);
  CountTrack track;
  track.lengths = lengths;
  std::string line;
  int64_t lineno = 0;
  std::string last_chrom;
  ChromCounts* cc = nullptr;
  while (std::getline(in, line)) {
    ++lineno;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty() || line[0] == '#') continue;
    const size_t t1 = line.find('\t');
    const size_t t2 = t1 == std::string::npos ? std::string::npos : line.find('\t', t1 + 1);
    if (t2 == std::string::npos)
      fail(ErrorCode::parse, path + ":" + std::to_string(lineno) + ": expected chrom<TAB>pos<TAB>count");
    std::string chrom = line.substr(0, t1);
    const int64_t pos = parse_int(std::string_view(line).substr(t1 + 1, t2 - t1 - 1), path, lineno, "position");
    const int64_t count = parse_int(std::string_view(line).substr(t2 + 1), path, lineno, "count");
    if (count <= 0) fail(ErrorCode::parse, path + ":" + std::to_string(lineno) + ": count must be positive");
    if (pos < 0) fail(ErrorCode::parse, path + ":" + std::to_string(lineno) + ": negative position");
    if (chrom != last_chrom || cc == nullptr) {
      cc = &track.chroms[chrom];
      last_chrom = chrom;
    }
    if (!cc->pos.empty() && pos <= cc->pos.back())
      fail(ErrorCode::parse,
           path + ":" + std::to_string(lineno) + ": positions must be strictly increasing per chromosome");
    cc->pos.push_back(pos);
    cc->count.push_back(static_cast<int32_t>(count));
  }
  track.finalize();
  return track;
}

}  // namespace stem
