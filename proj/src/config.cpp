#include "config.hpp"

#include <charconv>
#include <cstdio>
#include <fstream>
#include <sstream>

namespace stem {

namespace {

int64_t to_i64(const std::string& key, const std::string& v) {
  try {
    size_t used = 0;
    const double d = std::stod(v, &used);  // accepts 1e6-style integers
    if (used != v.size()) throw std::invalid_argument(v);
    const int64_t i = static_cast<int64_t>(d);
    if (static_cast<double>(i) != d) throw std::invalid_argument(v);
    return i;
  } catch (const std::exception&) {
    fail(ErrorCode::parse, "config key '" + key + "': not an integer: '" + v + "'");
  }
}

double to_f64(const std::string& key, const std::string& v) {
  try {
    size_t used = 0;
    const double d = std::stod(v, &used);
    if (used != v.size()) throw std::invalid_argument(v);
    return d;
  } catch (const std::exception&) {
    fail(ErrorCode::parse, "config key '" + key + "': not a number: '" + v + "'");
  }
}

bool to_bool(const std::string& key, const std::string& v) {
  if (v == "1" || v == "true" || v == "yes") return true;
  if (v == "0" || v == "false" || v == "no") return false;
  fail(ErrorCode::parse, "config key '" + key + "': not a boolean: '" + v + "'");
}

std::vector<double> to_list(const std::string& key, const std::string& v) {
  std::vector<double> out;
  std::stringstream ss(v);
  std::string item;
  while (std::getline(ss, item, ','))
    if (!item.empty()) out.push_back(to_f64(key, item));
  if (out.empty()) fail(ErrorCode::parse, "config key '" + key + "': empty list");
  return out;
}

std::string fmt(double v) {
  char buf[64];
  for (int prec = 6; prec <= 17; ++prec) {
    std::snprintf(buf, sizeof buf, "%.*g", prec, v);
    if (std::stod(buf) == v) break;
  }
  return buf;
}

std::string fmt(const std::vector<double>& v) {
  std::string s;
  for (size_t i = 0; i < v.size(); ++i) {
    if (i) s += ',';
    s += fmt(v[i]);
  }
  return s;
}

}  // namespace

void RunConfig::set(const std::string& key, const std::string& value) {
  if (key == "ip") ip_path = value;
  else if (key == "control") control_path = value;
  else if (key == "ip_track") ip_track_path = value;
  else if (key == "control_track") control_track_path = value;
  else if (key == "chrom_lengths") chrom_lengths_path = value;
  else if (key == "kernel") kernel_path = value;
  else if (key == "table") table_path = value;
  else if (key == "template") template_path = value;
  else if (key == "out") out_dir = value;
  else if (key == "shift") shift = to_i64(key, value);
  else if (key == "tentative_shift") tentative_shift = to_i64(key, value);
  else if (key == "prelim_sigma") prelim_sigma = to_f64(key, value);
  else if (key == "n_strong_peaks") n_strong_peaks = static_cast<int>(to_i64(key, value));
  else if (key == "profile_window") profile_window = to_i64(key, value);
  else if (key == "kernel_window") kernel_window = to_i64(key, value);
  else if (key == "spline_knot_spacing") spline_knot_spacing = to_f64(key, value);
  else if (key == "shape_chrom") shape_chrom = value;
  else if (key == "window_small") window_small = to_i64(key, value);
  else if (key == "window_large") window_large = to_i64(key, value);
  else if (key == "genome_length") genome_length = to_f64(key, value);
  else if (key == "lambda_grid_size") lambda_grid_size = static_cast<int>(to_i64(key, value));
  else if (key == "u_grid_size") u_grid_size = static_cast<int>(to_i64(key, value));
  else if (key == "table_margin") table_margin = to_f64(key, value);
  else if (key == "sim_min_length") sim_min_length = to_i64(key, value);
  else if (key == "sim_min_nonzero") sim_min_nonzero = to_i64(key, value);
  else if (key == "table_lambda_min") table_lambda_min = to_f64(key, value);
  else if (key == "table_lambda_max") table_lambda_max = to_f64(key, value);
  else if (key == "q") q = to_f64(key, value);
  else if (key == "g0_sim_length") g0_sim_length = to_i64(key, value);
  else if (key == "p_grid_size") p_grid_size = static_cast<int>(to_i64(key, value));
  else if (key == "empirical_null") empirical_null = to_bool(key, value);
  else if (key == "sim_length") sim_length = to_i64(key, value);
  else if (key == "sim_spikes") sim_spikes = static_cast<int>(to_i64(key, value));
  else if (key == "sim_snr") sim_snr = to_list(key, value);
  else if (key == "sim_replicates") sim_replicates = static_cast<int>(to_i64(key, value));
  else if (key == "sim_q") sim_q = to_f64(key, value);
  else if (key == "sim_control_to_ip") sim_control_to_ip = to_f64(key, value);
  else if (key == "sim_a1") sim_a1 = to_f64(key, value);
  else if (key == "sim_a2") sim_a2 = to_f64(key, value);
  else if (key == "template_block") template_block = to_i64(key, value);
  else if (key == "template_base_rate") template_base_rate = to_f64(key, value);
  else if (key == "template_median") template_median = to_f64(key, value);
  else if (key == "template_sigma") template_sigma = to_f64(key, value);
  else if (key == "seed") seed = static_cast<uint64_t>(to_i64(key, value));
  else if (key == "threads") threads = static_cast<int>(to_i64(key, value));
  else if (key == "dump_candidates") dump_candidates = to_bool(key, value);
  else if (key == "dump_bins") dump_bins = to_bool(key, value);
  else if (key == "dump_tracks") dump_tracks = to_bool(key, value);
  else fail(ErrorCode::invalid, "unknown config key: '" + key + "'");
}

std::string RunConfig::get(const std::string& key) const {
  if (key == "ip") return ip_path;
  if (key == "control") return control_path;
  if (key == "ip_track") return ip_track_path;
  if (key == "control_track") return control_track_path;
  if (key == "chrom_lengths") return chrom_lengths_path;
  if (key == "kernel") return kernel_path;
  if (key == "table") return table_path;
  if (key == "template") return template_path;
  if (key == "out") return out_dir;
  if (key == "shift") return std::to_string(shift);
  if (key == "tentative_shift") return std::to_string(tentative_shift);
  if (key == "prelim_sigma") return fmt(prelim_sigma);
  if (key == "n_strong_peaks") return std::to_string(n_strong_peaks);
  if (key == "profile_window") return std::to_string(profile_window);
  if (key == "kernel_window") return std::to_string(kernel_window);
  if (key == "spline_knot_spacing") return fmt(spline_knot_spacing);
  if (key == "shape_chrom") return shape_chrom;
  if (key == "window_small") return std::to_string(window_small);
  if (key == "window_large") return std::to_string(window_large);
  if (key == "genome_length") return fmt(genome_length);
  if (key == "lambda_grid_size") return std::to_string(lambda_grid_size);
  if (key == "u_grid_size") return std::to_string(u_grid_size);
  if (key == "table_margin") return fmt(table_margin);
  if (key == "sim_min_length") return std::to_string(sim_min_length);
  if (key == "sim_min_nonzero") return std::to_string(sim_min_nonzero);
  if (key == "table_lambda_min") return fmt(table_lambda_min);
  if (key == "table_lambda_max") return fmt(table_lambda_max);
  if (key == "q") return fmt(q);
  if (key == "g0_sim_length") return std::to_string(g0_sim_length);
  if (key == "p_grid_size") return std::to_string(p_grid_size);
  if (key == "empirical_null") return empirical_null ? "1" : "0";
  if (key == "sim_length") return std::to_string(sim_length);
  if (key == "sim_spikes") return std::to_string(sim_spikes);
  if (key == "sim_snr") return fmt(sim_snr);
  if (key == "sim_replicates") return std::to_string(sim_replicates);
  if (key == "sim_q") return fmt(sim_q);
  if (key == "sim_control_to_ip") return fmt(sim_control_to_ip);
  if (key == "sim_a1") return fmt(sim_a1);
  if (key == "sim_a2") return fmt(sim_a2);
  if (key == "template_block") return std::to_string(template_block);
  if (key == "template_base_rate") return fmt(template_base_rate);
  if (key == "template_median") return fmt(template_median);
  if (key == "template_sigma") return fmt(template_sigma);
  if (key == "seed") return std::to_string(seed);
  if (key == "threads") return std::to_string(threads);
  if (key == "dump_candidates") return dump_candidates ? "1" : "0";
  if (key == "dump_bins") return dump_bins ? "1" : "0";
  if (key == "dump_tracks") return dump_tracks ? "1" : "0";
  fail(ErrorCode::invalid, "unknown config key: '" + key + "'");
}

void RunConfig::load_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) fail(ErrorCode::io, "cannot open config file: " + path);
  std::string line;
  int64_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty() || line[0] == '#') continue;
    const size_t eq = line.find('=');
    if (eq == std::string::npos)
      fail(ErrorCode::parse, path + ":" + std::to_string(lineno) + ": expected key=value");
    try {
      set(line.substr(0, eq), line.substr(eq + 1));
    } catch (const Error& e) {
      fail(e.code(), path + ":" + std::to_string(lineno) + ": " + e.what());
    }
  }
}

}  // namespace stem
