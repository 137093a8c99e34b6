// SPDX-License-Identifier: Apache-2.0
//
// Locale-independent CSV and manifest emission. Floats go through
// std::to_chars at 17 significant digits so reruns of the same manifest are
// byte-identical on any machine.
#pragma once

#include <charconv>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "mrrlink/config.hpp"
#include "mrrlink/version.hpp"

namespace mrrlink {

inline std::string format_double(double v) {
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof(buf), v,
                                 std::chars_format::general, 17);
  return std::string(buf, res.ptr);
}

inline std::string format_u64(std::uint64_t v) {
  char buf[32];
  const auto res = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, res.ptr);
}

class CsvWriter {
 public:
  CsvWriter(const std::filesystem::path& path,
            const std::vector<std::string>& header)
      : out_(path, std::ios::binary), columns_(header.size()) {
    if (!out_) throw std::runtime_error("cannot open for writing: " + path.string());
    write_cells(header);
  }

  void row(const std::vector<double>& values) {
    std::vector<std::string> cells;
    cells.reserve(values.size());
    for (double v : values) cells.push_back(format_double(v));
    write_cells(cells);
  }

  void row_mixed(const std::vector<std::string>& cells) { write_cells(cells); }

 private:
  void write_cells(const std::vector<std::string>& cells) {
    if (cells.size() != columns_) {
      throw std::runtime_error("csv row width mismatch");
    }
    for (std::size_t i = 0; i < cells.size(); ++i) {
      if (i) out_ << ',';
      out_ << cells[i];
    }
    out_ << '\n';
  }

  std::ofstream out_;
  std::size_t columns_;
};

// Scenario as ordered key/value pairs, exactly the accepted config keys.
inline std::vector<std::pair<std::string, std::string>> scenario_entries(
    const Scenario& s) {
  std::vector<std::pair<std::string, std::string>> kv;
  auto d = [&](const char* k, double v) { kv.emplace_back(k, format_double(v)); };
  auto i = [&](const char* k, int v) { kv.emplace_back(k, std::to_string(v)); };
  d("H_s", s.H_s);
  d("H_0", s.H_0);
  d("zeta_elev", s.zeta_elev);
  d("d_g", s.d_g);
  d("zeta", s.zeta);
  d("lambda", s.lambda);
  d("V", s.V);
  d("Cn2_0", s.Cn2_0);
  kv.emplace_back("gg_model", to_string(s.gg_model));
  d("P_t", s.P_t);
  d("R", s.R);
  d("N_0", s.N_0);
  d("A_MRR", s.A_MRR);
  i("M", s.M);
  d("sigma_theta_ge", s.sigma_theta_ge);
  d("sigma_theta_e", s.sigma_theta_e);
  d("sigma_theta_aq", s.sigma_theta_aq);
  i("N_m", s.N_m);
  i("K_c", s.K_c);
  i("K_d", s.K_d);
  d("T_bit", s.T_bit);
  d("R_th", s.R_th);
  d("R_e", s.R_e);
  d("w_zs", s.w_zs);
  d("w_zp", s.w_zp);
  d("R_emb", s.R_emb);
  return kv;
}

// Flat key = value manifest; holds everything needed to reproduce a run.
class Manifest {
 public:
  void set(const std::string& key, const std::string& value) {
    entries_.emplace_back(key, value);
  }
  void set(const std::string& key, double value) { set(key, format_double(value)); }
  void set(const std::string& key, std::uint64_t value) { set(key, format_u64(value)); }
  void set(const std::string& key, int value) { set(key, std::to_string(value)); }

  void add_scenario(const Scenario& s) {
    for (auto& [k, v] : scenario_entries(s)) set(k, v);
  }

  void write(const std::filesystem::path& path) const {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot open for writing: " + path.string());
    out << "version = " << kVersion << '\n';
    for (const auto& [k, v] : entries_) out << k << " = " << v << '\n';
  }

 private:
  std::vector<std::pair<std::string, std::string>> entries_;
};

inline std::string read_file_bytes(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open: " + path.string());
  return std::string(std::istreambuf_iterator<char>(in),
                     std::istreambuf_iterator<char>());
}

} // namespace mrrlink
