#pragma once

// CSV outputs of a run and the manifest that indexes them.

#include <algorithm>
#include <charconv>
#include <cstdint>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <memory>
#include <stdexcept>
#include <string>
#include <vector>

#include "mfgtraffic/adp_stepper.hpp"
#include "mfgtraffic/config.hpp"
#include "mfgtraffic/density.hpp"
#include "mfgtraffic/diagnostics.hpp"

namespace mfgtraffic {

inline constexpr const char* kVersion = "0.1.0";

class OutputError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Fixed-precision formatting so repeated runs produce identical bytes.
inline std::string fmt_num(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.12g", v);
  return buf;
}

/// Shortest round-trip text, used in file names.
inline std::string time_label(double t) {
  char buf[40];
  auto res = std::to_chars(buf, buf + sizeof buf, t);
  return std::string(buf, res.ptr);
}

inline std::string density_filename(double t) { return "density_t" + time_label(t) + ".csv"; }

class CsvFile {
 public:
  CsvFile(const std::filesystem::path& path, const std::string& header) : path_(path), out_(path) {
    if (!out_) throw OutputError("cannot open '" + path.string() + "' for writing");
    line(header);
  }
  void line(const std::string& text) {
    out_ << text << '\n';
    if (!out_) throw OutputError("write failed on '" + path_.string() + "'");
  }
  void flush() { out_.flush(); }

 private:
  std::filesystem::path path_;
  std::ofstream out_;
};

inline std::string weights_header(int K) {
  std::string h = "t";
  for (char branch : {'a', 'b'})
    for (int i = 0; i < K; ++i)
      for (int j = 0; j < K; ++j) h += "," + std::string(1, branch) + "_" + std::to_string(i) + std::to_string(j);
  return h;
}

inline void write_density_csv(const std::filesystem::path& path, const DensityField& rho) {
  CsvFile f(path, "y1,y2,rho");
  const auto& g = rho.grid();
  for (int i = 0; i < g.nx(); ++i)
    for (int j = 0; j < g.nv(); ++j)
      f.line(fmt_num(g.x_center(i)) + "," + fmt_num(g.v_center(j)) + "," + fmt_num(rho(i, j)));
}

/// Writes weights.csv, error.csv, spatial.csv, speed_marginal.csv and one
/// density_t<time>.csv per snapshot under out_dir.
class CsvRunWriter {
 public:
  CsvRunWriter(const std::filesystem::path& out_dir, const GridSpec& grid, const ModelParams& p)
      : dir_(out_dir), grid_(grid), p_(p) {
    std::error_code ec;
    std::filesystem::create_directories(dir_, ec);
    if (ec) throw OutputError("cannot create output directory '" + dir_.string() + "': " + ec.message());
    weights_ = std::make_unique<CsvFile>(dir_ / "weights.csv", weights_header(p.K));
    error_ = std::make_unique<CsvFile>(dir_ / "error.csv", "t,E");
    spatial_ = std::make_unique<CsvFile>(dir_ / "spatial.csv", "t,y1,r1,j,vbulk");
    speed_ = std::make_unique<CsvFile>(dir_ / "speed_marginal.csv", "t,y2,r2");
  }

  void series(double t, double E, const WeightMatrices& W) {
    std::string row = fmt_num(t);
    for (double v : W.a_data()) row += "," + fmt_num(v);
    for (double v : W.b_data()) row += "," + fmt_num(v);
    weights_->line(row);
    error_->line(fmt_num(t) + "," + fmt_num(E));
  }

  void snapshot(double label, const DensityField& rho) {
    const auto m = macro_profile(rho, grid_, p_, label);
    const std::string ts = fmt_num(label);
    for (std::size_t i = 0; i < m.x.size(); ++i)
      spatial_->line(ts + "," + fmt_num(m.x[i]) + "," + fmt_num(m.r1[i]) + "," + fmt_num(m.j[i]) + "," +
                     (m.vbulk[i] ? fmt_num(*m.vbulk[i]) : std::string()));
    for (std::size_t j = 0; j < m.v.size(); ++j)
      speed_->line(ts + "," + fmt_num(m.v[j]) + "," + fmt_num(m.r2[j]));
    write_density_csv(dir_ / density_filename(label), rho);
  }

  OutputSinks sinks() {
    OutputSinks s;
    s.series = [this](double t, double E, const WeightMatrices& W) { series(t, E, W); };
    s.snapshot = [this](double label, const CoupledState& st) { snapshot(label, st.rho); };
    return s;
  }

  void flush() {
    weights_->flush();
    error_->flush();
    spatial_->flush();
    speed_->flush();
  }

 private:
  std::filesystem::path dir_;
  GridSpec grid_;
  ModelParams p_;
  std::unique_ptr<CsvFile> weights_, error_, spatial_, speed_;
};

/// FNV-1a 64-bit, printed as 16 hex digits.
inline std::string config_hash(const std::string& text) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : text) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

inline long long count_data_rows(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw OutputError("cannot read '" + path.string() + "'");
  long long lines = 0;
  std::string line;
  while (std::getline(in, line)) ++lines;
  return path.extension() == ".csv" ? std::max(0LL, lines - 1) : lines;
}

/// Writes manifest.txt listing every other file in out_dir (sorted by name),
/// its data-row count (CSV header excluded), the config hash and the version.
inline std::filesystem::path emit_manifest(const std::filesystem::path& out_dir, const std::string& config_text) {
  std::vector<std::filesystem::path> files;
  std::error_code ec;
  for (const auto& entry : std::filesystem::directory_iterator(out_dir, ec))
    if (entry.is_regular_file() && entry.path().filename() != "manifest.txt") files.push_back(entry.path());
  if (ec) throw OutputError("cannot list '" + out_dir.string() + "': " + ec.message());
  std::sort(files.begin(), files.end());

  const auto path = out_dir / "manifest.txt";
  std::ofstream out(path);
  if (!out) throw OutputError("cannot open '" + path.string() + "' for writing");
  out << "version=" << kVersion << '\n' << "config_hash=" << config_hash(config_text) << '\n';
  for (const auto& f : files) out << "file=" << f.filename().string() << " rows=" << count_data_rows(f) << '\n';
  if (!out) throw OutputError("write failed on '" + path.string() + "'");
  return path;
}

}  // namespace mfgtraffic
