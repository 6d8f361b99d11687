#include "kagome/io.hpp"

#include <algorithm>
#include <array>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstring>
#include <ctime>
#include <limits>

#include <openssl/evp.h>
#include <png.h>

namespace kagome::io {

std::string version() { return KAGOME_VERSION; }

std::string num(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  if (v == 0.0) v = 0.0; // fold -0
  std::array<char, 40> buf{};
  std::snprintf(buf.data(), buf.size(), "%.12g", v);
  return buf.data();
}

CsvWriter::CsvWriter(const fs::path& path, const std::vector<std::string>& header)
    : path_(path), out_(path, std::ios::binary) {
  if (!out_) throw std::runtime_error("cannot open " + path.string() + " for writing");
  for (const auto& h : header) field(h);
  end_row();
}

void CsvWriter::field(const std::string& text) {
  if (!fresh_) out_ << ',';
  fresh_ = false;
  if (text.find_first_of(",\"\n") != std::string::npos) {
    out_ << '"';
    for (char c : text) {
      if (c == '"') out_ << '"';
      out_ << c;
    }
    out_ << '"';
  } else {
    out_ << text;
  }
}

CsvWriter& CsvWriter::operator<<(const std::string& f) {
  field(f);
  return *this;
}

CsvWriter& CsvWriter::operator<<(double v) {
  field(num(v));
  return *this;
}

CsvWriter& CsvWriter::operator<<(long long v) {
  field(std::to_string(v));
  return *this;
}

void CsvWriter::end_row() {
  out_ << '\n';
  fresh_ = true;
  if (!out_) throw std::runtime_error("write failed for " + path_.string());
}

std::string sha256_file(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot read " + path.string());
  EVP_MD_CTX* ctx = EVP_MD_CTX_new();
  EVP_DigestInit_ex(ctx, EVP_sha256(), nullptr);
  std::array<char, 1 << 16> buf{};
  while (in) {
    in.read(buf.data(), buf.size());
    EVP_DigestUpdate(ctx, buf.data(), static_cast<std::size_t>(in.gcount()));
  }
  std::array<unsigned char, EVP_MAX_MD_SIZE> md{};
  unsigned int len = 0;
  EVP_DigestFinal_ex(ctx, md.data(), &len);
  EVP_MD_CTX_free(ctx);
  std::string hex;
  static constexpr char digits[] = "0123456789abcdef";
  for (unsigned int i = 0; i < len; ++i) {
    hex += digits[md[i] >> 4];
    hex += digits[md[i] & 15];
  }
  return hex;
}

void write_lattice_csv(const fs::path& path, const Lattice& lat) {
  CsvWriter csv(path, {"atom_id", "sublattice", "cell_index", "x", "y", "z"});
  for (std::size_t i = 0; i < lat.size(); ++i) {
    csv << i << std::string(1, to_char(lat.sublattice[i])) << lat.cell_index[i] << lat.positions[i].x()
        << lat.positions[i].y() << lat.positions[i].z();
    csv.end_row();
  }
}

std::vector<std::string> modes_header() {
  return {"job_key", "mode_index", "re_omega", "gamma", "ipr", "class", "w_A", "w_B", "w_C",
          "corner_A", "corner_B", "corner_C", "edge_family", "in_gap"};
}

void write_modes_csv(CsvWriter& csv, const std::string& job_key, const ModeSet& modes) {
  for (std::size_t k = 0; k < modes.size(); ++k) {
    csv << job_key << k << modes.omega(k) << modes.gamma(k) << modes.ipr[k] << std::string(to_string(modes.cls[k]));
    for (double w : modes.sublattice_weight[k]) csv << w;
    for (double w : modes.corner_weight[k]) csv << w;
    csv << edge_family(modes, k) << static_cast<int>(modes.in_gap[k]);
    csv.end_row();
  }
}

void write_bands_csv(const fs::path& path, const std::vector<BandPoint>& bands) {
  CsvWriter csv(path, {"kx", "ky", "band_index", "re_omega_over_Gamma0", "gamma_over_Gamma0", "in_light_cone"});
  for (const auto& b : bands)
    for (std::size_t n = 0; n < 3; ++n) {
      csv << b.k.x() << b.k.y() << n << b.omega[n] << b.gamma[n] << static_cast<int>(b.in_light_cone);
      csv.end_row();
    }
}

void write_track_csv(const fs::path& path, const CornerModeTrack& track) {
  CsvWriter csv(path, {"theta", "corner", "mode_index", "re_omega", "gamma", "corner_weight", "in_gap",
                       "double_corner", "sector", "reorganized"});
  for (const auto& p : track.points)
    for (std::size_t c = 0; c < 3; ++c) {
      csv << p.theta << std::string(1, to_char(static_cast<Sublattice>(c))) << p.mode[c] << p.omega[c] << p.gamma[c]
          << p.own_weight[c] << static_cast<int>(p.in_gap[c]) << static_cast<int>(p.double_corner[c]) << p.sector
          << static_cast<int>(p.reorganized);
      csv.end_row();
    }
}

void write_disorder_csv(const fs::path& path, const std::string& job_key, const DisorderResult& res) {
  CsvWriter csv(path, {"job_key", "kappa", "realization", "seed", "skipped", "survived", "in_gap_corner",
                       "gap_lo", "gap_hi"});
  for (const auto& r : res.rows) {
    csv << job_key << r.kappa << r.realization << std::to_string(r.seed) << static_cast<int>(r.skipped)
        << static_cast<int>(r.survived) << r.in_gap_corner << r.gap.first << r.gap.second;
    csv.end_row();
  }
}

void write_populations_csv(const fs::path& path, const DynamicsTrace& trace) {
  CsvWriter csv(path, {"time", "basis_index", "population"});
  for (std::size_t t = 0; t < trace.times.size(); ++t)
    for (Eigen::Index i = 0; i < trace.populations[t].size(); ++i) {
      csv << trace.times[t] << static_cast<long long>(i) << trace.populations[t][i];
      csv.end_row();
    }
}

void write_sectors_csv(const fs::path& path, const DynamicsTrace& trace) {
  CsvWriter csv(path, {"time", "sector_1", "sector_2", "sector_3", "sector_4", "sector_5", "sector_6",
                       "chirality", "total_norm"});
  for (std::size_t t = 0; t < trace.times.size(); ++t) {
    csv << trace.times[t];
    for (double s : trace.sectors.at(t)) csv << s;
    csv << trace.chirality.at(t) << trace.total_norm[t];
    csv.end_row();
  }
}

void write_matrix_dump(const fs::path& path, const EffectiveHamiltonian& h, const json& parameters) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot open " + path.string());
  const auto write_le = [&](double v) {
    std::uint64_t bits = 0;
    std::memcpy(&bits, &v, sizeof bits);
    std::array<char, 8> bytes{};
    for (int b = 0; b < 8; ++b) bytes[static_cast<std::size_t>(b)] = static_cast<char>((bits >> (8 * b)) & 0xff);
    out.write(bytes.data(), 8);
  };
  for (Eigen::Index i = 0; i < h.matrix.rows(); ++i)
    for (Eigen::Index j = 0; j < h.matrix.cols(); ++j) {
      write_le(h.matrix(i, j).real());
      write_le(h.matrix(i, j).imag());
    }
  json side;
  side["dimension"] = h.size();
  side["layout"] = "row-major little-endian complex128 (re, im)";
  side["units"] = "hbar Gamma0, detuning from omega0";
  std::vector<std::string> labels;
  for (const auto& l : h.labels) labels.push_back(l.describe());
  side["labels"] = labels;
  side["parameters"] = parameters;
  std::ofstream sc(fs::path(path.string() + ".json"));
  sc << side.dump(2) << '\n';
}

namespace {

std::array<unsigned char, 3> colormap(double t) {
  // black -> red -> yellow -> white
  t = std::clamp(t, 0.0, 1.0);
  const double r = std::clamp(3.0 * t, 0.0, 1.0);
  const double g = std::clamp(3.0 * t - 1.0, 0.0, 1.0);
  const double b = std::clamp(3.0 * t - 2.0, 0.0, 1.0);
  return {static_cast<unsigned char>(255 * r), static_cast<unsigned char>(255 * g), static_cast<unsigned char>(255 * b)};
}

} // namespace

void write_population_png(const fs::path& path, const Lattice& lat, const Eigen::VectorXd& values, int width,
                          bool log_scale) {
  if (lat.size() == 0) throw std::runtime_error("cannot rasterize an empty lattice");
  double xmin = std::numeric_limits<double>::infinity(), xmax = -xmin, ymin = xmin, ymax = -xmin;
  for (const auto& p : lat.positions) {
    xmin = std::min(xmin, p.x());
    xmax = std::max(xmax, p.x());
    ymin = std::min(ymin, p.y());
    ymax = std::max(ymax, p.y());
  }
  const double pad = lat.spec.spacing;
  const double scale = (width - 1) / (xmax - xmin + 2 * pad);
  const int height = std::max(1, static_cast<int>((ymax - ymin + 2 * pad) * scale) + 1);
  std::vector<unsigned char> img(static_cast<std::size_t>(width * height * 3), 0);

  double vmax = 0.0;
  for (std::size_t i = 0; i < lat.size(); ++i) vmax = std::max(vmax, values[static_cast<Eigen::Index>(i)]);
  const double floor_v = vmax * 1e-4;
  const int radius = std::max(1, static_cast<int>(0.25 * std::min(lat.spec.intracell(), lat.spec.intercell()) * scale));
  for (std::size_t i = 0; i < lat.size(); ++i) {
    const double v = values[static_cast<Eigen::Index>(i)];
    double t = vmax > 0.0 ? v / vmax : 0.0;
    if (log_scale && vmax > 0.0) t = std::log10(std::max(v, floor_v) / floor_v) / std::log10(vmax / floor_v);
    const auto c = colormap(0.15 + 0.85 * t);
    const int cx = static_cast<int>((lat.positions[i].x() - xmin + pad) * scale);
    const int cy = height - 1 - static_cast<int>((lat.positions[i].y() - ymin + pad) * scale);
    for (int dy = -radius; dy <= radius; ++dy)
      for (int dx = -radius; dx <= radius; ++dx) {
        if (dx * dx + dy * dy > radius * radius) continue;
        const int x = cx + dx, y = cy + dy;
        if (x < 0 || y < 0 || x >= width || y >= height) continue;
        const auto o = static_cast<std::size_t>((y * width + x) * 3);
        img[o] = c[0];
        img[o + 1] = c[1];
        img[o + 2] = c[2];
      }
  }

  FILE* fp = std::fopen(path.string().c_str(), "wb");
  if (!fp) throw std::runtime_error("cannot open " + path.string());
  png_structp png = png_create_write_struct(PNG_LIBPNG_VER_STRING, nullptr, nullptr, nullptr);
  png_infop info = png_create_info_struct(png);
  if (setjmp(png_jmpbuf(png))) {
    png_destroy_write_struct(&png, &info);
    std::fclose(fp);
    throw std::runtime_error("libpng failed writing " + path.string());
  }
  png_init_io(png, fp);
  png_set_IHDR(png, info, static_cast<png_uint_32>(width), static_cast<png_uint_32>(height), 8, PNG_COLOR_TYPE_RGB,
               PNG_INTERLACE_NONE, PNG_COMPRESSION_TYPE_DEFAULT, PNG_FILTER_TYPE_DEFAULT);
  png_write_info(png, info);
  for (int y = 0; y < height; ++y) png_write_row(png, img.data() + static_cast<std::size_t>(y * width * 3));
  png_write_end(png, nullptr);
  png_destroy_write_struct(&png, &info);
  std::fclose(fp);
}

json to_json(const LatticeSpec& spec) {
  return {{"spacing_lambda0", spec.spacing},
          {"imbalance", spec.imbalance},
          {"cells_per_side", spec.cells_per_side},
          {"wavelength", spec.wavelength},
          {"intracell_lambda0", spec.intracell()},
          {"intercell_lambda0", spec.intercell()},
          {"atoms", 3 * spec.cells_per_side * (spec.cells_per_side + 1) / 2}};
}

json to_json(const Polarization& pol) {
  json v = json::array();
  for (int i = 0; i < 3; ++i) v.push_back({pol.vector[i].real(), pol.vector[i].imag()});
  return v;
}

json to_json(const ConvergenceReport& rep) {
  return {{"tolerance_gamma0", rep.tolerance},
          {"relaxed_tolerance_gamma0", rep.relaxed},
          {"max_diff_outside_light_cone_gamma0", rep.max_diff_outside},
          {"max_diff_inside_light_cone_gamma0", rep.max_diff_inside},
          {"points_outside_light_cone", rep.n_outside},
          {"points_inside_light_cone", rep.n_inside},
          {"failed_outside_light_cone", rep.failed_outside},
          {"clean_beyond_k0", rep.clean_beyond},
          {"passed", rep.passed}};
}

Manifest::Manifest(fs::path dir, std::string command) : dir_(std::move(dir)) {
  doc_["command"] = std::move(command);
  doc_["version"] = version();
  const auto now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  std::array<char, 32> buf{};
  std::strftime(buf.data(), buf.size(), "%Y-%m-%dT%H:%M:%SZ", std::gmtime(&now));
  doc_["timestamp"] = buf.data();
}

void Manifest::add_file(const fs::path& file, const std::string& description) { files_.emplace_back(file, description); }

void Manifest::write() {
  json files = json::array();
  for (const auto& [file, desc] : files_) {
    files.push_back({{"path", fs::relative(file, dir_).generic_string()},
                     {"sha256", sha256_file(file)},
                     {"bytes", fs::file_size(file)},
                     {"description", desc}});
  }
  doc_["files"] = files;
  std::ofstream out(dir_ / "manifest.json");
  out << doc_.dump(2) << '\n';
  if (!out) throw std::runtime_error("cannot write manifest in " + dir_.string());
}

} // namespace kagome::io
