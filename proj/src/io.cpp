#include "hsi/io.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <cstring>
#include <fstream>
#include <limits>
#include <sstream>

#include "hsi/rng.hpp"

namespace hsi::io {

namespace {

void put_u16le(std::string& out, std::uint16_t v) {
  out.push_back(static_cast<char>(v & 0xFF));
  out.push_back(static_cast<char>((v >> 8) & 0xFF));
}

void put_u32le(std::string& out, std::uint32_t v) {
  for (int s = 0; s < 32; s += 8) out.push_back(static_cast<char>((v >> s) & 0xFF));
}

void put_u64le(std::string& out, std::uint64_t v) {
  for (int s = 0; s < 64; s += 8) out.push_back(static_cast<char>((v >> s) & 0xFF));
}

std::uint16_t get_u16le(const unsigned char* p) {
  return static_cast<std::uint16_t>(p[0] | (p[1] << 8));
}

std::uint32_t get_u32le(const unsigned char* p) {
  return static_cast<std::uint32_t>(p[0]) | (static_cast<std::uint32_t>(p[1]) << 8) |
         (static_cast<std::uint32_t>(p[2]) << 16) | (static_cast<std::uint32_t>(p[3]) << 24);
}

std::uint64_t get_u64le(const unsigned char* p) {
  std::uint64_t v = 0;
  for (int k = 7; k >= 0; --k) v = (v << 8) | p[k];
  return v;
}

float bits_to_f32(std::uint32_t bits) {
  float f;
  std::memcpy(&f, &bits, sizeof f);
  return f;
}

std::uint32_t f32_to_bits(float f) {
  std::uint32_t bits;
  std::memcpy(&bits, &f, sizeof bits);
  return bits;
}

double bits_to_f64(std::uint64_t bits) {
  double d;
  std::memcpy(&d, &bits, sizeof d);
  return d;
}

std::uint64_t f64_to_bits(double d) {
  std::uint64_t bits;
  std::memcpy(&bits, &d, sizeof bits);
  return bits;
}

void write_file(const std::string& path, const std::string& bytes) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot open for writing: " + path);
  out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
  if (!out) throw IoError("write failed: " + path);
}

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open: " + path);
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

// Splits the single ASCII header line off a container file.
std::pair<std::string, std::size_t> header_line(const std::string& bytes, const std::string& path) {
  const auto nl = bytes.find('\n');
  if (nl == std::string::npos) throw IoError("missing header line: " + path);
  return {bytes.substr(0, nl), nl + 1};
}

Eigen::Index parse_count(const std::string& token, const std::string& what,
                         const std::string& path) {
  long long v = -1;
  try {
    v = std::stoll(token);
  } catch (...) {
    throw IoError("invalid header (" + what + "): " + path);
  }
  if (v < 1) throw IoError("invalid header (" + what + " must be >= 1): " + path);
  return static_cast<Eigen::Index>(v);
}

std::vector<std::string> split_ws(const std::string& line) {
  std::istringstream ss(line);
  std::vector<std::string> tokens;
  std::string t;
  while (ss >> t) tokens.push_back(t);
  return tokens;
}

std::string format_g17(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

}  // namespace

void write_cube(const HsiCube& cube, const std::string& path) {
  std::string bytes = "HSIC v1 " + std::to_string(cube.rows()) + " " +
                      std::to_string(cube.cols()) + " " + std::to_string(cube.bands()) +
                      " f32 le row-major\n";
  bytes.reserve(bytes.size() + static_cast<std::size_t>(cube.pixels() * cube.bands()) * 4);
  const Matrix& d = cube.data();
  for (Eigen::Index p = 0; p < d.cols(); ++p)
    for (Eigen::Index b = 0; b < d.rows(); ++b)
      put_u32le(bytes, f32_to_bits(static_cast<float>(d(b, p))));
  write_file(path, bytes);
}

HsiCube read_cube(const std::string& path) {
  const std::string bytes = read_file(path);
  const auto [header, payload_at] = header_line(bytes, path);
  const auto tok = split_ws(header);
  if (tok.size() != 8 || tok[0] != "HSIC") throw IoError("bad magic, not a cube file: " + path);
  if (tok[1] != "v1") throw IoError("unsupported cube version '" + tok[1] + "': " + path);
  if (tok[5] != "f32" || tok[6] != "le" || tok[7] != "row-major")
    throw IoError("unsupported cube encoding: " + path);
  const Eigen::Index rows = parse_count(tok[2], "rows", path);
  const Eigen::Index cols = parse_count(tok[3], "cols", path);
  const Eigen::Index bands = parse_count(tok[4], "bands", path);

  const std::size_t need = static_cast<std::size_t>(rows * cols * bands) * 4;
  if (bytes.size() - payload_at != need)
    throw IoError("payload is " + std::to_string(bytes.size() - payload_at) + " bytes, expected " +
                  std::to_string(need) + ": " + path);

  Matrix data(bands, rows * cols);
  const auto* p = reinterpret_cast<const unsigned char*>(bytes.data()) + payload_at;
  for (Eigen::Index px = 0; px < rows * cols; ++px)
    for (Eigen::Index b = 0; b < bands; ++b, p += 4) data(b, px) = bits_to_f32(get_u32le(p));
  if (!data.allFinite()) throw IoError("cube contains non-finite values: " + path);
  return HsiCube(rows, cols, std::move(data));
}

void write_labels(const LabelRaster& labels, const std::string& path) {
  const int top = labels.num_classes();
  if (top > 65535) throw IoError("labels exceed u16 range");
  std::string bytes = "HSIL v1 " + std::to_string(labels.rows()) + " " +
                      std::to_string(labels.cols()) + " u16 le row-major\n";
  for (Eigen::Index i = 0; i < labels.rows(); ++i)
    for (Eigen::Index j = 0; j < labels.cols(); ++j)
      put_u16le(bytes, static_cast<std::uint16_t>(labels.at(i, j)));
  write_file(path, bytes);
}

LabelRaster read_labels(const std::string& path) {
  const std::string bytes = read_file(path);
  const auto [header, payload_at] = header_line(bytes, path);
  const auto tok = split_ws(header);
  if (tok.size() != 7 || tok[0] != "HSIL") throw IoError("bad magic, not a label file: " + path);
  if (tok[1] != "v1") throw IoError("unsupported label version '" + tok[1] + "': " + path);
  if (tok[4] != "u16" || tok[5] != "le" || tok[6] != "row-major")
    throw IoError("unsupported label encoding: " + path);
  const Eigen::Index rows = parse_count(tok[2], "rows", path);
  const Eigen::Index cols = parse_count(tok[3], "cols", path);

  const std::size_t need = static_cast<std::size_t>(rows * cols) * 2;
  if (bytes.size() - payload_at != need)
    throw IoError("payload is " + std::to_string(bytes.size() - payload_at) + " bytes, expected " +
                  std::to_string(need) + ": " + path);

  Labels2d labels(rows, cols);
  const auto* p = reinterpret_cast<const unsigned char*>(bytes.data()) + payload_at;
  for (Eigen::Index i = 0; i < rows; ++i)
    for (Eigen::Index j = 0; j < cols; ++j, p += 2) labels(i, j) = get_u16le(p);
  return LabelRaster(std::move(labels));
}

void write_probability_tensor(const ProbabilityTensor& tensor, const std::string& path) {
  std::string bytes = "HSIP v1 " + std::to_string(tensor.rows()) + " " +
                      std::to_string(tensor.cols()) + " " + std::to_string(tensor.classes()) +
                      " f64 le row-major\n";
  const Matrix& v = tensor.values();
  for (Eigen::Index px = 0; px < v.cols(); ++px)
    for (Eigen::Index k = 0; k < v.rows(); ++k) put_u64le(bytes, f64_to_bits(v(k, px)));
  for (Eigen::Index i = 0; i < tensor.rows(); ++i)
    for (Eigen::Index j = 0; j < tensor.cols(); ++j)
      bytes.push_back(tensor.is_background(i, j) ? '\1' : '\0');
  write_file(path, bytes);
}

ProbabilityTensor read_probability_tensor(const std::string& path) {
  const std::string bytes = read_file(path);
  const auto [header, payload_at] = header_line(bytes, path);
  const auto tok = split_ws(header);
  if (tok.size() != 8 || tok[0] != "HSIP") throw IoError("bad magic, not a tensor file: " + path);
  if (tok[1] != "v1") throw IoError("unsupported tensor version '" + tok[1] + "': " + path);
  if (tok[5] != "f64" || tok[6] != "le" || tok[7] != "row-major")
    throw IoError("unsupported tensor encoding: " + path);
  const Eigen::Index rows = parse_count(tok[2], "rows", path);
  const Eigen::Index cols = parse_count(tok[3], "cols", path);
  const Eigen::Index classes = parse_count(tok[4], "classes", path);

  const std::size_t need =
      static_cast<std::size_t>(rows * cols * classes) * 8 + static_cast<std::size_t>(rows * cols);
  if (bytes.size() - payload_at != need)
    throw IoError("payload is " + std::to_string(bytes.size() - payload_at) + " bytes, expected " +
                  std::to_string(need) + ": " + path);

  ProbabilityTensor tensor(rows, cols, classes);
  const auto* p = reinterpret_cast<const unsigned char*>(bytes.data()) + payload_at;
  for (Eigen::Index px = 0; px < rows * cols; ++px)
    for (Eigen::Index k = 0; k < classes; ++k, p += 8)
      tensor.values()(k, px) = bits_to_f64(get_u64le(p));
  for (Eigen::Index i = 0; i < rows; ++i)
    for (Eigen::Index j = 0; j < cols; ++j, ++p) tensor.background()(i, j) = (*p != 0);
  return tensor;
}

void write_training_set(const TrainingSet& training, const std::string& path) {
  std::ostringstream out;
  out << "HSIT v1 " << training.rows() << " " << training.cols() << " "
      << training.entries().size() << " " << training.shortfalls().size() << "\n";
  for (const auto& e : training.entries()) out << e.row << " " << e.col << " " << e.cls << "\n";
  for (const auto& s : training.shortfalls())
    out << s.cls << " " << s.requested << " " << s.available << "\n";
  write_file(path, out.str());
}

TrainingSet read_training_set(const std::string& path) {
  std::istringstream in(read_file(path));
  std::string magic, version;
  Eigen::Index rows = 0, cols = 0;
  std::size_t n_entries = 0, n_shortfalls = 0;
  in >> magic >> version >> rows >> cols >> n_entries >> n_shortfalls;
  if (!in || magic != "HSIT") throw IoError("bad magic, not a training-set file: " + path);
  if (version != "v1") throw IoError("unsupported training-set version: " + path);
  std::vector<TrainingPixel> entries(n_entries);
  for (auto& e : entries) in >> e.row >> e.col >> e.cls;
  std::vector<ClassShortfall> shortfalls(n_shortfalls);
  for (auto& s : shortfalls) in >> s.cls >> s.requested >> s.available;
  if (!in) throw IoError("truncated training-set file: " + path);
  return TrainingSet(rows, cols, std::move(entries), std::move(shortfalls));
}

void export_error_map(const Counts2d& counts, int trials, const std::string& path) {
  if ((counts < 0).any() || (counts > trials).any())
    throw ValidationError("export_error_map: counts outside 0..trials");
  std::ostringstream out;
  out << "P2\n" << counts.cols() << " " << counts.rows() << "\n"
      << std::max(1, counts.maxCoeff()) << "\n";
  for (Eigen::Index i = 0; i < counts.rows(); ++i) {
    for (Eigen::Index j = 0; j < counts.cols(); ++j) out << counts(i, j) << (j + 1 < counts.cols() ? " " : "");
    out << "\n";
  }
  write_file(path, out.str());
}

Counts2d read_error_map(const std::string& path) {
  std::istringstream in(read_file(path));
  std::string magic;
  Eigen::Index w = 0, h = 0;
  int maxval = 0;
  in >> magic >> w >> h >> maxval;
  if (!in || magic != "P2") throw IoError("not a P2 PGM file: " + path);
  if (w < 1 || h < 1) throw IoError("bad PGM dimensions: " + path);
  Counts2d counts(h, w);
  for (Eigen::Index i = 0; i < h; ++i)
    for (Eigen::Index j = 0; j < w; ++j) in >> counts(i, j);
  if (!in) throw IoError("truncated PGM payload: " + path);
  return counts;
}

void export_report(const eval::TrialReport& report, const std::string& path) {
  const Eigen::Index c = report.mean.per_class.size();
  std::ostringstream out;
  out << "label,mean,std";
  for (int t = 0; t < report.trials; ++t) out << ",trial_" << (t + 1);
  out << "\n";
  auto row = [&](const std::string& label, auto pick) {
    out << label << "," << format_g17(pick(report.mean)) << "," << format_g17(pick(report.stddev));
    for (const auto& trial : report.per_trial) out << "," << format_g17(pick(trial));
    out << "\n";
  };
  for (Eigen::Index k = 0; k < c; ++k)
    row("class_" + std::to_string(k + 1),
        [k](const eval::TrialMetrics& m) { return m.per_class(k); });
  row("OA", [](const eval::TrialMetrics& m) { return m.oa; });
  row("AA", [](const eval::TrialMetrics& m) { return m.aa; });
  row("kappa", [](const eval::TrialMetrics& m) { return m.kappa; });
  write_file(path, out.str());
}

eval::TrialReport read_report(const std::string& path) {
  std::istringstream in(read_file(path));
  std::string line;
  if (!std::getline(in, line)) throw IoError("empty report: " + path);
  auto split = [](const std::string& s) {
    std::vector<std::string> cells;
    std::stringstream ss(s);
    std::string cell;
    while (std::getline(ss, cell, ',')) cells.push_back(cell);
    return cells;
  };
  const auto head = split(line);
  if (head.size() < 3 || head[0] != "label") throw IoError("bad report header: " + path);
  const int trials = static_cast<int>(head.size()) - 3;

  std::vector<std::pair<std::string, std::vector<double>>> rows;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    auto cells = split(line);
    if (cells.size() != head.size()) throw IoError("ragged report row: " + path);
    std::vector<double> vals;
    for (std::size_t k = 1; k < cells.size(); ++k) vals.push_back(std::strtod(cells[k].c_str(), nullptr));
    rows.emplace_back(cells[0], std::move(vals));
  }
  if (rows.size() < 3) throw IoError("report missing OA/AA/kappa rows: " + path);
  const Eigen::Index c = static_cast<Eigen::Index>(rows.size()) - 3;

  eval::TrialReport report;
  report.trials = trials;
  auto metrics_at = [&](std::size_t col) {
    eval::TrialMetrics m;
    m.per_class = Vector(c);
    for (Eigen::Index k = 0; k < c; ++k) m.per_class(k) = rows[static_cast<std::size_t>(k)].second[col];
    m.oa = rows[static_cast<std::size_t>(c)].second[col];
    m.aa = rows[static_cast<std::size_t>(c) + 1].second[col];
    m.kappa = rows[static_cast<std::size_t>(c) + 2].second[col];
    return m;
  };
  report.mean = metrics_at(0);
  report.stddev = metrics_at(1);
  for (int t = 0; t < trials; ++t) report.per_trial.push_back(metrics_at(2 + static_cast<std::size_t>(t)));
  return report;
}

SyntheticScene generate_synthetic(const SyntheticSceneSpec& spec) {
  if (spec.rows < 1 || spec.cols < 1 || spec.bands < 1)
    throw ValidationError("generate_synthetic: empty scene dimensions");
  if (spec.classes < 2) throw ValidationError("generate_synthetic: need at least 2 classes");
  if (spec.patch_side < 1.0) throw ValidationError("generate_synthetic: patch side must be >= 1");
  if (spec.noise_sigma < 0.0) throw ValidationError("generate_synthetic: negative noise sigma");
  if (!spec.class_means.empty()) {
    if (static_cast<int>(spec.class_means.size()) != spec.classes)
      throw ValidationError("generate_synthetic: class_means size mismatch");
    for (const auto& m : spec.class_means)
      if (m.size() != spec.bands)
        throw ValidationError("generate_synthetic: class mean band count mismatch");
  }

  const auto side = static_cast<Eigen::Index>(spec.patch_side);
  const Eigen::Index grid_rows = (spec.rows + side - 1) / side;
  const Eigen::Index grid_cols = (spec.cols + side - 1) / side;
  const Eigen::Index n_seeds = grid_rows * grid_cols;
  if (n_seeds < spec.classes)
    throw ValidationError("generate_synthetic: patch side too large, fewer patches than classes");

  // One Voronoi seed per grid cell, jittered within the cell, so every seed
  // owns at least its own pixel and every class gets at least one patch.
  Rng jitter_rng(derive_seed(spec.seed, 0));
  std::vector<std::pair<Eigen::Index, Eigen::Index>> seeds;
  seeds.reserve(static_cast<std::size_t>(n_seeds));
  for (Eigen::Index a = 0; a < grid_rows; ++a)
    for (Eigen::Index b = 0; b < grid_cols; ++b) {
      const Eigen::Index r0 = a * side, r1 = std::min(spec.rows, r0 + side);
      const Eigen::Index c0 = b * side, c1 = std::min(spec.cols, c0 + side);
      const Eigen::Index r = r0 + static_cast<Eigen::Index>(jitter_rng.next_below(
                                      static_cast<std::uint64_t>(r1 - r0)));
      const Eigen::Index c = c0 + static_cast<Eigen::Index>(jitter_rng.next_below(
                                      static_cast<std::uint64_t>(c1 - c0)));
      seeds.emplace_back(r, c);
    }

  // Round-robin class assignment keeps every class present; the shuffle
  // breaks the striping.
  std::vector<int> seed_class(seeds.size());
  for (std::size_t s = 0; s < seeds.size(); ++s)
    seed_class[s] = static_cast<int>(s % static_cast<std::size_t>(spec.classes)) + 1;
  Rng shuffle_rng(derive_seed(spec.seed, 1));
  for (std::size_t s = seeds.size(); s > 1; --s)
    std::swap(seed_class[s - 1], seed_class[shuffle_rng.next_below(s)]);

  Labels2d labels(spec.rows, spec.cols);
  for (Eigen::Index i = 0; i < spec.rows; ++i)
    for (Eigen::Index j = 0; j < spec.cols; ++j) {
      Eigen::Index best = 0;
      Eigen::Index best_d2 = std::numeric_limits<Eigen::Index>::max();
      for (std::size_t s = 0; s < seeds.size(); ++s) {
        const Eigen::Index di = i - seeds[s].first, dj = j - seeds[s].second;
        const Eigen::Index d2 = di * di + dj * dj;
        if (d2 < best_d2) {
          best_d2 = d2;
          best = static_cast<Eigen::Index>(s);
        }
      }
      labels(i, j) = seed_class[static_cast<std::size_t>(best)];
    }

  std::vector<Vector> means = spec.class_means;
  if (means.empty()) {
    Rng mean_rng(derive_seed(spec.seed, 2));
    means.resize(static_cast<std::size_t>(spec.classes));
    for (auto& m : means) {
      m = Vector(spec.bands);
      for (Eigen::Index b = 0; b < spec.bands; ++b)
        m(b) = spec.class_mean_scale * mean_rng.next_double();
    }
  }

  // Values pass through float so the f32 container round-trips the scene
  // bit-exactly.
  Rng noise_rng(derive_seed(spec.seed, 3));
  Matrix data(spec.bands, spec.rows * spec.cols);
  for (Eigen::Index i = 0; i < spec.rows; ++i)
    for (Eigen::Index j = 0; j < spec.cols; ++j) {
      const auto& mean = means[static_cast<std::size_t>(labels(i, j) - 1)];
      for (Eigen::Index b = 0; b < spec.bands; ++b) {
        const double v =
            mean(b) + (spec.noise_sigma > 0.0 ? spec.noise_sigma * noise_rng.next_gaussian() : 0.0);
        data(b, pixel_index(i, j, spec.cols)) = static_cast<float>(v);
      }
    }

  return SyntheticScene{HsiCube(spec.rows, spec.cols, std::move(data)),
                        LabelRaster(std::move(labels)), std::move(means)};
}

namespace {

std::size_t dtype_width(const std::string& dtype) {
  if (dtype == "f32") return 4;
  if (dtype == "f64") return 8;
  if (dtype == "u16") return 2;
  throw ConfigError("unsupported raw dtype '" + dtype + "' (expected f32, f64 or u16)");
}

double raw_value(const unsigned char* p, const std::string& dtype) {
  if (dtype == "f32") return bits_to_f32(get_u32le(p));
  if (dtype == "f64") return bits_to_f64(get_u64le(p));
  return get_u16le(p);
}

}  // namespace

HsiCube convert_raw_cube(const std::string& raw_path, Eigen::Index rows, Eigen::Index cols,
                         Eigen::Index bands, const std::string& dtype, const std::string& order) {
  if (rows < 1 || cols < 1 || bands < 1) throw ConfigError("convert: dimensions must be >= 1");
  if (order != "bip" && order != "bsq")
    throw ConfigError("unsupported raw order '" + order + "' (expected bip or bsq)");
  const std::size_t width = dtype_width(dtype);
  const std::string bytes = read_file(raw_path);
  const std::size_t need = static_cast<std::size_t>(rows * cols * bands) * width;
  if (bytes.size() != need)
    throw IoError("raw cube is " + std::to_string(bytes.size()) + " bytes, expected " +
                  std::to_string(need) + ": " + raw_path);

  Matrix data(bands, rows * cols);
  const auto* base = reinterpret_cast<const unsigned char*>(bytes.data());
  for (Eigen::Index px = 0; px < rows * cols; ++px)
    for (Eigen::Index b = 0; b < bands; ++b) {
      const std::size_t at = order == "bip"
                                 ? static_cast<std::size_t>(px * bands + b)
                                 : static_cast<std::size_t>(b * rows * cols + px);
      data(b, px) = static_cast<float>(raw_value(base + at * width, dtype));
    }
  if (!data.allFinite()) throw IoError("raw cube contains non-finite values: " + raw_path);
  return HsiCube(rows, cols, std::move(data));
}

LabelRaster convert_raw_labels(const std::string& raw_path, Eigen::Index rows, Eigen::Index cols,
                               const std::string& dtype) {
  if (rows < 1 || cols < 1) throw ConfigError("convert: dimensions must be >= 1");
  const std::size_t width = dtype_width(dtype);
  const std::string bytes = read_file(raw_path);
  const std::size_t need = static_cast<std::size_t>(rows * cols) * width;
  if (bytes.size() != need)
    throw IoError("raw labels are " + std::to_string(bytes.size()) + " bytes, expected " +
                  std::to_string(need) + ": " + raw_path);

  Labels2d labels(rows, cols);
  const auto* base = reinterpret_cast<const unsigned char*>(bytes.data());
  for (Eigen::Index i = 0; i < rows; ++i)
    for (Eigen::Index j = 0; j < cols; ++j) {
      const double v = raw_value(base + static_cast<std::size_t>(pixel_index(i, j, cols)) * width, dtype);
      if (v < 0 || v != std::floor(v) || v > 65535)
        throw IoError("raw label value " + std::to_string(v) + " is not a class id: " + raw_path);
      labels(i, j) = static_cast<int>(v);
    }
  return LabelRaster(std::move(labels));
}

}  // namespace hsi::io
