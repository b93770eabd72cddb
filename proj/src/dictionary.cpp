#include "csfact/dictionary.hpp"

#include <cmath>
#include <cstdio>
#include <cstring>
#include <fstream>
#include <sstream>

#include "csfact/matcore.hpp"
#include "csfact/rng.hpp"

namespace csfact {

namespace {

// CDF 9/7 taps in the sqrt(2)-DC-gain normalization, frozen from the exact
// construction (real root of 20 y^3 + 10 y^2 + 4 y + 1 assigned to the
// 7-tap factor). Biorthogonal to better than 1e-16.
constexpr std::array<double, 9> kAnalysisLow = {
    0.037828455506995461, -0.023849465019380002, -0.110624404418423409,
    0.377402855612653764, 0.852698679009403419,  0.377402855612653764,
    -0.110624404418423409, -0.023849465019380002, 0.037828455506995461};

constexpr std::array<double, 7> kSynthesisLow = {
    -0.064538882628938439, -0.040689417609558437, 0.418092273222212201,
    0.788485616405664398,  0.418092273222212201,  -0.040689417609558437,
    -0.064538882628938439};

constexpr int kAnalysisLowOffset = -4;   // taps cover [-4, 4]
constexpr int kSynthesisLowOffset = -3;  // taps cover [-3, 3]
// highpass filters via g~(n) = (-1)^(1-n) h(1-n), g(n) = (-1)^(1-n) h~(1-n)
constexpr int kAnalysisHighOffset = -2;   // taps cover [-2, 4]
constexpr int kSynthesisHighOffset = -3;  // taps cover [-3, 5]

int imod(int a, int n) {
  const int r = a % n;
  return r < 0 ? r + n : r;
}

}  // namespace

Cdf97Filters cdf97_filters() {
  Cdf97Filters f;
  f.analysis_lowpass = kAnalysisLow;
  f.synthesis_lowpass = kSynthesisLow;
  for (int n = -2; n <= 4; ++n)
    f.analysis_highpass[n - kAnalysisHighOffset] =
        ((1 - n) % 2 == 0 ? 1.0 : -1.0) * kSynthesisLow[(1 - n) - kSynthesisLowOffset];
  for (int n = -3; n <= 5; ++n)
    f.synthesis_highpass[n - kSynthesisHighOffset] =
        ((1 - n) % 2 == 0 ? 1.0 : -1.0) * kAnalysisLow[(1 - n) - kAnalysisLowOffset];
  return f;
}

void cdf97_analyze(const std::vector<double>& x, std::vector<double>& approx,
                   std::vector<double>& detail) {
  const int n = static_cast<int>(x.size());
  if (n < 2 || n % 2 != 0)
    throw ParameterError("cdf97_analyze: signal length must be even and >= 2");
  const Cdf97Filters f = cdf97_filters();
  approx.assign(n / 2, 0.0);
  detail.assign(n / 2, 0.0);
  for (int k = 0; k < n / 2; ++k) {
    double a = 0.0, d = 0.0;
    for (int i = 0; i < 9; ++i)
      a += f.analysis_lowpass[i] * x[imod(2 * k + kAnalysisLowOffset + i, n)];
    for (int i = 0; i < 7; ++i)
      d += f.analysis_highpass[i] * x[imod(2 * k + kAnalysisHighOffset + i, n)];
    approx[k] = a;
    detail[k] = d;
  }
}

std::vector<double> cdf97_synthesize(const std::vector<double>& approx,
                                     const std::vector<double>& detail) {
  if (approx.size() != detail.size())
    throw DimensionError("cdf97_synthesize: band length mismatch");
  const int half = static_cast<int>(approx.size());
  const int n = 2 * half;
  const Cdf97Filters f = cdf97_filters();
  std::vector<double> x(n, 0.0);
  for (int k = 0; k < half; ++k) {
    for (int i = 0; i < 7; ++i)
      x[imod(2 * k + kSynthesisLowOffset + i, n)] +=
          approx[k] * f.synthesis_lowpass[i];
    for (int i = 0; i < 9; ++i)
      x[imod(2 * k + kSynthesisHighOffset + i, n)] +=
          detail[k] * f.synthesis_highpass[i];
  }
  return x;
}

std::vector<double> cdf97_atom(int len, int level) {
  if (len < 2 || (len & (len - 1)) != 0)
    throw ParameterError("cdf97_atom: len must be a power of two");
  if (level < 1 || (1 << level) > len)
    throw ParameterError("cdf97_atom: need 2^level <= len");
  const Cdf97Filters f = cdf97_filters();

  // periodic convolution of `signal` with a filter dilated by `stride`
  auto conv = [&](const std::vector<double>& signal, const double* taps,
                  int ntaps, int offset, int stride) {
    std::vector<double> out(len, 0.0);
    for (int pos = 0; pos < len; ++pos) {
      if (signal[pos] == 0.0) continue;
      for (int i = 0; i < ntaps; ++i)
        out[imod(pos + stride * (offset + i), len)] += signal[pos] * taps[i];
    }
    return out;
  };

  std::vector<double> atom(len, 0.0);
  atom[0] = 1.0;
  for (int j = 0; j < level - 1; ++j)
    atom = conv(atom, f.synthesis_lowpass.data(), 7, kSynthesisLowOffset,
                1 << j);
  atom = conv(atom, f.synthesis_highpass.data(), 9, kSynthesisHighOffset,
              1 << (level - 1));

  double norm = 0.0;
  for (double v : atom) norm += v * v;
  norm = std::sqrt(norm);
  for (double& v : atom) v /= norm;
  return atom;
}

Matrix wavelet_dictionary(const WaveletSpec& spec) {
  const int l = spec.signal_len;
  const int n = spec.total_cols;
  if (l < 2 || (l & (l - 1)) != 0)
    throw ParameterError("wavelet_dictionary: signal_len must be a power of two");
  if (spec.levels < 1 || (1 << spec.levels) > l)
    throw ParameterError("wavelet_dictionary: need 2^levels <= signal_len");
  if (spec.levels * l > n)
    throw ParameterError("wavelet_dictionary: need levels * l <= total_cols");

  Matrix d(l, n);
  for (int j = 1; j <= spec.levels; ++j) {
    const std::vector<double> atom = cdf97_atom(l, j);
    for (int s = 0; s < l; ++s) {
      const int col = (j - 1) * l + s;
      for (int i = 0; i < l; ++i) d(i, col) = atom[imod(i - s, l)];
    }
  }
  Rng rng(spec.seed);
  for (int col = spec.levels * l; col < n; ++col)
    for (int i = 0; i < l; ++i) d(i, col) = rng.next_normal();

  // wavelet columns are circular shifts of already unit-norm atoms; only the
  // random tail needs normalizing (renormalizing shifts would break the exact
  // shift structure through different summation orders)
  for (int col = spec.levels * l; col < n; ++col) {
    const double norm = d.col(col).norm();
    if (norm == 0.0)
      throw NumericalError("wavelet_dictionary: zero column " +
                           std::to_string(col));
    d.col(col) /= norm;
  }
  return d;
}

FrameDiagnostics frame_diagnostics(const Matrix& d) {
  FrameDiagnostics out;
  const int l = static_cast<int>(d.rows());
  Matrix gram = d * d.transpose();
  const double cstar = gram.trace() / l;
  out.tight_frame_err =
      cstar > 0 ? max_abs(gram / cstar - Matrix::Identity(l, l)) : 0.0;
  out.column_norm_max_dev = 0.0;
  for (Eigen::Index j = 0; j < d.cols(); ++j)
    out.column_norm_max_dev =
        std::max(out.column_norm_max_dev, std::abs(d.col(j).norm() - 1.0));
  out.rank = rank(d, default_rank_tol(static_cast<int>(d.rows()),
                                      static_cast<int>(d.cols())));
  return out;
}

// ---------------------------------------------------------------------------
// CSMX container: "CSMX", u32 version, u64 rows, u64 cols, row-major f64,
// everything little-endian, no padding, no trailer.

namespace {

constexpr char kMagic[4] = {'C', 'S', 'M', 'X'};
constexpr std::uint32_t kVersion = 1;
constexpr std::uint64_t kMaxElements = 1ULL << 32;

void put_u32(std::string& buf, std::uint32_t v) {
  for (int i = 0; i < 4; ++i) buf.push_back(static_cast<char>((v >> (8 * i)) & 0xff));
}

void put_u64(std::string& buf, std::uint64_t v) {
  for (int i = 0; i < 8; ++i) buf.push_back(static_cast<char>((v >> (8 * i)) & 0xff));
}

std::uint64_t get_u64(const unsigned char* p, int nbytes) {
  std::uint64_t v = 0;
  for (int i = 0; i < nbytes; ++i) v |= static_cast<std::uint64_t>(p[i]) << (8 * i);
  return v;
}

void atomic_write(const std::string& path, const std::string& bytes) {
  const std::string tmp = path + ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw IoError("cannot open " + tmp + " for writing");
    out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
    if (!out) throw IoError("write failed on " + tmp);
  }
  if (std::rename(tmp.c_str(), path.c_str()) != 0)
    throw IoError("rename " + tmp + " -> " + path + " failed");
}

}  // namespace

void write_matrix(const std::string& path, const Matrix& m) {
  std::string buf;
  buf.reserve(24 + 8 * static_cast<std::size_t>(m.size()));
  buf.append(kMagic, 4);
  put_u32(buf, kVersion);
  put_u64(buf, static_cast<std::uint64_t>(m.rows()));
  put_u64(buf, static_cast<std::uint64_t>(m.cols()));
  static_assert(sizeof(double) == 8);
  // row-major storage, doubles written verbatim (IEEE-754 little-endian)
  buf.append(reinterpret_cast<const char*>(m.data()),
             8 * static_cast<std::size_t>(m.size()));
  atomic_write(path, buf);
}

Matrix read_matrix(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open " + path);
  std::string bytes((std::istreambuf_iterator<char>(in)),
                    std::istreambuf_iterator<char>());
  const auto* p = reinterpret_cast<const unsigned char*>(bytes.data());
  if (bytes.size() < 24)
    throw FormatError(path + ": truncated header (offset " +
                      std::to_string(bytes.size()) + ")");
  if (std::memcmp(p, kMagic, 4) != 0)
    throw FormatError(path + ": bad magic at offset 0");
  const std::uint64_t version = get_u64(p + 4, 4);
  if (version != kVersion)
    throw FormatError(path + ": unsupported version " + std::to_string(version) +
                      " at offset 4");
  const std::uint64_t rows = get_u64(p + 8, 8);
  const std::uint64_t cols = get_u64(p + 16, 8);
  if (rows == 0 || cols == 0 || rows * cols > kMaxElements)
    throw FormatError(path + ": dimension overflow at offset 8");
  const std::size_t expected = 24 + 8 * static_cast<std::size_t>(rows * cols);
  if (bytes.size() != expected)
    throw FormatError(path + ": size mismatch, expected " +
                      std::to_string(expected) + " bytes, got " +
                      std::to_string(bytes.size()) + " (offset 24)");
  Matrix m(static_cast<Eigen::Index>(rows), static_cast<Eigen::Index>(cols));
  std::memcpy(m.data(), p + 24, 8 * static_cast<std::size_t>(rows * cols));
  return m;
}

void write_matrix_csv(const std::string& path, const Matrix& m) {
  std::string buf;
  char num[64];
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    for (Eigen::Index j = 0; j < m.cols(); ++j) {
      std::snprintf(num, sizeof(num), "%.17g", m(i, j));
      if (j) buf.push_back(',');
      buf.append(num);
    }
    buf.push_back('\n');
  }
  atomic_write(path, buf);
}

Matrix read_matrix_csv(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open " + path);
  std::vector<std::vector<double>> rows;
  std::string line;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    std::vector<double> row;
    std::stringstream ss(line);
    std::string cell;
    while (std::getline(ss, cell, ',')) {
      char* end = nullptr;
      const double v = std::strtod(cell.c_str(), &end);
      if (end == cell.c_str())
        throw FormatError(path + ": unparsable cell '" + cell + "' in row " +
                          std::to_string(rows.size()));
      row.push_back(v);
    }
    if (!rows.empty() && row.size() != rows.front().size())
      throw FormatError(path + ": ragged row " + std::to_string(rows.size()));
    rows.push_back(std::move(row));
  }
  if (rows.empty()) throw FormatError(path + ": empty CSV");
  Matrix m(static_cast<Eigen::Index>(rows.size()),
           static_cast<Eigen::Index>(rows.front().size()));
  for (Eigen::Index i = 0; i < m.rows(); ++i)
    for (Eigen::Index j = 0; j < m.cols(); ++j)
      m(i, j) = rows[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)];
  return m;
}

}  // namespace csfact
