#ifndef CSFACT_DICTIONARY_HPP
#define CSFACT_DICTIONARY_HPP

#include <array>
#include <cstdint>
#include <string>
#include <vector>

#include "csfact/matrix.hpp"

namespace csfact {

struct WaveletSpec {
  int signal_len = 128;   // l, power of two
  int total_cols = 1024;  // n >= levels * l
  int levels = 5;
  std::uint64_t seed = 0;  // for the random tail columns
};

struct FrameDiagnostics {
  double tight_frame_err = 0.0;      // ||D D^T / c* - I||_max, c* = trace/l
  double column_norm_max_dev = 0.0;  // max | ||col||_2 - 1 |
  int rank = 0;
};

// Cohen-Daubechies-Feauveau 9/7 biorthogonal filter bank. Taps are centered:
// analysis lowpass covers offsets [-4, 4], analysis highpass [-2, 4],
// synthesis lowpass [-3, 3], synthesis highpass [-3, 5].
struct Cdf97Filters {
  std::array<double, 9> analysis_lowpass;
  std::array<double, 7> analysis_highpass;
  std::array<double, 7> synthesis_lowpass;
  std::array<double, 9> synthesis_highpass;
};

Cdf97Filters cdf97_filters();

// One analysis level on a periodic even-length signal: approximation and
// detail, each of half length.
void cdf97_analyze(const std::vector<double>& x, std::vector<double>& approx,
                   std::vector<double>& detail);

// Inverse of cdf97_analyze.
std::vector<double> cdf97_synthesize(const std::vector<double>& approx,
                                     const std::vector<double>& detail);

// Periodic synthesis wavelet atom of the given level on a length-len domain
// (a trous cascade of upsampled synthesis filters), unit normalized.
std::vector<double> cdf97_atom(int len, int level);

// l x n dictionary: levels * l circular-shift wavelet columns followed by
// Gaussian tail columns, all normalized to unit column norm.
Matrix wavelet_dictionary(const WaveletSpec& spec);

FrameDiagnostics frame_diagnostics(const Matrix& d);

// CSMX binary container (bit-exact round trip) and CSV interchange.
void write_matrix(const std::string& path, const Matrix& m);
Matrix read_matrix(const std::string& path);
void write_matrix_csv(const std::string& path, const Matrix& m);
Matrix read_matrix_csv(const std::string& path);

}  // namespace csfact

#endif
