#pragma once

#include <complex>
#include <span>
#include <vector>

#include "rotorvib/matrix.hpp"

namespace rotorvib {

/// Periodic Hann window, w[m] = 0.5 * (1 - cos(2*pi*m/L)), m = 0..L-1.
std::vector<double> hann_window(int length);

/// In-place radix-2 FFT, X[k] = sum_m x[m] * exp(-2*pi*i*k*m/N).
/// Length must be a power of two.
void fft_inplace(std::vector<std::complex<double>>& x);
void ifft_inplace(std::vector<std::complex<double>>& x);

std::vector<std::complex<double>> fft(std::vector<std::complex<double>> x);

struct StftConfig {
  int window_length = 1024;
  int fft_size = 1024;
  int hop = 512;

  void validate() const;
};

/// Magnitude short-time Fourier transform. Frames are rows, bins columns
/// (bin k covers k * bin_hz, k = 0..fft_size/2).
struct Spectrogram {
  Matrix magnitudes;  // frames x (fft_size/2 + 1)
  double bin_hz = 0.0;
  double frame_seconds = 0.0;

  int frames() const { return magnitudes.rows; }
  int bins() const { return magnitudes.cols; }
};

/// Hann-windowed, hopped magnitude STFT. Windowed frames shorter than
/// fft_size are zero-padded before the transform.
Spectrogram stft(std::span<const float> x, const StftConfig& cfg,
                 double sample_rate);

double mel_from_hz(double f);
double hz_from_mel(double mel);

struct MelConfig {
  int n_filters = 26;
  double f_min = 0.0;
  double f_max = 32768.0;

  void validate(double sample_rate) const;
};

/// Triangular mel filterbank, one filter per row over fft_size/2+1 bins.
/// Centers sit on a uniform mel grid between f_min and f_max; each row is
/// normalized so its discrete maximum is exactly 1.
Matrix mel_filterbank(const MelConfig& cfg, int fft_size, double sample_rate);

/// Center frequencies (Hz) of the filters built by mel_filterbank.
std::vector<double> mel_filter_centers_hz(const MelConfig& cfg);

/// Cepstral coefficients 2..13 (1-based) of the log mel energies.
struct MfccMatrix {
  Matrix coefficients;  // 12 x frames

  int frames() const { return coefficients.cols; }
};

inline constexpr int kMfccKeptCoeffs = 12;
inline constexpr double kLogEnergyFloor = 1e-10;

/// Power periodogram -> filterbank energies -> log -> orthonormal DCT-II,
/// keeping coefficients 2..13.
MfccMatrix mfcc(std::span<const float> x, const StftConfig& stft_cfg,
                const MelConfig& mel_cfg, double sample_rate);

}  // namespace rotorvib
