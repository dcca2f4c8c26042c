#include <array>
#include <cmath>
#include <vector>

#include "salrate/error.hpp"
#include "salrate/metrics.hpp"

namespace salrate {

namespace {

constexpr int kWindow = 11;
constexpr int kRadius = kWindow / 2;
constexpr double kWindowSigma = 1.5;
constexpr double kC1 = (0.01 * 255.0) * (0.01 * 255.0);
constexpr double kC2 = (0.03 * 255.0) * (0.03 * 255.0);

std::array<double, kWindow> gaussian_window() {
  std::array<double, kWindow> w{};
  double sum = 0.0;
  for (int i = 0; i < kWindow; ++i) {
    const double d = i - kRadius;
    w[static_cast<size_t>(i)] = std::exp(-d * d / (2.0 * kWindowSigma * kWindowSigma));
    sum += w[static_cast<size_t>(i)];
  }
  for (double& v : w) v /= sum;
  return w;
}

// Symmetric padding including the edge sample: ... 1 0 | 0 1 2 ... n-1 | n-1 n-2 ...
inline int reflect(int i, int n) {
  if (i < 0) return -1 - i;
  if (i >= n) return 2 * n - 1 - i;
  return i;
}

// Separable Gaussian blur with symmetric edges, fixed summation order.
void blur(const std::vector<double>& src, std::vector<double>& dst,
          std::vector<double>& scratch, int width, int height,
          const std::array<double, kWindow>& w) {
  scratch.resize(src.size());
  dst.resize(src.size());
  for (int y = 0; y < height; ++y) {
    const double* row = &src[static_cast<size_t>(y) * width];
    for (int x = 0; x < width; ++x) {
      double acc = 0.0;
      for (int k = 0; k < kWindow; ++k) {
        acc += w[static_cast<size_t>(k)] * row[reflect(x + k - kRadius, width)];
      }
      scratch[static_cast<size_t>(y) * width + x] = acc;
    }
  }
  for (int y = 0; y < height; ++y) {
    for (int x = 0; x < width; ++x) {
      double acc = 0.0;
      for (int k = 0; k < kWindow; ++k) {
        acc += w[static_cast<size_t>(k)] *
               scratch[static_cast<size_t>(reflect(y + k - kRadius, height)) * width + x];
      }
      dst[static_cast<size_t>(y) * width + x] = acc;
    }
  }
}

}  // namespace

double SsimMap::mean() const {
  double sum = 0.0;
  for (double v : values) sum += v;
  return values.empty() ? 0.0 : sum / static_cast<double>(values.size());
}

SsimMap ssim_map(const std::vector<uint8_t>& a, const std::vector<uint8_t>& b,
                 int width, int height) {
  if (width <= 0 || height <= 0) {
    fail(ErrorCode::DIMENSION_MISMATCH, "ssim dimensions must be positive");
  }
  const size_t count = static_cast<size_t>(width) * height;
  if (a.size() != count || b.size() != count) {
    fail(ErrorCode::DIMENSION_MISMATCH, "planes do not match the stated dimensions");
  }

  static const std::array<double, kWindow> window = gaussian_window();

  std::vector<double> fa(count);
  std::vector<double> fb(count);
  std::vector<double> faa(count);
  std::vector<double> fbb(count);
  std::vector<double> fab(count);
  for (size_t i = 0; i < count; ++i) {
    const double va = a[i];
    const double vb = b[i];
    fa[i] = va;
    fb[i] = vb;
    faa[i] = va * va;
    fbb[i] = vb * vb;
    fab[i] = va * vb;
  }

  std::vector<double> mu_a;
  std::vector<double> mu_b;
  std::vector<double> m_aa;
  std::vector<double> m_bb;
  std::vector<double> m_ab;
  std::vector<double> scratch;
  blur(fa, mu_a, scratch, width, height, window);
  blur(fb, mu_b, scratch, width, height, window);
  blur(faa, m_aa, scratch, width, height, window);
  blur(fbb, m_bb, scratch, width, height, window);
  blur(fab, m_ab, scratch, width, height, window);

  SsimMap out;
  out.width = width;
  out.height = height;
  out.values.resize(count);
  for (size_t i = 0; i < count; ++i) {
    const double ma = mu_a[i];
    const double mb = mu_b[i];
    const double va = m_aa[i] - ma * ma;
    const double vb = m_bb[i] - mb * mb;
    const double cov = m_ab[i] - ma * mb;
    out.values[i] = ((2.0 * ma * mb + kC1) * (2.0 * cov + kC2)) /
                    ((ma * ma + mb * mb + kC1) * (va + vb + kC2));
  }
  return out;
}

}  // namespace salrate
