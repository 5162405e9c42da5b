#ifndef SPIX_SCATTERING_HPP
#define SPIX_SCATTERING_HPP

#include <cmath>
#include <numbers>
#include <vector>

#include "spix/error.hpp"
#include "spix/image.hpp"
#include "spix/threading.hpp"

namespace spix {

/// Square kernel in the spatial domain; `im` is empty for real kernels.
struct Kernel {
  int radius = 0;
  std::vector<double> re;
  std::vector<double> im;

  int side() const { return 2 * radius + 1; }
  double re_at(int dx, int dy) const { return re[(dy + radius) * side() + (dx + radius)]; }
  double im_at(int dx, int dy) const { return im[(dy + radius) * side() + (dx + radius)]; }
};

struct BandPassFilter {
  int scale = 0;        // j: dilation 2^j
  int orientation = 0;  // l: angle pi*l/L
  Kernel kernel;
};

/// Morlet band-pass filters at J scales and L orientations plus one Gaussian
/// low-pass, all DC-corrected and L1-normalized by their envelope.
struct FilterBank {
  int J = 0;
  int L = 0;
  std::vector<BandPassFilter> psi;  // scale-major: psi[j*L + l]
  Kernel phi;
  std::vector<double> phi_profile;  // separable 1-D factor of phi, sums to 1
};

/// Which cascade path produced an output map.
struct MapInfo {
  int order = 0;  // 0, 1 or 2
  int j1 = -1, l1 = -1;
  int j2 = -1, l2 = -1;
};

inline int scattering_map_count(int J, int L) {
  return 1 + J * L + L * L * J * (J - 1) / 2;
}

inline std::vector<MapInfo> scattering_map_layout(int J, int L) {
  std::vector<MapInfo> out;
  out.push_back({0, -1, -1, -1, -1});
  for (int j = 0; j < J; ++j)
    for (int l = 0; l < L; ++l) out.push_back({1, j, l, -1, -1});
  for (int j1 = 0; j1 < J; ++j1)
    for (int l1 = 0; l1 < L; ++l1)
      for (int j2 = j1 + 1; j2 < J; ++j2)
        for (int l2 = 0; l2 < L; ++l2) out.push_back({2, j1, l1, j2, l2});
  return out;
}

namespace detail {

inline Kernel make_morlet(int j, double theta) {
  const double sigma = 0.8 * std::pow(2.0, j);
  const double xi = (3.0 * std::numbers::pi / 4.0) / std::pow(2.0, j);
  const int radius = static_cast<int>(std::ceil(4.0 * sigma));
  const int side = 2 * radius + 1;
  const double ux = xi * std::cos(theta);
  const double uy = xi * std::sin(theta);

  std::vector<double> env(static_cast<std::size_t>(side) * side);
  double env_sum = 0.0, wave_re = 0.0, wave_im = 0.0;
  for (int dy = -radius; dy <= radius; ++dy) {
    for (int dx = -radius; dx <= radius; ++dx) {
      const double g = std::exp(-(dx * dx + dy * dy) / (2.0 * sigma * sigma));
      env[(dy + radius) * side + (dx + radius)] = g;
      env_sum += g;
      const double phase = ux * dx + uy * dy;
      wave_re += g * std::cos(phase);
      wave_im += g * std::sin(phase);
    }
  }
  // kappa removes the DC component of the oscillation under the envelope
  const double kre = wave_re / env_sum;
  const double kim = wave_im / env_sum;

  Kernel k;
  k.radius = radius;
  k.re.resize(env.size());
  k.im.resize(env.size());
  for (int dy = -radius; dy <= radius; ++dy) {
    for (int dx = -radius; dx <= radius; ++dx) {
      const std::size_t i = (dy + radius) * side + (dx + radius);
      const double phase = ux * dx + uy * dy;
      k.re[i] = env[i] * (std::cos(phase) - kre) / env_sum;
      k.im[i] = env[i] * (std::sin(phase) - kim) / env_sum;
    }
  }
  return k;
}

inline Kernel make_gaussian(double sigma) {
  const int radius = static_cast<int>(std::ceil(4.0 * sigma));
  const int side = 2 * radius + 1;
  Kernel k;
  k.radius = radius;
  k.re.resize(static_cast<std::size_t>(side) * side);
  double sum = 0.0;
  for (int dy = -radius; dy <= radius; ++dy)
    for (int dx = -radius; dx <= radius; ++dx) {
      const double g = std::exp(-(dx * dx + dy * dy) / (2.0 * sigma * sigma));
      k.re[(dy + radius) * side + (dx + radius)] = g;
      sum += g;
    }
  for (double& v : k.re) v /= sum;
  return k;
}

// symmetric reflection with edge repeat: -1 -> 0, n -> n-1
inline int reflect_index(int i, int n) {
  while (i < 0 || i >= n) {
    if (i < 0) i = -i - 1;
    if (i >= n) i = 2 * n - i - 1;
  }
  return i;
}

template <bool Modulus>
inline void conv2(const std::vector<double>& in, int w, int h, const Kernel& k,
                  std::vector<double>& out) {
  const int r = k.radius;
  const int side = k.side();
  out.resize(in.size());
  for (int y = 0; y < h; ++y) {
    const bool y_interior = y >= r && y + r < h;
    for (int x = 0; x < w; ++x) {
      double acc_re = 0.0, acc_im = 0.0;
      if (y_interior && x >= r && x + r < w) {
        for (int dy = -r; dy <= r; ++dy) {
          const double* row = &in[static_cast<std::size_t>(y + dy) * w + (x - r)];
          const double* kre = &k.re[static_cast<std::size_t>(dy + r) * side];
          if constexpr (Modulus) {
            const double* kim = &k.im[static_cast<std::size_t>(dy + r) * side];
            for (int i = 0; i < side; ++i) {
              acc_re += row[i] * kre[i];
              acc_im += row[i] * kim[i];
            }
          } else {
            for (int i = 0; i < side; ++i) acc_re += row[i] * kre[i];
          }
        }
      } else {
        for (int dy = -r; dy <= r; ++dy) {
          const int sy = reflect_index(y + dy, h);
          for (int dx = -r; dx <= r; ++dx) {
            const int sx = reflect_index(x + dx, w);
            const double v = in[static_cast<std::size_t>(sy) * w + sx];
            acc_re += v * k.re_at(dx, dy);
            if constexpr (Modulus) acc_im += v * k.im_at(dx, dy);
          }
        }
      }
      out[static_cast<std::size_t>(y) * w + x] =
          Modulus ? std::hypot(acc_re, acc_im) : acc_re;
    }
  }
}

// separable Gaussian low-pass using the 1-D profile
inline void conv_lowpass(const std::vector<double>& in, int w, int h,
                         const std::vector<double>& profile, std::vector<double>& out,
                         std::vector<double>& tmp) {
  const int r = static_cast<int>(profile.size() / 2);
  tmp.resize(in.size());
  out.resize(in.size());
  for (int y = 0; y < h; ++y) {
    const double* row = &in[static_cast<std::size_t>(y) * w];
    for (int x = 0; x < w; ++x) {
      double acc = 0.0;
      if (x >= r && x + r < w) {
        for (int d = -r; d <= r; ++d) acc += row[x + d] * profile[d + r];
      } else {
        for (int d = -r; d <= r; ++d) acc += row[reflect_index(x + d, w)] * profile[d + r];
      }
      tmp[static_cast<std::size_t>(y) * w + x] = acc;
    }
  }
  for (int y = 0; y < h; ++y) {
    for (int x = 0; x < w; ++x) {
      double acc = 0.0;
      if (y >= r && y + r < h) {
        for (int d = -r; d <= r; ++d)
          acc += tmp[static_cast<std::size_t>(y + d) * w + x] * profile[d + r];
      } else {
        for (int d = -r; d <= r; ++d)
          acc += tmp[static_cast<std::size_t>(reflect_index(y + d, h)) * w + x] * profile[d + r];
      }
      out[static_cast<std::size_t>(y) * w + x] = acc;
    }
  }
}

// non-overlapping mean pooling with window `win`
inline void pool_mean(const std::vector<double>& in, int w, int h, int win, float* dst) {
  const int ow = w / win, oh = h / win;
  const double inv = 1.0 / (win * win);
  for (int oy = 0; oy < oh; ++oy)
    for (int ox = 0; ox < ow; ++ox) {
      double acc = 0.0;
      for (int dy = 0; dy < win; ++dy)
        for (int dx = 0; dx < win; ++dx)
          acc += in[static_cast<std::size_t>(oy * win + dy) * w + (ox * win + dx)];
      dst[static_cast<std::size_t>(oy) * ow + ox] = static_cast<float>(acc * inv);
    }
}

}  // namespace detail

/// Morlet filters at scales 2^j (j < J) and L orientations, Gaussian low-pass
/// at scale 2^J.
inline FilterBank build_scattering_filters(int J = 2, int L = 8) {
  require(J >= 1 && L >= 1, errc::bad_dims, "filter bank needs J >= 1 and L >= 1");
  FilterBank bank;
  bank.J = J;
  bank.L = L;
  for (int j = 0; j < J; ++j)
    for (int l = 0; l < L; ++l)
      bank.psi.push_back({j, l, detail::make_morlet(j, std::numbers::pi * l / L)});

  const double sigma_phi = 0.8 * std::pow(2.0, J);
  bank.phi = detail::make_gaussian(sigma_phi);
  const int r = bank.phi.radius;
  bank.phi_profile.resize(2 * r + 1);
  double sum = 0.0;
  for (int d = -r; d <= r; ++d) {
    bank.phi_profile[d + r] = std::exp(-(d * d) / (2.0 * sigma_phi * sigma_phi));
    sum += bank.phi_profile[d + r];
  }
  for (double& v : bank.phi_profile) v /= sum;
  return bank;
}

/// All maps selected; override via config to drop individual maps.
inline std::vector<bool> default_channel_mask(const FilterBank& bank) {
  return std::vector<bool>(scattering_map_count(bank.J, bank.L), true);
}

/// Wavelet-modulus cascade over one channel: order 0 is the low-passed input,
/// order 1 the low-passed moduli |x*psi|, order 2 repeats the modulus step for
/// scale pairs j2 > j1. Every map ends with the low-pass and a 2^J mean-pool.
inline FeatureTensor scattering_transform(const float* channel, int width, int height,
                                          const FilterBank& bank, int threads = 1) {
  const int win = 1 << bank.J;
  require(width % win == 0 && height % win == 0, errc::indivisible_dims,
          "image dims must be divisible by 2^J = " + std::to_string(win));

  const int J = bank.J, L = bank.L;
  FeatureTensor out;
  out.width = width / win;
  out.height = height / win;
  out.maps = scattering_map_count(J, L);
  out.data.resize(out.plane_size() * out.maps);

  const std::size_t n = static_cast<std::size_t>(width) * height;
  std::vector<double> x(n);
  for (std::size_t i = 0; i < n; ++i) x[i] = channel[i];

  {
    std::vector<double> s0, tmp;
    detail::conv_lowpass(x, width, height, bank.phi_profile, s0, tmp);
    detail::pool_mean(s0, width, height, win, out.plane(0));
  }

  // first index of the order-2 block for branch (j1, l1)
  auto order2_base = [&](int j1, int l1) {
    int base = 1 + J * L;
    for (int j = 0; j < j1; ++j) base += L * (J - 1 - j) * L;
    return base + l1 * (J - 1 - j1) * L;
  };

  // each order-1 branch owns its own output planes, so branches can run in
  // parallel without coordination
  parallel_blocks(static_cast<std::int64_t>(J) * L, 1, threads,
                  [&](std::int64_t b, std::int64_t, std::int64_t) {
    const int j1 = static_cast<int>(b) / L;
    const int l1 = static_cast<int>(b) % L;
    std::vector<double> u1, u2, low, tmp;
    detail::conv2<true>(x, width, height, bank.psi[b].kernel, u1);
    detail::conv_lowpass(u1, width, height, bank.phi_profile, low, tmp);
    detail::pool_mean(low, width, height, win, out.plane(1 + static_cast<int>(b)));
    for (int j2 = j1 + 1; j2 < J; ++j2) {
      for (int l2 = 0; l2 < L; ++l2) {
        detail::conv2<true>(u1, width, height, bank.psi[j2 * L + l2].kernel, u2);
        detail::conv_lowpass(u2, width, height, bank.phi_profile, low, tmp);
        const int idx = order2_base(j1, l1) + (j2 - j1 - 1) * L + l2;
        detail::pool_mean(low, width, height, win, out.plane(idx));
      }
    }
  });
  return out;
}

inline FeatureTensor scattering_transform(const MultiChannelImage& img, int channel,
                                          const FilterBank& bank, int threads = 1) {
  require(channel >= 0 && channel < img.channels(), errc::out_of_bounds,
          "channel index out of range");
  return scattering_transform(img.plane(channel), img.width, img.height, bank, threads);
}

}  // namespace spix

#endif  // SPIX_SCATTERING_HPP
