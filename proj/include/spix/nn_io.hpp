#ifndef SPIX_NN_IO_HPP
#define SPIX_NN_IO_HPP

#include <fstream>
#include <optional>
#include <string>
#include <vector>

#include "spix/error.hpp"
#include "spix/nn.hpp"
#include "spix/tensor_io.hpp"

namespace spix {

inline constexpr std::uint32_t kSpnnVersion = 1;

/// A loaded network of either kind.
struct AnyNetwork {
  NetworkSpec spec;
  std::optional<ClassifierNet<float>> classifier;
  std::optional<RegressionNet<float>> regression;

  Mat<float> logits(const Mat<float>& x) {
    return classifier ? classifier->logits(x) : regression->logits(x);
  }
};

namespace detail {

inline void write_array(std::ostream& out, const std::vector<float>& a) {
  write_u32(out, static_cast<std::uint32_t>(a.size()));
  out.write(reinterpret_cast<const char*>(a.data()), static_cast<std::streamsize>(a.size() * 4));
}

inline void read_array(std::istream& in, std::vector<float>& a, const std::string& path) {
  const auto n = read_u32(in, path);
  if (n != a.size()) fail(errc::spec_mismatch, path + ": stored array size differs from the spec");
  read_exact(in, a.data(), a.size() * 4, path);
}

template <class Net>
void write_net_state(std::ostream& out, Net& net) {
  for (Param<float>* p : net.params()) {
    write_array(out, p->w);
    write_array(out, p->m);
    write_array(out, p->v);
  }
  for (std::vector<float>* a : net.extra_state()) write_array(out, *a);
}

template <class Net>
void read_net_state(std::istream& in, Net& net, const std::string& path) {
  for (Param<float>* p : net.params()) {
    read_array(in, p->w, path);
    read_array(in, p->m, path);
    read_array(in, p->v, path);
  }
  for (std::vector<float>* a : net.extra_state()) read_array(in, *a, path);
}

}  // namespace detail

/// SPNN: "SPNN", u32 version, kind, M, Q, depth, adam step, then the weight,
/// moment and running-stat arrays as length-prefixed float32 LE buffers in
/// declaration order. Round-trips are bit-exact.
inline void save_network(const std::string& path, AnyNetwork& net) {
  std::ofstream out(path, std::ios::binary);
  require(out.good(), errc::io_error, "cannot open " + path + " for writing");
  out.write("SPNN", 4);
  detail::write_u32(out, kSpnnVersion);
  detail::write_u32(out, static_cast<std::uint32_t>(net.spec.kind));
  detail::write_u32(out, static_cast<std::uint32_t>(net.spec.M));
  detail::write_u32(out, static_cast<std::uint32_t>(net.spec.Q));
  detail::write_u32(out, static_cast<std::uint32_t>(net.spec.depth));
  const long step = net.classifier ? net.classifier->adam_step : net.regression->adam_step;
  detail::write_u32(out, static_cast<std::uint32_t>(step));
  if (net.classifier) detail::write_net_state(out, *net.classifier);
  else detail::write_net_state(out, *net.regression);
  require(out.good(), errc::io_error, "write failed for " + path);
}

inline AnyNetwork load_network(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  require(in.good(), errc::io_error, "cannot open " + path);
  detail::check_magic(in, "SPNN", path);
  const auto version = detail::read_u32(in, path);
  if (version != kSpnnVersion)
    fail(errc::version_mismatch, path + ": SPNN version " + std::to_string(version));

  const auto kind = static_cast<NetworkKind>(detail::read_u32(in, path));
  const int m = static_cast<int>(detail::read_u32(in, path));
  const int q = static_cast<int>(detail::read_u32(in, path));
  const int depth = static_cast<int>(detail::read_u32(in, path));
  const long step = static_cast<long>(detail::read_u32(in, path));

  AnyNetwork net;
  if (kind == NetworkKind::classification) {
    net.spec = build_classifier(m, q);
    net.classifier = ClassifierNet<float>::create(net.spec, 0);
    detail::read_net_state(in, *net.classifier, path);
    net.classifier->adam_step = step;
  } else if (kind == NetworkKind::regression_distance) {
    net.spec = build_regression(m, q, depth);
    net.regression = RegressionNet<float>::create(net.spec, 0);
    detail::read_net_state(in, *net.regression, path);
    net.regression->adam_step = step;
  } else {
    fail(errc::malformed_header, path + ": unknown network kind");
  }
  return net;
}

/// Load and insist on the input geometry the caller is about to feed.
inline AnyNetwork load_network_expect(const std::string& path, int M, int Q) {
  AnyNetwork net = load_network(path);
  if (net.spec.M != M || net.spec.Q != Q)
    fail(errc::spec_mismatch, path + ": network expects M=" + std::to_string(net.spec.M) +
                                  " Q=" + std::to_string(net.spec.Q) + ", caller has M=" +
                                  std::to_string(M) + " Q=" + std::to_string(Q));
  return net;
}

}  // namespace spix

#endif  // SPIX_NN_IO_HPP
