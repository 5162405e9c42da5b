#ifndef SPIX_DATASET_HPP
#define SPIX_DATASET_HPP

#include <cstdint>
#include <fstream>
#include <string>
#include <vector>

#include "spix/error.hpp"
#include "spix/mat.hpp"
#include "spix/tensor_io.hpp"

namespace spix {

/// Target value marking a sample the label pipeline refused to label.
inline constexpr std::uint32_t kDroppedSample = 0xffffffffu;

/// Flattened classifier samples: each row is
/// [pixel features (M)] [normalized spatial distances (Q)] [feature diffs (Q*M)].
struct SampleSet {
  int M = 0;
  int Q = 0;
  Mat<float> inputs;
  std::vector<std::uint32_t> targets;

  int row_width() const { return M + Q + Q * M; }
  int size() const { return inputs.rows; }
};

/// SPDS: "SPDS", u32 version, N, M, Q, then per sample the input row as
/// float32 LE plus a u32 target.
inline void write_sample_set(const std::string& path, const SampleSet& s) {
  std::ofstream out(path, std::ios::binary);
  require(out.good(), errc::io_error, "cannot open " + path + " for writing");
  out.write("SPDS", 4);
  detail::write_u32(out, 1);
  detail::write_u32(out, static_cast<std::uint32_t>(s.size()));
  detail::write_u32(out, static_cast<std::uint32_t>(s.M));
  detail::write_u32(out, static_cast<std::uint32_t>(s.Q));
  for (int r = 0; r < s.size(); ++r) {
    out.write(reinterpret_cast<const char*>(s.inputs.row(r)),
              static_cast<std::streamsize>(s.row_width()) * 4);
    detail::write_u32(out, s.targets[r]);
  }
  require(out.good(), errc::io_error, "write failed for " + path);
}

inline SampleSet read_sample_set(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  require(in.good(), errc::io_error, "cannot open " + path);
  detail::check_magic(in, "SPDS", path);
  const auto version = detail::read_u32(in, path);
  if (version != 1) fail(errc::version_mismatch, path + ": SPDS version " + std::to_string(version));
  const auto n = detail::read_u32(in, path);
  SampleSet s;
  s.M = static_cast<int>(detail::read_u32(in, path));
  s.Q = static_cast<int>(detail::read_u32(in, path));
  s.inputs = Mat<float>(static_cast<int>(n), s.row_width());
  s.targets.resize(n);
  for (std::uint32_t r = 0; r < n; ++r) {
    detail::read_exact(in, s.inputs.row(static_cast<int>(r)),
                       static_cast<std::size_t>(s.row_width()) * 4, path);
    s.targets[r] = detail::read_u32(in, path);
  }
  return s;
}

}  // namespace spix

#endif  // SPIX_DATASET_HPP
