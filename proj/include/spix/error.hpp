#ifndef SPIX_ERROR_HPP
#define SPIX_ERROR_HPP

#include <stdexcept>
#include <string>

namespace spix {

enum class errc {
  malformed_header,
  unsupported_depth,
  truncated_data,
  wrong_channel_count,
  downscale,
  shape_mismatch,
  bad_magic,
  version_mismatch,
  label_overflow,
  indivisible_dims,
  step_too_large,
  length_mismatch,
  bad_dims,
  bad_depth,
  empty_dataset,
  non_finite_loss,
  spec_mismatch,
  dim_mismatch,
  empty_list,
  out_of_bounds,
  count_mismatch,
  io_error,
  bad_config,
};

inline const char* errc_name(errc c) {
  switch (c) {
    case errc::malformed_header: return "MalformedHeader";
    case errc::unsupported_depth: return "UnsupportedDepth";
    case errc::truncated_data: return "TruncatedData";
    case errc::wrong_channel_count: return "WrongChannelCount";
    case errc::downscale: return "Downscale";
    case errc::shape_mismatch: return "ShapeMismatch";
    case errc::bad_magic: return "BadMagic";
    case errc::version_mismatch: return "VersionMismatch";
    case errc::label_overflow: return "LabelOverflow";
    case errc::indivisible_dims: return "IndivisibleDims";
    case errc::step_too_large: return "StepTooLarge";
    case errc::length_mismatch: return "LengthMismatch";
    case errc::bad_dims: return "BadDims";
    case errc::bad_depth: return "BadDepth";
    case errc::empty_dataset: return "EmptyDataset";
    case errc::non_finite_loss: return "NonFiniteLoss";
    case errc::spec_mismatch: return "SpecMismatch";
    case errc::dim_mismatch: return "DimMismatch";
    case errc::empty_list: return "EmptyList";
    case errc::out_of_bounds: return "OutOfBounds";
    case errc::count_mismatch: return "CountMismatch";
    case errc::io_error: return "IoError";
    case errc::bad_config: return "BadConfig";
  }
  return "UnknownError";
}

/// Exception carrying a machine-checkable error kind next to the message.
class Error : public std::runtime_error {
 public:
  Error(errc code, const std::string& msg)
      : std::runtime_error(std::string(errc_name(code)) + ": " + msg), code_(code) {}

  errc code() const noexcept { return code_; }

 private:
  errc code_;
};

[[noreturn]] inline void fail(errc code, const std::string& msg) { throw Error(code, msg); }

inline void require(bool cond, errc code, const std::string& msg) {
  if (!cond) fail(code, msg);
}

}  // namespace spix

#endif  // SPIX_ERROR_HPP
