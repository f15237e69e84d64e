#pragma once

#include <filesystem>
#include <string>

#include "lsseg/volume.hpp"

namespace lsseg {

/// On-disk element type of the raw payload (always little-endian).
enum class DType { I16, F32, U8 };

std::string to_string(DType t);
DType parse_dtype(const std::string& s);  // throws VolumeIoError
std::size_t dtype_size(DType t);

class VolumeIoError : public Error {
 public:
  enum class Kind {
    MissingFile,
    MalformedHeader,
    ByteCountMismatch,
    UnsupportedDtype,
    WriteFailure,
  };

  VolumeIoError(Kind kind, const std::string& msg) : Error(msg), kind_(kind) {}
  Kind kind() const { return kind_; }

 private:
  Kind kind_;
};

// A volume lives in two files: a JSON header
//   {"dims":[nx,ny,nz], "spacing":[sx,sy,sz], "dtype":"i16|f32|u8",
//    "data":"<raw filename relative to the header>"}
// and the raw payload, x-fastest.

ScalarVolume load_volume(const std::filesystem::path& header);

/// Any nonzero stored value becomes 1.
BinaryMask load_mask(const std::filesystem::path& header);

/// Writes `<header>` and a sibling raw file (header stem + ".raw").
/// Values are rounded for integer dtypes; i16 saturates.
void store_volume(const ScalarVolume& vol, const std::filesystem::path& header,
                  DType dtype = DType::F32);

/// Masks are always stored as u8 in {0,1}.
void store_volume(const BinaryMask& mask, const std::filesystem::path& header);

}  // namespace lsseg
