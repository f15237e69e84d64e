#include "lsseg/volume_io.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstring>
#include <fstream>
#include <limits>
#include <vector>

#include <json.hpp>

namespace lsseg {

namespace fs = std::filesystem;
using json = nlohmann::json;
using Kind = VolumeIoError::Kind;

static_assert(std::endian::native == std::endian::little,
              "raw volume I/O assumes a little-endian host");

std::string to_string(DType t) {
  switch (t) {
    case DType::I16: return "i16";
    case DType::F32: return "f32";
    case DType::U8: return "u8";
  }
  return "?";
}

DType parse_dtype(const std::string& s) {
  if (s == "i16") return DType::I16;
  if (s == "f32") return DType::F32;
  if (s == "u8") return DType::U8;
  throw VolumeIoError(Kind::UnsupportedDtype, "unsupported dtype '" + s + "'");
}

std::size_t dtype_size(DType t) {
  switch (t) {
    case DType::I16: return 2;
    case DType::F32: return 4;
    case DType::U8: return 1;
  }
  return 0;
}

namespace {

struct Header {
  Dims dims;
  Spacing spacing;
  DType dtype;
  fs::path raw;
};

Header read_header(const fs::path& path) {
  if (!fs::exists(path)) {
    throw VolumeIoError(Kind::MissingFile, "header not found: " + path.string());
  }
  std::ifstream in(path);
  json j;
  try {
    in >> j;
  } catch (const json::exception& e) {
    throw VolumeIoError(Kind::MalformedHeader,
                        "cannot parse header " + path.string() + ": " + e.what());
  }

  Header h;
  try {
    const auto& d = j.at("dims");
    const auto& s = j.at("spacing");
    if (!d.is_array() || d.size() != 3 || !s.is_array() || s.size() != 3) {
      throw VolumeIoError(Kind::MalformedHeader,
                          "header " + path.string() +
                              ": dims and spacing must be 3-element arrays");
    }
    h.dims = {d[0].get<int>(), d[1].get<int>(), d[2].get<int>()};
    h.spacing = {s[0].get<double>(), s[1].get<double>(), s[2].get<double>()};
    h.dtype = parse_dtype(j.at("dtype").get<std::string>());
    h.raw = path.parent_path() / j.at("data").get<std::string>();
  } catch (const json::exception& e) {
    throw VolumeIoError(Kind::MalformedHeader,
                        "header " + path.string() + ": " + e.what());
  }
  if (h.dims.nx <= 0 || h.dims.ny <= 0 || h.dims.nz <= 0) {
    throw VolumeIoError(Kind::MalformedHeader,
                        "header " + path.string() + ": dims must be positive");
  }
  return h;
}

std::vector<double> read_raw(const Header& h) {
  if (!fs::exists(h.raw)) {
    throw VolumeIoError(Kind::MissingFile, "raw file not found: " + h.raw.string());
  }
  const std::size_t n = h.dims.size();
  const std::size_t expected = n * dtype_size(h.dtype);
  const auto actual = static_cast<std::size_t>(fs::file_size(h.raw));
  if (actual != expected) {
    throw VolumeIoError(Kind::ByteCountMismatch,
                        "raw file " + h.raw.string() + " has " +
                            std::to_string(actual) + " bytes, expected " +
                            std::to_string(expected));
  }

  std::vector<char> bytes(expected);
  std::ifstream in(h.raw, std::ios::binary);
  in.read(bytes.data(), static_cast<std::streamsize>(expected));
  if (!in) {
    throw VolumeIoError(Kind::MissingFile, "cannot read " + h.raw.string());
  }

  std::vector<double> out(n);
  const char* p = bytes.data();
  switch (h.dtype) {
    case DType::I16:
      for (std::size_t i = 0; i < n; ++i) {
        std::int16_t v;
        std::memcpy(&v, p + 2 * i, 2);
        out[i] = v;
      }
      break;
    case DType::F32:
      for (std::size_t i = 0; i < n; ++i) {
        float v;
        std::memcpy(&v, p + 4 * i, 4);
        out[i] = v;
      }
      break;
    case DType::U8:
      for (std::size_t i = 0; i < n; ++i) {
        out[i] = static_cast<unsigned char>(p[i]);
      }
      break;
  }
  return out;
}

void write_pair(const fs::path& header, Dims dims, Spacing spacing, DType dtype,
                const std::vector<char>& bytes) {
  fs::path raw = header;
  raw.replace_extension(".raw");
  json j;
  j["dims"] = {dims.nx, dims.ny, dims.nz};
  j["spacing"] = {spacing.x, spacing.y, spacing.z};
  j["dtype"] = to_string(dtype);
  j["data"] = raw.filename().string();

  std::ofstream h(header);
  if (!h) {
    throw VolumeIoError(Kind::WriteFailure, "cannot write " + header.string());
  }
  h << j.dump(2) << '\n';
  std::ofstream r(raw, std::ios::binary);
  r.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
  if (!h || !r) {
    throw VolumeIoError(Kind::WriteFailure, "I/O failure writing " + header.string());
  }
}

}  // namespace

ScalarVolume load_volume(const fs::path& header) {
  Header h = read_header(header);
  auto values = read_raw(h);
  return ScalarVolume(h.dims, h.spacing, std::move(values));
}

BinaryMask load_mask(const fs::path& header) {
  Header h = read_header(header);
  auto values = read_raw(h);
  std::vector<std::uint8_t> bits(values.size());
  std::transform(values.begin(), values.end(), bits.begin(),
                 [](double v) { return static_cast<std::uint8_t>(v != 0.0); });
  return BinaryMask(h.dims, h.spacing, std::move(bits));
}

void store_volume(const ScalarVolume& vol, const fs::path& header, DType dtype) {
  const std::size_t n = vol.size();
  std::vector<char> bytes(n * dtype_size(dtype));
  char* p = bytes.data();
  for (std::size_t i = 0; i < n; ++i) {
    const double v = vol[i];
    switch (dtype) {
      case DType::I16: {
        const double c = std::clamp(std::round(v), -32768.0, 32767.0);
        const auto s = static_cast<std::int16_t>(c);
        std::memcpy(p + 2 * i, &s, 2);
        break;
      }
      case DType::F32: {
        const auto f = static_cast<float>(v);
        std::memcpy(p + 4 * i, &f, 4);
        break;
      }
      case DType::U8:
        p[i] = static_cast<char>(
            static_cast<unsigned char>(std::clamp(std::round(v), 0.0, 255.0)));
        break;
    }
  }
  write_pair(header, vol.dims(), vol.spacing(), dtype, bytes);
}

void store_volume(const BinaryMask& mask, const fs::path& header) {
  std::vector<char> bytes(mask.size());
  for (std::size_t i = 0; i < mask.size(); ++i) bytes[i] = mask[i] ? 1 : 0;
  write_pair(header, mask.dims(), mask.spacing(), DType::U8, bytes);
}

}  // namespace lsseg
