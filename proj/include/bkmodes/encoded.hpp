#pragma once

#include <array>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include <json.hpp>

#include "bkmodes/csv.hpp"
#include "bkmodes/dataset.hpp"

// Lossless persistence for encoded datasets. The binary layout (documented in
// docs/encoded-format.md) is little-endian with a magic header and a trailing
// CRC-32, so truncated or corrupted files fail loudly instead of loading as
// garbage. The recode map travels in a human-readable JSON sidecar at
// `<path>.recode.json`.

namespace bkmodes {

enum class EncodedError {
  kBadMagic,
  kVersionMismatch,
  kTruncated,
  kChecksumMismatch,
  kSidecarMissing,
  kSidecarInvalid,
};

class EncodedIoError : public std::runtime_error {
 public:
  EncodedIoError(EncodedError code, const std::string& what)
      : std::runtime_error(what), code_(code) {}
  EncodedError code() const { return code_; }

 private:
  EncodedError code_;
};

namespace detail {

inline constexpr std::array<char, 4> kMagic = {'B', 'K', 'M', 'D'};
inline constexpr std::uint32_t kFormatVersion = 1;

// CRC-32 (IEEE 802.3, reflected polynomial 0xEDB88320).
inline std::uint32_t crc32(const unsigned char* data, std::size_t size) {
  static const std::array<std::uint32_t, 256> table = [] {
    std::array<std::uint32_t, 256> t{};
    for (std::uint32_t i = 0; i < 256; ++i) {
      std::uint32_t c = i;
      for (int bit = 0; bit < 8; ++bit)
        c = (c & 1) ? 0xEDB88320u ^ (c >> 1) : c >> 1;
      t[i] = c;
    }
    return t;
  }();
  std::uint32_t crc = 0xFFFFFFFFu;
  for (std::size_t i = 0; i < size; ++i)
    crc = table[(crc ^ data[i]) & 0xFFu] ^ (crc >> 8);
  return crc ^ 0xFFFFFFFFu;
}

inline void put_u32(std::string& out, std::uint32_t v) {
  for (int shift = 0; shift < 32; shift += 8)
    out.push_back(static_cast<char>((v >> shift) & 0xFF));
}

inline void put_u64(std::string& out, std::uint64_t v) {
  for (int shift = 0; shift < 64; shift += 8)
    out.push_back(static_cast<char>((v >> shift) & 0xFF));
}

struct ByteReader {
  const unsigned char* data;
  std::size_t size;
  std::size_t pos = 0;

  void need(std::uint64_t count) const {
    // pos <= size always holds, so this cannot overflow.
    if (count > size - pos)
      throw EncodedIoError(EncodedError::kTruncated, "encoded file truncated");
  }
  std::uint32_t u32() {
    need(4);
    std::uint32_t v = 0;
    for (int shift = 0; shift < 32; shift += 8)
      v |= static_cast<std::uint32_t>(data[pos++]) << shift;
    return v;
  }
  std::uint64_t u64() {
    need(8);
    std::uint64_t v = 0;
    for (int shift = 0; shift < 64; shift += 8)
      v |= static_cast<std::uint64_t>(data[pos++]) << shift;
    return v;
  }
  std::string str(std::size_t count) {
    need(count);
    std::string s(reinterpret_cast<const char*>(data + pos), count);
    pos += count;
    return s;
  }
};

}  // namespace detail

inline std::filesystem::path recode_sidecar_path(
    const std::filesystem::path& path) {
  std::filesystem::path p = path;
  p += ".recode.json";
  return p;
}

inline void save_encoded(const CategoricalDataset& ds, const RecodeMap& recode,
                         const std::filesystem::path& path) {
  if (recode.tokens.size() != ds.m())
    throw std::invalid_argument(
        "save_encoded: recode map attribute count disagrees with dataset");
  for (std::size_t a = 0; a < ds.m(); ++a)
    if (recode.tokens[a].size() != ds.cardinalities()[a])
      throw std::invalid_argument(
          "save_encoded: recode token count disagrees with cardinality of "
          "attribute " +
          std::to_string(a));
  std::string buf;
  buf.reserve(64 + ds.n() * ds.m());
  buf.append(detail::kMagic.data(), detail::kMagic.size());
  detail::put_u32(buf, detail::kFormatVersion);
  detail::put_u64(buf, ds.n());
  detail::put_u32(buf, static_cast<std::uint32_t>(ds.m()));
  for (std::uint32_t card : ds.cardinalities()) detail::put_u32(buf, card);
  for (const std::string& name : ds.attribute_names()) {
    detail::put_u32(buf, static_cast<std::uint32_t>(name.size()));
    buf.append(name);
  }
  buf.append(reinterpret_cast<const char*>(ds.raw_codes().data()),
             ds.raw_codes().size());
  const std::uint32_t crc = detail::crc32(
      reinterpret_cast<const unsigned char*>(buf.data()), buf.size());
  detail::put_u32(buf, crc);

  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  out.write(buf.data(), static_cast<std::streamsize>(buf.size()));
  if (!out) throw std::runtime_error("write failed for " + path.string());

  nlohmann::ordered_json sidecar;
  sidecar["version"] = detail::kFormatVersion;
  auto& attrs = sidecar["attributes"] = nlohmann::ordered_json::array();
  for (std::size_t a = 0; a < ds.m(); ++a) {
    nlohmann::ordered_json entry;
    entry["name"] = ds.attribute_names()[a];
    entry["tokens"] = recode.tokens[a];
    attrs.push_back(std::move(entry));
  }
  std::ofstream side(recode_sidecar_path(path), std::ios::trunc);
  if (!side)
    throw std::runtime_error("cannot write " +
                             recode_sidecar_path(path).string());
  side << sidecar.dump(2) << '\n';
}

inline std::pair<CategoricalDataset, RecodeMap> load_encoded(
    const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open " + path.string());
  std::string buf((std::istreambuf_iterator<char>(in)),
                  std::istreambuf_iterator<char>());

  detail::ByteReader r{reinterpret_cast<const unsigned char*>(buf.data()),
                       buf.size()};
  if (r.str(4) != std::string(detail::kMagic.data(), detail::kMagic.size()))
    throw EncodedIoError(EncodedError::kBadMagic,
                         path.string() + " is not an encoded dataset");
  const std::uint32_t version = r.u32();
  if (version != detail::kFormatVersion)
    throw EncodedIoError(EncodedError::kVersionMismatch,
                         "unsupported format version " +
                             std::to_string(version));
  const std::uint64_t n = r.u64();
  const std::uint32_t m = r.u32();
  std::vector<std::uint32_t> cardinalities(m);
  for (std::uint32_t a = 0; a < m; ++a) cardinalities[a] = r.u32();
  std::vector<std::string> names(m);
  for (std::uint32_t a = 0; a < m; ++a) names[a] = r.str(r.u32());
  r.need(n * m);
  std::vector<Code> codes(r.data + r.pos, r.data + r.pos + n * m);
  r.pos += n * m;
  const std::size_t payload_end = r.pos;
  const std::uint32_t stored_crc = r.u32();
  if (r.pos != buf.size())
    throw EncodedIoError(EncodedError::kTruncated,
                         "trailing bytes after checksum in " + path.string());
  const std::uint32_t actual_crc = detail::crc32(
      reinterpret_cast<const unsigned char*>(buf.data()), payload_end);
  if (stored_crc != actual_crc)
    throw EncodedIoError(EncodedError::kChecksumMismatch,
                         "checksum mismatch in " + path.string());

  CategoricalDataset ds(n, m, std::move(cardinalities), std::move(codes),
                        std::move(names));

  const std::filesystem::path side_path = recode_sidecar_path(path);
  std::ifstream side(side_path);
  if (!side)
    throw EncodedIoError(EncodedError::kSidecarMissing,
                         "recode sidecar missing: " + side_path.string());
  RecodeMap recode;
  try {
    const nlohmann::json sidecar = nlohmann::json::parse(side);
    for (const auto& entry : sidecar.at("attributes"))
      recode.tokens.push_back(
          entry.at("tokens").get<std::vector<std::string>>());
  } catch (const nlohmann::json::exception& e) {
    throw EncodedIoError(EncodedError::kSidecarInvalid,
                         side_path.string() + ": " + e.what());
  }
  if (recode.tokens.size() != ds.m())
    throw EncodedIoError(EncodedError::kSidecarInvalid,
                         side_path.string() +
                             ": attribute count disagrees with dataset");
  for (std::size_t a = 0; a < ds.m(); ++a) {
    if (recode.tokens[a].size() != ds.cardinalities()[a])
      throw EncodedIoError(
          EncodedError::kSidecarInvalid,
          side_path.string() + ": token count disagrees with cardinality " +
              "of attribute " + std::to_string(a));
  }
  return {std::move(ds), std::move(recode)};
}

// True when the file starts with the encoded-dataset magic.
inline bool is_encoded_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) return false;
  std::array<char, 4> head{};
  in.read(head.data(), head.size());
  return in.gcount() == 4 && head == detail::kMagic;
}

}  // namespace bkmodes
