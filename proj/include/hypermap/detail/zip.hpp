#pragma once

#include <cstdint>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <string>
#include <vector>

#include <zlib.h>

#include "hypermap/errors.hpp"

// Minimal ZIP (PKZIP 2.0) reader/writer: deflate-compressed entries, no
// zip64, no encryption. Timestamps are pinned to 1980-01-01 so identical
// content produces identical archives.

namespace hypermap::detail {

struct ZipEntry {
  std::string name;
  std::string data;
};

namespace zipimpl {

inline constexpr uint32_t kLocalSig = 0x04034b50;
inline constexpr uint32_t kCentralSig = 0x02014b50;
inline constexpr uint32_t kEndSig = 0x06054b50;
inline constexpr uint16_t kDosEpochDate = 0x0021;  // 1980-01-01

inline void put16(std::string& out, uint16_t v) {
  out.push_back(static_cast<char>(v & 0xff));
  out.push_back(static_cast<char>((v >> 8) & 0xff));
}

inline void put32(std::string& out, uint32_t v) {
  put16(out, static_cast<uint16_t>(v & 0xffff));
  put16(out, static_cast<uint16_t>((v >> 16) & 0xffff));
}

inline uint16_t get16(const std::string& s, size_t off) {
  return static_cast<uint16_t>(static_cast<uint8_t>(s[off]) |
                               (static_cast<uint8_t>(s[off + 1]) << 8));
}

inline uint32_t get32(const std::string& s, size_t off) {
  return static_cast<uint32_t>(get16(s, off)) | (static_cast<uint32_t>(get16(s, off + 2)) << 16);
}

inline std::string deflate_raw(const std::string& data) {
  z_stream zs{};
  if (deflateInit2(&zs, Z_DEFAULT_COMPRESSION, Z_DEFLATED, -15, 8, Z_DEFAULT_STRATEGY) != Z_OK)
    throw IoError("deflate initialization failed");
  std::string out(deflateBound(&zs, static_cast<uLong>(data.size())), '\0');
  zs.next_in = reinterpret_cast<Bytef*>(const_cast<char*>(data.data()));
  zs.avail_in = static_cast<uInt>(data.size());
  zs.next_out = reinterpret_cast<Bytef*>(out.data());
  zs.avail_out = static_cast<uInt>(out.size());
  const int rc = deflate(&zs, Z_FINISH);
  deflateEnd(&zs);
  if (rc != Z_STREAM_END) throw IoError("deflate failed");
  out.resize(out.size() - zs.avail_out);
  return out;
}

inline std::string inflate_raw(const std::string& data, size_t expected_size,
                               const std::string& what) {
  std::string out(expected_size, '\0');
  z_stream zs{};
  if (inflateInit2(&zs, -15) != Z_OK) throw IoError("inflate initialization failed");
  zs.next_in = reinterpret_cast<Bytef*>(const_cast<char*>(data.data()));
  zs.avail_in = static_cast<uInt>(data.size());
  zs.next_out = reinterpret_cast<Bytef*>(out.data());
  zs.avail_out = static_cast<uInt>(out.size());
  const int rc = inflate(&zs, Z_FINISH);
  inflateEnd(&zs);
  if (rc != Z_STREAM_END || zs.avail_out != 0)
    throw FormatError(what + ": corrupt deflate stream");
  return out;
}

}  // namespace zipimpl

inline void write_zip(const std::filesystem::path& path, const std::vector<ZipEntry>& entries) {
  using namespace zipimpl;
  std::string out;
  std::string central;
  for (const ZipEntry& entry : entries) {
    const uint32_t crc =
        static_cast<uint32_t>(crc32(0L, reinterpret_cast<const Bytef*>(entry.data.data()),
                                    static_cast<uInt>(entry.data.size())));
    const std::string packed = deflate_raw(entry.data);
    const uint32_t offset = static_cast<uint32_t>(out.size());

    put32(out, kLocalSig);
    put16(out, 20);  // version needed
    put16(out, 0);   // flags
    put16(out, 8);   // method: deflate
    put16(out, 0);   // mod time
    put16(out, kDosEpochDate);
    put32(out, crc);
    put32(out, static_cast<uint32_t>(packed.size()));
    put32(out, static_cast<uint32_t>(entry.data.size()));
    put16(out, static_cast<uint16_t>(entry.name.size()));
    put16(out, 0);  // extra length
    out += entry.name;
    out += packed;

    put32(central, kCentralSig);
    put16(central, 20);  // version made by
    put16(central, 20);  // version needed
    put16(central, 0);
    put16(central, 8);
    put16(central, 0);
    put16(central, kDosEpochDate);
    put32(central, crc);
    put32(central, static_cast<uint32_t>(packed.size()));
    put32(central, static_cast<uint32_t>(entry.data.size()));
    put16(central, static_cast<uint16_t>(entry.name.size()));
    put16(central, 0);  // extra
    put16(central, 0);  // comment
    put16(central, 0);  // disk number
    put16(central, 0);  // internal attrs
    put32(central, 0);  // external attrs
    put32(central, offset);
    central += entry.name;
  }
  const uint32_t central_offset = static_cast<uint32_t>(out.size());
  out += central;
  put32(out, kEndSig);
  put16(out, 0);
  put16(out, 0);
  put16(out, static_cast<uint16_t>(entries.size()));
  put16(out, static_cast<uint16_t>(entries.size()));
  put32(out, static_cast<uint32_t>(central.size()));
  put32(out, central_offset);
  put16(out, 0);  // comment length

  std::ofstream file(path, std::ios::binary | std::ios::trunc);
  if (!file) throw IoError("cannot open " + path.string() + " for writing");
  file.write(out.data(), static_cast<std::streamsize>(out.size()));
  if (!file.good()) throw IoError("cannot write " + path.string());
}

inline std::vector<ZipEntry> read_zip(const std::filesystem::path& path) {
  using namespace zipimpl;
  std::ifstream file(path, std::ios::binary);
  if (!file) throw IoError("cannot open " + path.string());
  std::string bytes((std::istreambuf_iterator<char>(file)), std::istreambuf_iterator<char>());
  const std::string what = path.string();
  if (bytes.size() < 22) throw FormatError(what + ": not a zip archive");

  // End-of-central-directory record; scan back past a possible comment.
  size_t eocd = std::string::npos;
  const size_t scan_start = bytes.size() >= 22 + 0xffff ? bytes.size() - 22 - 0xffff : 0;
  for (size_t i = bytes.size() - 22 + 1; i-- > scan_start;) {
    if (get32(bytes, i) == kEndSig) {
      eocd = i;
      break;
    }
  }
  if (eocd == std::string::npos) throw FormatError(what + ": zip end record not found");
  const uint16_t count = get16(bytes, eocd + 10);
  size_t pos = get32(bytes, eocd + 16);

  std::vector<ZipEntry> entries;
  for (uint16_t i = 0; i < count; ++i) {
    if (pos + 46 > bytes.size() || get32(bytes, pos) != kCentralSig)
      throw FormatError(what + ": corrupt central directory");
    const uint16_t method = get16(bytes, pos + 10);
    const uint32_t crc = get32(bytes, pos + 16);
    const uint32_t csize = get32(bytes, pos + 20);
    const uint32_t usize = get32(bytes, pos + 24);
    const uint16_t name_len = get16(bytes, pos + 28);
    const uint16_t extra_len = get16(bytes, pos + 30);
    const uint16_t comment_len = get16(bytes, pos + 32);
    const uint32_t local_offset = get32(bytes, pos + 42);
    if (pos + 46 + name_len > bytes.size()) throw FormatError(what + ": corrupt central directory");
    const std::string name = bytes.substr(pos + 46, name_len);
    pos += 46u + name_len + extra_len + comment_len;

    if (local_offset + 30 > bytes.size() || get32(bytes, local_offset) != kLocalSig)
      throw FormatError(what + ": corrupt local header for " + name);
    const uint16_t lname_len = get16(bytes, local_offset + 26);
    const uint16_t lextra_len = get16(bytes, local_offset + 28);
    const size_t data_start = local_offset + 30u + lname_len + lextra_len;
    if (data_start + csize > bytes.size()) throw FormatError(what + ": truncated entry " + name);
    const std::string packed = bytes.substr(data_start, csize);

    std::string data;
    if (method == 0) {
      data = packed;
    } else if (method == 8) {
      data = inflate_raw(packed, usize, what);
    } else {
      throw FormatError(what + ": unsupported compression method for " + name);
    }
    if (data.size() != usize ||
        crc != static_cast<uint32_t>(crc32(0L, reinterpret_cast<const Bytef*>(data.data()),
                                           static_cast<uInt>(data.size()))))
      throw FormatError(what + ": checksum mismatch for " + name);
    entries.push_back({name, std::move(data)});
  }
  return entries;
}

}  // namespace hypermap::detail
