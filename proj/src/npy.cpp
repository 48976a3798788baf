// Copyright 2026 The ganlocal Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "ganlocal/npy.hpp"

#include <zlib.h>

#include <algorithm>
#include <bit>
#include <cctype>
#include <cmath>
#include <cstring>
#include <fstream>
#include <optional>

#include "ganlocal/error.hpp"

namespace ganlocal::npy {
namespace {

static_assert(std::endian::native == std::endian::little,
              "payload decoding assumes a little-endian host");

constexpr std::uint8_t kMagic[] = {0x93, 'N', 'U', 'M', 'P', 'Y'};
constexpr std::size_t kArrayAlign = 64;
constexpr std::size_t kGrowthAxisMaxDigits = 21;

[[noreturn]] void malformed(const std::string& why) {
  throw Error(ErrorCode::kMalformedHeader, "array file: " + why);
}

[[noreturn]] void bad_archive(const std::string& why) {
  throw Error(ErrorCode::kBadArchive, "archive: " + why);
}

std::uint16_t le16(const std::uint8_t* p) {
  return static_cast<std::uint16_t>(p[0] | (p[1] << 8));
}
std::uint32_t le32(const std::uint8_t* p) {
  return static_cast<std::uint32_t>(p[0]) |
         (static_cast<std::uint32_t>(p[1]) << 8) |
         (static_cast<std::uint32_t>(p[2]) << 16) |
         (static_cast<std::uint32_t>(p[3]) << 24);
}
std::uint64_t le64(const std::uint8_t* p) {
  return static_cast<std::uint64_t>(le32(p)) |
         (static_cast<std::uint64_t>(le32(p + 4)) << 32);
}

void put16(Bytes& out, std::uint16_t v) {
  out.push_back(static_cast<std::uint8_t>(v & 0xff));
  out.push_back(static_cast<std::uint8_t>(v >> 8));
}
void put32(Bytes& out, std::uint32_t v) {
  for (int i = 0; i < 4; ++i) out.push_back(static_cast<std::uint8_t>(v >> (8 * i)));
}

// Minimal reader for the python dict literal in the header, e.g.
// {'descr': '<f4', 'fortran_order': False, 'shape': (2, 3), }
class HeaderParser {
 public:
  explicit HeaderParser(std::string_view text) : s_(text) {}

  struct Fields {
    std::optional<std::string> descr;
    std::optional<bool> fortran_order;
    std::optional<std::vector<std::size_t>> shape;
  };

  Fields parse() {
    Fields f;
    skip_ws();
    expect('{');
    while (true) {
      skip_ws();
      if (peek() == '}') break;
      std::string key = parse_string();
      skip_ws();
      expect(':');
      skip_ws();
      if (key == "descr") {
        f.descr = parse_string();
      } else if (key == "fortran_order") {
        f.fortran_order = parse_bool();
      } else if (key == "shape") {
        f.shape = parse_tuple();
      } else {
        malformed("unexpected header key '" + key + "'");
      }
      skip_ws();
      if (peek() == ',') {
        ++pos_;
        continue;
      }
      skip_ws();
      if (peek() != '}') malformed("expected ',' or '}' in header");
    }
    return f;
  }

 private:
  char peek() const {
    if (pos_ >= s_.size()) malformed("truncated header dict");
    return s_[pos_];
  }
  void skip_ws() {
    while (pos_ < s_.size() && std::isspace(static_cast<unsigned char>(s_[pos_]))) ++pos_;
  }
  void expect(char c) {
    if (peek() != c) malformed(std::string("expected '") + c + "' in header");
    ++pos_;
  }
  std::string parse_string() {
    const char quote = peek();
    if (quote != '\'' && quote != '"') malformed("expected quoted string");
    ++pos_;
    const auto end = s_.find(quote, pos_);
    if (end == std::string_view::npos) malformed("unterminated string");
    std::string out(s_.substr(pos_, end - pos_));
    pos_ = end + 1;
    return out;
  }
  bool parse_bool() {
    if (s_.substr(pos_, 4) == "True") {
      pos_ += 4;
      return true;
    }
    if (s_.substr(pos_, 5) == "False") {
      pos_ += 5;
      return false;
    }
    malformed("expected True or False");
  }
  std::vector<std::size_t> parse_tuple() {
    expect('(');
    std::vector<std::size_t> dims;
    while (true) {
      skip_ws();
      if (peek() == ')') {
        ++pos_;
        return dims;
      }
      if (!std::isdigit(static_cast<unsigned char>(peek()))) malformed("bad shape entry");
      std::size_t v = 0;
      while (pos_ < s_.size() && std::isdigit(static_cast<unsigned char>(s_[pos_]))) {
        v = v * 10 + static_cast<std::size_t>(s_[pos_] - '0');
        ++pos_;
      }
      dims.push_back(v);
      skip_ws();
      if (peek() == ',') ++pos_;
    }
  }

  std::string_view s_;
  std::size_t pos_ = 0;
};

std::string shape_repr(const std::vector<std::size_t>& shape) {
  std::string out = "(";
  for (std::size_t i = 0; i < shape.size(); ++i) {
    if (i > 0) out += ", ";
    out += std::to_string(shape[i]);
  }
  if (shape.size() == 1) out += ",";
  out += ")";
  return out;
}

// --- zip container ---------------------------------------------------------

constexpr std::uint32_t kLocalSig = 0x04034b50;
constexpr std::uint32_t kCentralSig = 0x02014b50;
constexpr std::uint32_t kEndSig = 0x06054b50;
constexpr std::uint32_t kZip64EndSig = 0x06064b50;
constexpr std::uint32_t kZip64LocatorSig = 0x07064b50;

struct CentralEntry {
  std::string name;
  std::uint16_t method = 0;
  std::uint32_t crc = 0;
  std::uint64_t compressed = 0;
  std::uint64_t uncompressed = 0;
  std::uint64_t local_offset = 0;
};

// Replaces 0xFFFFFFFF placeholders with values from a zip64 extra field.
void apply_zip64_extra(const std::uint8_t* extra, std::size_t len,
                       std::uint64_t* uncompressed, std::uint64_t* compressed,
                       std::uint64_t* offset) {
  std::size_t p = 0;
  while (p + 4 <= len) {
    const std::uint16_t id = le16(extra + p);
    const std::uint16_t size = le16(extra + p + 2);
    if (p + 4 + size > len) bad_archive("truncated extra field");
    if (id == 0x0001) {
      std::size_t q = p + 4;
      const std::size_t end = q + size;
      for (std::uint64_t* field : {uncompressed, compressed, offset}) {
        if (field != nullptr && *field == 0xFFFFFFFFu) {
          if (q + 8 > end) bad_archive("short zip64 extra field");
          *field = le64(extra + q);
          q += 8;
        }
      }
    }
    p += 4 + size;
  }
}

Bytes inflate_raw(std::span<const std::uint8_t> in, std::uint64_t expected) {
  Bytes out(static_cast<std::size_t>(expected));
  z_stream zs{};
  if (inflateInit2(&zs, -MAX_WBITS) != Z_OK) bad_archive("inflate init failed");
  zs.next_in = const_cast<Bytef*>(in.data());
  zs.avail_in = static_cast<uInt>(in.size());
  zs.next_out = out.data();
  zs.avail_out = static_cast<uInt>(out.size());
  const int rc = inflate(&zs, Z_FINISH);
  const auto produced = zs.total_out;
  inflateEnd(&zs);
  if (rc != Z_STREAM_END || produced != expected) bad_archive("corrupt deflate stream");
  return out;
}

}  // namespace

NdArray read_array_file(std::span<const std::uint8_t> bytes) {
  if (bytes.size() < 10 || !std::equal(std::begin(kMagic), std::end(kMagic), bytes.begin())) {
    malformed("bad magic");
  }
  const std::uint8_t major = bytes[6];
  const std::uint8_t minor = bytes[7];
  std::size_t header_len = 0;
  std::size_t prefix = 0;
  if (major == 1 && minor == 0) {
    header_len = le16(bytes.data() + 8);
    prefix = 10;
  } else if ((major == 2 || major == 3) && minor == 0) {
    if (bytes.size() < 12) malformed("truncated prefix");
    header_len = le32(bytes.data() + 8);
    prefix = 12;
  } else {
    malformed("unsupported version " + std::to_string(major) + "." + std::to_string(minor));
  }
  if (prefix + header_len > bytes.size()) malformed("header exceeds file");
  const std::string_view text(reinterpret_cast<const char*>(bytes.data() + prefix), header_len);
  const auto fields = HeaderParser(text).parse();
  if (!fields.descr || !fields.fortran_order || !fields.shape) {
    malformed("header lacks descr, fortran_order or shape");
  }
  if (*fields.fortran_order) {
    throw Error(ErrorCode::kUnsupportedLayout, "array file: column-major arrays are not supported");
  }
  if (fields.shape->size() > 4) {
    throw Error(ErrorCode::kUnsupportedLayout, "array file: rank > 4 is not supported");
  }
  std::size_t item = 0;
  if (*fields.descr == "<f4") {
    item = 4;
  } else if (*fields.descr == "<f8") {
    item = 8;
  } else {
    throw Error(ErrorCode::kUnsupportedDtype, "array file: unsupported dtype '" + *fields.descr + "'");
  }

  NdArray out;
  out.shape = *fields.shape;
  const std::size_t count = out.count();
  const std::size_t offset = prefix + header_len;
  if (bytes.size() - offset < count * item) malformed("payload shorter than shape implies");
  out.data.resize(count);
  const std::uint8_t* payload = bytes.data() + offset;
  if (item == 4) {
    std::memcpy(out.data.data(), payload, count * 4);
  } else {
    for (std::size_t i = 0; i < count; ++i) {
      double v;
      std::memcpy(&v, payload + 8 * i, 8);
      out.data[i] = static_cast<float>(v);
    }
  }
  return out;
}

Bytes write_array_file(const NdArray& array) {
  if (array.count() != array.data.size()) {
    throw Error(ErrorCode::kShapeMismatch, "array file: data length disagrees with shape");
  }
  std::string header = "{'descr': '<f4', 'fortran_order': False, 'shape': " +
                       shape_repr(array.shape) + ", }";
  if (!array.shape.empty()) {
    header.append(kGrowthAxisMaxDigits - std::to_string(array.shape[0]).size(), ' ');
  }
  const std::size_t hlen = header.size() + 1;
  const std::size_t padlen = kArrayAlign - ((sizeof(kMagic) + 2 + 2 + hlen) % kArrayAlign);
  header.append(padlen, ' ');
  header.push_back('\n');
  if (header.size() > 0xffff) throw Error(ErrorCode::kMalformedHeader, "array file: header too long");

  Bytes out(std::begin(kMagic), std::end(kMagic));
  out.push_back(1);
  out.push_back(0);
  put16(out, static_cast<std::uint16_t>(header.size()));
  out.insert(out.end(), header.begin(), header.end());
  const auto* raw = reinterpret_cast<const std::uint8_t*>(array.data.data());
  out.insert(out.end(), raw, raw + array.data.size() * sizeof(float));
  return out;
}

ArrayMap read_archive(std::span<const std::uint8_t> bytes) {
  if (bytes.size() < 22) bad_archive("too short for end of central directory");
  std::size_t eocd = std::string::npos;
  const std::size_t lowest = bytes.size() >= 22 + 0xffff ? bytes.size() - 22 - 0xffff : 0;
  for (std::size_t p = bytes.size() - 22 + 1; p-- > lowest;) {
    if (le32(bytes.data() + p) == kEndSig) {
      eocd = p;
      break;
    }
  }
  if (eocd == std::string::npos) bad_archive("end of central directory not found");
  const std::uint8_t* e = bytes.data() + eocd;
  std::uint64_t entries = le16(e + 10);
  std::uint64_t cd_size = le32(e + 12);
  std::uint64_t cd_offset = le32(e + 16);
  if (entries == 0xffff || cd_size == 0xFFFFFFFFu || cd_offset == 0xFFFFFFFFu) {
    if (eocd < 20 || le32(bytes.data() + eocd - 20) != kZip64LocatorSig) bad_archive("missing zip64 locator");
    const std::uint64_t z64 = le64(bytes.data() + eocd - 20 + 8);
    if (z64 + 56 > bytes.size() || le32(bytes.data() + z64) != kZip64EndSig) bad_archive("bad zip64 record");
    entries = le64(bytes.data() + z64 + 32);
    cd_size = le64(bytes.data() + z64 + 40);
    cd_offset = le64(bytes.data() + z64 + 48);
  }
  if (cd_offset + cd_size > bytes.size()) bad_archive("central directory out of range");

  std::vector<CentralEntry> list;
  std::size_t p = static_cast<std::size_t>(cd_offset);
  const std::size_t cd_end = static_cast<std::size_t>(cd_offset + cd_size);
  for (std::uint64_t i = 0; i < entries; ++i) {
    if (p + 46 > cd_end || le32(bytes.data() + p) != kCentralSig) bad_archive("corrupt central directory");
    const std::uint8_t* c = bytes.data() + p;
    CentralEntry entry;
    entry.method = le16(c + 10);
    entry.crc = le32(c + 16);
    entry.compressed = le32(c + 20);
    entry.uncompressed = le32(c + 24);
    const std::size_t name_len = le16(c + 28);
    const std::size_t extra_len = le16(c + 30);
    const std::size_t comment_len = le16(c + 32);
    entry.local_offset = le32(c + 42);
    if (p + 46 + name_len + extra_len + comment_len > cd_end) bad_archive("corrupt central directory");
    entry.name.assign(reinterpret_cast<const char*>(c + 46), name_len);
    apply_zip64_extra(c + 46 + name_len, extra_len, &entry.uncompressed, &entry.compressed,
                      &entry.local_offset);
    list.push_back(std::move(entry));
    p += 46 + name_len + extra_len + comment_len;
  }

  ArrayMap out;
  for (const auto& entry : list) {
    const std::size_t lo = static_cast<std::size_t>(entry.local_offset);
    if (lo + 30 > bytes.size() || le32(bytes.data() + lo) != kLocalSig) bad_archive("bad local header for " + entry.name);
    const std::size_t data_start = lo + 30 + le16(bytes.data() + lo + 26) + le16(bytes.data() + lo + 28);
    if (data_start + entry.compressed > bytes.size()) bad_archive("entry data out of range: " + entry.name);
    const auto raw = bytes.subspan(data_start, static_cast<std::size_t>(entry.compressed));
    Bytes payload;
    if (entry.method == 0) {
      if (entry.compressed != entry.uncompressed) bad_archive("stored size mismatch: " + entry.name);
      payload.assign(raw.begin(), raw.end());
    } else if (entry.method == 8) {
      payload = inflate_raw(raw, entry.uncompressed);
    } else {
      bad_archive("unsupported compression method " + std::to_string(entry.method));
    }
    const auto crc = crc32(0L, payload.data(), static_cast<uInt>(payload.size()));
    if (crc != entry.crc) bad_archive("crc mismatch: " + entry.name);
    std::string key = entry.name;
    if (key.size() > 4 && key.ends_with(".npy")) key.resize(key.size() - 4);
    out.emplace(std::move(key), read_array_file(payload));
  }
  return out;
}

Bytes write_archive(const ArrayMap& arrays) {
  // DOS date 1980-01-01 00:00.
  constexpr std::uint16_t kDosTime = 0;
  constexpr std::uint16_t kDosDate = (1 << 5) | 1;
  Bytes out;
  Bytes central;
  for (const auto& [key, array] : arrays) {
    const Bytes payload = write_array_file(array);
    const std::string name = key + ".npy";
    if (out.size() > 0xFFFFFFFFu || payload.size() > 0xFFFFFFFFu) bad_archive("archive too large");
    const auto offset = static_cast<std::uint32_t>(out.size());
    const auto crc = static_cast<std::uint32_t>(crc32(0L, payload.data(), static_cast<uInt>(payload.size())));
    const auto size = static_cast<std::uint32_t>(payload.size());

    put32(out, kLocalSig);
    put16(out, 20);  // version needed
    put16(out, 0);   // flags
    put16(out, 0);   // stored
    put16(out, kDosTime);
    put16(out, kDosDate);
    put32(out, crc);
    put32(out, size);
    put32(out, size);
    put16(out, static_cast<std::uint16_t>(name.size()));
    put16(out, 0);
    out.insert(out.end(), name.begin(), name.end());
    out.insert(out.end(), payload.begin(), payload.end());

    put32(central, kCentralSig);
    put16(central, 20);  // version made by
    put16(central, 20);
    put16(central, 0);
    put16(central, 0);
    put16(central, kDosTime);
    put16(central, kDosDate);
    put32(central, crc);
    put32(central, size);
    put32(central, size);
    put16(central, static_cast<std::uint16_t>(name.size()));
    put16(central, 0);  // extra
    put16(central, 0);  // comment
    put16(central, 0);  // disk
    put16(central, 0);  // internal attrs
    put32(central, 0);  // external attrs
    put32(central, offset);
    central.insert(central.end(), name.begin(), name.end());
  }
  const auto cd_offset = static_cast<std::uint32_t>(out.size());
  out.insert(out.end(), central.begin(), central.end());
  put32(out, kEndSig);
  put16(out, 0);
  put16(out, 0);
  put16(out, static_cast<std::uint16_t>(arrays.size()));
  put16(out, static_cast<std::uint16_t>(arrays.size()));
  put32(out, static_cast<std::uint32_t>(central.size()));
  put32(out, cd_offset);
  put16(out, 0);
  return out;
}

Bytes read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::kIoError, "cannot open " + path.string());
  Bytes out((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  return out;
}

void write_file(const std::filesystem::path& path, std::span<const std::uint8_t> bytes) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error(ErrorCode::kIoError, "cannot write " + path.string());
  out.write(reinterpret_cast<const char*>(bytes.data()), static_cast<std::streamsize>(bytes.size()));
  if (!out) throw Error(ErrorCode::kIoError, "short write to " + path.string());
}

NdArray load_array(const std::filesystem::path& path) { return read_array_file(read_file(path)); }

void save_array(const std::filesystem::path& path, const NdArray& array) {
  write_file(path, write_array_file(array));
}

ArrayMap load_archive(const std::filesystem::path& path) { return read_archive(read_file(path)); }

void save_archive(const std::filesystem::path& path, const ArrayMap& arrays) {
  write_file(path, write_archive(arrays));
}

}  // namespace ganlocal::npy
