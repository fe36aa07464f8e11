#include "smtkit/zip.hpp"

#include <cstring>
#include <fstream>
#include <sstream>

#include <zlib.h>

#include "smtkit/error.hpp"

namespace smtkit::zip {

namespace {

constexpr uint32_t kEocdSignature = 0x06054b50;
constexpr uint32_t kCentralSignature = 0x02014b50;
constexpr uint32_t kLocalSignature = 0x04034b50;

uint16_t read_u16(const std::string& bytes, size_t at) {
    return static_cast<uint16_t>(static_cast<uint8_t>(bytes[at]) |
                                 (static_cast<uint8_t>(bytes[at + 1]) << 8));
}

uint32_t read_u32(const std::string& bytes, size_t at) {
    return static_cast<uint32_t>(static_cast<uint8_t>(bytes[at]) |
                                 (static_cast<uint8_t>(bytes[at + 1]) << 8) |
                                 (static_cast<uint8_t>(bytes[at + 2]) << 16) |
                                 (static_cast<uint8_t>(bytes[at + 3]) << 24));
}

std::string inflate_raw(const std::string& compressed, uint32_t expectedSize,
                        const std::string& context) {
    std::string out;
    out.resize(expectedSize);
    z_stream strm{};
    if (inflateInit2(&strm, -MAX_WBITS) != Z_OK) {
        throw Error(ErrorCode::IoError, context + ": inflate init failed");
    }
    strm.next_in = reinterpret_cast<Bytef*>(const_cast<char*>(compressed.data()));
    strm.avail_in = static_cast<uInt>(compressed.size());
    strm.next_out = reinterpret_cast<Bytef*>(out.data());
    strm.avail_out = static_cast<uInt>(out.size());
    const int rc = inflate(&strm, Z_FINISH);
    inflateEnd(&strm);
    if (rc != Z_STREAM_END || strm.total_out != expectedSize) {
        throw Error(ErrorCode::IoError, context + ": corrupt deflate stream");
    }
    return out;
}

} // namespace

Archive Archive::open(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw Error(ErrorCode::IoError, "cannot open " + path.string());
    std::ostringstream buffer;
    buffer << in.rdbuf();
    return from_bytes(buffer.str(), path.filename().string());
}

Archive Archive::from_bytes(std::string bytes, const std::string& name) {
    Archive archive;
    archive.bytes_ = std::move(bytes);
    archive.name_ = name;
    archive.parse_central_directory();
    return archive;
}

void Archive::parse_central_directory() {
    if (bytes_.size() < 22) throw Error(ErrorCode::IoError, name_ + ": not a zip archive");

    // end-of-central-directory record: scan backwards over a possible comment
    size_t eocd = std::string::npos;
    const size_t scanFrom = bytes_.size() - 22;
    const size_t scanLimit = bytes_.size() > 22 + 65535 ? bytes_.size() - 22 - 65535 : 0;
    for (size_t i = scanFrom;; --i) {
        if (read_u32(bytes_, i) == kEocdSignature) {
            eocd = i;
            break;
        }
        if (i == scanLimit) break;
    }
    if (eocd == std::string::npos) {
        throw Error(ErrorCode::IoError, name_ + ": no zip end-of-central-directory record");
    }

    const uint16_t entryCount = read_u16(bytes_, eocd + 10);
    const uint32_t centralOffset = read_u32(bytes_, eocd + 16);
    if (entryCount == 0xFFFF || centralOffset == 0xFFFFFFFF) {
        throw Error(ErrorCode::IoError, name_ + ": zip64 archives are not supported");
    }

    size_t at = centralOffset;
    for (uint16_t i = 0; i < entryCount; ++i) {
        if (at + 46 > bytes_.size() || read_u32(bytes_, at) != kCentralSignature) {
            throw Error(ErrorCode::IoError, name_ + ": corrupt central directory");
        }
        Entry entry;
        const uint16_t flags = read_u16(bytes_, at + 8);
        entry.method = read_u16(bytes_, at + 10);
        entry.crc32 = read_u32(bytes_, at + 16);
        entry.compressedSize = read_u32(bytes_, at + 20);
        entry.uncompressedSize = read_u32(bytes_, at + 24);
        const uint16_t nameLen = read_u16(bytes_, at + 28);
        const uint16_t extraLen = read_u16(bytes_, at + 30);
        const uint16_t commentLen = read_u16(bytes_, at + 32);
        entry.localHeaderOffset = read_u32(bytes_, at + 42);
        if (at + 46 + nameLen > bytes_.size()) {
            throw Error(ErrorCode::IoError, name_ + ": corrupt central directory");
        }
        entry.name = bytes_.substr(at + 46, nameLen);
        if ((flags & 0x1) != 0) {
            throw Error(ErrorCode::IoError, name_ + ": encrypted entries are not supported");
        }
        entries_.push_back(std::move(entry));
        at += 46 + nameLen + extraLen + commentLen;
    }
}

std::string Archive::read(const Entry& entry) const {
    const std::string context = name_ + "!" + entry.name;
    const size_t at = entry.localHeaderOffset;
    if (at + 30 > bytes_.size() || read_u32(bytes_, at) != kLocalSignature) {
        throw Error(ErrorCode::IoError, context + ": corrupt local header");
    }
    const uint16_t nameLen = read_u16(bytes_, at + 26);
    const uint16_t extraLen = read_u16(bytes_, at + 28);
    const size_t dataAt = at + 30 + nameLen + extraLen;
    if (dataAt + entry.compressedSize > bytes_.size()) {
        throw Error(ErrorCode::IoError, context + ": truncated entry data");
    }
    const std::string compressed = bytes_.substr(dataAt, entry.compressedSize);

    std::string data;
    if (entry.method == 0) {
        data = compressed;
    } else if (entry.method == 8) {
        data = inflate_raw(compressed, entry.uncompressedSize, context);
    } else {
        throw Error(ErrorCode::IoError,
                    context + ": unsupported compression method " + std::to_string(entry.method));
    }
    const uint32_t actualCrc = static_cast<uint32_t>(
        ::crc32(0L, reinterpret_cast<const Bytef*>(data.data()), static_cast<uInt>(data.size())));
    if (actualCrc != entry.crc32) {
        throw Error(ErrorCode::IoError, context + ": CRC mismatch");
    }
    return data;
}

} // namespace smtkit::zip
