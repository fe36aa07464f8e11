#pragma once

// Test-only zip writer (the product reads AASX packages; it never writes
// them). Stored entries by default, optional raw-deflate to exercise the
// reader's inflate path.

#include <cstdint>
#include <string>
#include <vector>

#include <zlib.h>

namespace smtkit::testing {

struct ZipEntrySpec {
    std::string name;
    std::string content;
    bool deflate = false;
};

inline void put_u16(std::string& out, uint16_t v) {
    out += static_cast<char>(v & 0xFF);
    out += static_cast<char>((v >> 8) & 0xFF);
}

inline void put_u32(std::string& out, uint32_t v) {
    out += static_cast<char>(v & 0xFF);
    out += static_cast<char>((v >> 8) & 0xFF);
    out += static_cast<char>((v >> 16) & 0xFF);
    out += static_cast<char>((v >> 24) & 0xFF);
}

inline std::string deflate_raw(const std::string& data) {
    z_stream strm{};
    deflateInit2(&strm, Z_DEFAULT_COMPRESSION, Z_DEFLATED, -MAX_WBITS, 8, Z_DEFAULT_STRATEGY);
    std::string out;
    out.resize(deflateBound(&strm, static_cast<uLong>(data.size())));
    strm.next_in = reinterpret_cast<Bytef*>(const_cast<char*>(data.data()));
    strm.avail_in = static_cast<uInt>(data.size());
    strm.next_out = reinterpret_cast<Bytef*>(out.data());
    strm.avail_out = static_cast<uInt>(out.size());
    deflate(&strm, Z_FINISH);
    out.resize(strm.total_out);
    deflateEnd(&strm);
    return out;
}

inline std::string build_zip(const std::vector<ZipEntrySpec>& entries) {
    std::string out;
    struct Central {
        std::string name;
        uint32_t crc;
        uint32_t csize;
        uint32_t usize;
        uint16_t method;
        uint32_t offset;
    };
    std::vector<Central> centrals;

    for (const auto& entry : entries) {
        const uint32_t crc = static_cast<uint32_t>(
            ::crc32(0L, reinterpret_cast<const Bytef*>(entry.content.data()),
                    static_cast<uInt>(entry.content.size())));
        const std::string payload = entry.deflate ? deflate_raw(entry.content) : entry.content;
        const uint16_t method = entry.deflate ? 8 : 0;
        const uint32_t offset = static_cast<uint32_t>(out.size());

        put_u32(out, 0x04034b50);
        put_u16(out, 20);     // version needed
        put_u16(out, 0);      // flags
        put_u16(out, method);
        put_u16(out, 0);      // mod time
        put_u16(out, 0);      // mod date
        put_u32(out, crc);
        put_u32(out, static_cast<uint32_t>(payload.size()));
        put_u32(out, static_cast<uint32_t>(entry.content.size()));
        put_u16(out, static_cast<uint16_t>(entry.name.size()));
        put_u16(out, 0); // extra
        out += entry.name;
        out += payload;

        centrals.push_back({entry.name, crc, static_cast<uint32_t>(payload.size()),
                            static_cast<uint32_t>(entry.content.size()), method, offset});
    }

    const uint32_t centralStart = static_cast<uint32_t>(out.size());
    for (const auto& c : centrals) {
        put_u32(out, 0x02014b50);
        put_u16(out, 20); // version made by
        put_u16(out, 20); // version needed
        put_u16(out, 0);  // flags
        put_u16(out, c.method);
        put_u16(out, 0); // time
        put_u16(out, 0); // date
        put_u32(out, c.crc);
        put_u32(out, c.csize);
        put_u32(out, c.usize);
        put_u16(out, static_cast<uint16_t>(c.name.size()));
        put_u16(out, 0); // extra
        put_u16(out, 0); // comment
        put_u16(out, 0); // disk
        put_u16(out, 0); // internal attrs
        put_u32(out, 0); // external attrs
        put_u32(out, c.offset);
        out += c.name;
    }
    const uint32_t centralSize = static_cast<uint32_t>(out.size()) - centralStart;

    put_u32(out, 0x06054b50);
    put_u16(out, 0); // disk
    put_u16(out, 0); // central dir disk
    put_u16(out, static_cast<uint16_t>(centrals.size()));
    put_u16(out, static_cast<uint16_t>(centrals.size()));
    put_u32(out, centralSize);
    put_u32(out, centralStart);
    put_u16(out, 0); // comment length
    return out;
}

} // namespace smtkit::testing
