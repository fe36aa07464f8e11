#pragma once

// Read-only zip access for AASX packages (OPC containers): central-directory
// walk plus stored/deflated entry extraction. No zip64, no encryption.

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

namespace smtkit::zip {

struct Entry {
    std::string name;
    uint32_t compressedSize = 0;
    uint32_t uncompressedSize = 0;
    uint16_t method = 0; // 0 = stored, 8 = deflate
    uint32_t crc32 = 0;
    uint32_t localHeaderOffset = 0;
};

class Archive {
public:
    // Throws Error{IoError} on unreadable or structurally broken archives.
    static Archive open(const std::filesystem::path& path);
    static Archive from_bytes(std::string bytes, const std::string& name);

    const std::vector<Entry>& entries() const { return entries_; }
    std::string read(const Entry& entry) const;

private:
    void parse_central_directory();

    std::string bytes_;
    std::string name_;
    std::vector<Entry> entries_;
};

} // namespace smtkit::zip
