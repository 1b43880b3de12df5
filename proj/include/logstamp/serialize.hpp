#pragma once

#include <cstdint>
#include <string>
#include <vector>

namespace logstamp {

// Binary model container: magic string, u16 format version, little-endian
// payload, trailing CRC32 over everything that precedes it.

std::uint32_t crc32(const std::uint8_t* data, std::size_t size);

class BinaryWriter {
public:
    void put_u8(std::uint8_t v) { buf_.push_back(v); }
    void put_u16(std::uint16_t v);
    void put_u32(std::uint32_t v);
    void put_u64(std::uint64_t v);
    void put_i32(std::int32_t v) { put_u32(static_cast<std::uint32_t>(v)); }
    void put_f32(float v);
    void put_f64(double v);
    void put_string(const std::string& s);
    void put_f32_array(const std::vector<float>& v);
    void put_f64_array(const std::vector<double>& v);
    void put_raw(const void* data, std::size_t size);

    // magic + version header, then payload, then CRC32; throws on I/O failure
    void write_file(const std::string& path, const std::string& magic,
                    std::uint16_t version) const;

private:
    std::vector<std::uint8_t> buf_;
};

class BinaryReader {
public:
    // Validates magic (Format error), version (Format error when newer than
    // `max_version`) and trailing CRC32 (Corruption error) before any field
    // is readable.
    BinaryReader(const std::string& path, const std::string& magic,
                 std::uint16_t max_version);

    std::uint16_t version() const { return version_; }

    std::uint8_t get_u8();
    std::uint16_t get_u16();
    std::uint32_t get_u32();
    std::uint64_t get_u64();
    std::int32_t get_i32() { return static_cast<std::int32_t>(get_u32()); }
    float get_f32();
    double get_f64();
    std::string get_string();
    std::vector<float> get_f32_array();
    std::vector<double> get_f64_array();

    bool at_end() const { return pos_ == payload_end_; }

private:
    void need(std::size_t n) const;

    std::vector<std::uint8_t> buf_;
    std::size_t pos_ = 0;
    std::size_t payload_end_ = 0;
    std::uint16_t version_ = 0;
};

} // namespace logstamp
