#include "logstamp/serialize.hpp"

#include <array>
#include <bit>
#include <cstring>
#include <fstream>

#include "logstamp/errors.hpp"

namespace logstamp {

namespace {

std::array<std::uint32_t, 256> make_crc_table() {
    std::array<std::uint32_t, 256> table{};
    for (std::uint32_t i = 0; i < 256; ++i) {
        std::uint32_t c = i;
        for (int k = 0; k < 8; ++k)
            c = (c & 1) ? 0xEDB88320u ^ (c >> 1) : c >> 1;
        table[i] = c;
    }
    return table;
}

} // namespace

std::uint32_t crc32(const std::uint8_t* data, std::size_t size) {
    static const std::array<std::uint32_t, 256> table = make_crc_table();
    std::uint32_t c = 0xFFFFFFFFu;
    for (std::size_t i = 0; i < size; ++i)
        c = table[(c ^ data[i]) & 0xFF] ^ (c >> 8);
    return c ^ 0xFFFFFFFFu;
}

void BinaryWriter::put_u16(std::uint16_t v) {
    buf_.push_back(static_cast<std::uint8_t>(v & 0xFF));
    buf_.push_back(static_cast<std::uint8_t>(v >> 8));
}

void BinaryWriter::put_u32(std::uint32_t v) {
    for (int i = 0; i < 4; ++i) buf_.push_back(static_cast<std::uint8_t>((v >> (8 * i)) & 0xFF));
}

void BinaryWriter::put_u64(std::uint64_t v) {
    for (int i = 0; i < 8; ++i) buf_.push_back(static_cast<std::uint8_t>((v >> (8 * i)) & 0xFF));
}

void BinaryWriter::put_f32(float v) { put_u32(std::bit_cast<std::uint32_t>(v)); }

void BinaryWriter::put_f64(double v) { put_u64(std::bit_cast<std::uint64_t>(v)); }

void BinaryWriter::put_string(const std::string& s) {
    put_u32(static_cast<std::uint32_t>(s.size()));
    put_raw(s.data(), s.size());
}

void BinaryWriter::put_f32_array(const std::vector<float>& v) {
    put_u64(static_cast<std::uint64_t>(v.size()));
    for (float x : v) put_f32(x);
}

void BinaryWriter::put_f64_array(const std::vector<double>& v) {
    put_u64(static_cast<std::uint64_t>(v.size()));
    for (double x : v) put_f64(x);
}

void BinaryWriter::put_raw(const void* data, std::size_t size) {
    const auto* p = static_cast<const std::uint8_t*>(data);
    buf_.insert(buf_.end(), p, p + size);
}

void BinaryWriter::write_file(const std::string& path, const std::string& magic,
                              std::uint16_t version) const {
    std::vector<std::uint8_t> out;
    out.reserve(magic.size() + 2 + buf_.size() + 4);
    out.insert(out.end(), magic.begin(), magic.end());
    out.push_back(static_cast<std::uint8_t>(version & 0xFF));
    out.push_back(static_cast<std::uint8_t>(version >> 8));
    out.insert(out.end(), buf_.begin(), buf_.end());
    std::uint32_t c = crc32(out.data(), out.size());
    for (int i = 0; i < 4; ++i) out.push_back(static_cast<std::uint8_t>((c >> (8 * i)) & 0xFF));

    std::ofstream f(path, std::ios::binary | std::ios::trunc);
    if (!f) throw_error(ErrorKind::Input, "cannot open for writing: " + path);
    f.write(reinterpret_cast<const char*>(out.data()),
            static_cast<std::streamsize>(out.size()));
    if (!f) throw_error(ErrorKind::Input, "write failed: " + path);
}

BinaryReader::BinaryReader(const std::string& path, const std::string& magic,
                           std::uint16_t max_version) {
    std::ifstream f(path, std::ios::binary);
    if (!f) throw_error(ErrorKind::Input, "cannot open: " + path);
    buf_.assign(std::istreambuf_iterator<char>(f), std::istreambuf_iterator<char>());

    if (buf_.size() < magic.size() + 2 + 4)
        throw_error(ErrorKind::Corruption, "file truncated: " + path);
    if (std::memcmp(buf_.data(), magic.data(), magic.size()) != 0)
        throw_error(ErrorKind::Format, "bad magic in " + path + " (expected " + magic + ")");

    std::size_t stored_crc_at = buf_.size() - 4;
    std::uint32_t stored = 0;
    for (int i = 0; i < 4; ++i)
        stored |= static_cast<std::uint32_t>(buf_[stored_crc_at + static_cast<std::size_t>(i)]) << (8 * i);
    if (crc32(buf_.data(), stored_crc_at) != stored)
        throw_error(ErrorKind::Corruption, "checksum mismatch in " + path);

    pos_ = magic.size();
    payload_end_ = stored_crc_at;
    version_ = get_u16();
    if (version_ > max_version)
        throw_error(ErrorKind::Format, "unsupported format version " + std::to_string(version_) +
                                           " in " + path);
}

void BinaryReader::need(std::size_t n) const {
    if (pos_ + n > payload_end_)
        throw_error(ErrorKind::Corruption, "payload overrun while decoding");
}

std::uint8_t BinaryReader::get_u8() {
    need(1);
    return buf_[pos_++];
}

std::uint16_t BinaryReader::get_u16() {
    need(2);
    std::uint16_t v = static_cast<std::uint16_t>(buf_[pos_] | (buf_[pos_ + 1] << 8));
    pos_ += 2;
    return v;
}

std::uint32_t BinaryReader::get_u32() {
    need(4);
    std::uint32_t v = 0;
    for (int i = 0; i < 4; ++i) v |= static_cast<std::uint32_t>(buf_[pos_ + static_cast<std::size_t>(i)]) << (8 * i);
    pos_ += 4;
    return v;
}

std::uint64_t BinaryReader::get_u64() {
    need(8);
    std::uint64_t v = 0;
    for (int i = 0; i < 8; ++i) v |= static_cast<std::uint64_t>(buf_[pos_ + static_cast<std::size_t>(i)]) << (8 * i);
    pos_ += 8;
    return v;
}

float BinaryReader::get_f32() { return std::bit_cast<float>(get_u32()); }

double BinaryReader::get_f64() { return std::bit_cast<double>(get_u64()); }

std::string BinaryReader::get_string() {
    std::uint32_t n = get_u32();
    need(n);
    std::string s(reinterpret_cast<const char*>(buf_.data() + pos_), n);
    pos_ += n;
    return s;
}

std::vector<float> BinaryReader::get_f32_array() {
    std::uint64_t n = get_u64();
    need(static_cast<std::size_t>(n) * 4);
    std::vector<float> v(static_cast<std::size_t>(n));
    for (auto& x : v) x = get_f32();
    return v;
}

std::vector<double> BinaryReader::get_f64_array() {
    std::uint64_t n = get_u64();
    need(static_cast<std::size_t>(n) * 8);
    std::vector<double> v(static_cast<std::size_t>(n));
    for (auto& x : v) x = get_f64();
    return v;
}

} // namespace logstamp
