#pragma once

// LEB128 varints and a checked byte reader shared by the machine encoders.
// Internal to the library; the byte layouts themselves are documented in
// docs/formats.md.

#include <cstdint>
#include <string>
#include <vector>

#include "haltlab/errors.hpp"

namespace haltlab::wire {

inline void put_varint(std::vector<std::uint8_t>& out, std::uint64_t value) {
    while (value >= 0x80) {
        out.push_back(static_cast<std::uint8_t>(value) | 0x80);
        value >>= 7;
    }
    out.push_back(static_cast<std::uint8_t>(value));
}

class Reader {
public:
    Reader(const std::uint8_t* data, std::size_t size, std::size_t base_offset = 0)
        : data_(data), size_(size), pos_(0), base_(base_offset) {}

    std::size_t offset() const { return base_ + pos_; }
    std::size_t remaining() const { return size_ - pos_; }
    bool done() const { return pos_ == size_; }

    std::uint8_t byte(const char* what) {
        if (pos_ >= size_) throw DecodeError(std::string("truncated ") + what, offset());
        return data_[pos_++];
    }

    std::uint64_t varint(const char* what) {
        std::uint64_t value = 0;
        int shift = 0;
        while (true) {
            const std::uint8_t b = byte(what);
            if (shift >= 63 && (b & 0x7F) > 1) {
                throw DecodeError(std::string("varint overflow in ") + what, offset() - 1);
            }
            value |= static_cast<std::uint64_t>(b & 0x7F) << shift;
            if (!(b & 0x80)) return value;
            shift += 7;
            if (shift > 63) throw DecodeError(std::string("varint too long in ") + what, offset() - 1);
        }
    }

    void bytes(std::uint8_t* dst, std::size_t n, const char* what) {
        if (remaining() < n) throw DecodeError(std::string("truncated ") + what, base_ + size_);
        for (std::size_t i = 0; i < n; ++i) dst[i] = data_[pos_ + i];
        pos_ += n;
    }

private:
    const std::uint8_t* data_;
    std::size_t size_;
    std::size_t pos_;
    std::size_t base_;
};

// FNV-1a 64-bit digest, used for machine identities in reports.
inline std::uint64_t fnv1a(const std::vector<std::uint8_t>& bytes) {
    std::uint64_t h = 1469598103934665603ULL;
    for (std::uint8_t b : bytes) {
        h ^= b;
        h *= 1099511628211ULL;
    }
    return h;
}

} // namespace haltlab::wire
