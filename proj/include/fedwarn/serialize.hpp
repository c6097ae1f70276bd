#pragma once

#include <cstdint>
#include <string>
#include <string_view>

#include "fedwarn/bytes.hpp"
#include "fedwarn/errors.hpp"

namespace fedwarn {

// Canonical serialization: every field is emitted as [u32 BE length][bytes],
// concatenated in declared field order. Integers are 8 big-endian bytes,
// times are the IEEE-754 bit pattern of 64-bit float seconds, strings and
// byte blobs are raw, digests are their 32 raw bytes. Hashes and signatures
// are computed over these encodings, so they are reproducible from this
// description alone.
class CanonicalWriter {
public:
    void field(std::string_view s) {
        put_u32_be(buf_, static_cast<std::uint32_t>(s.size()));
        buf_.insert(buf_.end(), s.begin(), s.end());
    }

    void field(const Bytes& b) {
        put_u32_be(buf_, static_cast<std::uint32_t>(b.size()));
        buf_.insert(buf_.end(), b.begin(), b.end());
    }

    void field(const Digest& d) {
        put_u32_be(buf_, static_cast<std::uint32_t>(d.size()));
        buf_.insert(buf_.end(), d.begin(), d.end());
    }

    void field_u64(std::uint64_t v) {
        put_u32_be(buf_, 8);
        put_u64_be(buf_, v);
    }

    void field_f64(double v) {
        put_u32_be(buf_, 8);
        put_f64_be(buf_, v);
    }

    const Bytes& bytes() const { return buf_; }
    Bytes take() { return std::move(buf_); }

private:
    Bytes buf_;
};

// Mirror of CanonicalWriter for reading payloads back.
class CanonicalReader {
public:
    explicit CanonicalReader(const Bytes& data) : data_(data) {}
    explicit CanonicalReader(Bytes&&) = delete; // reader borrows, caller keeps the buffer alive

    Bytes field() {
        if (pos_ + 4 > data_.size()) {
            throw Error("canonical decode: truncated length prefix");
        }
        std::uint32_t len = get_u32_be(data_.data() + pos_);
        pos_ += 4;
        if (pos_ + len > data_.size()) {
            throw Error("canonical decode: truncated field body");
        }
        Bytes out(data_.begin() + static_cast<std::ptrdiff_t>(pos_),
                  data_.begin() + static_cast<std::ptrdiff_t>(pos_ + len));
        pos_ += len;
        return out;
    }

    std::string field_string() {
        Bytes b = field();
        return std::string(b.begin(), b.end());
    }

    std::uint64_t field_u64() {
        Bytes b = field();
        if (b.size() != 8) {
            throw Error("canonical decode: integer field is not 8 bytes");
        }
        return get_u64_be(b.data());
    }

    double field_f64() {
        Bytes b = field();
        if (b.size() != 8) {
            throw Error("canonical decode: float field is not 8 bytes");
        }
        return get_f64_be(b.data());
    }

    bool exhausted() const { return pos_ == data_.size(); }

private:
    const Bytes& data_;
    std::size_t pos_ = 0;
};

} // namespace fedwarn
