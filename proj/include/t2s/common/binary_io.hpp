#pragma once

#include <bit>
#include <cstdint>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <stdexcept>
#include <string>
#include <string_view>
#include <type_traits>

namespace t2s::io {

static_assert(std::endian::native == std::endian::little,
              "index files are written in native little-endian layout");

/// Buffered little-endian writer. Throws std::runtime_error on I/O failure.
class BinaryWriter {
public:
    explicit BinaryWriter(const std::filesystem::path& path)
        : path_(path), out_(path, std::ios::binary | std::ios::trunc) {
        if (!out_) throw std::runtime_error("cannot open for writing: " + path.string());
    }

    template <class T>
        requires std::is_arithmetic_v<T>
    void write(T value) {
        out_.write(reinterpret_cast<const char*>(&value), sizeof(T));
        offset_ += sizeof(T);
    }

    void write_string(std::string_view s) {
        write(static_cast<std::uint32_t>(s.size()));
        out_.write(s.data(), static_cast<std::streamsize>(s.size()));
        offset_ += s.size();
    }

    std::uint64_t offset() const { return offset_; }

    void close() {
        out_.flush();
        if (!out_) throw std::runtime_error("write failed: " + path_.string());
        out_.close();
    }

private:
    std::filesystem::path path_;
    std::ofstream out_;
    std::uint64_t offset_ = 0;
};

/// Sequential reader matching BinaryWriter.
class BinaryReader {
public:
    explicit BinaryReader(const std::filesystem::path& path) : path_(path), in_(path, std::ios::binary) {
        if (!in_) throw std::runtime_error("cannot open for reading: " + path.string());
    }

    template <class T>
        requires std::is_arithmetic_v<T>
    T read() {
        T value{};
        in_.read(reinterpret_cast<char*>(&value), sizeof(T));
        if (!in_) throw std::runtime_error("unexpected end of file: " + path_.string());
        return value;
    }

    std::string read_string() {
        const auto size = read<std::uint32_t>();
        std::string s(size, '\0');
        in_.read(s.data(), size);
        if (!in_) throw std::runtime_error("unexpected end of file: " + path_.string());
        return s;
    }

    /// True when no bytes remain.
    bool at_end() { return in_.peek() == std::char_traits<char>::eof(); }

private:
    std::filesystem::path path_;
    std::ifstream in_;
};

/// Read-only file supporting concurrent positioned reads (pread).
class RandomAccessFile {
public:
    explicit RandomAccessFile(const std::filesystem::path& path);
    ~RandomAccessFile();
    RandomAccessFile(const RandomAccessFile&) = delete;
    RandomAccessFile& operator=(const RandomAccessFile&) = delete;

    void read_at(std::uint64_t offset, void* buffer, std::size_t size) const;
    std::uint64_t size() const { return size_; }

private:
    std::filesystem::path path_;
    int fd_ = -1;
    std::uint64_t size_ = 0;
};

/// Cursor over an in-memory byte buffer filled from a RandomAccessFile.
class ByteCursor {
public:
    ByteCursor(const char* data, std::size_t size) : data_(data), size_(size) {}

    template <class T>
        requires std::is_arithmetic_v<T>
    T read() {
        if (pos_ + sizeof(T) > size_) throw std::runtime_error("record overrun");
        T value;
        std::memcpy(&value, data_ + pos_, sizeof(T));
        pos_ += sizeof(T);
        return value;
    }

    std::string read_string() {
        const auto n = read<std::uint32_t>();
        if (pos_ + n > size_) throw std::runtime_error("record overrun");
        std::string s(data_ + pos_, n);
        pos_ += n;
        return s;
    }

private:
    const char* data_;
    std::size_t size_;
    std::size_t pos_ = 0;
};

/// A staging directory next to `target`. publish() swaps it into place with
/// renames; if the object is destroyed unpublished, the staging directory is
/// removed so no partial index ever becomes visible at `target`.
class StagingDirectory {
public:
    explicit StagingDirectory(std::filesystem::path target);
    ~StagingDirectory();
    StagingDirectory(const StagingDirectory&) = delete;
    StagingDirectory& operator=(const StagingDirectory&) = delete;

    const std::filesystem::path& path() const { return staging_; }
    void publish();

private:
    std::filesystem::path target_;
    std::filesystem::path staging_;
    bool published_ = false;
};

std::string read_text_file(const std::filesystem::path& path);
void write_text_file(const std::filesystem::path& path, std::string_view content);

}  // namespace t2s::io
