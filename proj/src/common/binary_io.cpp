#include "t2s/common/binary_io.hpp"

#include <fcntl.h>
#include <sys/stat.h>
#include <unistd.h>

#include <atomic>
#include <cerrno>
#include <chrono>
#include <sstream>

namespace t2s::io {

namespace fs = std::filesystem;

RandomAccessFile::RandomAccessFile(const fs::path& path) : path_(path) {
    fd_ = ::open(path.c_str(), O_RDONLY | O_CLOEXEC);
    if (fd_ < 0) throw std::runtime_error("cannot open for reading: " + path.string());
    struct stat st {};
    if (::fstat(fd_, &st) != 0) {
        ::close(fd_);
        throw std::runtime_error("cannot stat: " + path.string());
    }
    size_ = static_cast<std::uint64_t>(st.st_size);
}

RandomAccessFile::~RandomAccessFile() {
    if (fd_ >= 0) ::close(fd_);
}

void RandomAccessFile::read_at(std::uint64_t offset, void* buffer, std::size_t size) const {
    auto* out = static_cast<char*>(buffer);
    std::size_t done = 0;
    while (done < size) {
        const auto n = ::pread(fd_, out + done, size - done, static_cast<off_t>(offset + done));
        if (n < 0 && errno == EINTR) continue;
        if (n <= 0) throw std::runtime_error("short read: " + path_.string());
        done += static_cast<std::size_t>(n);
    }
}

namespace {

std::string unique_suffix() {
    static std::atomic<unsigned> counter{0};
    std::ostringstream s;
    s << ::getpid() << '-'
      << std::chrono::steady_clock::now().time_since_epoch().count() << '-' << counter++;
    return s.str();
}

}  // namespace

StagingDirectory::StagingDirectory(fs::path target) : target_(std::move(target)) {
    if (target_.has_parent_path()) fs::create_directories(target_.parent_path());
    staging_ = target_;
    staging_ += ".staging-" + unique_suffix();
    fs::create_directories(staging_);
}

StagingDirectory::~StagingDirectory() {
    if (!published_) {
        std::error_code ec;
        fs::remove_all(staging_, ec);
    }
}

void StagingDirectory::publish() {
    fs::path retired;
    if (fs::exists(target_)) {
        retired = target_;
        retired += ".retired-" + unique_suffix();
        fs::rename(target_, retired);
    }
    fs::rename(staging_, target_);
    published_ = true;
    if (!retired.empty()) {
        std::error_code ec;
        fs::remove_all(retired, ec);
    }
}

std::string read_text_file(const fs::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("cannot open for reading: " + path.string());
    std::ostringstream s;
    s << in.rdbuf();
    return s.str();
}

void write_text_file(const fs::path& path, std::string_view content) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw std::runtime_error("cannot open for writing: " + path.string());
    out.write(content.data(), static_cast<std::streamsize>(content.size()));
    out.flush();
    if (!out) throw std::runtime_error("write failed: " + path.string());
}

}  // namespace t2s::io
