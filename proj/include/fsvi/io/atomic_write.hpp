#ifndef FSVI_IO_ATOMIC_WRITE_HPP
#define FSVI_IO_ATOMIC_WRITE_HPP

#include <filesystem>
#include <fstream>
#include <string>
#include <system_error>

#include <unistd.h>

#include "fsvi/error.hpp"

namespace fsvi::io {

// Writes to a sibling temp file and renames it over the target, so readers
// never observe a partially written file.
inline void write_file_atomic(const std::filesystem::path& path,
                              const std::string& contents) {
  namespace fs = std::filesystem;
  if (path.has_parent_path()) fs::create_directories(path.parent_path());
  fs::path tmp = path;
  tmp += ".tmp." + std::to_string(::getpid());
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    detail::require(static_cast<bool>(out), ErrorKind::kData,
                    "cannot open " + tmp.string() + " for writing");
    out << contents;
    out.flush();
    detail::require(static_cast<bool>(out), ErrorKind::kData,
                    "failed writing " + tmp.string());
  }
  std::error_code ec;
  fs::rename(tmp, path, ec);
  if (ec) {
    fs::remove(tmp);
    detail::fail(ErrorKind::kData,
                 "cannot rename into " + path.string() + ": " + ec.message());
  }
}

}  // namespace fsvi::io

#endif  // FSVI_IO_ATOMIC_WRITE_HPP
