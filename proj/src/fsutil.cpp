#include "gap/fsutil.hpp"

#include <fstream>
#include <sstream>
#include <system_error>

#include "gap/errors.hpp"

namespace gap {

namespace {

void write_then_rename(const std::filesystem::path& path, const std::string& bytes,
                       std::ios::openmode mode) {
  namespace fs = std::filesystem;
  if (path.has_parent_path()) {
    std::error_code ec;
    fs::create_directories(path.parent_path(), ec);
  }
  fs::path tmp = path;
  tmp += ".tmp";
  {
    std::ofstream out(tmp, mode);
    if (!out) throw io_error("cannot open '" + tmp.string() + "' for writing");
    out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
    if (!out) throw io_error("write failed for '" + tmp.string() + "'");
  }
  std::error_code ec;
  fs::rename(tmp, path, ec);
  if (ec) throw io_error("rename to '" + path.string() + "' failed: " + ec.message());
}

}  // namespace

void atomic_write_text(const std::filesystem::path& path, const std::string& content) {
  write_then_rename(path, content, std::ios::out | std::ios::trunc);
}

void atomic_write_binary(const std::filesystem::path& path, const std::string& bytes) {
  write_then_rename(path, bytes, std::ios::out | std::ios::trunc | std::ios::binary);
}

std::string read_text_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::in | std::ios::binary);
  if (!in) throw io_error("cannot open '" + path.string() + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

}  // namespace gap
