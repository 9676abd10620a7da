#pragma once

#include <atomic>
#include <cstdlib>
#include <filesystem>
#include <map>
#include <string>

#include <unistd.h>

#include "ccrm/tsv.hpp"

namespace ccrm::testing {

inline std::filesystem::path fixtures_dir() { return CCRM_FIXTURES_DIR; }
inline std::filesystem::path data_dir() { return CCRM_DATA_DIR; }

// Fresh directory under the system temp dir, removed on destruction.
class TempDir {
 public:
  explicit TempDir(const std::string& tag = "ccrm") {
    static std::atomic<int> counter{0};
    path_ = std::filesystem::temp_directory_path() /
            (tag + "-" + std::to_string(::getpid()) + "-" + std::to_string(counter++));
    std::filesystem::remove_all(path_);
    std::filesystem::create_directories(path_);
  }
  ~TempDir() {
    std::error_code ec;
    std::filesystem::remove_all(path_, ec);
  }
  TempDir(const TempDir&) = delete;
  TempDir& operator=(const TempDir&) = delete;

  const std::filesystem::path& path() const { return path_; }
  std::filesystem::path operator/(const std::string& name) const { return path_ / name; }

 private:
  std::filesystem::path path_;
};

// Relative path -> contents for every regular file below `root`.
inline std::map<std::string, std::string> read_tree(const std::filesystem::path& root) {
  std::map<std::string, std::string> out;
  for (const auto& entry : std::filesystem::recursive_directory_iterator(root)) {
    if (!entry.is_regular_file()) continue;
    out[std::filesystem::relative(entry.path(), root).generic_string()] = tsv::read_file(entry.path());
  }
  return out;
}

// Golden files are rewritten instead of compared when CCRM_UPDATE_GOLDEN=1.
inline bool update_golden() {
  const char* v = std::getenv("CCRM_UPDATE_GOLDEN");
  return v && std::string(v) == "1";
}

inline std::filesystem::path golden_dir() { return fixtures_dir() / "golden"; }

// Contents of a golden file; rewrites it first when updating.
inline std::string golden(const std::string& name, const std::string& actual) {
  const auto path = golden_dir() / name;
  if (update_golden()) {
    std::filesystem::create_directories(path.parent_path());
    tsv::write_file(path, actual);
  }
  return std::filesystem::exists(path) ? tsv::read_file(path) : std::string("<missing golden file " + name + ">");
}

}  // namespace ccrm::testing
