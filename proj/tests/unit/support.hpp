#pragma once

#include <filesystem>
#include <fstream>
#include <memory>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "dalk/kg_store.hpp"
#include "dalk/llm_gateway.hpp"

namespace dalk::testing {

inline std::filesystem::path source_dir() { return DALK_SOURCE_DIR; }
inline std::filesystem::path data_dir() { return source_dir() / "data"; }

inline std::string read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

inline void write_file(const std::filesystem::path& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary);
  out << content;
}

// Fresh directory under the system temp dir, removed on destruction.
class TempDir {
 public:
  explicit TempDir(const std::string& stem) {
    std::random_device rd;
    path_ = std::filesystem::temp_directory_path() /
            (stem + "-" + std::to_string(rd()) + std::to_string(rd()));
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

inline kg::KnowledgeGraph case_study_graph() {
  return kg::deserialize_tsv(read_file(data_dir() / "case_study" / "kg.tsv"));
}

inline std::shared_ptr<llm::ScriptedProvider> scripted_file(const std::filesystem::path& path) {
  return std::make_shared<llm::ScriptedProvider>(llm::ScriptedProvider::load(path));
}

inline std::shared_ptr<llm::ScriptedProvider> scripted(std::vector<llm::ScriptRule> rules) {
  return std::make_shared<llm::ScriptedProvider>(std::move(rules));
}

inline llm::ScriptRule rule(std::string tag, std::vector<std::string> contains,
                            std::string response) {
  return llm::ScriptRule{std::move(tag), std::move(contains), std::move(response)};
}

}  // namespace dalk::testing
