#pragma once

#include <iosfwd>
#include <string>
#include <utility>
#include <vector>

namespace qrc {

inline constexpr const char* kToolVersion = "1.0.0";

// Hex SHA-256 of a file's bytes.
std::string file_sha256(const std::string& path);

// Sidecar record of how an artifact was produced: line-oriented key=value,
// keys kept in insertion order. Values may not contain newlines; they are
// escaped as \n on write.
class RunManifest {
 public:
  RunManifest() = default;
  RunManifest(std::string command, const std::vector<std::string>& argv);

  void set(const std::string& key, const std::string& value);
  const std::string* get(const std::string& key) const;

  void add_input(const std::string& path);
  void add_output(const std::string& path);

  // Arguments that reproduce the run when fed back to the CLI.
  std::vector<std::string> argv() const;

  void write(std::ostream& out) const;
  void write_file(const std::string& path) const;
  static RunManifest read(std::istream& in);
  static RunManifest read_file(const std::string& path);

  const std::vector<std::pair<std::string, std::string>>& entries() const { return entries_; }

 private:
  std::vector<std::pair<std::string, std::string>> entries_;
};

}  // namespace qrc
