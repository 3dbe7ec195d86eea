#include "qrc/manifest.hpp"

#include <openssl/evp.h>

#include <array>
#include <fstream>
#include <istream>
#include <memory>
#include <ostream>

#include "qrc/types.hpp"

namespace qrc {

std::string file_sha256(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DataError("cannot open " + path);
  std::unique_ptr<EVP_MD_CTX, decltype(&EVP_MD_CTX_free)> ctx(EVP_MD_CTX_new(), EVP_MD_CTX_free);
  if (!ctx || EVP_DigestInit_ex(ctx.get(), EVP_sha256(), nullptr) != 1) {
    throw std::runtime_error("SHA-256 initialisation failed");
  }
  std::array<char, 1 << 16> buf{};
  while (in) {
    in.read(buf.data(), buf.size());
    const auto got = in.gcount();
    if (got > 0) EVP_DigestUpdate(ctx.get(), buf.data(), static_cast<std::size_t>(got));
  }
  std::array<unsigned char, EVP_MAX_MD_SIZE> md{};
  unsigned int len = 0;
  EVP_DigestFinal_ex(ctx.get(), md.data(), &len);
  static constexpr char kHex[] = "0123456789abcdef";
  std::string out;
  for (unsigned int k = 0; k < len; ++k) {
    out += kHex[md[k] >> 4];
    out += kHex[md[k] & 0xF];
  }
  return out;
}

RunManifest::RunManifest(std::string command, const std::vector<std::string>& argv) {
  set("tool", "qrc");
  set("version", kToolVersion);
  set("command", std::move(command));
  set("argc", std::to_string(argv.size()));
  for (std::size_t k = 0; k < argv.size(); ++k) set("argv." + std::to_string(k), argv[k]);
}

void RunManifest::set(const std::string& key, const std::string& value) {
  for (auto& [k, v] : entries_) {
    if (k == key) {
      v = value;
      return;
    }
  }
  entries_.emplace_back(key, value);
}

const std::string* RunManifest::get(const std::string& key) const {
  for (const auto& [k, v] : entries_) {
    if (k == key) return &v;
  }
  return nullptr;
}

void RunManifest::add_input(const std::string& path) { set("input." + path, file_sha256(path)); }

void RunManifest::add_output(const std::string& path) { set("output." + path, file_sha256(path)); }

std::vector<std::string> RunManifest::argv() const {
  const std::string* argc = get("argc");
  if (!argc) throw DataError("manifest has no recorded arguments");
  const std::size_t n = std::stoul(*argc);
  std::vector<std::string> out;
  for (std::size_t k = 0; k < n; ++k) {
    const std::string* a = get("argv." + std::to_string(k));
    if (!a) throw DataError("manifest is missing argv." + std::to_string(k));
    out.push_back(*a);
  }
  return out;
}

namespace {

std::string escape_value(const std::string& v) {
  std::string out;
  for (char c : v) {
    if (c == '\\') out += "\\\\";
    else if (c == '\n') out += "\\n";
    else out += c;
  }
  return out;
}

std::string unescape_value(const std::string& v) {
  std::string out;
  for (std::size_t i = 0; i < v.size(); ++i) {
    if (v[i] == '\\' && i + 1 < v.size()) {
      out += v[i + 1] == 'n' ? '\n' : v[i + 1];
      ++i;
    } else {
      out += v[i];
    }
  }
  return out;
}

}  // namespace

void RunManifest::write(std::ostream& out) const {
  for (const auto& [k, v] : entries_) out << k << '=' << escape_value(v) << '\n';
}

void RunManifest::write_file(const std::string& path) const {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw DataError("cannot write " + path);
  write(out);
}

RunManifest RunManifest::read(std::istream& in) {
  RunManifest m;
  std::string line;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos) throw DataError("malformed manifest line: " + line);
    m.entries_.emplace_back(line.substr(0, eq), unescape_value(line.substr(eq + 1)));
  }
  return m;
}

RunManifest RunManifest::read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DataError("cannot open " + path);
  return read(in);
}

}  // namespace qrc
