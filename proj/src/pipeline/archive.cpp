#include "trajsel/pipeline/archive.hpp"

#include <openssl/evp.h>

#include <fstream>
#include <iomanip>
#include <map>
#include <sstream>

#include "trajsel/common/errors.hpp"

namespace trajsel::pipeline {

namespace fs = std::filesystem;

std::string sha256_hex(std::string_view data) {
  unsigned char digest[EVP_MAX_MD_SIZE];
  unsigned int len = 0;
  if (EVP_Digest(data.data(), data.size(), digest, &len, EVP_sha256(), nullptr) != 1)
    throw FileError("sha256 digest failed");
  std::ostringstream os;
  for (unsigned int i = 0; i < len; ++i) os << std::hex << std::setw(2) << std::setfill('0') << int(digest[i]);
  return os.str();
}

std::string read_file(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw FileError("cannot open " + path.string());
  std::ostringstream os;
  os << in.rdbuf();
  return os.str();
}

void write_file(const fs::path& path, std::string_view content) {
  std::error_code ec;
  if (path.has_parent_path()) fs::create_directories(path.parent_path(), ec);
  if (ec) throw FileError("cannot create directory " + path.parent_path().string() + ": " + ec.message());
  fs::path tmp = path;
  tmp += ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw FileError("cannot write " + tmp.string());
    out.write(content.data(), static_cast<std::streamsize>(content.size()));
    if (!out) throw FileError("write failed for " + tmp.string());
  }
  fs::rename(tmp, path, ec);
  if (ec) throw FileError("cannot rename onto " + path.string() + ": " + ec.message());
}

nlohmann::json read_json(const fs::path& path) {
  const auto text = read_file(path);
  try {
    return nlohmann::json::parse(text);
  } catch (const nlohmann::json::exception& e) {
    throw FileError("malformed JSON in " + path.string() + ": " + e.what());
  }
}

namespace {

std::map<std::string, std::string> hash_tree(const fs::path& dir) {
  std::map<std::string, std::string> files;
  if (!fs::is_directory(dir)) throw FileError("not a directory: " + dir.string());
  for (const auto& entry : fs::recursive_directory_iterator(dir)) {
    if (!entry.is_regular_file()) continue;
    const auto rel = fs::relative(entry.path(), dir).generic_string();
    if (rel == "manifest.json") continue;
    files[rel] = sha256_hex(read_file(entry.path()));
  }
  return files;
}

}  // namespace

nlohmann::json write_manifest(const fs::path& dir, const ExperimentConfig& config) {
  nlohmann::json files = nlohmann::json::object();
  for (const auto& [name, hash] : hash_tree(dir)) files[name] = hash;
  nlohmann::json manifest = {{"config_hash", sha256_hex(to_json(config).dump())}, {"files", files}};
  write_file(dir / "manifest.json", manifest.dump(2) + "\n");
  return manifest;
}

void verify_manifest(const fs::path& dir) {
  const auto manifest = read_json(dir / "manifest.json");
  const auto actual = hash_tree(dir);
  const auto& listed = manifest.at("files");
  if (listed.size() != actual.size()) throw ConsistencyError("manifest lists a different file set");
  for (const auto& [name, hash] : actual) {
    if (!listed.contains(name) || listed.at(name).get<std::string>() != hash)
      throw ConsistencyError("manifest hash mismatch for " + name);
  }
}

}  // namespace trajsel::pipeline
