#include "dreamnet/manifest.hpp"

#include <openssl/sha.h>

#include <chrono>
#include <ctime>
#include <fstream>
#include <iomanip>
#include <sstream>
#include <stdexcept>

namespace dreamnet {

namespace {

std::string hex(const unsigned char* d, std::size_t n) {
  std::ostringstream os;
  os << std::hex << std::setfill('0');
  for (std::size_t k = 0; k < n; ++k) os << std::setw(2) << int(d[k]);
  return os.str();
}

}  // namespace

std::string sha256_hex(std::string_view data) {
  unsigned char digest[SHA256_DIGEST_LENGTH];
  SHA256(reinterpret_cast<const unsigned char*>(data.data()), data.size(), digest);
  return hex(digest, SHA256_DIGEST_LENGTH);
}

std::string sha256_file(const std::filesystem::path& file) {
  std::ifstream in(file, std::ios::binary);
  if (!in) throw std::runtime_error("sha256_file: cannot open " + file.string());
  std::ostringstream buf;
  buf << in.rdbuf();
  return sha256_hex(buf.str());
}

std::string utc_timestamp() {
  const std::time_t now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  std::tm tm{};
  gmtime_r(&now, &tm);
  std::ostringstream os;
  os << std::put_time(&tm, "%Y-%m-%dT%H:%M:%SZ");
  return os.str();
}

RunManifest::RunManifest(std::string subcommand, std::filesystem::path out_dir, std::uint64_t seed,
                         nlohmann::ordered_json parameters)
    : out_dir_(std::move(out_dir)) {
  doc_["subcommand"] = subcommand;
  doc_["parameters"] = std::move(parameters);
  doc_["master_seed"] = seed;
  doc_["timestamp"] = utc_timestamp();
  doc_["artifact_version"] = DREAMNET_VERSION;
  doc_["status"] = "running";
  doc_["outputs"] = nlohmann::ordered_json::array();
}

std::filesystem::path RunManifest::path() const {
  return out_dir_ / (doc_["subcommand"].get<std::string>() + "_manifest.json");
}

void RunManifest::write() const {
  std::filesystem::create_directories(out_dir_);
  std::ofstream out(path());
  if (!out) throw std::runtime_error("RunManifest: cannot write " + path().string());
  out << doc_.dump(2) << '\n';
}

void RunManifest::begin() { write(); }

void RunManifest::add_output(const std::filesystem::path& file) {
  nlohmann::ordered_json entry;
  entry["file"] = file.filename().string();
  entry["sha256"] = sha256_file(file);
  doc_["outputs"].push_back(entry);
}

void RunManifest::finish() {
  doc_["status"] = "complete";
  write();
}

bool verify_manifest(const std::filesystem::path& manifest, std::string* why) {
  std::ifstream in(manifest);
  if (!in) {
    if (why) *why = "cannot open manifest";
    return false;
  }
  const auto doc = nlohmann::ordered_json::parse(in);
  if (doc.value("status", "") != "complete") {
    if (why) *why = "manifest not complete";
    return false;
  }
  for (const auto& entry : doc.at("outputs")) {
    const auto file = manifest.parent_path() / entry.at("file").get<std::string>();
    if (!std::filesystem::exists(file) || sha256_file(file) != entry.at("sha256").get<std::string>()) {
      if (why) *why = "digest mismatch for " + file.string();
      return false;
    }
  }
  return true;
}

}  // namespace dreamnet
