#pragma once

#include <json.hpp>

#include <cstdint>
#include <filesystem>
#include <string>
#include <string_view>

namespace dreamnet {

std::string sha256_hex(std::string_view data);
std::string sha256_file(const std::filesystem::path& file);

/// JSON run record: subcommand, parameters, master seed, timestamp, version, output digests.
/// begin() writes it before any result; finish() rewrites it with the digests.
class RunManifest {
 public:
  RunManifest(std::string subcommand, std::filesystem::path out_dir, std::uint64_t seed,
              nlohmann::ordered_json parameters);

  std::filesystem::path path() const;
  void begin();
  void add_output(const std::filesystem::path& file);
  void finish();
  const nlohmann::ordered_json& json() const { return doc_; }

 private:
  void write() const;

  std::filesystem::path out_dir_;
  nlohmann::ordered_json doc_;
};

/// Recomputes every digest listed in the manifest. On failure `why` names the file.
bool verify_manifest(const std::filesystem::path& manifest, std::string* why = nullptr);

std::string utc_timestamp();

}  // namespace dreamnet
