#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include "json.hpp"
#include "selfsim/ifs.hpp"

namespace selfsim {

inline constexpr const char* kLibraryVersion = "0.1.0";
inline constexpr int kSchemaVersion = 1;

/// Shortest round-trip decimal form of a double (%.17g trimmed).
std::string format_double(double x);

/// System definition file: keys lambda_re, lambda_im,
/// translations [[re, im], ...], probs [...].
IfsSystem load_system(const std::filesystem::path& path);
nlohmann::json system_to_json(const IfsSystem& sys);

/// Report skeleton carrying schema_version, library_version and the full
/// run configuration; callers add result fields.
nlohmann::json make_report(const std::string& subcommand, const nlohmann::json& config);

void write_json(const std::filesystem::path& path, const nlohmann::json& j);

/// CSV writer with one comment header line embedding config and version.
class CsvWriter {
  public:
    CsvWriter(const std::filesystem::path& path, const std::vector<std::string>& columns,
              const nlohmann::json& config);
    ~CsvWriter();

    void row(const std::vector<double>& values);
    void raw_row(const std::string& line);

  private:
    std::string buffer_;
    std::filesystem::path path_;
};

}  // namespace selfsim
