#include "selfsim/io.hpp"

#include <cstdio>
#include <fstream>

namespace selfsim {

std::string format_double(double x) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%.17g", x);
    // Prefer the shortest representation that round-trips.
    for (int prec = 1; prec < 17; ++prec) {
        char probe[32];
        std::snprintf(probe, sizeof(probe), "%.*g", prec, x);
        if (std::strtod(probe, nullptr) == x) return probe;
    }
    return buf;
}

IfsSystem load_system(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) raise(Errc::io_failure, "cannot open system file " + path.string());
    nlohmann::json j;
    try {
        in >> j;
    } catch (const nlohmann::json::exception& e) {
        raise(Errc::io_failure, "cannot parse " + path.string() + ": " + e.what());
    }
    try {
        cplx lambda{j.at("lambda_re").get<double>(), j.at("lambda_im").get<double>()};
        std::vector<cplx> translations;
        for (const auto& t : j.at("translations"))
            translations.emplace_back(t.at(0).get<double>(), t.at(1).get<double>());
        std::vector<double> probs = j.at("probs").get<std::vector<double>>();
        return validate_system(lambda, std::move(translations), std::move(probs));
    } catch (const nlohmann::json::exception& e) {
        raise(Errc::io_failure, "bad system schema in " + path.string() + ": " + e.what());
    }
}

nlohmann::json system_to_json(const IfsSystem& sys) {
    nlohmann::json j;
    j["lambda_re"] = sys.lambda.real();
    j["lambda_im"] = sys.lambda.imag();
    j["translations"] = nlohmann::json::array();
    for (cplx a : sys.translations) j["translations"].push_back({a.real(), a.imag()});
    j["probs"] = sys.probs;
    j["r"] = sys.r;
    j["alpha_re"] = sys.alpha.real();
    j["alpha_im"] = sys.alpha.imag();
    return j;
}

nlohmann::json make_report(const std::string& subcommand, const nlohmann::json& config) {
    nlohmann::json j;
    j["schema_version"] = kSchemaVersion;
    j["library_version"] = kLibraryVersion;
    j["subcommand"] = subcommand;
    j["config"] = config;
    return j;
}

void write_json(const std::filesystem::path& path, const nlohmann::json& j) {
    std::ofstream out(path);
    if (!out) raise(Errc::io_failure, "cannot write " + path.string());
    out << j.dump(2) << "\n";
}

CsvWriter::CsvWriter(const std::filesystem::path& path, const std::vector<std::string>& columns,
                     const nlohmann::json& config)
    : path_(path) {
    buffer_ += "# schema_version=" + std::to_string(kSchemaVersion) +
               " library_version=" + kLibraryVersion + " config=" + config.dump() + "\n";
    for (std::size_t i = 0; i < columns.size(); ++i) {
        if (i) buffer_ += ",";
        buffer_ += columns[i];
    }
    buffer_ += "\n";
}

void CsvWriter::row(const std::vector<double>& values) {
    for (std::size_t i = 0; i < values.size(); ++i) {
        if (i) buffer_ += ",";
        buffer_ += format_double(values[i]);
    }
    buffer_ += "\n";
}

void CsvWriter::raw_row(const std::string& line) {
    buffer_ += line;
    buffer_ += "\n";
}

CsvWriter::~CsvWriter() {
    std::ofstream out(path_);
    if (out) out << buffer_;
}

}  // namespace selfsim
