#pragma once

// Shared helpers for the test suites: locating repo data files and reading
// JSON fixtures.

#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include "json.hpp"

namespace ipg_test {

inline std::string data_path(const std::string& name) {
    return std::string(IPG_DATA_DIR) + "/" + name;
}

inline std::string fixture_path(const std::string& name) {
    return std::string(IPG_BUILD_DIR) + "/fixtures/" + name;
}

inline std::string golden_path(const std::string& name) {
    return std::string(IPG_TEST_DIR) + "/golden/" + name;
}

// A per-build scratch directory for files a test writes itself.
inline std::string scratch_path(const std::string& name) {
    auto dir = std::filesystem::path(IPG_BUILD_DIR) / "scratch";
    std::filesystem::create_directories(dir);
    return (dir / name).string();
}

inline std::string read_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("cannot open " + path);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

inline nlohmann::json load_json(const std::string& path) {
    return nlohmann::json::parse(read_file(path));
}

inline nlohmann::ordered_json load_ordered_json(const std::string& path) {
    return nlohmann::ordered_json::parse(read_file(path));
}

} // namespace ipg_test
