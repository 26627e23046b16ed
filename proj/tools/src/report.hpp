// SPDX-License-Identifier: MIT
#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include <json.hpp>

#include "bernstein/linalg.hpp"
#include "bernstein/run_config.hpp"
#include "bernstein/structure.hpp"

namespace bernstein::cli {

using nlohmann::json;

json to_json(const Vec& v);
json to_json(const Mat& m);
json to_json(const ConstraintPoint& pt);
json to_json(const BoundCertificate& c);

/// Every effective setting, defaults included.
json config_json(const RunConfig& cfg);

/// Fixed-point with nine decimals; "-0.000000000" prints as 0.
std::string fixed9(double v);
/// Shortest text that reads back to the same double.
std::string exact(double v);

class Csv {
public:
    explicit Csv(std::vector<std::string> header);
    void row(const std::vector<std::string>& cells);
    const std::string& text() const noexcept { return text_; }

private:
    std::size_t columns_;
    std::string text_;
};

/// Writes text to dir/name and returns the full path.
std::string write_artifact(const std::filesystem::path& dir, const std::string& name, const std::string& text);

}  // namespace bernstein::cli
