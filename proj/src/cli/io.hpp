#pragma once

#include <string>
#include <vector>

#include "levyexit/cli.hpp"

namespace levyexit::cli {

// Path of the JSON sidecar / gnuplot stub next to a CSV file.
std::string sibling_path(const std::string& csv_path, const std::string& extension);

void write_csv(const std::string& path, const std::string& header_comment, const std::vector<Row>& rows);
void write_json(const std::string& path, const nlohmann::json& j);
void write_gnuplot(const std::string& path, const std::string& csv_path, const std::vector<Row>& rows);

}  // namespace levyexit::cli
