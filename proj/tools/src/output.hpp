#pragma once

#include "config.hpp"

#include <filesystem>
#include <string>
#include <vector>

namespace freelight::cli {

struct Table {
  std::vector<std::string> columns;
  std::vector<std::vector<double>> rows;

  void add(std::vector<double> row);
};

// %.17g; non-finite values print as nan / inf / -inf.
std::string formatNumber(double v);

// Writes to a sibling temporary file and renames it over the target.
void atomicWrite(const std::filesystem::path& path, const std::string& content);

class Writer {
 public:
  Writer(std::filesystem::path dir, std::string format, json meta);

  // <stem>.csv plus <stem>.csv.meta.json, or a single <stem>.json.
  void table(const std::string& stem, const Table& t);
  // Always JSON, with the metadata block embedded.
  void document(const std::string& stem, json body);

  const std::vector<std::string>& files() const { return files_; }

 private:
  std::filesystem::path dir_;
  std::string format_;
  json meta_;
  std::vector<std::string> files_;
};

}  // namespace freelight::cli
