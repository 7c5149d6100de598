#include "output.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <stdexcept>
#include <system_error>

namespace freelight::cli {

void Table::add(std::vector<double> row) {
  if (row.size() != columns.size()) throw std::logic_error("table row width does not match the header");
  rows.push_back(std::move(row));
}

std::string formatNumber(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  if (v == 0.0) return "0";  // folds -0
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

void atomicWrite(const std::filesystem::path& path, const std::string& content) {
  const std::filesystem::path tmp = path.string() + ".tmp";
  {
    std::ofstream f(tmp, std::ios::binary | std::ios::trunc);
    if (!f) throw std::runtime_error("cannot open " + tmp.string() + " for writing");
    f << content;
    f.flush();
    if (!f) throw std::runtime_error("write failed: " + tmp.string());
  }
  std::error_code ec;
  std::filesystem::rename(tmp, path, ec);
  if (ec) throw std::runtime_error("rename to " + path.string() + " failed: " + ec.message());
}

Writer::Writer(std::filesystem::path dir, std::string format, json meta)
    : dir_(std::move(dir)), format_(std::move(format)), meta_(std::move(meta)) {
  std::filesystem::create_directories(dir_);
}

void Writer::table(const std::string& stem, const Table& t) {
  json meta = meta_;
  meta["columns"] = t.columns;
  meta["rows"] = t.rows.size();
  if (format_ == "json") {
    json rows = json::array();
    for (const auto& r : t.rows) {
      json row = json::array();
      for (double v : r) row.push_back(std::isfinite(v) ? json(v) : json(nullptr));
      rows.push_back(std::move(row));
    }
    json doc{{"meta", meta}, {"columns", t.columns}, {"rows", std::move(rows)}};
    atomicWrite(dir_ / (stem + ".json"), doc.dump(1) + "\n");
    files_.push_back(stem + ".json");
    return;
  }
  std::string s;
  for (size_t i = 0; i < t.columns.size(); ++i) s += (i ? "," : "") + t.columns[i];
  s += "\n";
  for (const auto& r : t.rows) {
    for (size_t i = 0; i < r.size(); ++i) {
      if (i) s += ",";
      s += formatNumber(r[i]);
    }
    s += "\n";
  }
  atomicWrite(dir_ / (stem + ".csv"), s);
  atomicWrite(dir_ / (stem + ".csv.meta.json"), meta.dump(1) + "\n");
  files_.push_back(stem + ".csv");
  files_.push_back(stem + ".csv.meta.json");
}

void Writer::document(const std::string& stem, json body) {
  body["meta"] = meta_;
  atomicWrite(dir_ / (stem + ".json"), body.dump(1) + "\n");
  files_.push_back(stem + ".json");
}

}  // namespace freelight::cli
