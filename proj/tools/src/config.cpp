#include "config.hpp"

#include <cmath>

namespace freelight::cli {

Fields::Fields(const json& j, std::string where) : obj_(j.is_null() ? json::object() : j), where_(std::move(where)) {
  if (!obj_.is_object()) throw ConfigError(where_ + ": expected a JSON object");
}

void Fields::fail(const std::string& key, const std::string& what) const {
  throw ConfigError(where_ + "." + key + ": " + what);
}

double Fields::number(const std::string& key, double def) {
  auto v = optionalNumber(key);
  return v ? *v : def;
}

std::optional<double> Fields::optionalNumber(const std::string& key) {
  used_.insert(key);
  if (!obj_.contains(key) || obj_[key].is_null()) return std::nullopt;
  const json& v = obj_[key];
  if (!v.is_number()) fail(key, "expected a number");
  const double d = v.get<double>();
  if (!std::isfinite(d)) fail(key, "must be finite");
  return d;
}

int Fields::integer(const std::string& key, int def) {
  used_.insert(key);
  if (!obj_.contains(key)) return def;
  const json& v = obj_[key];
  if (!v.is_number_integer()) fail(key, "expected an integer");
  return v.get<int>();
}

std::uint64_t Fields::u64(const std::string& key, std::uint64_t def) {
  used_.insert(key);
  if (!obj_.contains(key)) return def;
  const json& v = obj_[key];
  if (!v.is_number_unsigned() && !(v.is_number_integer() && v.get<std::int64_t>() >= 0))
    fail(key, "expected a non-negative integer");
  return v.get<std::uint64_t>();
}

bool Fields::boolean(const std::string& key, bool def) {
  used_.insert(key);
  if (!obj_.contains(key)) return def;
  if (!obj_[key].is_boolean()) fail(key, "expected true or false");
  return obj_[key].get<bool>();
}

std::string Fields::text(const std::string& key, const std::string& def) {
  used_.insert(key);
  if (!obj_.contains(key)) return def;
  if (!obj_[key].is_string()) fail(key, "expected a string");
  return obj_[key].get<std::string>();
}

std::string Fields::choice(const std::string& key, const std::string& def, const std::set<std::string>& allowed) {
  used_.insert(key);
  if (!obj_.contains(key)) return def;
  if (!obj_[key].is_string()) fail(key, "expected a string");
  std::string s = obj_[key].get<std::string>();
  if (!allowed.count(s)) {
    std::string opts;
    for (const auto& a : allowed) opts += (opts.empty() ? "" : ", ") + a;
    fail(key, "'" + s + "' is not one of {" + opts + "}");
  }
  return s;
}

std::vector<double> Fields::values(const std::string& key, const std::vector<double>& def) {
  used_.insert(key);
  if (!obj_.contains(key)) return def;
  const json& v = obj_[key];
  std::vector<double> out;
  if (v.is_number()) {
    out.push_back(v.get<double>());
  } else if (v.is_array()) {
    for (const auto& e : v) {
      if (!e.is_number()) fail(key, "list entries must be numbers");
      out.push_back(e.get<double>());
    }
  } else if (v.is_object()) {
    Fields r(v, where_ + "." + key);
    const double lo = r.number("min", 0.0), hi = r.number("max", 0.0);
    const int count = r.integer("count", 1);
    r.finish();
    if (!r.has("min") || !r.has("max")) fail(key, "range needs min and max");
    if (count < 1) fail(key, "count must be >= 1");
    if (hi < lo) fail(key, "max < min");
    for (int i = 0; i < count; ++i) out.push_back(count == 1 ? lo : lo + (hi - lo) * i / (count - 1));
  } else {
    fail(key, "expected a number, a list or a {min, max, count} range");
  }
  if (out.empty()) fail(key, "empty list");
  for (double d : out)
    if (!std::isfinite(d)) fail(key, "values must be finite");
  return out;
}

std::vector<int> Fields::integers(const std::string& key, const std::vector<int>& def) {
  used_.insert(key);
  if (!obj_.contains(key)) return def;
  const json& v = obj_[key];
  std::vector<int> out;
  if (v.is_number_integer()) {
    out.push_back(v.get<int>());
  } else if (v.is_array()) {
    for (const auto& e : v) {
      if (!e.is_number_integer()) fail(key, "list entries must be integers");
      out.push_back(e.get<int>());
    }
  } else if (v.is_object()) {
    Fields r(v, where_ + "." + key);
    const int lo = r.integer("min", 0), hi = r.integer("max", -1);
    r.finish();
    if (hi < lo) fail(key, "max < min");
    for (int i = lo; i <= hi; ++i) out.push_back(i);
  } else {
    fail(key, "expected an integer, a list or a {min, max} range");
  }
  if (out.empty()) fail(key, "empty list");
  return out;
}

Fields& Fields::object(const std::string& key) {
  used_.insert(key);
  if (obj_.contains(key) && !obj_[key].is_object()) fail(key, "expected an object");
  children_.emplace_back(obj_.contains(key) ? obj_[key] : json::object(), where_ + "." + key);
  return children_.back();
}

const json& Fields::raw(const std::string& key) {
  used_.insert(key);
  static const json null_value;
  return obj_.contains(key) ? obj_[key] : null_value;
}

void Fields::finish() const {
  for (const auto& [k, v] : obj_.items())
    if (!used_.count(k)) throw ConfigError(where_ + ": unknown key '" + k + "'");
  for (const auto& c : children_) c.finish();
}

}  // namespace freelight::cli
