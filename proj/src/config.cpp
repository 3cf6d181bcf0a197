#include "twistlab/config.hpp"

#include <json.hpp>

#include <fstream>

namespace twistlab {

BaseCurve load_curve(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::invalid_argument("cannot open curve config: " + path);
  nlohmann::json j;
  try {
    in >> j;
  } catch (const nlohmann::json::exception& e) {
    throw std::invalid_argument("malformed curve config " + path + ": " + e.what());
  }

  BaseCurve c;
  try {
    auto read_int = [&](const char* key) -> BigInt {
      const auto& v = j.at(key);
      if (v.is_string()) return BigInt(v.get<std::string>());
      return BigInt(static_cast<long>(v.get<long long>()));
    };
    c.A = read_int("A");
    c.B = read_int("B");
    c.conductor = j.at("conductor").get<long>();
    c.base_root_number = j.at("base_root_number").get<int>();
    c.label = j.value("label", std::string{});
    c.height_margin_c = j.value("height_margin_C", 0.0);
    c.root_rule_path = j.value("root_rule_path", std::string{});
    if (j.contains("root_rule")) {
      const auto& r = j["root_rule"];
      c.rule.modulus = r.at("modulus").get<long>();
      c.rule.reflect_negative = r.value("reflect_negative", false);
      for (auto& [res, w] : r.at("entries").items())
        c.rule.entries.emplace_back(std::stol(res), w.get<int>());
      if (c.rule.modulus <= 0) throw std::invalid_argument("root_rule.modulus must be positive");
    }
  } catch (const nlohmann::json::exception& e) {
    throw std::invalid_argument("invalid curve config " + path + ": " + e.what());
  }
  c.validate();
  return c;
}

}  // namespace twistlab
