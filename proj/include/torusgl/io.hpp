#pragma once

#include <cstdio>
#include <fstream>
#include <string>
#include <vector>

#include "torusgl/energetics.hpp"
#include "torusgl/errors.hpp"

#include <json.hpp>

namespace tgl {

// 12 significant digits, scientific; stable across runs and platforms.
inline std::string sci(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.11e", v);
  return buf;
}

inline void write_text_file(const std::string& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw config_error("cannot open output file: " + path);
  out << content;
  if (!out.good()) throw config_error("failed writing output file: " + path);
}

inline std::string csv_table(const std::string& header,
                             const std::vector<std::vector<std::string>>& rows,
                             const std::vector<std::string>& trailer = {}) {
  std::string out = header + "\n";
  for (const auto& row : rows) {
    for (size_t i = 0; i < row.size(); ++i) {
      if (i) out += ",";
      out += row[i];
    }
    out += "\n";
  }
  for (const auto& line : trailer) out += line + "\n";
  return out;
}

inline nlohmann::ordered_json report_to_json(const EnergyReport& rep) {
  nlohmann::ordered_json j;
  j["kinetic"] = rep.kinetic;
  j["potential"] = rep.potential;
  j["field"] = rep.field;
  j["internal"] = rep.internal;
  j["magnetic_gap"] = rep.magnetic_gap;
  j["total"] = rep.total;
  j["a_plus"] = rep.a_plus;
  j["bkn_defect"] = rep.bkn_defect;
  return j;
}

}  // namespace tgl
