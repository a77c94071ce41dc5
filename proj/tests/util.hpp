#pragma once

#include <fstream>
#include <sstream>
#include <stdexcept>
#include <string>

inline std::string read_asset(const std::string& name) {
  std::ifstream in(std::string(STACKLAB_ASSET_DIR) + "/" + name);
  if (!in) throw std::runtime_error("missing asset: " + name);
  std::ostringstream out;
  out << in.rdbuf();
  return out.str();
}
