#pragma once

#include <cmath>
#include <stack>
#include <string>
#include <vector>

#include "islab/common.hpp"

namespace islab::testutil {

// log-log least-squares slope
inline Real loglog_slope(const std::vector<Real>& x, const std::vector<Real>& y) {
  Real sx = 0, sy = 0, sxx = 0, sxy = 0;
  const Real n = static_cast<Real>(x.size());
  for (std::size_t i = 0; i < x.size(); ++i) {
    const Real lx = std::log(x[i]), ly = std::log(y[i]);
    sx += lx;
    sy += ly;
    sxx += lx * lx;
    sxy += lx * ly;
  }
  return (n * sxy - sx * sy) / (n * sxx - sx * sx);
}

// minimal XML well-formedness oracle: tags nest and attributes are quoted
inline bool xml_well_formed(const std::string& text) {
  std::stack<std::string> open;
  std::size_t pos = 0;
  bool seen_root = false;
  while ((pos = text.find('<', pos)) != std::string::npos) {
    const std::size_t end = text.find('>', pos);
    if (end == std::string::npos) return false;
    std::string tag = text.substr(pos + 1, end - pos - 1);
    pos = end + 1;
    if (tag.empty()) return false;
    if (tag[0] == '?' || tag[0] == '!') continue;
    const bool closing = tag[0] == '/';
    const bool selfclosed = tag.back() == '/';
    if (closing) tag = tag.substr(1);
    if (selfclosed) tag = tag.substr(0, tag.size() - 1);
    const std::string name = tag.substr(0, tag.find_first_of(" \t\n\r"));
    if (name.empty()) return false;
    // quotes inside the tag must pair up
    int quotes = 0;
    for (char c : tag)
      if (c == '"') ++quotes;
    if (quotes % 2) return false;
    if (closing) {
      if (open.empty() || open.top() != name) return false;
      open.pop();
    } else if (!selfclosed) {
      if (open.empty() && seen_root) return false;  // second root
      open.push(name);
      seen_root = true;
    }
  }
  return open.empty() && seen_root;
}

}  // namespace islab::testutil
