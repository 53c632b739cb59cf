#pragma once

#include <regex>
#include <string>
#include <vector>

namespace svgtest {

struct Rect {
  double x, y, w, h;
};

struct Sheet {
  double width_mm = 0.0;
  double height_mm = 0.0;
  std::vector<Rect> rects;
};

inline Sheet parse(const std::string& svg) {
  Sheet s;
  static const std::regex root(R"(<svg[^>]*width="([0-9.]+)mm"[^>]*height="([0-9.]+)mm")");
  static const std::regex rect(
      R"re(<rect x="([-0-9.]+)" y="([-0-9.]+)" width="([0-9.]+)" height="([0-9.]+)"/>)re");
  std::smatch m;
  if (std::regex_search(svg, m, root)) {
    s.width_mm = std::stod(m[1]);
    s.height_mm = std::stod(m[2]);
  }
  for (auto it = std::sregex_iterator(svg.begin(), svg.end(), rect); it != std::sregex_iterator();
       ++it) {
    const auto& r = *it;
    s.rects.push_back({std::stod(r[1]), std::stod(r[2]), std::stod(r[3]), std::stod(r[4])});
  }
  return s;
}

}  // namespace svgtest
