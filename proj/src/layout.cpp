#include "flatpack/layout.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <stdexcept>

namespace flatpack {

namespace {

struct Box {
  double lo_x = 0, lo_y = 0, hi_x = 0, hi_y = 0;
};

Box bounds_of(const Polygon2& p) {
  Box b{p.outer[0].x, p.outer[0].y, p.outer[0].x, p.outer[0].y};
  for (auto v : p.outer) {
    b.lo_x = std::min(b.lo_x, v.x);
    b.lo_y = std::min(b.lo_y, v.y);
    b.hi_x = std::max(b.hi_x, v.x);
    b.hi_y = std::max(b.hi_y, v.y);
  }
  return b;
}

long long quant(double v) { return llround(v * 1e6); }

// Ordering key built from the part geometry alone, quantized far above
// placement noise, so congruent designs pack identically whatever the ids.
std::string content_key(const Polygon2& p) {
  std::string key;
  char buf[64];
  auto add = [&](Vec2 v) {
    std::snprintf(buf, sizeof buf, "%lld,%lld;", quant(v.x), quant(v.y));
    key += buf;
  };
  for (auto v : p.outer) add(v);
  for (const auto& h : p.holes) {
    key += "|";
    for (auto v : h) add(v);
  }
  return key;
}

}  // namespace

Polygon2 placed_polygon(const Polygon2& shape, const PlacedPart& placed) {
  auto map = [&](Vec2 v) -> Vec2 {
    Vec2 r = placed.rotated ? Vec2{-v.y, v.x} : v;
    return r + placed.offset;
  };
  Polygon2 out;
  out.outer.reserve(shape.outer.size());
  for (auto v : shape.outer) out.outer.push_back(map(v));
  for (const auto& h : shape.holes) {
    out.holes.emplace_back();
    out.holes.back().reserve(h.size());
    for (auto v : h) out.holes.back().push_back(map(v));
  }
  return out;
}

SheetLayout layout_sheets(const std::vector<std::string>& ids,
                          const std::vector<Polygon2>& shapes,
                          const FabricationSpec& spec) {
  if (ids.size() != shapes.size())
    throw std::logic_error("layout_sheets: one id per shape required");
  const double width = spec.sheet_width;
  const double height = spec.sheet_height;
  const double gap = spec.spacing;

  struct Item {
    size_t part = 0;
    bool rotated = false;
    double w = 0, h = 0;  // oriented bounding-box dimensions
    Vec2 lo;              // oriented bounding-box minimum corner
    std::string key;
  };
  std::vector<Item> items;
  items.reserve(shapes.size());
  for (size_t i = 0; i < shapes.size(); ++i) {
    auto b = bounds_of(shapes[i]);
    double w = b.hi_x - b.lo_x, h = b.hi_y - b.lo_y;
    bool fits_plain = w <= width + eps_len && h <= height + eps_len;
    bool fits_turned = h <= width + eps_len && w <= height + eps_len;
    if (!fits_plain && !fits_turned) {
      char msg[192];
      std::snprintf(msg, sizeof msg,
                    "part '%s' (%.3f x %.3f mm) fits no %g x %g mm sheet in "
                    "either orientation",
                    ids[i].c_str(), w, h, width, height);
      throw Error("PartTooLarge", msg);
    }
    Item it;
    it.part = i;
    // prefer the orientation with the lower shelf height
    it.rotated = fits_turned && (!fits_plain || quant(w) < quant(h));
    if (it.rotated) {
      it.w = h;
      it.h = w;
      it.lo = {-b.hi_y, b.lo_x};
    } else {
      it.w = w;
      it.h = h;
      it.lo = {b.lo_x, b.lo_y};
    }
    it.key = content_key(shapes[i]);
    items.push_back(std::move(it));
  }
  std::stable_sort(items.begin(), items.end(), [](const Item& a, const Item& b) {
    if (quant(a.h) != quant(b.h)) return quant(a.h) > quant(b.h);
    if (quant(a.w) != quant(b.w)) return quant(a.w) > quant(b.w);
    return a.key < b.key;
  });

  struct Shelf {
    size_t sheet = 0;
    double y = 0;
    double x = 0;  // next free position
  };
  std::vector<Shelf> shelves;
  std::vector<double> sheet_y;  // next free shelf line per sheet

  SheetLayout out;
  out.placements.reserve(items.size());
  for (const auto& it : items) {
    Shelf* target = nullptr;
    for (auto& shelf : shelves)
      if (shelf.x + it.w <= width + eps_len) {
        target = &shelf;
        break;
      }
    if (!target) {
      size_t sheet = 0;
      for (; sheet < sheet_y.size(); ++sheet)
        if (sheet_y[sheet] + it.h <= height + eps_len) break;
      if (sheet == sheet_y.size()) sheet_y.push_back(0);
      shelves.push_back({sheet, sheet_y[sheet], 0});
      sheet_y[sheet] += it.h + gap;
      target = &shelves.back();
    }
    PlacedPart pl;
    pl.part = it.part;
    pl.sheet = target->sheet;
    pl.rotated = it.rotated;
    pl.offset = Vec2{target->x, target->y} - it.lo;
    out.placements.push_back(pl);
    target->x += it.w + gap;
  }
  out.sheet_count = sheet_y.size();
  return out;
}

}  // namespace flatpack
