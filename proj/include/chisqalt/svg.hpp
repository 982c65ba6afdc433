#ifndef CHISQALT_SVG_HPP
#define CHISQALT_SVG_HPP

#include <string>
#include <string_view>

#include "chisqalt/power.hpp"

namespace chisqalt {

/// Deterministic SVG of a table: one polyline (or bar group) per method over
/// the parameter grid, legend ordered by mean power, RG highlighted. Summary
/// rows (study name ending in "-mean") are ignored. Throws on an empty table.
std::string render_svg(const PowerTable& table, std::string_view style = "line");

}  // namespace chisqalt

#endif  // CHISQALT_SVG_HPP
