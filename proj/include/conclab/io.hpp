#pragma once

#include <string>

#include "conclab/spaces.hpp"

namespace conclab {

// {"factors": [[w,...], ...]}
ProductSpace space_from_json_text(const std::string& text);

// {"points": [[i,...], ...]} or
// {"predicate": "sum-le-k"|"sum-ge-k", "k": <int>} or
// {"predicate": "singleton", "point": [i,...]}
Event event_from_json_text(const ProductSpace& s, const std::string& text);

// shorthand ("uniform2^3", "biased-0.3^4"), inline JSON, or @path to a file
ProductSpace space_from_cli(const std::string& text);
Event event_from_cli(const ProductSpace& s, const std::string& text);

}  // namespace conclab
