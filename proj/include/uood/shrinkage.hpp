#pragma once

#include <string>
#include <string_view>

namespace uood {

enum class Shrinkage { LedoitWolf, None };

std::string to_string(Shrinkage s);
/// Accepts "ledoit_wolf" or "none"; throws Error(InvalidArgument) otherwise.
Shrinkage parse_shrinkage(std::string_view text);

}  // namespace uood
