#pragma once

#include <string_view>

namespace cbstream::data {

/// Contents of a file under data/, compiled into the library.
/// Throws std::out_of_range for unknown names.
std::string_view bundled_file(std::string_view name);

}  // namespace cbstream::data
