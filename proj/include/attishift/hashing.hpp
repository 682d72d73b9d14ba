#pragma once

#include <initializer_list>
#include <string>
#include <string_view>

namespace attishift {

std::string sha256_hex(std::string_view data);

// Hash of a tuple of fields. Each field is length-prefixed so that
// ("ab", "c") and ("a", "bc") never collide.
std::string cache_key(std::initializer_list<std::string_view> fields);

}  // namespace attishift
