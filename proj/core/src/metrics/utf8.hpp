#pragma once

#include <string>
#include <string_view>

namespace coex::metrics::detail {

/// Decodes UTF-8 into code points. Invalid bytes map one-to-one onto the
/// U+DC80..U+DCFF range so that distinct inputs stay distinct.
std::u32string decode_utf8(std::string_view text);

}  // namespace coex::metrics::detail
