#pragma once

#include <string>
#include <string_view>

namespace infodemic {

// Porter (1980) suffix-stripping stemmer, steps 1a through 5b.
//
// Follows Martin Porter's reference C implementation, including its two
// documented departures from the published paper ("bli" -> "ble" in step 2
// and the extra "logi" -> "log" rule), so output matches the reference
// vocabulary/output pair. Input is expected lowercase; words of length <= 2
// are returned unchanged. Characters other than a, e, i, o, u and y are
// treated as consonants.
std::string porter_stem(std::string_view word);

}  // namespace infodemic
