#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <optional>
#include <string_view>

namespace mise {

/// The seven visual-content classes, in the fixed (alphabetical) order used
/// for channel concatenation.
enum class ContentClass : std::uint8_t {
    advertisement = 0,
    comic,
    editorial_cartoon,
    headline,
    illustration,
    map,
    photograph,
};

inline constexpr std::size_t kClassCount = 7;

inline constexpr std::array<ContentClass, kClassCount> kAllClasses = {
    ContentClass::advertisement, ContentClass::comic,        ContentClass::editorial_cartoon,
    ContentClass::headline,      ContentClass::illustration, ContentClass::map,
    ContentClass::photograph,
};

std::string_view class_name(ContentClass c);
std::optional<ContentClass> parse_class(std::string_view name);

inline constexpr std::size_t class_index(ContentClass c) { return static_cast<std::size_t>(c); }

} // namespace mise
