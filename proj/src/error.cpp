#include "mise/error.hpp"

#include "mise/classes.hpp"

#include <string>

namespace mise {

RecordError::RecordError(std::size_t line, const std::string& what)
    : InputError("line " + std::to_string(line) + ": " + what), line_(line) {}

std::string_view class_name(ContentClass c) {
    switch (c) {
    case ContentClass::advertisement: return "advertisement";
    case ContentClass::comic: return "comic";
    case ContentClass::editorial_cartoon: return "editorial_cartoon";
    case ContentClass::headline: return "headline";
    case ContentClass::illustration: return "illustration";
    case ContentClass::map: return "map";
    case ContentClass::photograph: return "photograph";
    }
    return "unknown";
}

std::optional<ContentClass> parse_class(std::string_view name) {
    for (ContentClass c : kAllClasses) {
        if (class_name(c) == name) return c;
    }
    return std::nullopt;
}

} // namespace mise
