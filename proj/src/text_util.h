#ifndef LLMDEP_SRC_TEXT_UTIL_H_
#define LLMDEP_SRC_TEXT_UTIL_H_

#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace llmdep {

std::string_view TrimLeft(std::string_view s);
std::string_view TrimRight(std::string_view s);
std::string_view Trim(std::string_view s);

std::vector<std::string_view> SplitTabs(std::string_view line);
// Splits on LF, dropping a trailing CR from each line. A final empty line
// after a terminating LF is not returned.
std::vector<std::string_view> SplitLines(std::string_view text);

// Parses a base-10 int that spans the whole string.
std::optional<int> ParseInt(std::string_view s);

// Replaces every "{key}" in `tmpl` with its value.
std::string Substitute(
    std::string_view tmpl,
    const std::vector<std::pair<std::string_view, std::string_view>>& values);

// Decodes UTF-8 into code points. Bytes that do not start a valid sequence
// decode to themselves so that any input yields a deterministic result.
std::u32string DecodeUtf8(std::string_view s);

}  // namespace llmdep

#endif  // LLMDEP_SRC_TEXT_UTIL_H_
