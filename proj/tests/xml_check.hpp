#pragma once

// Minimal strict well-formedness scanner for the emitted SVG: balanced tags,
// quoted attributes, no stray '<'/'&' in character data.

#include <cctype>
#include <string>
#include <string_view>
#include <vector>

namespace xmlcheck {

inline bool well_formed(std::string_view text, std::string* error = nullptr) {
  const auto fail = [&](const std::string& why) {
    if (error) *error = why;
    return false;
  };
  std::vector<std::string> stack;
  size_t i = 0;
  const size_t n = text.size();
  // Optional XML declaration.
  if (text.substr(0, 5) == "<?xml") {
    const size_t end = text.find("?>", 5);
    if (end == std::string_view::npos) return fail("unterminated declaration");
    i = end + 2;
  }
  while (i < n) {
    const char c = text[i];
    if (c == '<') {
      if (i + 1 >= n) return fail("dangling '<'");
      if (text[i + 1] == '/') {
        size_t j = text.find('>', i);
        if (j == std::string_view::npos) return fail("unterminated close tag");
        const std::string name(text.substr(i + 2, j - i - 2));
        if (stack.empty() || stack.back() != name) {
          return fail("mismatched close tag '" + name + "'");
        }
        stack.pop_back();
        i = j + 1;
        continue;
      }
      // Open tag: parse name then attributes.
      size_t j = i + 1;
      if (j >= n || !(std::isalpha(static_cast<unsigned char>(text[j]))))
        return fail("bad tag start");
      while (j < n && (std::isalnum(static_cast<unsigned char>(text[j])) ||
                       text[j] == ':' || text[j] == '-' || text[j] == '_')) {
        ++j;
      }
      const std::string name(text.substr(i + 1, j - i - 1));
      bool self_closed = false;
      while (j < n) {
        while (j < n && std::isspace(static_cast<unsigned char>(text[j]))) ++j;
        if (j >= n) return fail("unterminated tag");
        if (text[j] == '>') {
          ++j;
          break;
        }
        if (text[j] == '/') {
          if (j + 1 >= n || text[j + 1] != '>') return fail("bad self-close");
          self_closed = true;
          j += 2;
          break;
        }
        // Attribute name.
        if (!std::isalpha(static_cast<unsigned char>(text[j])))
          return fail("bad attribute in <" + name + ">");
        while (j < n && (std::isalnum(static_cast<unsigned char>(text[j])) ||
                         text[j] == '-' || text[j] == ':' || text[j] == '_')) {
          ++j;
        }
        if (j >= n || text[j] != '=') return fail("attribute missing '='");
        ++j;
        if (j >= n || text[j] != '"') return fail("attribute value not quoted");
        ++j;
        while (j < n && text[j] != '"' && text[j] != '<') ++j;
        if (j >= n || text[j] != '"') return fail("unterminated attribute");
        ++j;
      }
      if (!self_closed) stack.push_back(name);
      i = j;
      continue;
    }
    if (c == '>') return fail("stray '>'");
    if (c == '&') {
      const size_t j = text.find(';', i);
      if (j == std::string_view::npos || j - i > 6) return fail("bare '&'");
      i = j + 1;
      continue;
    }
    ++i;
  }
  if (!stack.empty()) return fail("unclosed tag '" + stack.back() + "'");
  return true;
}

inline int count_occurrences(std::string_view text, std::string_view needle) {
  int count = 0;
  size_t pos = 0;
  while ((pos = text.find(needle, pos)) != std::string_view::npos) {
    ++count;
    pos += needle.size();
  }
  return count;
}

}  // namespace xmlcheck
