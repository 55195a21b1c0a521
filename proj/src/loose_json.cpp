// Copyright 2026 The seqrec Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "seqrec/loose_json.hpp"

#include <cctype>
#include <cstdint>

namespace seqrec {
namespace {

int hex_value(char c) {
  if (c >= '0' && c <= '9') return c - '0';
  if (c >= 'a' && c <= 'f') return c - 'a' + 10;
  if (c >= 'A' && c <= 'F') return c - 'A' + 10;
  return -1;
}

bool read_hex(std::string_view text, std::size_t pos, std::size_t width, std::uint32_t& out) {
  if (pos + width > text.size()) return false;
  out = 0;
  for (std::size_t i = 0; i < width; ++i) {
    int v = hex_value(text[pos + i]);
    if (v < 0) return false;
    out = out * 16 + static_cast<std::uint32_t>(v);
  }
  return true;
}

bool valid_utf8(std::string_view bytes) {
  std::size_t i = 0;
  while (i < bytes.size()) {
    auto c = static_cast<unsigned char>(bytes[i]);
    std::size_t extra;
    if (c < 0x80) {
      extra = 0;
    } else if ((c & 0xE0) == 0xC0 && c >= 0xC2) {
      extra = 1;
    } else if ((c & 0xF0) == 0xE0) {
      extra = 2;
    } else if ((c & 0xF8) == 0xF0 && c <= 0xF4) {
      extra = 3;
    } else {
      return false;
    }
    if (i + extra >= bytes.size() && extra > 0) return false;
    for (std::size_t k = 1; k <= extra; ++k) {
      if ((static_cast<unsigned char>(bytes[i + k]) & 0xC0) != 0x80) return false;
    }
    i += extra + 1;
  }
  return true;
}

void append_escaped_byte(std::string& out, unsigned char c) {
  static constexpr char kHex[] = "0123456789abcdef";
  out += "\\u00";
  out.push_back(kHex[c >> 4]);
  out.push_back(kHex[c & 0xF]);
}

// Bytes from consecutive \xHH escapes. Python 2 reprs of UTF-8 byte strings
// spell multi-byte characters this way, so a run that decodes as UTF-8 is kept
// as UTF-8; anything else is read as Latin-1.
void flush_escaped_bytes(std::string& pending, std::string& out) {
  if (pending.empty()) return;
  const bool utf8 = valid_utf8(pending);
  for (char ch : pending) {
    auto c = static_cast<unsigned char>(ch);
    if (c < 0x20 || c == '"' || c == '\\' || (!utf8 && c >= 0x80)) {
      append_escaped_byte(out, c);
    } else {
      out.push_back(ch);
    }
  }
  pending.clear();
}

void append_utf8(std::string& out, std::uint32_t cp) {
  if (cp < 0x80) {
    if (cp < 0x20 || cp == '"' || cp == '\\') {
      append_escaped_byte(out, static_cast<unsigned char>(cp));
    } else {
      out.push_back(static_cast<char>(cp));
    }
  } else if (cp < 0x800) {
    out.push_back(static_cast<char>(0xC0 | (cp >> 6)));
    out.push_back(static_cast<char>(0x80 | (cp & 0x3F)));
  } else if (cp < 0x10000) {
    out.push_back(static_cast<char>(0xE0 | (cp >> 12)));
    out.push_back(static_cast<char>(0x80 | ((cp >> 6) & 0x3F)));
    out.push_back(static_cast<char>(0x80 | (cp & 0x3F)));
  } else {
    out.push_back(static_cast<char>(0xF0 | (cp >> 18)));
    out.push_back(static_cast<char>(0x80 | ((cp >> 12) & 0x3F)));
    out.push_back(static_cast<char>(0x80 | ((cp >> 6) & 0x3F)));
    out.push_back(static_cast<char>(0x80 | (cp & 0x3F)));
  }
}

// Copies the string literal starting at text[pos] (an opening quote) into out
// as a strict JSON string. Advances pos past the closing quote.
bool copy_string(std::string_view text, std::size_t& pos, std::string& out) {
  const char quote = text[pos++];
  std::string pending;
  out.push_back('"');
  while (pos < text.size()) {
    const char ch = text[pos];
    if (ch == quote) {
      flush_escaped_bytes(pending, out);
      out.push_back('"');
      ++pos;
      return true;
    }
    if (ch != '\\') {
      flush_escaped_bytes(pending, out);
      auto c = static_cast<unsigned char>(ch);
      if (ch == '"') {
        out += "\\\"";
      } else if (c < 0x20) {
        append_escaped_byte(out, c);
      } else {
        out.push_back(ch);
      }
      ++pos;
      continue;
    }
    if (pos + 1 >= text.size()) return false;
    const char esc = text[pos + 1];
    std::uint32_t code = 0;
    if (esc == 'x') {
      if (!read_hex(text, pos + 2, 2, code)) return false;
      pending.push_back(static_cast<char>(code));
      pos += 4;
      continue;
    }
    flush_escaped_bytes(pending, out);
    switch (esc) {
      case '\\': out += "\\\\"; break;
      case '\'': out.push_back('\''); break;
      case '"': out += "\\\""; break;
      case '/': out.push_back('/'); break;
      case 'n': case 't': case 'r': case 'b': case 'f':
        out.push_back('\\');
        out.push_back(esc);
        break;
      case '0': append_escaped_byte(out, 0x00); break;
      case 'a': append_escaped_byte(out, 0x07); break;
      case 'v': append_escaped_byte(out, 0x0b); break;
      case '\n': break;
      case 'u':
        if (!read_hex(text, pos + 2, 4, code)) return false;
        out += "\\u";
        out.append(text.substr(pos + 2, 4));
        pos += 6;
        continue;
      case 'U':
        if (!read_hex(text, pos + 2, 8, code) || code > 0x10FFFF) return false;
        append_utf8(out, code);
        pos += 10;
        continue;
      default:
        // Python keeps the backslash of an unknown escape.
        out += "\\\\";
        out.push_back(esc);
        break;
    }
    pos += 2;
  }
  return false;
}

bool ident_char(char c) { return std::isalnum(static_cast<unsigned char>(c)) || c == '_'; }

}  // namespace

std::optional<std::string> normalize_loose_literal(std::string_view text) {
  std::string out;
  out.reserve(text.size() + 16);
  std::size_t pos = 0;
  while (pos < text.size()) {
    const char c = text[pos];
    if (c == '\'' || c == '"') {
      if (!copy_string(text, pos, out)) return std::nullopt;
      continue;
    }
    if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') {
      std::size_t end = pos;
      while (end < text.size() && ident_char(text[end])) ++end;
      std::string_view ident = text.substr(pos, end - pos);
      const bool before_quote = end < text.size() && (text[end] == '\'' || text[end] == '"');
      if (ident == "True") {
        out += "true";
      } else if (ident == "False") {
        out += "false";
      } else if (ident == "None") {
        out += "null";
      } else if (before_quote && (ident == "u" || ident == "U" || ident == "b")) {
        // string prefix; the literal itself follows
      } else {
        out.append(ident);
      }
      pos = end;
      continue;
    }
    out.push_back(c);
    ++pos;
  }
  return out;
}

std::optional<nlohmann::json> parse_loose_object(std::string_view text) {
  auto normalized = normalize_loose_literal(text);
  if (!normalized) return std::nullopt;
  auto value = nlohmann::json::parse(*normalized, nullptr, /*allow_exceptions=*/false);
  if (value.is_discarded() || !value.is_object()) return std::nullopt;
  return value;
}

}  // namespace seqrec
