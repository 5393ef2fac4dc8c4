#pragma once

// Small helpers shared by the plain-text writers: round-trip number
// formatting, header token escaping and content digests.

#include <cstdint>
#include <cstdio>
#include <map>
#include <sstream>
#include <string>
#include <string_view>

namespace hearcorners {

inline constexpr const char* tool_version = "1.0.0";

/// 17 significant digits: enough to round-trip any double.
inline std::string format_double(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

/// FNV-1a 64-bit digest, hex encoded. Used to tie outputs to their inputs.
inline std::string fnv1a64(std::string_view bytes) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : bytes) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

/// Header values are whitespace-free tokens; escape spaces and '%'.
inline std::string escape_token(std::string_view s) {
  std::string out;
  for (char c : s) {
    if (c == '%') out += "%25";
    else if (c == ' ') out += "%20";
    else if (c == '\t') out += "%09";
    else if (c == '\n') out += "%0A";
    else out += c;
  }
  return out.empty() ? std::string("-") : out;
}

inline std::string unescape_token(std::string_view s) {
  if (s == "-") return {};
  std::string out;
  for (std::size_t i = 0; i < s.size(); ++i) {
    if (s[i] == '%' && i + 2 < s.size()) {
      const std::string hex(s.substr(i + 1, 2));
      out += static_cast<char>(std::stoi(hex, nullptr, 16));
      i += 2;
    } else {
      out += s[i];
    }
  }
  return out;
}

/// Parses whitespace separated key=value tokens from a '#' header line.
inline void parse_header_tokens(std::string_view line, std::map<std::string, std::string>& into) {
  std::istringstream ss{std::string(line)};
  std::string tok;
  while (ss >> tok) {
    const auto eq = tok.find('=');
    if (eq == std::string::npos || eq == 0) continue;
    into[tok.substr(0, eq)] = unescape_token(tok.substr(eq + 1));
  }
}

}  // namespace hearcorners
