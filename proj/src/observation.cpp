#include "psaf/observation.hpp"

#include <charconv>
#include <cmath>

#include "psaf/errors.hpp"

namespace psaf {

StateKey state_key(const Observation& obs) {
  StateKey key;
  key.offsets.reserve(obs.values.size());
  for (double v : obs.values) {
    key.offsets.push_back(static_cast<int>(std::lround(v * obs.scale)));
  }
  return key;
}

std::string StateKey::to_string() const {
  std::string out;
  for (std::size_t i = 0; i < offsets.size(); ++i) {
    if (i > 0) out += ';';
    out += std::to_string(offsets[i]);
  }
  return out;
}

StateKey StateKey::parse(std::string_view text) {
  StateKey key;
  if (text.empty()) return key;
  std::size_t pos = 0;
  while (true) {
    std::size_t end = text.find_first_of(";,", pos);
    std::string_view token = text.substr(pos, end == std::string_view::npos ? end : end - pos);
    while (!token.empty() && token.front() == ' ') token.remove_prefix(1);
    while (!token.empty() && token.back() == ' ') token.remove_suffix(1);
    int value = 0;
    auto [ptr, ec] = std::from_chars(token.data(), token.data() + token.size(), value);
    if (ec != std::errc() || ptr != token.data() + token.size() || token.empty()) {
      throw std::invalid_argument("malformed state key '" + std::string(text) + "'");
    }
    key.offsets.push_back(value);
    if (end == std::string_view::npos) break;
    pos = end + 1;
  }
  return key;
}

}  // namespace psaf
