#ifndef CARDEX_LABEL_HPP
#define CARDEX_LABEL_HPP

#include <optional>
#include <string>

namespace cardex {

/// Token label alphabet: CARD marks a correct cardinality mention, O
/// everything else. Index order matches the model-file column order.
enum class Label : int { CARD = 0, O = 1 };

inline constexpr int kNumLabels = 2;

inline const char* to_string(Label label) { return label == Label::CARD ? "CARD" : "O"; }

inline std::optional<Label> label_from_string(const std::string& name) {
  if (name == "CARD") return Label::CARD;
  if (name == "O") return Label::O;
  return std::nullopt;
}

}  // namespace cardex

#endif  // CARDEX_LABEL_HPP
