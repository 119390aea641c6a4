#pragma once

#include <string>
#include <string_view>
#include <tuple>

namespace dalk::kg {

enum class Method { Generative, PairWise };

std::string_view to_string(Method method);
// Accepts "generative" and "pairwise".
Method parse_method(std::string_view s);

// A (head, relation, tail) assertion with provenance. Display strings keep
// their casing; identity uses text::normalize_name on each field.
struct Triple {
  std::string head;
  std::string relation;
  std::string tail;
  std::string source_doc;
  int year = 0;
  Method method = Method::Generative;
  bool generated = false;  // pair-wise "others" branch: free-text predicate

  friend bool operator==(const Triple&, const Triple&) = default;
};

struct TripleKey {
  std::string head;
  std::string relation;
  std::string tail;

  auto operator<=>(const TripleKey&) const = default;
};

TripleKey key_of(const Triple& t);

// Trims and collapses whitespace in the three display fields.
Triple tidy(Triple t);

// All three fields non-empty after normalization and head != tail.
bool is_valid(const Triple& t);

// "head->relation->tail"
std::string render_arrow(const Triple& t);

}  // namespace dalk::kg
