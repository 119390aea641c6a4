#include "dalk/triple.hpp"

#include "dalk/error.hpp"
#include "dalk/text.hpp"

namespace dalk::kg {

std::string_view to_string(Method method) {
  return method == Method::Generative ? "generative" : "pairwise";
}

Method parse_method(std::string_view s) {
  if (s == "generative") return Method::Generative;
  if (s == "pairwise") return Method::PairWise;
  throw Error(ErrorCode::ConfigError, "unknown construction method '" + std::string(s) + "'");
}

TripleKey key_of(const Triple& t) {
  return {text::normalize_name(t.head), text::normalize_name(t.relation),
          text::normalize_name(t.tail)};
}

Triple tidy(Triple t) {
  t.head = text::collapse_whitespace(t.head);
  t.relation = text::collapse_whitespace(t.relation);
  t.tail = text::collapse_whitespace(t.tail);
  return t;
}

bool is_valid(const Triple& t) {
  const auto k = key_of(t);
  return !k.head.empty() && !k.relation.empty() && !k.tail.empty() && k.head != k.tail;
}

std::string render_arrow(const Triple& t) {
  return t.head + "->" + t.relation + "->" + t.tail;
}

}  // namespace dalk::kg
