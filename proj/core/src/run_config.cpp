#include "dalk/run_config.hpp"

#include <cctype>
#include <fstream>
#include <sstream>
#include <type_traits>

#include "dalk/error.hpp"
#include "dalk/text.hpp"

namespace dalk {

namespace {

[[noreturn]] void bad(std::size_t line, const std::string& why) {
  throw Error(ErrorCode::ConfigError, "line " + std::to_string(line) + ": " + why);
}

class ValueParser {
 public:
  ValueParser(std::string_view s, std::size_t line) : s_(s), line_(line) {}

  nlohmann::json parse_all() {
    auto v = value();
    skip_ws();
    if (pos_ != s_.size()) bad(line_, "trailing characters after value");
    return v;
  }

 private:
  void skip_ws() {
    while (pos_ < s_.size() && (s_[pos_] == ' ' || s_[pos_] == '\t')) ++pos_;
  }

  nlohmann::json value() {
    skip_ws();
    if (pos_ >= s_.size()) bad(line_, "missing value");
    const char c = s_[pos_];
    if (c == '"' || c == '\'') return quoted(c);
    if (c == '[') return array();
    return bare();
  }

  nlohmann::json quoted(char quote) {
    ++pos_;
    std::string out;
    while (pos_ < s_.size() && s_[pos_] != quote) {
      char c = s_[pos_++];
      if (quote == '"' && c == '\\' && pos_ < s_.size()) {
        const char e = s_[pos_++];
        switch (e) {
          case 'n': c = '\n'; break;
          case 't': c = '\t'; break;
          case '\\': c = '\\'; break;
          case '"': c = '"'; break;
          default: bad(line_, std::string("unsupported escape \\") + e);
        }
      }
      out += c;
    }
    if (pos_ >= s_.size()) bad(line_, "unterminated string");
    ++pos_;
    return out;
  }

  nlohmann::json array() {
    ++pos_;
    auto out = nlohmann::json::array();
    skip_ws();
    if (pos_ < s_.size() && s_[pos_] == ']') {
      ++pos_;
      return out;
    }
    for (;;) {
      out.push_back(value());
      skip_ws();
      if (pos_ >= s_.size()) bad(line_, "unterminated array");
      if (s_[pos_] == ']') {
        ++pos_;
        return out;
      }
      if (s_[pos_] != ',') bad(line_, "expected ',' in array");
      ++pos_;
    }
  }

  nlohmann::json bare() {
    const auto start = pos_;
    while (pos_ < s_.size() && s_[pos_] != ',' && s_[pos_] != ']' && s_[pos_] != ' ' &&
           s_[pos_] != '\t') {
      ++pos_;
    }
    const std::string tok(s_.substr(start, pos_ - start));
    if (tok == "true") return true;
    if (tok == "false") return false;
    try {
      std::size_t used = 0;
      if (tok.find_first_of(".eE") == std::string::npos) {
        const long long v = std::stoll(tok, &used);
        if (used == tok.size()) return v;
      } else {
        const double v = std::stod(tok, &used);
        if (used == tok.size()) return v;
      }
    } catch (const std::exception&) {
    }
    bad(line_, "cannot read value '" + tok + "'");
  }

  std::string_view s_;
  std::size_t line_;
  std::size_t pos_ = 0;
};

std::string strip_comment(const std::string& line) {
  char quote = 0;
  for (std::size_t i = 0; i < line.size(); ++i) {
    const char c = line[i];
    if (quote) {
      if (c == '\\' && quote == '"') {
        ++i;
      } else if (c == quote) {
        quote = 0;
      }
    } else if (c == '"' || c == '\'') {
      quote = c;
    } else if (c == '#') {
      return line.substr(0, i);
    }
  }
  return line;
}

template <class T>
T get_as(const ConfigTable::value_type& kv) {
  try {
    if constexpr (std::is_same_v<T, double>) {
      if (!kv.second.is_number()) throw std::invalid_argument("number expected");
    } else if constexpr (std::is_integral_v<T> && !std::is_same_v<T, bool>) {
      if (!kv.second.is_number_integer()) throw std::invalid_argument("integer expected");
      if (std::is_unsigned_v<T> && kv.second.get<long long>() < 0) {
        throw std::invalid_argument("non-negative integer expected");
      }
    } else if constexpr (std::is_same_v<T, std::vector<std::size_t>>) {
      if (!kv.second.is_array()) throw std::invalid_argument("array expected");
      for (const auto& v : kv.second) {
        if (!v.is_number_integer() || v.get<long long>() < 0) {
          throw std::invalid_argument("non-negative integers expected");
        }
      }
    } else if constexpr (std::is_same_v<T, bool>) {
      if (!kv.second.is_boolean()) throw std::invalid_argument("boolean expected");
    }
    return kv.second.get<T>();
  } catch (const std::exception& e) {
    throw Error(ErrorCode::ConfigError, kv.first + ": " + e.what());
  }
}

}  // namespace

ConfigTable parse_config(std::string_view text) {
  ConfigTable out;
  std::string section;
  std::size_t line_no = 0;
  for (const auto& raw : text::split_lines(text)) {
    ++line_no;
    const auto line = text::trim(strip_comment(raw));
    if (line.empty()) continue;
    if (line.front() == '[') {
      if (line.back() != ']') bad(line_no, "malformed section header");
      section = text::trim(std::string_view(line).substr(1, line.size() - 2));
      if (section.empty()) bad(line_no, "empty section name");
      continue;
    }
    const auto eq = line.find('=');
    if (eq == std::string::npos) bad(line_no, "expected key = value");
    const auto key = text::trim(std::string_view(line).substr(0, eq));
    if (key.empty()) bad(line_no, "empty key");
    for (char c : key) {
      if (!std::isalnum(static_cast<unsigned char>(c)) && c != '_' && c != '-') {
        bad(line_no, "invalid key '" + key + "'");
      }
    }
    const auto full = section.empty() ? key : section + "." + key;
    if (out.count(full)) bad(line_no, "duplicate key '" + full + "'");
    out[full] = ValueParser(std::string_view(line).substr(eq + 1), line_no).parse_all();
  }
  return out;
}

void RunConfig::apply(const ConfigTable& table, const std::filesystem::path& base_dir) {
  auto path_of = [&](const ConfigTable::value_type& kv) {
    std::filesystem::path p = get_as<std::string>(kv);
    if (p.is_relative() && !base_dir.empty()) p = base_dir / p;
    return p.lexically_normal();
  };
  for (const auto& kv : table) {
    const auto& key = kv.first;
    if (key == "provider.mode") {
      provider.mode = llm::parse_gateway_mode(get_as<std::string>(kv));
    } else if (key == "provider.base_url") {
      provider.base_url = get_as<std::string>(kv);
    } else if (key == "provider.model") {
      provider.model = get_as<std::string>(kv);
    } else if (key == "provider.temperature") {
      provider.temperature = get_as<double>(kv);
    } else if (key == "provider.max_tokens") {
      provider.max_tokens = get_as<int>(kv);
    } else if (key == "provider.in_flight") {
      provider.in_flight = get_as<int>(kv);
    } else if (key == "provider.upstream") {
      provider.upstream = get_as<std::string>(kv);
    } else if (key == "provider.embedder") {
      provider.embedder = get_as<std::string>(kv);
    } else if (key == "provider.embed_model") {
      provider.embed_model = get_as<std::string>(kv);
    } else if (key == "sampler.hop_bound") {
      sampler.hop_bound = get_as<int>(kv);
    } else if (key == "sampler.relevance_threshold") {
      sampler.relevance_threshold = get_as<double>(kv);
    } else if (key == "sampler.max_triples") {
      sampler.max_triples_per_subgraph = get_as<std::size_t>(kv);
    } else if (key == "retrieval.k") {
      retrieve_k = get_as<std::size_t>(kv);
    } else if (key == "retrieval.joint") {
      joint_rerank = get_as<bool>(kv);
    } else if (key == "pipeline.mode") {
      mode = qa::parse_mode(get_as<std::string>(kv));
    } else if (key == "pipeline.entities_from_options") {
      entities_from_options = get_as<bool>(kv);
    } else if (key == "construct.method") {
      method = kg::parse_method(get_as<std::string>(kv));
    } else if (key == "construct.include_title") {
      include_title = get_as<bool>(kv);
    } else if (key == "bench.keywords") {
      keywords = get_as<std::vector<std::string>>(kv);
    } else if (key == "bench.ks") {
      ks = get_as<std::vector<std::size_t>>(kv);
    } else if (key == "bench.years") {
      years = get_as<std::vector<int>>(kv);
    } else if (key == "paths.corpus") {
      paths.corpus = path_of(kv);
    } else if (key == "paths.years") {
      paths.years = path_of(kv);
    } else if (key == "paths.kg") {
      paths.kg = path_of(kv);
    } else if (key == "paths.dataset") {
      paths.dataset = path_of(kv);
    } else if (key == "paths.cache") {
      paths.cache = path_of(kv);
    } else if (key == "paths.rules") {
      paths.rules = path_of(kv);
    } else if (key == "paths.templates") {
      paths.templates = path_of(kv);
    } else if (key == "paths.out") {
      paths.out = path_of(kv);
    } else {
      throw Error(ErrorCode::ConfigError, "unknown key '" + key + "'");
    }
  }
}

void RunConfig::validate() const {
  sampler.validate();
  if (retrieve_k == 0) throw Error(ErrorCode::ConfigError, "retrieval.k must be >= 1");
  if (provider.in_flight < 1) throw Error(ErrorCode::ConfigError, "provider.in_flight must be >= 1");
  if (provider.max_tokens < 1) throw Error(ErrorCode::ConfigError, "provider.max_tokens must be >= 1");
  if (provider.temperature < 0.0 || provider.temperature > 2.0) {
    throw Error(ErrorCode::ConfigError, "provider.temperature must be in [0, 2]");
  }
  if (provider.upstream != "mock" && provider.upstream != "live") {
    throw Error(ErrorCode::ConfigError, "provider.upstream must be mock or live");
  }
  if (provider.embedder != "hashed" && provider.embedder != "http") {
    throw Error(ErrorCode::ConfigError, "provider.embedder must be hashed or http");
  }
  for (auto k : ks) {
    if (k == 0) throw Error(ErrorCode::ConfigError, "bench.ks entries must be >= 1");
  }
}

LlmSettings RunConfig::llm_settings() const {
  LlmSettings s;
  s.model = provider.model;
  s.temperature = provider.temperature;
  s.max_tokens = provider.max_tokens;
  if (!paths.templates.empty()) s.templates = PromptTemplates::load(paths.templates);
  return s;
}

qa::PipelineConfig RunConfig::pipeline_config() const {
  qa::PipelineConfig c;
  c.llm = llm_settings();
  c.sampler = sampler;
  c.retrieve.retrieve_k = retrieve_k;
  c.retrieve.joint = joint_rerank;
  c.mode = mode;
  c.entities_from_options = entities_from_options;
  return c;
}

RunConfig load_run_config(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::ConfigError, "cannot read config " + path.string());
  std::stringstream ss;
  ss << in.rdbuf();
  RunConfig config;
  try {
    config.apply(parse_config(ss.str()), path.parent_path());
  } catch (const Error& e) {
    throw Error(ErrorCode::ConfigError, path.string() + ": " + e.what());
  }
  return config;
}

}  // namespace dalk
