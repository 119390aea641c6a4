#include "dalk/prompts.hpp"

#include <fstream>
#include <sstream>
#include <utility>

#include "dalk/error.hpp"

namespace dalk {

namespace {

PromptTemplates make_defaults() {
  PromptTemplates t;
  t.generative =
      "Read the following abstract, extract the relationships between each entity."
      "You can choose the relation from: (covaries, interacts, regulates, resembles, "
      "downregulates, upregulates, associates, binds, treats, palliates), or generate a "
      "new predicate to describe the relationship between the two entities. Output all "
      "the extract triples in the format of \"head | relation | tail\". For example: "
      "\"Alzheimer's disease | associates | memory deficits\" Abstract: {abstract}"
      "Entity: {entities}. Output:";
  t.pairwise =
      "Read the following abstract, answer the following question. Abstract: {abstract}"
      "Entity: {entities}. Question: predict the relationship between {head_type} entity "
      "\"{head}\" and {tail_type} entity \"{tail}\", first choose from the following "
      "options: {options}. Answer: Let's think step by step:";
  t.entity_extract =
      "There is a medical question. Extract all the domain-specific entities (diseases, "
      "genes, proteins, chemicals, anatomical structures, biological processes) mentioned "
      "in it. Output the entity names separated by commas and nothing else.\n\n"
      "Question: {question}\n\nEntities:";
  t.rerank =
      "There is a question and some knowledge graph. The knowledge graphs follow "
      "entity->relationship->entity list format.\n"
      "Graph: \n"
      "{graph}\n"
      "\n"
      "Question: \n"
      "{question}\n"
      "\n"
      "Please rerank the knowledge graph and output at most {k} important and relevant "
      "triples for solving the given question. Output the reranked knowledge in the "
      "following format:\n"
      "{format}\n"
      "\n"
      "Answer:";
  t.verbalize =
      "There are some knowledge graph paths. They follow entity->relationship->entity "
      "format.\n"
      "\n"
      "{graph}\n"
      "\n"
      "Use the knowledge graph information. Try to convert them to natural language, "
      "respectively. \n"
      "Use single quotation marks for entity name and relation name. \n"
      "And name them as {label} 1, {label} 2,...\n"
      "\n"
      "Output:";
  t.inference =
      "Question: {question}\n"
      "{evidence}\n"
      "Answer: Let's think step by step:";
  t.judge =
      "Judge whether the question below is related to Alzheimer's Disease. Please answer "
      "yes or no. \n"
      "Question: {question}\n"
      "{options}\n"
      "Is the question related to Alzheimer's Disease? Answer:";
  return t;
}

}  // namespace

const PromptTemplates& PromptTemplates::defaults() {
  static const PromptTemplates kDefaults = make_defaults();
  return kDefaults;
}

PromptTemplates PromptTemplates::load(const std::filesystem::path& dir) {
  PromptTemplates t = defaults();
  const std::pair<const char*, std::string*> files[] = {
      {"generative.txt", &t.generative}, {"pairwise.txt", &t.pairwise},
      {"entity_extract.txt", &t.entity_extract}, {"rerank.txt", &t.rerank},
      {"verbalize.txt", &t.verbalize}, {"inference.txt", &t.inference},
      {"judge.txt", &t.judge},
  };
  if (!std::filesystem::is_directory(dir)) {
    throw Error(ErrorCode::ConfigError, "template directory not found: " + dir.string());
  }
  for (const auto& [name, slot] : files) {
    const auto path = dir / name;
    if (!std::filesystem::exists(path)) continue;
    std::ifstream in(path);
    std::ostringstream ss;
    ss << in.rdbuf();
    std::string body = ss.str();
    if (!body.empty() && body.back() == '\n') body.pop_back();
    *slot = std::move(body);
  }
  return t;
}

llm::LlmRequest LlmSettings::request(std::string prompt, std::string tag) const {
  llm::LlmRequest r;
  r.model = model;
  r.user_prompt = std::move(prompt);
  r.temperature = temperature;
  r.max_tokens = max_tokens;
  r.tag = std::move(tag);
  return r;
}

std::string fill_template(std::string_view tmpl,
                          const std::map<std::string, std::string>& values) {
  std::string out;
  out.reserve(tmpl.size());
  std::size_t i = 0;
  while (i < tmpl.size()) {
    if (tmpl[i] == '{') {
      const auto close = tmpl.find('}', i + 1);
      if (close != std::string_view::npos) {
        auto it = values.find(std::string(tmpl.substr(i + 1, close - i - 1)));
        if (it != values.end()) {
          out += it->second;
          i = close + 1;
          continue;
        }
      }
    }
    out.push_back(tmpl[i++]);
  }
  return out;
}

}  // namespace dalk
