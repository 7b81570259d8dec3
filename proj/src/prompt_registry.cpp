// SPDX-License-Identifier: Apache-2.0
#include "turtlesoup/prompt_registry.hpp"

#include "turtlesoup/errors.hpp"

#include <fmt/format.h>
#include <nlohmann/json.hpp>

#include <cctype>
#include <cstdlib>
#include <fstream>
#include <sstream>

#ifndef TURTLESOUP_SOURCE_DIR
#define TURTLESOUP_SOURCE_DIR "."
#endif

namespace turtlesoup {

namespace {

bool is_ident_start(char c) { return std::isalpha(static_cast<unsigned char>(c)) || c == '_'; }
bool is_ident(char c) { return std::isalnum(static_cast<unsigned char>(c)) || c == '_'; }

// Length of the slot starting at body[i] == '{', or 0 if it is a literal brace.
std::size_t slot_length(std::string_view body, std::size_t i) {
    if (i + 1 >= body.size() || !is_ident_start(body[i + 1])) return 0;
    std::size_t j = i + 2;
    while (j < body.size() && is_ident(body[j])) ++j;
    if (j >= body.size() || body[j] != '}') return 0;
    return j - i + 1;
}

std::string key_of(std::string_view language, std::string_view id) {
    return std::string(language) + "/" + std::string(id);
}

std::string read_file(const std::filesystem::path& p) {
    std::ifstream in(p, std::ios::binary);
    if (!in) throw PromptError(fmt::format("cannot read prompt asset {}", p.string()));
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

} // namespace

std::set<std::string, std::less<>> scan_slots(std::string_view body) {
    std::set<std::string, std::less<>> out;
    for (std::size_t i = 0; i < body.size(); ++i) {
        if (body[i] != '{') continue;
        if (auto len = slot_length(body, i)) {
            out.emplace(body.substr(i + 1, len - 2));
            i += len - 1;
        }
    }
    return out;
}

PromptRegistry PromptRegistry::load(const std::filesystem::path& dir) {
    const auto manifest_path = dir / "manifest.json";
    std::ifstream in(manifest_path);
    if (!in) throw PromptError(fmt::format("cannot read prompt manifest {}", manifest_path.string()));
    nlohmann::json manifest;
    try {
        manifest = nlohmann::json::parse(in);
    } catch (const nlohmann::json::parse_error& e) {
        throw PromptError(fmt::format("malformed prompt manifest: {}", e.what()));
    }

    PromptRegistry reg;
    const auto languages = manifest.value("languages", std::vector<std::string>{"en"});
    for (const auto& lang : languages) {
        for (const auto& entry : manifest.at("templates")) {
            PromptTemplate tpl;
            tpl.template_id = entry.at("id").get<std::string>();
            tpl.language = lang;
            for (const auto& s : entry.value("slots", std::vector<std::string>{})) tpl.required_slots.insert(s);
            std::string body = read_file(dir / lang / (tpl.template_id + ".txt"));
            // Assets end with a newline for editors; the prompt itself does not.
            while (!body.empty() && (body.back() == '\n' || body.back() == '\r')) body.pop_back();
            tpl.body = std::move(body);
            reg.add(std::move(tpl));
        }
    }
    return reg;
}

std::filesystem::path PromptRegistry::default_dir() {
    if (const char* env = std::getenv("TURTLESOUP_PROMPTS"); env && *env) return env;
    return std::filesystem::path(TURTLESOUP_SOURCE_DIR) / "prompts";
}

void PromptRegistry::add(PromptTemplate tpl) {
    const auto found = scan_slots(tpl.body);
    for (const auto& s : found) {
        if (!tpl.required_slots.contains(s))
            throw PromptError(fmt::format("template {}: undeclared slot {{{}}}", tpl.template_id, s));
    }
    for (const auto& s : tpl.required_slots) {
        if (!found.contains(s))
            throw PromptError(fmt::format("template {}: declared slot '{}' does not occur in the body",
                                          tpl.template_id, s));
    }
    auto key = key_of(tpl.language, tpl.template_id);
    templates_.insert_or_assign(std::move(key), std::move(tpl));
}

bool PromptRegistry::contains(std::string_view template_id, std::string_view language) const {
    return templates_.find(key_of(language, template_id)) != templates_.end();
}

const PromptTemplate& PromptRegistry::get(std::string_view template_id, std::string_view language) const {
    auto it = templates_.find(key_of(language, template_id));
    if (it == templates_.end())
        throw PromptError(fmt::format("unknown template '{}' ({})", template_id, language));
    return it->second;
}

std::string PromptRegistry::render(std::string_view template_id, const Bindings& bindings,
                                   std::string_view language) const {
    const auto& tpl = get(template_id, language);
    for (const auto& s : tpl.required_slots) {
        if (bindings.find(s) == bindings.end())
            throw PromptError(fmt::format("template {}: missing binding for slot '{}'", template_id, s));
    }
    // Single pass, so bound values containing braces are never re-expanded.
    std::string out;
    out.reserve(tpl.body.size());
    const std::string_view body = tpl.body;
    for (std::size_t i = 0; i < body.size(); ++i) {
        if (body[i] == '{') {
            if (auto len = slot_length(body, i)) {
                out.append(bindings.find(body.substr(i + 1, len - 2))->second);
                i += len - 1;
                continue;
            }
        }
        out.push_back(body[i]);
    }
    return out;
}

} // namespace turtlesoup
