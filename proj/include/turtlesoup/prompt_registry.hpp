// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <filesystem>
#include <map>
#include <set>
#include <string>
#include <string_view>

namespace turtlesoup {

using Bindings = std::map<std::string, std::string, std::less<>>;

struct PromptTemplate {
    std::string template_id;
    std::string language = "en";
    std::string body; // `{slot}` placeholders
    std::set<std::string, std::less<>> required_slots;
};

// Slot names found in a template body. A slot is `{identifier}`; any other
// brace (JSON examples in the prompt text) is literal.
std::set<std::string, std::less<>> scan_slots(std::string_view body);

// Prompt bodies live as text assets under <dir>/<language>/<template_id>.txt
// with <dir>/manifest.json declaring each template's slots. Loading checks
// that declared slots and body slots agree exactly.
class PromptRegistry {
public:
    PromptRegistry() = default;

    static PromptRegistry load(const std::filesystem::path& dir);

    // $TURTLESOUP_PROMPTS if set, otherwise the source tree's prompts/.
    static std::filesystem::path default_dir();

    void add(PromptTemplate tpl);

    bool contains(std::string_view template_id, std::string_view language = "en") const;
    const PromptTemplate& get(std::string_view template_id, std::string_view language = "en") const;

    // Replaces every slot verbatim. Throws PromptError for an unknown template
    // or a missing binding (the message names the slot). Extra bindings are
    // ignored.
    std::string render(std::string_view template_id, const Bindings& bindings,
                       std::string_view language = "en") const;

    std::size_t size() const { return templates_.size(); }

private:
    // key: language + '/' + id
    std::map<std::string, PromptTemplate, std::less<>> templates_;
};

} // namespace turtlesoup
