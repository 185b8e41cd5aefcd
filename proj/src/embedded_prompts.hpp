#pragma once

#include <span>
#include <string_view>

namespace armeval::detail {

struct EmbeddedPrompt {
    std::string_view name;
    std::string_view system;
    std::string_view user;
};

std::span<const EmbeddedPrompt> embedded_prompts();

}  // namespace armeval::detail
