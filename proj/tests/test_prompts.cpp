#include <doctest.h>

#include <filesystem>

#include "armeval/errors.hpp"
#include "armeval/prompts.hpp"
#include "test_support.hpp"

using namespace armeval;

namespace {

const Bindings kGoldenBindings = {{"story", "STORY_TEXT"},
                                  {"summary", "SUMMARY_TEXT"},
                                  {"claim", "CLAIM_TEXT"},
                                  {"explanation", "EXPLANATION_TEXT"}};

}  // namespace

TEST_CASE("every built-in template renders byte-identical to its golden file") {
    std::size_t checked = 0;
    for (const auto& entry : std::filesystem::directory_iterator(test_data("golden"))) {
        const std::string fname = entry.path().filename().string();
        const std::string suffix = ".user.golden";
        if (fname.size() <= suffix.size() || fname.substr(fname.size() - suffix.size()) != suffix) continue;
        const std::string name = fname.substr(0, fname.size() - suffix.size());
        CAPTURE(name);
        const auto rendered = render(PromptLibrary::builtin().get(name), kGoldenBindings);
        CHECK(rendered.user == slurp(entry.path()));
        CHECK(rendered.system == slurp(test_data("golden/" + name + ".system.golden")));
        ++checked;
    }
    CHECK(checked == 15);
}

TEST_CASE("built-in library holds every named template") {
    const auto& lib = PromptLibrary::builtin();
    for (auto n : {prompt_names::zero_shot, prompt_names::few_shot, prompt_names::self_consistency,
                   prompt_names::rewrite_subjectivity, prompt_names::rewrite_inconsistency, prompt_names::rewrite_both,
                   prompt_names::explanation_parse, prompt_names::explanation_request})
        CHECK_NOTHROW((void)lib.get(n));
    for (int t = 1; t <= 4; ++t) {
        CHECK_NOTHROW((void)lib.get(prompt_names::synth(true, t)));
        CHECK_NOTHROW((void)lib.get(prompt_names::synth(false, t)));
    }
    CHECK(prompt_names::synth(false, 3) == "synth_to_objective_type3");
    CHECK_THROWS_AS((void)lib.get("nope"), UsageError);
}

TEST_CASE("directory library matches the embedded copy") {
    const auto dir = std::filesystem::path(ARMEVAL_TEST_DATA).parent_path() / "prompts";
    const auto lib = PromptLibrary::from_directory(dir);
    CHECK(lib.names() == PromptLibrary::builtin().names());
    for (const auto& n : lib.names()) {
        CHECK(lib.get(n).user == PromptLibrary::builtin().get(n).user);
        CHECK(lib.get(n).system == PromptLibrary::builtin().get(n).system);
    }
}

TEST_CASE("render substitutes once and reports missing slots") {
    const auto t = PromptTemplate::make("t", "sys", "A {x} and {y}; {x} again.");
    CHECK(t.slot_names == std::vector<std::string>{"x", "y", "x"});
    const auto r = render(t, {{"x", "{y}"}, {"y", "2"}});
    CHECK(r.user == "A {y} and 2; {y} again.");
    CHECK(r.system == "sys");
    try {
        (void)render(t, {{"x", "1"}});
        FAIL("expected UsageError");
    } catch (const UsageError& e) {
        CHECK(std::string(e.what()).find("y") != std::string::npos);
    }
}
