#pragma once

#include <filesystem>
#include <optional>
#include <string>

#include "did/chat.hpp"
#include "did/corpus.hpp"

namespace did::prompting {

enum class Method { io, cot, did_plan, did_solve };

std::string to_string(Method m);

/// Ordered chat messages for one method stage, ready to send.
struct PromptBundle {
    Method method = Method::io;
    chat::Messages messages;
    std::string task_id;
};

/// Knobs shared by all builders. Defaults leave the provider untouched:
/// no system message, no answer marker, the plain template texts.
struct PromptOptions {
    std::string cot_cue = "Let's think step by step.";
    /// When set, io/cot/did_solve prompts end with an instruction to close
    /// the response with "Final answer: <value>". Off by default.
    bool answer_marker = false;
    /// Directory of plain-text template overrides; files are looked up by
    /// name (did_plan.txt, did_solve.txt, cot_cue.txt, answer_marker.txt).
    std::optional<std::filesystem::path> template_dir;
};

/// The built-in plan-stage template, with "{question}" placeholder.
const std::string& did_plan_template();

PromptBundle build_io(const corpus::TaskInstance& task, const PromptOptions& opts = {});
PromptBundle build_cot(const corpus::TaskInstance& task, const PromptOptions& opts = {});
PromptBundle build_did_plan(const corpus::TaskInstance& task, const PromptOptions& opts = {});
PromptBundle build_did_solve(const corpus::TaskInstance& task, const std::string& plan_text,
                             const PromptOptions& opts = {});

/// Single-call variant for ablation: plan template plus an instruction to
/// execute the plan in the same response.
PromptBundle build_did_one_shot(const corpus::TaskInstance& task,
                                const PromptOptions& opts = {});

}  // namespace did::prompting
