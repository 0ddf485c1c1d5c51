#include "did/prompting.hpp"

#include <fstream>
#include <sstream>

#include "did/errors.hpp"

namespace did::prompting {

namespace {

// Plan-stage template. The wording of the intro line, the three numbered
// instructions and the closing constraint is load-bearing: downstream
// golden-file tests compare these fragments byte-for-byte.
const char* const kDidPlanTemplate =
    "For the following complex problem, generate a detailed step-by-step plan to solve it:\n"
    "\n"
    "{question}\n"
    "\n"
    "The plan should:\n"
    "1. Simple Version: Start with the simplest version of the problem, where all variables "
    "are minimal.\n"
    "2. Increase Complexity: Gradually increase complexity by adding one sibling or variable "
    "at a time in the first 3-4 steps. After 3-4 steps, increase complexity more significantly "
    "by introducing more relationships and variables in a single step.\n"
    "3. Final Version: Finally, integrate all previously introduced variables and relationships "
    "to form the final version of the problem, which is the original problem.\n"
    "Only provide the plan, do not cover any calculation or reasoning.";

const char* const kDidSolveTemplate =
    "{question}\n"
    "\n"
    "Plan:\n"
    "{plan}\n"
    "\n"
    "Execute this plan step by step and state the final answer.";

const char* const kAnswerMarker = "End your response with: Final answer: <value>";

std::string replace_all(std::string text, const std::string& token, const std::string& value) {
    std::size_t pos = 0;
    while ((pos = text.find(token, pos)) != std::string::npos) {
        text.replace(pos, token.size(), value);
        pos += value.size();
    }
    return text;
}

std::optional<std::string> read_override(const PromptOptions& opts, const char* name) {
    if (!opts.template_dir) return std::nullopt;
    std::filesystem::path file = *opts.template_dir / name;
    std::ifstream in(file);
    if (!in) return std::nullopt;
    std::ostringstream buf;
    buf << in.rdbuf();
    std::string text = buf.str();
    // Plain-text editors append a trailing newline; the templates do not carry one.
    if (!text.empty() && text.back() == '\n') text.pop_back();
    return text;
}

void check_task(const corpus::TaskInstance& task) {
    if (task.question.empty()) {
        throw ValidationError("task \"" + task.id + "\" has an empty question");
    }
}

PromptBundle single_user_bundle(Method method, const corpus::TaskInstance& task,
                                std::string content) {
    PromptBundle b;
    b.method = method;
    b.task_id = task.id;
    b.messages.push_back({chat::Role::user, std::move(content)});
    return b;
}

std::string marker_suffix(const PromptOptions& opts) {
    if (!opts.answer_marker) return "";
    std::string marker = read_override(opts, "answer_marker.txt").value_or(kAnswerMarker);
    return "\n" + marker;
}

}  // namespace

std::string to_string(Method m) {
    switch (m) {
        case Method::io: return "io";
        case Method::cot: return "cot";
        case Method::did_plan: return "did_plan";
        case Method::did_solve: return "did_solve";
    }
    return "io";
}

const std::string& did_plan_template() {
    static const std::string t = kDidPlanTemplate;
    return t;
}

PromptBundle build_io(const corpus::TaskInstance& task, const PromptOptions& opts) {
    check_task(task);
    return single_user_bundle(Method::io, task, task.question + marker_suffix(opts));
}

PromptBundle build_cot(const corpus::TaskInstance& task, const PromptOptions& opts) {
    check_task(task);
    std::string cue = read_override(opts, "cot_cue.txt").value_or(opts.cot_cue);
    return single_user_bundle(Method::cot, task,
                              task.question + "\n" + cue + marker_suffix(opts));
}

PromptBundle build_did_plan(const corpus::TaskInstance& task, const PromptOptions& opts) {
    check_task(task);
    std::string tmpl = read_override(opts, "did_plan.txt").value_or(did_plan_template());
    return single_user_bundle(Method::did_plan, task,
                              replace_all(std::move(tmpl), "{question}", task.question));
}

PromptBundle build_did_solve(const corpus::TaskInstance& task, const std::string& plan_text,
                             const PromptOptions& opts) {
    check_task(task);
    if (plan_text.empty()) {
        throw ValidationError("plan stage produced no text for task \"" + task.id + "\"");
    }
    std::string tmpl = read_override(opts, "did_solve.txt").value_or(kDidSolveTemplate);
    std::string content = replace_all(std::move(tmpl), "{question}", task.question);
    content = replace_all(std::move(content), "{plan}", plan_text);
    return single_user_bundle(Method::did_solve, task, content + marker_suffix(opts));
}

PromptBundle build_did_one_shot(const corpus::TaskInstance& task, const PromptOptions& opts) {
    PromptBundle plan = build_did_plan(task, opts);
    std::string content = plan.messages.front().content;
    // Drop the plan-only constraint line so the single response may solve too.
    const std::string constraint =
        "\nOnly provide the plan, do not cover any calculation or reasoning.";
    if (auto pos = content.rfind(constraint); pos != std::string::npos) {
        content.erase(pos, constraint.size());
    }
    content +=
        "\nThen execute the plan step by step and state the final answer." + marker_suffix(opts);
    PromptBundle b = single_user_bundle(Method::did_plan, task, std::move(content));
    return b;
}

}  // namespace did::prompting
