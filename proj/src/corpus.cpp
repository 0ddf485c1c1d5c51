#include "did/corpus.hpp"

#include <fstream>
#include <sstream>

#include "did/errors.hpp"
#include "json.hpp"

namespace did::corpus {

using nlohmann::json;

std::string to_string(Family f) {
    switch (f) {
        case Family::aiw: return "aiw";
        case Family::holiday: return "holiday";
        case Family::external: return "external";
    }
    return "external";
}

Family family_from_string(const std::string& s) {
    if (s == "aiw") return Family::aiw;
    if (s == "holiday") return Family::holiday;
    if (s == "external") return Family::external;
    throw ParseError("unknown task family \"" + s + "\"");
}

std::string to_string(HolidayMode m) {
    return m == HolidayMode::paper_formula ? "paper_formula" : "net";
}

HolidayMode holiday_mode_from_string(const std::string& s) {
    if (s == "paper_formula") return HolidayMode::paper_formula;
    if (s == "net") return HolidayMode::net;
    throw ParseError("unknown holiday mode \"" + s + "\"");
}

HolidayArrangement::HolidayArrangement(std::set<CivilDate> rest_days,
                                       std::set<CivilDate> comp_workdays, std::string label)
    : rest_days_(std::move(rest_days)),
      comp_workdays_(std::move(comp_workdays)),
      label_(std::move(label)) {
    for (const CivilDate& d : comp_workdays_) {
        if (rest_days_.count(d)) {
            throw ValidationError("arrangement \"" + label_ + "\": " + d.to_iso() +
                                  " is both a rest day and a compensatory workday");
        }
        if (!is_weekend(d)) {
            throw ValidationError("arrangement \"" + label_ + "\": compensatory workday " +
                                  d.to_iso() + " does not fall on a weekend");
        }
    }
}

TaskInstance generate_aiw(int m, int n) {
    if (m < 1) {
        throw ValidationError(
            "aiw task requires m >= 1: the question asks about Alice's brother");
    }
    if (n < 0) {
        throw ValidationError("aiw task requires n >= 0");
    }
    TaskInstance t;
    t.id = "aiw-m" + std::to_string(m) + "-n" + std::to_string(n);
    t.family = Family::aiw;
    t.question = "Alice has " + std::to_string(m) + " brothers and she also has " +
                 std::to_string(n) + " sisters. How many sisters does Alice's brother have?";
    t.gold_answer = std::to_string(n + 1);
    t.complexity = double(m + n);
    t.metadata["m"] = std::to_string(m);
    t.metadata["n"] = std::to_string(n);
    return t;
}

int holiday_extra_days(const HolidayArrangement& a, HolidayMode mode) {
    int weekend_rest = 0;
    for (const CivilDate& d : a.rest_days()) {
        if (is_weekend(d)) ++weekend_rest;
    }
    int extra = int(a.rest_days().size()) - weekend_rest;
    if (mode == HolidayMode::net) {
        extra -= int(a.comp_workdays().size());
    }
    return extra;
}

namespace {

/// Renders a date set as comma-separated runs: "2023-09-29 to 2023-10-06, 2023-10-09".
std::string describe_dates(const std::set<CivilDate>& dates) {
    if (dates.empty()) return "none";
    std::ostringstream out;
    auto it = dates.begin();
    while (it != dates.end()) {
        CivilDate start = *it;
        CivilDate end = start;
        auto next = std::next(it);
        while (next != dates.end() && next->days_since_epoch() == end.days_since_epoch() + 1) {
            end = *next;
            it = next;
            next = std::next(it);
        }
        if (out.tellp() > 0) out << ", ";
        if (start == end) {
            out << start.to_iso() << " (" << to_string(day_of_week(start)) << ")";
        } else {
            out << start.to_iso() << " to " << end.to_iso();
        }
        it = next;
    }
    return out.str();
}

std::string slugify(const std::string& s) {
    std::string out;
    for (char c : s) {
        if (std::isalnum(static_cast<unsigned char>(c))) {
            out += char(std::tolower(static_cast<unsigned char>(c)));
        } else if (!out.empty() && out.back() != '-') {
            out += '-';
        }
    }
    while (!out.empty() && out.back() == '-') out.pop_back();
    return out.empty() ? "arrangement" : out;
}

}  // namespace

TaskInstance generate_holiday_task(const HolidayArrangement& a, HolidayMode mode) {
    std::ostringstream q;
    q << "Under the holiday arrangement \"" << a.label() << "\", the designated rest days are: "
      << describe_dates(a.rest_days()) << " (" << a.rest_days().size() << " rest days in total). ";
    if (a.comp_workdays().empty()) {
        q << "No weekend days are converted into compensatory workdays. ";
    } else {
        q << "The following weekend days are converted into compensatory workdays: "
          << describe_dates(a.comp_workdays()) << ". ";
    }
    q << "Saturdays and Sundays would normally be rest days anyway. ";
    if (mode == HolidayMode::paper_formula) {
        q << "How many extra holiday days do people actually receive, excluding weekend days "
             "that were already scheduled as rest days?";
    } else {
        q << "After also working off the compensatory workdays, how many net extra days off do "
             "people receive compared to a normal schedule?";
    }

    TaskInstance t;
    t.id = "holiday-" + slugify(a.label()) + "-" + to_string(mode);
    t.family = Family::holiday;
    t.question = q.str();
    t.gold_answer = std::to_string(holiday_extra_days(a, mode));
    t.complexity = double(a.rest_days().size() + a.comp_workdays().size());
    t.metadata["label"] = a.label();
    t.metadata["mode"] = to_string(mode);
    if (!a.rest_days().empty()) {
        t.metadata["rest_first"] = a.rest_days().begin()->to_iso();
        t.metadata["rest_last"] = a.rest_days().rbegin()->to_iso();
    }
    t.metadata["n_rest"] = std::to_string(a.rest_days().size());
    t.metadata["n_comp"] = std::to_string(a.comp_workdays().size());
    return t;
}

namespace {

std::string require_string(const json& rec, const char* field, int line) {
    auto it = rec.find(field);
    if (it == rec.end() || it->is_null()) {
        throw ParseError("line " + std::to_string(line) + ": missing field \"" + field + "\"");
    }
    if (it->is_string()) return it->get<std::string>();
    if (it->is_number_integer()) return std::to_string(it->get<long long>());
    if (it->is_number()) {
        std::ostringstream s;
        s << it->get<double>();
        return s.str();
    }
    if (it->is_boolean()) return it->get<bool>() ? "true" : "false";
    throw ParseError("line " + std::to_string(line) + ": field \"" + field +
                     "\" must be a string or number");
}

/// Accepts the field spellings seen in judgment-style dumps and normalizes
/// the verdict label to "correct"/"incorrect".
TaskInstance parse_judgment_record(const json& rec, int line) {
    TaskInstance t;
    t.family = Family::external;
    if (rec.contains("uuid")) {
        t.id = require_string(rec, "uuid", line);
    } else if (rec.contains("id")) {
        t.id = require_string(rec, "id", line);
    } else {
        t.id = "mrgsm8k-line" + std::to_string(line);
    }

    std::string question = require_string(rec, "question", line);
    std::string solution;
    if (rec.contains("model_output_solution")) {
        solution = require_string(rec, "model_output_solution", line);
    } else if (rec.contains("solution")) {
        solution = require_string(rec, "solution", line);
    } else {
        throw ParseError("line " + std::to_string(line) +
                         ": missing field \"model_output_solution\"");
    }

    std::string label;
    for (const char* f : {"model_output_answer_correctness", "label", "gold"}) {
        if (rec.contains(f)) {
            label = require_string(rec, f, line);
            break;
        }
    }
    if (label.empty()) {
        throw ParseError("line " + std::to_string(line) +
                         ": missing gold field (\"model_output_answer_correctness\")");
    }
    if (label == "wrong" || label == "incorrect" || label == "false") {
        label = "incorrect";
    } else if (label == "correct" || label == "right" || label == "true") {
        label = "correct";
    } else {
        throw ParseError("line " + std::to_string(line) + ": unrecognized gold label \"" +
                         label + "\"");
    }

    t.question = "Here is a math problem and a proposed solution.\n\nProblem:\n" + question +
                 "\n\nProposed solution:\n" + solution +
                 "\n\nIs the proposed solution correct or incorrect?";
    t.gold_answer = label;
    t.complexity = 1.0;
    t.metadata["solution"] = solution;
    t.metadata["grading"] = "judgment";
    return t;
}

TaskInstance parse_generic_record(const json& rec, int line) {
    TaskInstance t;
    t.id = require_string(rec, "id", line);
    t.family = rec.contains("family")
                   ? family_from_string(require_string(rec, "family", line))
                   : Family::external;
    t.question = require_string(rec, "question", line);
    t.gold_answer = require_string(rec, "gold", line);
    t.complexity = 1.0;
    if (auto it = rec.find("complexity"); it != rec.end() && it->is_number()) {
        t.complexity = it->get<double>();
        if (t.complexity < 0) {
            throw ParseError("line " + std::to_string(line) + ": complexity must be >= 0");
        }
    }
    if (auto it = rec.find("metadata"); it != rec.end() && it->is_object()) {
        for (auto& [k, v] : it->items()) {
            t.metadata[k] = v.is_string() ? v.get<std::string>() : v.dump();
        }
    }
    return t;
}

}  // namespace

std::vector<TaskInstance> load_tasks(const std::filesystem::path& path, CorpusSchema schema) {
    std::ifstream in(path);
    if (!in) {
        throw IoError("cannot open task file " + path.string());
    }
    std::vector<TaskInstance> tasks;
    std::set<std::string> seen_ids;
    std::string line;
    int line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
        json rec;
        try {
            rec = json::parse(line);
        } catch (const json::parse_error& e) {
            throw ParseError("line " + std::to_string(line_no) + ": invalid JSON: " + e.what());
        }
        if (!rec.is_object()) {
            throw ParseError("line " + std::to_string(line_no) + ": record must be an object");
        }
        TaskInstance t = schema == CorpusSchema::mr_gsm8k_judgment
                             ? parse_judgment_record(rec, line_no)
                             : parse_generic_record(rec, line_no);
        if (!seen_ids.insert(t.id).second) {
            throw ParseError("line " + std::to_string(line_no) + ": duplicate task id \"" +
                             t.id + "\"");
        }
        tasks.push_back(std::move(t));
    }
    return tasks;
}

void save_tasks(const std::filesystem::path& path, const std::vector<TaskInstance>& tasks) {
    std::ofstream out(path);
    if (!out) {
        throw IoError("cannot write task file " + path.string());
    }
    for (const TaskInstance& t : tasks) {
        json rec;
        rec["id"] = t.id;
        rec["family"] = to_string(t.family);
        rec["question"] = t.question;
        rec["gold"] = t.gold_answer;
        rec["complexity"] = t.complexity;
        rec["metadata"] = t.metadata;
        out << rec.dump() << "\n";
    }
    if (!out) {
        throw IoError("failed writing task file " + path.string());
    }
}

namespace {

void insert_date_spec(std::set<CivilDate>& dates, const std::string& spec) {
    auto sep = spec.find("..");
    if (sep == std::string::npos) {
        dates.insert(CivilDate::from_iso(spec));
        return;
    }
    CivilDate start = CivilDate::from_iso(spec.substr(0, sep));
    CivilDate end = CivilDate::from_iso(spec.substr(sep + 2));
    if (end < start) {
        throw ParseError("date range \"" + spec + "\" runs backwards");
    }
    for (std::int64_t d = start.days_since_epoch(); d <= end.days_since_epoch(); ++d) {
        dates.insert(CivilDate::from_days_since_epoch(d));
    }
}

}  // namespace

std::vector<HolidayArrangement> load_arrangements(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) {
        throw IoError("cannot open arrangement file " + path.string());
    }
    json doc;
    try {
        doc = json::parse(in);
    } catch (const json::parse_error& e) {
        throw ParseError("arrangement file " + path.string() + ": " + e.what());
    }
    if (!doc.is_array()) {
        throw ParseError("arrangement file must contain a JSON array");
    }
    std::vector<HolidayArrangement> out;
    for (std::size_t i = 0; i < doc.size(); ++i) {
        const json& rec = doc[i];
        std::string label = rec.value("label", "arrangement-" + std::to_string(i + 1));
        std::set<CivilDate> rest;
        std::set<CivilDate> comp;
        for (const auto& s : rec.value("rest", json::array())) {
            insert_date_spec(rest, s.get<std::string>());
        }
        for (const auto& s : rec.value("comp", json::array())) {
            insert_date_spec(comp, s.get<std::string>());
        }
        out.emplace_back(std::move(rest), std::move(comp), std::move(label));
    }
    return out;
}

}  // namespace did::corpus
