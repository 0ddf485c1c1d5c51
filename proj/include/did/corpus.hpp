#pragma once

#include <filesystem>
#include <map>
#include <set>
#include <string>
#include <vector>

#include "did/dates.hpp"

namespace did::corpus {

enum class Family { aiw, holiday, external };

std::string to_string(Family f);
Family family_from_string(const std::string& s);

/// One reasoning problem with an exact, oracle-derived gold answer.
struct TaskInstance {
    std::string id;
    Family family = Family::external;
    std::string question;
    std::string gold_answer;  // canonical string form; integers for aiw/holiday
    double complexity = 1.0;
    std::map<std::string, std::string> metadata;
};

/// A designated holiday span: the days off plus any weekend days that were
/// converted into workdays to pay for them.
class HolidayArrangement {
public:
    HolidayArrangement(std::set<CivilDate> rest_days, std::set<CivilDate> comp_workdays,
                       std::string label);

    const std::set<CivilDate>& rest_days() const { return rest_days_; }
    const std::set<CivilDate>& comp_workdays() const { return comp_workdays_; }
    const std::string& label() const { return label_; }

private:
    std::set<CivilDate> rest_days_;
    std::set<CivilDate> comp_workdays_;
    std::string label_;
};

enum class HolidayMode {
    paper_formula,  // total rest days minus weekend rest days
    net,            // additionally subtracts the compensatory workdays
};

std::string to_string(HolidayMode m);
HolidayMode holiday_mode_from_string(const std::string& s);

/// Sibling puzzle: "Alice has {m} brothers and she also has {n} sisters."
/// Gold answer is n + 1 (Alice herself plus her sisters). m must be >= 1.
TaskInstance generate_aiw(int m, int n);

int holiday_extra_days(const HolidayArrangement& a, HolidayMode mode);

TaskInstance generate_holiday_task(const HolidayArrangement& a, HolidayMode mode);

enum class CorpusSchema { jsonl_generic, mr_gsm8k_judgment };

/// Reads one TaskInstance per line. Malformed records throw ParseError
/// naming the 1-based line number.
std::vector<TaskInstance> load_tasks(const std::filesystem::path& path, CorpusSchema schema);

void save_tasks(const std::filesystem::path& path, const std::vector<TaskInstance>& tasks);

/// Arrangement specs for the CLI: a JSON array of
/// {label, rest: ["YYYY-MM-DD" | "YYYY-MM-DD..YYYY-MM-DD", ...], comp: [...]}.
std::vector<HolidayArrangement> load_arrangements(const std::filesystem::path& path);

}  // namespace did::corpus
