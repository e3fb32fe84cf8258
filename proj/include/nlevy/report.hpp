#pragma once

#include <string>
#include <vector>

#include <json.hpp>

namespace nlevy {

struct Table {
    std::string name;
    std::vector<std::string> columns;
    std::vector<std::vector<double>> rows;

    int column_index(const std::string& col) const;
    std::vector<double> column_values(const std::string& col) const;
};

/// A verdict is a named rule applied to one table column with one threshold,
/// so it can be recomputed from the report alone.
///
/// Rules: all-below, final-below, nonincreasing, decreasing,
/// last3-nonincreasing, eventually-decreasing (last three nonincreasing and
/// the final value is the column minimum), plateau (last three within a
/// relative spread), all-zero.
struct Verdict {
    std::string name;
    std::string rule;
    std::string table;
    std::string column;
    double threshold = 0.0;
    bool pass = false;
    std::string detail;
};

struct ExperimentReport {
    std::string experiment;
    std::string config_digest;  // hex64 of the canonical config
    std::vector<Table> tables;
    std::vector<Verdict> verdicts;
    nlohmann::json tolerances = nlohmann::json::object();
    double wall_seconds = 0.0;  // logged to stderr only, never serialized

    bool all_pass() const;
    const Table* find_table(const std::string& name) const;

    nlohmann::json to_json() const;
    void write_json(const std::string& path) const;
    void write_csv_tables(const std::string& dir) const;
};

/// Applies a verdict rule to its table; used both to set verdicts and to
/// recheck a finished report.
bool evaluate_rule(const ExperimentReport& report, const Verdict& v, std::string* detail);

/// Recomputes every verdict from the stored tables; true iff all stored pass
/// flags match the recomputation.
bool recheck(const ExperimentReport& report);

/// Convenience: evaluates the rule, stores the result and appends it.
void add_verdict(ExperimentReport& report, const std::string& name, const std::string& rule,
                 const std::string& table, const std::string& column, double threshold);

}  // namespace nlevy
