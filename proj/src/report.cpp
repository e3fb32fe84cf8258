#include "nlevy/report.hpp"

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <stdexcept>

#include "nlevy/common.hpp"

namespace nlevy {

int Table::column_index(const std::string& col) const {
    for (std::size_t i = 0; i < columns.size(); ++i)
        if (columns[i] == col) return static_cast<int>(i);
    throw std::invalid_argument("table '" + name + "' has no column '" + col + "'");
}

std::vector<double> Table::column_values(const std::string& col) const {
    const int ci = column_index(col);
    std::vector<double> out;
    out.reserve(rows.size());
    for (const auto& r : rows) out.push_back(r.at(ci));
    return out;
}

bool ExperimentReport::all_pass() const {
    return std::all_of(verdicts.begin(), verdicts.end(),
                       [](const Verdict& v) { return v.pass; });
}

const Table* ExperimentReport::find_table(const std::string& name) const {
    for (const auto& t : tables)
        if (t.name == name) return &t;
    return nullptr;
}

bool evaluate_rule(const ExperimentReport& report, const Verdict& v, std::string* detail) {
    const Table* t = report.find_table(v.table);
    if (!t) {
        if (detail) *detail = "missing table " + v.table;
        return false;
    }
    const std::vector<double> col = t->column_values(v.column);
    if (col.empty()) {
        if (detail) *detail = "empty column";
        return false;
    }
    auto set = [&](bool ok, const std::string& d) {
        if (detail) *detail = d;
        return ok;
    };
    const std::size_t n = col.size();
    if (v.rule == "all-below") {
        const double worst = *std::max_element(col.begin(), col.end());
        return set(worst <= v.threshold, "max=" + format_full(worst));
    }
    if (v.rule == "all-zero") {
        double worst = 0;
        for (double x : col) worst = std::max(worst, std::abs(x));
        return set(worst <= v.threshold, "max|.|=" + format_full(worst));
    }
    if (v.rule == "final-below") {
        return set(col.back() <= v.threshold, "final=" + format_full(col.back()));
    }
    if (v.rule == "nonincreasing" || v.rule == "decreasing") {
        const double slack = v.rule == "nonincreasing" ? v.threshold : 0.0;
        bool ok = true;
        for (std::size_t i = 1; i < n; ++i) {
            if (v.rule == "decreasing")
                ok = ok && col[i] < col[i - 1] + v.threshold;
            else
                ok = ok && col[i] <= col[i - 1] + slack;
        }
        return set(ok, "first=" + format_full(col.front()) + " last=" + format_full(col.back()));
    }
    if (v.rule == "last3-nonincreasing") {
        if (n < 3) return set(false, "needs >= 3 rows");
        bool ok = col[n - 1] <= col[n - 2] + v.threshold && col[n - 2] <= col[n - 3] + v.threshold;
        return set(ok, format_full(col[n - 3]) + " -> " + format_full(col[n - 2]) + " -> " +
                           format_full(col[n - 1]));
    }
    if (v.rule == "eventually-decreasing") {
        if (n < 3) return set(false, "needs >= 3 rows");
        const double mn = *std::min_element(col.begin(), col.end());
        bool ok = col[n - 1] <= col[n - 2] + v.threshold &&
                  col[n - 2] <= col[n - 3] + v.threshold && col[n - 1] <= mn + v.threshold;
        return set(ok, "final=" + format_full(col[n - 1]) + " min=" + format_full(mn));
    }
    if (v.rule == "plateau") {
        if (n < 3) return set(false, "needs >= 3 rows");
        const double a = col[n - 3], b = col[n - 2], c = col[n - 1];
        const double hi = std::max({a, b, c}), lo = std::min({a, b, c});
        const double spread = hi == 0 ? 0 : (hi - lo) / std::abs(hi);
        return set(spread <= v.threshold, "relative spread=" + format_full(spread));
    }
    return set(false, "unknown rule " + v.rule);
}

bool recheck(const ExperimentReport& report) {
    for (const auto& v : report.verdicts) {
        std::string detail;
        if (evaluate_rule(report, v, &detail) != v.pass) return false;
    }
    return true;
}

void add_verdict(ExperimentReport& report, const std::string& name, const std::string& rule,
                 const std::string& table, const std::string& column, double threshold) {
    Verdict v;
    v.name = name;
    v.rule = rule;
    v.table = table;
    v.column = column;
    v.threshold = threshold;
    v.pass = evaluate_rule(report, v, &v.detail);
    report.verdicts.push_back(std::move(v));
}

nlohmann::json ExperimentReport::to_json() const {
    nlohmann::json j;
    j["experiment"] = experiment;
    j["config_digest"] = config_digest;
    j["tolerances"] = tolerances;
    nlohmann::json jt = nlohmann::json::array();
    for (const auto& t : tables) {
        nlohmann::json row_list = nlohmann::json::array();
        for (const auto& r : t.rows) {
            nlohmann::json jr = nlohmann::json::array();
            for (double x : r) jr.push_back(format_full(x));
            row_list.push_back(jr);
        }
        jt.push_back({{"name", t.name}, {"columns", t.columns}, {"rows", row_list}});
    }
    j["tables"] = jt;
    nlohmann::json jv = nlohmann::json::array();
    for (const auto& v : verdicts)
        jv.push_back({{"name", v.name},
                      {"rule", v.rule},
                      {"table", v.table},
                      {"column", v.column},
                      {"threshold", format_full(v.threshold)},
                      {"pass", v.pass},
                      {"detail", v.detail}});
    j["verdicts"] = jv;
    j["all_pass"] = all_pass();
    return j;
}

void ExperimentReport::write_json(const std::string& path) const {
    std::filesystem::path p(path);
    if (p.has_parent_path()) std::filesystem::create_directories(p.parent_path());
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot write " + path);
    out << to_json().dump(2) << "\n";
}

void ExperimentReport::write_csv_tables(const std::string& dir) const {
    std::filesystem::create_directories(dir);
    for (const auto& t : tables) {
        const std::string path = dir + "/" + experiment + "_" + t.name + ".csv";
        std::ofstream out(path, std::ios::binary);
        if (!out) throw std::runtime_error("cannot write " + path);
        out << "# config_digest=" << config_digest << "\n";
        for (std::size_t c = 0; c < t.columns.size(); ++c)
            out << t.columns[c] << (c + 1 < t.columns.size() ? "," : "");
        out << "\n";
        for (const auto& r : t.rows) {
            for (std::size_t c = 0; c < r.size(); ++c)
                out << format_full(r[c]) << (c + 1 < r.size() ? "," : "");
            out << "\n";
        }
    }
}

}  // namespace nlevy
