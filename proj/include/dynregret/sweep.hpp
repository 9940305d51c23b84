#pragma once

#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include "dynregret/config.hpp"
#include "dynregret/errors.hpp"
#include "dynregret/harness.hpp"

namespace dynregret {

struct SweepAxis {
    std::string key;
    std::vector<std::string> values;
};

/// Parses `section.key=v1,v2,...`. An empty value list is allowed and
/// yields an empty grid.
inline SweepAxis parse_sweep_axis(const std::string& spec) {
    const auto eq = spec.find('=');
    if (eq == std::string::npos) throw Error(ErrorKind::ConfigError, "--vary expects key=list, got '" + spec + "'");
    SweepAxis axis;
    axis.key = detail::trim(spec.substr(0, eq));
    detail::split_dotted(axis.key);
    std::stringstream ss(spec.substr(eq + 1));
    for (std::string item; std::getline(ss, item, ',');) {
        item = detail::trim(item);
        if (!item.empty()) axis.values.push_back(item);
    }
    return axis;
}

struct SweepCell {
    std::vector<std::pair<std::string, std::string>> assignment;
    std::optional<RunResult> result;
    std::string error_kind;
    std::string error;
};

/// Cartesian product of the axes in row-major order (last axis fastest).
inline std::vector<std::vector<std::pair<std::string, std::string>>> sweep_grid(const std::vector<SweepAxis>& axes) {
    std::vector<std::vector<std::pair<std::string, std::string>>> grid;
    if (axes.empty()) return grid;
    for (const SweepAxis& a : axes)
        if (a.values.empty()) return grid;
    grid.emplace_back();
    for (const SweepAxis& a : axes) {
        std::vector<std::vector<std::pair<std::string, std::string>>> next;
        for (const auto& partial : grid)
            for (const std::string& v : a.values) {
                auto row = partial;
                row.emplace_back(a.key, v);
                next.push_back(std::move(row));
            }
        grid = std::move(next);
    }
    return grid;
}

/// Runs every grid cell sequentially in grid order. Errors inside a cell
/// are recorded on that cell and the sweep moves on.
inline std::vector<SweepCell> sweep(const ExperimentConfig& base, const std::vector<SweepAxis>& axes) {
    std::vector<SweepCell> cells;
    for (const auto& assignment : sweep_grid(axes)) {
        SweepCell cell;
        cell.assignment = assignment;
        try {
            ExperimentConfig cfg = base;
            for (const auto& [k, v] : assignment) apply_override(cfg, k, v);
            cell.result = run(cfg);
        } catch (const Error& e) {
            cell.error_kind = std::string(to_string(e.kind()));
            cell.error = e.what();
        } catch (const std::exception& e) {
            cell.error_kind = "exception";
            cell.error = e.what();
        }
        cells.push_back(std::move(cell));
    }
    return cells;
}

inline std::string sweep_csv(const std::vector<SweepAxis>& axes, const std::vector<SweepCell>& cells) {
    using detail::fmt;
    std::ostringstream os;
    for (const SweepAxis& a : axes) os << a.key << ',';
    os << "regret,P_star,S_star,P_matched,S_matched,bound_P,bound_S,bound_selfconcordant,all_satisfied,eta,K,error\n";
    for (const SweepCell& c : cells) {
        for (const auto& [k, v] : c.assignment) os << v << ',';
        if (c.result) {
            const RunResult& r = *c.result;
            const double p_matched = r.regularity.P_semi.value_or(r.regularity.P_hess && r.function_class == FunctionClass::SelfConcordant
                                                                      ? *r.regularity.P_hess
                                                                      : r.regularity.P_star);
            const double s_matched = r.regularity.S_semi.value_or(r.regularity.S_hess && r.function_class == FunctionClass::SelfConcordant
                                                                      ? *r.regularity.S_hess
                                                                      : r.regularity.S_star);
            os << fmt(r.bounds.regret) << ',' << fmt(r.regularity.P_star) << ',' << fmt(r.regularity.S_star) << ','
               << fmt(p_matched) << ',' << fmt(s_matched) << ',' << fmt(r.bounds.bound_P) << ','
               << fmt(r.bounds.bound_S) << ',' << fmt(r.bounds.bound_selfconcordant) << ','
               << (r.bounds.all_satisfied() ? "true" : "false") << ',' << fmt(r.learner.config.eta) << ','
               << r.learner.config.inner_iterations << ',';
        } else {
            os << ",,,,,,,,,,,";
            std::string msg = c.error_kind + ": " + c.error;
            for (char& ch : msg)
                if (ch == ',' || ch == '\n') ch = ';';
            os << msg;
        }
        os << '\n';
    }
    return os.str();
}

inline void write_sweep(const std::vector<SweepAxis>& axes, const std::vector<SweepCell>& cells,
                        const std::filesystem::path& out_dir) {
    std::filesystem::create_directories(out_dir);
    std::ofstream(out_dir / "sweep.csv", std::ios::binary) << sweep_csv(axes, cells);
}

} // namespace dynregret
