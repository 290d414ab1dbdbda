#include "adafrugal/report.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <limits>

#include "json.hpp"

#include "adafrugal/config.hpp"
#include "adafrugal/errors.hpp"
#include "adafrugal/memory_model.hpp"

namespace adafrugal {

namespace {

using nlohmann::json;

double parse_csv_double(std::string_view field, const char* what) {
    double out = 0.0;
    const auto [ptr, ec] = std::from_chars(field.data(), field.data() + field.size(), out);
    if (ec != std::errc{} || ptr != field.data() + field.size()) {
        throw ShapeMismatch(std::string("metrics csv: bad ") + what + " '" +
                            std::string(field) + "'");
    }
    return out;
}

long parse_csv_long(std::string_view field, const char* what) {
    long out = 0;
    const auto [ptr, ec] = std::from_chars(field.data(), field.data() + field.size(), out);
    if (ec != std::errc{} || ptr != field.data() + field.size()) {
        throw ShapeMismatch(std::string("metrics csv: bad ") + what + " '" +
                            std::string(field) + "'");
    }
    return out;
}

std::vector<std::string_view> split_fields(std::string_view line) {
    std::vector<std::string_view> fields;
    while (true) {
        const auto comma = line.find(',');
        fields.push_back(line.substr(0, comma));
        if (comma == std::string_view::npos) {
            break;
        }
        line.remove_prefix(comma + 1);
    }
    return fields;
}

json mode_summary_json(const ModeSummary& m) {
    json runs = json::array();
    for (const RunSummary& r : m.runs) {
        runs.push_back({{"seed", r.seed},
                        {"final_train_loss", r.final_train_loss},
                        {"final_val_loss", r.final_val_loss},
                        {"redefinitions", r.redefinitions},
                        {"final_state_scalars", r.final_state_scalars},
                        {"final_state_bytes", r.final_state_bytes}});
    }
    json out = {{"mode", mode_token(m.mode)},
                {"median_final_train_loss", m.median_final_train_loss},
                {"median_final_val_loss", m.median_final_val_loss},
                {"median_redefinitions", m.median_redefinitions},
                {"median_final_state_bytes", m.median_final_state_bytes},
                {"runs", runs}};
    if (m.redefinitions_vs_static) {
        out["redefinitions_vs_static"] = *m.redefinitions_vs_static;
    } else {
        out["redefinitions_vs_static"] = nullptr;
    }
    return out;
}

const ModeSummary* find_mode(const std::vector<ModeSummary>& modes, EngineMode mode) {
    for (const ModeSummary& m : modes) {
        if (m.mode == mode) {
            return &m;
        }
    }
    return nullptr;
}

}  // namespace

std::string format_double(double v) {
    char buf[32];
    const auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, v);
    return std::string(buf, ptr);
}

std::string metrics_csv(const MetricsTrace& trace) {
    std::string out(kMetricsCsvHeader);
    out += '\n';
    for (const MetricsRow& row : trace) {
        out += std::to_string(row.step);
        out += ',';
        out += format_double(row.train_loss);
        out += ',';
        if (row.val_loss) {
            out += format_double(*row.val_loss);
        }
        out += ',';
        out += format_double(row.rho);
        out += ',';
        out += format_double(row.t_current);
        out += ',';
        out += row.redefined ? '1' : '0';
        out += ',';
        out += std::to_string(row.state_scalars);
        out += '\n';
    }
    return out;
}

MetricsTrace parse_metrics_csv(std::string_view text) {
    if (text.empty()) {
        throw EmptyInput("metrics csv: empty input");
    }
    MetricsTrace trace;
    bool saw_header = false;
    while (!text.empty()) {
        const auto newline = text.find('\n');
        std::string_view line = text.substr(0, newline);
        text.remove_prefix(newline == std::string_view::npos ? text.size() : newline + 1);
        if (!line.empty() && line.back() == '\r') {
            line.remove_suffix(1);
        }
        if (line.empty()) {
            continue;
        }
        if (!saw_header) {
            if (line != kMetricsCsvHeader) {
                throw ShapeMismatch("metrics csv: unexpected header '" + std::string(line) +
                                    "'");
            }
            saw_header = true;
            continue;
        }
        const auto fields = split_fields(line);
        if (fields.size() != 7) {
            throw ShapeMismatch("metrics csv: expected 7 fields, got " +
                                std::to_string(fields.size()));
        }
        MetricsRow row;
        row.step = parse_csv_long(fields[0], "step");
        row.train_loss = parse_csv_double(fields[1], "train_loss");
        if (!fields[2].empty()) {
            row.val_loss = parse_csv_double(fields[2], "val_loss");
        }
        row.rho = parse_csv_double(fields[3], "rho");
        row.t_current = parse_csv_double(fields[4], "t_current");
        if (fields[5] == "1") {
            row.redefined = true;
        } else if (fields[5] == "0") {
            row.redefined = false;
        } else {
            throw ShapeMismatch("metrics csv: redefined flag must be 0 or 1");
        }
        row.state_scalars = parse_csv_long(fields[6], "state_scalars");
        if (!trace.empty() && row.step <= trace.back().step) {
            throw NotSorted("metrics csv: steps must increase strictly");
        }
        trace.push_back(std::move(row));
    }
    if (!saw_header) {
        throw EmptyInput("metrics csv: no header line");
    }
    return trace;
}

RunSummary summarize_run(EngineMode mode, std::uint64_t seed, const RunResult& result) {
    RunSummary s;
    s.mode = mode;
    s.seed = seed;
    s.final_val_loss = result.final_val_loss;
    if (result.trace.empty()) {
        s.final_train_loss = std::numeric_limits<double>::quiet_NaN();
        s.redefinitions = 0;
        s.final_state_scalars = 0;
    } else {
        s.final_train_loss = result.trace.back().train_loss;
        s.redefinitions = redefinition_count(result.trace);
        s.final_state_scalars = result.trace.back().state_scalars;
    }
    s.final_state_bytes = s.final_state_scalars * kBytesPerStateScalar;
    return s;
}

double median(std::vector<double> values) {
    if (values.empty()) {
        throw EmptyInput("median of empty vector");
    }
    std::sort(values.begin(), values.end());
    const std::size_t mid = values.size() / 2;
    if (values.size() % 2 == 1) {
        return values[mid];
    }
    return 0.5 * (values[mid - 1] + values[mid]);
}

std::vector<ModeSummary> summarize(const std::vector<RunSummary>& cells) {
    if (cells.empty()) {
        throw EmptyInput("summarize: no runs");
    }
    std::vector<ModeSummary> modes;
    for (const RunSummary& cell : cells) {
        ModeSummary* entry = nullptr;
        for (ModeSummary& m : modes) {
            if (m.mode == cell.mode) {
                entry = &m;
                break;
            }
        }
        if (!entry) {
            modes.emplace_back();
            entry = &modes.back();
            entry->mode = cell.mode;
        }
        entry->runs.push_back(cell);
    }
    for (ModeSummary& m : modes) {
        std::vector<double> train;
        std::vector<double> val;
        std::vector<double> redefs;
        std::vector<double> bytes;
        for (const RunSummary& r : m.runs) {
            train.push_back(r.final_train_loss);
            val.push_back(r.final_val_loss);
            redefs.push_back(static_cast<double>(r.redefinitions));
            bytes.push_back(static_cast<double>(r.final_state_bytes));
        }
        m.median_final_train_loss = median(train);
        m.median_final_val_loss = median(val);
        m.median_redefinitions = median(redefs);
        m.median_final_state_bytes = median(bytes);
    }
    const ModeSummary* baseline = find_mode(modes, EngineMode::FrugalStatic);
    if (baseline && baseline->median_redefinitions > 0.0) {
        const double base = baseline->median_redefinitions;
        for (ModeSummary& m : modes) {
            m.redefinitions_vs_static = m.median_redefinitions / base;
        }
    }
    return modes;
}

std::string compare_csv(const std::vector<RunSummary>& cells) {
    std::string out = "mode,seed,final_train_loss,final_val_loss,redefinitions,state_bytes\n";
    for (const RunSummary& cell : cells) {
        out += mode_token(cell.mode);
        out += ',';
        out += std::to_string(cell.seed);
        out += ',';
        out += format_double(cell.final_train_loss);
        out += ',';
        out += format_double(cell.final_val_loss);
        out += ',';
        out += std::to_string(cell.redefinitions);
        out += ',';
        out += std::to_string(cell.final_state_bytes);
        out += '\n';
    }
    return out;
}

std::string summary_json(const std::string& task, const std::vector<ModeSummary>& modes) {
    json out;
    out["task"] = task;
    json mode_list = json::array();
    for (const ModeSummary& m : modes) {
        mode_list.push_back(mode_summary_json(m));
    }
    out["modes"] = mode_list;

    const ModeSummary* adamw = find_mode(modes, EngineMode::AdamWFull);
    const ModeSummary* frugal = find_mode(modes, EngineMode::FrugalStatic);
    const ModeSummary* signsgd = find_mode(modes, EngineMode::SignSgdOnly);
    if ((adamw && frugal) || (frugal && signsgd)) {
        json ordering;
        ordering["metric"] = "median_final_val_loss";
        json violations = json::array();
        if (adamw && frugal) {
            const bool ok = adamw->median_final_val_loss <= frugal->median_final_val_loss;
            ordering["adamw_le_frugal"] = ok;
            if (!ok) {
                violations.push_back("adamw_full > frugal_static");
            }
        }
        if (frugal && signsgd) {
            const bool ok = frugal->median_final_val_loss <= signsgd->median_final_val_loss;
            ordering["frugal_le_signsgd"] = ok;
            if (!ok) {
                violations.push_back("frugal_static > signsgd_only");
            }
        }
        ordering["violations"] = violations;
        out["ordering"] = ordering;
    }
    return out.dump(2) + "\n";
}

std::string projectors_json(const RunResult& result) {
    json events = json::array();
    for (const ProjectorEvent& event : result.projector_events) {
        json params = json::array();
        for (const ProjectorRecord& record : event.params) {
            params.push_back({{"param", record.param}, {"columns", record.columns}});
        }
        events.push_back({{"step", event.step}, {"params", params}});
    }
    json out = {{"events", events}};
    return out.dump(2) + "\n";
}

}  // namespace adafrugal
