#include "kinalign/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <map>
#include <sstream>

#include <nlohmann/json.hpp>

#include "kinalign/errors.hpp"

namespace kinalign {

double dice(const MaskImage& pred, const MaskImage& gt) {
    if (pred.width != gt.width || pred.height != gt.height) {
        throw DimensionMismatch("dice: mask sizes differ");
    }
    std::size_t inter = 0, p = 0, g = 0;
    for (std::size_t i = 0; i < pred.data.size(); ++i) {
        const bool a = pred.data[i] != 0;
        const bool b = gt.data[i] != 0;
        inter += a && b;
        p += a;
        g += b;
    }
    if (p + g == 0) {
        return 1.0;
    }
    return 2.0 * static_cast<double>(inter) / static_cast<double>(p + g);
}

double joint_mae(const JointConfig& a, const JointConfig& b,
                 const DHChain& chain) {
    if (a.size() != b.size() || a.size() != chain.dof()) {
        throw LengthMismatch("joint_mae: configuration lengths differ");
    }
    double sum = 0.0;
    int count = 0;
    for (std::size_t j = 0; j < a.size(); ++j) {
        if (chain.rows[j].kind != JointKind::Revolute) continue;
        sum += std::abs(rad_to_deg(a[j] - b[j]));
        ++count;
    }
    return count == 0 ? 0.0 : sum / count;
}

double prismatic_mae_mm(const JointConfig& a, const JointConfig& b,
                        const DHChain& chain) {
    if (a.size() != b.size() || a.size() != chain.dof()) {
        throw LengthMismatch("prismatic_mae_mm: configuration lengths differ");
    }
    double sum = 0.0;
    int count = 0;
    for (std::size_t j = 0; j < a.size(); ++j) {
        if (chain.rows[j].kind != JointKind::Prismatic) continue;
        sum += std::abs(a[j] - b[j]) * 1000.0;
        ++count;
    }
    return count == 0 ? 0.0 : sum / count;
}

namespace {

MetricStat stat_of(const std::vector<double>& values) {
    MetricStat s;
    for (double v : values) s.mean += v;
    s.mean /= static_cast<double>(values.size());
    for (double v : values) s.stddev += (v - s.mean) * (v - s.mean);
    s.stddev = std::sqrt(s.stddev / static_cast<double>(values.size()));
    return s;
}

std::string fmt_stat(const MetricStat& s) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%7.3f ± %-6.3f", s.mean, s.stddev);
    return buf;
}

}  // namespace

Summary aggregate(const std::vector<EvalRecord>& records) {
    if (records.empty()) {
        throw EmptyList("aggregate: no records");
    }
    std::map<std::string, std::vector<const EvalRecord*>> by_domain;
    for (const EvalRecord& r : records) {
        by_domain[r.domain].push_back(&r);
    }
    Summary out;
    for (const auto& [domain, rows] : by_domain) {
        DomainSummary ds;
        ds.domain = domain;
        ds.frames = static_cast<int>(rows.size());
        std::vector<double> v(rows.size());
        const auto fill = [&](auto member) {
            for (std::size_t i = 0; i < rows.size(); ++i) {
                v[i] = static_cast<double>(rows[i]->*member);
            }
            return stat_of(v);
        };
        ds.dice_initial = fill(&EvalRecord::dice_initial);
        ds.dice_final = fill(&EvalRecord::dice_final);
        ds.mae_initial_deg = fill(&EvalRecord::mae_initial_deg);
        ds.mae_final_deg = fill(&EvalRecord::mae_final_deg);
        ds.iterations = fill(&EvalRecord::iterations);
        out.domains.push_back(std::move(ds));
    }
    return out;
}

std::string Summary::to_json() const {
    nlohmann::json doc = nlohmann::json::array();
    for (const DomainSummary& ds : domains) {
        nlohmann::json row;
        row["domain"] = ds.domain;
        row["frames"] = ds.frames;
        const auto put = [&row](const char* key, const MetricStat& s) {
            row[key] = {{"mean", s.mean}, {"std", s.stddev}};
        };
        put("dice_initial", ds.dice_initial);
        put("dice_final", ds.dice_final);
        put("mae_initial_deg", ds.mae_initial_deg);
        put("mae_final_deg", ds.mae_final_deg);
        put("iterations", ds.iterations);
        doc.push_back(std::move(row));
    }
    return doc.dump(2);
}

std::string Summary::to_table() const {
    std::ostringstream out;
    char head[160];
    std::snprintf(head, sizeof(head), "%-18s %6s %-18s %-18s %-18s %-18s %s\n",
                  "domain", "frames", "dice (init)", "dice (final)",
                  "mae deg (init)", "mae deg (final)", "iterations");
    out << head;
    for (const DomainSummary& ds : domains) {
        char line[240];
        std::snprintf(line, sizeof(line), "%-18s %6d %-18s %-18s %-18s %-18s %s\n",
                      ds.domain.c_str(), ds.frames,
                      fmt_stat(ds.dice_initial).c_str(),
                      fmt_stat(ds.dice_final).c_str(),
                      fmt_stat(ds.mae_initial_deg).c_str(),
                      fmt_stat(ds.mae_final_deg).c_str(),
                      fmt_stat(ds.iterations).c_str());
        out << line;
    }
    return out.str();
}

std::string records_to_csv(const std::vector<EvalRecord>& records) {
    std::ostringstream out;
    out << "frame_id,domain,dice_initial,dice_final,mae_initial_deg,"
           "mae_final_deg,iterations\n";
    for (const EvalRecord& r : records) {
        char line[240];
        std::snprintf(line, sizeof(line), "%d,%s,%.6f,%.6f,%.6f,%.6f,%d\n",
                      r.frame_id, r.domain.c_str(), r.dice_initial,
                      r.dice_final, r.mae_initial_deg, r.mae_final_deg,
                      r.iterations);
        out << line;
    }
    return out.str();
}

std::vector<EvalRecord> records_from_csv(const std::string& csv) {
    std::istringstream in(csv);
    std::string line;
    if (!std::getline(in, line) ||
        line != "frame_id,domain,dice_initial,dice_final,mae_initial_deg,"
                "mae_final_deg,iterations") {
        throw ParseError("records csv: unexpected header");
    }
    std::vector<EvalRecord> records;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        std::vector<std::string> cells;
        std::istringstream row(line);
        std::string cell;
        while (std::getline(row, cell, ',')) cells.push_back(cell);
        if (cells.size() != 7) {
            throw ParseError("records csv: expected 7 cells, got line '" + line + "'");
        }
        try {
            EvalRecord r;
            r.frame_id = std::stoi(cells[0]);
            r.domain = cells[1];
            r.dice_initial = std::stod(cells[2]);
            r.dice_final = std::stod(cells[3]);
            r.mae_initial_deg = std::stod(cells[4]);
            r.mae_final_deg = std::stod(cells[5]);
            r.iterations = std::stoi(cells[6]);
            records.push_back(std::move(r));
        } catch (const std::exception&) {
            throw ParseError("records csv: non-numeric cell in line '" + line + "'");
        }
    }
    return records;
}

}  // namespace kinalign
