#include "dda/report.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "dda/ingest.hpp"
#include "dda/text_util.hpp"

namespace dda {

namespace {

// Minimal ASCII table: cells joined by " | ", dash rule joined by "-+-",
// numeric columns right-aligned, no trailing whitespace.
struct TextTable {
    std::vector<std::string> header;
    std::vector<bool> numeric;
    std::vector<std::vector<std::string>> rows;

    std::string render() const {
        std::vector<std::size_t> width(header.size());
        for (std::size_t c = 0; c < header.size(); ++c)
            width[c] = header[c].size();
        for (const auto& row : rows)
            for (std::size_t c = 0; c < row.size(); ++c)
                width[c] = std::max(width[c], row[c].size());

        auto emitRow = [&](const std::vector<std::string>& cells, std::string& out) {
            for (std::size_t c = 0; c < cells.size(); ++c) {
                if (c > 0)
                    out += " | ";
                bool last = c + 1 == cells.size();
                std::size_t pad = width[c] - cells[c].size();
                if (numeric[c])
                    out.append(pad, ' ');
                out += cells[c];
                if (!numeric[c] && !last)
                    out.append(pad, ' ');
            }
            out += '\n';
        };

        std::string out;
        emitRow(header, out);
        for (std::size_t c = 0; c < header.size(); ++c) {
            if (c > 0)
                out += "-+-";
            out.append(width[c], '-');
        }
        out += '\n';
        for (const auto& row : rows)
            emitRow(row, out);
        return out;
    }
};

std::string csvQuote(std::string_view field) {
    if (field.find_first_of(",\"\r\n") == std::string_view::npos)
        return std::string(field);
    std::string out = "\"";
    for (char c : field) {
        if (c == '"')
            out += '"';
        out += c;
    }
    out += '"';
    return out;
}

// Counts flowing through findings and sums are integral in practice; emit
// them as JSON integers so output has no spurious ".0" suffixes.
nlohmann::ordered_json numberJson(double v) {
    if (v == static_cast<double>(static_cast<std::int64_t>(v)))
        return static_cast<std::int64_t>(v);
    return v;
}

std::string jsonDump(const nlohmann::ordered_json& j) { return j.dump(2) + "\n"; }

} // namespace

std::optional<double> TimingReport::ratio() const {
    if (ingestSeconds > 0.0)
        return ddaSeconds / ingestSeconds;
    return std::nullopt;
}

nlohmann::ordered_json reportToJson(const DdaReport& report) {
    nlohmann::ordered_json j;
    j["entities"] = nlohmann::ordered_json::array();
    for (const auto& e : report.entities) {
        nlohmann::ordered_json row;
        row["entity"] = e.stats.entity;
        row["rows"] = e.stats.rows;
        row["entries"] = e.stats.entries;
        row["uniqueValues"] = e.stats.uniqueValues;
        row["structure"] = structureName(e.structure);
        j["entities"].push_back(std::move(row));
    }
    nlohmann::ordered_json sums;
    sums["storeRows"] = report.sums.storeRows;
    sums["storeCols"] = report.sums.storeCols;
    sums["storeEntries"] = report.sums.storeEntries;
    sums["sumRows"] = report.sums.sumRows;
    sums["sumUnique"] = report.sums.sumUnique;
    sums["sumEntries"] = report.sums.sumEntries;
    sums["rowsOk"] = report.sums.rowsOk();
    sums["colsOk"] = report.sums.colsOk();
    sums["entriesOk"] = report.sums.entriesOk();
    j["globalSums"] = std::move(sums);
    j["skipped"] = report.skipped;
    j["durations"] = {{"ddaSeconds", report.ddaSeconds}};
    return j;
}

DdaReport reportFromJson(const nlohmann::json& j) {
    DdaReport report;
    for (const auto& row : j.at("entities")) {
        DdaReport::Entry entry;
        entry.stats.entity = row.at("entity").get<std::string>();
        entry.stats.rows = row.at("rows").get<Count>();
        entry.stats.entries = row.at("entries").get<Count>();
        entry.stats.uniqueValues = row.at("uniqueValues").get<Count>();
        auto cls = structureFromName(row.at("structure").get<std::string>());
        if (!cls)
            throw std::runtime_error("unknown structure type '" +
                                     row.at("structure").get<std::string>() + "'");
        entry.structure = *cls;
        report.entities.push_back(std::move(entry));
    }
    const auto& sums = j.at("globalSums");
    report.sums.storeRows = sums.at("storeRows").get<Count>();
    report.sums.storeCols = sums.at("storeCols").get<Count>();
    report.sums.storeEntries = sums.at("storeEntries").get<Count>();
    report.sums.sumRows = sums.at("sumRows").get<Count>();
    report.sums.sumUnique = sums.at("sumUnique").get<Count>();
    report.sums.sumEntries = sums.at("sumEntries").get<Count>();
    report.skipped = j.at("skipped").get<std::vector<std::string>>();
    if (j.contains("durations") && j.at("durations").contains("ddaSeconds"))
        report.ddaSeconds = j.at("durations").at("ddaSeconds").get<double>();
    return report;
}

std::string renderStatsTable(const DdaReport& report, RenderMode mode) {
    switch (mode) {
    case RenderMode::Json:
        return jsonDump(reportToJson(report));
    case RenderMode::Csv: {
        std::string out = "Entity,N_i,V_i,M_i,Structure Type\n";
        for (const auto& e : report.entities) {
            out += csvQuote(e.stats.entity);
            out += ',';
            out += std::to_string(e.stats.rows);
            out += ',';
            out += std::to_string(e.stats.entries);
            out += ',';
            out += std::to_string(e.stats.uniqueValues);
            out += ',';
            out += structureName(e.structure);
            out += '\n';
        }
        return out;
    }
    case RenderMode::Text: {
        TextTable table;
        table.header = {"Entity", "N_i", "V_i", "M_i", "Structure Type"};
        table.numeric = {false, true, true, true, false};
        for (const auto& e : report.entities)
            table.rows.push_back({e.stats.entity, std::to_string(e.stats.rows),
                                  std::to_string(e.stats.entries),
                                  std::to_string(e.stats.uniqueValues),
                                  std::string(structureName(e.structure))});
        return table.render();
    }
    }
    throw std::logic_error("renderStatsTable: bad mode");
}

std::string renderGlobalSums(const GlobalSums& sums) {
    auto line = [](std::string_view name, Count store, std::string_view rel, Count total,
                   bool ok) {
        std::string out(name);
        out += ": store ";
        out += std::to_string(store);
        out += ' ';
        out += rel;
        out += " entity total ";
        out += std::to_string(total);
        out += ok ? " -> ok" : " -> FAIL";
        out += '\n';
        return out;
    };
    std::string out;
    out += line("rows", sums.storeRows, sums.rowsOk() ? "<=" : ">", sums.sumRows, sums.rowsOk());
    out += line("columns", sums.storeCols, sums.colsOk() ? "==" : "!=", sums.sumUnique,
                sums.colsOk());
    out += line("entries", sums.storeEntries, sums.entriesOk() ? "==" : "!=", sums.sumEntries,
                sums.entriesOk());
    return out;
}

nlohmann::ordered_json findingToJson(const AnomalyFinding& finding) {
    nlohmann::ordered_json j;
    j["kind"] = kindName(finding.kind);
    j["entity"] = finding.entity;
    if (!finding.entityB.empty())
        j["entityB"] = finding.entityB;
    j["subject"] = finding.subject;
    if (!finding.subjectB.empty())
        j["subjectB"] = finding.subjectB;
    j["count"] = numberJson(finding.count);
    return j;
}

std::string renderFindings(const std::vector<AnomalyFinding>& findings, RenderMode mode,
                           std::string_view separator) {
    switch (mode) {
    case RenderMode::Json: {
        std::string out;
        for (const AnomalyFinding& f : findings) {
            out += findingToJson(f).dump();
            out += '\n';
        }
        return out;
    }
    case RenderMode::Csv: {
        std::string out = "Kind,Entity,EntityB,Subject,SubjectB,Count\n";
        for (const AnomalyFinding& f : findings) {
            out += csvQuote(kindName(f.kind));
            out += ',';
            out += csvQuote(f.entity);
            out += ',';
            out += csvQuote(f.entityB);
            out += ',';
            out += csvQuote(f.subject);
            out += ',';
            out += csvQuote(f.subjectB);
            out += ',';
            out += formatValue(f.count);
            out += '\n';
        }
        return out;
    }
    case RenderMode::Text: {
        TextTable table;
        table.header = {"Kind", "Entity", "Subject", "Count"};
        table.numeric = {false, false, false, true};
        for (const AnomalyFinding& f : findings) {
            std::string entity = f.entity;
            if (!f.entityB.empty())
                entity += ", " + f.entityB;
            std::string subject = unescapeSeparator(f.subject, separator);
            if (!f.subjectB.empty())
                subject += ", " + unescapeSeparator(f.subjectB, separator);
            table.rows.push_back({std::string(kindName(f.kind)), std::move(entity),
                                  std::move(subject), formatValue(f.count)});
        }
        return table.render();
    }
    }
    throw std::logic_error("renderFindings: bad mode");
}

nlohmann::ordered_json timingsToJson(const TimingReport& timings) {
    nlohmann::ordered_json j;
    j["ingestSeconds"] = timings.ingestSeconds;
    j["ddaSeconds"] = timings.ddaSeconds;
    if (auto r = timings.ratio())
        j["ratio"] = *r;
    j["recordCount"] = timings.recordCount;
    j["tripleCount"] = timings.tripleCount;
    return j;
}

std::string renderTimings(const TimingReport& timings, RenderMode mode) {
    switch (mode) {
    case RenderMode::Json:
        return jsonDump(timingsToJson(timings));
    case RenderMode::Csv: {
        std::string out = "records,triples,ingestSeconds,ddaSeconds,ratio\n";
        out += std::to_string(timings.recordCount);
        out += ',';
        out += std::to_string(timings.tripleCount);
        out += ',';
        out += formatSeconds(timings.ingestSeconds);
        out += ',';
        out += formatSeconds(timings.ddaSeconds);
        out += ',';
        if (auto r = timings.ratio())
            out += formatSeconds(*r);
        out += '\n';
        return out;
    }
    case RenderMode::Text: {
        auto throughput = [&](double seconds) -> std::string {
            if (seconds <= 0.0 || timings.recordCount == 0)
                return "";
            auto rate = static_cast<long long>(
                std::llround(static_cast<double>(timings.recordCount) / seconds));
            return "  (" + std::to_string(rate) + " records/s)";
        };
        std::string out;
        out += "records: " + std::to_string(timings.recordCount) + "\n";
        out += "triples: " + std::to_string(timings.tripleCount) + "\n";
        out += "ingest:  " + formatSeconds(timings.ingestSeconds) + " s" +
               throughput(timings.ingestSeconds) + "\n";
        out += "dda:     " + formatSeconds(timings.ddaSeconds) + " s" +
               throughput(timings.ddaSeconds) + "\n";
        if (auto r = timings.ratio())
            out += "ratio:   " + formatSeconds(*r) + "  (dda/ingest)\n";
        return out;
    }
    }
    throw std::logic_error("renderTimings: bad mode");
}

} // namespace dda
