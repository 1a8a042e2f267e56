#include "dda/dda_engine.hpp"

#include <chrono>
#include <fstream>
#include <map>
#include <sstream>
#include <stdexcept>

#include "dda/text_util.hpp"

namespace dda {

std::string_view structureName(StructureClass c) {
    switch (c) {
    case StructureClass::Identity: return "Identity";
    case StructureClass::Authoritative: return "Authority";
    case StructureClass::Organizational: return "Organization";
    case StructureClass::Vestigial: return "Vestigial";
    }
    throw std::logic_error("structureName: bad enum value");
}

std::optional<StructureClass> structureFromName(std::string_view name) {
    if (name == "Identity")
        return StructureClass::Identity;
    if (name == "Authority" || name == "Authoritative")
        return StructureClass::Authoritative;
    if (name == "Organization" || name == "Organizational")
        return StructureClass::Organizational;
    if (name == "Vestigial")
        return StructureClass::Vestigial;
    return std::nullopt;
}

void ClassifierConfig::validate() const {
    if (!(tauAuthority > 1.0))
        throw std::invalid_argument("tauAuthority must be > 1");
    if (!(tauOrganization > 1.0))
        throw std::invalid_argument("tauOrganization must be > 1");
    if (vestigialMaxUnique < 1)
        throw std::invalid_argument("vestigialMaxUnique must be >= 1");
}

std::vector<std::string> GlobalSums::failures() const {
    std::vector<std::string> out;
    if (!rowsOk())
        out.push_back("rows: store has " + std::to_string(storeRows) +
                      ", entity total is " + std::to_string(sumRows) + " (expected store <= total)");
    if (!colsOk())
        out.push_back("columns: store has " + std::to_string(storeCols) +
                      ", entity total is " + std::to_string(sumUnique) + " (expected equal)");
    if (!entriesOk())
        out.push_back("entries: store has " + std::to_string(storeEntries) +
                      ", entity total is " + std::to_string(sumEntries) + " (expected equal)");
    return out;
}

EntityScan computeEntityStats(const AssociativeArray& store, const EntityRegistry& registry) {
    EntityScan scan;
    for (const std::string& entity : registry.entities()) {
        AssociativeArray sub = selectByColPrefix(store, registry.prefixOf(entity));
        if (sub.numRows() < 1) {
            scan.skipped.push_back(entity);
            continue;
        }
        scan.stats.push_back({entity, sub.numRows(), sub.numCols(), sub.nnz()});
    }
    return scan;
}

GlobalSums validateGlobalSums(const AssociativeArray& store, const std::vector<EntityStats>& stats) {
    GlobalSums sums;
    sums.storeRows = store.numRows();
    sums.storeCols = store.numCols();
    sums.storeEntries = store.nnz();
    for (const EntityStats& s : stats) {
        sums.sumRows += s.rows;
        sums.sumUnique += s.uniqueValues;
        sums.sumEntries += s.entries;
    }
    return sums;
}

StructureClass classify(const EntityStats& stats, const ClassifierConfig& config) {
    config.validate();
    if (stats.rows < 1)
        throw std::invalid_argument("classify: entity '" + stats.entity + "' has no rows");
    if (stats.uniqueValues <= config.vestigialMaxUnique)
        return StructureClass::Vestigial;
    double m = static_cast<double>(stats.uniqueValues);
    double n = static_cast<double>(stats.rows);
    if (m / n >= config.tauAuthority)
        return StructureClass::Authoritative;
    if (n / m >= config.tauOrganization)
        return StructureClass::Organizational;
    return StructureClass::Identity;
}

DdaReport analyze(const AssociativeArray& store, const EntityRegistry& registry,
                  const ClassifierConfig& config) {
    config.validate();
    auto start = std::chrono::steady_clock::now();
    DdaReport report;
    EntityScan scan = computeEntityStats(store, registry);
    report.skipped = std::move(scan.skipped);
    for (EntityStats& s : scan.stats) {
        StructureClass cls = classify(s, config);
        report.entities.push_back({std::move(s), cls});
    }
    std::vector<EntityStats> statsOnly;
    statsOnly.reserve(report.entities.size());
    for (const auto& e : report.entities)
        statsOnly.push_back(e.stats);
    report.sums = validateGlobalSums(store, statsOnly);
    auto end = std::chrono::steady_clock::now();
    report.ddaSeconds = std::chrono::duration<double>(end - start).count();
    return report;
}

void writeRegistryFile(const std::filesystem::path& path, const EntityRegistry& registry,
                       const std::vector<EntityStats>& stats) {
    std::map<std::string, const EntityStats*> byEntity;
    for (const EntityStats& s : stats)
        byEntity[s.entity] = &s;
    std::ofstream out(path, std::ios::binary);
    if (!out)
        throw std::runtime_error("cannot open for writing: " + path.string());
    for (const std::string& entity : registry.entities()) {
        const EntityStats* s = byEntity.count(entity) ? byEntity[entity] : nullptr;
        out << escapeField(entity) << '\t' << (s ? s->rows : 0) << '\t'
            << (s ? s->uniqueValues : 0) << '\t' << (s ? s->entries : 0) << '\n';
    }
    if (!out)
        throw std::runtime_error("write failed: " + path.string());
}

EntityRegistry readRegistryFile(const std::filesystem::path& path, std::string separator) {
    std::ifstream in(path, std::ios::binary);
    if (!in)
        throw std::runtime_error("cannot open: " + path.string());
    EntityRegistry registry(std::move(separator));
    std::string line;
    std::size_t lineNo = 0;
    while (std::getline(in, line)) {
        ++lineNo;
        if (line.empty())
            continue;
        auto fields = splitTabs(line);
        if (fields.size() != 4)
            throw std::runtime_error("registry file " + path.string() + " line " +
                                     std::to_string(lineNo) + ": expected 4 tab-separated fields");
        registry.add(unescapeField(fields[0]));
    }
    return registry;
}

} // namespace dda
