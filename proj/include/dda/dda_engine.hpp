#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "dda/assoc_array.hpp"
#include "dda/ingest.hpp"

namespace dda {

using Count = std::uint64_t;

/// Dimensional triple of one entity's sub-array: rows with at least one
/// value, distinct column keys, and stored entries.
struct EntityStats {
    std::string entity;
    Count rows = 0;        // N_i
    Count uniqueValues = 0; // M_i
    Count entries = 0;     // V_i

    friend bool operator==(const EntityStats&, const EntityStats&) = default;
};

/// Structural model an entity's sub-array most resembles.
enum class StructureClass { Identity, Authoritative, Organizational, Vestigial };

/// Display form used in tables and serialized output.
std::string_view structureName(StructureClass c);

/// Accepts both display names ("Authority") and class identifiers
/// ("Authoritative").
std::optional<StructureClass> structureFromName(std::string_view name);

/// Thresholds turning the qualitative row/column-ratio comparisons into a
/// deterministic decision. The defaults were calibrated so every published
/// reference profile classifies correctly; ties at a threshold fall into the
/// special class.
struct ClassifierConfig {
    double tauAuthority = 2.0;     // Authoritative when M_i / N_i >= tau
    double tauOrganization = 50.0; // Organizational when N_i / M_i >= tau
    Count vestigialMaxUnique = 1;  // Vestigial when M_i <= this

    void validate() const; // throws std::invalid_argument
};

/// Whole-store consistency relations tying the store's dimensions to the
/// per-entity decomposition: rows N <= sum N_i, columns M == sum M_i,
/// entries V == sum V_i.
struct GlobalSums {
    Count storeRows = 0;
    Count storeCols = 0;
    Count storeEntries = 0;
    Count sumRows = 0;
    Count sumUnique = 0;
    Count sumEntries = 0;

    bool rowsOk() const { return storeRows <= sumRows; }
    bool colsOk() const { return storeCols == sumUnique; }
    bool entriesOk() const { return storeEntries == sumEntries; }
    bool allOk() const { return rowsOk() && colsOk() && entriesOk(); }

    /// Names of the failed relations with both sides, empty when allOk().
    std::vector<std::string> failures() const;

    friend bool operator==(const GlobalSums&, const GlobalSums&) = default;
};

struct EntityScan {
    std::vector<EntityStats> stats;     // registry order, empty entities omitted
    std::vector<std::string> skipped;   // entities with no rows in the store
};

/// Dimensional analysis pass: for each registered entity, selects its
/// sub-array by column prefix and records (rows, unique values, entries).
/// Entities with zero rows are skipped but reported.
EntityScan computeEntityStats(const AssociativeArray& store, const EntityRegistry& registry);

GlobalSums validateGlobalSums(const AssociativeArray& store, const std::vector<EntityStats>& stats);

/// Total, deterministic decision procedure, in precedence order:
///   1. Vestigial        if M_i <= vestigialMaxUnique
///   2. Authoritative    if M_i / N_i >= tauAuthority
///   3. Organizational   if N_i / M_i >= tauOrganization
///   4. Identity         otherwise
/// Requires stats.rows >= 1.
StructureClass classify(const EntityStats& stats, const ClassifierConfig& config = {});

struct DdaReport {
    struct Entry {
        EntityStats stats;
        StructureClass structure = StructureClass::Identity;

        friend bool operator==(const Entry&, const Entry&) = default;
    };
    std::vector<Entry> entities;
    GlobalSums sums;
    std::vector<std::string> skipped;
    double ddaSeconds = 0.0;
};

/// Full analysis: entity stats, classification, global-sum validation and
/// the wall-clock duration of the pass.
DdaReport analyze(const AssociativeArray& store, const EntityRegistry& registry,
                  const ClassifierConfig& config = {});

// Registry sidecar: one `entity<TAB>Ni<TAB>Mi<TAB>Vi` line per entity in
// registry order. Ingest writes it with zero counts; analysis fills them in.
// Entity names use the same backslash escaping as the triple format.

void writeRegistryFile(const std::filesystem::path& path, const EntityRegistry& registry,
                       const std::vector<EntityStats>& stats = {});
EntityRegistry readRegistryFile(const std::filesystem::path& path, std::string separator = "|");

} // namespace dda
