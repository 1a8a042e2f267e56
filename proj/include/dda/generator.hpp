#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "dda/dda_engine.hpp"

namespace dda {

/// One column of a synthetic corpus: the entity name, the structural class
/// its data should classify as, and an exact fraction of rows left blank
/// (floor(rows * missingRate) rows, chosen by the seeded RNG).
struct EntityTarget {
    std::string name;
    StructureClass target = StructureClass::Identity;
    double missingRate = 0.0;
};

struct GeneratorSpec {
    Count rows = 0;
    std::uint64_t seed = 0;
    std::vector<EntityTarget> entities;
};

struct GeneratedCorpus {
    std::string csv;
    /// Field names that must be ingested with whitespace tokenization
    /// (the Authoritative columns).
    std::vector<std::string> tokenizedFields;
    /// Rows with values in at least two entities.
    Count rowsSpanningMultiple = 0;
    /// Rows with at least one entity present and at least one blank.
    Count rowsMissingSome = 0;
};

/// Throws std::invalid_argument when a target class cannot be realized with
/// the requested row count and missing rate under `config` (for example an
/// Organizational column needs enough present rows to push the row/value
/// ratio past tauOrganization).
void checkFeasible(const GeneratorSpec& spec, const ClassifierConfig& config = {});

/// Emits a CSV corpus whose ingest + analysis classifies every entity as
/// requested. Output is a pure function of the spec: the same spec produces
/// byte-identical CSV on every run.
GeneratedCorpus generateCorpus(const GeneratorSpec& spec, const ClassifierConfig& config = {});

/// Parses a CLI entity spec of the form `name=class[:missingRate]`, e.g.
/// "user=identity" or "host=organization:0.25". Class names are matched
/// case-insensitively against both display and full forms.
EntityTarget parseEntityTarget(const std::string& text);

} // namespace dda
