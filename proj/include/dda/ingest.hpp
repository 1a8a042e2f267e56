#pragma once

#include <istream>
#include <map>
#include <set>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "dda/assoc_array.hpp"

namespace dda {

enum class InputFormat { Csv, Tsv, Jsonl };
enum class ErrorPolicy { Abort, Skip };

/// Parse or ingest failure. line() is 1-based and refers to the physical
/// input line where the problem was detected (0 when not applicable).
class IngestError : public std::runtime_error {
public:
    IngestError(const std::string& msg, std::size_t line = 0)
        : std::runtime_error(line ? "line " + std::to_string(line) + ": " + msg : msg),
          line_(line) {}
    std::size_t line() const { return line_; }

private:
    std::size_t line_;
};

/// Controls how records are parsed and exploded into `entity|value` columns.
struct IngestConfig {
    InputFormat format = InputFormat::Csv;
    std::string idField;                       // row key source; empty = line ordinal
    std::string rowKeyPrefix = "row|";         // prefix for synthesized row keys
    std::string multiValueDelimiter;           // empty = single-valued fields
    std::set<std::string> tokenizedFields;     // whitespace-split fields (by input name)
    std::string keySeparator = "|";
    std::map<std::string, std::string> entityRenames; // input field name -> entity name
    ErrorPolicy onError = ErrorPolicy::Abort;

    /// Throws std::invalid_argument when the configuration is internally
    /// inconsistent (empty separator, tokenized id field, ...).
    void validate() const;

    /// Entity name a field maps to (rename applied).
    const std::string& entityFor(const std::string& field) const;
};

/// One parsed input record: a unique row key plus, per entity in first-seen
/// field order, the raw value strings. Blank values are kept here and dropped
/// at explode time.
struct Record {
    std::string rowKey;
    std::vector<std::pair<std::string, std::vector<std::string>>> values;

    std::vector<std::string>* find(std::string_view entity);
    const std::vector<std::string>* find(std::string_view entity) const;
};

/// Ordered set of entity names observed during an ingest run. Column keys of
/// entity `e` share the prefix `e + separator`; the separator may not occur
/// inside entity names, which keeps prefixes mutually non-prefixing.
class EntityRegistry {
public:
    explicit EntityRegistry(std::string separator = "|");

    /// Registers an entity if unseen; validates the name. Idempotent.
    void add(const std::string& entity);

    bool contains(std::string_view entity) const;
    const std::vector<std::string>& entities() const { return entities_; }
    const std::string& separator() const { return separator_; }
    std::string prefixOf(std::string_view entity) const;

private:
    std::string separator_;
    std::vector<std::string> entities_;
};

struct ParseResult {
    std::vector<Record> records;
    std::size_t skipped = 0;               // records dropped under ErrorPolicy::Skip
    std::vector<std::string> warnings;     // one diagnostic per skipped record
};

/// Parses the whole stream into records. CSV follows RFC-4180 quoting
/// (quoted fields may contain delimiters, quotes and newlines); TSV is plain
/// tab-separated with no quoting; JSONL expects one object per line with
/// string or array-of-string members. Malformed input raises IngestError
/// under ErrorPolicy::Abort, or skips the record with a warning under
/// ErrorPolicy::Skip. Duplicate row keys are treated the same way.
ParseResult parseRecords(std::istream& in, const IngestConfig& config);

/// Explodes one record: for each entity and each distinct non-blank value v,
/// emits Triple(rowKey, entity + separator + escape(v), 1). Duplicate values
/// within the record collapse to a single presence triple. New entities are
/// registered in `registry` as they appear.
std::vector<Triple> explode(const Record& record, EntityRegistry& registry,
                            const IngestConfig& config);

/// Separator occurrences inside a value are escaped as backslash + separator
/// so prefix selection stays unambiguous; display code reverses this.
std::string escapeSeparator(std::string_view value, std::string_view separator);
std::string unescapeSeparator(std::string_view value, std::string_view separator);

struct Store {
    AssociativeArray array;
    EntityRegistry registry;
};

/// Explodes every record and assembles the full store. Per-entity sub-arrays
/// are column-disjoint; selectByColPrefix(store, registry.prefixOf(e))
/// recovers each of them.
Store buildStore(const std::vector<Record>& records, const IngestConfig& config);

} // namespace dda
