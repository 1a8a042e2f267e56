#include "dda/ingest.hpp"

#include <algorithm>
#include <cctype>
#include <cstdio>
#include <sstream>
#include <unordered_set>

#include <json.hpp>

namespace dda {

namespace {

std::vector<std::string> splitWhitespace(std::string_view s) {
    std::vector<std::string> out;
    std::size_t i = 0;
    while (i < s.size()) {
        while (i < s.size() && std::isspace(static_cast<unsigned char>(s[i])))
            ++i;
        std::size_t start = i;
        while (i < s.size() && !std::isspace(static_cast<unsigned char>(s[i])))
            ++i;
        if (i > start)
            out.emplace_back(s.substr(start, i - start));
    }
    return out;
}

std::vector<std::string> splitDelimiter(std::string_view s, std::string_view delim) {
    std::vector<std::string> out;
    std::size_t start = 0;
    while (true) {
        std::size_t pos = s.find(delim, start);
        if (pos == std::string_view::npos) {
            out.emplace_back(s.substr(start));
            return out;
        }
        out.emplace_back(s.substr(start, pos - start));
        start = pos + delim.size();
    }
}

std::string readAll(std::istream& in) {
    std::ostringstream buf;
    buf << in.rdbuf();
    return buf.str();
}

// One raw delimited record: field strings plus the physical line it started on.
struct RawRecord {
    std::vector<std::string> fields;
    std::size_t line = 0;
};

// RFC-4180 scanner. Quoted fields may contain delimiters, doubled quotes and
// newlines; a quote opening mid-field or trailing garbage after a closing
// quote is malformed. On error the scanner resynchronizes at the next
// unquoted line break so ErrorPolicy::Skip can continue.
class CsvScanner {
public:
    explicit CsvScanner(std::string_view text) : text_(text) {
        if (text_.starts_with("\xEF\xBB\xBF"))
            pos_ = 3; // UTF-8 BOM
    }

    bool done() const { return pos_ >= text_.size(); }

    // Returns false at end of input; on malformed input throws IngestError
    // after advancing past the bad record.
    bool next(RawRecord& out) {
        if (done())
            return false;
        out.fields.clear();
        out.line = line_;
        std::string field;
        bool quoted = false;
        bool fieldStart = true;
        while (pos_ < text_.size()) {
            char c = text_[pos_];
            if (quoted) {
                if (c == '"') {
                    if (pos_ + 1 < text_.size() && text_[pos_ + 1] == '"') {
                        field += '"';
                        pos_ += 2;
                        continue;
                    }
                    quoted = false;
                    ++pos_;
                    // Only a delimiter, line break or end may follow.
                    if (pos_ < text_.size() && text_[pos_] != ',' && text_[pos_] != '\n' &&
                        !(text_[pos_] == '\r' && pos_ + 1 < text_.size() && text_[pos_ + 1] == '\n'))
                        fail(out.line, "garbage after closing quote");
                    continue;
                }
                if (c == '\n')
                    ++line_;
                field += c;
                ++pos_;
                continue;
            }
            if (c == '"') {
                if (!fieldStart)
                    fail(out.line, "quote inside unquoted field");
                quoted = true;
                fieldStart = false;
                ++pos_;
                continue;
            }
            if (c == ',') {
                out.fields.push_back(std::move(field));
                field.clear();
                fieldStart = true;
                ++pos_;
                continue;
            }
            if (c == '\r' && pos_ + 1 < text_.size() && text_[pos_ + 1] == '\n') {
                pos_ += 2;
                ++line_;
                out.fields.push_back(std::move(field));
                return true;
            }
            if (c == '\n') {
                ++pos_;
                ++line_;
                out.fields.push_back(std::move(field));
                return true;
            }
            field += c;
            fieldStart = false;
            ++pos_;
        }
        if (quoted)
            fail(out.line, "unterminated quoted field");
        out.fields.push_back(std::move(field));
        return true;
    }

private:
    [[noreturn]] void fail(std::size_t recordLine, const std::string& msg) {
        // Skip to the next line break so a subsequent next() starts clean.
        while (pos_ < text_.size() && text_[pos_] != '\n')
            ++pos_;
        if (pos_ < text_.size()) {
            ++pos_;
            ++line_;
        }
        throw IngestError(msg, recordLine);
    }

    std::string_view text_;
    std::size_t pos_ = 0;
    std::size_t line_ = 1;
};

// Plain line scanner for TSV and JSONL.
class LineScanner {
public:
    explicit LineScanner(std::string_view text) : text_(text) {}

    bool next(std::string_view& lineOut, std::size_t& lineNoOut) {
        while (pos_ < text_.size()) {
            std::size_t eol = text_.find('\n', pos_);
            if (eol == std::string_view::npos)
                eol = text_.size();
            std::string_view line = text_.substr(pos_, eol - pos_);
            if (line.ends_with('\r'))
                line.remove_suffix(1);
            pos_ = eol + 1;
            ++lineNo_;
            if (line.empty())
                continue; // tolerate blank lines between records
            lineOut = line;
            lineNoOut = lineNo_;
            return true;
        }
        return false;
    }

private:
    std::string_view text_;
    std::size_t pos_ = 0;
    std::size_t lineNo_ = 0;
};

// Shared per-run state: header mapping, row-key bookkeeping, policy handling.
class RecordBuilder {
public:
    RecordBuilder(const IngestConfig& cfg, ParseResult& result)
        : cfg_(cfg), result_(result) {}

    void setHeader(std::vector<std::string> fields, std::size_t line) {
        std::unordered_set<std::string> seen;
        for (const std::string& f : fields) {
            if (!seen.insert(f).second)
                throw IngestError("duplicate field name '" + f + "' in header", line);
        }
        if (!cfg_.idField.empty() &&
            std::find(fields.begin(), fields.end(), cfg_.idField) == fields.end())
            throw IngestError("id field '" + cfg_.idField + "' not present in header", line);
        header_ = std::move(fields);
        for (const std::string& f : header_)
            checkEntityName(f, line);
    }

    const std::vector<std::string>& header() const { return header_; }

    // Assembles a record from (field name, raw value) pairs in input order.
    // Throws IngestError on malformed content; the caller applies the policy.
    Record makeRecord(const std::vector<std::pair<std::string_view, std::vector<std::string>>>& fields,
                      std::size_t line) {
        Record rec;
        for (const auto& [name, rawValues] : fields) {
            std::string fieldName(name);
            if (fieldName == cfg_.idField) {
                if (rawValues.size() != 1 || rawValues[0].empty())
                    throw IngestError("id field '" + fieldName + "' must hold a single non-empty value", line);
                rec.rowKey = rawValues[0];
                continue;
            }
            const std::string& entity = cfg_.entityFor(fieldName);
            std::vector<std::string> values;
            for (const std::string& raw : rawValues) {
                if (cfg_.tokenizedFields.count(fieldName)) {
                    for (auto& tok : splitWhitespace(raw))
                        values.push_back(std::move(tok));
                } else if (!cfg_.multiValueDelimiter.empty()) {
                    for (auto& part : splitDelimiter(raw, cfg_.multiValueDelimiter))
                        values.push_back(std::move(part));
                } else {
                    values.push_back(raw);
                }
            }
            auto* existing = rec.find(entity);
            if (existing)
                existing->insert(existing->end(), values.begin(), values.end());
            else
                rec.values.emplace_back(entity, std::move(values));
        }
        if (cfg_.idField.empty()) {
            char ordinal[16];
            std::snprintf(ordinal, sizeof(ordinal), "%010zu", result_.records.size() + 1);
            rec.rowKey = cfg_.rowKeyPrefix + ordinal;
        }
        if (!rowKeys_.insert(rec.rowKey).second)
            throw IngestError("duplicate row key '" + rec.rowKey + "'", line);
        return rec;
    }

    void checkEntityName(const std::string& field, std::size_t line) const {
        if (field == cfg_.idField)
            return;
        const std::string& entity = cfg_.entityFor(field);
        if (entity.empty())
            throw IngestError("field maps to an empty entity name", line);
        if (entity.find(cfg_.keySeparator) != std::string::npos)
            throw IngestError("entity name '" + entity + "' contains the key separator '" +
                                  cfg_.keySeparator + "'",
                              line);
    }

    // Returns true when parsing should continue (Skip policy), rethrows
    // otherwise.
    bool handle(const IngestError& err) {
        if (cfg_.onError == ErrorPolicy::Abort)
            throw err;
        ++result_.skipped;
        result_.warnings.push_back(err.what());
        return true;
    }

private:
    const IngestConfig& cfg_;
    ParseResult& result_;
    std::vector<std::string> header_;
    std::unordered_set<std::string> rowKeys_;
};

ParseResult parseDelimited(std::string_view text, const IngestConfig& cfg) {
    ParseResult result;
    RecordBuilder builder(cfg, result);

    auto nextRaw = [&](auto& scanner, RawRecord& raw) {
        while (true) {
            try {
                return scanner.next(raw);
            } catch (const IngestError& err) {
                builder.handle(err);
            }
        }
    };

    auto run = [&](auto& scanner) {
        RawRecord raw;
        if (!nextRaw(scanner, raw))
            return; // empty stream: no header, no records
        builder.setHeader(std::move(raw.fields), raw.line);
        while (nextRaw(scanner, raw)) {
            if (raw.fields.size() == 1 && raw.fields[0].empty())
                continue; // blank trailing line
            try {
                if (raw.fields.size() != builder.header().size())
                    throw IngestError("expected " + std::to_string(builder.header().size()) +
                                          " fields, got " + std::to_string(raw.fields.size()),
                                      raw.line);
                std::vector<std::pair<std::string_view, std::vector<std::string>>> fields;
                fields.reserve(raw.fields.size());
                for (std::size_t i = 0; i < raw.fields.size(); ++i)
                    fields.emplace_back(builder.header()[i],
                                        std::vector<std::string>{std::move(raw.fields[i])});
                result.records.push_back(builder.makeRecord(fields, raw.line));
            } catch (const IngestError& err) {
                builder.handle(err);
            }
        }
    };

    if (cfg.format == InputFormat::Csv) {
        CsvScanner scanner(text);
        run(scanner);
    } else {
        // TSV: split lines on tabs, no quoting.
        struct TsvScanner {
            LineScanner lines;
            explicit TsvScanner(std::string_view t) : lines(t) {}
            bool next(RawRecord& out) {
                std::string_view line;
                std::size_t lineNo = 0;
                if (!lines.next(line, lineNo))
                    return false;
                out.fields.clear();
                out.line = lineNo;
                std::size_t start = 0;
                while (true) {
                    std::size_t tab = line.find('\t', start);
                    if (tab == std::string_view::npos) {
                        out.fields.emplace_back(line.substr(start));
                        break;
                    }
                    out.fields.emplace_back(line.substr(start, tab - start));
                    start = tab + 1;
                }
                return true;
            }
        } scanner(text);
        run(scanner);
    }
    return result;
}

ParseResult parseJsonl(std::string_view text, const IngestConfig& cfg) {
    using json = nlohmann::ordered_json;
    ParseResult result;
    RecordBuilder builder(cfg, result);
    LineScanner lines(text);
    std::string_view line;
    std::size_t lineNo = 0;
    while (lines.next(line, lineNo)) {
        try {
            json obj = json::parse(line, nullptr, false);
            if (obj.is_discarded())
                throw IngestError("invalid JSON", lineNo);
            if (!obj.is_object())
                throw IngestError("expected a JSON object", lineNo);
            std::vector<std::pair<std::string_view, std::vector<std::string>>> fields;
            for (auto& [key, value] : obj.items()) {
                std::vector<std::string> rawValues;
                if (value.is_string()) {
                    rawValues.push_back(value.get<std::string>());
                } else if (value.is_array()) {
                    for (const auto& elem : value) {
                        if (!elem.is_string())
                            throw IngestError("field '" + key + "' has a non-string array element",
                                              lineNo);
                        rawValues.push_back(elem.get<std::string>());
                    }
                } else if (value.is_null()) {
                    continue; // treated as an absent field
                } else {
                    throw IngestError("field '" + key + "' must be a string or array of strings",
                                      lineNo);
                }
                builder.checkEntityName(key, lineNo);
                fields.emplace_back(key, std::move(rawValues));
            }
            if (!cfg.idField.empty()) {
                bool found = false;
                for (const auto& [name, vals] : fields)
                    found = found || name == cfg.idField;
                if (!found)
                    throw IngestError("id field '" + cfg.idField + "' missing from object", lineNo);
            }
            result.records.push_back(builder.makeRecord(fields, lineNo));
        } catch (const IngestError& err) {
            builder.handle(err);
        }
    }
    return result;
}

} // namespace

void IngestConfig::validate() const {
    if (keySeparator.empty())
        throw std::invalid_argument("keySeparator must be non-empty");
    if (!idField.empty() && tokenizedFields.count(idField))
        throw std::invalid_argument("id field '" + idField + "' cannot also be tokenized");
    for (const auto& [field, entity] : entityRenames) {
        if (entity.empty())
            throw std::invalid_argument("rename of field '" + field + "' maps to an empty entity name");
        if (entity.find(keySeparator) != std::string::npos)
            throw std::invalid_argument("entity name '" + entity + "' contains the key separator '" +
                                        keySeparator + "'");
    }
}

const std::string& IngestConfig::entityFor(const std::string& field) const {
    auto it = entityRenames.find(field);
    return it == entityRenames.end() ? field : it->second;
}

std::vector<std::string>* Record::find(std::string_view entity) {
    for (auto& [name, vals] : values)
        if (name == entity)
            return &vals;
    return nullptr;
}

const std::vector<std::string>* Record::find(std::string_view entity) const {
    for (const auto& [name, vals] : values)
        if (name == entity)
            return &vals;
    return nullptr;
}

EntityRegistry::EntityRegistry(std::string separator) : separator_(std::move(separator)) {
    if (separator_.empty())
        throw std::invalid_argument("EntityRegistry: separator must be non-empty");
}

void EntityRegistry::add(const std::string& entity) {
    if (contains(entity))
        return;
    if (entity.empty())
        throw std::invalid_argument("EntityRegistry: empty entity name");
    if (entity.find(separator_) != std::string::npos)
        throw std::invalid_argument("EntityRegistry: entity name '" + entity +
                                    "' contains the separator '" + separator_ + "'");
    // Column prefixes must not be prefixes of each other, or prefix selection
    // would mix entities. Single-character separators cannot collide, but a
    // multi-character separator can (entities "x" and "x|" under "||").
    std::string prefix = entity + separator_;
    for (const std::string& other : entities_) {
        std::string otherPrefix = other + separator_;
        if (prefix.starts_with(otherPrefix) || otherPrefix.starts_with(prefix))
            throw std::invalid_argument("EntityRegistry: prefix of '" + entity +
                                        "' collides with entity '" + other + "'");
    }
    entities_.push_back(entity);
}

bool EntityRegistry::contains(std::string_view entity) const {
    return std::find(entities_.begin(), entities_.end(), entity) != entities_.end();
}

std::string EntityRegistry::prefixOf(std::string_view entity) const {
    if (!contains(entity))
        throw std::invalid_argument("EntityRegistry: unknown entity '" + std::string(entity) + "'");
    return std::string(entity) + separator_;
}

ParseResult parseRecords(std::istream& in, const IngestConfig& config) {
    config.validate();
    std::string text = readAll(in);
    if (config.format == InputFormat::Jsonl)
        return parseJsonl(text, config);
    return parseDelimited(text, config);
}

std::string escapeSeparator(std::string_view value, std::string_view separator) {
    if (separator.empty())
        return std::string(value);
    std::string out;
    out.reserve(value.size());
    std::size_t start = 0;
    while (true) {
        std::size_t pos = value.find(separator, start);
        if (pos == std::string_view::npos) {
            out += value.substr(start);
            return out;
        }
        out += value.substr(start, pos - start);
        out += '\\';
        out += separator;
        start = pos + separator.size();
    }
}

std::string unescapeSeparator(std::string_view value, std::string_view separator) {
    if (separator.empty())
        return std::string(value);
    std::string needle = "\\" + std::string(separator);
    std::string out;
    out.reserve(value.size());
    std::size_t start = 0;
    while (true) {
        std::size_t pos = value.find(needle, start);
        if (pos == std::string_view::npos) {
            out += value.substr(start);
            return out;
        }
        out += value.substr(start, pos - start);
        out += separator;
        start = pos + needle.size();
    }
}

std::vector<Triple> explode(const Record& record, EntityRegistry& registry,
                            const IngestConfig& config) {
    if (record.rowKey.empty())
        throw std::invalid_argument("explode: record has an empty row key");
    std::vector<Triple> out;
    std::unordered_set<std::string> seen;
    for (const auto& [entity, rawValues] : record.values) {
        registry.add(entity);
        seen.clear();
        for (const std::string& value : rawValues) {
            if (value.empty())
                continue;
            if (!seen.insert(value).second)
                continue; // presence semantics: one triple per distinct value
            out.push_back({record.rowKey,
                           entity + config.keySeparator + escapeSeparator(value, config.keySeparator),
                           1.0});
        }
    }
    return out;
}

Store buildStore(const std::vector<Record>& records, const IngestConfig& config) {
    config.validate();
    EntityRegistry registry(config.keySeparator);
    std::vector<Triple> triples;
    for (const Record& rec : records) {
        auto exploded = explode(rec, registry, config);
        triples.insert(triples.end(), std::make_move_iterator(exploded.begin()),
                       std::make_move_iterator(exploded.end()));
    }
    return {AssociativeArray::fromTriples(std::move(triples)), std::move(registry)};
}

} // namespace dda
