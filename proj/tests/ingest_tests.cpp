#include <doctest.h>

#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "dda/ingest.hpp"
#include "oracles.hpp"

using dda::buildStore;
using dda::EntityRegistry;
using dda::ErrorPolicy;
using dda::explode;
using dda::IngestConfig;
using dda::IngestError;
using dda::InputFormat;
using dda::parseRecords;
using dda::parseTriples;
using dda::Record;
using dda::serializeTriples;

namespace {

dda::ParseResult parse(const std::string& text, const IngestConfig& cfg = {}) {
    std::istringstream in(text);
    return parseRecords(in, cfg);
}

} // namespace

TEST_CASE("empty stream yields no records") {
    auto result = parse("");
    CHECK(result.records.empty());
    CHECK(result.skipped == 0);
}

TEST_CASE("one csv line maps fields to entities") {
    auto result = parse("user,city\nalice,Boston\n");
    REQUIRE(result.records.size() == 1);
    const Record& rec = result.records[0];
    CHECK(rec.rowKey == "row|0000000001");
    REQUIRE(rec.values.size() == 2);
    CHECK(rec.values[0].first == "user");
    CHECK(rec.values[0].second == std::vector<std::string>{"alice"});
    CHECK(rec.values[1].first == "city");
    CHECK(rec.values[1].second == std::vector<std::string>{"Boston"});
}

TEST_CASE("row ordinals are zero-padded so order is lexicographic") {
    std::string text = "x\n";
    for (int i = 0; i < 12; ++i)
        text += "v\n";
    auto result = parse(text);
    REQUIRE(result.records.size() == 12);
    CHECK(result.records[0].rowKey == "row|0000000001");
    CHECK(result.records[9].rowKey == "row|0000000010");
    CHECK(result.records[11].rowKey == "row|0000000012");
    for (std::size_t i = 1; i < result.records.size(); ++i)
        CHECK(result.records[i - 1].rowKey < result.records[i].rowKey);
}

TEST_CASE("csv quoting covers commas, quotes and embedded newlines") {
    auto result = parse("name,note\n\"Doe, Jane\",\"said \"\"hi\"\"\"\nplain,\"a\nb\"\n");
    REQUIRE(result.records.size() == 2);
    CHECK(result.records[0].values[0].second[0] == "Doe, Jane");
    CHECK(result.records[0].values[1].second[0] == "said \"hi\"");
    CHECK(result.records[1].values[1].second[0] == "a\nb");
}

TEST_CASE("csv accepts CRLF line endings and a UTF-8 BOM") {
    auto result = parse("\xEF\xBB\xBFuser,city\r\nalice,Boston\r\n");
    REQUIRE(result.records.size() == 1);
    CHECK(result.records[0].values[0].first == "user");
    CHECK(result.records[0].values[0].second[0] == "alice");
    CHECK(result.records[0].values[1].second[0] == "Boston");
}

TEST_CASE("malformed csv aborts with the line number by default") {
    CHECK_THROWS_WITH_AS(parse("a,b\nx,y\nbad\"quote,z\n"), doctest::Contains("line 3"),
                         IngestError);
    CHECK_THROWS_WITH_AS(parse("a,b\n\"open,y\n"), doctest::Contains("unterminated"), IngestError);
    CHECK_THROWS_WITH_AS(parse("a,b\n\"x\"tail,y\n"), doctest::Contains("closing quote"),
                         IngestError);
    CHECK_THROWS_WITH_AS(parse("a,b\nx,y,z\n"), doctest::Contains("got 3"), IngestError);
}

TEST_CASE("skip policy drops bad records and keeps diagnostics") {
    IngestConfig cfg;
    cfg.onError = ErrorPolicy::Skip;
    auto result = parse("a,b\nx,y\nbad\"quote,z\np,q\nshort\n", cfg);
    REQUIRE(result.records.size() == 2);
    CHECK(result.records[0].values[0].second[0] == "x");
    CHECK(result.records[1].values[0].second[0] == "p");
    CHECK(result.skipped == 2);
    REQUIRE(result.warnings.size() == 2);
    CHECK(result.warnings[0].find("line 3") != std::string::npos);
    CHECK(result.warnings[1].find("line 5") != std::string::npos);
}

TEST_CASE("duplicate header names are rejected") {
    CHECK_THROWS_WITH_AS(parse("user,user\nx,y\n"), doctest::Contains("duplicate field"),
                         IngestError);
}

TEST_CASE("id field becomes the row key") {
    IngestConfig cfg;
    cfg.idField = "id";
    auto result = parse("id,city\nu7,Boston\nu9,Salem\n", cfg);
    REQUIRE(result.records.size() == 2);
    CHECK(result.records[0].rowKey == "u7");
    CHECK(result.records[1].rowKey == "u9");
    // The id column does not become an entity.
    REQUIRE(result.records[0].values.size() == 1);
    CHECK(result.records[0].values[0].first == "city");
}

TEST_CASE("id field errors: missing column, duplicate key, blank value") {
    IngestConfig cfg;
    cfg.idField = "id";
    CHECK_THROWS_WITH_AS(parse("user,city\nx,y\n", cfg), doctest::Contains("not present"),
                         IngestError);
    CHECK_THROWS_WITH_AS(parse("id,city\nu7,Boston\nu7,Salem\n", cfg), doctest::Contains("u7"),
                         IngestError);
    CHECK_THROWS_AS(parse("id,city\n,Boston\n", cfg), IngestError);
}

TEST_CASE("tsv splits on tabs with no quote handling") {
    IngestConfig cfg;
    cfg.format = InputFormat::Tsv;
    auto result = parse("user\tnote\nalice\t\"raw quotes\"\n", cfg);
    REQUIRE(result.records.size() == 1);
    CHECK(result.records[0].values[1].second[0] == "\"raw quotes\"");
    CHECK_THROWS_WITH_AS(parse("a\tb\nonly_one\n", cfg), doctest::Contains("got 1"), IngestError);
}

TEST_CASE("jsonl objects parse strings, arrays and nulls") {
    IngestConfig cfg;
    cfg.format = InputFormat::Jsonl;
    auto result = parse(R"({"user":"alice","tags":["x","y"],"gone":null})"
                        "\n"
                        R"({"user":"bob"})"
                        "\n",
                        cfg);
    REQUIRE(result.records.size() == 2);
    const Record& rec = result.records[0];
    REQUIRE(rec.values.size() == 2); // null field absent entirely
    CHECK(rec.values[0].first == "user");
    CHECK(rec.values[1].first == "tags");
    CHECK(rec.values[1].second == std::vector<std::string>{"x", "y"});
    CHECK(result.records[1].values.size() == 1);
}

TEST_CASE("jsonl rejects non-objects, bad json and non-string values") {
    IngestConfig cfg;
    cfg.format = InputFormat::Jsonl;
    CHECK_THROWS_WITH_AS(parse("[1,2]\n", cfg), doctest::Contains("object"), IngestError);
    CHECK_THROWS_WITH_AS(parse("{not json\n", cfg), doctest::Contains("line 1"), IngestError);
    CHECK_THROWS_WITH_AS(parse(R"({"n":7})"
                               "\n",
                               cfg),
                         doctest::Contains("string"), IngestError);
    CHECK_THROWS_WITH_AS(parse(R"({"a":["x",3]})"
                               "\n",
                               cfg),
                         doctest::Contains("array"), IngestError);
}

TEST_CASE("jsonl id field must be present in every object") {
    IngestConfig cfg;
    cfg.format = InputFormat::Jsonl;
    cfg.idField = "id";
    auto ok = parse(R"({"id":"k1","v":"x"})"
                    "\n",
                    cfg);
    CHECK(ok.records[0].rowKey == "k1");
    CHECK_THROWS_WITH_AS(parse(R"({"v":"x"})"
                               "\n",
                               cfg),
                         doctest::Contains("missing"), IngestError);
}

TEST_CASE("tokenized fields split on whitespace like the reference splitter") {
    IngestConfig cfg;
    cfg.format = InputFormat::Jsonl;
    cfg.tokenizedFields = {"text"};
    cfg.entityRenames = {{"text", "word"}};
    auto result = parse(R"({"text":"hello hello world"})"
                        "\n",
                        cfg);
    REQUIRE(result.records.size() == 1);
    const auto* words = result.records[0].find("word");
    REQUIRE(words != nullptr);
    CHECK(*words == std::vector<std::string>{"hello", "hello", "world"});

    // Reference splitter: any run of whitespace separates tokens.
    std::string raw = "  a\tb\n c  ";
    std::vector<std::string> expected;
    std::istringstream tokens(raw);
    std::string tok;
    while (tokens >> tok)
        expected.push_back(tok);
    auto split = parse("text\n\"" + raw + "\"\n",
                       [] {
                           IngestConfig c;
                           c.tokenizedFields = {"text"};
                           return c;
                       }());
    REQUIRE(split.records.size() == 1);
    CHECK(split.records[0].values[0].second == expected);
}

TEST_CASE("multi-value delimiter splits untokenized fields") {
    IngestConfig cfg;
    cfg.multiValueDelimiter = ";";
    auto result = parse("tags\na;b;;c\n", cfg);
    REQUIRE(result.records.size() == 1);
    CHECK(result.records[0].values[0].second == std::vector<std::string>{"a", "b", "", "c"});
    // Blank parts survive parsing and are dropped at explode time.
}

TEST_CASE("config validation catches inconsistent settings") {
    IngestConfig cfg;
    cfg.keySeparator = "";
    CHECK_THROWS_AS(cfg.validate(), std::invalid_argument);
    cfg = {};
    cfg.idField = "text";
    cfg.tokenizedFields = {"text"};
    CHECK_THROWS_AS(cfg.validate(), std::invalid_argument);
    cfg = {};
    cfg.entityRenames = {{"f", ""}};
    CHECK_THROWS_AS(cfg.validate(), std::invalid_argument);
    cfg = {};
    cfg.entityRenames = {{"f", "has|sep"}};
    CHECK_THROWS_AS(cfg.validate(), std::invalid_argument);
}

TEST_CASE("header field names may not contain the separator") {
    CHECK_THROWS_WITH_AS(parse("user|name\nx\n"), doctest::Contains("separator"), IngestError);
    // A rename can repair such a field.
    IngestConfig cfg;
    cfg.entityRenames = {{"user|name", "user"}};
    auto result = parse("user|name\nx\n", cfg);
    CHECK(result.records[0].values[0].first == "user");
}

TEST_CASE("explode emits presence triples with the entity prefix") {
    EntityRegistry registry;
    IngestConfig cfg;
    Record rec{"t1", {{"user", {"SFBayRoadAlerts"}}}};
    auto triples = explode(rec, registry, cfg);
    REQUIRE(triples.size() == 1);
    CHECK(triples[0] == dda::Triple{"t1", "user|SFBayRoadAlerts", 1});
    CHECK(registry.entities() == std::vector<std::string>{"user"});
}

TEST_CASE("explode with no values emits nothing") {
    EntityRegistry registry;
    IngestConfig cfg;
    Record rec{"t1", {}};
    CHECK(explode(rec, registry, cfg).empty());
    Record blankOnly{"t2", {{"user", {"", ""}}}};
    CHECK(explode(blankOnly, registry, cfg).empty());
    // The entity is still registered; analysis later reports it as skipped.
    CHECK(registry.contains("user"));
}

TEST_CASE("explode dedups values within one record") {
    EntityRegistry registry;
    IngestConfig cfg;
    Record rec{"t1", {{"word", {"hello", "hello", "world"}}}};
    auto triples = explode(rec, registry, cfg);
    REQUIRE(triples.size() == 2);
    CHECK(triples[0] == dda::Triple{"t1", "word|hello", 1});
    CHECK(triples[1] == dda::Triple{"t1", "word|world", 1});
}

TEST_CASE("explode is deterministic and keeps presence values at 1") {
    EntityRegistry registry;
    IngestConfig cfg;
    Record rec{"t1", {{"user", {"a", "b", "a"}}, {"time", {"08:00"}}}};
    auto first = explode(rec, registry, cfg);
    auto second = explode(rec, registry, cfg);
    CHECK(first == second);
    std::set<std::pair<std::string, std::string>> coords;
    for (const auto& t : first) {
        CHECK(t.val == 1);
        CHECK(coords.insert({t.row, t.col}).second); // no duplicate coordinates
    }
}

TEST_CASE("separator occurrences in values are escaped") {
    EntityRegistry registry;
    IngestConfig cfg;
    Record rec{"t1", {{"city", {"bo|ston"}}}};
    auto triples = explode(rec, registry, cfg);
    REQUIRE(triples.size() == 1);
    CHECK(triples[0].col == "city|bo\\|ston");
    CHECK(dda::unescapeSeparator("bo\\|ston", "|") == "bo|ston");
}

TEST_CASE("escapeSeparator round trips and keeps distinct values distinct") {
    for (const std::string& value :
         {std::string("plain"), std::string("a|b"), std::string("a\\|b"), std::string("||"),
          std::string("\\"), std::string("ends|")}) {
        auto escaped = dda::escapeSeparator(value, "|");
        CHECK(dda::unescapeSeparator(escaped, "|") == value);
    }
    CHECK(dda::escapeSeparator("a|b", "|") != dda::escapeSeparator("a\\|b", "|"));
}

TEST_CASE("buildStore with no records is empty") {
    auto store = buildStore({}, {});
    CHECK(store.array.empty());
    CHECK(store.registry.entities().empty());
}

TEST_CASE("buildStore counts match the hash-set oracle") {
    auto result = parse("user,time\nalice,08:00\nbob,08:00\nalice,09:00\n");
    auto store = buildStore(result.records, {});
    auto counts = oracle::countEntities(result.records, "|");
    std::size_t totalPairs = 0;
    for (const auto& [entity, c] : counts)
        totalPairs += c.pairs.size();
    CHECK(store.array.nnz() == totalPairs);
    CHECK(store.registry.entities() == std::vector<std::string>{"user", "time"});
    CHECK(selectByColPrefix(store.array, "user|").numCols() == counts["user"].cols.size());
    CHECK(selectByColPrefix(store.array, "time|").numCols() == counts["time"].cols.size());
}

TEST_CASE("prefix selections of a many-entity store reassemble it") {
    std::mt19937 rng(57);
    std::string csv;
    for (int e = 0; e < 10; ++e)
        csv += (e ? "," : "") + ("f" + std::to_string(e));
    csv += "\n";
    for (int row = 0; row < 60; ++row) {
        for (int e = 0; e < 10; ++e) {
            if (e)
                csv += ',';
            if (rng() % 4 != 0)
                csv += "v" + std::to_string(rng() % 5);
        }
        csv += "\n";
    }
    auto result = parse(csv);
    auto store = buildStore(result.records, {});
    dda::AssociativeArray rebuilt;
    std::size_t nnzSum = 0;
    for (const auto& entity : store.registry.entities()) {
        auto sub = selectByColPrefix(store.array, store.registry.prefixOf(entity));
        nnzSum += sub.nnz();
        rebuilt = add(rebuilt, sub);
    }
    CHECK(rebuilt == store.array);
    CHECK(nnzSum == store.array.nnz()); // column disjointness across entities
}

TEST_CASE("store round trips through the triple format bit-exactly") {
    auto result = parse("user,city\nalice,Boston\nbob,\"New York\"\nalice,Cambridge\n");
    auto store = buildStore(result.records, {});
    auto text = serializeTriples(store.array);
    CHECK(dda::AssociativeArray::fromTriples(parseTriples(text).entries()) == store.array);
    CHECK(serializeTriples(parseTriples(text)) == text);
}

TEST_CASE("registry validates names and keeps first-seen order") {
    EntityRegistry registry;
    registry.add("user");
    registry.add("time");
    registry.add("user"); // idempotent
    CHECK(registry.entities() == std::vector<std::string>{"user", "time"});
    CHECK(registry.contains("time"));
    CHECK_FALSE(registry.contains("word"));
    CHECK(registry.prefixOf("user") == "user|");
    CHECK_THROWS_AS(registry.prefixOf("word"), std::invalid_argument);
    CHECK_THROWS_AS(registry.add(""), std::invalid_argument);
    CHECK_THROWS_AS(registry.add("has|sep"), std::invalid_argument);
}

TEST_CASE("registry rejects colliding prefixes under multi-character separators") {
    EntityRegistry registry("||");
    registry.add("x");
    CHECK_THROWS_WITH_AS(registry.add("x|"), doctest::Contains("collides"),
                         std::invalid_argument);
    registry.add("y");
    CHECK(registry.prefixOf("y") == "y||");
}

TEST_CASE("custom separator flows through explode and selection") {
    IngestConfig cfg;
    cfg.keySeparator = "::";
    cfg.rowKeyPrefix = "row::";
    auto result = parse("user,city\nalice,a::b\n", cfg);
    auto store = buildStore(result.records, cfg);
    CHECK(store.registry.separator() == "::");
    auto cities = selectByColPrefix(store.array, store.registry.prefixOf("city"));
    REQUIRE(cities.nnz() == 1);
    CHECK(cities.entries()[0].col == "city::a\\::b");
    CHECK(dda::unescapeSeparator("a\\::b", "::") == "a::b");
}
