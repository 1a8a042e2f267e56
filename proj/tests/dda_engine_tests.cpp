#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "dda/dda_engine.hpp"
#include "oracles.hpp"
#include "reference_profiles.hpp"

using dda::analyze;
using dda::AssociativeArray;
using dda::buildStore;
using dda::parseRecords;
using dda::classify;
using dda::ClassifierConfig;
using dda::computeEntityStats;
using dda::EntityRegistry;
using dda::EntityStats;
using dda::GlobalSums;
using dda::StructureClass;
using dda::validateGlobalSums;

namespace {

dda::Store storeFromCsv(const std::string& csv, const dda::IngestConfig& cfg = {}) {
    std::istringstream in(csv);
    auto parsed = parseRecords(in, cfg);
    return buildStore(parsed.records, cfg);
}

} // namespace

TEST_CASE("empty store skips every registered entity") {
    EntityRegistry registry;
    registry.add("user");
    registry.add("time");
    auto scan = computeEntityStats(AssociativeArray{}, registry);
    CHECK(scan.stats.empty());
    CHECK(scan.skipped == std::vector<std::string>{"user", "time"});
}

TEST_CASE("entity stats match the hash-set oracle on a random corpus") {
    std::mt19937 rng(71);
    std::string csv = "user,host,tag\n";
    for (int row = 0; row < 1000; ++row) {
        csv += (rng() % 10 != 0 ? "u" + std::to_string(rng() % 300) : "");
        csv += ",";
        csv += (rng() % 5 != 0 ? "h" + std::to_string(rng() % 12) : "");
        csv += ",";
        csv += (rng() % 3 != 0 ? "t" + std::to_string(rng() % 40) : "");
        csv += "\n";
    }
    std::istringstream in(csv);
    auto parsed = parseRecords(in, {});
    auto store = buildStore(parsed.records, {});
    auto counts = oracle::countEntities(parsed.records, "|");
    auto scan = computeEntityStats(store.array, store.registry);
    REQUIRE(scan.stats.size() == counts.size());
    for (const EntityStats& s : scan.stats) {
        const auto& c = counts.at(s.entity);
        CHECK(s.rows == c.rows.size());
        CHECK(s.uniqueValues == c.cols.size());
        CHECK(s.entries == c.pairs.size());
        CHECK(s.rows <= s.entries);
        CHECK(s.uniqueValues <= s.entries);
    }
}

TEST_CASE("repeated values across rows shrink the unique count only") {
    std::string csv = "time\n";
    for (int row = 0; row < 100; ++row)
        csv += "slot" + std::to_string(row % 5) + "\n";
    auto store = storeFromCsv(csv);
    auto scan = computeEntityStats(store.array, store.registry);
    REQUIRE(scan.stats.size() == 1);
    CHECK(scan.stats[0].rows == 100);
    CHECK(scan.stats[0].uniqueValues == 5);
    CHECK(scan.stats[0].entries == 100);
}

TEST_CASE("single-entity global sums are equalities") {
    auto store = storeFromCsv("user\na\nb\na\n");
    auto scan = computeEntityStats(store.array, store.registry);
    auto sums = validateGlobalSums(store.array, scan.stats);
    CHECK(sums.storeRows == sums.sumRows);
    CHECK(sums.storeCols == sums.sumUnique);
    CHECK(sums.storeEntries == sums.sumEntries);
    CHECK(sums.allOk());
    CHECK(sums.failures().empty());
}

TEST_CASE("missing fields make the row sum strictly larger than the store") {
    auto store = storeFromCsv("user,city\nalice,Boston\nbob,\n,Salem\ncarol,Lynn\n");
    auto scan = computeEntityStats(store.array, store.registry);
    auto sums = validateGlobalSums(store.array, scan.stats);
    CHECK(sums.storeRows == 4);
    CHECK(sums.sumRows == 6); // alice and carol span both entities
    CHECK(sums.storeRows < sums.sumRows);
    CHECK(sums.allOk());
}

TEST_CASE("an unregistered column prefix fails the column and entry sums") {
    auto store = storeFromCsv("user\na\nb\n");
    auto tampered = add(store.array,
                        AssociativeArray::fromTriples({{"row|0000000001", "ghost|x", 1}}));
    auto scan = computeEntityStats(tampered, store.registry);
    auto sums = validateGlobalSums(tampered, scan.stats);
    CHECK_FALSE(sums.colsOk());
    CHECK_FALSE(sums.entriesOk());
    CHECK_FALSE(sums.allOk());
    auto failures = sums.failures();
    REQUIRE(failures.size() == 2);
    CHECK(failures[0].find("columns") != std::string::npos);
    CHECK(failures[1].find("entries") != std::string::npos);
    // Both sides of the relation are reported.
    CHECK(failures[0].find("3") != std::string::npos);
    CHECK(failures[0].find("2") != std::string::npos);
}

TEST_CASE("classifier reproduces every reference profile") {
    for (const auto& p : refprofiles::all())
        CHECK(classify(refprofiles::stats(p)) == p.expected);
}

TEST_CASE("classifier spot checks from the reference set") {
    CHECK(classify({"latlon", 1624984, 1506465, 1625197}) == StructureClass::Identity);
    CHECK(classify({"word", 1976746, 7838862, 17180314}) == StructureClass::Authoritative);
    CHECK(classify({"time", 2020000, 35176, 2020000}) == StructureClass::Organizational);
    CHECK(classify({"Account", 11446187, 1, 11446187}) == StructureClass::Vestigial);
    CHECK(classify({"Job Number", 11446187, 485212, 11446187}) == StructureClass::Identity);
    CHECK(classify({"minimal", 1, 1, 1}) == StructureClass::Vestigial);
}

TEST_CASE("classifier precedence and threshold ties") {
    // Vestigial wins even when the row/value ratio is organizational.
    CHECK(classify({"e", 1000, 1, 1000}) == StructureClass::Vestigial);
    // Ties at a threshold fall into the special class.
    CHECK(classify({"e", 10, 20, 20}) == StructureClass::Authoritative);  // M/N == 2.0
    CHECK(classify({"e", 100, 2, 100}) == StructureClass::Organizational); // N/M == 50.0
    // Just inside the identity band on both sides.
    CHECK(classify({"e", 10, 19, 19}) == StructureClass::Identity);  // M/N = 1.9
    CHECK(classify({"e", 99, 2, 99}) == StructureClass::Identity);   // N/M = 49.5
    // Custom thresholds move the boundaries.
    ClassifierConfig loose{1.5, 10.0, 2};
    CHECK(classify({"e", 10, 2, 10}, loose) == StructureClass::Vestigial);
    CHECK(classify({"e", 10, 15, 15}, loose) == StructureClass::Authoritative);
    CHECK(classify({"e", 100, 10, 100}, loose) == StructureClass::Organizational);
}

TEST_CASE("classification is invariant under common scaling at fixed ratios") {
    std::mt19937 rng(73);
    ClassifierConfig cfg;
    for (int i = 0; i < 200; ++i) {
        dda::Count n = 1 + rng() % 1000;
        dda::Count m = 2 + rng() % 1000; // above the vestigial cutoff
        dda::Count v = std::max(n, m) + rng() % 1000;
        auto base = classify({"e", n, m, v}, cfg);
        for (dda::Count f : {2, 10, 100}) {
            CHECK(classify({"e", n * f, m * f, v * f}, cfg) == base);
        }
    }
}

TEST_CASE("classifier rejects invalid input and config") {
    CHECK_THROWS_AS(classify({"e", 0, 1, 1}), std::invalid_argument);
    CHECK_THROWS_AS(classify({"e", 1, 1, 1}, ClassifierConfig{1.0, 50.0, 1}),
                    std::invalid_argument);
    CHECK_THROWS_AS(classify({"e", 1, 1, 1}, ClassifierConfig{2.0, 0.5, 1}),
                    std::invalid_argument);
    CHECK_THROWS_AS(classify({"e", 1, 1, 1}, ClassifierConfig{2.0, 50.0, 0}),
                    std::invalid_argument);
}

TEST_CASE("structure names round trip and accept both spellings") {
    using SC = StructureClass;
    for (SC c : {SC::Identity, SC::Authoritative, SC::Organizational, SC::Vestigial})
        CHECK(dda::structureFromName(dda::structureName(c)) == c);
    CHECK(dda::structureFromName("Authoritative") == SC::Authoritative);
    CHECK(dda::structureFromName("Organizational") == SC::Organizational);
    CHECK_FALSE(dda::structureFromName("garbage").has_value());
}

TEST_CASE("analyze composes stats, classes, sums and skips") {
    auto store = storeFromCsv("user,city\nalice,Boston\nbob,\nalice,Salem\n");
    store.registry.add("phantom");
    auto report = analyze(store.array, store.registry);
    REQUIRE(report.entities.size() == 2);
    CHECK(report.entities[0].stats.entity == "user");
    CHECK(report.entities[1].stats.entity == "city");
    CHECK(report.skipped == std::vector<std::string>{"phantom"});
    CHECK(report.sums.allOk());
    CHECK(report.ddaSeconds >= 0.0);

    auto scan = computeEntityStats(store.array, store.registry);
    for (std::size_t i = 0; i < scan.stats.size(); ++i) {
        CHECK(report.entities[i].stats == scan.stats[i]);
        CHECK(report.entities[i].structure == classify(scan.stats[i]));
    }
}

TEST_CASE("analyze of an empty store passes trivially") {
    auto report = analyze(AssociativeArray{}, EntityRegistry{});
    CHECK(report.entities.empty());
    CHECK(report.skipped.empty());
    CHECK(report.sums.allOk());
    CHECK(report.sums.storeRows == 0);
}

TEST_CASE("registry sidecar round trips entities and stats") {
    namespace fs = std::filesystem;
    auto path = fs::temp_directory_path() / "dda_registry_test.registry";
    EntityRegistry registry;
    registry.add("user");
    registry.add("city");
    dda::writeRegistryFile(path, registry);
    {
        std::ifstream in(path);
        std::stringstream buf;
        buf << in.rdbuf();
        CHECK(buf.str() == "user\t0\t0\t0\ncity\t0\t0\t0\n");
    }
    std::vector<EntityStats> stats = {{"city", 3, 2, 3}, {"user", 5, 4, 6}};
    dda::writeRegistryFile(path, registry, stats);
    {
        std::ifstream in(path);
        std::stringstream buf;
        buf << in.rdbuf();
        CHECK(buf.str() == "user\t5\t4\t6\ncity\t3\t2\t3\n");
    }
    auto loaded = dda::readRegistryFile(path);
    CHECK(loaded.entities() == registry.entities());
    fs::remove(path);
    CHECK_THROWS_AS(dda::readRegistryFile(path), std::runtime_error);
}

TEST_CASE("registry sidecar rejects malformed lines") {
    namespace fs = std::filesystem;
    auto path = fs::temp_directory_path() / "dda_registry_bad.registry";
    std::ofstream(path) << "user\t1\t2\n";
    CHECK_THROWS_WITH_AS(dda::readRegistryFile(path), doctest::Contains("4"),
                         std::runtime_error);
    fs::remove(path);
}
