// Command-line driver: ingest -> analyze -> query/correlate, plus the
// synthetic corpus generator and the ingest-vs-analysis benchmark.
//
// Exit codes: 0 success, 1 analysis found failed global-sum relations,
// 2 usage or input error.

#include <chrono>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "dda/anomaly.hpp"
#include "dda/assoc_array.hpp"
#include "dda/dda_engine.hpp"
#include "dda/generator.hpp"
#include "dda/ingest.hpp"
#include "dda/report.hpp"
#include "dda/text_util.hpp"

namespace fs = std::filesystem;
using Clock = std::chrono::steady_clock;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitAnalysisFailed = 1;
constexpr int kExitUsage = 2;

double secondsSince(Clock::time_point start) {
    return std::chrono::duration<double>(Clock::now() - start).count();
}

fs::path registryPathFor(const fs::path& storePath) {
    return fs::path(storePath.string() + ".registry");
}

dda::Store loadStore(const fs::path& storePath, const std::string& separator) {
    dda::Store store;
    store.array = dda::readTriplesFile(storePath);
    store.registry = dda::readRegistryFile(registryPathFor(storePath), separator);
    return store;
}

struct IngestFlags {
    std::string input;
    std::string output;
    dda::InputFormat format = dda::InputFormat::Csv;
    std::string idField;
    std::vector<std::string> tokenized;
    std::string multiDelim;
    std::string separator = "|";
    std::vector<std::string> renames;
    dda::ErrorPolicy onError = dda::ErrorPolicy::Abort;

    dda::IngestConfig toConfig() const {
        dda::IngestConfig cfg;
        cfg.format = format;
        cfg.idField = idField;
        cfg.multiValueDelimiter = multiDelim;
        cfg.keySeparator = separator;
        cfg.onError = onError;
        for (const std::string& f : tokenized)
            cfg.tokenizedFields.insert(f);
        for (const std::string& r : renames) {
            auto eq = r.find('=');
            if (eq == std::string::npos || eq == 0 || eq + 1 == r.size())
                throw std::invalid_argument("--rename expects FIELD=ENTITY, got '" + r + "'");
            cfg.entityRenames[r.substr(0, eq)] = r.substr(eq + 1);
        }
        cfg.validate();
        return cfg;
    }
};

int cmdIngest(const IngestFlags& flags) {
    dda::IngestConfig cfg = flags.toConfig();
    std::ifstream in(flags.input, std::ios::binary);
    if (!in) {
        std::cerr << "error: cannot open input: " << flags.input << "\n";
        return kExitUsage;
    }
    auto start = Clock::now();
    dda::ParseResult parsed = dda::parseRecords(in, cfg);
    dda::Store store = dda::buildStore(parsed.records, cfg);
    dda::writeTriplesFile(flags.output, store.array);
    dda::writeRegistryFile(registryPathFor(flags.output), store.registry);
    double ingestSeconds = secondsSince(start);

    for (const std::string& w : parsed.warnings)
        std::cerr << "warning: skipped " << w << "\n";
    std::cout << "records: " << parsed.records.size() << "\n";
    if (parsed.skipped > 0)
        std::cout << "skipped: " << parsed.skipped << "\n";
    std::cout << "triples: " << store.array.nnz() << "\n";
    std::cout << "ingest:  " << dda::formatSeconds(ingestSeconds) << " s\n";
    return kExitOk;
}

int cmdAnalyze(const std::string& storePath, const dda::ClassifierConfig& classifier,
               const std::string& separator, bool json) {
    dda::Store store = loadStore(storePath, separator);
    dda::DdaReport report = dda::analyze(store.array, store.registry, classifier);

    // Fill the registry sidecar with the computed dimensions.
    std::vector<dda::EntityStats> stats;
    for (const auto& e : report.entities)
        stats.push_back(e.stats);
    dda::writeRegistryFile(registryPathFor(storePath), store.registry, stats);

    if (json) {
        std::cout << dda::renderStatsTable(report, dda::RenderMode::Json);
    } else {
        std::cout << dda::renderStatsTable(report, dda::RenderMode::Text);
        std::cout << "\n" << dda::renderGlobalSums(report.sums);
        if (!report.skipped.empty()) {
            std::cout << "skipped entities:";
            for (const std::string& s : report.skipped)
                std::cout << " " << s;
            std::cout << "\n";
        }
        std::cout << "dda: " << dda::formatSeconds(report.ddaSeconds) << " s\n";
    }
    return report.sums.allOk() ? kExitOk : kExitAnalysisFailed;
}

int requireEntity(const dda::Store& store, const std::string& entity) {
    if (store.registry.contains(entity))
        return kExitOk;
    std::cerr << "error: unknown entity '" << entity << "'. Known entities:";
    for (const std::string& e : store.registry.entities())
        std::cerr << " " << e;
    std::cerr << "\n";
    return kExitUsage;
}

int cmdQuery(const std::string& storePath, const std::string& entity, double minCount,
             const std::string& separator, bool json) {
    dda::Store store = loadStore(storePath, separator);
    if (int rc = requireEntity(store, entity); rc != kExitOk)
        return rc;
    auto sub = dda::selectByColPrefix(store.array, store.registry.prefixOf(entity));
    auto findings = dda::popularValues(sub, entity, minCount);
    std::cout << dda::renderFindings(findings, json ? dda::RenderMode::Json : dda::RenderMode::Text,
                                     separator);
    return kExitOk;
}

int cmdCorrelate(const std::string& storePath, const std::string& entityA,
                 const std::string& entityB, double minCount, const std::string& separator,
                 bool json) {
    dda::Store store = loadStore(storePath, separator);
    if (int rc = requireEntity(store, entityA); rc != kExitOk)
        return rc;
    if (int rc = requireEntity(store, entityB); rc != kExitOk)
        return rc;
    auto subA = dda::selectByColPrefix(store.array, store.registry.prefixOf(entityA));
    auto subB = dda::selectByColPrefix(store.array, store.registry.prefixOf(entityB));
    auto findings = dda::correlateEntities(subA, subB, entityA, entityB, minCount);
    std::cout << dda::renderFindings(findings, json ? dda::RenderMode::Json : dda::RenderMode::Text,
                                     separator);
    return kExitOk;
}

int cmdGenerate(const std::string& output, std::uint64_t rows, std::uint64_t seed,
                const std::vector<std::string>& entitySpecs) {
    dda::GeneratorSpec spec;
    spec.rows = rows;
    spec.seed = seed;
    for (const std::string& s : entitySpecs)
        spec.entities.push_back(dda::parseEntityTarget(s));
    dda::GeneratedCorpus corpus = dda::generateCorpus(spec);
    std::ofstream out(output, std::ios::binary);
    if (!out) {
        std::cerr << "error: cannot open output: " << output << "\n";
        return kExitUsage;
    }
    out.write(corpus.csv.data(), static_cast<std::streamsize>(corpus.csv.size()));
    if (!out) {
        std::cerr << "error: write failed: " << output << "\n";
        return kExitUsage;
    }
    std::cout << "rows: " << rows << "\n";
    std::cout << "entities: " << spec.entities.size() << "\n";
    if (!corpus.tokenizedFields.empty()) {
        std::cout << "tokenize on ingest:";
        for (const std::string& f : corpus.tokenizedFields)
            std::cout << " --tokenize " << f;
        std::cout << "\n";
    }
    return kExitOk;
}

dda::GeneratorSpec benchSpec(std::uint64_t rows, std::uint64_t seed) {
    dda::GeneratorSpec spec;
    spec.rows = rows;
    spec.seed = seed;
    spec.entities.push_back({"text", dda::StructureClass::Authoritative, 0.0});
    spec.entities.push_back({"status", dda::StructureClass::Vestigial, 0.0});
    if (rows >= 2)
        spec.entities.push_back({"user", dda::StructureClass::Identity, 0.0});
    if (rows >= 100)
        spec.entities.push_back({"host", dda::StructureClass::Organizational, 0.0});
    return spec;
}

int cmdBench(std::uint64_t rows, std::uint64_t seed, bool json) {
    dda::GeneratorSpec spec = benchSpec(rows, seed);
    dda::GeneratedCorpus corpus = dda::generateCorpus(spec);

    fs::path dir = fs::temp_directory_path() /
                   ("dda_bench_" + std::to_string(::getpid()) + "_" + std::to_string(seed));
    fs::create_directories(dir);
    fs::path csvPath = dir / "corpus.csv";
    fs::path storePath = dir / "store.tsv";
    {
        std::ofstream out(csvPath, std::ios::binary);
        out.write(corpus.csv.data(), static_cast<std::streamsize>(corpus.csv.size()));
    }

    dda::IngestConfig cfg;
    cfg.format = dda::InputFormat::Csv;
    for (const std::string& f : corpus.tokenizedFields)
        cfg.tokenizedFields.insert(f);

    dda::TimingReport timings;
    dda::Store store;
    {
        auto start = Clock::now();
        std::ifstream in(csvPath, std::ios::binary);
        dda::ParseResult parsed = dda::parseRecords(in, cfg);
        store = dda::buildStore(parsed.records, cfg);
        dda::writeTriplesFile(storePath, store.array);
        dda::writeRegistryFile(registryPathFor(storePath), store.registry);
        timings.ingestSeconds = secondsSince(start);
        timings.recordCount = parsed.records.size();
        timings.tripleCount = store.array.nnz();
    }
    dda::DdaReport report = dda::analyze(store.array, store.registry);
    timings.ddaSeconds = report.ddaSeconds;

    std::error_code ec;
    fs::remove_all(dir, ec);

    std::cout << dda::renderTimings(timings, json ? dda::RenderMode::Json : dda::RenderMode::Text);
    return kExitOk;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"Structural profiler for tabular and log data: explodes records into a "
                 "sparse entity|value store, measures per-entity dimensions, classifies "
                 "each entity's structure, and runs frequency and co-occurrence queries."};
    app.require_subcommand(1);

    std::map<std::string, dda::InputFormat> formatNames{
        {"csv", dda::InputFormat::Csv}, {"tsv", dda::InputFormat::Tsv},
        {"jsonl", dda::InputFormat::Jsonl}};
    std::map<std::string, dda::ErrorPolicy> policyNames{{"abort", dda::ErrorPolicy::Abort},
                                                        {"skip", dda::ErrorPolicy::Skip}};

    // ingest
    IngestFlags ingest;
    auto* ingestCmd = app.add_subcommand("ingest", "Parse records and write the exploded store");
    ingestCmd->add_option("input", ingest.input, "Input data file")->required();
    ingestCmd->add_option("output", ingest.output, "Store file to write (registry sidecar goes next to it)")
        ->required();
    ingestCmd->add_option("--format", ingest.format, "Input format")
        ->transform(CLI::CheckedTransformer(formatNames, CLI::ignore_case));
    ingestCmd->add_option("--id-field", ingest.idField, "Field used as row key");
    ingestCmd->add_option("--tokenize", ingest.tokenized, "Whitespace-tokenize this field (repeatable)");
    ingestCmd->add_option("--multi-delim", ingest.multiDelim, "Split multi-value fields on this string");
    ingestCmd->add_option("--separator", ingest.separator, "Key separator between entity and value");
    ingestCmd->add_option("--rename", ingest.renames, "Map input field to entity name, FIELD=ENTITY (repeatable)");
    ingestCmd->add_option("--on-error", ingest.onError, "Malformed-record policy")
        ->transform(CLI::CheckedTransformer(policyNames, CLI::ignore_case));

    // analyze
    std::string analyzeStore;
    std::string analyzeSeparator = "|";
    dda::ClassifierConfig classifier;
    bool analyzeJson = false;
    auto* analyzeCmd = app.add_subcommand("analyze", "Run dimensional analysis on a store");
    analyzeCmd->add_option("store", analyzeStore, "Store file written by ingest")->required();
    analyzeCmd->add_option("--tau-authority", classifier.tauAuthority,
                           "Authoritative when uniqueValues/rows >= this");
    analyzeCmd->add_option("--tau-organization", classifier.tauOrganization,
                           "Organizational when rows/uniqueValues >= this");
    analyzeCmd->add_option("--vestigial-max", classifier.vestigialMaxUnique,
                           "Vestigial when uniqueValues <= this");
    analyzeCmd->add_option("--separator", analyzeSeparator, "Key separator used at ingest");
    analyzeCmd->add_flag("--json", analyzeJson, "Emit the report as JSON");

    // query
    std::string queryStore, queryEntity;
    double queryMinCount = 1.0;
    std::string querySeparator = "|";
    bool queryJson = false;
    auto* queryCmd = app.add_subcommand("query", "List popular values of one entity");
    queryCmd->add_option("store", queryStore)->required();
    queryCmd->add_option("entity", queryEntity)->required();
    queryCmd->add_option("--min-count", queryMinCount, "Report values with total > this");
    queryCmd->add_option("--separator", querySeparator, "Key separator used at ingest");
    queryCmd->add_flag("--json", queryJson, "Emit findings as JSON lines");

    // correlate
    std::string corrStore, corrEntityA, corrEntityB;
    double corrMinCount = 1.0;
    std::string corrSeparator = "|";
    bool corrJson = false;
    auto* corrCmd = app.add_subcommand("correlate", "Cross-entity co-occurrence counts");
    corrCmd->add_option("store", corrStore)->required();
    corrCmd->add_option("entityA", corrEntityA)->required();
    corrCmd->add_option("entityB", corrEntityB)->required();
    corrCmd->add_option("--min-count", corrMinCount, "Report pairs co-occurring > this");
    corrCmd->add_option("--separator", corrSeparator, "Key separator used at ingest");
    corrCmd->add_flag("--json", corrJson, "Emit findings as JSON lines");

    // generate
    std::string genOutput;
    std::uint64_t genRows = 0;
    std::uint64_t genSeed = 0;
    std::vector<std::string> genEntities;
    auto* genCmd = app.add_subcommand("generate", "Write a synthetic CSV corpus with known structure");
    genCmd->add_option("output", genOutput, "CSV file to write")->required();
    genCmd->add_option("--rows", genRows, "Number of data rows");
    genCmd->add_option("--seed", genSeed, "RNG seed");
    genCmd->add_option("--entity", genEntities,
                       "Entity spec name=class[:missingRate], class one of identity, authority, "
                       "organization, vestigial (repeatable)")
        ->required();

    // bench
    std::uint64_t benchRows = 0;
    std::uint64_t benchSeed = 0;
    bool benchJson = false;
    auto* benchCmd = app.add_subcommand("bench", "Time ingest vs analysis on a generated corpus");
    benchCmd->add_option("--rows", benchRows, "Number of data rows")->required()
        ->check(CLI::PositiveNumber);
    benchCmd->add_option("--seed", benchSeed, "RNG seed");
    benchCmd->add_flag("--json", benchJson, "Emit timings as JSON");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        int code = app.exit(e);
        return code == 0 ? kExitOk : kExitUsage;
    }

    try {
        if (ingestCmd->parsed())
            return cmdIngest(ingest);
        if (analyzeCmd->parsed())
            return cmdAnalyze(analyzeStore, classifier, analyzeSeparator, analyzeJson);
        if (queryCmd->parsed())
            return cmdQuery(queryStore, queryEntity, queryMinCount, querySeparator, queryJson);
        if (corrCmd->parsed())
            return cmdCorrelate(corrStore, corrEntityA, corrEntityB, corrMinCount, corrSeparator,
                                corrJson);
        if (genCmd->parsed())
            return cmdGenerate(genOutput, genRows, genSeed, genEntities);
        if (benchCmd->parsed())
            return cmdBench(benchRows, benchSeed, benchJson);
    } catch (const dda::IngestError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitUsage;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitUsage;
    }
    return kExitUsage;
}
