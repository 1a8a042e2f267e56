#include "dda/generator.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <cstdio>
#include <random>
#include <stdexcept>

namespace dda {

namespace {

// mt19937_64 with modulo mapping: the engine's output sequence is fixed by
// the standard, so generated corpora are identical across platforms.
class Rng {
public:
    explicit Rng(std::uint64_t seed) : gen_(seed) {}

    std::uint64_t below(std::uint64_t n) { return gen_() % n; }

private:
    std::mt19937_64 gen_;
};

// Multiplicative bijection on 32 bits; gives unique values that do not look
// sequential.
std::string scrambled(std::uint64_t i) {
    auto h = static_cast<std::uint32_t>(i) * 2654435761u;
    char buf[16];
    std::snprintf(buf, sizeof(buf), "%08x", h);
    return buf;
}

std::string csvQuote(const std::string& field) {
    if (field.find_first_of(",\"\r\n") == std::string::npos)
        return field;
    std::string out = "\"";
    for (char c : field) {
        if (c == '"')
            out += '"';
        out += c;
    }
    out += '"';
    return out;
}

Count missCountFor(const EntityTarget& e, Count rows) {
    if (e.missingRate < 0.0 || e.missingRate > 1.0)
        throw std::invalid_argument("entity '" + e.name + "': missingRate must be in [0, 1]");
    return static_cast<Count>(std::floor(static_cast<double>(rows) * e.missingRate));
}

Count uniqueTokensPerRow(const ClassifierConfig& cfg) {
    return std::max<Count>(2, static_cast<Count>(std::ceil(cfg.tauAuthority)));
}

Count organizationValueCount(Count presentRows, const ClassifierConfig& cfg) {
    auto spread = static_cast<Count>(static_cast<double>(presentRows) / (2.0 * cfg.tauOrganization));
    return std::max<Count>(cfg.vestigialMaxUnique + 1, spread);
}

} // namespace

void checkFeasible(const GeneratorSpec& spec, const ClassifierConfig& config) {
    config.validate();
    if (spec.entities.empty())
        throw std::invalid_argument("generator: at least one entity is required");
    std::vector<std::string> seen;
    for (const EntityTarget& e : spec.entities) {
        if (e.name.empty())
            throw std::invalid_argument("generator: empty entity name");
        if (std::find(seen.begin(), seen.end(), e.name) != seen.end())
            throw std::invalid_argument("generator: duplicate entity '" + e.name + "'");
        seen.push_back(e.name);
    }
    if (spec.rows == 0)
        return; // header-only corpus, nothing to realize
    for (const EntityTarget& e : spec.entities) {
        Count present = spec.rows - missCountFor(e, spec.rows);
        switch (e.target) {
        case StructureClass::Vestigial:
            if (present < 1)
                throw std::invalid_argument("entity '" + e.name +
                                            "': needs at least 1 present row, got 0");
            break;
        case StructureClass::Identity:
            if (present < config.vestigialMaxUnique + 1)
                throw std::invalid_argument(
                    "entity '" + e.name + "': Identity needs at least " +
                    std::to_string(config.vestigialMaxUnique + 1) + " present rows, got " +
                    std::to_string(present));
            break;
        case StructureClass::Authoritative: {
            if (present < 1)
                throw std::invalid_argument("entity '" + e.name +
                                            "': needs at least 1 present row, got 0");
            Count unique = uniqueTokensPerRow(config) * present + 2;
            if (unique <= config.vestigialMaxUnique)
                throw std::invalid_argument("entity '" + e.name +
                                            "': Authoritative would stay under the Vestigial cutoff");
            break;
        }
        case StructureClass::Organizational: {
            Count needed = static_cast<Count>(
                std::ceil(config.tauOrganization *
                          static_cast<double>(config.vestigialMaxUnique + 1)));
            if (present < needed)
                throw std::invalid_argument("entity '" + e.name + "': Organizational needs at least " +
                                            std::to_string(needed) + " present rows, got " +
                                            std::to_string(present));
            break;
        }
        }
    }
}

GeneratedCorpus generateCorpus(const GeneratorSpec& spec, const ClassifierConfig& config) {
    checkFeasible(spec, config);
    Rng rng(spec.seed);
    GeneratedCorpus out;

    const std::size_t k = spec.entities.size();

    // Per-entity missing mask with an exact planted count.
    std::vector<std::vector<char>> missing(k, std::vector<char>(spec.rows, 0));
    for (std::size_t e = 0; e < k; ++e) {
        Count missCount = missCountFor(spec.entities[e], spec.rows);
        if (missCount == 0)
            continue;
        std::vector<Count> idx(spec.rows);
        for (Count i = 0; i < spec.rows; ++i)
            idx[i] = i;
        for (Count i = 0; i < missCount; ++i) {
            Count j = i + rng.below(spec.rows - i);
            std::swap(idx[i], idx[j]);
            missing[e][idx[i]] = 1;
        }
    }

    // Per-entity value plans.
    std::vector<Count> orgValueCount(k, 0);
    std::vector<Count> presentSeen(k, 0);
    for (std::size_t e = 0; e < k; ++e) {
        if (spec.entities[e].target == StructureClass::Organizational) {
            Count present = spec.rows - missCountFor(spec.entities[e], spec.rows);
            orgValueCount[e] = organizationValueCount(present, config);
        }
        if (spec.entities[e].target == StructureClass::Authoritative)
            out.tokenizedFields.push_back(spec.entities[e].name);
    }

    std::string& csv = out.csv;
    for (std::size_t e = 0; e < k; ++e) {
        if (e > 0)
            csv += ',';
        csv += csvQuote(spec.entities[e].name);
    }
    csv += '\n';

    const Count uniqueTokens = uniqueTokensPerRow(config);
    for (Count row = 0; row < spec.rows; ++row) {
        Count present = 0;
        for (std::size_t e = 0; e < k; ++e) {
            if (e > 0)
                csv += ',';
            if (missing[e][row])
                continue;
            ++present;
            const EntityTarget& target = spec.entities[e];
            std::string cell;
            switch (target.target) {
            case StructureClass::Vestigial:
                cell = "default";
                break;
            case StructureClass::Identity:
                cell = "id_" + scrambled(row);
                break;
            case StructureClass::Organizational: {
                // Cover every value once, then draw uniformly.
                Count seen = presentSeen[e]++;
                Count v = seen < orgValueCount[e] ? seen : rng.below(orgValueCount[e]);
                char buf[24];
                std::snprintf(buf, sizeof(buf), "grp_%06llu",
                              static_cast<unsigned long long>(v));
                cell = buf;
                break;
            }
            case StructureClass::Authoritative: {
                cell = "w_common_a w_common_b";
                for (Count t = 0; t < uniqueTokens; ++t)
                    cell += " w_" + scrambled(row * uniqueTokens + t);
                break;
            }
            }
            csv += csvQuote(cell);
        }
        csv += '\n';
        Count missed = static_cast<Count>(k) - present;
        if (present >= 2)
            ++out.rowsSpanningMultiple;
        if (present >= 1 && missed >= 1)
            ++out.rowsMissingSome;
    }
    return out;
}

EntityTarget parseEntityTarget(const std::string& text) {
    auto eq = text.find('=');
    if (eq == std::string::npos || eq == 0)
        throw std::invalid_argument("entity spec '" + text + "': expected name=class[:missingRate]");
    EntityTarget target;
    target.name = text.substr(0, eq);
    std::string rest = text.substr(eq + 1);
    auto colon = rest.find(':');
    std::string className = colon == std::string::npos ? rest : rest.substr(0, colon);
    std::string lowered;
    for (char c : className)
        lowered += static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
    if (!lowered.empty())
        lowered[0] = static_cast<char>(std::toupper(static_cast<unsigned char>(lowered[0])));
    auto cls = structureFromName(lowered);
    if (!cls)
        throw std::invalid_argument("entity spec '" + text + "': unknown class '" + className + "'");
    target.target = *cls;
    if (colon != std::string::npos) {
        try {
            target.missingRate = std::stod(rest.substr(colon + 1));
        } catch (const std::exception&) {
            throw std::invalid_argument("entity spec '" + text + "': bad missing rate");
        }
    }
    return target;
}

} // namespace dda
