#include "dda/anomaly.hpp"

#include <algorithm>
#include <stdexcept>

namespace dda {

namespace {

void sortFindings(std::vector<AnomalyFinding>& findings) {
    std::sort(findings.begin(), findings.end(),
              [](const AnomalyFinding& a, const AnomalyFinding& b) {
                  if (a.count != b.count)
                      return a.count > b.count;
                  if (a.subject != b.subject)
                      return a.subject < b.subject;
                  return a.subjectB < b.subjectB;
              });
}

} // namespace

std::string_view kindName(FindingKind k) {
    switch (k) {
    case FindingKind::PopularValue: return "PopularValue";
    case FindingKind::DuplicateValueAcrossRows: return "DuplicateValueAcrossRows";
    case FindingKind::MultiValuedRow: return "MultiValuedRow";
    case FindingKind::CrossEntityPair: return "CrossEntityPair";
    case FindingKind::VestigialValue: return "VestigialValue";
    }
    throw std::logic_error("kindName: bad enum value");
}

std::vector<AnomalyFinding> popularValues(const AssociativeArray& sub, std::string_view entity,
                                          double minCount) {
    if (minCount < 1.0)
        throw std::invalid_argument("popularValues: minCount must be >= 1");
    std::vector<AnomalyFinding> findings;
    AssociativeArray popular = threshold(colSums(sub), minCount);
    for (const Triple& t : popular.entries())
        findings.push_back({FindingKind::PopularValue, std::string(entity), "", t.col, "", t.val});
    sortFindings(findings);
    return findings;
}

std::vector<AnomalyFinding> identityDeviations(const AssociativeArray& sub,
                                               std::string_view entity) {
    std::vector<AnomalyFinding> findings;

    // Column degree > 1: the same value stored in several rows.
    std::vector<AnomalyFinding> duplicates;
    {
        auto cols = transpose(sub); // groups entries by column key
        const auto& e = cols.entries();
        for (std::size_t i = 0; i < e.size();) {
            const std::string& col = e[i].row;
            std::size_t degree = 0;
            for (; i < e.size() && e[i].row == col; ++i)
                ++degree;
            if (degree > 1)
                duplicates.push_back({FindingKind::DuplicateValueAcrossRows, std::string(entity), "",
                                      col, "", static_cast<double>(degree)});
        }
    }
    sortFindings(duplicates);

    // Row degree > 1: one row holding several values of this entity.
    std::vector<AnomalyFinding> multiValued;
    {
        const auto& e = sub.entries();
        for (std::size_t i = 0; i < e.size();) {
            const std::string& row = e[i].row;
            std::size_t degree = 0;
            for (; i < e.size() && e[i].row == row; ++i)
                ++degree;
            if (degree > 1)
                multiValued.push_back({FindingKind::MultiValuedRow, std::string(entity), "", row, "",
                                       static_cast<double>(degree)});
        }
    }
    sortFindings(multiValued);

    findings.insert(findings.end(), duplicates.begin(), duplicates.end());
    findings.insert(findings.end(), multiValued.begin(), multiValued.end());
    return findings;
}

std::vector<AnomalyFinding> correlateEntities(const AssociativeArray& subA,
                                              const AssociativeArray& subB,
                                              std::string_view entityA, std::string_view entityB,
                                              double minCount) {
    AssociativeArray kept = threshold(multiply(transpose(subA), subB), minCount);
    std::vector<AnomalyFinding> findings;
    for (const Triple& t : kept.entries())
        findings.push_back({FindingKind::CrossEntityPair, std::string(entityA), std::string(entityB),
                            t.row, t.col, t.val});
    sortFindings(findings);
    return findings;
}

std::vector<AnomalyFinding> vestigialSummary(const AssociativeArray& sub,
                                             std::string_view entity) {
    std::vector<AnomalyFinding> findings;
    auto cols = transpose(sub);
    const auto& e = cols.entries();
    for (std::size_t i = 0; i < e.size();) {
        const std::string& col = e[i].row;
        std::size_t degree = 0;
        for (; i < e.size() && e[i].row == col; ++i)
            ++degree;
        findings.push_back({FindingKind::VestigialValue, std::string(entity), "", col, "",
                            static_cast<double>(degree)});
    }
    sortFindings(findings);
    return findings;
}

} // namespace dda
