#pragma once

#include <string>
#include <string_view>
#include <vector>

#include "dda/assoc_array.hpp"

namespace dda {

enum class FindingKind {
    PopularValue,             // column whose total exceeds a cutoff
    DuplicateValueAcrossRows, // one value shared by several rows
    MultiValuedRow,           // one row holding several values of the entity
    CrossEntityPair,          // value pair co-occurring across rows
    VestigialValue,           // census entry of a near-constant entity
};

std::string_view kindName(FindingKind k);

/// One highlighted pattern. `entityB`/`subjectB` are set only for
/// CrossEntityPair findings. Subjects are full column keys (or a row key for
/// MultiValuedRow) as stored, i.e. with the separator escaping intact.
struct AnomalyFinding {
    FindingKind kind = FindingKind::PopularValue;
    std::string entity;
    std::string entityB;
    std::string subject;
    std::string subjectB;
    double count = 0.0;

    friend bool operator==(const AnomalyFinding&, const AnomalyFinding&) = default;
};

// All finding lists are ordered by count descending, then subject (and
// subjectB) ascending, so output is deterministic.

/// Columns of `sub` whose colSums total is strictly greater than `minCount`.
/// Intended for Authoritative entities (important usernames, words, ...).
/// Requires minCount >= 1.
std::vector<AnomalyFinding> popularValues(const AssociativeArray& sub, std::string_view entity,
                                          double minCount);

/// Departures from one-to-one structure in an Identity entity: values
/// appearing in more than one row, and rows holding more than one value.
/// Empty exactly when every row and column degree is <= 1.
std::vector<AnomalyFinding> identityDeviations(const AssociativeArray& sub,
                                               std::string_view entity);

/// Co-occurrence counts between two entities drawn from the same store:
/// entries of transpose(subA) * subB strictly greater than `minCount`. The
/// count of a pair is the number of rows containing both keys.
std::vector<AnomalyFinding> correlateEntities(const AssociativeArray& subA,
                                              const AssociativeArray& subB,
                                              std::string_view entityA, std::string_view entityB,
                                              double minCount);

/// Full value census of a Vestigial entity: one finding per distinct column
/// key with the number of rows carrying it. Counts total to the entity's
/// entry count.
std::vector<AnomalyFinding> vestigialSummary(const AssociativeArray& sub,
                                             std::string_view entity);

} // namespace dda
