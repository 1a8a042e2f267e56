#pragma once

#include <cstddef>
#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

namespace dda {

/// One stored entry of an associative array. Absence encodes zero, so a
/// stored value is always positive.
struct Triple {
    std::string row;
    std::string col;
    double val = 0.0;

    friend bool operator==(const Triple&, const Triple&) = default;
};

/// Sparse mapping (row key, column key) -> positive numeric value.
///
/// Entries are kept sorted by (row, col) with no duplicate coordinates;
/// rowKeys()/colKeys() are the distinct keys in lexicographic byte order.
/// Arrays are immutable after construction: every operation below is a pure
/// function returning a new array, so instances can be shared freely across
/// threads.
class AssociativeArray {
public:
    AssociativeArray() = default;

    /// Builds an array from arbitrary triples. Duplicate (row, col) pairs are
    /// collapsed by summing their values. Throws std::invalid_argument naming
    /// the offending input index if a triple has an empty key or a
    /// non-positive value.
    static AssociativeArray fromTriples(std::vector<Triple> triples);

    const std::vector<Triple>& entries() const { return entries_; }
    const std::vector<std::string>& rowKeys() const { return rowKeys_; }
    const std::vector<std::string>& colKeys() const { return colKeys_; }

    std::size_t numRows() const { return rowKeys_.size(); }
    std::size_t numCols() const { return colKeys_.size(); }
    std::size_t nnz() const { return entries_.size(); }
    bool empty() const { return entries_.empty(); }

    /// Stored value at (row, col), or 0 when absent.
    double value(std::string_view row, std::string_view col) const;

    /// Sum of all stored values.
    double total() const;

    friend bool operator==(const AssociativeArray&, const AssociativeArray&) = default;

private:
    // Entries must already be sorted by (row, col) and duplicate-free.
    static AssociativeArray fromSorted(std::vector<Triple> entries);

    std::vector<Triple> entries_;
    std::vector<std::string> rowKeys_;
    std::vector<std::string> colKeys_;

    friend AssociativeArray add(const AssociativeArray&, const AssociativeArray&);
    friend AssociativeArray transpose(const AssociativeArray&);
    friend AssociativeArray multiply(const AssociativeArray&, const AssociativeArray&);
    friend AssociativeArray rowSums(const AssociativeArray&);
    friend AssociativeArray colSums(const AssociativeArray&);
    friend AssociativeArray selectByColPrefix(const AssociativeArray&, std::string_view);
    friend AssociativeArray threshold(const AssociativeArray&, double);
};

/// Entry-wise sum over the union of keys. Arrays sharing no row or column
/// key come out side by side: nnz(result) == nnz(a) + nnz(b).
AssociativeArray add(const AssociativeArray& a, const AssociativeArray& b);

/// Swaps row and column keys. Involution: transpose(transpose(a)) == a.
AssociativeArray transpose(const AssociativeArray& a);

/// Matrix product over the matched inner dimension: result(r, c) =
/// sum_k a(r, k) * b(k, c). Inner keys are matched by exact string equality;
/// keys present in only one operand contribute nothing.
AssociativeArray multiply(const AssociativeArray& a, const AssociativeArray& b);

/// Collapses columns: one entry per row key, column key "1", value the sum
/// over that row.
AssociativeArray rowSums(const AssociativeArray& a);

/// Collapses rows: one entry per column key, row key "1", value the sum
/// over that column.
AssociativeArray colSums(const AssociativeArray& a);

/// Sub-array of entries whose column key starts with `prefix`; row keys are
/// restricted to rows with at least one surviving entry. `prefix` must be
/// non-empty.
AssociativeArray selectByColPrefix(const AssociativeArray& a, std::string_view prefix);

/// Retains exactly the entries with value strictly greater than `t`.
AssociativeArray threshold(const AssociativeArray& a, double t);

/// Checks every structural invariant (sortedness, no duplicates, positive
/// values, key sets consistent with entries). Throws std::logic_error with a
/// description of the first violation. Intended for tests and debugging.
void validate(const AssociativeArray& a);

/// Renders a value the way the triple interchange format does: plain decimal
/// integer when the value is integral, shortest round-trip decimal otherwise.
std::string formatValue(double v);

// Triple interchange format: UTF-8 text, one `row<TAB>col<TAB>value` line
// per entry, sorted by (row, col). Tabs, newlines and backslashes inside
// keys are backslash-escaped so the format stays line- and tab-delimited.
// Round trips are byte-exact for files this library writes.

std::string serializeTriples(const AssociativeArray& a);
AssociativeArray parseTriples(std::string_view text);

void writeTriplesFile(const std::filesystem::path& path, const AssociativeArray& a);
AssociativeArray readTriplesFile(const std::filesystem::path& path);

} // namespace dda
