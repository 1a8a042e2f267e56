#include "dda/assoc_array.hpp"

#include <algorithm>
#include <charconv>
#include <cstdint>
#include <fstream>
#include <sstream>
#include <stdexcept>
#include <unordered_map>

#include "dda/text_util.hpp"

namespace dda {

namespace {

bool coordLess(const Triple& a, const Triple& b) {
    if (int c = a.row.compare(b.row); c != 0)
        return c < 0;
    return a.col < b.col;
}

// Distinct sorted keys from a projection of the (sorted) entry vector.
template <typename Proj>
std::vector<std::string> distinctKeys(const std::vector<Triple>& entries, Proj proj) {
    std::vector<std::string> keys;
    keys.reserve(entries.size());
    for (const Triple& t : entries)
        keys.push_back(proj(t));
    std::sort(keys.begin(), keys.end());
    keys.erase(std::unique(keys.begin(), keys.end()), keys.end());
    return keys;
}

} // namespace

AssociativeArray AssociativeArray::fromSorted(std::vector<Triple> entries) {
    AssociativeArray a;
    a.rowKeys_ = distinctKeys(entries, [](const Triple& t) { return t.row; });
    a.colKeys_ = distinctKeys(entries, [](const Triple& t) { return t.col; });
    a.entries_ = std::move(entries);
    return a;
}

AssociativeArray AssociativeArray::fromTriples(std::vector<Triple> triples) {
    for (std::size_t i = 0; i < triples.size(); ++i) {
        const Triple& t = triples[i];
        if (t.row.empty())
            throw std::invalid_argument("triple #" + std::to_string(i) + ": empty row key");
        if (t.col.empty())
            throw std::invalid_argument("triple #" + std::to_string(i) + ": empty column key");
        if (!(t.val > 0.0))
            throw std::invalid_argument("triple #" + std::to_string(i) + ": value must be > 0, got " +
                                        formatValue(t.val));
    }
    std::stable_sort(triples.begin(), triples.end(), coordLess);
    // Collapse duplicate coordinates by summing.
    std::size_t out = 0;
    for (std::size_t i = 0; i < triples.size(); ++i) {
        if (out > 0 && triples[out - 1].row == triples[i].row && triples[out - 1].col == triples[i].col) {
            triples[out - 1].val += triples[i].val;
        } else {
            if (out != i)
                triples[out] = std::move(triples[i]);
            ++out;
        }
    }
    triples.resize(out);
    return fromSorted(std::move(triples));
}

double AssociativeArray::value(std::string_view row, std::string_view col) const {
    Triple probe{std::string(row), std::string(col), 0.0};
    auto it = std::lower_bound(entries_.begin(), entries_.end(), probe, coordLess);
    if (it != entries_.end() && it->row == row && it->col == col)
        return it->val;
    return 0.0;
}

double AssociativeArray::total() const {
    double sum = 0.0;
    for (const Triple& t : entries_)
        sum += t.val;
    return sum;
}

AssociativeArray add(const AssociativeArray& a, const AssociativeArray& b) {
    std::vector<Triple> merged;
    merged.reserve(a.entries_.size() + b.entries_.size());
    auto ia = a.entries_.begin(), ea = a.entries_.end();
    auto ib = b.entries_.begin(), eb = b.entries_.end();
    while (ia != ea && ib != eb) {
        if (coordLess(*ia, *ib)) {
            merged.push_back(*ia++);
        } else if (coordLess(*ib, *ia)) {
            merged.push_back(*ib++);
        } else {
            merged.push_back({ia->row, ia->col, ia->val + ib->val});
            ++ia;
            ++ib;
        }
    }
    merged.insert(merged.end(), ia, ea);
    merged.insert(merged.end(), ib, eb);
    return AssociativeArray::fromSorted(std::move(merged));
}

AssociativeArray transpose(const AssociativeArray& a) {
    std::vector<Triple> flipped;
    flipped.reserve(a.entries_.size());
    for (const Triple& t : a.entries_)
        flipped.push_back({t.col, t.row, t.val});
    std::sort(flipped.begin(), flipped.end(), coordLess);
    return AssociativeArray::fromSorted(std::move(flipped));
}

AssociativeArray multiply(const AssociativeArray& a, const AssociativeArray& b) {
    // Row-by-row product with a sparse accumulator. b's entries are sorted by
    // row, so each inner key maps to a contiguous range found by binary search.
    const auto& be = b.entries_;
    auto bRowRange = [&](const std::string& key) {
        auto lo = std::lower_bound(be.begin(), be.end(), key,
                                   [](const Triple& t, const std::string& k) { return t.row < k; });
        auto hi = lo;
        while (hi != be.end() && hi->row == key)
            ++hi;
        return std::pair{lo, hi};
    };

    std::vector<Triple> result;
    std::unordered_map<std::string_view, double> acc;
    const auto& ae = a.entries_;
    for (std::size_t i = 0; i < ae.size();) {
        const std::string& row = ae[i].row;
        acc.clear();
        for (; i < ae.size() && ae[i].row == row; ++i) {
            auto [lo, hi] = bRowRange(ae[i].col);
            for (auto it = lo; it != hi; ++it)
                acc[it->col] += ae[i].val * it->val;
        }
        std::vector<std::pair<std::string_view, double>> cols(acc.begin(), acc.end());
        std::sort(cols.begin(), cols.end());
        for (const auto& [col, val] : cols)
            result.push_back({row, std::string(col), val});
    }
    return AssociativeArray::fromSorted(std::move(result));
}

AssociativeArray rowSums(const AssociativeArray& a) {
    std::vector<Triple> sums;
    sums.reserve(a.numRows());
    const auto& e = a.entries_;
    for (std::size_t i = 0; i < e.size();) {
        const std::string& row = e[i].row;
        double sum = 0.0;
        for (; i < e.size() && e[i].row == row; ++i)
            sum += e[i].val;
        sums.push_back({row, "1", sum});
    }
    return AssociativeArray::fromSorted(std::move(sums));
}

AssociativeArray colSums(const AssociativeArray& a) {
    std::vector<std::pair<std::string, double>> byCol;
    byCol.reserve(a.entries_.size());
    for (const Triple& t : a.entries_)
        byCol.emplace_back(t.col, t.val);
    std::sort(byCol.begin(), byCol.end(),
              [](const auto& x, const auto& y) { return x.first < y.first; });
    std::vector<Triple> sums;
    sums.reserve(a.numCols());
    for (std::size_t i = 0; i < byCol.size();) {
        const std::string& col = byCol[i].first;
        double sum = 0.0;
        for (; i < byCol.size() && byCol[i].first == col; ++i)
            sum += byCol[i].second;
        sums.push_back({"1", col, sum});
    }
    return AssociativeArray::fromSorted(std::move(sums));
}

AssociativeArray selectByColPrefix(const AssociativeArray& a, std::string_view prefix) {
    if (prefix.empty())
        throw std::invalid_argument("selectByColPrefix: prefix must be non-empty");
    std::vector<Triple> kept;
    for (const Triple& t : a.entries_)
        if (std::string_view(t.col).starts_with(prefix))
            kept.push_back(t);
    return AssociativeArray::fromSorted(std::move(kept));
}

AssociativeArray threshold(const AssociativeArray& a, double t) {
    std::vector<Triple> kept;
    for (const Triple& e : a.entries_)
        if (e.val > t)
            kept.push_back(e);
    return AssociativeArray::fromSorted(std::move(kept));
}

void validate(const AssociativeArray& a) {
    const auto& e = a.entries();
    for (std::size_t i = 0; i < e.size(); ++i) {
        if (e[i].row.empty())
            throw std::logic_error("entry #" + std::to_string(i) + ": empty row key");
        if (e[i].col.empty())
            throw std::logic_error("entry #" + std::to_string(i) + ": empty column key");
        if (!(e[i].val > 0.0))
            throw std::logic_error("entry #" + std::to_string(i) + ": non-positive value " +
                                   formatValue(e[i].val));
        if (i > 0 && !coordLess(e[i - 1], e[i]))
            throw std::logic_error("entries not strictly sorted by (row, col) at #" + std::to_string(i));
    }
    auto rows = distinctKeys(e, [](const Triple& t) { return t.row; });
    auto cols = distinctKeys(e, [](const Triple& t) { return t.col; });
    if (rows != a.rowKeys())
        throw std::logic_error("rowKeys inconsistent with entries");
    if (cols != a.colKeys())
        throw std::logic_error("colKeys inconsistent with entries");
}

std::string formatValue(double v) {
    if (v == static_cast<double>(static_cast<std::int64_t>(v)))
        return std::to_string(static_cast<std::int64_t>(v));
    char buf[64];
    auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), v);
    if (ec != std::errc{})
        throw std::logic_error("formatValue: conversion failed");
    return std::string(buf, ptr);
}

std::string serializeTriples(const AssociativeArray& a) {
    std::string out;
    for (const Triple& t : a.entries()) {
        out += escapeField(t.row);
        out += '\t';
        out += escapeField(t.col);
        out += '\t';
        out += formatValue(t.val);
        out += '\n';
    }
    return out;
}

AssociativeArray parseTriples(std::string_view text) {
    std::vector<Triple> triples;
    std::size_t lineNo = 0;
    std::size_t pos = 0;
    while (pos < text.size()) {
        std::size_t eol = text.find('\n', pos);
        if (eol == std::string_view::npos)
            eol = text.size();
        std::string_view line = text.substr(pos, eol - pos);
        pos = eol + 1;
        ++lineNo;
        if (line.empty())
            continue;
        auto fields = splitTabs(line);
        if (fields.size() != 3)
            throw std::invalid_argument("triple file line " + std::to_string(lineNo) + ": expected 3 tab-separated fields, got " +
                                        std::to_string(fields.size()));
        double val = 0.0;
        auto [ptr, ec] = std::from_chars(fields[2].data(), fields[2].data() + fields[2].size(), val);
        if (ec != std::errc{} || ptr != fields[2].data() + fields[2].size())
            throw std::invalid_argument("triple file line " + std::to_string(lineNo) + ": bad value '" +
                                        std::string(fields[2]) + "'");
        triples.push_back({unescapeField(fields[0]), unescapeField(fields[1]), val});
    }
    return AssociativeArray::fromTriples(std::move(triples));
}

void writeTriplesFile(const std::filesystem::path& path, const AssociativeArray& a) {
    std::ofstream out(path, std::ios::binary);
    if (!out)
        throw std::runtime_error("cannot open for writing: " + path.string());
    std::string text = serializeTriples(a);
    out.write(text.data(), static_cast<std::streamsize>(text.size()));
    if (!out)
        throw std::runtime_error("write failed: " + path.string());
}

AssociativeArray readTriplesFile(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in)
        throw std::runtime_error("cannot open: " + path.string());
    std::ostringstream buf;
    buf << in.rdbuf();
    return parseTriples(buf.str());
}

} // namespace dda
