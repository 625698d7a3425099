#pragma once

// Data model shared by every stage: the sample matrix, the linear indexing of
// ordered variable pairs, per-pair label states and binary adjacency matrices.

#include "sscd/error.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <unordered_set>
#include <utility>
#include <vector>

namespace sscd {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;

/// n x p measurements; rows are samples, columns are named variables.
class DataMatrix {
public:
    DataMatrix(Matrix values, std::vector<std::string> names)
        : values_(std::move(values)), names_(std::move(names)) {
        if (values_.rows() < 2 || values_.cols() < 2) {
            throw Error(ErrorKind::EmptyData, "data matrix needs n >= 2 samples and p >= 2 variables, got " +
                                                  std::to_string(values_.rows()) + "x" +
                                                  std::to_string(values_.cols()));
        }
        if (static_cast<Eigen::Index>(names_.size()) != values_.cols()) {
            throw Error(ErrorKind::Param, "expected " + std::to_string(values_.cols()) + " variable names, got " +
                                              std::to_string(names_.size()));
        }
        if (!values_.allFinite()) {
            throw Error(ErrorKind::Parse, "data matrix contains NaN or Inf");
        }
        std::unordered_set<std::string> seen;
        for (const auto& name : names_) {
            if (!seen.insert(name).second) {
                throw Error(ErrorKind::Param, "duplicate variable name '" + name + "'");
            }
        }
    }

    /// Names default to V0..V{p-1}.
    explicit DataMatrix(Matrix values) : DataMatrix(values, default_names(values.cols())) {}

    const Matrix& values() const noexcept { return values_; }
    const std::vector<std::string>& names() const noexcept { return names_; }
    std::size_t n() const noexcept { return static_cast<std::size_t>(values_.rows()); }
    std::size_t p() const noexcept { return static_cast<std::size_t>(values_.cols()); }

    static std::vector<std::string> default_names(Eigen::Index p) {
        std::vector<std::string> out;
        out.reserve(static_cast<std::size_t>(p));
        for (Eigen::Index j = 0; j < p; ++j) out.push_back("V" + std::to_string(j));
        return out;
    }

private:
    Matrix values_;
    std::vector<std::string> names_;
};

struct Pair {
    std::size_t from;
    std::size_t to;
    friend bool operator==(const Pair&, const Pair&) = default;
};

inline std::size_t pair_count(std::size_t p) noexcept { return p * (p - 1); }

/// Row-major over ordered pairs with the diagonal skipped:
/// k(i,j) = i(p-1) + j - [j > i].
inline std::size_t pair_index(std::size_t i, std::size_t j, std::size_t p) {
    if (i >= p || j >= p) {
        throw Error(ErrorKind::Index, "pair (" + std::to_string(i) + "," + std::to_string(j) +
                                          ") out of range for p=" + std::to_string(p));
    }
    if (i == j) {
        throw Error(ErrorKind::Index, "diagonal pair (" + std::to_string(i) + "," + std::to_string(i) + ")");
    }
    return i * (p - 1) + j - (j > i ? 1 : 0);
}

inline Pair pair_unindex(std::size_t k, std::size_t p) {
    if (p < 2 || k >= pair_count(p)) {
        throw Error(ErrorKind::Index, "pair index " + std::to_string(k) + " out of range for p=" + std::to_string(p));
    }
    const std::size_t i = k / (p - 1);
    const std::size_t r = k % (p - 1);
    return {i, r >= i ? r + 1 : r};
}

/// Bijection between ordered pairs and 0..m-1 for a fixed variable count.
class PairIndex {
public:
    explicit PairIndex(std::size_t p) : p_(p) {
        if (p < 2) throw Error(ErrorKind::Param, "pair index needs p >= 2");
    }
    std::size_t p() const noexcept { return p_; }
    std::size_t m() const noexcept { return pair_count(p_); }
    std::size_t index(std::size_t i, std::size_t j) const { return pair_index(i, j, p_); }
    Pair pair(std::size_t k) const { return pair_unindex(k, p_); }

private:
    std::size_t p_;
};

/// p x p binary matrix with a zero diagonal.
class AdjacencyMatrix {
public:
    explicit AdjacencyMatrix(std::size_t p) : p_(p), entries_(p * p, 0) {}

    std::size_t p() const noexcept { return p_; }

    bool operator()(std::size_t i, std::size_t j) const { return entries_.at(i * p_ + j) != 0; }

    void set(std::size_t i, std::size_t j, bool value) {
        if (i >= p_ || j >= p_) throw Error(ErrorKind::Index, "adjacency entry out of range");
        if (i == j) {
            if (value) throw Error(ErrorKind::Index, "adjacency diagonal is fixed to 0");
            return;
        }
        entries_[i * p_ + j] = value ? 1 : 0;
    }

    std::size_t edge_count() const noexcept {
        return static_cast<std::size_t>(std::count(entries_.begin(), entries_.end(), std::uint8_t{1}));
    }

    friend bool operator==(const AdjacencyMatrix&, const AdjacencyMatrix&) = default;

private:
    std::size_t p_;
    std::vector<std::uint8_t> entries_;
};

enum class LabelState : std::uint8_t { NonCausal = 0, Causal = 1, Unlabelled = 2 };

/// Label state of every ordered pair; partitions the pair set into L and U.
class LabelAssignment {
public:
    LabelAssignment(std::vector<LabelState> states, std::size_t p) : p_(p), states_(std::move(states)) {
        if (states_.size() != pair_count(p_)) {
            throw Error(ErrorKind::Param, "label vector has length " + std::to_string(states_.size()) +
                                              ", expected m=" + std::to_string(pair_count(p_)));
        }
        for (std::size_t k = 0; k < states_.size(); ++k) {
            (states_[k] == LabelState::Unlabelled ? unlabelled_ : labelled_).push_back(k);
        }
    }

    static LabelAssignment all_unlabelled(std::size_t p) {
        return {std::vector<LabelState>(pair_count(p), LabelState::Unlabelled), p};
    }

    std::size_t p() const noexcept { return p_; }
    std::size_t m() const noexcept { return states_.size(); }
    std::size_t m_labelled() const noexcept { return labelled_.size(); }
    std::size_t m_unlabelled() const noexcept { return unlabelled_.size(); }
    LabelState operator[](std::size_t k) const { return states_.at(k); }
    bool is_labelled(std::size_t k) const { return states_.at(k) != LabelState::Unlabelled; }
    std::span<const LabelState> states() const noexcept { return states_; }
    std::span<const std::size_t> labelled() const noexcept { return labelled_; }
    std::span<const std::size_t> unlabelled() const noexcept { return unlabelled_; }

    /// Same partition with Causal and NonCausal exchanged.
    LabelAssignment swapped() const {
        std::vector<LabelState> out(states_);
        for (auto& s : out) {
            if (s == LabelState::Causal) s = LabelState::NonCausal;
            else if (s == LabelState::NonCausal) s = LabelState::Causal;
        }
        return {std::move(out), p_};
    }

    friend bool operator==(const LabelAssignment& a, const LabelAssignment& b) {
        return a.p_ == b.p_ && a.states_ == b.states_;
    }

private:
    std::size_t p_;
    std::vector<LabelState> states_;
    std::vector<std::size_t> labelled_;
    std::vector<std::size_t> unlabelled_;
};

/// Observed pairs take their state from A, all others stay Unlabelled.
inline LabelAssignment labels_from_adjacency(const AdjacencyMatrix& adjacency, std::span<const Pair> observed) {
    const std::size_t p = adjacency.p();
    std::vector<LabelState> states(pair_count(p), LabelState::Unlabelled);
    for (const auto& pr : observed) {
        states[pair_index(pr.from, pr.to, p)] = adjacency(pr.from, pr.to) ? LabelState::Causal : LabelState::NonCausal;
    }
    return {std::move(states), p};
}

/// Every ordered pair, in canonical order.
inline std::vector<Pair> all_pairs(std::size_t p) {
    std::vector<Pair> out;
    out.reserve(pair_count(p));
    for (std::size_t k = 0; k < pair_count(p); ++k) out.push_back(pair_unindex(k, p));
    return out;
}

inline LabelAssignment labels_from_adjacency(const AdjacencyMatrix& adjacency) {
    const auto pairs = all_pairs(adjacency.p());
    return labels_from_adjacency(adjacency, pairs);
}

inline AdjacencyMatrix graph_from_labels(std::span<const LabelState> labels, std::size_t p) {
    if (labels.size() != pair_count(p)) {
        throw Error(ErrorKind::Param, "label vector length does not match p=" + std::to_string(p));
    }
    AdjacencyMatrix out(p);
    for (std::size_t k = 0; k < labels.size(); ++k) {
        if (labels[k] == LabelState::Unlabelled) {
            throw Error(ErrorKind::IncompleteLabels, "pair " + std::to_string(k) + " is unlabelled");
        }
        const auto [i, j] = pair_unindex(k, p);
        out.set(i, j, labels[k] == LabelState::Causal);
    }
    return out;
}

/// Prediction vector (1 = causal) to adjacency.
inline AdjacencyMatrix graph_from_predictions(std::span<const int> predictions, std::size_t p) {
    std::vector<LabelState> states(predictions.size());
    std::transform(predictions.begin(), predictions.end(), states.begin(),
                   [](int v) { return v != 0 ? LabelState::Causal : LabelState::NonCausal; });
    return graph_from_labels(states, p);
}

}  // namespace sscd
