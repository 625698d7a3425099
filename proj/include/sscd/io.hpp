#pragma once

// File formats: data CSV (header of variable names, one sample per row),
// label CSV (from,to,label), and raw little-endian float64 matrices with a
// JSON sidecar.

#include "sscd/error.hpp"
#include "sscd/pairspace.hpp"

#include <nlohmann/json.hpp>

#include <array>
#include <bit>
#include <charconv>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <istream>
#include <map>
#include <ostream>
#include <sstream>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

namespace sscd::io {

namespace detail {

inline std::vector<std::string_view> split(std::string_view line, char delim = ',') {
    std::vector<std::string_view> out;
    std::size_t start = 0;
    while (true) {
        const auto pos = line.find(delim, start);
        if (pos == std::string_view::npos) {
            out.push_back(line.substr(start));
            break;
        }
        out.push_back(line.substr(start, pos - start));
        start = pos + 1;
    }
    return out;
}

inline std::string_view trim(std::string_view s) {
    while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
    while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) s.remove_suffix(1);
    return s;
}

inline double parse_double(std::string_view token, std::size_t line_no) {
    token = trim(token);
    if (!token.empty() && token.front() == '+') token.remove_prefix(1);
    double value = 0.0;
    const auto [ptr, ec] = std::from_chars(token.data(), token.data() + token.size(), value);
    if (ec != std::errc{} || ptr != token.data() + token.size()) {
        throw Error(ErrorKind::Parse, "line " + std::to_string(line_no) + ": cannot parse '" + std::string(token) +
                                          "' as a number");
    }
    if (!std::isfinite(value)) {
        throw Error(ErrorKind::Parse, "line " + std::to_string(line_no) + ": non-finite value '" +
                                          std::string(token) + "'");
    }
    return value;
}

inline std::ifstream open_in(const std::filesystem::path& path, std::ios::openmode mode = std::ios::in) {
    std::ifstream in(path, mode);
    if (!in) throw Error(ErrorKind::Io, "cannot open '" + path.string() + "' for reading");
    return in;
}

inline std::ofstream open_out(const std::filesystem::path& path, std::ios::openmode mode = std::ios::out) {
    std::ofstream out(path, mode);
    if (!out) throw Error(ErrorKind::Io, "cannot open '" + path.string() + "' for writing");
    return out;
}

}  // namespace detail

/// Shortest representation that parses back to the same double.
inline std::string format_double(double v) {
    std::array<char, 32> buf{};
    const auto [ptr, ec] = std::to_chars(buf.data(), buf.data() + buf.size(), v);
    return std::string(buf.data(), ptr);
}

inline DataMatrix read_data_csv(std::istream& in) {
    std::string line;
    if (!std::getline(in, line)) throw Error(ErrorKind::Parse, "empty CSV input");
    std::vector<std::string> names;
    for (auto tok : detail::split(line)) names.emplace_back(detail::trim(tok));
    const std::size_t p = names.size();

    std::vector<double> flat;
    std::size_t line_no = 1;
    std::size_t n = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (detail::trim(line).empty()) continue;
        const auto tokens = detail::split(line);
        if (tokens.size() != p) {
            throw Error(ErrorKind::Parse, "line " + std::to_string(line_no) + ": expected " + std::to_string(p) +
                                              " fields, got " + std::to_string(tokens.size()));
        }
        for (auto tok : tokens) flat.push_back(detail::parse_double(tok, line_no));
        ++n;
    }
    Matrix values(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(p));
    for (std::size_t r = 0; r < n; ++r)
        for (std::size_t c = 0; c < p; ++c)
            values(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c)) = flat[r * p + c];
    return DataMatrix(std::move(values), std::move(names));
}

inline DataMatrix read_data_csv(const std::filesystem::path& path) {
    auto in = detail::open_in(path);
    try {
        return read_data_csv(in);
    } catch (const Error& e) {
        throw Error(e.kind(), path.string() + ": " + e.what());
    }
}

inline void write_data_csv(std::ostream& out, const DataMatrix& data) {
    const auto& names = data.names();
    for (std::size_t j = 0; j < names.size(); ++j) out << (j ? "," : "") << names[j];
    out << '\n';
    const auto& v = data.values();
    for (Eigen::Index r = 0; r < v.rows(); ++r) {
        for (Eigen::Index c = 0; c < v.cols(); ++c) out << (c ? "," : "") << format_double(v(r, c));
        out << '\n';
    }
}

inline void write_data_csv(const std::filesystem::path& path, const DataMatrix& data) {
    auto out = detail::open_out(path);
    write_data_csv(out, data);
}

/// Label file rows are `from,to,label` with label in {0,1}; a header row
/// naming those columns is optional. Pairs not listed are Unlabelled.
inline LabelAssignment read_label_csv(std::istream& in, const std::vector<std::string>& names) {
    std::unordered_map<std::string, std::size_t> lookup;
    for (std::size_t j = 0; j < names.size(); ++j) lookup.emplace(names[j], j);
    const std::size_t p = names.size();
    std::vector<LabelState> states(pair_count(p), LabelState::Unlabelled);

    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (detail::trim(line).empty()) continue;
        const auto tokens = detail::split(line);
        if (tokens.size() != 3) {
            throw Error(ErrorKind::Parse, "label line " + std::to_string(line_no) + ": expected from,to,label");
        }
        const std::string from(detail::trim(tokens[0]));
        const std::string to(detail::trim(tokens[1]));
        const std::string label(detail::trim(tokens[2]));
        if (line_no == 1 && from == "from" && to == "to" && label == "label") continue;
        const auto fi = lookup.find(from);
        const auto ti = lookup.find(to);
        if (fi == lookup.end() || ti == lookup.end()) {
            throw Error(ErrorKind::Parse, "label line " + std::to_string(line_no) + ": unknown variable '" +
                                              (fi == lookup.end() ? from : to) + "'");
        }
        if (label != "0" && label != "1") {
            throw Error(ErrorKind::Parse, "label line " + std::to_string(line_no) + ": label must be 0 or 1");
        }
        const auto state = label == "1" ? LabelState::Causal : LabelState::NonCausal;
        auto& slot = states[pair_index(fi->second, ti->second, p)];
        if (slot != LabelState::Unlabelled && slot != state) {
            throw Error(ErrorKind::Parse, "label line " + std::to_string(line_no) + ": conflicting label for " +
                                              from + "->" + to);
        }
        slot = state;
    }
    return {std::move(states), p};
}

inline LabelAssignment read_label_csv(const std::filesystem::path& path, const std::vector<std::string>& names) {
    auto in = detail::open_in(path);
    try {
        return read_label_csv(in, names);
    } catch (const Error& e) {
        throw Error(e.kind(), path.string() + ": " + e.what());
    }
}

inline void write_label_csv(std::ostream& out, const LabelAssignment& labels, const std::vector<std::string>& names) {
    out << "from,to,label\n";
    for (const auto k : labels.labelled()) {
        const auto [i, j] = pair_unindex(k, labels.p());
        out << names[i] << ',' << names[j] << ',' << (labels[k] == LabelState::Causal ? 1 : 0) << '\n';
    }
}

inline void write_label_csv(const std::filesystem::path& path, const LabelAssignment& labels,
                            const std::vector<std::string>& names) {
    auto out = detail::open_out(path);
    write_label_csv(out, labels, names);
}

inline std::string pair_name(const std::vector<std::string>& names, std::size_t k) {
    const auto [i, j] = pair_unindex(k, names.size());
    return names[i] + "→" + names[j];
}

/// One row per pair, first column the "from→to" identifier.
inline void write_pair_matrix_csv(std::ostream& out, const Matrix& rows, const std::vector<std::string>& names) {
    out << "pair";
    for (Eigen::Index c = 0; c < rows.cols(); ++c) out << ",f" << c;
    out << '\n';
    for (Eigen::Index r = 0; r < rows.rows(); ++r) {
        out << pair_name(names, static_cast<std::size_t>(r));
        for (Eigen::Index c = 0; c < rows.cols(); ++c) out << ',' << format_double(rows(r, c));
        out << '\n';
    }
}

/// Writes `<stem>.bin` (row-major little-endian float64) and `<stem>.json`
/// holding `rows`, `cols` and any extra metadata.
inline void write_matrix_binary(const std::filesystem::path& stem, const Matrix& mat, nlohmann::json meta = {}) {
    static_assert(std::endian::native == std::endian::little, "binary export assumes a little-endian host");
    auto bin_path = stem;
    bin_path += ".bin";
    auto json_path = stem;
    json_path += ".json";
    {
        auto out = detail::open_out(bin_path, std::ios::binary);
        const Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor> row_major = mat;
        out.write(reinterpret_cast<const char*>(row_major.data()),
                  static_cast<std::streamsize>(row_major.size() * sizeof(double)));
        if (!out) throw Error(ErrorKind::Io, "short write to '" + bin_path.string() + "'");
    }
    if (meta.is_null()) meta = nlohmann::json::object();
    meta["rows"] = mat.rows();
    meta["cols"] = mat.cols();
    meta["dtype"] = "float64";
    meta["order"] = "row-major";
    meta["data"] = bin_path.filename().string();
    auto out = detail::open_out(json_path);
    out << meta.dump(2) << '\n';
}

struct BinaryMatrix {
    Matrix values;
    nlohmann::json meta;
};

inline BinaryMatrix read_matrix_binary(const std::filesystem::path& stem) {
    auto json_path = stem;
    json_path += ".json";
    auto bin_path = stem;
    bin_path += ".bin";
    nlohmann::json meta;
    {
        auto in = detail::open_in(json_path);
        try {
            in >> meta;
        } catch (const nlohmann::json::exception& e) {
            throw Error(ErrorKind::Parse, json_path.string() + ": " + e.what());
        }
    }
    const auto rows = meta.at("rows").get<Eigen::Index>();
    const auto cols = meta.at("cols").get<Eigen::Index>();
    Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor> buf(rows, cols);
    auto in = detail::open_in(bin_path, std::ios::binary);
    in.read(reinterpret_cast<char*>(buf.data()), static_cast<std::streamsize>(buf.size() * sizeof(double)));
    if (in.gcount() != static_cast<std::streamsize>(buf.size() * sizeof(double))) {
        throw Error(ErrorKind::Parse, bin_path.string() + ": file shorter than declared shape");
    }
    return {Matrix(buf), std::move(meta)};
}

}  // namespace sscd::io
