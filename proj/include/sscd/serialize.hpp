#pragma once

// JSON forms of fit results, score tables, SEM specs and gold standards.

#include "sscd/baselines.hpp"
#include "sscd/benchgen.hpp"
#include "sscd/error.hpp"
#include "sscd/histfeat.hpp"
#include "sscd/io.hpp"
#include "sscd/laprls.hpp"
#include "sscd/pairmetric.hpp"
#include "sscd/pairspace.hpp"

#include <nlohmann/json.hpp>

#include <filesystem>
#include <string>
#include <vector>

namespace sscd {

using Json = nlohmann::ordered_json;

/// Per-pair {from, to, score, prediction, was_labelled}.
inline Json to_json(const FitResult& fitted, const LabelAssignment& labels, const std::vector<std::string>& names) {
    if (static_cast<std::size_t>(fitted.scores.size()) != labels.m() || labels.p() != names.size()) {
        throw Error(ErrorKind::Param, "fit result, labels and names disagree in size");
    }
    Json j;
    j["method"] = "sscd";
    j["lambda"] = fitted.lambda;
    j["sigma"] = fitted.sigma;
    j["pairs"] = Json::array();
    for (std::size_t k = 0; k < labels.m(); ++k) {
        const auto [i, jj] = pair_unindex(k, labels.p());
        j["pairs"].push_back({{"from", names[i]},
                              {"to", names[jj]},
                              {"score", fitted.scores[static_cast<Eigen::Index>(k)]},
                              {"prediction", fitted.predictions[k]},
                              {"was_labelled", labels.is_labelled(k)}});
    }
    return j;
}

/// Same layout as a fit result; baselines carry no threshold so `prediction`
/// is null, and nothing was labelled.
inline Json to_json(const ScoreTable& table, const std::vector<std::string>& names) {
    const std::size_t p = names.size();
    if (static_cast<std::size_t>(table.scores.size()) != pair_count(p)) {
        throw Error(ErrorKind::Param, "score table and names disagree in size");
    }
    Json j;
    j["method"] = table.method;
    j["use_absolute"] = table.use_absolute;
    j["pairs"] = Json::array();
    for (std::size_t k = 0; k < pair_count(p); ++k) {
        const auto [i, jj] = pair_unindex(k, p);
        j["pairs"].push_back({{"from", names[i]},
                              {"to", names[jj]},
                              {"score", table.scores[static_cast<Eigen::Index>(k)]},
                              {"prediction", nullptr},
                              {"was_labelled", false}});
    }
    return j;
}

inline Json to_json(const SemSpec& spec) {
    Json j;
    j["p"] = spec.p;
    j["noise_sd"] = spec.noise_sd;
    j["seed"] = spec.seed;
    j["edges"] = Json::array();
    for (const auto& e : spec.edges) j["edges"].push_back({{"from", e.from}, {"to", e.to}, {"weight", e.weight}});
    return j;
}

inline SemSpec sem_from_json(const nlohmann::json& j) {
    try {
        SemSpec spec;
        spec.p = j.at("p").get<std::size_t>();
        spec.noise_sd = j.at("noise_sd").get<double>();
        spec.seed = j.value("seed", std::uint64_t{0});
        for (const auto& e : j.at("edges")) {
            spec.edges.push_back({e.at("from").get<std::size_t>(), e.at("to").get<std::size_t>(), e.at("weight").get<double>()});
        }
        validate(spec);
        return spec;
    } catch (const nlohmann::json::exception& e) {
        throw Error(ErrorKind::Parse, std::string("SEM spec: ") + e.what());
    }
}

/// Gold standards list their causal pairs by name.
inline Json to_json(const GoldStandard& gold, const std::vector<std::string>& names) {
    if (gold.adjacency.p() != names.size()) throw Error(ErrorKind::Param, "gold standard and names disagree in size");
    Json j;
    j["provenance"] = gold.provenance == GoldProvenance::ZScore ? "zscore" : "reachability";
    j["tau"] = std::isfinite(gold.tau) ? Json(gold.tau) : Json(nullptr);
    j["variables"] = names;
    j["edges"] = Json::array();
    for (std::size_t i = 0; i < names.size(); ++i)
        for (std::size_t k = 0; k < names.size(); ++k)
            if (gold.adjacency(i, k)) j["edges"].push_back({names[i], names[k]});
    j["excluded"] = Json::array();
    for (const auto v : gold.excluded) j["excluded"].push_back(names[v]);
    return j;
}

/// Reads a gold standard and maps it onto `names` (the data's column order).
inline GoldStandard gold_from_json(const nlohmann::json& j, const std::vector<std::string>& names) {
    try {
        std::unordered_map<std::string, std::size_t> lookup;
        for (std::size_t v = 0; v < names.size(); ++v) lookup.emplace(names[v], v);
        auto resolve = [&](const std::string& name) {
            const auto it = lookup.find(name);
            if (it == lookup.end()) throw Error(ErrorKind::Parse, "gold standard names unknown variable '" + name + "'");
            return it->second;
        };
        GoldStandard gold{AdjacencyMatrix(names.size()), std::numeric_limits<double>::infinity(),
                          GoldProvenance::Reachability, {}};
        if (j.value("provenance", std::string("reachability")) == "zscore") gold.provenance = GoldProvenance::ZScore;
        if (j.contains("tau") && j["tau"].is_number()) gold.tau = j["tau"].get<double>();
        for (const auto& e : j.at("edges")) {
            gold.adjacency.set(resolve(e.at(0).get<std::string>()), resolve(e.at(1).get<std::string>()), true);
        }
        if (j.contains("excluded"))
            for (const auto& v : j["excluded"]) gold.excluded.push_back(resolve(v.get<std::string>()));
        return gold;
    } catch (const nlohmann::json::exception& e) {
        throw Error(ErrorKind::Parse, std::string("gold standard: ") + e.what());
    }
}

inline nlohmann::json read_json_file(const std::filesystem::path& path) {
    auto in = io::detail::open_in(path);
    try {
        return nlohmann::json::parse(in);
    } catch (const nlohmann::json::exception& e) {
        throw Error(ErrorKind::Parse, path.string() + ": " + e.what());
    }
}

inline void write_json_file(const std::filesystem::path& path, const Json& j) {
    auto out = io::detail::open_out(path);
    out << j.dump(2) << '\n';
    if (!out) throw Error(ErrorKind::Io, "short write to '" + path.string() + "'");
}

/// Sidecar metadata for exported feature matrices.
inline Json feature_metadata(const PairFeatureMatrix& f) {
    Json j;
    j["kind"] = std::string(to_string(f.kind));
    j["p"] = f.p;
    j["m"] = f.m();
    j["d"] = f.d();
    j["h"] = f.grid.bin_width;
    j["domain"] = {f.grid.lower, f.grid.upper};
    j["bins"] = f.grid.bins;
    return j;
}

}  // namespace sscd
