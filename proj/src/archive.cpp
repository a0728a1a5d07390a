#include "mtjrng/archive.hpp"

#include <algorithm>
#include <fstream>
#include <numeric>

#include <json.hpp>

#include "mtjrng/csv.hpp"
#include "mtjrng/errors.hpp"

namespace mtjrng {

using nlohmann::json;

void RunArchive::save_jsonl(const std::string& path) const {
    std::ofstream out(path);
    if (!out) throw ConfigError("cannot open archive file for writing: " + path);
    for (const ArchiveRecord& r : records_) {
        json j{{"eval_index", r.eval_index}, {"generation", r.generation},
               {"source", r.source},         {"genome", r.genome},
               {"valid", r.valid},           {"energy", r.objectives.energy},
               {"kl", r.objectives.kl},      {"score", r.score},
               {"reason", r.reason}};
        out << j.dump() << '\n';
    }
    if (!out) throw ConfigError("failed writing archive file: " + path);
}

RunArchive RunArchive::load_jsonl(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open archive file: " + path);
    RunArchive ar;
    std::string line;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        json j = json::parse(line); // malformed lines throw via nlohmann
        ArchiveRecord r;
        r.eval_index = j.at("eval_index").get<std::uint64_t>();
        r.generation = j.at("generation").get<int>();
        r.source = j.at("source").get<std::string>();
        r.genome = j.at("genome").get<std::vector<double>>();
        r.valid = j.at("valid").get<bool>();
        r.objectives.energy = j.at("energy").get<double>();
        r.objectives.kl = j.at("kl").get<double>();
        r.score = j.at("score").get<double>();
        r.reason = j.value("reason", std::string{});
        ar.append(std::move(r));
    }
    return ar;
}

std::vector<std::size_t> pareto_front(const RunArchive& ar) {
    if (ar.empty()) throw EmptyArchive("pareto front of an empty archive");
    const auto& recs = ar.records();
    std::vector<std::size_t> valid;
    for (std::size_t i = 0; i < recs.size(); ++i)
        if (recs[i].valid) valid.push_back(i);
    std::vector<std::size_t> front;
    for (std::size_t i : valid) {
        bool dominated = false;
        for (std::size_t j : valid) {
            if (i != j && dominates(recs[j].objectives, recs[i].objectives)) {
                dominated = true;
                break;
            }
        }
        if (!dominated) front.push_back(i);
    }
    return front;
}

std::vector<std::size_t> top_k(const RunArchive& ar, std::size_t k) {
    if (ar.empty()) throw EmptyArchive("top-k of an empty archive");
    const auto& recs = ar.records();
    std::vector<std::size_t> valid;
    for (std::size_t i = 0; i < recs.size(); ++i)
        if (recs[i].valid) valid.push_back(i);
    std::sort(valid.begin(), valid.end(), [&](std::size_t a, std::size_t b) {
        if (recs[a].score != recs[b].score) return recs[a].score < recs[b].score;
        return recs[a].eval_index < recs[b].eval_index; // deterministic ties
    });
    if (valid.size() > k) valid.resize(k);
    return valid;
}

std::vector<std::vector<std::uint64_t>> exploration_hist(const RunArchive& ar, int bins) {
    if (ar.empty()) throw EmptyArchive("exploration histogram of an empty archive");
    if (bins < 1) throw OutOfRange("histogram needs at least one bin");
    std::size_t dim = ar.records().front().genome.size();
    std::vector<std::vector<std::uint64_t>> hist(dim, std::vector<std::uint64_t>(bins, 0));
    for (const ArchiveRecord& r : ar.records()) {
        if (r.genome.size() != dim)
            throw OutOfRange("mixed genome dimensions in archive");
        for (std::size_t g = 0; g < dim; ++g) {
            double x = std::clamp(r.genome[g], 0.0, 1.0);
            int b = std::min(static_cast<int>(x * bins), bins - 1);
            ++hist[g][static_cast<std::size_t>(b)];
        }
    }
    return hist;
}

void archive_to_csv(const RunArchive& ar, const std::string& path) {
    std::size_t dim = ar.empty() ? 0 : ar.records().front().genome.size();
    std::vector<std::string> header{"eval_index", "generation", "source"};
    for (std::size_t g = 0; g < dim; ++g) header.push_back("gene_" + std::to_string(g));
    for (const char* c : {"valid", "energy_j", "kl", "score", "reason"})
        header.push_back(c);
    CsvWriter csv(path, header);
    for (const ArchiveRecord& r : ar.records()) {
        if (r.genome.size() != dim)
            throw OutOfRange("mixed genome dimensions in archive");
        std::vector<std::string> cells{std::to_string(r.eval_index),
                                       std::to_string(r.generation), r.source};
        for (double g : r.genome) cells.push_back(fmt_double(g));
        cells.push_back(r.valid ? "1" : "0");
        cells.push_back(fmt_double(r.objectives.energy));
        cells.push_back(fmt_double(r.objectives.kl));
        cells.push_back(fmt_double(r.score));
        cells.push_back(r.reason);
        csv.row_raw(cells);
    }
}

} // namespace mtjrng
