#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "mtjrng/metrics.hpp"

namespace mtjrng {

// One evaluated configuration, as logged by the optimizers.
struct ArchiveRecord {
    std::uint64_t eval_index = 0;
    int generation = -1; // NSGA-II generation or environment step; -1 if n/a
    std::string source;  // "nsga2", "env", "cem", ...
    std::vector<double> genome;
    bool valid = false;
    ObjectivePair objectives = invalid_objectives();
    double score = k_invalid_objective;
    std::string reason; // failure description for invalid evaluations
};

// Append-only log of every evaluation in a run, with JSONL persistence.
class RunArchive {
  public:
    void append(ArchiveRecord rec) { records_.push_back(std::move(rec)); }
    const std::vector<ArchiveRecord>& records() const { return records_; }
    std::size_t size() const { return records_.size(); }
    bool empty() const { return records_.empty(); }

    void save_jsonl(const std::string& path) const;
    static RunArchive load_jsonl(const std::string& path);

  private:
    std::vector<ArchiveRecord> records_;
};

// Indices of valid records not dominated by any other valid record.
// Invalid (sentinel) records never appear. Throws EmptyArchive when the
// archive holds no records.
std::vector<std::size_t> pareto_front(const RunArchive& ar);

// Indices of the best valid records by score, ascending; may return fewer
// than k. Throws EmptyArchive when the archive holds no records.
std::vector<std::size_t> top_k(const RunArchive& ar, std::size_t k);

// Per-gene visit histogram: hist[g][b] counts genomes whose g-th component
// lies in bin b of [0, 1]. Throws EmptyArchive when the archive is empty.
std::vector<std::vector<std::uint64_t>> exploration_hist(const RunArchive& ar, int bins);

// Flat CSV: eval_index, generation, source, genes, validity, objectives, score.
void archive_to_csv(const RunArchive& ar, const std::string& path);

} // namespace mtjrng
