#pragma once

#include <filesystem>
#include <istream>
#include <ostream>
#include <string>
#include <vector>

#include "owb/core_model.hpp"

namespace owb::cli {

/// String ids in dense-index order (first appearance in the file).
struct IdTables {
    std::vector<std::string> personas;
    std::vector<std::string> petals;
    std::vector<std::string> clusters;
};

struct IngestedPanel {
    VoteTensor tensor;
    ClusterMap clusters;
    IdTables ids;
};

/// Long-format votes CSV with a mandatory header naming the columns
/// persona_id, cluster_id, round, petal_id, value (any order). An empty,
/// NaN or infinite value is a missing cell; (persona, round, petal) pairs
/// without a record are missing too. n_p is the largest round index + 1.
///
/// Throws ParseError (with line number), duplicate_key, inconsistent_cluster.
IngestedPanel ingest(std::istream& in);
IngestedPanel ingest(const std::filesystem::path& path);

/// Writes every (persona, round, petal) cell, persona-major, with values at
/// 17 significant digits and missing cells as empty fields.
void write_votes(std::ostream& out, const VoteTensor& tensor, const ClusterMap& clusters, const IdTables& ids);

/// Identity tables "p0".."pN-1", "q0".., "c0".. for synthetic panels.
IdTables synthetic_ids(std::size_t n_personas, std::size_t n_petals, std::size_t n_clusters);

/// %.17g rendering.
std::string format_double(double x);

/// Writes to a sibling temporary file and renames it over `path`.
void write_file_atomic(const std::filesystem::path& path, const std::string& content);

}  // namespace owb::cli
