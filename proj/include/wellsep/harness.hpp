#pragma once

#include <cstdint>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "wellsep/assignment.hpp"
#include "wellsep/clique_factor.hpp"
#include "wellsep/embedder.hpp"
#include "wellsep/graph.hpp"
#include "wellsep/regularity.hpp"
#include "wellsep/rng.hpp"
#include "wellsep/separability.hpp"

namespace wellsep {

using json = nlohmann::json;

// ---------------------------------------------------------------- hosts

enum class HostPattern { complete, random_min_degree };

struct HostSpec {
    std::size_t clusters = 6;      // l
    std::size_t cluster_size = 50; // m
    std::size_t k = 2;
    double eps = 0.02;
    double d = 0.25;
    double gamma = 0.1;
    HostPattern pattern = HostPattern::complete;
    double pair_density = 0.5;          // floor for clique-pair density
    double exceptional_fraction = 0.01; // share of each cluster rewired into V0
    std::uint64_t seed = 0;
};

struct PlantedHost {
    std::shared_ptr<const Graph> graph;
    Graph pattern;                 // reduced pattern on l clusters
    VertexSet exceptional;
    std::vector<VertexSet> clusters;
    CliqueFactor factor;           // planted cover of the pattern
    double pair_density = 0.0;     // density actually used for pattern pairs
    double exceptional_density = 0.0;
    double required_min_degree = 0.0;  // (1 - 1/(2(k-1)) + gamma) n
    std::size_t min_degree = 0;
    std::size_t attempts = 0;
};

/// Blow-up of a reduced pattern with random pairs, complete clusters and a
/// rewired exceptional set. Pair density is raised from pair_density until the
/// minimum degree bound is met with margin; PreconditionError when even
/// density 1 cannot meet it. The bound is re-checked by a scan.
PlantedHost generate_host(const HostSpec& spec, Rng& rng);

double host_degree_requirement(std::size_t k, double gamma, std::size_t n);

// ---------------------------------------------------------------- H families

enum class HFamily { grid, forest, component_union, path_power, matchings_union };

std::string to_string(HFamily f);
HFamily parse_family(const std::string& s);

struct SubgraphSpec {
    HFamily family = HFamily::grid;
    std::size_t n = 100;
    std::size_t max_degree = 4;
    // grid
    std::size_t rows = 0;        // 0: pick the most square factorisation of n
    std::size_t bands = 2;       // separator rows cut the grid into this many bands
    // forest and component-union
    std::size_t component_size = 20;
    std::string shape = "path";  // path | cycle | triangle | star
    bool linked = false;         // chain components through separator vertices
    // path power
    std::size_t power = 1;
    double dropout = 0.0;
    bool relabel = true;
    // matchings union
    std::size_t matchings = 5;
    std::uint64_t seed = 0;
};

struct GeneratedH {
    Graph graph;
    std::optional<Separation> separation;
    std::optional<BandwidthOrdering> ordering;
};

/// Generates H and re-verifies its degree cap and separability witness.
GeneratedH generate_h(const SubgraphSpec& spec, Rng& rng);

// ---------------------------------------------------------------- pipeline

struct PipelineParams {
    Parameters core;
    double eps_regularity = 0.35;  // tolerance for irregularity witnesses
    std::size_t heuristic_trials = 32;
    double alpha = 0.25;           // separator search target when no witness is given
    std::size_t max_degree = 0;    // 0: no cap on Delta(H)
    EdgeRule rule = EdgeRule::not_refuted;
    std::size_t distribute_retries = 20;
    EmbedOptions embed;
};

struct StageOutcome {
    std::string stage;
    bool ok = false;
    std::string error_kind;
    std::string message;
    double millis = 0.0;
    json detail = json::object();
};

struct ExperimentRecord {
    std::uint64_t seed = 0;
    json specs = json::object();
    std::vector<StageOutcome> stages;
    bool success = false;
    std::string failed_stage;
    std::optional<std::vector<Vertex>> phi;
    std::vector<std::string> warnings;

    const StageOutcome* stage(const std::string& name) const;
    /// Outcome fields only (no timings); equal across replays.
    json replay_key() const;
};

/// Supplied partition of V(G) into V0 and equal clusters.
struct PartitionInput {
    VertexSet exceptional;
    std::vector<VertexSet> clusters;
};

/// Every vertex its own cluster.
PartitionInput singleton_partition(std::size_t n);

/// Splits every cluster at random into `parts` equal pieces; the remainder of
/// each cluster joins V0.
PartitionInput refine_partition(const PartitionInput& p, std::size_t parts, Rng& rng);

/// Smallest split count r such that l r is a multiple of k and the factor has
/// at least two cliques; 1 when l already gives floor(l/k) >= 2.
std::size_t auto_refinement(std::size_t l, std::size_t k);

/// Full run: coloring, separate, decompose, factor, super-regularize,
/// distribute, map, reassign, balance, restrict, embed, verify. Stage errors
/// are caught and tagged; the record is always returned. Throws ArgumentError
/// only when |V(H)| != |V(G)|.
ExperimentRecord run_pipeline(const Graph& h, std::shared_ptr<const Graph> g,
                              const PartitionInput& partition, const PipelineParams& params,
                              std::uint64_t seed,
                              const std::optional<Separation>& witness = std::nullopt);

// ---------------------------------------------------------------- experiments

struct ExperimentCell {
    std::string name;
    HostSpec host;
    SubgraphSpec h;
    PipelineParams params;
    std::size_t trials = 1;
    bool use_witness = true;
    /// Planted clusters are split into this many parts before the pipeline
    /// runs; 0 picks auto_refinement(l, k).
    std::size_t refine = 0;
};

struct CellSummary {
    std::string name;
    std::size_t trials = 0;
    std::size_t successes = 0;
    double success_rate = 0.0;
    json stage_failures = json::object();
    double p50_ms = 0.0, p90_ms = 0.0, max_ms = 0.0;
};

struct ExperimentSummary {
    std::vector<CellSummary> cells;
    std::vector<ExperimentRecord> records;
};

/// The graphs of one trial, regenerated from the cell and the trial seed.
struct CellInstance {
    HostSpec host_spec;
    SubgraphSpec h_spec;
    PlantedHost host;
    GeneratedH h;
    PartitionInput partition;  // planted partition after refinement
    std::size_t refinement = 1;
};

/// Throws whatever the generators throw.
CellInstance make_cell_instance(const ExperimentCell& cell, std::uint64_t seed);

/// One planted trial of a cell: host and H from streams derived from seed.
ExperimentRecord run_cell_trial(const ExperimentCell& cell, std::uint64_t seed);

/// Runs every cell; when out_dir is nonempty, writes records.jsonl,
/// summary.json and summary.csv there (Error with the path on I/O failure).
ExperimentSummary run_experiment(const std::vector<ExperimentCell>& cells, std::uint64_t seed,
                                 const std::string& out_dir);

/// Fixed CSV header of summary.csv.
std::string summary_csv_header();

// ---------------------------------------------------------------- JSON

json to_json(const Separation& s);
Separation separation_from_json(const Graph& h, const json& j);
json to_json(const CliqueFactor& f);
json to_json(const PairCertificate& c);
json to_json(const ExperimentRecord& r);
json to_json(const CellSummary& c);

HostSpec host_spec_from_json(const json& j, HostSpec base = {});
SubgraphSpec subgraph_spec_from_json(const json& j, SubgraphSpec base = {});
PipelineParams pipeline_params_from_json(const json& j, PipelineParams base = {});
json to_json(const HostSpec& s);
json to_json(const SubgraphSpec& s);
json to_json(const PipelineParams& p);
ExperimentCell cell_from_json(const json& j);

}  // namespace wellsep
