#pragma once

#include <filesystem>
#include <string>
#include <string_view>
#include <variant>

#include "hilasso/model.hpp"
#include "hilasso/synth.hpp"

namespace hilasso {

/// Every artifact carries {"format_version": 1, "kind": ...}. Matrices are
/// arrays of column arrays; group and active-group indexes are one-based.
/// Unknown versions and mismatched kinds are rejected.
inline constexpr int kFormatVersion = 1;

enum class ArtifactKind { dictionary, problem, ground_truth, report };

std::string_view to_string(ArtifactKind kind);

/// Signals of a coding problem, stored apart from the dictionary.
struct SignalSet {
    Matrix signals;
    std::optional<MaskMatrix> masks;
    double lambda1 = 0.0;
    double lambda2 = 0.0;

    CodingProblem bind(std::shared_ptr<const Dictionary> dictionary) const;
    static SignalSet from(const CodingProblem& problem);

    friend bool operator==(const SignalSet& a, const SignalSet& b);
};

struct StoredReport {
    Model model = Model::lasso;
    SolverReport report;
};

using Artifact = std::variant<Dictionary, SignalSet, GroundTruth, StoredReport>;

ArtifactKind kind_of(const Artifact& artifact);

/// Canonical JSON text (sorted keys, shortest round-trip doubles, trailing newline).
std::string to_json(const Artifact& artifact);
/// Throws SchemaError naming the JSON path of the first offending field.
Artifact from_json(std::string_view text);

/// Reads and parses a file. Throws Error when unreadable, SchemaError when malformed.
Artifact load(const std::filesystem::path& path);
/// Writes to a sibling temporary file and renames it over `path`.
void store(const Artifact& artifact, const std::filesystem::path& path);

Dictionary load_dictionary(const std::filesystem::path& path);
SignalSet load_signals(const std::filesystem::path& path);
GroundTruth load_ground_truth(const std::filesystem::path& path);
StoredReport load_report(const std::filesystem::path& path);

/// SynthSpec JSON: {"num_groups", "atoms_per_group", "signal_dim", "k",
/// "num_active_groups", "n", "sigma", "missing_fraction", "seed"}; missing
/// fields take the SynthSpec defaults. Runs SynthSpec::validate().
SynthSpec parse_synth_spec(std::string_view text);
std::string synth_spec_to_json(const SynthSpec& spec);

/// Whole-file read; throws Error when the file cannot be opened.
std::string read_text_file(const std::filesystem::path& path);
/// Temp file + rename.
void write_text_file_atomic(const std::filesystem::path& path, std::string_view contents);

} // namespace hilasso
