#include "hilasso/io.hpp"

#include <cmath>
#include <fstream>
#include <sstream>

#include <json.hpp>

namespace hilasso {

using nlohmann::json;

namespace {

std::string at(const std::string& path, std::string_view key) {
    return path.empty() ? std::string(key) : path + "." + std::string(key);
}

std::string at(const std::string& path, std::size_t index) { return path + "[" + std::to_string(index) + "]"; }

const json& field(const json& obj, std::string_view key, const std::string& path) {
    auto it = obj.find(std::string(key));
    if (it == obj.end()) throw SchemaError(at(path, key), "missing required field");
    return *it;
}

double number(const json& v, const std::string& path) {
    if (!v.is_number()) throw SchemaError(path, "expected a number");
    const double d = v.get<double>();
    if (!std::isfinite(d)) throw SchemaError(path, "expected a finite number");
    return d;
}

long long integer(const json& v, const std::string& path) {
    if (!v.is_number_integer()) throw SchemaError(path, "expected an integer");
    return v.get<long long>();
}

bool boolean(const json& v, const std::string& path) {
    if (!v.is_boolean()) throw SchemaError(path, "expected true or false");
    return v.get<bool>();
}

const json& array(const json& v, const std::string& path) {
    if (!v.is_array()) throw SchemaError(path, "expected an array");
    return v;
}

json matrix_json(const Matrix& m) {
    json cols = json::array();
    for (Index j = 0; j < m.cols(); ++j) {
        json col = json::array();
        for (Index i = 0; i < m.rows(); ++i) col.push_back(m(i, j));
        cols.push_back(std::move(col));
    }
    return cols;
}

json mask_json(const MaskMatrix& m) {
    json cols = json::array();
    for (Index j = 0; j < m.cols(); ++j) {
        json col = json::array();
        for (Index i = 0; i < m.rows(); ++i) col.push_back(static_cast<bool>(m(i, j)));
        cols.push_back(std::move(col));
    }
    return cols;
}

// Array of `cols` columns with `rows` entries each. rows < 0 means "take it
// from the first column".
Matrix read_matrix(const json& v, Index rows, Index cols, const std::string& path) {
    const json& arr = array(v, path);
    if (cols >= 0 && static_cast<Index>(arr.size()) != cols)
        throw SchemaError(path, "expected " + std::to_string(cols) + " columns, found " + std::to_string(arr.size()));
    if (rows < 0) rows = arr.empty() ? 0 : static_cast<Index>(array(arr[0], at(path, 0)).size());
    Matrix m(rows, static_cast<Index>(arr.size()));
    for (std::size_t j = 0; j < arr.size(); ++j) {
        const std::string cpath = at(path, j);
        const json& col = array(arr[j], cpath);
        if (static_cast<Index>(col.size()) != rows)
            throw SchemaError(cpath, "expected " + std::to_string(rows) + " entries, found " + std::to_string(col.size()));
        for (std::size_t i = 0; i < col.size(); ++i)
            m(static_cast<Index>(i), static_cast<Index>(j)) = number(col[i], at(cpath, i));
    }
    return m;
}

MaskMatrix read_mask(const json& v, Index rows, Index cols, const std::string& path) {
    const json& arr = array(v, path);
    if (static_cast<Index>(arr.size()) != cols)
        throw SchemaError(path, "expected " + std::to_string(cols) + " columns, found " + std::to_string(arr.size()));
    MaskMatrix m(rows, cols);
    for (std::size_t j = 0; j < arr.size(); ++j) {
        const std::string cpath = at(path, j);
        const json& col = array(arr[j], cpath);
        if (static_cast<Index>(col.size()) != rows)
            throw SchemaError(cpath, "expected " + std::to_string(rows) + " entries, found " + std::to_string(col.size()));
        bool any = false;
        for (std::size_t i = 0; i < col.size(); ++i) {
            const bool observed = boolean(col[i], at(cpath, i));
            m(static_cast<Index>(i), static_cast<Index>(j)) = observed;
            any = any || observed;
        }
        if (!any) throw SchemaError(cpath, "column has no observed entry");
    }
    return m;
}

Index dimension(const json& obj, std::string_view key, const std::string& path) {
    const long long v = integer(field(obj, key, path), at(path, key));
    if (v < 1) throw SchemaError(at(path, key), "must be at least 1");
    return static_cast<Index>(v);
}

json groups_json(const GroupPartition& groups) {
    json out = json::array();
    for (const auto& set : groups.groups()) {
        json g = json::array();
        for (Index i : set) g.push_back(i + 1);
        out.push_back(std::move(g));
    }
    return out;
}

GroupPartition read_groups(const json& v, Index p, const std::string& path) {
    const json& arr = array(v, path);
    std::vector<std::vector<Index>> sets;
    sets.reserve(arr.size());
    for (std::size_t g = 0; g < arr.size(); ++g) {
        const std::string gpath = at(path, g);
        const json& set = array(arr[g], gpath);
        std::vector<Index> indexes;
        indexes.reserve(set.size());
        for (std::size_t k = 0; k < set.size(); ++k) indexes.push_back(static_cast<Index>(integer(set[k], at(gpath, k))) - 1);
        sets.push_back(std::move(indexes));
    }
    GroupPartition groups(std::move(sets));
    if (auto violation = validate_partition(groups, p)) {
        const std::string where = violation->group >= 0 ? at(path, static_cast<std::size_t>(violation->group)) : path;
        // Messages use the one-based indexes of the file.
        PartitionViolation shown = *violation;
        if (shown.atom >= 0) shown.atom += 1;
        throw SchemaError(where, shown.message() + " (one-based atom indexes)");
    }
    return groups;
}

json header(ArtifactKind kind) {
    json j = json::object();
    j["format_version"] = kFormatVersion;
    j["kind"] = std::string(to_string(kind));
    return j;
}

ArtifactKind read_header(const json& root) {
    if (!root.is_object()) throw SchemaError("", "expected a JSON object");
    const long long version = integer(field(root, "format_version", ""), "format_version");
    if (version != kFormatVersion)
        throw SchemaError("format_version", "unsupported format version " + std::to_string(version));
    const json& kind = field(root, "kind", "");
    if (!kind.is_string()) throw SchemaError("kind", "expected a string");
    const auto name = kind.get<std::string>();
    for (ArtifactKind k : {ArtifactKind::dictionary, ArtifactKind::problem, ArtifactKind::ground_truth, ArtifactKind::report})
        if (to_string(k) == name) return k;
    throw SchemaError("kind", "unknown artifact kind '" + name + "'");
}

json dictionary_json(const Dictionary& d) {
    json j = header(ArtifactKind::dictionary);
    j["m"] = d.signal_dim();
    j["p"] = d.atom_count();
    j["normalized"] = d.normalized();
    j["atoms"] = matrix_json(d.atoms());
    j["groups"] = groups_json(d.groups());
    return j;
}

Dictionary dictionary_from(const json& j) {
    const Index m = dimension(j, "m", "");
    const Index p = dimension(j, "p", "");
    Matrix atoms = read_matrix(field(j, "atoms", ""), m, p, "atoms");
    GroupPartition groups = read_groups(field(j, "groups", ""), p, "groups");
    bool normalized = false;
    if (j.contains("normalized")) normalized = boolean(j["normalized"], "normalized");
    try {
        return Dictionary(std::move(atoms), std::move(groups), normalized);
    } catch (const InvalidArgument& e) {
        throw SchemaError("atoms", e.what());
    }
}

json signals_json(const SignalSet& s) {
    json j = header(ArtifactKind::problem);
    j["m"] = s.signals.rows();
    j["n"] = s.signals.cols();
    j["signals"] = matrix_json(s.signals);
    if (s.masks) j["masks"] = mask_json(*s.masks);
    j["lambda1"] = s.lambda1;
    j["lambda2"] = s.lambda2;
    return j;
}

SignalSet signals_from(const json& j) {
    SignalSet s;
    const Index m = dimension(j, "m", "");
    const Index n = dimension(j, "n", "");
    s.signals = read_matrix(field(j, "signals", ""), m, n, "signals");
    if (j.contains("masks") && !j["masks"].is_null()) s.masks = read_mask(j["masks"], m, n, "masks");
    if (j.contains("lambda1")) s.lambda1 = number(j["lambda1"], "lambda1");
    if (j.contains("lambda2")) s.lambda2 = number(j["lambda2"], "lambda2");
    if (s.lambda1 < 0.0) throw SchemaError("lambda1", "must be nonnegative");
    if (s.lambda2 < 0.0) throw SchemaError("lambda2", "must be nonnegative");
    return s;
}

json truth_json(const GroundTruth& t) {
    json j = header(ArtifactKind::ground_truth);
    j["p"] = t.coefficients.atom_count();
    j["n"] = t.coefficients.signal_count();
    j["coefficients"] = matrix_json(t.coefficients.values);
    json groups = json::array();
    for (Index g : t.active_groups) groups.push_back(g + 1);
    j["active_groups"] = std::move(groups);
    json comps = json::array();
    for (const Matrix& c : t.components) comps.push_back(matrix_json(c));
    j["components"] = std::move(comps);
    return j;
}

GroundTruth truth_from(const json& j) {
    GroundTruth t;
    const Index p = dimension(j, "p", "");
    const Index n = dimension(j, "n", "");
    t.coefficients.values = read_matrix(field(j, "coefficients", ""), p, n, "coefficients");
    const json& groups = array(field(j, "active_groups", ""), "active_groups");
    for (std::size_t k = 0; k < groups.size(); ++k) {
        const long long g = integer(groups[k], at("active_groups", k));
        if (g < 1) throw SchemaError(at("active_groups", k), "group indexes are one-based");
        t.active_groups.push_back(static_cast<Index>(g - 1));
    }
    const json& comps = array(field(j, "components", ""), "components");
    if (comps.size() != groups.size()) throw SchemaError("components", "expected one component per active group");
    for (std::size_t k = 0; k < comps.size(); ++k) t.components.push_back(read_matrix(comps[k], -1, n, at("components", k)));
    return t;
}

json report_json(const StoredReport& r) {
    json j = header(ArtifactKind::report);
    j["model"] = std::string(to_string(r.model));
    j["p"] = r.report.coefficients.atom_count();
    j["n"] = r.report.coefficients.signal_count();
    j["coefficients"] = matrix_json(r.report.coefficients.values);
    j["objective_trace"] = r.report.objective_trace;
    j["outer_iterations"] = r.report.outer_iterations;
    j["inner_iterations"] = r.report.inner_iterations;
    j["converged"] = r.report.converged;
    j["primal_residual"] = r.report.primal_residual;
    j["dual_residual"] = r.report.dual_residual;
    if (!r.report.primal_residual_trace.empty()) j["primal_residual_trace"] = r.report.primal_residual_trace;
    return j;
}

StoredReport report_from(const json& j) {
    StoredReport r;
    const json& model = field(j, "model", "");
    if (!model.is_string()) throw SchemaError("model", "expected a string");
    try {
        r.model = parse_model(model.get<std::string>());
    } catch (const InvalidArgument& e) {
        throw SchemaError("model", e.what());
    }
    const Index p = dimension(j, "p", "");
    const Index n = dimension(j, "n", "");
    r.report.coefficients.values = read_matrix(field(j, "coefficients", ""), p, n, "coefficients");
    const json& trace = array(field(j, "objective_trace", ""), "objective_trace");
    for (std::size_t k = 0; k < trace.size(); ++k) r.report.objective_trace.push_back(number(trace[k], at("objective_trace", k)));
    r.report.outer_iterations = static_cast<int>(integer(field(j, "outer_iterations", ""), "outer_iterations"));
    r.report.converged = boolean(field(j, "converged", ""), "converged");
    if (j.contains("inner_iterations")) r.report.inner_iterations = integer(j["inner_iterations"], "inner_iterations");
    if (j.contains("primal_residual")) r.report.primal_residual = number(j["primal_residual"], "primal_residual");
    if (j.contains("dual_residual")) r.report.dual_residual = number(j["dual_residual"], "dual_residual");
    if (j.contains("primal_residual_trace")) {
        const json& res = array(j["primal_residual_trace"], "primal_residual_trace");
        for (std::size_t k = 0; k < res.size(); ++k)
            r.report.primal_residual_trace.push_back(number(res[k], at("primal_residual_trace", k)));
    }
    return r;
}

json parse_text(std::string_view text) {
    try {
        return json::parse(text);
    } catch (const json::parse_error& e) {
        throw SchemaError("", std::string("invalid JSON: ") + e.what());
    }
}

template <class T>
T expect(Artifact artifact, ArtifactKind kind, const std::filesystem::path& path) {
    if (auto* value = std::get_if<T>(&artifact)) return std::move(*value);
    throw SchemaError("kind", path.string() + " holds a " + std::string(to_string(kind_of(artifact))) + ", expected a " +
                                  std::string(to_string(kind)));
}

} // namespace

std::string_view to_string(ArtifactKind kind) {
    switch (kind) {
    case ArtifactKind::dictionary: return "dictionary";
    case ArtifactKind::problem: return "problem";
    case ArtifactKind::ground_truth: return "ground_truth";
    case ArtifactKind::report: return "report";
    }
    return "unknown";
}

CodingProblem SignalSet::bind(std::shared_ptr<const Dictionary> dictionary) const {
    return CodingProblem(signals, std::move(dictionary), lambda1, lambda2, masks);
}

SignalSet SignalSet::from(const CodingProblem& problem) {
    return SignalSet{problem.signals(), problem.masks(), problem.lambda1(), problem.lambda2()};
}

bool operator==(const SignalSet& a, const SignalSet& b) {
    if (!same_matrix(a.signals, b.signals)) return false;
    if (a.masks.has_value() != b.masks.has_value()) return false;
    if (a.masks && (a.masks->rows() != b.masks->rows() || a.masks->cols() != b.masks->cols() ||
                    (*a.masks != *b.masks).any()))
        return false;
    return a.lambda1 == b.lambda1 && a.lambda2 == b.lambda2;
}

ArtifactKind kind_of(const Artifact& artifact) {
    switch (artifact.index()) {
    case 0: return ArtifactKind::dictionary;
    case 1: return ArtifactKind::problem;
    case 2: return ArtifactKind::ground_truth;
    default: return ArtifactKind::report;
    }
}

std::string to_json(const Artifact& artifact) {
    const json j = std::visit(
        [](const auto& a) -> json {
            using T = std::decay_t<decltype(a)>;
            if constexpr (std::is_same_v<T, Dictionary>) return dictionary_json(a);
            else if constexpr (std::is_same_v<T, SignalSet>) return signals_json(a);
            else if constexpr (std::is_same_v<T, GroundTruth>) return truth_json(a);
            else return report_json(a);
        },
        artifact);
    return j.dump() + "\n";
}

Artifact from_json(std::string_view text) {
    const json root = parse_text(text);
    switch (read_header(root)) {
    case ArtifactKind::dictionary: return dictionary_from(root);
    case ArtifactKind::problem: return signals_from(root);
    case ArtifactKind::ground_truth: return truth_from(root);
    case ArtifactKind::report: return report_from(root);
    }
    throw SchemaError("kind", "unreachable");
}

std::string read_text_file(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw Error("cannot open " + path.string());
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

void write_text_file_atomic(const std::filesystem::path& path, std::string_view contents) {
    std::filesystem::path tmp = path;
    tmp += ".tmp";
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        if (!out) throw Error("cannot write " + tmp.string());
        out.write(contents.data(), static_cast<std::streamsize>(contents.size()));
        if (!out) throw Error("failed writing " + tmp.string());
    }
    std::error_code ec;
    std::filesystem::rename(tmp, path, ec);
    if (ec) {
        std::filesystem::remove(tmp);
        throw Error("cannot rename " + tmp.string() + " to " + path.string() + ": " + ec.message());
    }
}

Artifact load(const std::filesystem::path& path) { return from_json(read_text_file(path)); }

void store(const Artifact& artifact, const std::filesystem::path& path) { write_text_file_atomic(path, to_json(artifact)); }

Dictionary load_dictionary(const std::filesystem::path& path) {
    return expect<Dictionary>(load(path), ArtifactKind::dictionary, path);
}

SignalSet load_signals(const std::filesystem::path& path) {
    return expect<SignalSet>(load(path), ArtifactKind::problem, path);
}

GroundTruth load_ground_truth(const std::filesystem::path& path) {
    return expect<GroundTruth>(load(path), ArtifactKind::ground_truth, path);
}

StoredReport load_report(const std::filesystem::path& path) {
    return expect<StoredReport>(load(path), ArtifactKind::report, path);
}

SynthSpec parse_synth_spec(std::string_view text) {
    const json j = parse_text(text);
    if (!j.is_object()) throw SchemaError("", "expected a JSON object");
    SynthSpec spec;
    const auto read_index = [&](std::string_view key, Index& out) {
        if (j.contains(std::string(key))) out = static_cast<Index>(integer(j[std::string(key)], std::string(key)));
    };
    read_index("num_groups", spec.num_groups);
    read_index("atoms_per_group", spec.atoms_per_group);
    read_index("signal_dim", spec.signal_dim);
    read_index("k", spec.k);
    read_index("num_active_groups", spec.num_active_groups);
    read_index("n", spec.n);
    if (j.contains("sigma")) spec.sigma = number(j["sigma"], "sigma");
    if (j.contains("missing_fraction")) spec.missing_fraction = number(j["missing_fraction"], "missing_fraction");
    if (j.contains("seed")) {
        const json& seed = j["seed"];
        if (!seed.is_number_unsigned() && !(seed.is_number_integer() && seed.get<long long>() >= 0))
            throw SchemaError("seed", "expected a nonnegative 64-bit integer");
        spec.seed = seed.get<std::uint64_t>();
    }
    for (const auto& item : j.items()) {
        static const char* known[] = {"num_groups", "atoms_per_group", "signal_dim", "k", "num_active_groups",
                                      "n", "sigma", "missing_fraction", "seed"};
        bool ok = false;
        for (const char* k : known) ok = ok || item.key() == k;
        if (!ok) throw SchemaError(item.key(), "unknown field");
    }
    spec.validate();
    return spec;
}

std::string synth_spec_to_json(const SynthSpec& spec) {
    json j;
    j["num_groups"] = spec.num_groups;
    j["atoms_per_group"] = spec.atoms_per_group;
    j["signal_dim"] = spec.signal_dim;
    j["k"] = spec.k;
    j["num_active_groups"] = spec.num_active_groups;
    j["n"] = spec.n;
    j["sigma"] = spec.sigma;
    j["missing_fraction"] = spec.missing_fraction;
    j["seed"] = spec.seed;
    return j.dump() + "\n";
}

} // namespace hilasso
