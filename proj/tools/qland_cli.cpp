// qland command-line driver: graph, optimize, connect, analyze, render.
// Talks to the library only through the C interface in qland.h.

#include <openssl/evp.h>

#include <CLI11.hpp>
#include <json.hpp>

#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <memory>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "qland/qland.h"

namespace fs = std::filesystem;
using json = nlohmann::json;

namespace {

enum Exit { kOk = 0, kInternal = 1, kUsage = 2 };

struct Failure {
    int code;
    std::string message;
};

[[noreturn]] void fail(int code, const std::string& message) { throw Failure{code, message}; }

int exit_code_for(qland_status s) {
    switch (s) {
        case QLAND_ERR_INPUT:
        case QLAND_ERR_PARSE:
        case QLAND_ERR_SIZE:
        case QLAND_ERR_IO:
            return kUsage;
        default:
            return kInternal;
    }
}

void check(qland_status s, const std::string& context = {}) {
    if (s == QLAND_OK) return;
    std::string msg = qland_last_error();
    if (!context.empty()) msg = context + ": " + msg;
    fail(exit_code_for(s), msg);
}

struct GraphDeleter {
    void operator()(qland_graph* p) const { qland_graph_free(p); }
};
struct DatabaseDeleter {
    void operator()(qland_database* p) const { qland_database_free(p); }
};
struct NetworkDeleter {
    void operator()(qland_network* p) const { qland_network_free(p); }
};
struct ReportDeleter {
    void operator()(qland_report* p) const { qland_report_free(p); }
};
using Graph = std::unique_ptr<qland_graph, GraphDeleter>;
using Database = std::unique_ptr<qland_database, DatabaseDeleter>;
using Network = std::unique_ptr<qland_network, NetworkDeleter>;
using Report = std::unique_ptr<qland_report, ReportDeleter>;

std::string take(char* s) {
    std::string out = s ? s : "";
    qland_string_free(s);
    return out;
}

std::string format(const char* fmt, double v) {
    char buf[64];
    std::snprintf(buf, sizeof buf, fmt, v);
    return buf;
}

std::string read_text(const fs::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) fail(kUsage, path.string() + ": cannot open file");
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

void write_text(const fs::path& path, const std::string& text) {
    std::error_code ec;
    if (path.has_parent_path()) fs::create_directories(path.parent_path(), ec);
    const fs::path tmp = path.string() + ".tmp";
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        if (!out) fail(kUsage, path.string() + ": cannot write file");
        out << text;
        if (!out.flush()) fail(kUsage, path.string() + ": write failed");
    }
    fs::rename(tmp, path, ec);
    if (ec) fail(kUsage, path.string() + ": " + ec.message());
}

std::string sha256_hex(const std::string& data) {
    unsigned char digest[EVP_MAX_MD_SIZE];
    unsigned int len = 0;
    if (EVP_Digest(data.data(), data.size(), digest, &len, EVP_sha256(), nullptr) != 1) {
        fail(kInternal, "sha256 failed");
    }
    static const char* hex = "0123456789abcdef";
    std::string out;
    for (unsigned int i = 0; i < len; ++i) {
        out += hex[digest[i] >> 4];
        out += hex[digest[i] & 15];
    }
    return out;
}

// ---------------------------------------------------------------------------
// Run manifest

class Manifest {
public:
    explicit Manifest(fs::path dir) : dir_(std::move(dir)), path_(dir_ / "manifest.json") {
        if (!fs::exists(path_)) {
            data_ = json{{"version", 1}, {"stages", json::object()}};
            return;
        }
        try {
            data_ = json::parse(read_text(path_));
        } catch (const json::exception& e) {
            std::cerr << "warning: " << path_.string() << ": unreadable manifest (" << e.what() << "), starting fresh\n";
            data_ = json{{"version", 1}, {"stages", json::object()}};
        }
        if (!data_.contains("stages")) data_["stages"] = json::object();
    }

    // Warns when a file recorded by an earlier stage no longer matches its hash.
    void verify_input(const fs::path& file) const {
        const auto key = relative_key(file);
        if (!key) return;
        for (const auto& [stage, entry] : data_["stages"].items()) {
            if (!entry.contains("files") || !entry["files"].contains(*key)) continue;
            const auto expected = entry["files"][*key].get<std::string>();
            if (!fs::exists(file)) {
                std::cerr << "warning: " << file.string() << " recorded by stage '" << stage << "' is missing\n";
            } else if (sha256_hex(read_text(file)) != expected) {
                std::cerr << "warning: " << file.string() << " does not match the hash recorded by stage '" << stage
                          << "'\n";
            }
        }
    }

    void set(const std::string& key, json value) { data_[key] = std::move(value); }

    // Re-reads each written file and records the stage only if all hashes agree
    // with the content that was meant to be written.
    void complete(const std::string& stage, const std::vector<std::pair<fs::path, std::string>>& written) {
        json files = json::object();
        for (const auto& [path, content] : written) {
            const auto on_disk = sha256_hex(read_text(path));
            if (on_disk != sha256_hex(content)) fail(kInternal, path.string() + ": verification after write failed");
            files[relative_key(path).value_or(fs::absolute(path).lexically_normal().string())] = on_disk;
        }
        data_["stages"][stage] = json{{"complete", true}, {"files", files}};
        write_text(path_, data_.dump(2) + "\n");
    }

private:
    std::optional<std::string> relative_key(const fs::path& file) const {
        std::error_code ec;
        const auto base = fs::weakly_canonical(dir_, ec);
        const auto full = fs::weakly_canonical(file, ec);
        if (ec) return std::nullopt;
        const auto rel = full.lexically_relative(base);
        if (rel.empty() || *rel.begin() == "..") return std::nullopt;
        return rel.generic_string();
    }

    fs::path dir_;
    fs::path path_;
    json data_;
};

// ---------------------------------------------------------------------------
// Config files: `key = value` lines whose keys are long option names of the
// active subcommand. Command-line flags take precedence.

std::map<std::string, std::string> read_config(const std::string& path) {
    std::map<std::string, std::string> out;
    std::istringstream in(read_text(path));
    std::string line;
    int line_no = 0;
    auto trim = [](std::string s) {
        const auto b = s.find_first_not_of(" \t\r");
        const auto e = s.find_last_not_of(" \t\r");
        return b == std::string::npos ? std::string() : s.substr(b, e - b + 1);
    };
    while (std::getline(in, line)) {
        ++line_no;
        if (const auto hash = line.find('#'); hash != std::string::npos) line.resize(hash);
        line = trim(line);
        if (line.empty()) continue;
        const auto eq = line.find('=');
        if (eq == std::string::npos) fail(kUsage, path + ": line " + std::to_string(line_no) + ": expected key=value");
        out[trim(line.substr(0, eq))] = trim(line.substr(eq + 1));
    }
    return out;
}

void apply_config(CLI::App* sub, const std::string& path) {
    for (const auto& [key, value] : read_config(path)) {
        CLI::Option* opt = sub->get_option_no_throw("--" + key);
        if (!opt || key == "config") fail(kUsage, path + ": unknown key '" + key + "' for '" + sub->get_name() + "'");
        if (opt->count() > 0) continue;
        if (opt->get_type_size() == 0) {
            if (value == "true" || value == "1") opt->add_result("true");
            else if (value != "false" && value != "0") fail(kUsage, path + ": '" + key + "' expects true or false");
            else continue;
        } else {
            opt->add_result(value);
        }
        opt->run_callback();
    }
}

fs::path output_dir(const std::string& flag) {
    if (!flag.empty()) return flag;
    if (const char* env = std::getenv("QLAND_OUTPUT_DIR"); env && *env) return env;
    return ".";
}

std::vector<int> parse_layers(const std::string& spec) {
    std::vector<int> out;
    std::stringstream ss(spec);
    std::string part;
    auto to_int = [&](const std::string& s) {
        try {
            std::size_t used = 0;
            const int v = std::stoi(s, &used);
            if (used != s.size() || v < 1) throw std::invalid_argument(s);
            return v;
        } catch (const std::exception&) {
            fail(kUsage, "invalid layer specification '" + spec + "'");
        }
    };
    while (std::getline(ss, part, ',')) {
        if (const auto dash = part.find('-'); dash != std::string::npos) {
            const int lo = to_int(part.substr(0, dash));
            const int hi = to_int(part.substr(dash + 1));
            if (hi < lo) fail(kUsage, "invalid layer range '" + part + "'");
            for (int l = lo; l <= hi; ++l) out.push_back(l);
        } else {
            out.push_back(to_int(part));
        }
    }
    if (out.empty()) fail(kUsage, "no layers given");
    return out;
}

std::vector<uint64_t> parse_states(const std::string& spec) {
    std::vector<uint64_t> out;
    std::stringstream ss(spec);
    std::string part;
    while (std::getline(ss, part, ',')) {
        try {
            std::size_t used = 0;
            const auto v = std::stoull(part, &used, 0);
            if (used != part.size()) throw std::invalid_argument(part);
            out.push_back(v);
        } catch (const std::exception&) {
            fail(kUsage, "invalid basis state '" + part + "'");
        }
    }
    return out;
}

std::string stem_of(const fs::path& p) {
    std::string name = p.filename().string();
    for (const char* ext : {".connected.minima", ".minima", ".ts"}) {
        const std::string e = ext;
        if (name.size() > e.size() && name.compare(name.size() - e.size(), e.size(), e) == 0) {
            return name.substr(0, name.size() - e.size());
        }
    }
    return p.stem().string();
}

Database load_database(const fs::path& path, const Manifest& manifest) {
    manifest.verify_input(path);
    qland_database* db = nullptr;
    check(qland_database_load(path.string().c_str(), &db), path.string());
    return Database(db);
}

// ---------------------------------------------------------------------------
// graph

struct GraphArgs {
    std::string family;
    int n = 0;
    double x = 0;
    std::string name;
    std::string out;
    std::string file;
};

std::string graph_label(const std::string& family, int n, double x, const std::string& name, int index = -1) {
    if (family == "complete") return "K" + std::to_string(n);
    if (family == "cubic") return "cubic" + std::to_string(n) + "-" + std::to_string(index);
    if (family == "variable-weight") {
        if (x == std::floor(x) && std::fabs(x) < 1e6) return "G" + std::to_string(static_cast<long>(x));
        return "G_" + format("%g", x);
    }
    return name;
}

int run_graph_gen(const GraphArgs& a) {
    std::vector<std::pair<std::string, Graph>> graphs;
    qland_graph* g = nullptr;
    if (a.family == "complete") {
        if (a.n < 2) fail(kUsage, "--family complete requires --n >= 2");
        check(qland_graph_complete(a.n, &g));
        graphs.emplace_back(graph_label(a.family, a.n, 0, ""), Graph(g));
    } else if (a.family == "cubic") {
        int count = 0;
        check(qland_graph_cubic_count(a.n, &count));
        for (int k = 0; k < count; ++k) {
            check(qland_graph_cubic(a.n, k, &g));
            graphs.emplace_back(graph_label(a.family, a.n, 0, "", k), Graph(g));
        }
    } else if (a.family == "variable-weight") {
        check(qland_graph_variable_weight(a.x, &g));
        graphs.emplace_back(graph_label(a.family, 0, a.x, ""), Graph(g));
    } else if (a.family == "builtin") {
        if (a.name.empty()) fail(kUsage, "--family builtin requires --name");
        check(qland_graph_builtin(a.name.c_str(), &g));
        graphs.emplace_back(a.name, Graph(g));
    } else {
        fail(kUsage, "unknown family '" + a.family + "'");
    }

    if (a.out.empty()) {
        for (const auto& [label, graph] : graphs) {
            char* text = nullptr;
            check(qland_graph_serialize(graph.get(), &text));
            if (graphs.size() > 1) std::cout << "# " << label << "\n";
            std::cout << take(text);
        }
        return kOk;
    }
    const fs::path dir = a.out;
    Manifest manifest(dir);
    std::vector<std::pair<fs::path, std::string>> written;
    for (const auto& [label, graph] : graphs) {
        char* text = nullptr;
        check(qland_graph_serialize(graph.get(), &text));
        const auto path = dir / (label + ".txt");
        const auto content = take(text);
        write_text(path, content);
        written.emplace_back(path, content);
        std::cout << path.string() << "\n";
    }
    const auto stage = a.family == "cubic" ? "cubic" + std::to_string(a.n) : graphs.front().first;
    manifest.complete("graph:" + stage, written);
    return kOk;
}

int run_graph_check(const GraphArgs& a) {
    qland_graph* raw = nullptr;
    check(qland_graph_load(a.file.c_str(), &raw), a.file);
    Graph g(raw);
    double cut = 0;
    size_t solutions = 0;
    check(qland_graph_maxcut(g.get(), &cut, &solutions), a.file);
    std::cout << a.file << ": ok, " << qland_graph_vertex_count(g.get()) << " vertices, "
              << qland_graph_edge_count(g.get()) << " edges, max cut " << format("%.6g", cut) << " (" << solutions
              << " solution states)\n";
    return kOk;
}

// ---------------------------------------------------------------------------
// optimize

struct OptimizeArgs {
    std::string graph_file;
    std::string builtin;
    std::string id;
    std::string layers = "1";
    int steps = 10000;
    double temperature = 1.0;
    double perturb = 1.0;
    double rms = 1e-10;
    double dedup = 1e-9;
    double min_curvature = 1e-6;
    uint64_t seed = 1;
    int streams = 1;
    int jobs = 1;
    std::string alternative;
    std::string out;
};

int run_optimize(const OptimizeArgs& a) {
    if (a.graph_file.empty() == a.builtin.empty()) fail(kUsage, "exactly one of --graph or --builtin is required");
    const auto layers = parse_layers(a.layers);
    const fs::path dir = output_dir(a.out);
    Manifest manifest(dir);

    qland_graph* raw = nullptr;
    std::string id = a.id;
    std::vector<uint64_t> alternative;
    if (!a.builtin.empty()) {
        check(qland_graph_builtin(a.builtin.c_str(), &raw));
        if (id.empty()) id = a.builtin;
        uint64_t states[64];
        size_t count = 0;
        check(qland_builtin_alternative(a.builtin.c_str(), states, 64, &count));
        alternative.assign(states, states + count);
    } else {
        manifest.verify_input(a.graph_file);
        check(qland_graph_load(a.graph_file.c_str(), &raw), a.graph_file);
        if (id.empty()) id = fs::path(a.graph_file).stem().string();
    }
    Graph g(raw);
    if (!a.alternative.empty()) alternative = parse_states(a.alternative);

    qland_bh_config cfg;
    qland_bh_config_default(&cfg);
    cfg.steps = a.steps;
    cfg.temperature = a.temperature;
    cfg.max_perturbation = a.perturb;
    cfg.rms_threshold = a.rms;
    cfg.dedup_energy = a.dedup;
    cfg.seed = a.seed;
    cfg.min_curvature = a.min_curvature;

    manifest.set("graph_source", a.builtin.empty() ? a.graph_file : "builtin:" + a.builtin);
    manifest.set("graph_id", id);
    manifest.set("layers", layers);
    manifest.set("seed", a.seed);
    manifest.set("config", json{{"steps", a.steps},
                                {"temperature", a.temperature},
                                {"perturb", a.perturb},
                                {"rms", a.rms},
                                {"dedup", a.dedup},
                                {"min-curvature", a.min_curvature},
                                {"streams", a.streams},
                                {"alternative", alternative}});
    manifest.set("output_dir", dir.generic_string());

    for (int L : layers) {
        qland_database* db_raw = nullptr;
        check(qland_basin_hop(g.get(), id.c_str(), L, &cfg, a.streams, a.jobs,
                              alternative.empty() ? nullptr : alternative.data(), alternative.size(), &db_raw),
              id + " L=" + std::to_string(L));
        Database db(db_raw);
        char* text = nullptr;
        check(qland_database_serialize(db.get(), &text));
        const auto content = take(text);
        const auto path = dir / (id + "_L" + std::to_string(L) + ".minima");
        write_text(path, content);

        qland_report* rep_raw = nullptr;
        check(qland_analyze(db.get(), db.get(), qland_default_p_op(id.c_str()), &rep_raw));
        Report rep(rep_raw);
        qland_report_values v;
        check(qland_report_values_get(rep.get(), &v));
        std::cout << id << " L=" << L << " M=" << v.m << " E_GM=" << format("%.6f", v.e_min)
                  << " HCMP=" << format("%.6f", v.hcmp) << (v.hcmp_is_global ? "" : "*") << "  -> "
                  << path.string() << "\n";
        manifest.complete("optimize:" + id + "_L" + std::to_string(L), {{path, content}});
    }
    return kOk;
}

// ---------------------------------------------------------------------------
// connect

struct ConnectArgs {
    std::string db;
    int budget = -1;
    int jobs = 1;
    int images = 11;
    double spring = 1.0;
    std::string out;
};

int run_connect(const ConnectArgs& a) {
    const fs::path dir = output_dir(a.out);
    Manifest manifest(dir);
    Database db = load_database(a.db, manifest);
    if (qland_database_is_connected(db.get())) {
        std::cerr << "warning: " << a.db << " is already a connected database\n";
    }
    qland_connect_config cfg;
    qland_connect_config_default(&cfg);
    cfg.budget = a.budget;
    cfg.jobs = a.jobs;
    cfg.dneb_images = a.images;
    cfg.dneb_spring = a.spring;
    qland_network* raw = nullptr;
    check(qland_connect(db.get(), &cfg, &raw), a.db);
    Network net(raw);

    const auto stem = stem_of(a.db);
    const auto minima_path = dir / (stem + ".connected.minima");
    const auto ts_path = dir / (stem + ".ts");
    check(qland_network_save(net.get(), minima_path.string().c_str(), ts_path.string().c_str()));

    const auto ts = qland_network_ts_count(net.get());
    const int components = qland_network_component_count(net.get());
    qland_connect_stats stats;
    check(qland_network_stats(net.get(), &stats));
    std::cout << ts << " transition state" << (ts == 1 ? "" : "s") << ", " << components << " component"
              << (components == 1 ? "" : "s") << "\n";
    if (stats.new_minima > 0) std::cout << stats.new_minima << " new minima found along paths\n";
    if (components > 1) {
        std::cerr << "warning: partial network (" << components << " components after " << stats.attempts << " of "
                  << stats.budget << " attempts" << (stats.budget_exhausted ? ", budget exhausted" : "") << ")\n";
    }
    manifest.complete("connect:" + stem, {{minima_path, read_text(minima_path)}, {ts_path, read_text(ts_path)}});
    return kOk;
}

// ---------------------------------------------------------------------------
// analyze

struct AnalyzeArgs {
    std::vector<std::string> dbs;
    std::vector<std::string> networks;
    std::optional<double> pop;
    std::string report;
    std::string csv;
    std::string sweep;
};

int run_analyze(const AnalyzeArgs& a) {
    if (a.dbs.empty() && a.networks.empty()) fail(kUsage, "at least one --db or --network is required");
    if (!a.dbs.empty() && !a.networks.empty() && a.dbs.size() != a.networks.size()) {
        fail(kUsage, "--db and --network must be given the same number of times");
    }
    const fs::path first = a.dbs.empty() ? a.networks.front() : a.dbs.front();
    Manifest manifest(first.has_parent_path() ? first.parent_path() : fs::path("."));
    const size_t n = std::max(a.dbs.size(), a.networks.size());
    std::vector<Report> reports;
    for (size_t i = 0; i < n; ++i) {
        Database counts, metrics;
        if (!a.dbs.empty()) {
            counts = load_database(a.dbs[i], manifest);
            if (qland_database_is_connected(counts.get())) {
                fail(kUsage, a.dbs[i] + ": --db expects a basin-hopping database; pass connected databases with --network");
            }
        }
        if (!a.networks.empty()) {
            metrics = load_database(a.networks[i], manifest);
            if (!qland_database_is_connected(metrics.get())) {
                fail(kUsage, a.networks[i] + ": --network expects a connected database produced by 'connect'");
            }
        }
        const qland_database* c = counts ? counts.get() : metrics.get();
        const qland_database* m = metrics ? metrics.get() : counts.get();
        const double p_op = a.pop.value_or(qland_default_p_op(qland_database_graph_id(c)));
        qland_report* raw = nullptr;
        check(qland_analyze(c, m, p_op, &raw), a.dbs.empty() ? a.networks[i] : a.dbs[i]);
        reports.emplace_back(raw);
    }
    std::vector<qland_report*> handles;
    for (auto& r : reports) handles.push_back(r.get());
    if (handles.size() > 1) check(qland_reports_annotate(handles.data(), handles.size()));

    std::string text, csv = qland_report_csv_header();
    for (size_t i = 0; i < reports.size(); ++i) {
        char* s = nullptr;
        check(qland_report_text(reports[i].get(), &s));
        if (i) text += "\n";
        text += take(s);
        check(qland_report_csv_row(reports[i].get(), &s));
        csv += take(s);
    }
    std::cout << text;
    std::string sweep;
    if (handles.size() > 1) {
        char* s = nullptr;
        std::vector<const qland_report*> chandles(handles.begin(), handles.end());
        check(qland_sweep_table(chandles.data(), chandles.size(), &s));
        sweep = take(s);
        std::cout << "\n" << sweep;
    }
    if (!a.report.empty()) write_text(a.report, text);
    if (!a.csv.empty()) write_text(a.csv, csv);
    if (!a.sweep.empty()) {
        if (sweep.empty()) fail(kUsage, "--sweep needs databases for more than one layer count");
        write_text(a.sweep, sweep);
    }
    return kOk;
}

// ---------------------------------------------------------------------------
// render

struct RenderArgs {
    std::string minima;
    std::string ts;
    std::string color = "solution";
    bool grayscale = false;
    double spacing = 0;
    std::string title;
    std::string out;
};

int run_render(const RenderArgs& a) {
    const fs::path dir = output_dir(a.out);
    Manifest manifest(dir);
    manifest.verify_input(a.minima);
    manifest.verify_input(a.ts);
    qland_network* raw = nullptr;
    check(qland_network_load(a.minima.c_str(), a.ts.c_str(), &raw), a.minima);
    Network net(raw);
    qland_database* dbraw = nullptr;
    check(qland_network_minima(net.get(), &dbraw));
    Database db(dbraw);
    if (qland_database_size(db.get()) == 0) fail(kUsage, a.minima + ": empty network");

    const auto channel = a.color == "alternative" ? QLAND_CHANNEL_ALTERNATIVE : QLAND_CHANNEL_SOLUTION;
    char* s = nullptr;
    check(qland_render_svg(net.get(), channel, a.grayscale ? 1 : 0, a.spacing,
                           a.title.empty() ? nullptr : a.title.c_str(), &s));
    const auto svg = take(s);
    check(qland_scatter_export(db.get(), &s));
    const auto scatter = take(s);

    const auto stem = stem_of(a.minima);
    const auto svg_path = dir / (stem + "." + a.color + ".svg");
    const auto scatter_path = dir / (stem + ".scatter.csv");
    write_text(svg_path, svg);
    write_text(scatter_path, scatter);
    std::cout << svg_path.string() << "\n" << scatter_path.string() << "\n";
    manifest.complete("render:" + stem + ":" + a.color, {{svg_path, svg}, {scatter_path, scatter}});
    return kOk;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"QAOA Max-Cut energy landscapes"};
    app.set_version_flag("--version", std::string(qland_version()));
    app.require_subcommand(1);

    std::string config;
    auto add_config = [&](CLI::App* sub) { sub->add_option("--config", config, "key=value file of option defaults"); };

    GraphArgs ga;
    auto* graph = app.add_subcommand("graph", "generate or validate edge-list files");
    graph->require_subcommand(1);
    auto* gen = graph->add_subcommand("gen", "emit a graph family");
    gen->add_option("--family", ga.family, "complete | cubic | variable-weight | builtin")
        ->required()
        ->check(CLI::IsMember({"complete", "cubic", "variable-weight", "builtin"}));
    gen->add_option("--n", ga.n, "vertex count (complete, cubic)");
    gen->add_option("--x", ga.x, "weight parameter (variable-weight)");
    gen->add_option("--name", ga.name, "builtin graph name");
    gen->add_option("--out", ga.out, "write files into this directory instead of stdout");
    auto* chk = graph->add_subcommand("check", "validate an edge-list file");
    chk->add_option("file", ga.file)->required();

    OptimizeArgs oa;
    auto* opt = app.add_subcommand("optimize", "basin-hopping search for QAOA minima");
    opt->add_option("--graph", oa.graph_file, "edge-list file");
    opt->add_option("--builtin", oa.builtin, "builtin graph name");
    opt->add_option("--id", oa.id, "graph identifier used in file names");
    opt->add_option("--layers", oa.layers, "layer count, list or range (e.g. 2, 1-3)");
    opt->add_option("--steps", oa.steps)->check(CLI::NonNegativeNumber);
    opt->add_option("--temperature", oa.temperature)->check(CLI::PositiveNumber);
    opt->add_option("--perturb", oa.perturb)->check(CLI::PositiveNumber);
    opt->add_option("--rms", oa.rms, "gradient convergence threshold")->check(CLI::PositiveNumber);
    opt->add_option("--dedup", oa.dedup, "energy tolerance for identical minima")->check(CLI::PositiveNumber);
    opt->add_option("--min-curvature", oa.min_curvature);
    opt->add_option("--seed", oa.seed);
    opt->add_option("--streams", oa.streams, "independent chains merged in seed order")->check(CLI::PositiveNumber);
    opt->add_option("--jobs", oa.jobs)->check(CLI::PositiveNumber);
    opt->add_option("--alternative", oa.alternative, "comma-separated competing basis states");
    opt->add_option("--out", oa.out, "output directory");
    add_config(opt);

    ConnectArgs ca;
    auto* con = app.add_subcommand("connect", "build the transition network of a minima database");
    con->add_option("--db", ca.db)->required();
    con->add_option("--budget", ca.budget, "connection attempts (negative: 10 * M)");
    con->add_option("--jobs", ca.jobs)->check(CLI::PositiveNumber);
    con->add_option("--images", ca.images, "band images")->check(CLI::Range(3, 1000));
    con->add_option("--spring", ca.spring)->check(CLI::PositiveNumber);
    con->add_option("--out", ca.out, "output directory");
    add_config(con);

    AnalyzeArgs aa;
    auto* ana = app.add_subcommand("analyze", "landscape metrics and thresholds");
    ana->add_option("--db", aa.dbs, "basin-hopping database (repeat for a layer sweep)");
    ana->add_option("--network", aa.networks, "connected database (repeat in the same order as --db)");
    ana->add_option("--pop", aa.pop, "probability cutoff for d1/d2")->check(CLI::Range(0.0, 1.0));
    ana->add_option("--report", aa.report, "write the text report here");
    ana->add_option("--csv", aa.csv, "write machine-readable rows here");
    ana->add_option("--sweep", aa.sweep, "write the multi-layer table here");
    add_config(ana);

    RenderArgs ra;
    auto* ren = app.add_subcommand("render", "disconnectivity graph and scatter export");
    ren->add_option("--minima", ra.minima)->required();
    ren->add_option("--ts", ra.ts)->required();
    ren->add_option("--color", ra.color)->check(CLI::IsMember({"solution", "alternative"}));
    ren->add_flag("--grayscale", ra.grayscale);
    ren->add_option("--spacing", ra.spacing, "energy level spacing (default: automatic)");
    ren->add_option("--title", ra.title);
    ren->add_option("--out", ra.out, "output directory");
    add_config(ren);

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int rc = app.exit(e);
        return rc == 0 ? kOk : kUsage;
    }

    try {
        for (auto* sub : {opt, con, ana, ren}) {
            if (sub->parsed() && !config.empty()) {
                try {
                    apply_config(sub, config);
                } catch (const CLI::Error& e) {
                    fail(kUsage, config + ": " + e.what());
                }
            }
        }
        if (gen->parsed()) return run_graph_gen(ga);
        if (chk->parsed()) return run_graph_check(ga);
        if (opt->parsed()) return run_optimize(oa);
        if (con->parsed()) return run_connect(ca);
        if (ana->parsed()) return run_analyze(aa);
        if (ren->parsed()) return run_render(ra);
    } catch (const Failure& f) {
        std::cerr << "error: " << f.message << "\n";
        return f.code;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kInternal;
    }
    return kUsage;
}
