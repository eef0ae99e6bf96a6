#include "qland/qland.h"

#include <cstdlib>
#include <cstring>
#include <string>

#include "qland/analysis.hpp"
#include "qland/errors.hpp"
#include "qland/io.hpp"
#include "qland/viz.hpp"

struct qland_graph {
    qland::WeightedGraph g;
};

struct qland_database {
    qland::MinimaDatabase db;
};

struct qland_network {
    qland::KineticTransitionNetwork ktn;
    qland::ConnectStats stats;
};

struct qland_report {
    qland::AnalysisReport r;
};

namespace {

thread_local std::string g_last_error;

template <class F>
qland_status guard(F&& f) noexcept {
    try {
        g_last_error.clear();
        f();
        return QLAND_OK;
    } catch (const qland::ParseError& e) {
        g_last_error = e.what();
        return QLAND_ERR_PARSE;
    } catch (const qland::SizeError& e) {
        g_last_error = e.what();
        return QLAND_ERR_SIZE;
    } catch (const qland::IoError& e) {
        g_last_error = e.what();
        return QLAND_ERR_IO;
    } catch (const qland::InputError& e) {
        g_last_error = e.what();
        return QLAND_ERR_INPUT;
    } catch (const qland::ConvergenceError& e) {
        g_last_error = e.what();
        return QLAND_ERR_CONVERGENCE;
    } catch (const std::exception& e) {
        g_last_error = e.what();
        return QLAND_ERR_INTERNAL;
    } catch (...) {
        g_last_error = "unknown error";
        return QLAND_ERR_INTERNAL;
    }
}

void require(const void* p, const char* what) {
    if (!p) throw qland::InputError(std::string(what) + " must not be null");
}

char* dup_string(const std::string& s) {
    char* out = static_cast<char*>(std::malloc(s.size() + 1));
    if (!out) throw std::bad_alloc();
    std::memcpy(out, s.c_str(), s.size() + 1);
    return out;
}

template <class T, class... Args>
void emit(T** out, Args&&... args) {
    require(out, "output pointer");
    *out = new T{std::forward<Args>(args)...};
}

void emit_string(char** out, const std::string& s) {
    require(out, "output pointer");
    *out = dup_string(s);
}

qland::BasinHoppingConfig to_cpp(const qland_bh_config& c) {
    qland::BasinHoppingConfig cfg;
    cfg.steps = c.steps;
    cfg.temperature = c.temperature;
    cfg.max_perturbation = c.max_perturbation;
    cfg.rms_threshold = c.rms_threshold;
    cfg.dedup_energy = c.dedup_energy;
    cfg.seed = c.seed;
    cfg.min_curvature = c.min_curvature;
    return cfg;
}

}  // namespace

extern "C" {

const char* qland_last_error(void) { return g_last_error.c_str(); }

const char* qland_version(void) { return "0.1.0"; }

void qland_string_free(char* s) { std::free(s); }

qland_status qland_graph_parse(const char* text, qland_graph** out) {
    return guard([&] {
        require(text, "text");
        emit(out, qland::parse_graph(text));
    });
}

qland_status qland_graph_load(const char* path, qland_graph** out) {
    return guard([&] {
        require(path, "path");
        emit(out, qland::parse_graph(qland::read_file(path)));
    });
}

qland_status qland_graph_builtin(const char* name, qland_graph** out) {
    return guard([&] {
        require(name, "name");
        auto g = qland::builtin_graph(name);
        if (!g) throw qland::InputError(std::string("unknown builtin graph '") + name + "'");
        emit(out, std::move(*g));
    });
}

qland_status qland_graph_builtin_names(char** out) {
    return guard([&] {
        std::string s;
        for (const auto& n : qland::builtin_graph_names()) s += n + "\n";
        emit_string(out, s);
    });
}

qland_status qland_graph_complete(int n, qland_graph** out) {
    return guard([&] { emit(out, qland::complete_graph(n)); });
}

qland_status qland_graph_variable_weight(double x, qland_graph** out) {
    return guard([&] { emit(out, qland::variable_weight_graph(x)); });
}

qland_status qland_graph_cubic_count(int n, int* count) {
    return guard([&] {
        require(count, "count");
        *count = static_cast<int>(qland::cubic_graphs(n).size());
    });
}

qland_status qland_graph_cubic(int n, int index, qland_graph** out) {
    return guard([&] {
        auto all = qland::cubic_graphs(n);
        if (index < 0 || index >= static_cast<int>(all.size())) throw qland::InputError("cubic graph index out of range");
        emit(out, std::move(all[index]));
    });
}

qland_status qland_graph_serialize(const qland_graph* g, char** out) {
    return guard([&] {
        require(g, "graph");
        emit_string(out, qland::serialize_graph(g->g));
    });
}

int qland_graph_vertex_count(const qland_graph* g) { return g ? g->g.vertex_count() : 0; }

int qland_graph_edge_count(const qland_graph* g) { return g ? static_cast<int>(g->g.edges().size()) : 0; }

qland_status qland_graph_maxcut(const qland_graph* g, double* cut_value, size_t* solution_count) {
    return guard([&] {
        require(g, "graph");
        const auto s = qland::brute_force_maxcut(g->g);
        if (cut_value) *cut_value = s.cut_value;
        if (solution_count) *solution_count = s.solutions.size();
    });
}

void qland_graph_free(qland_graph* g) { delete g; }

qland_status qland_builtin_alternative(const char* name, uint64_t* states, size_t capacity, size_t* count) {
    return guard([&] {
        require(name, "name");
        require(count, "count");
        const auto alt = qland::builtin_alternative_states(name);
        *count = alt.size();
        if (alt.empty()) return;
        if (capacity < alt.size()) throw qland::InputError("state buffer too small");
        require(states, "states");
        std::copy(alt.begin(), alt.end(), states);
    });
}

void qland_bh_config_default(qland_bh_config* cfg) {
    if (!cfg) return;
    const qland::BasinHoppingConfig d;
    *cfg = {d.steps, d.temperature, d.max_perturbation, d.rms_threshold, d.dedup_energy, d.seed, d.min_curvature};
}

qland_status qland_basin_hop(const qland_graph* g, const char* graph_id, int layers, const qland_bh_config* cfg,
                             int streams, int jobs, const uint64_t* alternative, size_t alternative_count,
                             qland_database** out) {
    return guard([&] {
        require(g, "graph");
        require(graph_id, "graph id");
        qland_bh_config c;
        qland_bh_config_default(&c);
        if (cfg) c = *cfg;
        if (alternative_count > 0) require(alternative, "alternative states");
        std::span<const std::uint64_t> alt(alternative, alternative_count);
        if (streams <= 1)
            emit(out, qland::basin_hop(g->g, graph_id, layers, to_cpp(c), alt));
        else
            emit(out, qland::basin_hop_streams(g->g, graph_id, layers, to_cpp(c), streams, jobs, alt));
    });
}

qland_status qland_database_load(const char* path, qland_database** out) {
    return guard([&] {
        require(path, "path");
        emit(out, qland::parse_database(qland::read_file(path)));
    });
}

qland_status qland_database_parse(const char* text, qland_database** out) {
    return guard([&] {
        require(text, "text");
        emit(out, qland::parse_database(text));
    });
}

qland_status qland_database_save(const qland_database* db, const char* path) {
    return guard([&] {
        require(db, "database");
        require(path, "path");
        qland::write_file(path, qland::serialize_database(db->db));
    });
}

qland_status qland_database_serialize(const qland_database* db, char** out) {
    return guard([&] {
        require(db, "database");
        emit_string(out, qland::serialize_database(db->db));
    });
}

size_t qland_database_size(const qland_database* db) { return db ? db->db.records.size() : 0; }

int qland_database_layers(const qland_database* db) { return db ? db->db.layers : 0; }

const char* qland_database_graph_id(const qland_database* db) { return db ? db->db.graph_id.c_str() : ""; }

int qland_database_is_connected(const qland_database* db) {
    return db && db->db.provenance == qland::Provenance::Connected ? 1 : 0;
}

qland_status qland_database_minimum(const qland_database* db, size_t index, qland_minimum* out) {
    return guard([&] {
        require(db, "database");
        require(out, "output");
        if (index >= db->db.records.size()) throw qland::InputError("record index out of range");
        const auto& r = db->db.records[index];
        *out = {r.energy, r.rms_gradient, r.p_solution, r.p_alternative.value_or(0.0), r.p_alternative ? 1 : 0};
    });
}

qland_status qland_database_angles(const qland_database* db, size_t index, double* out, size_t capacity) {
    return guard([&] {
        require(db, "database");
        require(out, "output");
        if (index >= db->db.records.size()) throw qland::InputError("record index out of range");
        const auto flat = db->db.records[index].theta.flat();
        if (capacity < flat.size()) throw qland::InputError("angle buffer too small");
        std::copy(flat.begin(), flat.end(), out);
    });
}

qland_status qland_database_stats(const qland_database* db, qland_bh_stats* out) {
    return guard([&] {
        require(db, "database");
        require(out, "output");
        const auto& s = db->db.stats;
        *out = {s.steps, s.accepted, s.failed, s.non_minima};
    });
}

qland_status qland_database_graph(const qland_database* db, qland_graph** out) {
    return guard([&] {
        require(db, "database");
        emit(out, db->db.graph);
    });
}

void qland_database_free(qland_database* db) { delete db; }

void qland_connect_config_default(qland_connect_config* cfg) {
    if (!cfg) return;
    const qland::ConnectConfig d;
    *cfg = {d.budget, d.jobs, d.dneb.images, d.dneb.spring};
}

qland_status qland_connect(const qland_database* db, const qland_connect_config* cfg, qland_network** out) {
    return guard([&] {
        require(db, "database");
        qland_connect_config c;
        qland_connect_config_default(&c);
        if (cfg) c = *cfg;
        qland::ConnectConfig cc;
        cc.budget = c.budget;
        cc.jobs = c.jobs;
        cc.dneb.images = c.dneb_images;
        cc.dneb.spring = c.dneb_spring;
        auto res = qland::connect_database(db->db, cc);
        emit(out, std::move(res.network), res.stats);
    });
}

qland_status qland_network_load(const char* minima_path, const char* ts_path, qland_network** out) {
    return guard([&] {
        require(minima_path, "minima path");
        require(ts_path, "transition-state path");
        emit(out, qland::parse_network(qland::read_file(minima_path), qland::read_file(ts_path)),
             qland::ConnectStats{});
    });
}

qland_status qland_network_save(const qland_network* net, const char* minima_path, const char* ts_path) {
    return guard([&] {
        require(net, "network");
        require(minima_path, "minima path");
        require(ts_path, "transition-state path");
        qland::write_file(minima_path, qland::serialize_database(net->ktn.minima));
        qland::write_file(ts_path, qland::serialize_transition_states(net->ktn));
    });
}

size_t qland_network_ts_count(const qland_network* net) { return net ? net->ktn.transition_states.size() : 0; }

int qland_network_component_count(const qland_network* net) { return net ? net->ktn.component_count() : 0; }

qland_status qland_network_stats(const qland_network* net, qland_connect_stats* out) {
    return guard([&] {
        require(net, "network");
        require(out, "output");
        const auto& s = net->stats;
        *out = {s.attempts, s.budget, s.new_minima, s.rejected_candidates, s.budget_exhausted ? 1 : 0};
    });
}

qland_status qland_network_minima(const qland_network* net, qland_database** out) {
    return guard([&] {
        require(net, "network");
        emit(out, net->ktn.minima);
    });
}

void qland_network_free(qland_network* net) { delete net; }

double qland_default_p_op(const char* graph_id) { return qland::default_p_op(graph_id ? graph_id : ""); }

qland_status qland_analyze(const qland_database* counts, const qland_database* metrics, double p_op,
                           qland_report** out) {
    return guard([&] {
        require(counts, "counts database");
        emit(out, qland::analyze(counts->db, metrics ? metrics->db : counts->db, p_op));
    });
}

qland_status qland_report_values_get(const qland_report* r, qland_report_values* out) {
    return guard([&] {
        require(r, "report");
        require(out, "output");
        const auto& a = r->r;
        qland_report_values v{};
        v.m = a.m;
        v.e_min = a.e_min;
        v.hcmp = a.hcmp;
        v.hcmp_is_global = a.hcmp_is_global ? 1 : 0;
        v.f_metric = a.f_metric;
        v.p_op = a.p_op;
        if (a.d12) {
            v.has_d12 = 1;
            v.d1 = a.d12->d1;
            v.d2 = a.d12->d2;
        }
        if (a.d34) {
            v.has_d34 = 1;
            v.d3 = a.d34->d3;
            v.d4 = a.d34->d4;
            v.p1 = a.d34->p1;
            v.p2 = a.d34->p2;
        }
        if (a.delta) {
            v.has_delta = 1;
            v.delta_e = a.delta->delta_e;
            v.delta_p = a.delta->delta_p;
        }
        *out = v;
    });
}

qland_status qland_report_text(const qland_report* r, char** out) {
    return guard([&] {
        require(r, "report");
        emit_string(out, qland::report_text(r->r));
    });
}

const char* qland_report_csv_header(void) {
    static const std::string header = qland::report_csv_header();
    return header.c_str();
}

qland_status qland_report_csv_row(const qland_report* r, char** out) {
    return guard([&] {
        require(r, "report");
        emit_string(out, qland::report_csv_row(r->r));
    });
}

qland_status qland_reports_annotate(qland_report* const* reports, size_t n) {
    return guard([&] {
        if (n > 0) require(reports, "reports");
        std::vector<qland::AnalysisReport> copy;
        for (size_t i = 0; i < n; ++i) {
            require(reports[i], "report");
            copy.push_back(reports[i]->r);
        }
        qland::annotate_layer_candidates(copy);
        for (size_t i = 0; i < n; ++i) reports[i]->r = copy[i];
    });
}

qland_status qland_sweep_table(const qland_report* const* reports, size_t n, char** out) {
    return guard([&] {
        if (n > 0) require(reports, "reports");
        std::vector<qland::AnalysisReport> copy;
        for (size_t i = 0; i < n; ++i) {
            require(reports[i], "report");
            copy.push_back(reports[i]->r);
        }
        emit_string(out, qland::sweep_table(copy));
    });
}

void qland_report_free(qland_report* r) { delete r; }

qland_status qland_render_svg(const qland_network* net, qland_channel channel, int grayscale, double spacing,
                              const char* title, char** out) {
    return guard([&] {
        require(net, "network");
        if (net->ktn.minima.records.empty()) throw qland::InputError("network has no minima");
        qland::RenderOptions opt;
        opt.channel = channel == QLAND_CHANNEL_ALTERNATIVE ? qland::ColorChannel::Alternative
                                                           : qland::ColorChannel::Solution;
        opt.grayscale = grayscale != 0;
        if (title) opt.title = title;
        emit_string(out, qland::render_disconnectivity(qland::build_disconnectivity(net->ktn, spacing), opt));
    });
}

qland_status qland_scatter_export(const qland_database* db, char** out) {
    return guard([&] {
        require(db, "database");
        emit_string(out, qland::scatter_export(db->db));
    });
}

}  // extern "C"
