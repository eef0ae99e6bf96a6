/* C interface to the qland QAOA landscape library.
 *
 * Every handle is opaque and owned by the caller once returned; release it
 * with the matching *_free function. Functions returning qland_status leave
 * a message retrievable with qland_last_error() (per thread) on failure.
 * Strings returned through char** are released with qland_string_free().
 */
#ifndef QLAND_H
#define QLAND_H

#include <stddef.h>
#include <stdint.h>

#ifdef __cplusplus
extern "C" {
#endif

#if defined(__GNUC__)
#define QLAND_API __attribute__((visibility("default")))
#else
#define QLAND_API
#endif

typedef enum qland_status {
    QLAND_OK = 0,
    QLAND_ERR_INPUT = 1,       /* invalid argument or inconsistent input */
    QLAND_ERR_PARSE = 2,       /* malformed graph or data file */
    QLAND_ERR_SIZE = 3,        /* problem beyond the enumeration bound */
    QLAND_ERR_IO = 4,          /* file missing or unwritable */
    QLAND_ERR_CONVERGENCE = 5, /* optimizer failure */
    QLAND_ERR_INTERNAL = 6
} qland_status;

typedef struct qland_graph qland_graph;
typedef struct qland_database qland_database;
typedef struct qland_network qland_network;
typedef struct qland_report qland_report;

QLAND_API const char* qland_last_error(void);
QLAND_API const char* qland_version(void);
QLAND_API void qland_string_free(char* s);

/* Graphs */
QLAND_API qland_status qland_graph_parse(const char* text, qland_graph** out);
QLAND_API qland_status qland_graph_load(const char* path, qland_graph** out);
/* K3..K8, G2..G5, 6a, 6b, 8a..8e, cubic6-<k>, cubic8-<k> */
QLAND_API qland_status qland_graph_builtin(const char* name, qland_graph** out);
/* Newline-separated builtin names. */
QLAND_API qland_status qland_graph_builtin_names(char** out);
QLAND_API qland_status qland_graph_complete(int n, qland_graph** out);
QLAND_API qland_status qland_graph_variable_weight(double x, qland_graph** out);
QLAND_API qland_status qland_graph_cubic_count(int n, int* count);
QLAND_API qland_status qland_graph_cubic(int n, int index, qland_graph** out);
QLAND_API qland_status qland_graph_serialize(const qland_graph* g, char** out);
QLAND_API int qland_graph_vertex_count(const qland_graph* g);
QLAND_API int qland_graph_edge_count(const qland_graph* g);
QLAND_API qland_status qland_graph_maxcut(const qland_graph* g, double* cut_value, size_t* solution_count);
QLAND_API void qland_graph_free(qland_graph* g);

/* Competing |t> states for a builtin name; *count is 0 when none. */
QLAND_API qland_status qland_builtin_alternative(const char* name, uint64_t* states, size_t capacity,
                                                 size_t* count);

/* Basin-hopping */
typedef struct qland_bh_config {
    int steps;
    double temperature;
    double max_perturbation;
    double rms_threshold;
    double dedup_energy;
    uint64_t seed;
    double min_curvature;
} qland_bh_config;

QLAND_API void qland_bh_config_default(qland_bh_config* cfg);
/* streams > 1 runs independent chains with seeds seed, seed+1, ... merged in
 * order; jobs bounds the worker threads. alternative may be NULL. */
QLAND_API qland_status qland_basin_hop(const qland_graph* g, const char* graph_id, int layers,
                                       const qland_bh_config* cfg, int streams, int jobs,
                                       const uint64_t* alternative, size_t alternative_count,
                                       qland_database** out);

/* Minima databases */
typedef struct qland_minimum {
    double energy;
    double rms_gradient;
    double p_solution;
    double p_alternative;
    int has_alternative;
} qland_minimum;

typedef struct qland_bh_stats {
    int steps;
    int accepted;
    int failed;
    int non_minima;
} qland_bh_stats;

QLAND_API qland_status qland_database_load(const char* path, qland_database** out);
QLAND_API qland_status qland_database_parse(const char* text, qland_database** out);
QLAND_API qland_status qland_database_save(const qland_database* db, const char* path);
QLAND_API qland_status qland_database_serialize(const qland_database* db, char** out);
QLAND_API size_t qland_database_size(const qland_database* db);
QLAND_API int qland_database_layers(const qland_database* db);
QLAND_API const char* qland_database_graph_id(const qland_database* db);
/* 1 for a post-connection database, 0 for raw basin-hopping output. */
QLAND_API int qland_database_is_connected(const qland_database* db);
QLAND_API qland_status qland_database_minimum(const qland_database* db, size_t index, qland_minimum* out);
/* Writes 2L angles (gammas then deltas); capacity must be >= 2L. */
QLAND_API qland_status qland_database_angles(const qland_database* db, size_t index, double* out,
                                             size_t capacity);
QLAND_API qland_status qland_database_stats(const qland_database* db, qland_bh_stats* out);
QLAND_API qland_status qland_database_graph(const qland_database* db, qland_graph** out);
QLAND_API void qland_database_free(qland_database* db);

/* Kinetic transition networks */
typedef struct qland_connect_config {
    int budget; /* negative: 10 * M */
    int jobs;
    int dneb_images;
    double dneb_spring;
} qland_connect_config;

typedef struct qland_connect_stats {
    int attempts;
    int budget;
    int new_minima;
    int rejected_candidates;
    int budget_exhausted;
} qland_connect_stats;

QLAND_API void qland_connect_config_default(qland_connect_config* cfg);
QLAND_API qland_status qland_connect(const qland_database* db, const qland_connect_config* cfg,
                                     qland_network** out);
QLAND_API qland_status qland_network_load(const char* minima_path, const char* ts_path, qland_network** out);
QLAND_API qland_status qland_network_save(const qland_network* net, const char* minima_path, const char* ts_path);
QLAND_API size_t qland_network_ts_count(const qland_network* net);
QLAND_API int qland_network_component_count(const qland_network* net);
/* Zeroed for networks loaded from disk. */
QLAND_API qland_status qland_network_stats(const qland_network* net, qland_connect_stats* out);
/* Copy of the network's minima database. */
QLAND_API qland_status qland_network_minima(const qland_network* net, qland_database** out);
QLAND_API void qland_network_free(qland_network* net);

/* Analysis */
typedef struct qland_report_values {
    size_t m;
    double e_min;
    double hcmp;
    int hcmp_is_global;
    double f_metric;
    double p_op;
    int has_d12;
    double d1, d2;
    int has_d34;
    double d3, d4, p1, p2;
    int has_delta;
    double delta_e, delta_p;
} qland_report_values;

QLAND_API double qland_default_p_op(const char* graph_id);
/* M, HCMP and delta from counts; F and hulls from metrics (may equal counts). */
QLAND_API qland_status qland_analyze(const qland_database* counts, const qland_database* metrics, double p_op,
                                     qland_report** out);
QLAND_API qland_status qland_report_values_get(const qland_report* r, qland_report_values* out);
QLAND_API qland_status qland_report_text(const qland_report* r, char** out);
QLAND_API const char* qland_report_csv_header(void);
QLAND_API qland_status qland_report_csv_row(const qland_report* r, char** out);
/* Fills L_min / L_ad candidates across the given reports. */
QLAND_API qland_status qland_reports_annotate(qland_report* const* reports, size_t n);
QLAND_API qland_status qland_sweep_table(const qland_report* const* reports, size_t n, char** out);
QLAND_API void qland_report_free(qland_report* r);

/* Rendering */
typedef enum qland_channel { QLAND_CHANNEL_SOLUTION = 0, QLAND_CHANNEL_ALTERNATIVE = 1 } qland_channel;

/* spacing <= 0 selects the default; title may be NULL. */
QLAND_API qland_status qland_render_svg(const qland_network* net, qland_channel channel, int grayscale,
                                        double spacing, const char* title, char** out);
QLAND_API qland_status qland_scatter_export(const qland_database* db, char** out);

#ifdef __cplusplus
}
#endif

#endif /* QLAND_H */
