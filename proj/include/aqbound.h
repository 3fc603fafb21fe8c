/* C interface to the aggregate-bounding library.
 *
 * All functions return an aqb_status; outputs come back through pointers.
 * Any non-AQB_OK status leaves a human-readable message in aqb_last_error()
 * (thread-local).  Strings returned through char** are heap-allocated and
 * must be released with aqb_string_free().
 */
#ifndef AQBOUND_H
#define AQBOUND_H

#ifdef __cplusplus
extern "C" {
#endif

typedef enum aqb_status {
    AQB_OK = 0,
    AQB_ERR_INVALID_ARGUMENT,
    AQB_ERR_IO,
    AQB_ERR_CSV_PARSE,
    AQB_ERR_MISSING_COLUMN,
    AQB_ERR_DUPLICATE_BASE_ID,
    AQB_ERR_UNPARSEABLE_NUMBER,
    AQB_ERR_SCHEMA_VIOLATION,
    AQB_ERR_QUERY_SYNTAX,
    AQB_ERR_UNKNOWN_COLUMN,
    AQB_ERR_NEGATIVE_VALUE,
    AQB_ERR_INFEASIBLE,
    AQB_ERR_TOO_LARGE,
    AQB_ERR_ZERO_NOMINAL,
    AQB_ERR_UNDEFINED_AVERAGE,
    AQB_ERR_NO_BOUNDING_CAP,
    AQB_ERR_INTERNAL
} aqb_status;

const char* aqb_status_name(aqb_status status);

/* Message describing the most recent failure on this thread ("" if none). */
const char* aqb_last_error(void);

const char* aqb_version(void);

void aqb_string_free(char* s);

/* ------------------------------------------------------------------ *
 * Config-driven commands.  Each takes the pipeline config as a JSON
 * text and returns the command's report as JSON.
 * ------------------------------------------------------------------ */

/* Interval for the configured query/method; JSON fields l and u are null
 * when that side is unavailable (e.g. no full-coverage matching). */
aqb_status aqb_cmd_bound(const char* config_json, char** out_json);

/* Same report, computed by exhaustive enumeration (small fixtures only). */
aqb_status aqb_cmd_oracle(const char* config_json, char** out_json);

/* Generates a synthetic augmenting table; returns the written paths. */
aqb_status aqb_cmd_synth(const char* config_json, char** out_json);

/* Runs the evaluation workload; returns the summary JSON. */
aqb_status aqb_cmd_eval(const char* config_json, char** out_json);

/* ------------------------------------------------------------------ *
 * Handle-based access for embedders that reuse a loaded dataset.
 * ------------------------------------------------------------------ */

typedef struct aqb_dataset aqb_dataset;   /* relations + groups + candidates */
typedef struct aqb_interval aqb_interval; /* one computed bound report */

/* Loads relations and builds (or imports) the candidate set. */
aqb_status aqb_dataset_open(const char* config_json, aqb_dataset** out);
void aqb_dataset_free(aqb_dataset* dataset);

aqb_status aqb_dataset_rows(const aqb_dataset* dataset, int* base_rows, int* groups,
                            long long* candidate_edges);

/* max candidate degree / median positive degree. */
aqb_status aqb_dataset_skew(const aqb_dataset* dataset, double* out);

/* Nearest-rank percentile of positive candidate degrees (>= 1). */
aqb_status aqb_dataset_percentile_cap(const aqb_dataset* dataset, double percentile, int* out);

aqb_status aqb_dataset_export_candidates(const aqb_dataset* dataset, const char* csv_path);

/* Bounds for `query` using `method` (ga, ga_c, max_sum, max_sum_c); cap > 0
 * overrides the configured cap.  Infeasible minimums are reported through
 * aqb_interval_has_lower(), not as an error status. */
aqb_status aqb_bound(const aqb_dataset* dataset, const char* query, const char* method, int cap,
                     aqb_interval** out);

/* Brute-force reference bounds for the same query (guarded by size). */
aqb_status aqb_oracle(const aqb_dataset* dataset, const char* query, int cap, aqb_interval** out);

int aqb_interval_has_lower(const aqb_interval* interval);
double aqb_interval_lower(const aqb_interval* interval); /* 0 when absent */
double aqb_interval_upper(const aqb_interval* interval);
int aqb_interval_cap(const aqb_interval* interval);
aqb_status aqb_interval_json(const aqb_interval* interval, char** out_json);
void aqb_interval_free(aqb_interval* interval);

#ifdef __cplusplus
} /* extern "C" */
#endif

#endif /* AQBOUND_H */
