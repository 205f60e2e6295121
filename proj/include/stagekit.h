/* stagekit: C API for the sleep-staging evaluation toolkit.
 *
 * Conventions:
 *   - Every function returns a status code; SK_OK means success.
 *   - On failure, sk_last_error() returns a thread-local message.
 *   - Stage codes: W=0, N1=1, N2=2, N3=3, REM=4; -1 marks a masked epoch.
 *   - Probability rows are arrays of 5 doubles in that stage order.
 *   - Strings returned through char** are owned by the caller and must be
 *     released with sk_string_free().
 */
#ifndef STAGEKIT_H
#define STAGEKIT_H

#ifdef __cplusplus
extern "C" {
#endif

typedef enum sk_status {
  SK_OK = 0,
  SK_ERR_ARGUMENT = 1, /* bad shapes, unknown names, invalid config */
  SK_ERR_PARSE = 2,    /* malformed input files */
  SK_ERR_DOMAIN = 3,   /* degenerate data: no scored epochs, single class, ... */
  SK_ERR_IO = 4,       /* missing or unwritable files */
  SK_ERR_INTERNAL = 5
} sk_status;

const char* sk_last_error(void);
void sk_string_free(char* s);

/* --- numeric primitives ------------------------------------------------- */

/* Element-wise average of member hypnodensities.
 * members: m_count blocks of t_count rows of 5; out: t_count rows of 5. */
sk_status sk_soft_vote(const double* members, int m_count, int t_count, double* out);

/* Stage code with maximal probability; ties fall to the lowest code. */
sk_status sk_argmax_stage(const double* row, int* out_stage);

/* Shannon entropy (nats) of a probability row of length n. */
sk_status sk_shannon_entropy(const double* p, int n, double* out);

sk_status sk_cosine_similarity(const double* a, const double* b, int n, double* out);

/* Per-scorer soft-agreement. stages: s_count x t_count stage codes
 * (row-major, -1 = masked); out: s_count values. */
sk_status sk_soft_agreement(const int* stages, int s_count, int t_count, double* out);

/* One-sided paired Wilcoxon signed-rank test of a > b. Any output pointer
 * may be NULL. */
sk_status sk_wilcoxon_one_sided(const double* a, const double* b, int n, double* w,
                                double* z, double* p, double* effect_r, int* n_effective);

/* Holm-Bonferroni adjustment of m p-values, returned in input order. */
sk_status sk_holm_adjust(const double* p, int m, double* out);

/* Mann-Whitney rank ROC-AUC with ties counted 0.5; labels are 0/1. */
sk_status sk_roc_auc(const double* scores, const int* labels, int n, double* out);

/* --- GAMLSS expected values --------------------------------------------- */

typedef struct sk_gamlss_table sk_gamlss_table;

sk_status sk_gamlss_table_load_file(const char* path, sk_gamlss_table** out);
sk_status sk_gamlss_table_load_text(const char* text, sk_gamlss_table** out);
void sk_gamlss_table_free(sk_gamlss_table* table);

/* Expected outcome value for a covariate profile. ahi/plmi are raw indices
 * (events per hour); the /10 scaling is applied internally. The age offsets
 * are additive spline contributions to the mu and sigma predictors. */
sk_status sk_gamlss_expected_value(const sk_gamlss_table* table, const char* outcome,
                                   int gender_male, double ahi, double plmi,
                                   double age_offset_mu, double age_offset_sigma,
                                   double* out);

/* --- batch commands ------------------------------------------------------ */

/* Run a batch subcommand ("ensemble", "evaluate", "markers", "disagree",
 * "stats", "gamlss-predict") with a JSON configuration string. On success
 * *report_json receives the serialized JSON report. */
sk_status sk_run_command(const char* command, const char* config_json, char** report_json);

#ifdef __cplusplus
} /* extern "C" */
#endif

#endif /* STAGEKIT_H */
