/* Copyright 2026 The LightAlign Authors
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *     http://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

/* C interface to the LightAlign entity-alignment library.
 *
 * All functions return la_status unless noted; LA_OK is 0. On failure,
 * la_last_error() describes the most recent error in the calling thread.
 * Objects returned through out-parameters are owned by the caller and must
 * be released with the matching la_*_free function. Passing NULL to a free
 * function is a no-op.
 */

#ifndef LIGHTALIGN_H_
#define LIGHTALIGN_H_

#include <stddef.h>
#include <stdint.h>

#if defined(_WIN32)
#define LA_API __declspec(dllexport)
#else
#define LA_API __attribute__((visibility("default")))
#endif

#ifdef __cplusplus
extern "C" {
#endif

typedef enum la_status {
  LA_OK = 0,
  LA_ERROR_INVALID_ARGUMENT = 1, /* bad parameter or shape mismatch */
  LA_ERROR_DATA = 2,             /* missing or malformed input data */
  LA_ERROR_INTERNAL = 3
} la_status;

typedef struct la_dataset la_dataset;
typedef struct la_config la_config;
typedef struct la_result la_result;
typedef struct la_trace_report la_trace_report;

LA_API const char* la_version(void);

/* Message for the last failure observed in this thread; never NULL. */
LA_API const char* la_last_error(void);

/* ---- configuration ---------------------------------------------------- */

/* Defaults: basic mode, dim 1024, rounds 2, topk 500, tau 0.05, 10 Sinkhorn
 * iterations, 5 self-training epochs, seed 42, reverse triples on, per-round
 * normalization on, threads 0 (auto). */
LA_API la_config* la_config_new(void);
LA_API void la_config_free(la_config* config);

LA_API la_status la_config_set_mode(la_config* config, const char* mode);
LA_API la_status la_config_set_dim(la_config* config, size_t dim);
LA_API la_status la_config_set_rounds(la_config* config, size_t rounds);
LA_API la_status la_config_set_topk(la_config* config, size_t topk);
LA_API la_status la_config_set_tau(la_config* config, double tau);
LA_API la_status la_config_set_sinkhorn_q(la_config* config, size_t q);
LA_API la_status la_config_set_iterative_epochs(la_config* config, size_t epochs);
LA_API la_status la_config_set_seed(la_config* config, uint64_t seed);
LA_API la_status la_config_set_reverse_triples(la_config* config, int enabled);
LA_API la_status la_config_set_per_round_l2(la_config* config, int enabled);
LA_API la_status la_config_set_threads(la_config* config, int threads);
LA_API la_status la_config_validate(const la_config* config);

/* ---- datasets ---------------------------------------------------------- */

/* Loads a dataset directory (ent_ids_1/2, triples_1/2, ref_ent_ids).
 * train_file selects explicit training pairs; pass NULL to split the
 * reference pairs with (ratio, split_seed) instead. */
LA_API la_status la_dataset_load(const char* dir, const char* train_file,
                                 double ratio, uint64_t split_seed,
                                 la_dataset** out);
LA_API void la_dataset_free(la_dataset* dataset);

/* side: 1 = source graph, 2 = target graph. Zero on a bad side. */
LA_API size_t la_dataset_entity_count(const la_dataset* dataset, int side);
LA_API size_t la_dataset_triple_count(const la_dataset* dataset, int side);
LA_API size_t la_dataset_seed_count(const la_dataset* dataset);
LA_API size_t la_dataset_test_count(const la_dataset* dataset);
LA_API uint64_t la_dataset_fingerprint(const la_dataset* dataset);

/* Writes a synthetic permuted-copy dataset to out_dir. */
LA_API la_status la_synth(const char* out_dir, size_t entities, size_t triples,
                          double noise, uint64_t seed);

/* ---- alignment --------------------------------------------------------- */

/* Runs the configured pipeline. Literal mode requires both embedding file
 * paths; other modes ignore them (pass NULL). */
LA_API la_status la_align(const la_dataset* dataset, const la_config* config,
                          const char* source_embeddings,
                          const char* target_embeddings, la_result** out);
LA_API void la_result_free(la_result* result);

LA_API double la_result_hits1(const la_result* result);
LA_API double la_result_hits10(const la_result* result);
LA_API double la_result_mrr(const la_result* result);
LA_API double la_result_seconds_total(const la_result* result);
LA_API size_t la_result_pair_count(const la_result* result);

/* Fetches one aligned pair in the dataset's file-ID space. */
LA_API la_status la_result_pair(const la_result* result, size_t index,
                                int64_t* source_id, int64_t* target_id,
                                double* score);

/* Writes pairs.tsv and metrics.json under out_dir. */
LA_API la_status la_result_write(const la_result* result, const char* out_dir);

/* ---- tracing ----------------------------------------------------------- */

/* Explains one prediction with exact one-hot labels over the subgraph
 * `hops` steps around the three file-ID-addressed entities. top_m anchors
 * are reported per round. */
LA_API la_status la_trace(const la_dataset* dataset, int64_t source_id,
                          int64_t predicted_id, int64_t gold_id, size_t hops,
                          size_t rounds, size_t top_m, int reverse_triples,
                          la_trace_report** out);
LA_API void la_trace_free(la_trace_report* report);

/* Report text, owned by the report. machine_readable != 0 selects the
 * `key TAB value` form. */
LA_API const char* la_trace_text(const la_trace_report* report,
                                 int machine_readable);

/* ---- standalone evaluation --------------------------------------------- */

/* Scores a pairs.tsv-style file (src TAB tgt TAB score, file IDs) against a
 * two-column reference file. */
LA_API la_status la_eval_files(const char* pairs_path, const char* ref_path,
                               double* hits1, double* hits10, double* mrr);

#ifdef __cplusplus
} /* extern "C" */
#endif

#endif /* LIGHTALIGN_H_ */
