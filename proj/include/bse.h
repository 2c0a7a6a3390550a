/*
 * bse: bulk/surface eigenproblem toolkit.
 *
 * C API over the solver core: opaque handles, integer status codes, and a
 * thread-local last-error message. All functions returning bse_status leave
 * their outputs untouched on failure.
 */
#ifndef BSE_H
#define BSE_H

#include <stdint.h>

#ifdef __cplusplus
extern "C" {
#endif

typedef enum bse_status {
  BSE_OK = 0,
  BSE_ERR_INVALID_ARGUMENT = 1,
  BSE_ERR_IO = 2,
  BSE_ERR_FORMAT = 3,
  BSE_ERR_INVARIANT = 4,
  BSE_ERR_NUMERIC = 5,
  BSE_ERR_NO_CONVERGENCE = 6
} bse_status;

typedef enum bse_boundary_label {
  BSE_GAMMA0 = 0, /* pinned (Dirichlet) boundary */
  BSE_GAMMA1 = 1  /* dynamic boundary */
} bse_boundary_label;

typedef struct bse_mesh bse_mesh;
typedef struct bse_system bse_system;
typedef struct bse_spectrum bse_spectrum;
typedef struct bse_oracle bse_oracle;
typedef struct bse_report bse_report;

const char* bse_version(void);

/* Message for the most recent failing call on this thread. */
const char* bse_last_error(void);

/* ---- provenance -----------------------------------------------------------
 * Structured outputs embed a provenance envelope: config echo (JSON text),
 * tool version, input content hashes, timestamp. Pass NULL fields to omit.
 */
typedef struct bse_provenance {
  const char* config_json;
  const char* timestamp;
  const char* const* input_paths; /* hashed on save */
  int input_count;
} bse_provenance;

bse_status bse_hash_file(const char* path, char* out, int out_size);

/* ---- mesh ---------------------------------------------------------------- */

bse_status bse_mesh_annulus(double r_inner, double r_outer, int n_radial,
                            int n_angular, bse_mesh** out);
bse_status bse_mesh_refine(const bse_mesh* mesh, bse_mesh** out);
bse_status bse_mesh_rotate(const bse_mesh* mesh, double angle, bse_mesh** out);
bse_status bse_mesh_load(const char* path, bse_mesh** out);
bse_status bse_mesh_save(const bse_mesh* mesh, const char* path);
void bse_mesh_free(bse_mesh* mesh);

int bse_mesh_vertex_count(const bse_mesh* mesh);
int bse_mesh_triangle_count(const bse_mesh* mesh);
int bse_mesh_boundary_count(const bse_mesh* mesh, bse_boundary_label label);

/* ---- discrete system ------------------------------------------------------ */

bse_status bse_system_build(const bse_mesh* mesh, bse_system** out);
void bse_system_free(bse_system* system);
int bse_system_dimension(const bse_system* system);

/* ---- eigensolver ----------------------------------------------------------- */

bse_status bse_solve_smallest(const bse_system* system, int k, double tol,
                              bse_spectrum** out);
bse_status bse_solve_dense(const bse_system* system, bse_spectrum** out);
void bse_spectrum_free(bse_spectrum* spectrum);

int bse_spectrum_count(const bse_spectrum* spectrum);
double bse_spectrum_lambda(const bse_spectrum* spectrum, int i);
double bse_spectrum_residual(const bse_spectrum* spectrum, int i);

bse_status bse_spectrum_save(const bse_spectrum* spectrum,
                             const bse_system* system, int with_vectors,
                             const bse_provenance* provenance,
                             const char* path);
bse_status bse_spectrum_load(const char* path, const bse_system* system,
                             bse_spectrum** out);

/* ---- radial oracle --------------------------------------------------------- */

/* lambda_max <= 0 requests automatic growth until the merged list (with
 * multiplicity) carries at least min_values entries. */
bse_status bse_oracle_find_modes(double r_inner, double r_outer, int dimension,
                                 int m_max, double lambda_max, int min_values,
                                 int threads, bse_oracle** out);
void bse_oracle_free(bse_oracle* oracle);

int bse_oracle_mode_count(const bse_oracle* oracle);
double bse_oracle_lambda(const bse_oracle* oracle, int i);
int bse_oracle_multiplicity(const bse_oracle* oracle, int i);
int bse_oracle_angular_mode(const bse_oracle* oracle, int i);

bse_status bse_oracle_save(const bse_oracle* oracle,
                           const bse_provenance* provenance, const char* path);

/* ---- verification ---------------------------------------------------------- */

typedef struct bse_verify_params {
  double r_inner;
  double r_outer;
  int n_radial;
  int n_angular;
  int k;
  double tol;
  int m_max;
  double lambda_max; /* <= 0: automatic */
  uint64_t seed;
  int levels;
  int conv_n_radial;
  int conv_n_angular;
  int threads;
} bse_verify_params;

/* Fills defaults matching the annulus-default preset. */
void bse_verify_params_init(bse_verify_params* params);

/* Runs all checks; returns BSE_OK even when checks fail (query the report). */
bse_status bse_verify_run(const bse_verify_params* params, bse_report** out);
void bse_report_free(bse_report* report);

int bse_report_passed(const bse_report* report); /* 1 iff no non-warning fail */
int bse_report_record_count(const bse_report* report);
bse_status bse_report_print(const bse_report* report);
bse_status bse_report_save(const bse_report* report,
                           const bse_provenance* provenance, const char* path);

/* ---- wave synthesis --------------------------------------------------------- */

/* Projects initial data from a JSON spec (mode coefficients or vertex
 * fields), samples the exact-in-time evolution on [0, t_end], and writes the
 * energy/probe CSV. */
bse_status bse_wave_run(const char* mesh_path, const char* spectrum_path,
                        const char* init_path, double t_end, int samples,
                        const int* probe_vertices, int probe_count,
                        const bse_provenance* provenance, const char* out_csv);

/* ---- VTK export -------------------------------------------------------------- */

bse_status bse_export_vtk(const char* mesh_path, const char* spectrum_path,
                          const char* title, const char* out_path);

#ifdef __cplusplus
}
#endif

#endif /* BSE_H */
