#ifndef CURVGRAPH_CURVGRAPH_H
#define CURVGRAPH_CURVGRAPH_H

#include <stddef.h>
#include <stdint.h>

#if defined(_WIN32)
#  if defined(CURVGRAPH_BUILDING_LIBRARY)
#    define CG_API __declspec(dllexport)
#  else
#    define CG_API __declspec(dllimport)
#  endif
#else
#  define CG_API __attribute__((visibility("default")))
#endif

#ifdef __cplusplus
extern "C" {
#endif

typedef struct cg_chain cg_chain;

typedef enum cg_status {
  CG_OK = 0,
  CG_INVALID_ARGUMENT = 1,
  CG_ROW_SUM_VIOLATION = 2,
  CG_NOT_IRREDUCIBLE = 3,
  CG_NOT_REVERSIBLE = 4,
  CG_UNSUPPORTED_SIZE = 5,
  CG_NON_POSITIVE_FIELD = 6,
  CG_NEGATIVE_DENSITY = 7,
  CG_DIMENSION_MISMATCH = 8,
  CG_NON_FINITE_DISTANCE = 9,
  CG_BAD_PARTITION = 10,
  CG_TRUNCATION_FAILURE = 11,
  CG_DEGENERATE_FORM = 12,
  CG_LP_INFEASIBLE = 13,
  CG_UNBOUNDED = 14,
  CG_INFEASIBLE_MIXTURE = 15,
  CG_IO_ERROR = 16,
  CG_INTERNAL = 17
} cg_status;

typedef enum cg_distance_kind { CG_DISTANCE_GRAPH = 0, CG_DISTANCE_GAMMA = 1 } cg_distance_kind;

/* Message of the last failed call on this thread ("" if none). */
CG_API const char* cg_last_error(void);
CG_API const char* cg_status_name(cg_status status);
CG_API const char* cg_version(void);

/* 0 restores the default worker count. */
CG_API void cg_set_threads(size_t threads);

/* labels may be NULL (states are named "0".."n-1"). */
CG_API cg_status cg_chain_from_triplets(size_t n, const char* const* labels, const size_t* src,
                                        const size_t* dst, const double* rate, size_t count,
                                        cg_chain** out);
/* name: two_point, hypercube, cycle, complete. */
CG_API cg_status cg_chain_standard(const char* name, size_t n, cg_chain** out);
CG_API cg_status cg_chain_load(const char* path, int complete_diagonal, cg_chain** out);
/* meta_json may be NULL. */
CG_API cg_status cg_chain_save(const cg_chain* chain, const char* path, const char* meta_json);
CG_API void cg_chain_free(cg_chain* chain);

CG_API size_t cg_chain_size(const cg_chain* chain);
/* Label of state i, owned by the chain; NULL when out of range. */
CG_API const char* cg_chain_label(const cg_chain* chain, size_t i);
/* out has room for cg_chain_size(chain) values. */
CG_API cg_status cg_chain_stationary(const cg_chain* chain, double* out);
CG_API cg_status cg_chain_laziness(const cg_chain* chain, double* out);

CG_API cg_status cg_cd_curvature(const cg_chain* chain, double* out);
CG_API cg_status cg_cde_curvature_upper(const cg_chain* chain, size_t starts, uint64_t seed,
                                        double* out);
CG_API cg_status cg_coarse_ricci(const cg_chain* chain, double* out);
/* out has room for n*n values, row-major. */
CG_API cg_status cg_distance(const cg_chain* chain, cg_distance_kind kind, double* out);

/* JSON in, JSON out. Returned strings are released with cg_string_free.
 *
 * analyze options: {"what":["cd","cde","coarse","dgamma","functionals"],
 *   "starts":64, "seed":0, "pairs":"all"|"edges", "tol":1e-7, "density":[...]}
 * audit config: {"suites":"all", "trials":200, "seed":0, "cde_starts":64,
 *   "kappa":x, "kappa_e":x, "kappa_c":x, "chain_name":"..."}
 *   *violations receives the number of violations.
 * transport request: {"mu":[...], "nu":[...], "cost":"w1"|"w2"|"weak",
 *   "distance":"graph"|"gamma"} */
CG_API cg_status cg_analyze_json(const cg_chain* chain, const char* options_json, char** out);
CG_API cg_status cg_audit_json(const cg_chain* chain, const char* config_json, char** out,
                               size_t* violations);
CG_API cg_status cg_transport_json(const cg_chain* chain, const char* request_json, char** out);
CG_API void cg_string_free(char* s);

#ifdef __cplusplus
}
#endif

#endif
