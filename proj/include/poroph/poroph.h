#ifndef POROPH_H
#define POROPH_H

/* C interface of the poroph library. All handles are opaque; every function
 * that can fail returns a pph_status and leaves a message retrievable through
 * pph_last_error() on the calling thread. Matrices cross the boundary as
 * column-major double arrays. Strings returned through char** are owned by the
 * caller and released with pph_string_free(). */

#include <stddef.h>
#include <stdint.h>

#if defined(_WIN32)
#define PPH_API __declspec(dllexport)
#elif defined(__GNUC__)
#define PPH_API __attribute__((visibility("default")))
#else
#define PPH_API
#endif

#ifdef __cplusplus
extern "C" {
#endif

typedef enum pph_status {
    PPH_OK = 0,
    PPH_ERR_INVALID_ARGUMENT = 1,
    PPH_ERR_CONFIG = 2,
    PPH_ERR_DIMENSION = 3,
    PPH_ERR_STRUCTURE = 4,
    PPH_ERR_SINGULAR = 5,
    PPH_ERR_INCONSISTENT = 6,
    PPH_ERR_BOUND = 7,
    PPH_ERR_IO = 8,
    PPH_ERR_STEP = 9,
    PPH_ERR_INTERNAL = 10
} pph_status;

typedef struct pph_scenario pph_scenario;
typedef struct pph_system pph_system;

PPH_API const char* pph_version(void);
PPH_API const char* pph_last_error(void);
PPH_API const char* pph_status_name(pph_status status);
PPH_API void pph_string_free(char* s);

/* scenarios */
PPH_API pph_status pph_scenario_load(const char* path, pph_scenario** out);
PPH_API pph_status pph_scenario_parse(const char* json_text, pph_scenario** out);
PPH_API void pph_scenario_free(pph_scenario* sc);
PPH_API pph_status pph_scenario_set_seed(pph_scenario* sc, uint64_t seed);
PPH_API pph_status pph_scenario_set_tol(pph_scenario* sc, double tol);

/* commands: `report` receives JSON, `passed` receives 1 or 0 */
PPH_API pph_status pph_cmd_check(const pph_scenario* sc, char** report, int* passed);
PPH_API pph_status pph_cmd_simulate(const pph_scenario* sc, const char* csv_path, char** report, int* passed);
PPH_API pph_status pph_cmd_compare(const pph_scenario* sc, char** report, int* passed);
PPH_API pph_status pph_cmd_export(const pph_scenario* sc, const char* dir, char** report, int* passed);

/* systems */
PPH_API pph_status pph_system_from_scenario(const pph_scenario* sc, pph_system** out);
/* tol <= 0 selects the scale-aware default */
PPH_API pph_status pph_system_create(size_t n, size_t m, const double* E, const double* J, const double* R,
                                     const double* G, double tol, pph_system** out);
PPH_API pph_status pph_system_load(const char* dir, pph_system** out);
PPH_API pph_status pph_system_save(const pph_system* sys, const char* dir);
PPH_API void pph_system_free(pph_system* sys);

PPH_API pph_status pph_system_dims(const pph_system* sys, size_t* n, size_t* m);
/* which: 'E', 'J', 'R' or 'G'; len must equal rows * cols */
PPH_API pph_status pph_system_matrix(const pph_system* sys, char which, double* buf, size_t len);
PPH_API pph_status pph_system_hamiltonian(const pph_system* sys, const double* z, size_t n, double* out);
PPH_API pph_status pph_system_output(const pph_system* sys, const double* z, size_t n, double* y, size_t m);
PPH_API pph_status pph_system_validate(const pph_system* sys, double tol, int* passed);
/* 0, 1 or 2 (at least 2) */
PPH_API pph_status pph_system_index(const pph_system* sys, int* index);
PPH_API pph_status pph_system_aggregate(const pph_system* a, const pph_system* b, pph_system** out);
/* F is m x m column-major */
PPH_API pph_status pph_system_feedback(const pph_system* sys, const double* F, size_t m, pph_system** out);

#ifdef __cplusplus
}
#endif

#endif /* POROPH_H */
