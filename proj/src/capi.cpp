#include "poroph/poroph.h"

#include "poroph/commands.hpp"
#include "poroph/dae_analysis.hpp"
#include "poroph/error.hpp"
#include "poroph/interconnect.hpp"
#include "poroph/phdae.hpp"
#include "poroph/scenario.hpp"

#include <cstdlib>
#include <cstring>
#include <new>
#include <string>

struct pph_scenario {
    poroph::Scenario sc;
};

struct pph_system {
    poroph::PhDae sys;
};

namespace {

thread_local std::string g_last_error;

pph_status fail(pph_status s, const char* what) {
    g_last_error = what;
    return s;
}

// Maps the library's exception hierarchy onto status codes.
template <typename F>
pph_status guarded(F&& body) {
    try {
        g_last_error.clear();
        body();
        return PPH_OK;
    } catch (const poroph::ConfigError& e) {
        return fail(PPH_ERR_CONFIG, e.what());
    } catch (const poroph::DimensionError& e) {
        return fail(PPH_ERR_DIMENSION, e.what());
    } catch (const poroph::StructureError& e) {
        return fail(PPH_ERR_STRUCTURE, e.what());
    } catch (const poroph::SingularError& e) {
        return fail(PPH_ERR_SINGULAR, e.what());
    } catch (const poroph::InconsistentStateError& e) {
        return fail(PPH_ERR_INCONSISTENT, e.what());
    } catch (const poroph::BoundViolationError& e) {
        return fail(PPH_ERR_BOUND, e.what());
    } catch (const poroph::IoError& e) {
        return fail(PPH_ERR_IO, e.what());
    } catch (const poroph::StepError& e) {
        return fail(PPH_ERR_STEP, (std::string(e.what()) + " (step " + std::to_string(e.step()) + ")").c_str());
    } catch (const poroph::Error& e) {
        return fail(PPH_ERR_INTERNAL, e.what());
    } catch (const std::bad_alloc&) {
        return fail(PPH_ERR_INTERNAL, "out of memory");
    } catch (const std::exception& e) {
        return fail(PPH_ERR_INTERNAL, e.what());
    } catch (...) {
        return fail(PPH_ERR_INTERNAL, "unknown error");
    }
}

char* copy_string(const std::string& s) {
    char* out = static_cast<char*>(std::malloc(s.size() + 1));
    if (!out) throw std::bad_alloc();
    std::memcpy(out, s.c_str(), s.size() + 1);
    return out;
}

poroph::Mat from_buffer(const double* data, size_t rows, size_t cols) {
    poroph::Mat m(rows, cols);
    if (rows * cols > 0) {
        if (!data) throw poroph::ConfigError("null matrix buffer");
        m = Eigen::Map<const poroph::Mat>(data, static_cast<Eigen::Index>(rows), static_cast<Eigen::Index>(cols));
    }
    return m;
}

pph_status run_command(const poroph::CommandResult& r, char** report, int* passed) {
    if (report) *report = copy_string(r.report);
    if (passed) *passed = r.pass ? 1 : 0;
    return PPH_OK;
}

}  // namespace

extern "C" {

const char* pph_version(void) { return "0.1.0"; }

const char* pph_last_error(void) { return g_last_error.c_str(); }

const char* pph_status_name(pph_status status) {
    switch (status) {
    case PPH_OK: return "ok";
    case PPH_ERR_INVALID_ARGUMENT: return "invalid argument";
    case PPH_ERR_CONFIG: return "configuration error";
    case PPH_ERR_DIMENSION: return "dimension mismatch";
    case PPH_ERR_STRUCTURE: return "structure violation";
    case PPH_ERR_SINGULAR: return "singular system";
    case PPH_ERR_INCONSISTENT: return "inconsistent state";
    case PPH_ERR_BOUND: return "coefficient bound violated";
    case PPH_ERR_IO: return "i/o error";
    case PPH_ERR_STEP: return "time step failed";
    case PPH_ERR_INTERNAL: return "internal error";
    }
    return "unknown status";
}

void pph_string_free(char* s) { std::free(s); }

pph_status pph_scenario_load(const char* path, pph_scenario** out) {
    if (!path || !out) return fail(PPH_ERR_INVALID_ARGUMENT, "null argument");
    *out = nullptr;
    return guarded([&] { *out = new pph_scenario{poroph::load_scenario(path)}; });
}

pph_status pph_scenario_parse(const char* json_text, pph_scenario** out) {
    if (!json_text || !out) return fail(PPH_ERR_INVALID_ARGUMENT, "null argument");
    *out = nullptr;
    return guarded([&] { *out = new pph_scenario{poroph::parse_scenario(json_text)}; });
}

void pph_scenario_free(pph_scenario* sc) { delete sc; }

pph_status pph_scenario_set_seed(pph_scenario* sc, uint64_t seed) {
    if (!sc) return fail(PPH_ERR_INVALID_ARGUMENT, "null scenario");
    sc->sc.seed = seed;
    return PPH_OK;
}

pph_status pph_scenario_set_tol(pph_scenario* sc, double tol) {
    if (!sc) return fail(PPH_ERR_INVALID_ARGUMENT, "null scenario");
    if (!(tol > 0.0)) return fail(PPH_ERR_CONFIG, "tolerance must be > 0");
    sc->sc.tol = tol;
    return PPH_OK;
}

pph_status pph_cmd_check(const pph_scenario* sc, char** report, int* passed) {
    if (!sc) return fail(PPH_ERR_INVALID_ARGUMENT, "null scenario");
    return guarded([&] { run_command(poroph::cmd_check(sc->sc), report, passed); });
}

pph_status pph_cmd_simulate(const pph_scenario* sc, const char* csv_path, char** report, int* passed) {
    if (!sc || !csv_path) return fail(PPH_ERR_INVALID_ARGUMENT, "null argument");
    return guarded([&] { run_command(poroph::cmd_simulate(sc->sc, csv_path), report, passed); });
}

pph_status pph_cmd_compare(const pph_scenario* sc, char** report, int* passed) {
    if (!sc) return fail(PPH_ERR_INVALID_ARGUMENT, "null scenario");
    return guarded([&] { run_command(poroph::cmd_compare(sc->sc), report, passed); });
}

pph_status pph_cmd_export(const pph_scenario* sc, const char* dir, char** report, int* passed) {
    if (!sc || !dir) return fail(PPH_ERR_INVALID_ARGUMENT, "null argument");
    return guarded([&] { run_command(poroph::cmd_export(sc->sc, dir), report, passed); });
}

pph_status pph_system_from_scenario(const pph_scenario* sc, pph_system** out) {
    if (!sc || !out) return fail(PPH_ERR_INVALID_ARGUMENT, "null argument");
    *out = nullptr;
    return guarded([&] {
        const auto ops = poroph::scenario_operators(sc->sc);
        *out = new pph_system{poroph::build_formulation(sc->sc.formulation, ops, sc->sc.coupling())};
    });
}

pph_status pph_system_create(size_t n, size_t m, const double* E, const double* J, const double* R,
                             const double* G, double tol, pph_system** out) {
    if (!out) return fail(PPH_ERR_INVALID_ARGUMENT, "null argument");
    *out = nullptr;
    return guarded([&] {
        std::optional<double> t;
        if (tol > 0.0) t = tol;
        *out = new pph_system{poroph::PhDae::create(from_buffer(E, n, n), from_buffer(J, n, n), from_buffer(R, n, n),
                                                    from_buffer(G, n, m), {}, {}, t)};
    });
}

pph_status pph_system_load(const char* dir, pph_system** out) {
    if (!dir || !out) return fail(PPH_ERR_INVALID_ARGUMENT, "null argument");
    *out = nullptr;
    return guarded([&] { *out = new pph_system{poroph::load_phdae(dir)}; });
}

pph_status pph_system_save(const pph_system* sys, const char* dir) {
    if (!sys || !dir) return fail(PPH_ERR_INVALID_ARGUMENT, "null argument");
    return guarded([&] { poroph::save_phdae(sys->sys, dir); });
}

void pph_system_free(pph_system* sys) { delete sys; }

pph_status pph_system_dims(const pph_system* sys, size_t* n, size_t* m) {
    if (!sys) return fail(PPH_ERR_INVALID_ARGUMENT, "null system");
    if (n) *n = static_cast<size_t>(sys->sys.state_dim());
    if (m) *m = static_cast<size_t>(sys->sys.input_dim());
    return PPH_OK;
}

pph_status pph_system_matrix(const pph_system* sys, char which, double* buf, size_t len) {
    if (!sys || !buf) return fail(PPH_ERR_INVALID_ARGUMENT, "null argument");
    const poroph::Mat* m = nullptr;
    switch (which) {
    case 'E': m = &sys->sys.E(); break;
    case 'J': m = &sys->sys.J(); break;
    case 'R': m = &sys->sys.R(); break;
    case 'G': m = &sys->sys.G(); break;
    default: return fail(PPH_ERR_INVALID_ARGUMENT, "matrix selector must be E, J, R or G");
    }
    if (len != static_cast<size_t>(m->size())) return fail(PPH_ERR_DIMENSION, "buffer length mismatch");
    Eigen::Map<poroph::Mat>(buf, m->rows(), m->cols()) = *m;
    return PPH_OK;
}

pph_status pph_system_hamiltonian(const pph_system* sys, const double* z, size_t n, double* out) {
    if (!sys || !out || (n > 0 && !z)) return fail(PPH_ERR_INVALID_ARGUMENT, "null argument");
    return guarded([&] {
        *out = poroph::hamiltonian(sys->sys, Eigen::Map<const poroph::Vec>(z, static_cast<Eigen::Index>(n)));
    });
}

pph_status pph_system_output(const pph_system* sys, const double* z, size_t n, double* y, size_t m) {
    if (!sys || (n > 0 && !z) || (m > 0 && !y)) return fail(PPH_ERR_INVALID_ARGUMENT, "null argument");
    return guarded([&] {
        const poroph::Vec out =
            poroph::output(sys->sys, Eigen::Map<const poroph::Vec>(z, static_cast<Eigen::Index>(n)));
        if (static_cast<size_t>(out.size()) != m) throw poroph::DimensionError("output buffer length mismatch");
        Eigen::Map<poroph::Vec>(y, out.size()) = out;
    });
}

pph_status pph_system_validate(const pph_system* sys, double tol, int* passed) {
    if (!sys || !passed) return fail(PPH_ERR_INVALID_ARGUMENT, "null argument");
    return guarded([&] {
        std::optional<double> t;
        if (tol > 0.0) t = tol;
        *passed = poroph::validate_structure(sys->sys, t).verdict ? 1 : 0;
    });
}

pph_status pph_system_index(const pph_system* sys, int* index) {
    if (!sys || !index) return fail(PPH_ERR_INVALID_ARGUMENT, "null argument");
    return guarded([&] { *index = poroph::classify_index(sys->sys).as_int(); });
}

pph_status pph_system_aggregate(const pph_system* a, const pph_system* b, pph_system** out) {
    if (!a || !b || !out) return fail(PPH_ERR_INVALID_ARGUMENT, "null argument");
    *out = nullptr;
    return guarded([&] { *out = new pph_system{poroph::aggregate(a->sys, b->sys)}; });
}

pph_status pph_system_feedback(const pph_system* sys, const double* F, size_t m, pph_system** out) {
    if (!sys || !out) return fail(PPH_ERR_INVALID_ARGUMENT, "null argument");
    *out = nullptr;
    return guarded([&] {
        *out = new pph_system{poroph::feedback(sys->sys, poroph::FeedbackLaw(from_buffer(F, m, m)))};
    });
}

}  // extern "C"
