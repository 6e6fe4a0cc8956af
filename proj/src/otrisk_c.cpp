#include "otrisk/otrisk.h"

#include <cstring>
#include <exception>
#include <new>
#include <string>
#include <utility>
#include <vector>

#include "otrisk/errors.hpp"
#include "otrisk/experiments.hpp"
#include "otrisk/finite_lp.hpp"
#include "otrisk/paths.hpp"
#include "otrisk/robust_prob.hpp"

struct otk_finite_instance {
    otrisk::FiniteInstance inst;
};

struct otk_profile {
    otrisk::DistanceProfile profile;
};

namespace {

thread_local std::string g_last_error;

/// Runs the body and maps thrown library errors onto status codes; the
/// boundary never lets an exception escape into C callers.
template <class Fn>
otk_status guarded(Fn&& body) {
    try {
        body();
        g_last_error.clear();
        return OTK_OK;
    } catch (const otrisk::ParseError& e) {
        g_last_error = e.what();
        return OTK_PARSE_ERROR;
    } catch (const otrisk::Unsupported& e) {
        g_last_error = e.what();
        return OTK_UNSUPPORTED;
    } catch (const otrisk::UnboundedDual& e) {
        g_last_error = e.what();
        return OTK_UNBOUNDED_DUAL;
    } catch (const otrisk::InfeasibleCoupling& e) {
        g_last_error = e.what();
        return OTK_INFEASIBLE_COUPLING;
    } catch (const otrisk::InvalidProjection& e) {
        g_last_error = e.what();
        return OTK_INVALID_PROJECTION;
    } catch (const otrisk::ResolutionError& e) {
        g_last_error = e.what();
        return OTK_RESOLUTION_ERROR;
    } catch (const otrisk::SolverError& e) {
        g_last_error = e.what();
        return OTK_SOLVER_ERROR;
    } catch (const otrisk::InvalidInput& e) {
        g_last_error = e.what();
        return OTK_INVALID_INPUT;
    } catch (const std::bad_alloc&) {
        g_last_error = "out of memory";
        return OTK_RUNTIME_ERROR;
    } catch (const std::exception& e) {
        g_last_error = e.what();
        return OTK_RUNTIME_ERROR;
    } catch (...) {
        g_last_error = "unknown error";
        return OTK_RUNTIME_ERROR;
    }
}

otk_status require(bool ok, const char* message) {
    if (ok) {
        return OTK_OK;
    }
    g_last_error = message;
    return OTK_INVALID_INPUT;
}

char* copy_string(const std::string& s) {
    char* out = new char[s.size() + 1];
    std::memcpy(out, s.c_str(), s.size() + 1);
    return out;
}

} // namespace

extern "C" {

const char* otk_version(void) { return "otrisk 1.0.0"; }

const char* otk_last_error(void) { return g_last_error.c_str(); }

otk_status otk_finite_instance_create(const double* support, const double* mu,
                                      const double* f, const double* cost, size_t n,
                                      double delta, otk_finite_instance** out) {
    if (otk_status s = require(out && mu && f && cost && n > 0,
                               "otk_finite_instance_create: null argument")) {
        return s;
    }
    *out = nullptr;
    return guarded([&] {
        otrisk::FiniteInstance inst;
        inst.mu.assign(mu, mu + n);
        inst.f.assign(f, f + n);
        inst.cost.assign(cost, cost + n * n);
        if (support) {
            inst.support.assign(support, support + n);
        } else {
            inst.support.resize(n);
            for (size_t i = 0; i < n; ++i) {
                inst.support[i] = static_cast<double>(i);
            }
        }
        inst.delta = delta;
        inst.validate();
        *out = new otk_finite_instance{std::move(inst)};
    });
}

otk_status otk_finite_instance_from_json(const char* json_text, otk_finite_instance** out) {
    if (otk_status s =
            require(out && json_text, "otk_finite_instance_from_json: null argument")) {
        return s;
    }
    *out = nullptr;
    return guarded([&] {
        otrisk::FiniteInstance inst = otrisk::finite_instance_from_json(json_text);
        inst.validate();
        *out = new otk_finite_instance{std::move(inst)};
    });
}

void otk_finite_instance_destroy(otk_finite_instance* inst) { delete inst; }

otk_status otk_solve_primal_lp(const otk_finite_instance* inst, double* value,
                               double* transport_cost, size_t* iterations) {
    if (otk_status s = require(inst != nullptr, "otk_solve_primal_lp: null instance")) {
        return s;
    }
    return guarded([&] {
        const otrisk::PrimalSolution sol = otrisk::solve_primal_lp(inst->inst);
        if (value) {
            *value = sol.value;
        }
        if (transport_cost) {
            *transport_cost = sol.transport_cost;
        }
        if (iterations) {
            *iterations = sol.iterations;
        }
    });
}

otk_status otk_solve_dual(const otk_finite_instance* inst, double* value, double* lambda_star,
                          int* attained_at_zero) {
    if (otk_status s = require(inst != nullptr, "otk_solve_dual: null instance")) {
        return s;
    }
    return guarded([&] {
        const otrisk::DualSolution sol = otrisk::solve_dual(inst->inst);
        if (value) {
            *value = sol.value;
        }
        if (lambda_star) {
            *lambda_star = sol.lambda_star;
        }
        if (attained_at_zero) {
            *attained_at_zero = sol.attained_at_zero ? 1 : 0;
        }
    });
}

otk_status otk_duality_gap(const otk_finite_instance* inst, double* primal, double* dual,
                           double* gap) {
    if (otk_status s = require(inst != nullptr, "otk_duality_gap: null instance")) {
        return s;
    }
    return guarded([&] {
        const otrisk::GapReport r = otrisk::duality_gap(inst->inst);
        if (primal) {
            *primal = r.primal;
        }
        if (dual) {
            *dual = r.dual;
        }
        if (gap) {
            *gap = r.gap;
        }
    });
}

otk_status otk_profile_create(const double* distances, const double* weights, size_t n,
                              otk_profile** out) {
    if (otk_status s =
            require(out && distances && weights && n > 0, "otk_profile_create: null argument")) {
        return s;
    }
    *out = nullptr;
    return guarded([&] {
        std::vector<double> d(distances, distances + n);
        std::vector<double> w(weights, weights + n);
        *out = new otk_profile{otrisk::DistanceProfile(std::move(d), std::move(w))};
    });
}

void otk_profile_destroy(otk_profile* profile) { delete profile; }

otk_status otk_profile_h(const otk_profile* profile, double u, double* out) {
    if (otk_status s = require(profile && out, "otk_profile_h: null argument")) {
        return s;
    }
    return guarded([&] { *out = profile->profile.h_of_u(u); });
}

otk_status otk_worst_case_probability(const otk_profile* profile, double delta, double* value,
                                      double* lambda_star, double* u_star) {
    if (otk_status s = require(profile != nullptr, "otk_worst_case_probability: null profile")) {
        return s;
    }
    return guarded([&] {
        const otrisk::WorstCaseProbability wc =
            otrisk::worst_case_probability(profile->profile, delta);
        if (value) {
            *value = wc.value;
        }
        if (lambda_star) {
            *lambda_star = wc.lambda_star;
        }
        if (u_star) {
            *u_star = wc.u_star;
        }
    });
}

otk_status otk_brownian_crossing_prob(double level, double drift, double vol, double horizon,
                                      double* out) {
    if (otk_status s = require(out != nullptr, "otk_brownian_crossing_prob: null output")) {
        return s;
    }
    return guarded([&] { *out = otrisk::brownian_crossing_prob(level, drift, vol, horizon); });
}

otk_status otk_run_experiment(const char* command, const char* config_json, char** report_json,
                              char** csv_text) {
    if (otk_status s =
            require(command && report_json, "otk_run_experiment: null command or output")) {
        return s;
    }
    *report_json = nullptr;
    if (csv_text) {
        *csv_text = nullptr;
    }
    return guarded([&] {
        const std::string config = config_json ? config_json : "";
        otrisk::ExperimentOutput out = otrisk::run_experiment(command, config);
        *report_json = copy_string(out.report_json);
        if (csv_text) {
            *csv_text = copy_string(out.csv);
        }
    });
}

void otk_string_free(char* s) { delete[] s; }

} // extern "C"
