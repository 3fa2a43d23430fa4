#include "bsqlab.h"

#include <cmath>
#include <cstring>
#include <string>
#include <variant>

#include <json.hpp>

#include "diagnostics.hpp"
#include "field_io.hpp"
#include "forcing.hpp"
#include "norms.hpp"
#include "scenario.hpp"

namespace {

thread_local std::string g_last_error = "no error";

bsq_status status_of(const bsq::Error& e) {
    using bsq::ErrorCode;
    switch (e.code()) {
        case ErrorCode::config_error: return BSQ_ERR_CONFIG;
        case ErrorCode::non_convergence:
        case ErrorCode::contraction_failure:
        case ErrorCode::data_not_gevrey: return BSQ_ERR_NUMERICAL;
        case ErrorCode::io_error: return BSQ_ERR_IO;
        case ErrorCode::resolution_too_large:
        case ErrorCode::empty_annulus:
        case ErrorCode::insufficient_decay_range: return BSQ_ERR_UNSUPPORTED;
        case ErrorCode::domain_error:
        case ErrorCode::shape_mismatch:
        case ErrorCode::symmetry_violation:
        case ErrorCode::multiplier_domain:
        case ErrorCode::undefined_ratio: return BSQ_ERR_DOMAIN;
        default: return BSQ_ERR_INTERNAL;
    }
}

template <typename Fn>
bsq_status guarded(Fn&& fn) {
    try {
        return fn();
    } catch (const bsq::Error& e) {
        g_last_error = e.what();
        return status_of(e);
    } catch (const std::exception& e) {
        g_last_error = e.what();
        return BSQ_ERR_INTERNAL;
    } catch (...) {
        g_last_error = "unknown error";
        return BSQ_ERR_INTERNAL;
    }
}

char* dup_string(const std::string& s) {
    char* out = static_cast<char*>(std::malloc(s.size() + 1));
    if (out != nullptr) std::memcpy(out, s.c_str(), s.size() + 1);
    return out;
}

bsq_status invalid(const char* what) {
    g_last_error = what;
    return BSQ_ERR_INVALID_ARGUMENT;
}

} // namespace

struct bsq_box {
    bsq::BoxSpec spec;
};

struct bsq_field {
    bsq::AnyField value;
};

extern "C" {

const char* bsq_version(void) { return "bsqlab 1.0.0"; }

const char* bsq_last_error(void) { return g_last_error.c_str(); }

void bsq_string_free(char* s) { std::free(s); }

bsq_status bsq_box_create(double period_L, int resolution_N, double dealias_fraction, bsq_box** out) {
    if (out == nullptr) return invalid("bsq_box_create: out is NULL");
    return guarded([&]() {
        bsq::BoxSpec spec{period_L, resolution_N, dealias_fraction};
        spec.validate();
        *out = new bsq_box{spec};
        return BSQ_OK;
    });
}

void bsq_box_destroy(bsq_box* box) { delete box; }

double bsq_box_period(const bsq_box* box) { return box != nullptr ? box->spec.period_L : 0.0; }

int bsq_box_resolution(const bsq_box* box) { return box != nullptr ? box->spec.resolution_N : 0; }

void bsq_field_destroy(bsq_field* field) { delete field; }

bsq_status bsq_field_is_vector(const bsq_field* field, int* out) {
    if (field == nullptr || out == nullptr) return invalid("bsq_field_is_vector: NULL argument");
    *out = std::holds_alternative<bsq::VectorField>(field->value) ? 1 : 0;
    return BSQ_OK;
}

bsq_status bsq_field_save(const bsq_field* field, const char* path) {
    if (field == nullptr || path == nullptr) return invalid("bsq_field_save: NULL argument");
    return guarded([&]() {
        std::visit([&](const auto& f) { bsq::save_field(f, path); }, field->value);
        return BSQ_OK;
    });
}

bsq_status bsq_field_load(const char* path, bsq_field** out) {
    if (path == nullptr || out == nullptr) return invalid("bsq_field_load: NULL argument");
    return guarded([&]() {
        *out = new bsq_field{bsq::load_field(path)};
        return BSQ_OK;
    });
}

bsq_status bsq_make_gevrey_scalar(const bsq_box* box, double radius_r, double sobolev_s, double amplitude,
                                  uint64_t seed, const char* shape, bsq_field** out) {
    if (box == nullptr || shape == nullptr || out == nullptr)
        return invalid("bsq_make_gevrey_scalar: NULL argument");
    return guarded([&]() {
        bsq::ForceSpec spec;
        spec.radius_r = radius_r;
        spec.sobolev_exponent_s = sobolev_s;
        spec.amplitude = amplitude;
        spec.seed = seed;
        spec.spectrum_shape = bsq::spectrum_shape_from_string(shape);
        *out = new bsq_field{bsq::make_gevrey_scalar(spec, box->spec)};
        return BSQ_OK;
    });
}

bsq_status bsq_make_gevrey_vector(const bsq_box* box, double radius_r, double sobolev_s, double amplitude,
                                  uint64_t seed, const char* shape, int divergence_free, bsq_field** out) {
    if (box == nullptr || shape == nullptr || out == nullptr)
        return invalid("bsq_make_gevrey_vector: NULL argument");
    return guarded([&]() {
        bsq::ForceSpec spec;
        spec.radius_r = radius_r;
        spec.sobolev_exponent_s = sobolev_s;
        spec.amplitude = amplitude;
        spec.seed = seed;
        spec.spectrum_shape = bsq::spectrum_shape_from_string(shape);
        *out = new bsq_field{bsq::make_gevrey_vector(spec, box->spec, divergence_free != 0)};
        return BSQ_OK;
    });
}

bsq_status bsq_sobolev_norm(const bsq_field* field, double s, double* out) {
    if (field == nullptr || out == nullptr) return invalid("bsq_sobolev_norm: NULL argument");
    return guarded([&]() {
        *out = std::visit([s](const auto& f) { return bsq::sobolev_norm(f, s); }, field->value);
        return BSQ_OK;
    });
}

bsq_status bsq_gevrey_norm(const bsq_field* field, double s, double r, double* out) {
    if (field == nullptr || out == nullptr) return invalid("bsq_gevrey_norm: NULL argument");
    return guarded([&]() {
        *out = std::visit([s, r](const auto& f) { return bsq::gevrey_norm(f, s, r); }, field->value);
        return BSQ_OK;
    });
}

bsq_status bsq_lp_norm(const bsq_field* field, double p, double* out) {
    if (field == nullptr || out == nullptr) return invalid("bsq_lp_norm: NULL argument");
    return guarded([&]() {
        *out = std::visit([p](const auto& f) { return bsq::lp_norm(f, p); }, field->value);
        return BSQ_OK;
    });
}

bsq_status bsq_radius_estimate(const bsq_field* field, double* radius, double* r_squared) {
    if (field == nullptr || radius == nullptr) return invalid("bsq_radius_estimate: NULL argument");
    return guarded([&]() {
        const bsq::RadiusEstimate est =
            std::visit([](const auto& f) { return bsq::radius_estimate(f); }, field->value);
        *radius = est.radius;
        if (r_squared != nullptr) *r_squared = est.r_squared;
        return BSQ_OK;
    });
}

bsq_status bsq_besov_norm(const bsq_field* field, double* out) {
    if (field == nullptr || out == nullptr) return invalid("bsq_besov_norm: NULL argument");
    return guarded([&]() {
        const auto* scalar = std::get_if<bsq::ScalarField>(&field->value);
        if (scalar == nullptr)
            throw bsq::Error(bsq::ErrorCode::domain_error, "bsq_besov_norm: expects a scalar field");
        *out = bsq::besov_norm(*scalar).value;
        return BSQ_OK;
    });
}

bsq_status bsq_annulus_sup(const bsq_field* field, int k, double* out) {
    if (field == nullptr || out == nullptr) return invalid("bsq_annulus_sup: NULL argument");
    return guarded([&]() {
        *out = std::visit([k](const auto& f) { return bsq::annulus_sup(f, k); }, field->value);
        return BSQ_OK;
    });
}

bsq_status bsq_liouville_indicator(const bsq_field* u, const bsq_field* theta, double* out) {
    if (u == nullptr || theta == nullptr || out == nullptr)
        return invalid("bsq_liouville_indicator: NULL argument");
    return guarded([&]() {
        const auto* uv = std::get_if<bsq::VectorField>(&u->value);
        const auto* ts = std::get_if<bsq::ScalarField>(&theta->value);
        if (uv == nullptr || ts == nullptr)
            throw bsq::Error(bsq::ErrorCode::domain_error,
                             "bsq_liouville_indicator: expects (vector u, scalar theta)");
        *out = bsq::liouville_indicator(*uv, *ts).indicator;
        return BSQ_OK;
    });
}

double bsq_control_gevrey_constant(double r) {
    if (!(r > 0.0)) return std::nan("");
    return bsq::control_gevrey_constant(r);
}

bsq_status bsq_validate_config(const char* json_text, char** echo_json, char** diagnostics) {
    if (json_text == nullptr) return invalid("bsq_validate_config: json_text is NULL");
    if (diagnostics != nullptr) *diagnostics = nullptr;
    try {
        const bsq::ScenarioConfig cfg = bsq::validate_config(json_text);
        if (echo_json != nullptr) *echo_json = dup_string(bsq::config_echo_json(cfg));
        return BSQ_OK;
    } catch (const bsq::ConfigError& e) {
        g_last_error = e.what();
        if (diagnostics != nullptr) {
            std::string joined;
            for (const auto& m : e.diagnostics()) joined += m + "\n";
            *diagnostics = dup_string(joined);
        }
        return BSQ_ERR_CONFIG;
    } catch (const std::exception& e) {
        g_last_error = e.what();
        return BSQ_ERR_INTERNAL;
    }
}

bsq_status bsq_run_scenario(const char* json_text, const char* out_dir_override, int64_t seed_override,
                            char** summary_json) {
    if (json_text == nullptr) return invalid("bsq_run_scenario: json_text is NULL");
    return guarded([&]() {
        bsq::ScenarioConfig cfg = bsq::validate_config(json_text);
        if (out_dir_override != nullptr) cfg.output_dir = out_dir_override;
        if (seed_override >= 0) {
            // Re-derive the per-channel seeds that were defaulted from the
            // config seed by revalidating the adjusted echo.
            nlohmann::json j = nlohmann::json::parse(json_text);
            j["seed"] = static_cast<std::uint64_t>(seed_override);
            cfg = bsq::validate_config(j.dump());
            if (out_dir_override != nullptr) cfg.output_dir = out_dir_override;
        }
        const bsq::ScenarioOutcome outcome = bsq::run_scenario(cfg);
        if (summary_json != nullptr) {
            nlohmann::json checks = nlohmann::json::array();
            for (const auto& c : outcome.checks)
                checks.push_back({{"name", c.name},
                                  {"status", c.status == bsq::CheckStatus::pass     ? "PASS"
                                             : c.status == bsq::CheckStatus::fail   ? "FAIL"
                                                                                    : "RECORDED"},
                                  {"detail", c.detail}});
            const nlohmann::json summary = {{"scenario", outcome.scenario},
                                            {"ok", outcome.ok},
                                            {"failing_stage", outcome.failing_stage},
                                            {"output_dir", outcome.output_dir},
                                            {"checks", checks}};
            *summary_json = dup_string(summary.dump(2) + "\n");
        }
        if (!outcome.ok) {
            g_last_error = "scenario failed" +
                           (outcome.failing_stage.empty() ? std::string(" (check FAIL)")
                                                          : " at stage '" + outcome.failing_stage + "'");
            return BSQ_ERR_NUMERICAL;
        }
        return BSQ_OK;
    });
}

} // extern "C"
