#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <cstring>
#include <filesystem>
#include <string>

#include "bsqlab.h"

namespace fs = std::filesystem;

TEST_CASE("box lifecycle and validation through the C API") {
    bsq_box* box = nullptr;
    REQUIRE(bsq_box_create(2.0 * M_PI, 16, 2.0 / 3.0, &box) == BSQ_OK);
    CHECK(bsq_box_resolution(box) == 16);
    CHECK(bsq_box_period(box) == doctest::Approx(2.0 * M_PI));
    bsq_box_destroy(box);

    bsq_box* bad = nullptr;
    CHECK(bsq_box_create(2.0 * M_PI, 7, 2.0 / 3.0, &bad) == BSQ_ERR_DOMAIN);
    CHECK(std::strlen(bsq_last_error()) > 0);
    CHECK(bsq_box_create(2.0 * M_PI, 16, 2.0 / 3.0, nullptr) == BSQ_ERR_INVALID_ARGUMENT);
}

TEST_CASE("factory, norms and diagnostics through the C API") {
    bsq_box* box = nullptr;
    REQUIRE(bsq_box_create(2.0 * M_PI * 16.0, 16, 2.0 / 3.0, &box) == BSQ_OK);

    bsq_field* theta = nullptr;
    REQUIRE(bsq_make_gevrey_scalar(box, 1.0, -1.0, 1e-2, 42, "exp-decay", &theta) == BSQ_OK);
    int is_vec = -1;
    CHECK(bsq_field_is_vector(theta, &is_vec) == BSQ_OK);
    CHECK(is_vec == 0);

    double norm = 0.0;
    CHECK(bsq_sobolev_norm(theta, -1.0, &norm) == BSQ_OK);
    CHECK(norm == doctest::Approx(1e-2).epsilon(1e-9));
    CHECK(bsq_gevrey_norm(theta, -1.0, 0.0, &norm) == BSQ_OK);
    CHECK(norm == doctest::Approx(1e-2).epsilon(1e-9));
    CHECK(bsq_lp_norm(theta, 2.0, &norm) == BSQ_OK);
    CHECK(norm > 0.0);

    double radius = 0.0, r2 = 0.0;
    CHECK(bsq_radius_estimate(theta, &radius, &r2) == BSQ_OK);
    CHECK(std::abs(radius - 1.0) <= 0.05);
    CHECK(r2 >= 0.99);

    double besov = 0.0;
    CHECK(bsq_besov_norm(theta, &besov) == BSQ_OK);
    CHECK(besov > 0.0);

    bsq_field* u = nullptr;
    REQUIRE(bsq_make_gevrey_vector(box, 1.0, 1.0, 1e-2, 43, "exp-decay", 1, &u) == BSQ_OK);
    CHECK(bsq_besov_norm(u, &besov) == BSQ_ERR_DOMAIN); // scalar-only entry point

    double sup = -1.0;
    CHECK(bsq_annulus_sup(u, 0, &sup) == BSQ_OK);
    CHECK(sup >= 0.0);
    CHECK(bsq_annulus_sup(u, 9, &sup) == BSQ_ERR_UNSUPPORTED);

    double indicator = -1.0;
    CHECK(bsq_liouville_indicator(u, theta, &indicator) == BSQ_OK);
    CHECK(indicator >= 0.0);

    CHECK(std::isnan(bsq_control_gevrey_constant(-1.0)));
    CHECK(bsq_control_gevrey_constant(1.5) == doctest::Approx(1.0));

    const std::string path = (fs::temp_directory_path() / "bsq_capi_field.bin").string();
    CHECK(bsq_field_save(u, path.c_str()) == BSQ_OK);
    bsq_field* loaded = nullptr;
    CHECK(bsq_field_load(path.c_str(), &loaded) == BSQ_OK);
    CHECK(bsq_field_is_vector(loaded, &is_vec) == BSQ_OK);
    CHECK(is_vec == 1);

    bsq_field_destroy(loaded);
    bsq_field_destroy(u);
    bsq_field_destroy(theta);
    bsq_box_destroy(box);
}

TEST_CASE("config validation through the C API") {
    const char* good = R"({"scenario": "homogeneous",
                           "box": {"period_L": 50.26548245743669, "resolution_N": 16},
                           "forces": {"gvec": {"amplitude": 0.1}}})";
    char* echo = nullptr;
    REQUIRE(bsq_validate_config(good, &echo, nullptr) == BSQ_OK);
    REQUIRE(echo != nullptr);
    CHECK(std::string(echo).find("\"scenario\": \"homogeneous\"") != std::string::npos);
    bsq_string_free(echo);

    const char* bad = R"({"scenario": "homogeneous",
                          "box": {"period_L": 50.26548245743669, "resolution_N": 16},
                          "forces": {"gvec": {"amplitude": 0.1}, "f": {"amplitude": 1.0}}})";
    char* diagnostics = nullptr;
    CHECK(bsq_validate_config(bad, nullptr, &diagnostics) == BSQ_ERR_CONFIG);
    REQUIRE(diagnostics != nullptr);
    CHECK(std::string(diagnostics).find("forces.f") != std::string::npos);
    bsq_string_free(diagnostics);

    CHECK(bsq_validate_config("{not json", nullptr, nullptr) == BSQ_ERR_CONFIG);
}

TEST_CASE("scenario run through the C API with dir and seed overrides") {
    const std::string dir = (fs::temp_directory_path() / "bsqlab_capi_run").string();
    fs::remove_all(dir);
    const char* cfg = R"({"scenario": "homogeneous",
                          "box": {"period_L": 50.26548245743669, "resolution_N": 16},
                          "seed": 2,
                          "forces": {"gvec": {"amplitude": 0.1}},
                          "evolution": {"steps": 8}})";
    char* summary = nullptr;
    REQUIRE(bsq_run_scenario(cfg, dir.c_str(), 17, &summary) == BSQ_OK);
    REQUIRE(summary != nullptr);
    const std::string text = summary;
    bsq_string_free(summary);
    CHECK(text.find("\"ok\": true") != std::string::npos);
    CHECK(fs::exists(fs::path(dir) / "summary.json"));
    CHECK(fs::exists(fs::path(dir) / "config_echo.json"));
}
