// extern "C" surface over the C++ core.
#include "tubeloc/tubeloc.h"

#include <exception>
#include <string>

#include "eval/pipeline.hpp"
#include "eval/sweep.hpp"

struct tubeloc_session {
  tubeloc::eval::PipelineConfig config;
  std::string last_error;
};

namespace {

constexpr const char* kVersion = "tubeloc 1.0.0";

tubeloc_status guard(tubeloc_session* session, const std::function<void()>& fn) {
  if (!session) return TUBELOC_ERR_INVALID_ARGUMENT;
  session->last_error.clear();
  try {
    fn();
    return TUBELOC_OK;
  } catch (const tubeloc::eval::StageError& e) {
    session->last_error = e.what();
    return TUBELOC_ERR_STAGE_FAILED;
  } catch (const std::invalid_argument& e) {
    session->last_error = e.what();
    return TUBELOC_ERR_INVALID_ARGUMENT;
  } catch (const std::exception& e) {
    session->last_error = e.what();
    return TUBELOC_ERR_INTERNAL;
  }
}

tubeloc_status run_stage(tubeloc_session* session, const char* out_dir,
                         void (*stage)(const tubeloc::eval::PipelineConfig&,
                                       const std::string&)) {
  if (!out_dir) return TUBELOC_ERR_INVALID_ARGUMENT;
  return guard(session, [&] { stage(session->config, out_dir); });
}

}  // namespace

extern "C" {

const char* tubeloc_version(void) { return kVersion; }

tubeloc_status tubeloc_session_create(const char* config_path, tubeloc_session** out_session) {
  if (!out_session) return TUBELOC_ERR_INVALID_ARGUMENT;
  *out_session = nullptr;
  auto session = new (std::nothrow) tubeloc_session();
  if (!session) return TUBELOC_ERR_INTERNAL;
  if (config_path) {
    try {
      session->config = tubeloc::eval::PipelineConfig::load(config_path);
    } catch (const std::exception& e) {
      delete session;
      return TUBELOC_ERR_BAD_CONFIG;
    }
  }
  *out_session = session;
  return TUBELOC_OK;
}

void tubeloc_session_destroy(tubeloc_session* session) { delete session; }

const char* tubeloc_session_last_error(const tubeloc_session* session) {
  return session ? session->last_error.c_str() : "null session";
}

tubeloc_status tubeloc_run_generate(tubeloc_session* s, const char* out_dir) {
  return run_stage(s, out_dir, &tubeloc::eval::run_generate);
}
tubeloc_status tubeloc_run_train(tubeloc_session* s, const char* out_dir) {
  return run_stage(s, out_dir, &tubeloc::eval::run_train);
}
tubeloc_status tubeloc_run_build_map(tubeloc_session* s, const char* out_dir) {
  return run_stage(s, out_dir, &tubeloc::eval::run_build_map);
}
tubeloc_status tubeloc_run_localize(tubeloc_session* s, const char* out_dir) {
  if (!out_dir) return TUBELOC_ERR_INVALID_ARGUMENT;
  return guard(s, [&] { tubeloc::eval::run_localize(s->config, out_dir); });
}
tubeloc_status tubeloc_run_evaluate(tubeloc_session* s, const char* out_dir) {
  if (!out_dir) return TUBELOC_ERR_INVALID_ARGUMENT;
  return guard(s, [&] { tubeloc::eval::run_evaluate(s->config, out_dir); });
}
tubeloc_status tubeloc_run_sweep(tubeloc_session* s, const char* out_dir) {
  if (!out_dir) return TUBELOC_ERR_INVALID_ARGUMENT;
  return guard(s, [&] { tubeloc::eval::run_sweep(s->config, out_dir); });
}
tubeloc_status tubeloc_run_perturb(tubeloc_session* s, const char* out_dir) {
  if (!out_dir) return TUBELOC_ERR_INVALID_ARGUMENT;
  return guard(s, [&] { tubeloc::eval::run_perturb(s->config, out_dir); });
}

tubeloc_status tubeloc_localize_image(tubeloc_session* s, const char* artifacts_dir,
                                      const char* image_path, tubeloc_pose* pose_out,
                                      int* zone_out, int* status_out, double* rms_out) {
  if (!artifacts_dir || !image_path) return TUBELOC_ERR_INVALID_ARGUMENT;
  return guard(s, [&] {
    const tubeloc::eval::Artifacts a(artifacts_dir);
    const auto model = tubeloc::classifier::read_model(a.model_file());
    const auto db = tubeloc::classifier::read_db(a.db_file());
    const auto partition = tubeloc::zones::read_partition(a.maps_dir());
    const auto image = tubeloc::read_pgm(image_path);
    const auto k = s->config.intrinsics();
    const auto res = tubeloc::zones::localize(image, model, db, partition, k,
                                              s->config.localize_config());
    if (pose_out) {
      const auto& p = res.best_pose();
      pose_out->position[0] = p.position.x();
      pose_out->position[1] = p.position.y();
      pose_out->position[2] = p.position.z();
      Eigen::Quaterniond q = p.rotation.quaternion().normalized();
      if (q.w() < 0) q.coeffs() = -q.coeffs();
      pose_out->quaternion[0] = q.w();
      pose_out->quaternion[1] = q.x();
      pose_out->quaternion[2] = q.y();
      pose_out->quaternion[3] = q.z();
    }
    if (zone_out) *zone_out = res.zone_id;
    if (status_out) *status_out = static_cast<int>(res.status);
    if (rms_out) *rms_out = res.final_rms;
  });
}

}  // extern "C"
