/*
 * tubeloc — hybrid image-based localization in a synthetic endoscopy world:
 * few-shot zone classification plus two-step geometric pose refinement.
 *
 * C API over the C++ core. A session wraps one parsed pipeline configuration;
 * every stage writes deterministic artifacts under an output directory and
 * returns an error code, with a per-session diagnostic message.
 */
#ifndef TUBELOC_TUBELOC_H
#define TUBELOC_TUBELOC_H

#if defined(_WIN32)
#  define TUBELOC_API __declspec(dllexport)
#else
#  define TUBELOC_API __attribute__((visibility("default")))
#endif

#ifdef __cplusplus
extern "C" {
#endif

typedef enum tubeloc_status {
  TUBELOC_OK = 0,
  TUBELOC_ERR_INVALID_ARGUMENT = 1,
  TUBELOC_ERR_BAD_CONFIG = 2,
  TUBELOC_ERR_IO = 3,
  TUBELOC_ERR_STAGE_FAILED = 4, /* diagnostic names the failing stage */
  TUBELOC_ERR_INTERNAL = 5
} tubeloc_status;

/* Opaque session handle. Not thread-safe; use one per thread. */
typedef struct tubeloc_session tubeloc_session;

TUBELOC_API const char* tubeloc_version(void);

/* Parses the JSON config file. *out_session is owned by the caller and must
 * be released with tubeloc_session_destroy. A NULL config_path loads the
 * built-in defaults. */
TUBELOC_API tubeloc_status tubeloc_session_create(const char* config_path,
                                                  tubeloc_session** out_session);
TUBELOC_API void tubeloc_session_destroy(tubeloc_session* session);

/* Diagnostic for the most recent failing call on this session; empty string
 * when the last call succeeded. The pointer stays valid until the next call
 * on the session. */
TUBELOC_API const char* tubeloc_session_last_error(const tubeloc_session* session);

/* Pipeline stages. out_dir receives the stage artifacts (datasets, model,
 * descriptor database, zone maps, CSV reports). Stages reuse upstream
 * artifacts already present under out_dir and regenerate anything missing. */
TUBELOC_API tubeloc_status tubeloc_run_generate(tubeloc_session* session, const char* out_dir);
TUBELOC_API tubeloc_status tubeloc_run_train(tubeloc_session* session, const char* out_dir);
TUBELOC_API tubeloc_status tubeloc_run_build_map(tubeloc_session* session, const char* out_dir);
TUBELOC_API tubeloc_status tubeloc_run_localize(tubeloc_session* session, const char* out_dir);
TUBELOC_API tubeloc_status tubeloc_run_evaluate(tubeloc_session* session, const char* out_dir);
TUBELOC_API tubeloc_status tubeloc_run_sweep(tubeloc_session* session, const char* out_dir);
TUBELOC_API tubeloc_status tubeloc_run_perturb(tubeloc_session* session, const char* out_dir);

/* Single-image localization against artifacts previously built under
 * artifacts_dir. image_path must be a binary PGM. Outputs may be NULL when
 * not wanted. status_out: 0 refined, 1 classification-only, 2 rejected. */
typedef struct tubeloc_pose {
  double position[3];    /* world frame, millimeters */
  double quaternion[4];  /* w, x, y, z; unit norm, w >= 0 */
} tubeloc_pose;

TUBELOC_API tubeloc_status tubeloc_localize_image(tubeloc_session* session,
                                                  const char* artifacts_dir,
                                                  const char* image_path, tubeloc_pose* pose_out,
                                                  int* zone_out, int* status_out,
                                                  double* rms_out);

#ifdef __cplusplus
} /* extern "C" */
#endif

#endif /* TUBELOC_TUBELOC_H */
