#ifndef TRIPOD_H
#define TRIPOD_H

/* Generated by cbindgen from crates/ffi/src/lib.rs. Do not edit. */

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

typedef enum TripodStatus {
  TRIPOD_STATUS_OK = 0,
  TRIPOD_STATUS_NULL_POINTER = 1,
  TRIPOD_STATUS_INVALID_ARGUMENT = 2,
  TRIPOD_STATUS_UNREACHABLE = 3,
  TRIPOD_STATUS_JOINT_LIMIT = 4,
  TRIPOD_STATUS_INFEASIBLE = 5,
  TRIPOD_STATUS_UNSTABLE = 6,
  TRIPOD_STATUS_IO = 7,
  TRIPOD_STATUS_PARSE = 8,
  TRIPOD_STATUS_VALIDATION = 9,
  // A bug inside the library; the handle arguments are still valid.
  TRIPOD_STATUS_INTERNAL = 10,
} TripodStatus;

typedef enum TripodGait {
  TRIPOD_GAIT_SCOOT = 0,
  TRIPOD_GAIT_SHUFFLE = 1,
  TRIPOD_GAIT_SKATE = 2,
  TRIPOD_GAIT_STAND = 3,
  TRIPOD_GAIT_BRAKE = 4,
  TRIPOD_GAIT_PIVOT = 5,
} TripodGait;

// Robot configuration.
typedef struct TripodConfig TripodConfig;

// An immutable gait schedule.
typedef struct TripodSchedule TripodSchedule;

// A simulated trajectory.
typedef struct TripodTrajectory TripodTrajectory;

typedef struct TripodPoint {
  double x;
  double y;
} TripodPoint;

typedef struct TripodJointAngles {
  double q0;
  double q1;
  double q2;
} TripodJointAngles;

// One trajectory sample. `heading` is NaN while the body is at rest.
typedef struct TripodSample {
  double t;
  double x;
  double y;
  double heading;
  double orientation;
  double speed;
  double margin;
} TripodSample;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

// Message of the last failed call on this thread; empty after a success.
// Valid until the next call into this library on the same thread.
const char *tripod_last_error(void);

// Built-in default configuration. Never null.
struct TripodConfig *tripod_config_default(void);

// Loads and validates a TOML configuration file.
//
// # Safety
// `path` must be a NUL-terminated string and `out` a valid pointer.
enum TripodStatus tripod_config_load(const char *path, struct TripodConfig **out);

// # Safety
// `cfg` must come from this library and not be used afterwards. Null is
// ignored.
void tripod_config_free(struct TripodConfig *cfg);

// Body tilt from pitch and yaw (rad).
//
// # Safety
// Pointers must be valid.
enum TripodStatus tripod_tilt_angle(const struct TripodConfig *cfg,
                                    double theta,
                                    double psi,
                                    double *out_q0);

// Elbow-up inverse kinematics within the configured servo limits.
//
// # Safety
// Pointers must be valid.
enum TripodStatus tripod_leg_ik(const struct TripodConfig *cfg,
                                struct TripodPoint target,
                                double q0,
                                struct TripodJointAngles *out);

// Foot position for the given joint angles.
//
// # Safety
// Pointers must be valid.
enum TripodStatus tripod_leg_fk(const struct TripodConfig *cfg,
                                struct TripodJointAngles angles,
                                struct TripodPoint *out);

// Builds a schedule from the gait parameters stored in `cfg`.
// `backward` is ignored for the static maneuvers.
//
// # Safety
// Pointers must be valid.
enum TripodStatus tripod_schedule_build(const struct TripodConfig *cfg,
                                        enum TripodGait gait,
                                        bool backward,
                                        struct TripodSchedule **out);

// # Safety
// Pointers must be valid.
enum TripodStatus tripod_schedule_period(const struct TripodSchedule *s, double *out);

// Smallest stability margin over one cycle (m); positive means stable.
//
// # Safety
// Pointers must be valid.
enum TripodStatus tripod_schedule_min_margin(const struct TripodConfig *cfg,
                                             const struct TripodSchedule *s,
                                             double *out);

// Servo CSV of one cycle; free the result with `tripod_string_free`.
//
// # Safety
// Pointers must be valid.
enum TripodStatus tripod_schedule_servo_csv(const struct TripodConfig *cfg,
                                            const struct TripodSchedule *s,
                                            char **out);

// # Safety
// `s` must come from this library and not be used afterwards. Null is
// ignored.
void tripod_schedule_free(struct TripodSchedule *s);

// Simulates `strides` cycles from rest.
//
// # Safety
// Pointers must be valid.
enum TripodStatus tripod_simulate(const struct TripodConfig *cfg,
                                  const struct TripodSchedule *s,
                                  size_t strides,
                                  bool allow_unstable,
                                  struct TripodTrajectory **out);

// Number of samples; 0 for a null handle.
//
// # Safety
// `t` must be null or valid.
size_t tripod_trajectory_len(const struct TripodTrajectory *t);

// # Safety
// Pointers must be valid.
enum TripodStatus tripod_trajectory_sample(const struct TripodTrajectory *t,
                                           size_t index,
                                           struct TripodSample *out);

// Average speed in m/s and body lengths per second.
//
// # Safety
// Pointers must be valid.
enum TripodStatus tripod_trajectory_speed(const struct TripodConfig *cfg,
                                          const struct TripodTrajectory *t,
                                          double *out_mps,
                                          double *out_blps);

// Turning radius of the path (m); infinite when the path never turns.
//
// # Safety
// Pointers must be valid.
enum TripodStatus tripod_trajectory_turning_radius(const struct TripodTrajectory *t, double *out);

// Trajectory CSV; free the result with `tripod_string_free`.
//
// # Safety
// Pointers must be valid.
enum TripodStatus tripod_trajectory_csv(const struct TripodTrajectory *t, char **out);

// # Safety
// `t` must come from this library and not be used afterwards. Null is
// ignored.
void tripod_trajectory_free(struct TripodTrajectory *t);

// # Safety
// `s` must be a string returned by this library, or null.
void tripod_string_free(char *s);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* TRIPOD_H */
