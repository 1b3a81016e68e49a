/* Licensed under the Apache License, Version 2.0 (the "License"); you may not
 * use this file except in compliance with the License. You may obtain a copy
 * of the License at http://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS, WITHOUT
 * WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied. */

/* C interface of libvavg. Every call returns a vavg_status; on failure the
 * message is available from vavg_last_error() in the calling thread until the
 * next failing call. Handles are opaque and owned by the caller. */

#ifndef VAVG_VAVG_H
#define VAVG_VAVG_H

#include <stddef.h>
#include <stdint.h>

#if defined(_WIN32)
#  ifdef VAVG_BUILDING_LIBRARY
#    define VAVG_API __declspec(dllexport)
#  else
#    define VAVG_API __declspec(dllimport)
#  endif
#else
#  define VAVG_API __attribute__((visibility("default")))
#endif

#ifdef __cplusplus
extern "C" {
#endif

typedef enum vavg_status {
  VAVG_OK = 0,
  VAVG_E_PARAMETER = 1,
  VAVG_E_USAGE = 2,
  VAVG_E_NUMERIC = 3,
  VAVG_E_FIT = 4,
  VAVG_E_IO = 5,
  VAVG_E_CONFIG = 6,
  VAVG_E_INTERNAL = 7
} vavg_status;

typedef enum vavg_layout { VAVG_LAYOUT_XV = 0, VAVG_LAYOUT_X = 1, VAVG_LAYOUT_V = 2 } vavg_layout;
typedef enum vavg_group { VAVG_GROUP_X = 0, VAVG_GROUP_V = 1 } vavg_group;

typedef struct vavg_field vavg_field;

typedef struct vavg_field_info {
  int dim;
  int n;
  double period;
  int layout;        /* vavg_layout */
  unsigned space;    /* bit 0: x spectral, bit 1: v spectral */
  size_t size;       /* complex samples */
} vavg_field_info;

typedef void (*vavg_log_fn)(const char* line, void* user);

VAVG_API const char* vavg_version(void);
VAVG_API const char* vavg_last_error(void);

VAVG_API vavg_status vavg_field_create(int dim, int n, double period, int layout, vavg_field** out);
VAVG_API vavg_status vavg_field_read(const char* path, vavg_field** out);
VAVG_API vavg_status vavg_field_write(const vavg_field* f, const char* path, int single_precision);
VAVG_API vavg_status vavg_field_info_get(const vavg_field* f, vavg_field_info* info);
/* Interleaved (re, im) pairs, count complex values, row-major. */
VAVG_API vavg_status vavg_field_set_data(vavg_field* f, const double* data, size_t count);
VAVG_API vavg_status vavg_field_get_data(const vavg_field* f, double* data, size_t count);
VAVG_API void vavg_field_free(vavg_field* f);

/* Inhomogeneous B^s_{p,q} norm over one variable group; p, q may be INFINITY. */
VAVG_API vavg_status vavg_besov_norm(const vavg_field* f, int group, double s, double p, double q,
                                     double cutoff_width, double* out);

/* descriptor: "ID:key=value,..." as in config case lists. regime: 0 sub, 1 critical, 2 saturated. */
VAVG_API vavg_status vavg_predicted_gain(const char* descriptor, int dim, double* s, double* tested_s, int* regime);

/* Runs a suite ("identities", ..., "lambda-strip", "all"). exit_code receives 0
 * when every verdict passes and 1 otherwise; a config error returns
 * VAVG_E_CONFIG. out_dir may be NULL to use the config value. */
VAVG_API vavg_status vavg_run(const char* subcommand, const char* config_path, const char* out_dir, int threads,
                              int has_seed, uint64_t seed, vavg_log_fn log, void* user, int* exit_code);

#ifdef __cplusplus
}
#endif

#endif
