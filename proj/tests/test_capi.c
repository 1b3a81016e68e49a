/* Licensed under the Apache License, Version 2.0 (the "License"); you may not
 * use this file except in compliance with the License. You may obtain a copy
 * of the License at http://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS, WITHOUT
 * WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied. */

/* Exercises the public C header from a C translation unit. argv[1] is a
 * scratch directory. */

#include <math.h>
#include <stdio.h>
#include <stdlib.h>
#include <string.h>
#include <sys/stat.h>

#include "vavg/vavg.h"

static int failures = 0;

#define EXPECT(cond)                                                  \
  do {                                                                \
    if (!(cond)) {                                                    \
      fprintf(stderr, "%s:%d: expected %s\n", __FILE__, __LINE__, #cond); \
      ++failures;                                                     \
    }                                                                 \
  } while (0)

static int log_lines = 0;
static void count_log(const char* line, void* user) {
  (void)line;
  (void)user;
  ++log_lines;
}

int main(int argc, char** argv) {
  const char* dir = argc > 1 ? argv[1] : ".";
  char path[1024], cfg[1024], out[1024];
  mkdir(dir, 0755);

  EXPECT(strcmp(vavg_version(), "0.1.0") == 0);

  /* constant 2 on a 1-D torus of length 2 pi: only the low block survives */
  vavg_field* f = NULL;
  EXPECT(vavg_field_create(1, 16, 2.0 * M_PI, VAVG_LAYOUT_XV, &f) == VAVG_OK);
  vavg_field_info info;
  EXPECT(vavg_field_info_get(f, &info) == VAVG_OK);
  EXPECT(info.size == 256 && info.layout == VAVG_LAYOUT_XV && info.space == 0);
  double* buf = calloc(2 * info.size, sizeof(double));
  for (size_t i = 0; i < info.size; ++i) buf[2 * i] = 2.0;
  EXPECT(vavg_field_set_data(f, buf, info.size) == VAVG_OK);
  EXPECT(vavg_field_set_data(f, buf, info.size - 1) == VAVG_E_PARAMETER);

  double norm = 0.0;
  EXPECT(vavg_besov_norm(f, VAVG_GROUP_X, 0.0, 2.0, 2.0, 0.125, &norm) == VAVG_OK);
  EXPECT(fabs(norm - 4.0 * M_PI) < 1e-10);
  EXPECT(vavg_besov_norm(f, VAVG_GROUP_X, 0.0, 0.5, 2.0, 0.125, &norm) == VAVG_E_PARAMETER);
  EXPECT(strlen(vavg_last_error()) > 0);
  EXPECT(vavg_besov_norm(f, VAVG_GROUP_X, 0.0, 2.0, 2.0, 0.3, &norm) == VAVG_E_PARAMETER);

  snprintf(path, sizeof path, "%s/const.vfield", dir);
  EXPECT(vavg_field_write(f, path, 0) == VAVG_OK);
  vavg_field* g = NULL;
  EXPECT(vavg_field_read(path, &g) == VAVG_OK);
  double* back = calloc(2 * info.size, sizeof(double));
  EXPECT(vavg_field_get_data(g, back, info.size) == VAVG_OK);
  EXPECT(memcmp(back, buf, 2 * info.size * sizeof(double)) == 0);
  vavg_field_free(g);
  snprintf(path, sizeof path, "%s/missing.vfield", dir);
  g = NULL;
  EXPECT(vavg_field_read(path, &g) == VAVG_E_IO && g == NULL);
  EXPECT(vavg_field_create(1, 15, 1.0, VAVG_LAYOUT_X, &g) == VAVG_E_PARAMETER && g == NULL);
  EXPECT(vavg_field_info_get(NULL, &info) == VAVG_E_USAGE);
  vavg_field_free(f);
  vavg_field_free(NULL);
  free(buf);
  free(back);

  double s = 0.0, ts = 0.0;
  int regime = -1;
  EXPECT(vavg_predicted_gain("CLASSICAL:alpha=1,beta=0,p=2,q=2", 1, &s, &ts, &regime) == VAVG_OK);
  EXPECT(fabs(s - 0.75) < 1e-15 && ts == s && regime == 0);
  EXPECT(vavg_predicted_gain("CLASSICAL:alpha=1,beta=0.5,q=2", 1, &s, &ts, &regime) == VAVG_OK);
  EXPECT(regime == 1 && fabs(ts - (s - 0.1)) < 1e-15);
  EXPECT(vavg_predicted_gain("PROP_B011:beta=1", 1, &s, &ts, &regime) == VAVG_E_PARAMETER);
  EXPECT(vavg_predicted_gain("P:zeta=1", 1, &s, &ts, &regime) == VAVG_E_CONFIG);

  snprintf(cfg, sizeof cfg, "%s/empty.cfg", dir);
  FILE* fp = fopen(cfg, "w");
  fputs("[verify]\ncases =\n", fp);
  fclose(fp);
  snprintf(out, sizeof out, "%s/out", dir);
  int code = -1;
  EXPECT(vavg_run("verify", cfg, out, 1, 1, 5, count_log, NULL, &code) == VAVG_OK);
  EXPECT(code == 0 && log_lines > 0);
  EXPECT(vavg_run("nonsense", cfg, out, 1, 0, 0, NULL, NULL, &code) == VAVG_E_USAGE);
  snprintf(cfg, sizeof cfg, "%s/absent.cfg", dir);
  EXPECT(vavg_run("verify", cfg, out, 1, 0, 0, NULL, NULL, &code) == VAVG_E_CONFIG);

  if (failures) fprintf(stderr, "%d failures\n", failures);
  else printf("C API checks passed\n");
  return failures ? 1 : 0;
}
