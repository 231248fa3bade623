#include "stem/stem.h"

#include <cstring>
#include <string>

#include "config.hpp"
#include "kernel.hpp"
#include "pipeline.hpp"
#include "survival.hpp"
#include "types.hpp"

namespace {

thread_local std::string g_last_error;

int set_error(const stem::Error& e) {
  g_last_error = e.what();
  switch (e.code()) {
    case stem::ErrorCode::io:
      return STEM_ERR_IO;
    case stem::ErrorCode::parse:
      return STEM_ERR_PARSE;
    case stem::ErrorCode::invalid:
      return STEM_ERR_INVALID;
    case stem::ErrorCode::state:
      return STEM_ERR_STATE;
    case stem::ErrorCode::numeric:
      return STEM_ERR_NUMERIC;
  }
  return STEM_ERR_INTERNAL;
}

template <typename Fn>
int guarded(Fn&& fn) {
  try {
    fn();
    return STEM_OK;
  } catch (const stem::Error& e) {
    return set_error(e);
  } catch (const std::exception& e) {
    g_last_error = e.what();
    return STEM_ERR_INTERNAL;
  } catch (...) {
    g_last_error = "unknown error";
    return STEM_ERR_INTERNAL;
  }
}

template <typename T, typename Fn>
T* guarded_new(Fn&& fn) {
  try {
    return new T(fn());
  } catch (const stem::Error& e) {
    set_error(e);
    return nullptr;
  } catch (const std::exception& e) {
    g_last_error = e.what();
    return nullptr;
  } catch (...) {
    g_last_error = "unknown error";
    return nullptr;
  }
}

}  // namespace

struct stem_config {
  stem::RunConfig cfg;
};

struct stem_kernel {
  stem::Kernel k;
};

struct stem_table {
  stem::SurvivalTable t;
};

extern "C" {

const char* stem_version(void) { return "1.0.0"; }

const char* stem_last_error(void) { return g_last_error.c_str(); }

stem_config* stem_config_new(void) { return new stem_config(); }

void stem_config_free(stem_config* cfg) { delete cfg; }

int stem_config_set(stem_config* cfg, const char* key, const char* value) {
  if (!cfg || !key || !value) {
    g_last_error = "null argument";
    return STEM_ERR_INVALID;
  }
  return guarded([&] { cfg->cfg.set(key, value); });
}

int stem_config_get(const stem_config* cfg, const char* key, char* buf, size_t buflen) {
  if (!cfg || !key) {
    g_last_error = "null argument";
    return -1;
  }
  try {
    const std::string v = cfg->cfg.get(key);
    if (buf && buflen > 0) {
      const size_t n = std::min(buflen - 1, v.size());
      std::memcpy(buf, v.data(), n);
      buf[n] = '\0';
    }
    return static_cast<int>(v.size());
  } catch (const stem::Error& e) {
    set_error(e);
    return -1;
  }
}

int stem_config_load(stem_config* cfg, const char* path) {
  if (!cfg || !path) {
    g_last_error = "null argument";
    return STEM_ERR_INVALID;
  }
  return guarded([&] { cfg->cfg.load_file(path); });
}

int stem_run_align(const stem_config* cfg) {
  if (!cfg) {
    g_last_error = "null config";
    return STEM_ERR_INVALID;
  }
  return guarded([&] { stem::run_align(cfg->cfg); });
}

int stem_run_table(const stem_config* cfg) {
  if (!cfg) {
    g_last_error = "null config";
    return STEM_ERR_INVALID;
  }
  return guarded([&] { stem::run_table(cfg->cfg); });
}

int stem_run_call(const stem_config* cfg) {
  if (!cfg) {
    g_last_error = "null config";
    return STEM_ERR_INVALID;
  }
  return guarded([&] { stem::run_call(cfg->cfg); });
}

int stem_run_simulate(const stem_config* cfg) {
  if (!cfg) {
    g_last_error = "null config";
    return STEM_ERR_INVALID;
  }
  return guarded([&] { stem::run_simulate(cfg->cfg); });
}

int stem_run_diagnose(const stem_config* cfg) {
  if (!cfg) {
    g_last_error = "null config";
    return STEM_ERR_INVALID;
  }
  return guarded([&] { stem::run_diagnose(cfg->cfg); });
}

stem_kernel* stem_kernel_load(const char* path) {
  if (!path) {
    g_last_error = "null path";
    return nullptr;
  }
  return guarded_new<stem_kernel>([&] { return stem_kernel{stem::read_kernel(path)}; });
}

void stem_kernel_free(stem_kernel* k) { delete k; }

int64_t stem_kernel_width(const stem_kernel* k) { return k ? k->k.width() : 0; }

double stem_kernel_weight(const stem_kernel* k, int64_t offset) { return k ? k->k.at(offset) : 0.0; }

uint64_t stem_kernel_fingerprint(const stem_kernel* k) { return k ? k->k.fingerprint() : 0; }

stem_table* stem_table_load(const char* path) {
  if (!path) {
    g_last_error = "null path";
    return nullptr;
  }
  return guarded_new<stem_table>([&] { return stem_table{stem::read_table(path)}; });
}

void stem_table_free(stem_table* t) { delete t; }

double stem_table_lambda_min(const stem_table* t) { return t ? t->t.lambda_min() : 0.0; }

double stem_table_lambda_max(const stem_table* t) { return t ? t->t.lambda_max() : 0.0; }

uint64_t stem_table_fingerprint(const stem_table* t) { return t ? t->t.kernel_fp : 0; }

int stem_table_pvalue(const stem_table* t, double height, double lambda, double* p,
                      int* below_resolution) {
  if (!t || !p) {
    g_last_error = "null argument";
    return STEM_ERR_INVALID;
  }
  return guarded([&] {
    const auto pv = stem::lookup(t->t, height, lambda);
    *p = pv.p;
    if (below_resolution) *below_resolution = pv.below_resolution ? 1 : 0;
  });
}

}  // extern "C"
