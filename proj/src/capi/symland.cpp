#include "symland/symland.h"

#include "analysis/families.hpp"
#include "analysis/spectra.hpp"
#include "reports/commands.hpp"

#include <cstdlib>
#include <cstring>
#include <fstream>
#include <memory>
#include <string>

struct symland_config {
  symland::RunConfig cfg;
};

struct symland_point {
  symland::FamilySpec spec;
  symland::PolishedPoint point;
};

namespace {

thread_local std::string g_error;

symland_status fail(symland_status s, const std::string& msg) {
  g_error = msg;
  return s;
}

template <class F>
symland_status guarded(F&& f) {
  try {
    g_error.clear();
    return f();
  } catch (const symland::UnknownFamily& e) {
    return fail(SYMLAND_ERR_UNKNOWN_FAMILY, e.what());
  } catch (const symland::NewtonFailure& e) {
    return fail(SYMLAND_ERR_NUMERIC, e.what());
  } catch (const std::invalid_argument& e) {
    return fail(SYMLAND_ERR_INVALID_ARGUMENT, e.what());
  } catch (const std::exception& e) {
    return fail(SYMLAND_ERR_INTERNAL, e.what());
  } catch (...) {
    return fail(SYMLAND_ERR_INTERNAL, "unknown exception");
  }
}

char* dup(const std::string& s) {
  char* p = static_cast<char*>(std::malloc(s.size() + 1));
  if (!p) throw std::bad_alloc();
  std::memcpy(p, s.c_str(), s.size() + 1);
  return p;
}

symland::KernelSpec kernel(symland_kernel k) {
  if (k == SYMLAND_FROBENIUS) return symland::KernelSpec::frobenius(3);
  if (k == SYMLAND_GAUSS) return symland::KernelSpec::gauss();
  throw std::invalid_argument("unknown kernel");
}

symland::Matrix weights(int d, const double* w) {
  if (d < 1) throw std::invalid_argument("d must be positive");
  if (!w) throw std::invalid_argument("null weight pointer");
  symland::Matrix W(d, d);
  for (int i = 0; i < d; ++i)
    for (int a = 0; a < d; ++a) W(i, a) = w[i * d + a];
  return W;
}

}  // namespace

extern "C" {

const char* symland_version(void) { return "0.1.0"; }

const char* symland_last_error(void) { return g_error.c_str(); }

void symland_string_free(char* s) { std::free(s); }

symland_status symland_config_new(symland_config** out) {
  return guarded([&] {
    if (!out) throw std::invalid_argument("null output pointer");
    *out = new symland_config();
    return SYMLAND_OK;
  });
}

void symland_config_free(symland_config* cfg) { delete cfg; }

symland_status symland_config_set(symland_config* cfg, const char* key, const char* value) {
  return guarded([&] {
    if (!cfg || !key || !value) throw std::invalid_argument("null argument");
    symland::set_config_key(cfg->cfg, key, value);
    return SYMLAND_OK;
  });
}

symland_status symland_config_load_text(symland_config* cfg, const char* text) {
  return guarded([&] {
    if (!cfg || !text) throw std::invalid_argument("null argument");
    symland::apply_config_text(cfg->cfg, text);
    return SYMLAND_OK;
  });
}

symland_status symland_config_load_file(symland_config* cfg, const char* path) {
  return guarded([&] {
    if (!cfg || !path) throw std::invalid_argument("null argument");
    symland::apply_config_file(cfg->cfg, path);
    return SYMLAND_OK;
  });
}

const char* symland_config_output_path(const symland_config* cfg) { return cfg ? cfg->cfg.out.c_str() : ""; }

symland_status symland_run(const symland_config* cfg, char** report, int* exit_code) {
  if (report) *report = nullptr;
  if (exit_code) *exit_code = 2;
  return guarded([&] {
    if (!cfg || !report || !exit_code) throw std::invalid_argument("null argument");
    symland::CommandResult r;
    try {
      r = symland::run_command(cfg->cfg);
    } catch (const symland::UsageError& e) {
      *exit_code = 2;
      const bool unknown = std::string(e.what()).rfind("unknown family", 0) == 0;
      return fail(unknown ? SYMLAND_ERR_UNKNOWN_FAMILY : SYMLAND_ERR_INVALID_ARGUMENT, e.what());
    }
    const std::string text = symland::render(r, cfg->cfg.format);
    if (!cfg->cfg.out.empty()) {
      std::ofstream f(cfg->cfg.out, std::ios::binary);
      if (!f || !(f << text)) {
        *exit_code = 2;
        return fail(SYMLAND_ERR_INVALID_ARGUMENT, "cannot write " + cfg->cfg.out);
      }
    }
    *report = dup(text);
    *exit_code = r.exit_code;
    return SYMLAND_OK;
  });
}

symland_status symland_loss(symland_kernel k, int d, const double* w, double* out) {
  return guarded([&] {
    if (!out) throw std::invalid_argument("null output pointer");
    *out = symland::loss_direct(kernel(k), weights(d, w));
    return SYMLAND_OK;
  });
}

symland_status symland_gradient(symland_kernel k, int d, const double* w, double* grad_out) {
  return guarded([&] {
    if (!grad_out) throw std::invalid_argument("null output pointer");
    const symland::Matrix G = symland::gradient(kernel(k), weights(d, w));
    for (int i = 0; i < d; ++i)
      for (int a = 0; a < d; ++a) grad_out[i * d + a] = G(i, a);
    return SYMLAND_OK;
  });
}

symland_status symland_point_construct(const char* family, int d, symland_point** out) {
  if (out) *out = nullptr;
  return guarded([&] {
    if (!family || !out) throw std::invalid_argument("null argument");
    auto p = std::make_unique<symland_point>();
    p->spec = symland::FamilySpec::parse(family);
    p->point = symland::construct(p->spec, d);
    *out = p.release();
    return SYMLAND_OK;
  });
}

void symland_point_free(symland_point* p) { delete p; }

int symland_point_dim(const symland_point* p) { return p ? static_cast<int>(p->point.W.cols()) : 0; }

double symland_point_loss(const symland_point* p) { return p ? p->point.loss : 0.0; }

symland_status symland_point_weights(const symland_point* p, double* out) {
  return guarded([&] {
    if (!p || !out) throw std::invalid_argument("null argument");
    const auto& W = p->point.W;
    for (int i = 0; i < W.rows(); ++i)
      for (int a = 0; a < W.cols(); ++a) out[i * W.cols() + a] = W(i, a);
    return SYMLAND_OK;
  });
}

symland_status symland_point_index(const symland_point* p, long* index, long* nullity) {
  return guarded([&] {
    if (!p || !index || !nullity) throw std::invalid_argument("null argument");
    const auto rep = symland::spectrum(p->spec.kernel, p->point.W);
    *index = rep.index;
    *nullity = rep.nullity;
    return SYMLAND_OK;
  });
}

}  // extern "C"
