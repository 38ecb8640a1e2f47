#include "optim.hpp"

#include <limits>

#include <gsl/gsl_errno.h>
#include <gsl/gsl_multimin.h>

namespace tsys::detail {

namespace {

struct Ctx {
    const std::function<double(const std::vector<double>&)>* f;
    std::vector<double> x;
};

double trampoline(const gsl_vector* v, void* p) {
    auto* c = static_cast<Ctx*>(p);
    for (std::size_t i = 0; i < c->x.size(); ++i) c->x[i] = gsl_vector_get(v, i);
    const double r = (*c->f)(c->x);
    return std::isfinite(r) ? r : 1e300;
}

}  // namespace

std::vector<double> nelder_mead(const std::function<double(const std::vector<double>&)>& f, std::vector<double> x0,
                                double step, int iters) {
    static const bool quiet = (gsl_set_error_handler_off(), true);
    (void)quiet;
    const std::size_t n = x0.size();
    if (n == 0) return x0;
    Ctx ctx{&f, x0};
    gsl_multimin_function fn{&trampoline, n, &ctx};
    gsl_vector* x = gsl_vector_alloc(n);
    gsl_vector* ss = gsl_vector_alloc(n);
    for (std::size_t i = 0; i < n; ++i) gsl_vector_set(x, i, x0[i]);
    gsl_vector_set_all(ss, step);
    gsl_multimin_fminimizer* s = gsl_multimin_fminimizer_alloc(gsl_multimin_fminimizer_nmsimplex2, n);
    gsl_multimin_fminimizer_set(s, &fn, x, ss);
    for (int it = 0; it < iters; ++it) {
        if (gsl_multimin_fminimizer_iterate(s)) break;
        if (gsl_multimin_test_size(gsl_multimin_fminimizer_size(s), 1e-10) == GSL_SUCCESS) break;
    }
    std::vector<double> out(n);
    for (std::size_t i = 0; i < n; ++i) out[i] = gsl_vector_get(s->x, i);
    gsl_multimin_fminimizer_free(s);
    gsl_vector_free(ss);
    gsl_vector_free(x);
    return out;
}

}  // namespace tsys::detail
