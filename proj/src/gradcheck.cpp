#include "gssl/gradcheck.hpp"

#include <cmath>

#include "gssl/errors.hpp"
#include "gssl/rng.hpp"

namespace gssl {

static double eval_loss(const std::function<Value(Tape&)>& build) {
  Tape t;
  Value loss = build(t);
  const DenseMatrix& v = t.value(loss);
  if (v.rows != 1 || v.cols != 1) throw ContractError("grad_check: loss must be scalar");
  return static_cast<double>(v.data[0]);
}

GradCheckReport grad_check(const std::function<Value(Tape&)>& build, ParamStore& params,
                           const GradCheckOptions& opt) {
  GradCheckReport report;
  report.trials = opt.n_trials;
  auto all = params.all();

  for (int trial = 0; trial < opt.n_trials; ++trial) {
    if (opt.randomize_params) {
      Rng rng(mix_seed(opt.seed, static_cast<uint64_t>(trial)));
      for (Parameter* p : all)
        for (float& v : p->value.data) v = static_cast<float>(rng.uniform(-0.5, 0.5));
    }

    params.zero_grads();
    {
      Tape t;
      Value loss = build(t);
      t.backward(loss);
    }
    std::vector<DenseMatrix> analytic;
    analytic.reserve(all.size());
    for (Parameter* p : all) analytic.push_back(p->grad);

    for (size_t pi = 0; pi < all.size(); ++pi) {
      Parameter* p = all[pi];
      for (size_t e = 0; e < p->value.size(); ++e) {
        const float old = p->value.data[e];
        p->value.data[e] = old + static_cast<float>(opt.fd_h);
        const double lp = eval_loss(build);
        p->value.data[e] = old - static_cast<float>(opt.fd_h);
        const double lm = eval_loss(build);
        p->value.data[e] = old;

        const double fd = (lp - lm) / (2.0 * opt.fd_h);
        const double an = static_cast<double>(analytic[pi].data[e]);
        const double denom = std::max({std::fabs(an), std::fabs(fd), opt.denom_floor});
        const double rel = std::fabs(an - fd) / denom;
        if (rel > report.max_rel_error) {
          report.max_rel_error = rel;
          report.worst_param = p->name;
          report.worst_index = static_cast<int>(e);
        }
      }
    }
    params.zero_grads();
  }
  return report;
}

}  // namespace gssl
