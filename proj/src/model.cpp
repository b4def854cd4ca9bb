#include "rrsa/model.hpp"

namespace rrsa {

double gbm_quantile(double x0, double rate, double sigma, double T, double level) {
  if (!(x0 > 0.0)) throw std::invalid_argument("gbm_quantile: x0 must be > 0");
  if (!(sigma > 0.0)) throw std::invalid_argument("gbm_quantile: sigma must be > 0");
  if (!(T > 0.0)) throw std::invalid_argument("gbm_quantile: T must be > 0");
  if (!(level > 0.0 && level < 1.0))
    throw std::invalid_argument("gbm_quantile: level must lie in (0,1)");
  return x0 * std::exp((rate - 0.5 * sigma * sigma) * T +
                       sigma * std::sqrt(T) * inverse_normal_cdf(level));
}

}  // namespace rrsa
