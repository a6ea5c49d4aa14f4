#include <boost/random/sobol.hpp>
#include <random>

#include "rsg/certificates.hpp"
#include "rsg/errors.hpp"

namespace rsg {

std::vector<Vec> sobol_points(std::size_t dim, std::size_t count, std::uint64_t seed) {
  if (dim < 1) throw DomainError("sobol sampler needs dim >= 1");
  boost::random::sobol eng(dim);
  std::mt19937_64 rng(seed);
  std::vector<std::uint64_t> shift(dim);
  for (auto& s : shift) s = rng();
  std::vector<Vec> pts(count, Vec(dim));
  for (auto& p : pts) {
    for (std::size_t d = 0; d < dim; ++d) {
      const std::uint64_t v = static_cast<std::uint64_t>(eng()) ^ shift[d];
      p[d] = static_cast<double>(v >> 11) * 0x1.0p-53;
    }
  }
  return pts;
}

}  // namespace rsg
