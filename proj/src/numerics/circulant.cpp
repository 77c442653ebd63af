#include "mfqp/numerics/circulant.hpp"

#include "mfqp/error.hpp"

#include <fftw3.h>

#include <algorithm>
#include <bit>
#include <cmath>
#include <memory>
#include <mutex>
#include <string>

namespace mfqp {

namespace {

// FFTW's planner is not re-entrant; plan execution on private arrays is.
std::mutex& planner_mutex()
{
  static std::mutex m;
  return m;
}

struct FftwFree
{
  void operator()(void* p) const noexcept { fftw_free(p); }
};

template<class T>
using FftwBuffer = std::unique_ptr<T[], FftwFree>;

template<class T>
FftwBuffer<T> fftw_buffer(std::size_t count)
{
  auto* p = static_cast<T*>(fftw_malloc(sizeof(T) * count));
  if (p == nullptr)
    throw std::bad_alloc();
  return FftwBuffer<T>(p);
}

class Plan
{
public:
  explicit Plan(fftw_plan p)
    : plan_(p)
  {
    if (plan_ == nullptr)
      throw Error(ErrorCode::embedding_failure, "FFTW could not create a plan");
  }
  Plan(const Plan&) = delete;
  Plan& operator=(const Plan&) = delete;
  ~Plan()
  {
    std::lock_guard lock(planner_mutex());
    fftw_destroy_plan(plan_);
  }
  void execute() const { fftw_execute(plan_); }

private:
  fftw_plan plan_;
};

Plan make_r2c(std::size_t m, double* in, fftw_complex* out)
{
  std::lock_guard lock(planner_mutex());
  return Plan(fftw_plan_dft_r2c_1d(static_cast<int>(m), in, out, FFTW_ESTIMATE));
}

Plan make_c2r(std::size_t m, fftw_complex* in, double* out)
{
  std::lock_guard lock(planner_mutex());
  return Plan(fftw_plan_dft_c2r_1d(static_cast<int>(m), in, out, FFTW_ESTIMATE));
}

// Real eigenvalues of the symmetric circulant built from cov(0..m/2).
std::vector<double> circulant_spectrum(const std::function<double(std::size_t)>& cov,
                                       std::size_t m)
{
  auto row = fftw_buffer<double>(m);
  auto spec = fftw_buffer<fftw_complex>(m / 2 + 1);
  for (std::size_t k = 0; k <= m / 2; ++k)
    row[k] = cov(k);
  for (std::size_t k = m / 2 + 1; k < m; ++k)
    row[k] = row[m - k];
  make_r2c(m, row.get(), spec.get()).execute();
  std::vector<double> ev(m / 2 + 1);
  for (std::size_t k = 0; k < ev.size(); ++k)
    ev[k] = spec[k][0];
  return ev;
}

} // namespace

CirculantEmbedding embed_covariance(const std::function<double(std::size_t)>& cov,
                                    std::size_t n,
                                    unsigned max_doublings)
{
  if (n < 2)
    throw Error(ErrorCode::invalid_params, "circulant embedding needs n >= 2");

  std::size_t m = std::bit_ceil(2 * (n - 1));
  for (unsigned attempt = 0; attempt <= max_doublings; ++attempt, m *= 2) {
    auto ev = circulant_spectrum(cov, m);
    const double top = *std::max_element(ev.begin(), ev.end());
    const double bottom = *std::min_element(ev.begin(), ev.end());
    // rounding noise around exact zeros is tolerated and clipped
    if (!(top > 0.0) || bottom < -1e-10 * top)
      continue;
    CirculantEmbedding emb;
    emb.n = n;
    emb.m = m;
    emb.sqrt_eigenvalues.resize(ev.size());
    std::transform(ev.begin(), ev.end(), emb.sqrt_eigenvalues.begin(),
                   [](double v) { return std::sqrt(std::max(v, 0.0)); });
    return emb;
  }
  throw Error(ErrorCode::embedding_failure,
              "circulant spectrum stays negative after " +
                std::to_string(max_doublings) + " doublings (n=" +
                std::to_string(n) + ")");
}

std::vector<double> sample_circulant(const CirculantEmbedding& emb,
                                     const RandomStream& rs)
{
  const std::size_t m = emb.m;
  auto buf = fftw_buffer<double>(m);
  auto spec = fftw_buffer<fftw_complex>(m / 2 + 1);
  fill_gaussian(rs, std::span<double>(buf.get(), m));

  make_r2c(m, buf.get(), spec.get()).execute();
  for (std::size_t k = 0; k <= m / 2; ++k) {
    const double s = emb.sqrt_eigenvalues[k] / static_cast<double>(m);
    spec[k][0] *= s;
    spec[k][1] *= s;
  }
  make_c2r(m, spec.get(), buf.get()).execute();
  return std::vector<double>(buf.get(), buf.get() + emb.n);
}

} // namespace mfqp
