#include "pqsim/shor.hpp"

#include <algorithm>
#include <cmath>
#include <complex>
#include <sstream>

#include "pqsim/circuits.hpp"
#include "pqsim/experiments.hpp"
#include "pqsim/fft.hpp"

namespace pqsim {

std::uint64_t gcd(std::uint64_t a, std::uint64_t b) {
  while (b != 0) {
    const std::uint64_t t = a % b;
    a = b;
    b = t;
  }
  return a;
}

std::uint64_t lcm(std::uint64_t a, std::uint64_t b) { return a / gcd(a, b) * b; }

std::uint64_t powmod(std::uint64_t base, std::uint64_t exp, std::uint64_t mod) {
  std::uint64_t acc = 1 % mod;
  base %= mod;
  while (exp != 0) {
    if (exp & 1) acc = static_cast<std::uint64_t>(static_cast<unsigned __int128>(acc) * base % mod);
    base = static_cast<std::uint64_t>(static_cast<unsigned __int128>(base) * base % mod);
    exp >>= 1;
  }
  return acc;
}

std::uint64_t multiplicative_order(std::uint64_t x, std::uint64_t modulus) {
  detail::require(modulus >= 2 && gcd(x % modulus, modulus) == 1, "order: x must be a unit mod N");
  std::uint64_t v = x % modulus;
  std::uint64_t r = 1;
  while (v != 1 % modulus) {
    v = v * (x % modulus) % modulus;
    ++r;
  }
  return r;
}

std::uint64_t euler_phi(std::uint64_t n) {
  std::uint64_t result = n;
  for (std::uint64_t p = 2; p * p <= n; ++p) {
    if (n % p != 0) continue;
    while (n % p == 0) n /= p;
    result -= result / p;
  }
  if (n > 1) result -= result / n;
  return result;
}

std::string to_string(OrderFindMode mode) { return mode == OrderFindMode::GateLevel ? "gate-level" : "semantic"; }

OrderFindMode parse_order_find_mode(const std::string& text) {
  if (text == "gate-level" || text == "gate") return OrderFindMode::GateLevel;
  if (text == "semantic") return OrderFindMode::Semantic;
  throw ContractViolation("unknown order-finding mode: " + text);
}

namespace {

// QFT on qubits [first, first+count) of s, noisy when a config is given.
// Depolarizing noise lands on both qubits of each controlled R_d.
void qft_step(StateVector& s, QubitRange r, const OrderFindOptions& options, Rng& rng) {
  if (options.noise == nullptr || options.noise->noiseless()) {
    if (r.first == 0 && r.count == s.qubits())
      qft_fft(s, options.workers);
    else
      qft_circuit(s, r, std::nullopt, options.workers);
    return;
  }
  const NoiseConfig& cfg = *options.noise;
  cfg.validate();
  const Granularity g =
      cfg.granularity == Granularity::ExperimentDefault ? Granularity::PerGate : cfg.granularity;
  NoisyExecutor exec(cfg, g, rng, options.workers);
  for (const GateOp& op : qft_gates(r)) exec.apply(s, op, op.kind == GateKind::ControlledPhase);
  exec.end_iteration(s);
}

}  // namespace

std::uint64_t order_find(std::uint64_t x, std::uint64_t modulus, const OrderFindOptions& options, Rng& rng,
                         StateVector* workspace) {
  const ModExpSpec spec = make_modexp_spec(x, modulus);
  const int l = spec.bits;

  if (options.mode == OrderFindMode::GateLevel) {
    if (modexp_qubit_budget(l) > kMaxQubits)
      throw ContractViolation("gate-level order finding needs " + std::to_string(modexp_qubit_budget(l)) +
                              " qubits for N=" + std::to_string(modulus) + ", limit is " +
                              std::to_string(kMaxQubits));
    check_budget(spec.qubits(), options.memory_budget);
    StateVector s(spec.qubits());
    execute(s, hadamard_gates(spec.argument()), options.workers);
    apply_permutation(s, modexp_operator(spec), options.workers);
    measure_subregister(s, spec.result().first, spec.result().count, rng);
    qft_step(s, spec.argument(), options, rng);
    return measure_subregister(s, spec.argument().first, spec.argument().count, rng);
  }

  const int bits = 2 * l;
  check_budget(bits, options.memory_budget);
  const std::uint64_t order = multiplicative_order(x, modulus);
  // Measuring the first register leaves a uniform superposition over
  // a = a0 (mod order); a0 = a mod order for uniform a has the exact weights.
  const std::uint64_t a0 = rng.between(0, (std::uint64_t{1} << bits) - 1) % order;
  std::optional<StateVector> local;
  if (workspace == nullptr) workspace = &local.emplace(bits);
  if (workspace->qubits() != bits) *workspace = StateVector(bits);
  StateVector& s = *workspace;
  fill_comb(s, order, a0);
  qft_step(s, {0, bits}, options, rng);
  // The register is discarded, so skip the collapse.
  return sample_index(s, rng.uniform());
}

std::vector<double> order_find_distribution(std::uint64_t x, std::uint64_t modulus) {
  const int bits = 2 * bit_length(modulus);
  const std::uint64_t size = std::uint64_t{1} << bits;
  detail::require(bits <= 16, "exact order-finding distribution is limited to 2l <= 16");
  const std::uint64_t order = multiplicative_order(x, modulus);
  std::vector<double> dist(size, 0.0);
  for (std::uint64_t a0 = 0; a0 < order; ++a0) {
    const std::uint64_t count = (size - a0 - 1) / order + 1;
    const double weight = static_cast<double>(count) / static_cast<double>(size);
    for (std::uint64_t y = 0; y < size; ++y) {
      std::complex<double> sum = 0.0;
      for (std::uint64_t a = a0; a < size; a += order) {
        const double angle = 2.0 * M_PI * static_cast<double>((a * y) % size) / static_cast<double>(size);
        sum += std::polar(1.0, angle);
      }
      dist[y] += weight * std::norm(sum) / (static_cast<double>(count) * static_cast<double>(size));
    }
  }
  return dist;
}

std::vector<OrderCandidate> convergents(std::uint64_t y, int bits, std::uint64_t modulus) {
  std::vector<OrderCandidate> out;
  const std::uint64_t q = std::uint64_t{1} << bits;
  detail::require(y < q, "convergents: y out of range");
  if (y == 0) return out;

  std::uint64_t num = y, den = q;
  std::uint64_t h_prev = 1, h_prev2 = 0;  // numerators
  std::uint64_t k_prev = 0, k_prev2 = 1;  // denominators
  while (den != 0) {
    const std::uint64_t a = num / den;
    const std::uint64_t h = a * h_prev + h_prev2;
    const std::uint64_t k = a * k_prev + k_prev2;
    if (k >= modulus) break;
    h_prev2 = h_prev;
    h_prev = h;
    k_prev2 = k_prev;
    k_prev = k;
    const std::uint64_t rem = num % den;
    num = den;
    den = rem;

    if (h == 0 || h >= k) continue;
    // |y/q - h/k| <= 1/(2q)  <=>  2|y k - h q| <= k
    const __int128 diff = static_cast<__int128>(y) * k - static_cast<__int128>(h) * q;
    const __int128 mag = diff < 0 ? -diff : diff;
    if (2 * mag <= static_cast<__int128>(k)) out.push_back({h, k, Check::Base});
  }
  std::reverse(out.begin(), out.end());
  return out;
}

CandidateOutcome try_candidate(std::uint64_t modulus, std::uint64_t x, std::uint64_t r) {
  detail::require(r >= 1, "try_candidate: r must be positive");
  if (powmod(x, r, modulus) != 1 % modulus) return {0, Failure::NotOrder};
  if (r % 2 != 0) return {0, Failure::OddOrder};
  const std::uint64_t h = powmod(x, r / 2, modulus);
  if (h == 1 || h == modulus - 1) return {0, Failure::TrivialRoot};
  const std::uint64_t f = gcd_check(modulus, x, r);
  return {f, f != 0 ? Failure::None : Failure::TrivialRoot};
}

std::uint64_t gcd_check(std::uint64_t modulus, std::uint64_t x, std::uint64_t r) {
  if (r == 0 || r % 2 != 0) return 0;
  const std::uint64_t h = powmod(x, r / 2, modulus);
  for (const std::uint64_t v : {(h + 1) % modulus, (h + modulus - 1) % modulus}) {
    const std::uint64_t d = gcd(modulus, v);
    if (d > 1 && d < modulus) return d;
  }
  return 0;
}

unsigned parse_improvements(const std::string& text) {
  if (text.empty() || text == "none") return 0;
  if (text == "all") return improvements::kAll;
  if (std::all_of(text.begin(), text.end(), [](char c) { return c >= '0' && c <= '9'; })) {
    const unsigned long v = std::stoul(text);
    detail::require(v <= improvements::kAll, "improvements bitmask must be in 0..15");
    return static_cast<unsigned>(v);
  }
  unsigned mask = 0;
  std::stringstream in(text);
  std::string item;
  while (std::getline(in, item, '+')) {
    if (item == "neighbor")
      mask |= improvements::kNeighbor;
    else if (item == "gcd")
      mask |= improvements::kGcd;
    else if (item == "small-factor")
      mask |= improvements::kSmallFactor;
    else if (item == "lcm")
      mask |= improvements::kLcm;
    else
      throw ContractViolation("unknown improvement: " + item);
  }
  return mask;
}

CheckTally& ShorTallies::operator[](Check c) {
  switch (c) {
    case Check::Neighbor: return neighbor;
    case Check::Gcd: return gcd;
    case Check::SmallFactor: return small_factor;
    case Check::Lcm: return lcm;
    case Check::Base: break;
  }
  throw ContractViolation("the base check has no tally");
}

const CheckTally& ShorTallies::operator[](Check c) const { return const_cast<ShorTallies&>(*this)[c]; }

Postprocessor::Postprocessor(std::uint64_t modulus, int bits, PostprocessOptions options)
    : modulus_(modulus), bits_(bits), options_(options) {}

namespace {
constexpr std::size_t kRememberCap = 64;
}

void Postprocessor::remember(std::uint64_t r) {
  if (std::find(remembered_.begin(), remembered_.end(), r) != remembered_.end()) return;
  if (remembered_.size() < kRememberCap) remembered_.push_back(r);
}

// Standard check on r, then the per-candidate GCD and small-factor checks.
std::uint64_t Postprocessor::try_r(std::uint64_t x, std::uint64_t r, bool (&ran)[5], Check& winner) {
  const CandidateOutcome base = try_candidate(modulus_, x, r);
  if (base.ok()) {
    winner = Check::Base;
    return base.factor;
  }
  if (base.failure != Failure::NotOrder) return 0;

  if ((options_.improvements & improvements::kGcd) && r % 2 == 0) {
    ran[static_cast<int>(Check::Gcd)] = true;
    if (const std::uint64_t f = gcd_check(modulus_, x, r)) {
      winner = Check::Gcd;
      return f;
    }
  }
  if (options_.improvements & improvements::kSmallFactor) {
    ran[static_cast<int>(Check::SmallFactor)] = true;
    for (int m = 2; m <= options_.small_factor_bound; ++m) {
      const std::uint64_t mr = r * static_cast<std::uint64_t>(m);
      if (mr >= modulus_) break;
      const CandidateOutcome o = try_candidate(modulus_, x, mr);
      if (o.ok()) {
        winner = Check::SmallFactor;
        return o.factor;
      }
    }
  }
  return 0;
}

std::uint64_t Postprocessor::process(std::uint64_t x, std::uint64_t y, ShorTallies& tallies) {
  bool ran[5] = {};
  bool via_neighbor = false;
  Check winner = Check::Base;
  std::uint64_t factor = 0;
  std::vector<std::uint64_t> fresh;

  for (const OrderCandidate& c : convergents(y, bits_, modulus_)) {
    fresh.push_back(c.r);
    if ((factor = try_r(x, c.r, ran, winner)) != 0) break;
  }

  if (factor == 0 && (options_.improvements & improvements::kNeighbor)) {
    ran[static_cast<int>(Check::Neighbor)] = true;
    const std::uint64_t q = std::uint64_t{1} << bits_;
    for (int delta = 1; delta <= options_.neighbor_radius && factor == 0; ++delta) {
      for (const int sign : {-1, +1}) {
        const std::int64_t yn = static_cast<std::int64_t>(y) + sign * delta;
        if (yn < 0 || yn >= static_cast<std::int64_t>(q)) continue;
        for (const OrderCandidate& c : convergents(static_cast<std::uint64_t>(yn), bits_, modulus_)) {
          fresh.push_back(c.r);
          if ((factor = try_r(x, c.r, ran, winner)) != 0) break;
        }
        if (factor != 0) {
          via_neighbor = true;
          break;
        }
      }
    }
  }

  if (factor == 0 && (options_.improvements & improvements::kLcm)) {
    std::vector<std::uint64_t> pool = remembered_;
    for (std::uint64_t r : fresh)
      if (std::find(pool.begin(), pool.end(), r) == pool.end()) pool.push_back(r);
    for (std::size_t i = 0; i < pool.size() && factor == 0; ++i) {
      for (std::size_t j = i + 1; j < pool.size(); ++j) {
        const bool i_fresh = std::find(fresh.begin(), fresh.end(), pool[i]) != fresh.end();
        const bool j_fresh = std::find(fresh.begin(), fresh.end(), pool[j]) != fresh.end();
        if (!i_fresh && !j_fresh) continue;  // old pairs were tried before
        const std::uint64_t l = lcm(pool[i], pool[j]);
        if (l == pool[i] || l == pool[j] || l >= modulus_) continue;
        ran[static_cast<int>(Check::Lcm)] = true;
        const CandidateOutcome o = try_candidate(modulus_, x, l);
        if (o.ok()) {
          factor = o.factor;
          winner = Check::Lcm;
          break;
        }
      }
    }
  }

  for (std::uint64_t r : fresh) remember(r);

  for (const Check c : {Check::Neighbor, Check::Gcd, Check::SmallFactor, Check::Lcm}) {
    if (!ran[static_cast<int>(c)]) continue;
    const bool credited = factor != 0 && (c == winner || (c == Check::Neighbor && via_neighbor));
    ++(credited ? tallies[c].success : tallies[c].failure);
  }
  return factor;
}

double prob_succ(std::uint64_t modulus, std::uint64_t phi) {
  if (modulus < 16) throw ContractViolation("prob_succ needs N >= 16 so that log log N > 0");
  detail::require(phi >= 1 && phi < modulus, "prob_succ: phi must lie in [1, N)");
  constexpr double kEulerGamma = 0.57721566490153286;
  const double ratio = static_cast<double>(phi) / static_cast<double>(modulus - 1);
  const double n = static_cast<double>(modulus);
  return (1.0 - ratio) + ratio * (0.5 * (4.0 / (M_PI * M_PI)) * std::exp(-kEulerGamma) / std::log(std::log(n)));
}

void ShorConfig::validate() const {
  detail::require(modulus >= 15 && modulus % 2 == 1, "N must be odd and at least 15");
  detail::require(modulus < (std::uint64_t{1} << 20), "N must be below 2^20");
  detail::require(max_iterations >= 1, "max_iterations must be positive");
  detail::require(post.small_factor_bound >= 1 && post.neighbor_radius >= 0, "invalid check parameters");
  if (base) detail::require(*base >= 2 && *base <= modulus - 2, "fixed base must lie in [2, N-2]");
  if (noise) noise->validate();
}

ShorStats shor_factor(const ShorConfig& cfg, Rng& rng) {
  cfg.validate();
  const std::uint64_t n = cfg.modulus;
  const int bits = 2 * bit_length(n);
  Postprocessor post(n, bits, cfg.post);
  OrderFindOptions opts;
  opts.mode = cfg.mode;
  opts.noise = cfg.noise ? &*cfg.noise : nullptr;
  opts.memory_budget = cfg.memory_budget;
  opts.workers = cfg.workers;

  ShorStats stats;
  std::optional<StateVector> workspace;
  while (stats.iterations < cfg.max_iterations) {
    ++stats.iterations;
    const std::uint64_t x = cfg.base ? *cfg.base : rng.between(2, n - 2);
    if (const std::uint64_t d = gcd(x, n); d > 1) {
      stats.factor = d;
      ++stats.gcd_shortcuts;
      break;
    }
    if (!workspace && cfg.mode == OrderFindMode::Semantic) {
      check_budget(bits, cfg.memory_budget);
      workspace.emplace(bits);
    }
    const std::uint64_t y = order_find(x, n, opts, rng, workspace ? &*workspace : nullptr);
    if (const std::uint64_t f = post.process(x, y, stats.tallies); f != 0) {
      stats.factor = f;
      break;
    }
  }
  return stats;
}

}  // namespace pqsim
