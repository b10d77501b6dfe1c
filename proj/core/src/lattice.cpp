#include "rigidity/lattice.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <numeric>
#include <sstream>

#include "rigidity/errors.hpp"

namespace rigidity {

namespace {

__extension__ typedef __int128 i128;

constexpr std::int64_t kInt64Max = std::numeric_limits<std::int64_t>::max();

std::int64_t narrow_count(i128 v, const char* what) {
  if (v < 0 || v > static_cast<i128>(kInt64Max)) {
    throw ResourceError(std::string(what) + ": multiplicity does not fit in 64 bits");
  }
  return static_cast<std::int64_t>(v);
}

i128 binom(int n, int k) {
  if (k < 0 || k > n) return 0;
  i128 r = 1;
  for (int i = 1; i <= k; ++i) r = r * (n - k + i) / i;
  return r;
}

// x^p for small integers, saturating to UINT64_MAX on overflow.
std::uint64_t ipow_sat(std::uint64_t x, int p) {
  std::uint64_t r = 1;
  for (int i = 0; i < p; ++i) {
    if (x != 0 && r > std::numeric_limits<std::uint64_t>::max() / x) {
      return std::numeric_limits<std::uint64_t>::max();
    }
    r *= x;
  }
  return r;
}

void fill_cumulative(ShellTable& t) {
  t.cumulative.resize(t.multiplicities.size());
  std::int64_t run = 0;
  for (std::size_t i = 0; i < t.multiplicities.size(); ++i) {
    if (__builtin_add_overflow(run, t.multiplicities[i], &run)) {
      throw ResourceError("cumulative site count overflows 64 bits");
    }
    t.cumulative[i] = run;
  }
}

ShellTable unit_shells(double alpha, int max_shell, int offset) {
  ShellTable t;
  t.values.resize(max_shell + 1);
  t.multiplicities.assign(max_shell + 1, 1);
  for (int n = 0; n <= max_shell; ++n) t.values[n] = std::pow(static_cast<double>(n + offset), alpha);
  fill_cumulative(t);
  return t;
}

// Distinct sums of d p-th powers with multiplicities, integer p.
ShellTable integer_lp_shells(const LatticeSpec& spec, int max_shell, const ShellLimits& limits) {
  const int p = static_cast<int>(spec.norm.p);
  const int d = spec.dimension;
  std::uint64_t bound = std::max<std::uint64_t>(64, 2ull * (max_shell + 1));
  for (;;) {
    if (bound > static_cast<std::uint64_t>(limits.sieve_cap)) {
      std::ostringstream os;
      os << "Lp sieve length " << bound << " exceeds the cap " << limits.sieve_cap;
      throw ResourceError(os.str());
    }
    const std::size_t len = bound + 1;
    std::vector<std::uint64_t> powers;
    for (std::uint64_t x = 0;; ++x) {
      std::uint64_t v = ipow_sat(x, p);
      if (v > bound) break;
      powers.push_back(v);
    }
    // counts[s] = #{z in Z^j : sum |z_i|^p = s}, grown one coordinate at a time.
    std::vector<std::int64_t> counts(len, 0), next(len, 0);
    counts[0] = 1;
    for (int j = 0; j < d; ++j) {
      std::fill(next.begin(), next.end(), 0);
      for (std::size_t s = 0; s < len; ++s) {
        if (counts[s] == 0) continue;
        for (std::size_t xi = 0; xi < powers.size(); ++xi) {
          std::uint64_t t = s + powers[xi];
          if (t > bound) break;
          std::int64_t add = counts[s];
          if (xi > 0 && __builtin_mul_overflow(add, std::int64_t{2}, &add)) {
            throw ResourceError("Lp multiplicity overflows 64 bits");
          }
          if (__builtin_add_overflow(next[t], add, &next[t])) {
            throw ResourceError("Lp multiplicity overflows 64 bits");
          }
        }
      }
      counts.swap(next);
    }
    ShellTable tab;
    for (std::size_t s = 0; s < len && tab.exact_sums.size() < static_cast<std::size_t>(max_shell) + 1; ++s) {
      if (counts[s] == 0) continue;
      tab.exact_sums.push_back(s);
      tab.multiplicities.push_back(counts[s]);
    }
    if (tab.exact_sums.size() < static_cast<std::size_t>(max_shell) + 1) {
      bound *= 2;
      continue;
    }
    const double q = spec.alpha / spec.norm.p;
    for (std::uint64_t s : tab.exact_sums) {
      tab.sums.push_back(static_cast<double>(s));
      tab.values.push_back(std::pow(static_cast<double>(s), q));
    }
    fill_cumulative(tab);
    return tab;
  }
}

// Non-integer p: enumerate nondecreasing coordinate tuples, merge values that
// agree to a relative tolerance of 1e-12.
ShellTable real_lp_shells(const LatticeSpec& spec, int max_shell, const ShellLimits& limits) {
  const double p = spec.norm.p;
  const int d = spec.dimension;
  std::int64_t X = std::max(2, static_cast<int>(std::ceil(std::pow(max_shell + 1.0, 1.0 / d))) + 1);
  for (;;) {
    const double top = std::pow(static_cast<double>(X), p);
    std::vector<double> pw(X + 1);
    for (std::int64_t x = 0; x <= X; ++x) pw[x] = std::pow(static_cast<double>(x), p);
    std::vector<std::pair<double, i128>> found;
    std::vector<std::int64_t> tuple(d, 0);
    std::int64_t work = 0;
    // Depth-first over x_0 <= x_1 <= ... <= x_{d-1}.
    auto rec = [&](auto&& self, int pos, std::int64_t lo, double partial) -> void {
      if (pos == d) {
        if (++work > limits.sieve_cap) {
          throw ResourceError("Lp tuple enumeration exceeds the sieve cap");
        }
        // permutations * sign patterns
        i128 perms = 1;
        int run = 1, nonzero = 0;
        for (int i = 1; i <= d; ++i) perms *= i;
        for (int i = 1; i <= d; ++i) {
          if (i < d && tuple[i] == tuple[i - 1]) {
            ++run;
          } else {
            for (int r = 2; r <= run; ++r) perms /= r;
            run = 1;
          }
        }
        for (int i = 0; i < d; ++i) nonzero += tuple[i] != 0;
        found.emplace_back(partial, perms << nonzero);
        return;
      }
      for (std::int64_t x = lo; x <= X; ++x) {
        double v = partial + pw[x] * (d - pos);  // remaining coordinates are >= x
        if (v > top * (1 + 1e-12)) break;
        tuple[pos] = x;
        self(self, pos + 1, x, partial + pw[x]);
      }
    };
    rec(rec, 0, 0, 0.0);
    std::sort(found.begin(), found.end(),
              [](const auto& a, const auto& b) { return a.first < b.first; });
    ShellTable tab;
    std::vector<i128> mult;
    for (const auto& [v, m] : found) {
      if (v > top * (1 - 1e-12)) break;  // only values below X^p are complete
      if (!tab.sums.empty()) {
        double prev = tab.sums.back();
        if (std::abs(v - prev) <= 1e-12 * std::max(std::abs(v), std::abs(prev))) {
          mult.back() += m;
          continue;
        }
      }
      tab.sums.push_back(v);
      mult.push_back(m);
    }
    if (tab.sums.size() < static_cast<std::size_t>(max_shell) + 1) {
      X *= 2;
      continue;
    }
    tab.sums.resize(max_shell + 1);
    mult.resize(max_shell + 1);
    const double q = spec.alpha / p;
    for (std::size_t i = 0; i < tab.sums.size(); ++i) {
      tab.values.push_back(std::pow(tab.sums[i], q));
      tab.multiplicities.push_back(narrow_count(mult[i], "Lp shell"));
    }
    fill_cumulative(tab);
    return tab;
  }
}

}  // namespace

bool Norm::integer_p() const {
  return kind == Kind::Lp && p == std::floor(p) && p <= 64;
}

std::string Norm::name() const {
  switch (kind) {
    case Kind::L1: return "l1";
    case Kind::Linf: return "linf";
    case Kind::Lp: {
      std::ostringstream os;
      os << "l" << p;
      return os.str();
    }
  }
  return "?";
}

std::string to_string(Domain d) {
  switch (d) {
    case Domain::Lattice: return "lattice";
    case Domain::HalfLine: return "half_line";
    case Domain::TwoSided: return "two_sided";
  }
  return "?";
}

void LatticeSpec::validate() const {
  if (dimension < 1) throw_invalid("dimension must be >= 1");
  if (!(alpha > 0) || !std::isfinite(alpha)) throw_invalid("alpha must be a positive finite real");
  if (norm.kind == Norm::Kind::Lp && !(norm.p > 1 && std::isfinite(norm.p))) {
    throw_invalid("Lp norm requires p > 1");
  }
  if (domain != Domain::Lattice && dimension != 1) {
    throw_invalid("half_line and two_sided domains are one-dimensional");
  }
  if (domain == Domain::TwoSided && !(alpha_negative > 0 && std::isfinite(alpha_negative))) {
    throw_invalid("alpha_negative must be a positive finite real");
  }
}

std::int64_t l1_shell_count(int d, std::int64_t n) {
  if (n == 0) return 1;
  i128 total = 0;
  for (int i = 1; i <= std::min<std::int64_t>(d, n); ++i) {
    i128 term = binom(d, i) << i;
    // C(n-1, i-1) with n possibly large: multiply incrementally.
    i128 c = 1;
    for (int j = 1; j <= i - 1; ++j) c = c * (n - 1 - (i - 1) + j) / j;
    total += term * c;
  }
  return narrow_count(total, "L1 shell");
}

std::int64_t linf_shell_count(int d, std::int64_t n) {
  if (n == 0) return 1;
  auto pw = [d](i128 b) {
    i128 r = 1;
    for (int i = 0; i < d; ++i) {
      r *= b;
      if (r > (static_cast<i128>(1) << 100)) throw ResourceError("Linf shell count overflows");
    }
    return r;
  };
  return narrow_count(pw(2 * n + 1) - pw(2 * n - 1), "Linf shell");
}

ShellTable enumerate_shells(const LatticeSpec& spec, int max_shell, const ShellLimits& limits) {
  spec.validate();
  if (max_shell < 0) throw_invalid("max_shell must be >= 0");
  if (spec.domain == Domain::HalfLine) return unit_shells(spec.alpha, max_shell, 1);
  if (spec.domain == Domain::TwoSided) return unit_shells(spec.alpha, max_shell, 0);
  switch (spec.norm.kind) {
    case Norm::Kind::L1:
    case Norm::Kind::Linf: {
      ShellTable t;
      t.values.resize(max_shell + 1);
      t.multiplicities.resize(max_shell + 1);
      for (int n = 0; n <= max_shell; ++n) {
        t.values[n] = std::pow(static_cast<double>(n), spec.alpha);
        t.multiplicities[n] = spec.norm.kind == Norm::Kind::L1 ? l1_shell_count(spec.dimension, n)
                                                               : linf_shell_count(spec.dimension, n);
      }
      fill_cumulative(t);
      return t;
    }
    case Norm::Kind::Lp:
      return spec.norm.integer_p() ? integer_lp_shells(spec, max_shell, limits)
                                   : real_lp_shells(spec, max_shell, limits);
  }
  throw_invalid("unknown norm");
}

ShellTable negative_shells(const LatticeSpec& spec, int max_shell) {
  spec.validate();
  if (spec.domain != Domain::TwoSided) throw_invalid("negative_shells requires a two_sided domain");
  if (max_shell < 0) throw_invalid("max_shell must be >= 0");
  return unit_shells(spec.alpha_negative, max_shell, 1);
}

std::vector<double> image_gaps(const ShellTable& table) {
  if (table.values.size() < 2) throw_invalid("image_gaps needs at least two shell values");
  std::vector<double> g(table.values.size() - 1);
  for (std::size_t n = 1; n < table.values.size(); ++n) g[n - 1] = table.values[n] - table.values[n - 1];
  return g;
}

SiteList::SiteList(int dimension, std::vector<SiteEntry> entries, std::vector<std::int32_t> coords)
    : dimension_(dimension), entries_(std::move(entries)), coords_(std::move(coords)) {}

std::int64_t SiteList::find(std::span<const std::int32_t> c) const {
  if (static_cast<int>(c.size()) != dimension_) return -1;
  for (std::size_t i = 0; i < entries_.size(); ++i) {
    auto s = coordinates(i);
    if (std::equal(s.begin(), s.end(), c.begin())) return static_cast<std::int64_t>(i);
  }
  return -1;
}

SiteList enumerate_sites(const LatticeSpec& spec, int max_shell, const ShellLimits& limits) {
  ShellTable table = enumerate_shells(spec, max_shell, limits);
  std::vector<SiteEntry> entries;
  std::vector<std::int32_t> coords;

  if (spec.domain == Domain::HalfLine || spec.domain == Domain::TwoSided) {
    if (spec.domain == Domain::TwoSided) {
      ShellTable neg = negative_shells(spec, max_shell);
      for (int m = max_shell; m >= 0; --m) {
        entries.push_back({0, m, -1, -neg.values[m]});
        coords.push_back(-(m + 1));
      }
    }
    const int offset = spec.domain == Domain::HalfLine ? 1 : 0;
    for (int n = 0; n <= max_shell; ++n) {
      entries.push_back({0, n, 1, table.values[n]});
      coords.push_back(n + offset);
    }
    for (std::size_t i = 0; i < entries.size(); ++i) entries[i].site_id = static_cast<std::int64_t>(i);
    return SiteList(1, std::move(entries), std::move(coords));
  }

  const std::int64_t total = table.cumulative.back();
  if (total > limits.site_cap) {
    std::ostringstream os;
    os << "window holds " << total << " sites, above the cap " << limits.site_cap;
    throw ResourceError(os.str());
  }
  const int d = spec.dimension;

  // Shell of a coordinate vector, or -1 if outside the window.
  std::int64_t radius = max_shell;
  const bool int_p = spec.norm.integer_p();
  const int ip = int_p ? static_cast<int>(spec.norm.p) : 0;
  std::uint64_t top_exact = 0;
  double top_real = 0;
  if (spec.norm.kind == Norm::Kind::Lp) {
    if (int_p) {
      top_exact = table.exact_sums.back();
      radius = 0;
      while (ipow_sat(radius + 1, ip) <= top_exact) ++radius;
    } else {
      top_real = table.sums.back();
      radius = static_cast<std::int64_t>(std::floor(std::pow(top_real * (1 + 1e-12), 1.0 / spec.norm.p)));
    }
  }

  std::vector<std::int32_t> x(d);
  std::vector<std::int32_t> flat;
  std::vector<std::int32_t> shells;
  auto shell_of_partial_done = [&]() -> std::int64_t {
    switch (spec.norm.kind) {
      case Norm::Kind::L1: {
        std::int64_t s = 0;
        for (int v : x) s += std::abs(v);
        return s;
      }
      case Norm::Kind::Linf: {
        std::int64_t s = 0;
        for (int v : x) s = std::max<std::int64_t>(s, std::abs(v));
        return s;
      }
      case Norm::Kind::Lp: {
        if (int_p) {
          std::uint64_t s = 0;
          for (int v : x) s += ipow_sat(std::abs(v), ip);
          auto it = std::lower_bound(table.exact_sums.begin(), table.exact_sums.end(), s);
          if (it == table.exact_sums.end() || *it != s) return -1;
          return it - table.exact_sums.begin();
        }
        double s = 0;
        for (int v : x) s += std::pow(std::abs(static_cast<double>(v)), spec.norm.p);
        auto it = std::lower_bound(table.sums.begin(), table.sums.end(), s * (1 - 1e-12));
        if (it == table.sums.end()) return -1;
        if (std::abs(*it - s) > 1e-12 * std::max(std::abs(*it), std::abs(s)) && !(*it == 0 && s == 0)) return -1;
        return it - table.sums.begin();
      }
    }
    return -1;
  };
  // Partial norm bound used for pruning the coordinate recursion.
  auto partial_exceeds = [&](int upto) -> bool {
    switch (spec.norm.kind) {
      case Norm::Kind::L1: {
        std::int64_t s = 0;
        for (int i = 0; i < upto; ++i) s += std::abs(x[i]);
        return s > max_shell;
      }
      case Norm::Kind::Linf: return false;  // box bound is exact
      case Norm::Kind::Lp: {
        if (int_p) {
          std::uint64_t s = 0;
          for (int i = 0; i < upto; ++i) s += ipow_sat(std::abs(x[i]), ip);
          return s > top_exact;
        }
        double s = 0;
        for (int i = 0; i < upto; ++i) s += std::pow(std::abs(static_cast<double>(x[i])), spec.norm.p);
        return s > top_real * (1 + 1e-12);
      }
    }
    return false;
  };
  auto rec = [&](auto&& self, int pos) -> void {
    if (pos == d) {
      std::int64_t sh = shell_of_partial_done();
      if (sh < 0 || sh > max_shell) return;
      flat.insert(flat.end(), x.begin(), x.end());
      shells.push_back(static_cast<std::int32_t>(sh));
      return;
    }
    for (std::int64_t v = -radius; v <= radius; ++v) {
      x[pos] = static_cast<std::int32_t>(v);
      if (partial_exceeds(pos + 1)) continue;
      self(self, pos + 1);
    }
  };
  rec(rec, 0);

  if (static_cast<std::int64_t>(shells.size()) != total) {
    throw std::logic_error("site enumeration disagrees with the shell table");
  }
  // Stable counting sort by shell keeps lexicographic order inside shells.
  std::vector<std::int64_t> start(table.cumulative.begin(), table.cumulative.end());
  for (std::size_t n = 0; n < start.size(); ++n) start[n] -= table.multiplicities[n];
  entries.resize(shells.size());
  coords.resize(flat.size());
  for (std::size_t i = 0; i < shells.size(); ++i) {
    std::int64_t pos = start[shells[i]]++;
    entries[pos] = {pos, shells[i], 1, table.values[shells[i]]};
    std::copy_n(flat.begin() + static_cast<std::ptrdiff_t>(i) * d, d, coords.begin() + pos * d);
  }
  return SiteList(d, std::move(entries), std::move(coords));
}

}  // namespace rigidity
