#include "rigidity/shepp.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <memory>

#include "rigidity/errors.hpp"
#include "rigidity/linear_statistics.hpp"

namespace rigidity {

namespace {

constexpr double kBand = 0.05;

// Value sequence of a lattice enumerated by nondecreasing V, as (base, q)
// with V = base^q, produced lazily shell by shell.
class Enumeration {
 public:
  Enumeration(const LatticeSpec& spec, std::int64_t count) : spec_(spec) {
    int N = 16;
    for (;;) {
      table_ = enumerate_shells(spec, N, ShellLimits{std::numeric_limits<std::int64_t>::max(), 50'000'000});
      if (table_.cumulative.back() >= count) break;
      N *= 2;
    }
    if (spec.domain == Domain::Lattice && spec.norm.kind == Norm::Kind::Lp) {
      q_ = spec.alpha / spec.norm.p;
    } else {
      q_ = spec.alpha;
    }
  }
  // Shell of enumeration index i.
  int shell(std::int64_t i) const {
    return static_cast<int>(std::upper_bound(table_.cumulative.begin(), table_.cumulative.end(), i) -
                            table_.cumulative.begin());
  }
  double base(int n) const {
    if (spec_.domain == Domain::Lattice && spec_.norm.kind == Norm::Kind::Lp) return table_.sums[n];
    if (spec_.domain == Domain::HalfLine) return n + 1.0;
    return n;
  }
  double diff(int a, int b) const {  // V(shell a) - V(shell b), a >= b
    if (a == b) return 0.0;
    return power_difference(base(a), base(b), q_);
  }

 private:
  LatticeSpec spec_;
  ShellTable table_;
  double q_ = 1.0;
};

// i-th entry of the sequence with the (sorted) indices in del removed.
class Survivors {
 public:
  explicit Survivors(std::vector<std::int64_t> del) : del_(std::move(del)) {
    std::sort(del_.begin(), del_.end());
    del_.erase(std::unique(del_.begin(), del_.end()), del_.end());
  }
  // Called with i = 0, 1, 2, ... in order.
  std::int64_t next() {
    while (ptr_ < del_.size() && del_[ptr_] <= cur_) {
      if (del_[ptr_] == cur_) ++cur_;
      ++ptr_;
    }
    return cur_++;
  }
  std::int64_t max_deleted() const { return del_.empty() ? -1 : del_.back(); }

 private:
  std::vector<std::int64_t> del_;
  std::size_t ptr_ = 0;
  std::int64_t cur_ = 0;
};

}  // namespace

double power_difference(double a, double b, double q) {
  if (a == b) return 0.0;
  if (b <= 0) return std::pow(a, q);
  return std::pow(b, q) * std::expm1(q * std::log1p((a - b) / b));
}

std::string to_string(ShiftScenario::Kind k) {
  switch (k) {
    case ShiftScenario::Kind::SingleDeletion: return "single_deletion";
    case ShiftScenario::Kind::PairedDeletion: return "paired_deletion";
    case ShiftScenario::Kind::DoubleSided: return "double_sided";
    case ShiftScenario::Kind::UnitShift: return "unit_shift";
  }
  return "?";
}

std::string to_string(Verdict v) {
  switch (v) {
    case Verdict::Converges: return "converges";
    case Verdict::Diverges: return "diverges";
    case Verdict::Inconclusive: return "inconclusive";
  }
  return "?";
}

std::string to_string(EllpReport::Trend t) {
  switch (t) {
    case EllpReport::Trend::TendsToZero: return "tends_to_zero";
    case EllpReport::Trend::DoesNotTendToZero: return "does_not_tend_to_zero";
    case EllpReport::Trend::Inconclusive: return "inconclusive";
  }
  return "?";
}

SheppReport shepp_sum(const ShiftScenario& sc, std::int64_t I_max) {
  if (I_max < 10) throw_invalid("I_max must be >= 10");
  if (sc.kind == ShiftScenario::Kind::UnitShift || sc.kind == ShiftScenario::Kind::DoubleSided) {
    if (!(sc.alpha > 0)) throw_invalid("alpha must be > 0");
  } else {
    sc.spec.validate();
    if (sc.spec.domain == Domain::TwoSided) throw_invalid("deletion scenarios enumerate a one-sided domain");
  }
  if (sc.kind == ShiftScenario::Kind::PairedDeletion && sc.S.size() != sc.T.size()) {
    throw_invalid("paired deletion needs |S| = |T|");
  }
  for (auto v : sc.S) if (v < 0) throw_invalid("deleted indices must be >= 0");
  for (auto v : sc.T) if (v < 0) throw_invalid("deleted indices must be >= 0");

  std::function<double(std::int64_t)> term;
  std::unique_ptr<Enumeration> en;
  Survivors s_surv(sc.S), t_surv(sc.T);
  switch (sc.kind) {
    case ShiftScenario::Kind::UnitShift: {
      const double a = sc.alpha;
      term = [a](std::int64_t i) {
        double d = power_difference(i + 1.0, static_cast<double>(i), a);
        return d * d;
      };
      break;
    }
    case ShiftScenario::Kind::DoubleSided: {
      // Interleaved enumeration 0, 1, -1, 2, -2, ...; deleting positive sites
      // shifts only the positive entries.
      const double a = sc.alpha;
      term = [a, &s_surv](std::int64_t i) {
        if (i > 0 && i % 2 == 0) return 0.0;
        std::int64_t z = i == 0 ? 0 : (i + 1) / 2;
        std::int64_t zs = s_surv.next();
        double d = power_difference(static_cast<double>(zs), static_cast<double>(z), a);
        return d * d;
      };
      break;
    }
    case ShiftScenario::Kind::SingleDeletion:
    case ShiftScenario::Kind::PairedDeletion: {
      std::int64_t extra = static_cast<std::int64_t>(std::max(sc.S.size(), sc.T.size()));
      en = std::make_unique<Enumeration>(sc.spec, I_max + extra + 1);
      const bool paired = sc.kind == ShiftScenario::Kind::PairedDeletion;
      term = [&, paired](std::int64_t i) {
        std::int64_t a = s_surv.next();
        std::int64_t b = paired ? t_surv.next() : i;
        int sa = en->shell(a), sb = en->shell(b);
        double d = sa >= sb ? en->diff(sa, sb) : en->diff(sb, sa);
        return d * d;
      };
      break;
    }
  }

  SheppReport rep;
  std::vector<std::int64_t> marks;
  for (std::int64_t c = 1000; c < I_max; c *= 10) marks.push_back(c);
  marks.push_back(I_max);
  // Log-spaced bins over the last decade for the tail fit.
  const std::int64_t tail_start = I_max / 10;
  constexpr int kBins = 50;
  std::vector<double> bin_sum(kBins, 0.0);
  std::vector<std::int64_t> bin_count(kBins, 0);
  const double lstart = std::log(static_cast<double>(std::max<std::int64_t>(tail_start, 1)));
  const double lwidth = (std::log(static_cast<double>(I_max)) - lstart) / kBins;

  long double sum = 0.0L;
  std::size_t mi = 0;
  double t = 0.0;
  bool tail_zero = true;
  for (std::int64_t i = 0; i < I_max; ++i) {
    t = term(i);
    sum += t;
    if (t != 0.0) rep.last_nonzero = i;
    if (i >= tail_start && i > 0) {
      if (t != 0.0) tail_zero = false;
      int b = static_cast<int>((std::log(static_cast<double>(i)) - lstart) / lwidth);
      b = std::clamp(b, 0, kBins - 1);
      bin_sum[b] += t;
      ++bin_count[b];
    }
    if (i + 1 == marks[mi]) {
      rep.checkpoints.push_back({i + 1, static_cast<double>(sum), t});
      ++mi;
    }
  }
  rep.terms_vanish = tail_zero;
  if (tail_zero) {
    rep.verdict = Verdict::Converges;
    return rep;
  }
  std::vector<double> lx, ly;
  for (int b = 0; b < kBins; ++b) {
    if (bin_count[b] == 0 || bin_sum[b] <= 0) continue;
    double lo = std::exp(lstart + b * lwidth), hi = std::exp(lstart + (b + 1) * lwidth);
    lx.push_back(std::log(std::sqrt(lo * hi)));
    ly.push_back(std::log(bin_sum[b] / bin_count[b]));
  }
  if (lx.size() >= 3) {
    LineFit f = least_squares(lx, ly);
    TailFit tf{f.slope, f.slope - 1.96 * f.slope_se, f.slope + 1.96 * f.slope_se};
    rep.tail = tf;
    if (tf.ci_high < -1.0 - kBand) rep.verdict = Verdict::Converges;
    else if (tf.ci_low > -1.0 + kBand) rep.verdict = Verdict::Diverges;
  }
  return rep;
}

EllpReport ellp_condition(const LatticeSpec& spec, int max_n) {
  spec.validate();
  if (spec.domain != Domain::Lattice || spec.norm.kind != Norm::Kind::Lp) {
    throw_invalid("ellp_condition needs an Lp lattice");
  }
  if (max_n < 10) throw_invalid("max_n must be >= 10");
  ShellTable t = enumerate_shells(spec, max_n, ShellLimits{std::numeric_limits<std::int64_t>::max(), 50'000'000});
  EllpReport rep;
  rep.s = t.exact_sums;
  const double q = spec.alpha / spec.norm.p;
  rep.ratios.resize(max_n);
  for (int n = 1; n <= max_n; ++n) {
    double gap = power_difference(t.sums[n], t.sums[n - 1], q);
    if (!(gap > 1e-12 * t.values[n])) {
      rep.gap_zero.push_back(n);
      rep.ratios[n - 1] = std::numeric_limits<double>::quiet_NaN();
      continue;
    }
    rep.ratios[n - 1] = std::sqrt(std::log(static_cast<double>(n))) / gap;
  }
  std::vector<double> lx, ly;
  for (int n = std::max(2, max_n / 10); n <= max_n; ++n) {
    double r = rep.ratios[n - 1];
    if (!(r > 0)) continue;
    lx.push_back(std::log(static_cast<double>(n)));
    ly.push_back(std::log(r));
  }
  if (lx.size() >= 3) {
    rep.tail_slope = least_squares(lx, ly).slope;
    if (rep.tail_slope < -kBand) rep.trend = EllpReport::Trend::TendsToZero;
    else if (rep.tail_slope >= 0) rep.trend = EllpReport::Trend::DoesNotTendToZero;
  }
  return rep;
}

}  // namespace rigidity
