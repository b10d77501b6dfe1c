#include "rigidity/process.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "rigidity/errors.hpp"
#include "rigidity/random.hpp"

namespace rigidity {

std::string to_string(Side s) {
  switch (s) {
    case Side::Positive: return "positive";
    case Side::Negative: return "negative";
    case Side::TwoSided: return "two_sided";
  }
  return "?";
}


void PointConfiguration::validate() const {
  if (!std::is_sorted(points.begin(), points.end())) throw_invalid("observed points must be sorted");
  for (double x : points) {
    if (!std::isfinite(x)) throw_invalid("observed points must be finite");
  }
  if (!points.empty()) {
    if (side != Side::Negative && points.back() > window_cut) throw_invalid("observed point above the window cut");
    if (side == Side::TwoSided && points.front() < window_cut_low) {
      throw_invalid("observed point below the window cut");
    }
    if (side == Side::Negative && points.front() < -window_cut) throw_invalid("observed point below the window cut");
  }
}

GroundTruth::GroundTruth(std::vector<std::int64_t> deleted, std::vector<std::int64_t> point_origin,
                         std::int64_t cut_exits, std::int64_t window_sites)
    : deleted_(std::move(deleted)),
      point_origin_(std::move(point_origin)),
      cut_exits_(cut_exits),
      window_sites_(window_sites) {}

GroundTruth::GroundTruth(const GroundTruth& o)
    : deleted_(o.deleted_),
      point_origin_(o.point_origin_),
      cut_exits_(o.cut_exits_),
      window_sites_(o.window_sites_),
      accesses_(o.accesses_.load()) {}

GroundTruth& GroundTruth::operator=(const GroundTruth& o) {
  deleted_ = o.deleted_;
  point_origin_ = o.point_origin_;
  cut_exits_ = o.cut_exits_;
  window_sites_ = o.window_sites_;
  accesses_ = o.accesses_.load();
  return *this;
}

const std::vector<std::int64_t>& GroundTruth::deleted() const {
  ++accesses_;
  return deleted_;
}

const std::vector<std::int64_t>& GroundTruth::point_origin() const {
  ++accesses_;
  return point_origin_;
}

DeletionSpec DeletionSpec::explicit_sites(std::vector<std::int64_t> ids) {
  DeletionSpec d;
  d.kind = Kind::Explicit;
  d.sites = std::move(ids);
  return d;
}

DeletionSpec DeletionSpec::random(int count, int max_shell) {
  DeletionSpec d;
  d.kind = Kind::Random;
  d.count = count;
  d.max_shell = max_shell;
  return d;
}

std::pair<double, double> default_window_cut(const LatticeSpec& spec, const NoiseModel& noise, int max_shell,
                                             int edge_margin) {
  const int top = max_shell - edge_margin;
  if (top < 0) throw_invalid("edge_margin exceeds max_shell");
  const double s3 = 3.0 * noise.marginal_sd();
  ShellTable pos = enumerate_shells(spec, top);
  double high = pos.values[top] + s3;
  double low = -std::numeric_limits<double>::infinity();
  if (spec.domain == Domain::TwoSided) low = -(negative_shells(spec, top).values[top] + s3);
  return {low, high};
}

std::vector<std::int64_t> resolve_deletion(const DeletionSpec& deletion, const SiteList& sites, std::uint64_t seed) {
  std::vector<std::int64_t> out;
  const auto L = static_cast<std::int64_t>(sites.size());
  switch (deletion.kind) {
    case DeletionSpec::Kind::None: break;
    case DeletionSpec::Kind::Explicit: {
      for (auto id : deletion.sites) {
        if (id < 0 || id >= L) {
          std::ostringstream os;
          os << "deleted site id " << id << " is outside the window (" << L << " sites)";
          throw InvalidArgument(os.str());
        }
        out.push_back(id);
      }
      for (const auto& c : deletion.coords) {
        std::int64_t id = sites.find(c);
        if (id < 0) throw InvalidArgument("deleted site coordinates are outside the window");
        out.push_back(id);
      }
      break;
    }
    case DeletionSpec::Kind::Random: {
      std::vector<std::int64_t> pool;
      for (std::int64_t i = 0; i < L; ++i) {
        if (sites[i].shell <= deletion.max_shell) pool.push_back(i);
      }
      if (deletion.count < 0 || deletion.count > static_cast<int>(pool.size())) {
        std::ostringstream os;
        os << "cannot delete " << deletion.count << " sites from " << pool.size() << " candidates in shells <= "
           << deletion.max_shell;
        throw InvalidArgument(os.str());
      }
      for (int i = 0; i < deletion.count; ++i) {
        auto span = static_cast<std::uint64_t>(pool.size() - i);
        auto j = static_cast<std::size_t>(i + random_bits(seed, Stream::Deletion, i) % span);
        std::swap(pool[i], pool[j]);
        out.push_back(pool[i]);
      }
      break;
    }
  }
  std::sort(out.begin(), out.end());
  if (std::adjacent_find(out.begin(), out.end()) != out.end()) throw InvalidArgument("deleted sites repeat");
  return out;
}

SimulatedProcess simulate_process(const LatticeSpec& spec, const SiteList& sites, const std::vector<double>& noise,
                                  const std::vector<std::int64_t>& deleted, const WindowSpec& window,
                                  const NoiseModel& noise_model) {
  if (noise.size() != sites.size()) throw_invalid("noise vector is not aligned with the sites");
  double low = -std::numeric_limits<double>::infinity(), high = std::numeric_limits<double>::infinity();
  if (window.cut == WindowSpec::Cut::Default) {
    std::tie(low, high) = default_window_cut(spec, noise_model, window.max_shell, window.edge_margin);
  } else if (window.cut == WindowSpec::Cut::Value) {
    high = window.cut_value;
    if (spec.domain == Domain::TwoSided) low = window.cut_value_low;
  }
  std::vector<char> gone(sites.size(), 0);
  for (auto id : deleted) {
    if (id < 0 || id >= static_cast<std::int64_t>(sites.size())) throw InvalidArgument("deletion outside window");
    gone[id] = 1;
  }
  std::vector<std::pair<double, std::int64_t>> obs;
  obs.reserve(sites.size());
  std::int64_t exits = 0, surviving = 0;
  for (std::size_t i = 0; i < sites.size(); ++i) {
    if (gone[i]) continue;
    ++surviving;
    double x = sites[i].value + noise[i];
    if (x > high || x < low) {
      ++exits;
      continue;
    }
    obs.emplace_back(x, static_cast<std::int64_t>(i));
  }
  std::sort(obs.begin(), obs.end());
  SimulatedProcess out;
  out.observed.side = spec.domain == Domain::TwoSided ? Side::TwoSided : Side::Positive;
  out.observed.window_cut = high;
  out.observed.window_cut_low = low;
  out.observed.points.reserve(obs.size());
  std::vector<std::int64_t> origin;
  origin.reserve(obs.size());
  for (const auto& [x, i] : obs) {
    out.observed.points.push_back(x);
    origin.push_back(i);
  }
  out.truth = GroundTruth(deleted, std::move(origin), exits, surviving);
  return out;
}

SimulatedProcess simulate_process(const LatticeSpec& spec, const NoiseModel& noise, const DeletionSpec& deletion,
                                  const WindowSpec& window, std::uint64_t seed) {
  SiteList sites = enumerate_sites(spec, window.max_shell);
  NoiseSampler sampler(noise, sites);
  std::vector<double> g;
  sampler.sample_into(seed, g);
  auto deleted = resolve_deletion(deletion, sites, seed);
  return simulate_process(spec, sites, g, deleted, window, noise);
}

}  // namespace rigidity
