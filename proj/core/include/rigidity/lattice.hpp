#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

namespace rigidity {

struct Norm {
  enum class Kind { L1, Linf, Lp };
  Kind kind = Kind::L1;
  double p = 2.0;  // Lp only

  static Norm l1() { return {Kind::L1, 1.0}; }
  static Norm linf() { return {Kind::Linf, 0.0}; }
  static Norm lp(double p) { return {Kind::Lp, p}; }

  bool integer_p() const;
  std::string name() const;
  bool operator==(const Norm&) const = default;
};

// Where V lives.
//   Lattice:  z in Z^d, V(z) = |z|^alpha.
//   HalfLine: z in {1, 2, ...}, V(z) = z^alpha. Shell n is the site z = n + 1.
//   TwoSided: z in Z, V(z) = z^alpha for z >= 0 and -|z|^alpha_negative for z < 0.
//             Shell tables describe the positive side; the negative side is
//             handled through negative_shells().
enum class Domain { Lattice, HalfLine, TwoSided };

struct LatticeSpec {
  int dimension = 1;
  Norm norm = Norm::l1();
  double alpha = 1.0;
  Domain domain = Domain::Lattice;
  double alpha_negative = 2.0;  // TwoSided only

  void validate() const;
  bool operator==(const LatticeSpec&) const = default;
};

std::string to_string(Domain d);

struct ShellLimits {
  std::int64_t site_cap = 5'000'000;   // materialized sites (enumerate_sites)
  std::int64_t sieve_cap = 5'000'000;  // sieve length / tuple count (Lp shells)
};

struct ShellTable {
  std::vector<double> values;
  std::vector<std::int64_t> multiplicities;
  std::vector<std::int64_t> cumulative;
  std::vector<std::uint64_t> exact_sums;  // s_n, Lp with integer p only
  std::vector<double> sums;               // s_n, any Lp

  std::size_t size() const { return values.size(); }
  int max_shell() const { return static_cast<int>(values.size()) - 1; }
};

ShellTable enumerate_shells(const LatticeSpec& spec, int max_shell, const ShellLimits& limits = {});

// Mirrored table of the negative side of a TwoSided spec: values (n+1)^alpha_negative,
// i.e. the absolute values of V at z = -1, -2, ...
ShellTable negative_shells(const LatticeSpec& spec, int max_shell);

std::vector<double> image_gaps(const ShellTable& table);

// Closed-form shell multiplicities.
std::int64_t l1_shell_count(int dimension, std::int64_t n);
std::int64_t linf_shell_count(int dimension, std::int64_t n);

struct SiteEntry {
  std::int64_t site_id = 0;
  std::int32_t shell = 0;
  std::int8_t side = 1;  // -1 for the negative side of a TwoSided domain
  double value = 0.0;
};

class SiteList {
 public:
  SiteList() = default;
  SiteList(int dimension, std::vector<SiteEntry> entries, std::vector<std::int32_t> coords);

  int dimension() const { return dimension_; }
  std::size_t size() const { return entries_.size(); }
  bool empty() const { return entries_.empty(); }
  const SiteEntry& operator[](std::size_t i) const { return entries_[i]; }
  const std::vector<SiteEntry>& entries() const { return entries_; }
  std::span<const std::int32_t> coordinates(std::size_t i) const {
    return {coords_.data() + i * static_cast<std::size_t>(dimension_), static_cast<std::size_t>(dimension_)};
  }
  // Index of the site with these coordinates, or -1.
  std::int64_t find(std::span<const std::int32_t> coords) const;

 private:
  int dimension_ = 1;
  std::vector<SiteEntry> entries_;
  std::vector<std::int32_t> coords_;
};

// Sites of the window with shell <= max_shell (both sides for TwoSided), sorted
// by value; ties within a shell follow lexicographic coordinate order.
SiteList enumerate_sites(const LatticeSpec& spec, int max_shell, const ShellLimits& limits = {});

}  // namespace rigidity
