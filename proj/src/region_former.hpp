#pragma once

#include <optional>
#include <set>
#include <string>
#include <unordered_map>
#include <vector>

#include "regionc/regions.hpp"

namespace regionc::detail {

struct FormedRegion {
  std::vector<std::string> blocks;
  std::string entry;
  std::string seed;
  std::size_t pending = 0;  // returned callee code folded into this region
};

/// Callee regions handed back to the caller after inlining a call block.
struct CallExpansion {
  FormedRegion entry_region;
  FormedRegion exit_region;  // same as entry_region when pass-through
  bool pass_through = false;
  std::string copy_entry;
  std::string copy_exit;
};

/// Four-step region growth over a pool of blocks of one working procedure.
/// Subclasses decide what happens when growth reaches a call block.
class RegionFormer {
 public:
  RegionFormer(Procedure& proc, const RegionParams& params, GrowthBudget* budget = nullptr)
      : proc_(proc), params_(params), budget_(budget) {}
  virtual ~RegionFormer() = default;

  std::vector<FormedRegion> run(std::set<std::string> pool);

 protected:
  /// Returns the callee regions if the call was inlined; nullopt halts growth.
  /// `seed_weight` is absent when the call itself was picked as a seed.
  virtual std::optional<CallExpansion> expand(const std::string&, const std::optional<Weight>&) {
    return std::nullopt;
  }
  virtual bool expands_calls() const { return false; }
  virtual void on_clones(const std::map<std::string, std::string>&) {}
  /// Whether `n` instructions of tail-duplicated code still fit.
  virtual bool admit_clones(std::size_t n) { return !budget_ || budget_->admit(n); }

  Procedure& proc_;
  const RegionParams& params_;
  GrowthBudget* budget_;

 private:
  struct Iter {
    std::vector<FormedRegion> regions;
    std::unordered_map<std::string, std::size_t> region_of;
    Weight seed_weight;
  };

  void reindex();
  const Block& block(const std::string& id) const { return proc_.blocks[index_.at(id)]; }
  bool desirable(const std::string& x, const std::string& y, const Iter& it, std::size_t k) const;
  void add(Iter& it, std::size_t k, const std::string& id);
  void absorb(Iter& it, std::size_t k, const FormedRegion& r);
  std::size_t open(Iter& it, const FormedRegion& r);
  std::optional<std::string> most_frequent(const std::vector<std::string>& candidates) const;
  std::optional<CallExpansion> try_expand(const std::string& y, const std::optional<Weight>& seed_weight);

  std::set<std::string> pool_;
  std::unordered_map<std::string, std::size_t> index_;
  std::unordered_map<std::string, std::vector<std::string>> preds_;
};

}  // namespace regionc::detail
