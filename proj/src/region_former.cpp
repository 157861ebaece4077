#include "region_former.hpp"

#include <stdexcept>

namespace regionc::detail {

void RegionFormer::reindex() {
  index_.clear();
  preds_.clear();
  for (std::size_t i = 0; i < proc_.blocks.size(); ++i) index_[proc_.blocks[i].id] = i;
  for (const auto& b : proc_.blocks)
    for (const auto& s : b.successors) preds_[s].push_back(b.id);
}

bool RegionFormer::desirable(const std::string& x, const std::string& y, const Iter& it, std::size_t k) const {
  const Weight& wy = block(y).weight;
  const Weight& r = params_.desirability_ratio;
  return wy >= r * block(x).weight && wy >= r * it.seed_weight &&
         it.regions[k].blocks.size() < params_.max_region_blocks;
}

void RegionFormer::add(Iter& it, std::size_t k, const std::string& id) {
  it.regions[k].blocks.push_back(id);
  it.region_of[id] = k;
  pool_.erase(id);
}

void RegionFormer::absorb(Iter& it, std::size_t k, const FormedRegion& r) {
  for (const auto& b : r.blocks) add(it, k, b);
  it.regions[k].pending += r.pending;
}

std::size_t RegionFormer::open(Iter& it, const FormedRegion& r) {
  it.regions.push_back(FormedRegion{{}, r.entry, r.seed, 0});
  std::size_t k = it.regions.size() - 1;
  absorb(it, k, r);
  return k;
}

std::optional<std::string> RegionFormer::most_frequent(const std::vector<std::string>& candidates) const {
  std::optional<std::string> best;
  for (const auto& c : candidates) {
    if (!index_.count(c)) continue;
    if (!best || block(c).weight > block(*best).weight) best = c;
  }
  return best;
}

std::optional<CallExpansion> RegionFormer::try_expand(const std::string& y, const std::optional<Weight>& seed_weight) {
  auto exp = expand(y, seed_weight);
  if (exp) {
    pool_.erase(y);
    reindex();
  }
  return exp;
}

std::vector<FormedRegion> RegionFormer::run(std::set<std::string> pool) {
  pool_ = std::move(pool);
  reindex();
  const std::size_t initial_blocks = proc_.blocks.size();
  std::vector<FormedRegion> done;

  while (!pool_.empty()) {
    Iter it;
    std::string s;
    for (const auto& id : pool_) {
      if (s.empty() || block(id).weight > block(s).weight ||
          (block(id).weight == block(s).weight && natural_less(id, s)))
        s = id;
    }
    it.seed_weight = block(s).weight;
    std::size_t k0;
    std::string x;
    std::optional<CallExpansion> seeded;
    if (expands_calls() && is_call_block(block(s))) seeded = try_expand(s, std::nullopt);
    if (seeded) {
      if (!seeded->pass_through) open(it, seeded->entry_region);
      k0 = open(it, seeded->exit_region);
      x = seeded->copy_exit;
    } else {
      pool_.erase(s);
      k0 = open(it, FormedRegion{{s}, s, s, 0});
      x = s;
    }

    // Successor path.
    std::size_t cur = k0;
    while (true) {
      std::vector<std::string> succs = block(x).successors;
      auto y = most_frequent(succs);
      if (!y || !pool_.count(*y) || !desirable(x, *y, it, cur)) break;
      if (is_call_block(block(*y))) {
        if (!expands_calls()) break;
        auto exp = try_expand(*y, it.seed_weight);
        if (!exp) break;
        absorb(it, cur, exp->entry_region);
        if (!exp->pass_through) cur = open(it, exp->exit_region);
        x = exp->copy_exit;
        continue;
      }
      add(it, cur, *y);
      x = *y;
    }

    // Predecessor path, extending the seed's region upward.
    cur = k0;
    x = it.regions[k0].entry;
    while (true) {
      std::vector<std::string> preds = preds_[x];
      auto y = most_frequent(preds);
      if (!y || !pool_.count(*y) || !desirable(x, *y, it, cur)) break;
      if (is_call_block(block(*y))) {
        if (!expands_calls()) break;
        auto exp = try_expand(*y, it.seed_weight);
        if (!exp) break;
        if (exp->pass_through) {
          absorb(it, cur, exp->entry_region);
          it.regions[cur].entry = exp->entry_region.entry;
        } else {
          absorb(it, cur, exp->exit_region);
          it.regions[cur].entry = exp->exit_region.entry;
          cur = open(it, exp->entry_region);
        }
        x = exp->copy_entry;
        continue;
      }
      add(it, cur, *y);
      it.regions[cur].entry = *y;
      x = *y;
    }

    // Desirable successors of every block grown so far.
    std::vector<std::string> stack;
    for (const auto& r : it.regions) stack.insert(stack.end(), r.blocks.begin(), r.blocks.end());
    while (!stack.empty()) {
      std::string b = stack.back();
      stack.pop_back();
      std::size_t k = it.region_of.at(b);
      std::vector<std::string> succs = block(b).successors;
      for (const auto& y : succs) {
        if (!pool_.count(y) || !desirable(b, y, it, k)) continue;
        if (is_call_block(block(y))) {
          if (!expands_calls()) continue;
          auto exp = try_expand(y, it.seed_weight);
          if (!exp) continue;
          absorb(it, k, exp->entry_region);
          if (!exp->pass_through) open(it, exp->exit_region);
          stack.push_back(exp->copy_exit);
          continue;
        }
        add(it, k, y);
        stack.push_back(y);
      }
    }

    for (auto& r : it.regions) {
      std::set<std::string> members(r.blocks.begin(), r.blocks.end());
      std::set<std::string> tail = tail_closure(proc_, members, r.entry);
      std::size_t tail_size = 0;
      for (const auto& b : tail) tail_size += code_size(block(b));
      if (!tail.empty() && !admit_clones(tail_size)) {
        std::erase_if(r.blocks, [&](const std::string& b) { return tail.count(b) > 0; });
        pool_.insert(tail.begin(), tail.end());
        if (tail.count(r.seed)) {
          r.seed = r.entry;
          for (const auto& b : r.blocks)
            if (block(b).weight > block(r.seed).weight ||
                (block(b).weight == block(r.seed).weight && natural_less(b, r.seed)))
              r.seed = b;
        }
        done.push_back(std::move(r));
        continue;
      }
      TailDuplication td = tail_duplicate(proc_, members, r.entry);
      if (!td.clones.empty()) {
        proc_ = std::move(td.procedure);
        pool_.insert(td.clones.begin(), td.clones.end());
        on_clones(td.clone_of);
        reindex();
      }
      done.push_back(std::move(r));
    }
    if (proc_.blocks.size() > 64 * initial_blocks + 4096)
      throw std::logic_error("tail duplication did not converge in " + proc_.name);
  }
  return done;
}

}  // namespace regionc::detail
