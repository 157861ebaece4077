#include <algorithm>
#include <deque>

#include "regionc/regions.hpp"

namespace regionc {

std::vector<std::string> side_entries(const Procedure& proc, const std::set<std::string>& region,
                                      const std::string& entry) {
  std::set<std::string> hit;
  for (const auto& p : proc.blocks) {
    if (region.count(p.id)) continue;
    for (const auto& s : p.successors)
      if (s != entry && region.count(s)) hit.insert(s);
  }
  std::vector<std::string> out;
  for (const auto& b : proc.blocks)
    if (hit.count(b.id)) out.push_back(b.id);
  return out;
}

std::set<std::string> tail_closure(const Procedure& proc, const std::set<std::string>& region,
                                   const std::string& entry) {
  std::vector<std::string> work = side_entries(proc, region, entry);
  std::set<std::string> closure(work.begin(), work.end());
  while (!work.empty()) {
    std::string v = work.back();
    work.pop_back();
    for (const auto& s : proc.at(v).successors)
      if (s != entry && region.count(s) && closure.insert(s).second) work.push_back(s);
  }
  return closure;
}

TailDuplication tail_duplicate(const Procedure& proc, const std::set<std::string>& region, const std::string& entry) {
  TailDuplication out{proc, {}, {}};
  std::vector<std::string> side = side_entries(proc, region, entry);
  if (side.empty()) return out;

  std::map<std::string, const Block*> by_id;
  for (const auto& b : proc.blocks) by_id[b.id] = &b;

  std::set<std::string> closure(side.begin(), side.end());
  std::deque<std::string> queue(side.begin(), side.end());
  std::vector<std::string> visit_order;
  while (!queue.empty()) {
    std::string v = queue.front();
    queue.pop_front();
    visit_order.push_back(v);
    for (const auto& s : by_id.at(v)->successors) {
      if (s == entry || !region.count(s) || closure.count(s)) continue;
      closure.insert(s);
      queue.push_back(s);
    }
  }

  // Edge frequency estimate: a block's weight split over its successors in
  // proportion to their weights.
  auto edge_freq = [&](const Block& p, const std::string& v) {
    Weight total = 0;
    for (const auto& s : p.successors) total += by_id.at(s)->weight;
    if (total == 0) return p.successors.empty() ? Weight(0) : p.weight / Weight(p.successors.size());
    return p.weight * by_id.at(v)->weight / total;
  };
  std::map<std::string, std::vector<const Block*>> preds;
  for (const auto& b : proc.blocks)
    for (const auto& s : b.successors) preds[s].push_back(&b);

  std::map<std::string, Weight> share;
  for (const auto& v : visit_order) {
    Weight in_total = 0, to_clone = 0;
    for (const Block* p : preds[v]) {
      Weight f = edge_freq(*p, v);
      in_total += f;
      if (!region.count(p->id)) to_clone += f;
      else if (auto it = share.find(p->id); it != share.end() && closure.count(p->id)) to_clone += f * it->second;
    }
    Weight s = in_total == 0 ? Weight(0) : to_clone / in_total;
    share[v] = std::clamp(s, Weight(0), Weight(1));
  }

  std::set<std::string> taken;
  for (const auto& b : proc.blocks) taken.insert(b.id);
  std::map<std::string, std::string> clone_id;
  for (const auto& b : proc.blocks) {
    if (!closure.count(b.id)) continue;
    for (std::size_t k = 1;; ++k) {
      std::string cand = b.id + "_" + std::to_string(k);
      if (!taken.count(cand)) {
        taken.insert(cand);
        clone_id[b.id] = cand;
        break;
      }
    }
  }

  std::vector<Block> clones;
  for (auto& b : out.procedure.blocks) {
    if (closure.count(b.id)) {
      Block c = b;
      c.id = clone_id.at(b.id);
      c.weight = b.weight * share.at(b.id);
      b.weight -= c.weight;
      for (auto& s : c.successors)
        if (closure.count(s)) s = clone_id.at(s);
      out.clones.push_back(c.id);
      out.clone_of[c.id] = b.id;
      clones.push_back(std::move(c));
    }
  }
  std::set<std::string> side_set(side.begin(), side.end());
  for (auto& b : out.procedure.blocks) {
    if (region.count(b.id)) continue;
    for (auto& s : b.successors)
      if (side_set.count(s)) s = clone_id.at(s);
  }
  for (auto& c : clones) out.procedure.blocks.push_back(std::move(c));
  return out;
}

}  // namespace regionc
