#include "regionc/regions.hpp"

#include <stdexcept>

#include "region_former.hpp"

namespace regionc {

std::string_view region_kind_name(RegionKind k) {
  switch (k) {
    case RegionKind::Local: return "local";
    case RegionKind::Entry: return "entry";
    case RegionKind::Exit: return "exit";
    case RegionKind::PassThrough: return "pass_through";
    case RegionKind::Unclassified: return "unclassified";
  }
  return "?";
}

std::size_t code_size(const Program& program, const Region& region) {
  std::size_t n = 0;
  for (const auto& ref : region.blocks) n += code_size(program.at(ref.procedure).at(ref.block));
  return n;
}

std::string select_seed(const Procedure& proc, const std::set<std::string>& worklist) {
  if (worklist.empty()) throw std::invalid_argument("seed selection from an empty worklist");
  const Block* best = nullptr;
  for (const auto& id : worklist) {
    const Block& b = proc.at(id);
    if (!best || b.weight > best->weight || (b.weight == best->weight && natural_less(b.id, best->id))) best = &b;
  }
  return best->id;
}

bool is_desirable(const Block& x, const Block& y, const Block& seed, std::size_t region_blocks,
                  const RegionParams& params, bool phased) {
  if (phased && is_call_block(y)) return false;
  return y.weight >= params.desirability_ratio * x.weight && y.weight >= params.desirability_ratio * seed.weight &&
         region_blocks < params.max_region_blocks;
}

bool GrowthBudget::admit(std::size_t n) {
  if (Weight(current + n) > Weight(original) * (1 + limit)) return false;
  current += n;
  return true;
}

PhasedRegions form_regions_phased(const Procedure& proc, const RegionParams& params, GrowthBudget* budget) {
  PhasedRegions out{proc, {}};
  detail::RegionFormer former(out.procedure, params, budget);
  std::set<std::string> pool;
  for (const auto& b : proc.blocks) pool.insert(b.id);
  int id = 0;
  for (auto& r : former.run(pool)) {
    Region region;
    region.id = id++;
    for (const auto& b : r.blocks) region.blocks.push_back(BlockRef{proc.name, b});
    region.seed = BlockRef{proc.name, r.seed};
    region.entry = BlockRef{proc.name, r.entry};
    region.kind = RegionKind::Unclassified;
    out.regions.regions.push_back(std::move(region));
  }
  return out;
}

}  // namespace regionc
