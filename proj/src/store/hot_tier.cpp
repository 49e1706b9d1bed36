#include "gridmon/store/hot_tier.hpp"

#include <algorithm>

namespace gridmon::store {
namespace {

auto ts_less = [](const BaseRecord& r, EpochMs t) { return r.ts_ms < t; };

}  // namespace

void HotPartition::insert(const BaseRecord& r) {
  if (rows_.empty() || rows_.back().ts_ms < r.ts_ms) {
    rows_.push_back(r);
    return;
  }
  auto it = std::lower_bound(rows_.begin(), rows_.end(), r.ts_ms, ts_less);
  if (it != rows_.end() && it->ts_ms == r.ts_ms)
    *it = r;
  else
    rows_.insert(it, r);
}

void HotPartition::range(EpochMs from, EpochMs to, std::vector<BaseRecord>& out) const {
  auto lo = std::lower_bound(rows_.begin(), rows_.end(), from, ts_less);
  auto hi = std::lower_bound(lo, rows_.end(), to, ts_less);
  out.insert(out.end(), lo, hi);
}

const BaseRecord* HotPartition::find(EpochMs ts) const {
  auto it = std::lower_bound(rows_.begin(), rows_.end(), ts, ts_less);
  return it != rows_.end() && it->ts_ms == ts ? &*it : nullptr;
}

std::size_t HotPartition::erase_if_equal(std::span<const BaseRecord> sorted) {
  std::size_t j = 0;
  auto keep = rows_.begin();
  for (auto it = rows_.begin(); it != rows_.end(); ++it) {
    while (j < sorted.size() && sorted[j].ts_ms < it->ts_ms) ++j;
    if (j < sorted.size() && bitwise_equal(sorted[j], *it)) continue;
    if (keep != it) *keep = std::move(*it);
    ++keep;
  }
  const auto removed = static_cast<std::size_t>(rows_.end() - keep);
  rows_.erase(keep, rows_.end());
  return removed;
}

void HotTier::insert(const BaseRecord& r) {
  auto& part = parts_[{r.point_id, r.resolution}];
  const std::size_t before = part.size();
  part.insert(r);
  size_ += part.size() - before;
}

void HotTier::range(std::uint32_t point_id, Resolution res, EpochMs from, EpochMs to,
                    std::vector<BaseRecord>& out) const {
  auto it = parts_.find({point_id, res});
  if (it != parts_.end()) it->second.range(from, to, out);
}

const BaseRecord* HotTier::find(std::uint32_t point_id, Resolution res, EpochMs ts) const {
  auto it = parts_.find({point_id, res});
  return it == parts_.end() ? nullptr : it->second.find(ts);
}

std::vector<BaseRecord> HotTier::older_than(Resolution res, EpochMs cutoff) const {
  std::vector<BaseRecord> out;
  // Map order is (point, resolution), so per-resolution output is sorted by point.
  for (const auto& [key, part] : parts_) {
    if (key.second != res || part.empty() || part.watermark() >= cutoff) continue;
    part.range(0, cutoff, out);
  }
  return out;
}

std::size_t HotTier::erase_if_equal(const std::vector<BaseRecord>& rows) {
  std::size_t n = 0;
  std::size_t i = 0;
  while (i < rows.size()) {
    std::size_t j = i;
    while (j < rows.size() && rows[j].point_id == rows[i].point_id &&
           rows[j].resolution == rows[i].resolution)
      ++j;
    auto it = parts_.find({rows[i].point_id, rows[i].resolution});
    if (it != parts_.end()) {
      n += it->second.erase_if_equal(std::span(rows).subspan(i, j - i));
      if (it->second.empty()) parts_.erase(it);
    }
    i = j;
  }
  size_ -= n;
  return n;
}

}  // namespace gridmon::store
