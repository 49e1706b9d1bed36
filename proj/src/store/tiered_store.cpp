#include "gridmon/store/tiered_store.hpp"

#include <algorithm>
#include <charconv>
#include <string>

namespace gridmon::store {
namespace {

constexpr std::string_view kSegmentExt = ".emsg";

// seg-<res>-<min_ts>-<run>.emsg
std::optional<std::uint64_t> parse_run(const std::filesystem::path& p) {
  const std::string name = p.filename().string();
  if (!name.starts_with("seg-") || !name.ends_with(kSegmentExt)) return std::nullopt;
  const std::string_view stem(name.data(), name.size() - kSegmentExt.size());
  const auto dash = stem.rfind('-');
  if (dash == std::string_view::npos) return std::nullopt;
  std::uint64_t run = 0;
  auto digits = stem.substr(dash + 1);
  auto [ptr, ec] = std::from_chars(digits.data(), digits.data() + digits.size(), run);
  if (ec != std::errc{} || ptr != digits.data() + digits.size()) return std::nullopt;
  return run;
}

}  // namespace

TieredStore::TieredStore(StoreOptions options) : options_(std::move(options)) { load_catalog(); }

std::filesystem::path TieredStore::segment_dir(Resolution r) const {
  return options_.data_dir / "segments" / std::string(resolution_name(r));
}

void TieredStore::load_catalog() {
  for (Resolution res : kAllResolutions) {
    const auto dir = segment_dir(res);
    std::filesystem::create_directories(dir);
    std::vector<std::pair<std::uint64_t, std::shared_ptr<const Segment>>> found;
    for (const auto& entry : std::filesystem::directory_iterator(dir)) {
      const auto& p = entry.path();
      if (p.extension() == ".tmp") {
        std::filesystem::remove(p);  // unfinished write from a crashed demotion
        continue;
      }
      auto run = parse_run(p);
      if (!run) continue;
      auto seg = Segment::open(p);
      if (seg->resolution() != res) throw StoreError(StoreErrc::kBadMagic, p.string() + " misplaced");
      found.emplace_back(*run, std::move(seg));
      next_run_ = std::max(next_run_, *run + 1);
    }
    std::sort(found.begin(), found.end(),
              [](const auto& a, const auto& b) { return a.first < b.first; });
    auto& list = catalog_[res];
    for (auto& [run, seg] : found) list.push_back(std::move(seg));
  }
}

void TieredStore::insert(const BaseRecord& r) {
  std::unique_lock lock(mu_);
  hot_.insert(r);
}

void TieredStore::insert_many(std::span<const BaseRecord> rs) {
  std::unique_lock lock(mu_);
  for (const auto& r : rs) hot_.insert(r);
}

std::vector<BaseRecord> TieredStore::query_range(std::uint32_t point_id, Resolution res,
                                                 EpochMs from, EpochMs to) const {
  if (options_.registry && !options_.registry->contains(point_id))
    throw StoreError(StoreErrc::kUnknownPoint, "point " + std::to_string(point_id));
  std::vector<BaseRecord> hot;
  if (from >= to) return hot;

  std::shared_lock lock(mu_);
  hot_.range(point_id, res, from, to, hot);

  auto cat = catalog_.find(res);
  if (cat == catalog_.end()) return hot;
  std::vector<const Segment*> overlapping;
  for (const auto& seg : cat->second)
    if (seg->min_ts() < to && seg->max_ts() >= from) overlapping.push_back(seg.get());
  if (overlapping.empty()) return hot;

  std::map<EpochMs, BaseRecord> merged;
  for (const Segment* seg : overlapping)
    for (auto& r : seg->read(point_id, from, to)) merged.insert_or_assign(r.ts_ms, r);
  for (const auto& r : hot) merged.insert_or_assign(r.ts_ms, r);

  std::vector<BaseRecord> out;
  out.reserve(merged.size());
  for (auto& [ts, r] : merged) out.push_back(r);
  return out;
}

std::optional<BaseRecord> TieredStore::get(std::uint32_t point_id, Resolution res,
                                           EpochMs ts) const {
  {
    std::shared_lock lock(mu_);
    if (const BaseRecord* r = hot_.find(point_id, res, ts)) return *r;
  }
  auto rows = query_range(point_id, res, ts, ts + 1);
  if (rows.empty()) return std::nullopt;
  return rows.front();
}

std::vector<std::filesystem::path> TieredStore::demote(EpochMs cutoff) {
  std::lock_guard maintenance(maintenance_mu_);
  std::vector<std::filesystem::path> written;

  for (Resolution res : kAllResolutions) {
    std::vector<BaseRecord> rows;
    {
      std::shared_lock lock(mu_);
      rows = hot_.older_than(res, cutoff);
    }
    if (rows.empty()) continue;

    const std::uint64_t run = next_run_++;
    const auto path = segment_dir(res) / ("seg-" + std::string(resolution_name(res)) + "-" +
                                          std::to_string(rows.front().ts_ms) + "-" +
                                          std::to_string(run) + std::string(kSegmentExt));
    Segment::write(path, res, rows, options_.durable);
    if (options_.fault_hook) options_.fault_hook("after_segment_write");
    auto seg = Segment::open(path);

    {
      // Visibility swap: the segment appears and the hot copies vanish under
      // one exclusive lock. Rows overwritten since the snapshot stay hot.
      std::unique_lock lock(mu_);
      catalog_[res].push_back(std::move(seg));
      hot_.erase_if_equal(rows);
    }
    written.push_back(path);
  }
  return written;
}

std::vector<std::filesystem::path> TieredStore::retention_purge(int keep_days, EpochMs now) {
  if (keep_days < 1) throw std::invalid_argument("keep_days must be >= 1");
  std::lock_guard maintenance(maintenance_mu_);
  const std::uint64_t keep_ms = static_cast<std::uint64_t>(keep_days) * 86'400'000ULL;
  const EpochMs cutoff = now > keep_ms ? now - keep_ms : 0;

  std::vector<std::shared_ptr<const Segment>> expired;
  {
    std::unique_lock lock(mu_);
    for (auto& [res, list] : catalog_) {
      auto split = std::stable_partition(list.begin(), list.end(),
                                         [&](const auto& s) { return s->max_ts() >= cutoff; });
      expired.insert(expired.end(), split, list.end());
      list.erase(split, list.end());
    }
  }
  std::vector<std::filesystem::path> deleted;
  for (const auto& seg : expired) {
    std::error_code ec;
    std::filesystem::remove(seg->path(), ec);
    if (ec) throw StoreError(StoreErrc::kIoError, ec.message() + " " + seg->path().string());
    deleted.push_back(seg->path());
  }
  return deleted;
}

std::size_t TieredStore::hot_record_count() const {
  std::shared_lock lock(mu_);
  return hot_.size();
}

std::size_t TieredStore::segment_count() const {
  std::shared_lock lock(mu_);
  std::size_t n = 0;
  for (const auto& [res, list] : catalog_) n += list.size();
  return n;
}

std::vector<std::filesystem::path> TieredStore::segment_paths() const {
  std::shared_lock lock(mu_);
  std::vector<std::filesystem::path> out;
  for (const auto& [res, list] : catalog_)
    for (const auto& s : list) out.push_back(s->path());
  return out;
}

}  // namespace gridmon::store
