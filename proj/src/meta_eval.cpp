#include "kpeval/meta_eval.hpp"

#include <algorithm>
#include <cmath>
#include <exception>
#include <numeric>
#include <random>
#include <thread>
#include <unordered_set>

#include <nlohmann/json.hpp>

#include "kpeval/dataset.hpp"
#include "kpeval/error.hpp"

namespace kpeval {
namespace {

using json = nlohmann::json;

void check_pair(std::span<const double> x, std::span<const double> y) {
  if (x.size() != y.size()) {
    throw Error(ErrorCode::kLengthMismatch, "lengths " + std::to_string(x.size()) + " and " +
                                                std::to_string(y.size()));
  }
  if (x.size() < 2) throw Error(ErrorCode::kInvalidArgument, "need at least 2 points");
}

uint64_t splitmix64(uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

// Independent stream per (seed, index).
std::mt19937_64 stream_for(uint64_t seed, uint64_t index) {
  return std::mt19937_64(splitmix64(seed ^ splitmix64(index)));
}

// Pairs (i < j) with v[i] > v[j]; sorts v ascending.
int64_t count_inversions(std::vector<double>& v) {
  std::vector<double> buf(v.size());
  int64_t swaps = 0;
  for (size_t width = 1; width < v.size(); width *= 2) {
    for (size_t lo = 0; lo < v.size(); lo += 2 * width) {
      const size_t mid = std::min(lo + width, v.size());
      const size_t hi = std::min(lo + 2 * width, v.size());
      size_t i = lo, j = mid, out = lo;
      while (i < mid && j < hi) {
        if (v[j] < v[i]) {
          swaps += static_cast<int64_t>(mid - i);
          buf[out++] = v[j++];
        } else {
          buf[out++] = v[i++];
        }
      }
      while (i < mid) buf[out++] = v[i++];
      while (j < hi) buf[out++] = v[j++];
    }
    std::swap(v, buf);
  }
  return swaps;
}

// Sum of t(t-1)/2 over runs of equal adjacent values in a sorted sequence.
template <typename Eq>
int64_t tied_pairs(size_t n, Eq equal) {
  int64_t total = 0;
  size_t run = 1;
  for (size_t i = 1; i <= n; ++i) {
    if (i < n && equal(i - 1, i)) {
      ++run;
    } else {
      total += static_cast<int64_t>(run * (run - 1) / 2);
      run = 1;
    }
  }
  return total;
}

double quantile(const std::vector<double>& sorted, double q) {
  const double pos = q * static_cast<double>(sorted.size() - 1);
  const auto lo = static_cast<size_t>(std::floor(pos));
  const size_t hi = std::min(lo + 1, sorted.size() - 1);
  const double frac = pos - static_cast<double>(lo);
  return sorted[lo] + frac * (sorted[hi] - sorted[lo]);
}

template <typename Fn>
void for_each_line_record(const std::filesystem::path& path, Fn fn) {
  const std::string content = read_file(path);
  size_t pos = 0, line_no = 0;
  while (pos < content.size()) {
    size_t end = content.find('\n', pos);
    if (end == std::string::npos) end = content.size();
    ++line_no;
    const std::string_view line = std::string_view(content).substr(pos, end - pos);
    pos = end + 1;
    if (line.find_first_not_of(" \t\r") == std::string_view::npos) continue;
    const std::string where = path.string() + ":" + std::to_string(line_no);
    json rec = json::parse(line, nullptr, false);
    if (rec.is_discarded() || !rec.is_object()) {
      throw Error(ErrorCode::kParseError, where + ": not a JSON object");
    }
    try {
      fn(rec);
    } catch (const json::exception& e) {
      throw Error(ErrorCode::kParseError, where + ": " + e.what());
    }
  }
}

}  // namespace

double pearson(std::span<const double> x, std::span<const double> y) {
  check_pair(x, y);
  auto constant = [](std::span<const double> v) {
    return std::all_of(v.begin(), v.end(), [&](double a) { return a == v.front(); });
  };
  if (constant(x) || constant(y)) throw Error(ErrorCode::kZeroVariance, "constant input");
  const double n = static_cast<double>(x.size());
  const double mx = std::accumulate(x.begin(), x.end(), 0.0) / n;
  const double my = std::accumulate(y.begin(), y.end(), 0.0) / n;
  double sxx = 0.0, syy = 0.0, sxy = 0.0;
  for (size_t i = 0; i < x.size(); ++i) {
    const double dx = x[i] - mx;
    const double dy = y[i] - my;
    sxx += dx * dx;
    syy += dy * dy;
    sxy += dx * dy;
  }
  if (sxx == 0.0 || syy == 0.0) throw Error(ErrorCode::kZeroVariance, "constant input");
  return std::clamp(sxy / std::sqrt(sxx * syy), -1.0, 1.0);
}

std::vector<double> fractional_ranks(std::span<const double> values) {
  std::vector<size_t> order(values.size());
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(),
                   [&](size_t a, size_t b) { return values[a] < values[b]; });
  std::vector<double> ranks(values.size());
  size_t i = 0;
  while (i < order.size()) {
    size_t j = i;
    while (j + 1 < order.size() && values[order[j + 1]] == values[order[i]]) ++j;
    const double avg = (static_cast<double>(i + 1) + static_cast<double>(j + 1)) / 2.0;
    for (size_t t = i; t <= j; ++t) ranks[order[t]] = avg;
    i = j + 1;
  }
  return ranks;
}

double spearman(std::span<const double> x, std::span<const double> y) {
  check_pair(x, y);
  const auto rx = fractional_ranks(x);
  const auto ry = fractional_ranks(y);
  return pearson(rx, ry);
}

double kendall_tau(std::span<const double> x, std::span<const double> y) {
  check_pair(x, y);
  const size_t n = x.size();
  std::vector<size_t> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(), [&](size_t a, size_t b) {
    return x[a] != x[b] ? x[a] < x[b] : y[a] < y[b];
  });
  const int64_t n0 = static_cast<int64_t>(n * (n - 1) / 2);
  const int64_t tx = tied_pairs(n, [&](size_t a, size_t b) { return x[order[a]] == x[order[b]]; });
  const int64_t txy = tied_pairs(n, [&](size_t a, size_t b) {
    return x[order[a]] == x[order[b]] && y[order[a]] == y[order[b]];
  });
  std::vector<double> ys(n);
  for (size_t i = 0; i < n; ++i) ys[i] = y[order[i]];
  const int64_t discordant = count_inversions(ys);
  const int64_t ty = tied_pairs(n, [&](size_t a, size_t b) { return ys[a] == ys[b]; });
  if (n0 - tx == 0 || n0 - ty == 0) throw Error(ErrorCode::kAllTied, "all values tied");
  // n0 - tx - ty + txy counts the untied pairs, C + D.
  const int64_t c_minus_d = n0 - tx - ty + txy - 2 * discordant;
  return static_cast<double>(c_minus_d) /
         std::sqrt(static_cast<double>(n0 - tx) * static_cast<double>(n0 - ty));
}

std::string_view to_string(CorrelationStat s) {
  switch (s) {
    case CorrelationStat::kPearson: return "pearson";
    case CorrelationStat::kSpearman: return "spearman";
    case CorrelationStat::kKendall: return "kendall";
  }
  return "unknown";
}

CorrelationStat parse_correlation_stat(std::string_view name) {
  if (name == "pearson") return CorrelationStat::kPearson;
  if (name == "spearman") return CorrelationStat::kSpearman;
  if (name == "kendall") return CorrelationStat::kKendall;
  throw Error(ErrorCode::kConfig, "unknown correlation statistic '" + std::string(name) + "'");
}

double correlate(CorrelationStat stat, std::span<const double> x, std::span<const double> y) {
  switch (stat) {
    case CorrelationStat::kPearson: return pearson(x, y);
    case CorrelationStat::kSpearman: return spearman(x, y);
    case CorrelationStat::kKendall: return kendall_tau(x, y);
  }
  throw Error(ErrorCode::kInvalidArgument, "unknown statistic");
}

PairedScores::PairedScores(std::vector<PairedItem> items) : items_(std::move(items)) {
  if (items_.size() < 2) {
    throw Error(ErrorCode::kInvalidArgument, "paired scores need at least 2 items, got " +
                                                 std::to_string(items_.size()));
  }
  std::unordered_set<std::string> ids;
  for (const auto& it : items_) {
    if (!ids.insert(it.input_id).second) {
      throw Error(ErrorCode::kDuplicateId, "paired scores repeat input '" + it.input_id + "'");
    }
    if (!std::isfinite(it.metric_value) || !std::isfinite(it.human_value)) {
      throw Error(ErrorCode::kNonFinite, "non-finite score for input '" + it.input_id + "'");
    }
  }
}

std::vector<double> PairedScores::metric_values() const {
  std::vector<double> out;
  for (const auto& it : items_) out.push_back(it.metric_value);
  return out;
}

std::vector<double> PairedScores::human_values() const {
  std::vector<double> out;
  for (const auto& it : items_) out.push_back(it.human_value);
  return out;
}

CorrelationResult correlate_all(const PairedScores& paired) {
  const auto m = paired.metric_values();
  const auto h = paired.human_values();
  CorrelationResult r;
  r.pearson_r = pearson(m, h);
  r.spearman_rho = spearman(m, h);
  r.kendall_tau = kendall_tau(m, h);
  r.n = paired.size();
  return r;
}

CorrelationResult bootstrap_ci(const PairedScores& paired, CorrelationStat stat,
                               const BootstrapOptions& options) {
  if (options.n_resamples < 1) throw Error(ErrorCode::kInvalidArgument, "n_resamples must be >= 1");
  if (!(options.level > 0.0 && options.level < 1.0)) {
    throw Error(ErrorCode::kInvalidArgument, "level must lie in (0, 1)");
  }
  CorrelationResult result = correlate_all(paired);
  result.stat = stat;
  result.level = options.level;
  result.n_resamples = options.n_resamples;

  const auto m = paired.metric_values();
  const auto h = paired.human_values();
  const size_t n = m.size();
  std::vector<std::optional<double>> stats(options.n_resamples);

  auto run_range = [&](size_t begin, size_t end) {
    std::vector<double> xs(n), ys(n);
    for (size_t r = begin; r < end; ++r) {
      auto rng = stream_for(options.seed, r);
      std::uniform_int_distribution<size_t> pick(0, n - 1);
      for (size_t i = 0; i < n; ++i) {
        const size_t s = pick(rng);
        xs[i] = m[s];
        ys[i] = h[s];
      }
      try {
        stats[r] = correlate(stat, xs, ys);
      } catch (const Error& e) {
        if (e.code() != ErrorCode::kZeroVariance && e.code() != ErrorCode::kAllTied) throw;
      }
    }
  };

  const size_t threads = std::clamp<size_t>(options.threads, 1, options.n_resamples);
  if (threads == 1) {
    run_range(0, options.n_resamples);
  } else {
    std::vector<std::thread> pool;
    std::vector<std::exception_ptr> errors(threads);
    const size_t chunk = (options.n_resamples + threads - 1) / threads;
    for (size_t t = 0; t < threads; ++t) {
      const size_t begin = t * chunk;
      const size_t end = std::min(options.n_resamples, begin + chunk);
      pool.emplace_back([&, t, begin, end] {
        try {
          run_range(begin, end);
        } catch (...) {
          errors[t] = std::current_exception();
        }
      });
    }
    for (auto& th : pool) th.join();
    for (auto& e : errors) {
      if (e) std::rethrow_exception(e);
    }
  }

  std::vector<double> valid;
  for (const auto& s : stats) {
    if (s) valid.push_back(*s);
  }
  result.n_degenerate = options.n_resamples - valid.size();
  if (2 * result.n_degenerate > options.n_resamples) {
    throw Error(ErrorCode::kTooFewValid, std::to_string(result.n_degenerate) + " of " +
                                             std::to_string(options.n_resamples) +
                                             " resamples were degenerate");
  }
  std::sort(valid.begin(), valid.end());
  const double tail = (1.0 - options.level) / 2.0;
  result.ci_low = quantile(valid, tail);
  result.ci_high = quantile(valid, 1.0 - tail);
  return result;
}

double alignment(std::span<const std::pair<std::string, std::string>> pairs,
                 EmbeddingProvider& provider) {
  if (pairs.empty()) throw Error(ErrorCode::kEmptySet, "no name-variation pairs");
  double sum = 0.0;
  for (const auto& [a, b] : pairs) sum += cos_sim(provider.embed_one(a), provider.embed_one(b));
  return sum / static_cast<double>(pairs.size());
}

double uniformity(std::span<const std::string> phrases, EmbeddingProvider& provider,
                  size_t n_pairs, uint64_t seed) {
  std::vector<std::string> distinct;
  std::unordered_set<std::string> seen;
  for (const auto& p : phrases) {
    if (seen.insert(p).second) distinct.push_back(p);
  }
  if (distinct.size() < 2) {
    throw Error(ErrorCode::kTooFewPhrases, "uniformity needs at least 2 distinct phrases");
  }
  if (n_pairs == 0) throw Error(ErrorCode::kInvalidArgument, "n_pairs must be >= 1");
  const auto vecs = provider.embed(distinct);
  auto rng = stream_for(seed, 0);
  std::uniform_int_distribution<size_t> first(0, vecs.size() - 1);
  std::uniform_int_distribution<size_t> second(0, vecs.size() - 2);
  double sum = 0.0;
  for (size_t t = 0; t < n_pairs; ++t) {
    const size_t i = first(rng);
    size_t j = second(rng);
    if (j >= i) ++j;
    sum += cos_sim(vecs[i], vecs[j]);
  }
  return sum / static_cast<double>(n_pairs);
}

std::vector<HumanJudgment> load_human_judgments(const std::filesystem::path& path) {
  std::vector<HumanJudgment> out;
  for_each_line_record(path, [&](const json& rec) {
    out.push_back({rec.at("input_id").get<std::string>(), rec.at("system_id").get<std::string>(),
                   rec.at("dimension").get<std::string>(), rec.at("value").get<double>()});
  });
  return out;
}

std::vector<std::pair<std::string, std::string>> load_variation_pairs(
    const std::filesystem::path& path) {
  std::vector<std::pair<std::string, std::string>> out;
  for_each_line_record(path, [&](const json& rec) {
    out.emplace_back(rec.at("phrase").get<std::string>(), rec.at("variant").get<std::string>());
  });
  return out;
}

PairedScores pair_scores(const std::map<std::string, double>& metric_values,
                         std::span<const HumanJudgment> judgments, std::string_view dimension,
                         const std::set<std::string>& known_ids,
                         std::optional<std::string_view> system_id) {
  std::set<std::string> orphans;
  std::map<std::string, std::pair<double, size_t>> human;  // id -> (sum, count)
  for (const auto& j : judgments) {
    if (!known_ids.contains(j.input_id)) {
      orphans.insert(j.input_id);
      continue;
    }
    if (j.dimension != dimension) continue;
    if (system_id && j.system_id != *system_id) continue;
    auto& [sum, count] = human[j.input_id];
    sum += j.value;
    ++count;
  }
  if (!orphans.empty()) {
    std::string list;
    for (const auto& o : orphans) list += (list.empty() ? "" : ", ") + o;
    throw Error(ErrorCode::kUnmatchedIds, "judgments for unknown inputs: " + list);
  }
  std::vector<PairedItem> items;
  for (const auto& [id, acc] : human) {
    auto it = metric_values.find(id);
    if (it == metric_values.end()) continue;
    items.push_back({id, it->second, acc.first / static_cast<double>(acc.second)});
  }
  return PairedScores(std::move(items));
}

}  // namespace kpeval
