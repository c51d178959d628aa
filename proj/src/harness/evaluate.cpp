#include "recoding/harness/evaluate.hpp"

#include <algorithm>
#include <cstdio>
#include <fstream>
#include <set>
#include <sstream>

#include "recoding/error.hpp"
#include "recoding/harness/svg.hpp"
#include "recoding/metrics/creativity.hpp"
#include "recoding/metrics/diversity.hpp"
#include "recoding/providers/judge.hpp"
#include "recoding/providers/mock.hpp"
#include "recoding/util/hash.hpp"
#include "recoding/util/text.hpp"

namespace recoding::harness {
namespace {

using nlohmann::json;
using providers::Embedding;

constexpr std::size_t kEmbedBatch = 64;

std::string fmt(double v) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.6f", v);
  return buf;
}

struct Cell {
  std::string prompt_id;
  std::string method;
  std::vector<const RunRecord*> runs;  // by run index; null when missing or failed
};

class CsvFile {
 public:
  CsvFile(const std::filesystem::path& path, const std::string& header) : out_(path) {
    if (!out_) throw Error(ErrorCode::kIoError, "cannot write " + path.string());
    out_ << header << '\n';
  }
  template <typename... Ts>
  void row(const Ts&... fields) {
    std::size_t i = 0;
    ((out_ << (i++ ? "," : "") << fields), ...);
    out_ << '\n';
  }

 private:
  std::ofstream out_;
};

void write_file(const std::filesystem::path& path, const std::string& content) {
  std::ofstream out(path);
  if (!out) throw Error(ErrorCode::kIoError, "cannot write " + path.string());
  out << content;
}

// Offline judge: relevance is granted to any non-empty passage, diversity is
// read off the cosine of the passages' embeddings.
std::string offline_verdict(providers::JudgeScale scale, double cosine, bool empty) {
  if (scale == providers::JudgeScale::kRelevance) return empty ? "Irrelevant" : "Relevant";
  if (cosine >= 0.9) return "Almost Identical";
  if (cosine >= 0.5) return "Partially Similar";
  return "Mostly Different";
}

std::vector<std::size_t> sample_indices(std::size_t n, std::size_t k, vocab::SeededSampler& s) {
  std::vector<std::size_t> idx(n);
  for (std::size_t i = 0; i < n; ++i) idx[i] = i;
  k = std::min(k, n);
  for (std::size_t i = 0; i < k; ++i) {
    const auto j = i + static_cast<std::size_t>(s.next_below(n - i));
    std::swap(idx[i], idx[j]);
  }
  idx.resize(k);
  return idx;
}

}  // namespace

EmbeddingCache::EmbeddingCache(std::filesystem::path path, std::string model_label)
    : path_(std::move(path)), label_(std::move(model_label)) {
  std::ifstream in(path_);
  std::string line;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    try {
      auto j = json::parse(line);
      if (j.value("model", "") != label_) continue;
      cache_[j.at("digest").get<std::string>()] = j.at("embedding").get<Embedding>();
    } catch (const json::exception&) {
      // A torn line is re-embedded on demand.
    }
  }
}

std::vector<Embedding> EmbeddingCache::embed(const std::vector<std::string>& texts,
                                             providers::EmbeddingModel& model) {
  std::vector<std::string> digests;
  std::vector<std::string> missing;
  std::set<std::string> queued;
  for (const auto& t : texts) {
    digests.push_back(hash::sha256_hex(t));
    if (!cache_.count(digests.back()) && queued.insert(digests.back()).second) missing.push_back(t);
  }
  if (!missing.empty()) {
    std::ofstream out(path_, std::ios::app);
    for (std::size_t start = 0; start < missing.size(); start += kEmbedBatch) {
      const auto end = std::min(missing.size(), start + kEmbedBatch);
      std::vector<std::string> batch(missing.begin() + static_cast<std::ptrdiff_t>(start),
                                     missing.begin() + static_cast<std::ptrdiff_t>(end));
      const auto vectors = model.embed(batch);
      for (std::size_t i = 0; i < batch.size(); ++i) {
        const auto digest = hash::sha256_hex(batch[i]);
        cache_[digest] = vectors[i];
        out << json{{"model", label_}, {"digest", digest}, {"embedding", vectors[i]}}.dump() << '\n';
      }
    }
  }
  std::vector<Embedding> result;
  result.reserve(texts.size());
  for (const auto& d : digests) result.push_back(cache_.at(d));
  return result;
}

std::string idea_key(std::string_view idea) { return text::join(text::word_tokens(idea), " "); }

json evaluate(const std::filesystem::path& dir) {
  const auto config_path = dir / "config.json";
  if (!std::filesystem::exists(dir / kRunLogName)) {
    throw Error(ErrorCode::kIoError, "run log not found: " + (dir / kRunLogName).string());
  }
  auto cfg = load_config(config_path);
  cfg.output_dir = dir;
  return evaluate(dir, cfg, make_providers(cfg));
}

json evaluate(const std::filesystem::path& dir, const ExperimentConfig& cfg,
              const Providers& providers) {
  const auto records = latest_records(read_log(dir / kRunLogName));
  const double tau = cfg.threshold();

  // Cells in config order; runs by index.
  std::vector<Cell> cells;
  for (const auto& p : cfg.prompts) {
    for (const auto& m : cfg.methods) {
      Cell c{p.id, m, std::vector<const RunRecord*>(static_cast<std::size_t>(cfg.runs), nullptr)};
      for (int r = 0; r < cfg.runs; ++r) {
        auto it = records.find({p.id, m, r});
        if (it != records.end() && it->second.status != RunStatus::kFailed) {
          c.runs[static_cast<std::size_t>(r)] = &it->second;
        }
      }
      cells.push_back(std::move(c));
    }
  }

  // Embed every idea and run output once.
  std::vector<std::string> texts;
  for (const auto& c : cells) {
    for (const auto* r : c.runs) {
      if (!r) continue;
      texts.insert(texts.end(), r->ideas.begin(), r->ideas.end());
      if (!r->output.empty()) texts.push_back(r->output);
    }
  }
  if (!providers.embedder) throw Error(ErrorCode::kConfigError, "no embedding provider configured");
  const auto label = std::string(to_string(cfg.providers.backend)) + ":" +
                     (cfg.providers.backend == Backend::kMock
                          ? std::to_string(cfg.providers.embedding_dimension) + ":" +
                                std::to_string(cfg.seed)
                          : cfg.providers.embedding_model);
  EmbeddingCache cache(dir / kEmbeddingCacheName, label);
  std::map<std::string, Embedding> vectors;
  if (!texts.empty()) {
    const auto embedded = cache.embed(texts, *providers.embedder);
    for (std::size_t i = 0; i < texts.size(); ++i) vectors.emplace(texts[i], embedded[i]);
  }

  const metrics::CoverageParams cov_params{cfg.metrics.coverage_percentile,
                                           cfg.metrics.bootstrap_iterations, cfg.seed};
  const metrics::ClusterParams greedy{metrics::ClusterMethod::kEmbeddingCosine, tau, 0, {}};

  struct CellResult {
    std::vector<metrics::GrowthCurve> curves;
    metrics::ClusterSet clusters;
    std::vector<std::size_t> first_run;  // per cluster
    std::size_t ideas = 0;
    std::size_t unique = 0;
    std::size_t runs = 0;
    std::optional<metrics::JudgeAggregate> judge;
  };
  std::vector<CellResult> results(cells.size());

  parallel_for(cells.size(), cfg.concurrency, [&](std::size_t ci) {
    const auto& c = cells[ci];
    auto& res = results[ci];
    std::vector<std::vector<metrics::Item>> batches;
    std::vector<Embedding> flat;
    std::vector<std::size_t> run_of;
    std::set<std::string> unique;
    for (std::size_t r = 0; r < c.runs.size(); ++r) {
      std::vector<metrics::Item> batch;
      if (c.runs[r]) {
        ++res.runs;
        for (const auto& idea : c.runs[r]->ideas) {
          batch.push_back({idea, vectors.at(idea)});
          flat.push_back(vectors.at(idea));
          run_of.push_back(r);
          unique.insert(idea_key(idea));
        }
      }
      batches.push_back(std::move(batch));
    }
    res.ideas = flat.size();
    res.unique = unique.size();
    for (auto method : cfg.metrics.clustering) {
      res.curves.push_back(metrics::growth_curve(
          batches, metrics::ClusterParams{method, tau, 0, cfg.metrics.plugin}));
    }
    res.clusters = metrics::cluster_greedy_cosine(flat, tau);
    for (const auto& cl : res.clusters.clusters) res.first_run.push_back(run_of[cl.members.front()]);

    if (!cfg.judge.enabled) return;
    std::vector<const RunRecord*> done;
    for (const auto* r : c.runs) {
      if (r && !r->output.empty()) done.push_back(r);
    }
    const PromptSpec* prompt = nullptr;
    for (const auto& p : cfg.prompts) {
      if (p.id == c.prompt_id) prompt = &p;
    }
    vocab::SeededSampler sampler(cfg.seed, "judge/" + c.prompt_id + "/" + c.method);
    std::vector<providers::Verdict> verdicts;
    auto ask = [&](const providers::JudgeTemplate& tmpl, const providers::Slots& slots,
                   double cosine, bool empty) {
      auto label_sampler = sampler.fork(std::to_string(verdicts.size()));
      if (providers.judge) {
        verdicts.push_back(providers::judge(tmpl, slots, *providers.judge, label_sampler).verdict);
      } else {
        auto offline = providers::ScriptedChatModel::fixed(offline_verdict(tmpl.scale, cosine, empty));
        verdicts.push_back(providers::judge(tmpl, slots, offline, label_sampler).verdict);
      }
    };
    for (auto i : sample_indices(done.size(), cfg.judge.relevance_samples, sampler)) {
      ask(providers::relevance_template(),
          {{"user prompt", prompt->full_text()}, {"response", done[i]->output}}, 0.0,
          text::trim(done[i]->output).empty());
    }
    std::vector<std::pair<std::size_t, std::size_t>> pairs;
    for (std::size_t a = 0; a < done.size(); ++a) {
      for (std::size_t b = a + 1; b < done.size(); ++b) pairs.emplace_back(a, b);
    }
    for (auto i : sample_indices(pairs.size(), cfg.judge.diversity_pairs, sampler)) {
      const auto& a = done[pairs[i].first]->output;
      const auto& b = done[pairs[i].second]->output;
      ask(providers::diversity_template(),
          {{"user prompt", prompt->full_text()}, {"response0", a}, {"response1", b}},
          metrics::dot(vectors.at(a), vectors.at(b)), false);
    }
    res.judge = metrics::aggregate_judgments(verdicts);
  });

  json report = {{"schema_version", kSchemaVersion},
                 {"threshold", tau},
                 {"profile", std::string(to_string(cfg.profile))},
                 {"seed", cfg.seed}};

  CsvFile growth(dir / "growth.csv", "prompt_id,method,clustering,run_index,clusters");
  CsvFile ideas(dir / "ideas.csv", "prompt_id,method,runs,ideas,unique_ideas,clusters");
  CsvFile novelty(dir / "novelty.csv", "prompt_id,method,cluster,first_run,distance");
  json cell_json = json::array();
  for (std::size_t ci = 0; ci < cells.size(); ++ci) {
    const auto& c = cells[ci];
    const auto& res = results[ci];
    json curves = json::object();
    for (const auto& curve : res.curves) {
      json pts = json::array();
      for (const auto& p : curve.points) {
        growth.row(c.prompt_id, c.method, curve.label, p.run_index, p.clusters);
        pts.push_back(p.clusters);
      }
      curves[curve.label] = pts;
    }
    ideas.row(c.prompt_id, c.method, res.runs, res.ideas, res.unique, res.clusters.size());
    const auto distances = metrics::nearest_prior_distance(res.clusters.centroids());
    double sum = 0.0;
    for (std::size_t k = 0; k < distances.size(); ++k) {
      novelty.row(c.prompt_id, c.method, k + 1, res.first_run[k + 1] + 1, fmt(distances[k]));
      sum += distances[k];
    }
    json cj = {{"prompt_id", c.prompt_id},
               {"method", c.method},
               {"runs", res.runs},
               {"ideas", res.ideas},
               {"unique_ideas", res.unique},
               {"clusters", res.clusters.size()},
               {"growth", curves}};
    cj["mean_nearest_prior_distance"] =
        distances.empty() ? json(nullptr) : json(sum / static_cast<double>(distances.size()));
    if (res.judge) {
      cj["judge"] = {{"relevance", res.judge->relevance ? json(*res.judge->relevance) : json(nullptr)},
                     {"relevance_samples", res.judge->relevance_samples},
                     {"diversity", res.judge->diversity ? json(*res.judge->diversity) : json(nullptr)},
                     {"diversity_samples", res.judge->diversity_samples}};
    }
    cell_json.push_back(cj);
  }
  report["cells"] = cell_json;

  CsvFile coverage(dir / "coverage.csv", "prompt_id,from,to,point,mean,p25,p75,threshold,degenerate");
  json cov_json = json::array();
  const std::size_t nm = cfg.methods.size();
  for (std::size_t pi = 0; pi < cfg.prompts.size(); ++pi) {
    std::vector<svg::Bar> bars;
    for (std::size_t a = 0; a < nm; ++a) {
      for (std::size_t b = 0; b < nm; ++b) {
        const auto& from = results[pi * nm + a].clusters;
        const auto& to = results[pi * nm + b].clusters;
        if (from.size() == 0 || to.size() == 0) continue;
        auto rep = metrics::coverage(from, to, cov_params, cfg.methods[a], cfg.methods[b]);
        coverage.row(cfg.prompts[pi].id, rep.from, rep.to, fmt(rep.point), fmt(rep.mean),
                     fmt(rep.p25), fmt(rep.p75), fmt(rep.threshold),
                     rep.degenerate_reference ? 1 : 0);
        cov_json.push_back({{"prompt_id", cfg.prompts[pi].id},
                            {"from", rep.from},
                            {"to", rep.to},
                            {"point", rep.point},
                            {"mean", rep.mean},
                            {"p25", rep.p25},
                            {"p75", rep.p75},
                            {"threshold", rep.threshold},
                            {"degenerate_reference", rep.degenerate_reference}});
        if (a != b) bars.push_back({rep.from + ">" + rep.to, rep.mean, rep.p25, rep.p75});
      }
    }
    std::vector<svg::Series> series;
    for (std::size_t m = 0; m < nm; ++m) {
      const auto& res = results[pi * nm + m];
      if (res.curves.empty()) continue;
      svg::Series s{cfg.methods[m], {}};
      for (const auto& p : res.curves.front().points) {
        s.points.emplace_back(static_cast<double>(p.run_index), static_cast<double>(p.clusters));
      }
      series.push_back(std::move(s));
    }
    const auto& id = cfg.prompts[pi].id;
    write_file(dir / ("growth_" + id + ".svg"),
               svg::line_chart("Cumulative clusters: " + id, "run", "clusters", series));
    write_file(dir / ("coverage_" + id + ".svg"),
               svg::bar_chart("Centroid coverage: " + id, "% covered", bars, 100.0));
  }
  report["coverage"] = cov_json;

  // Distinct-count over the first m run outputs of each prompt.
  CsvFile distinct(dir / "distinct.csv", "method,prompts,m,fraction");
  json distinct_json = json::array();
  const auto m = cfg.metrics.distinct_m;
  for (std::size_t mi = 0; mi < nm; ++mi) {
    std::vector<std::vector<Embedding>> sets;
    for (std::size_t pi = 0; pi < cfg.prompts.size(); ++pi) {
      const auto& c = cells[pi * nm + mi];
      std::vector<Embedding> set;
      for (const auto* r : c.runs) {
        if (set.size() == m) break;
        if (r && !r->output.empty()) set.push_back(vectors.at(r->output));
      }
      if (set.size() == m) sets.push_back(std::move(set));
    }
    if (sets.empty()) continue;
    const double frac = metrics::distinct_count(sets, m, tau);
    distinct.row(cfg.methods[mi], sets.size(), m, fmt(frac));
    distinct_json.push_back(
        {{"method", cfg.methods[mi]}, {"prompts", sets.size()}, {"m", m}, {"fraction", frac}});
  }
  report["distinct"] = distinct_json;

  if (cfg.judge.enabled) {
    CsvFile judge(dir / "judge.csv",
                  "prompt_id,method,relevance,relevance_n,diversity,diversity_n");
    for (std::size_t ci = 0; ci < cells.size(); ++ci) {
      const auto& j = results[ci].judge;
      if (!j) continue;
      judge.row(cells[ci].prompt_id, cells[ci].method, j->relevance ? fmt(*j->relevance) : "",
                j->relevance_samples, j->diversity ? fmt(*j->diversity) : "", j->diversity_samples);
    }
  }

  write_file(dir / "report.json", report.dump(2) + "\n");
  return report;
}

std::string render_report(const json& report) {
  std::ostringstream os;
  os << "threshold " << report.value("threshold", 0.0) << ", profile "
     << report.value("profile", std::string("?")) << "\n\n";
  char line[256];
  std::snprintf(line, sizeof(line), "%-16s %-8s %6s %6s %8s %9s %10s\n", "prompt", "method", "runs",
                "ideas", "unique", "clusters", "novelty");
  os << line;
  for (const auto& c : report.at("cells")) {
    const auto& nov = c.at("mean_nearest_prior_distance");
    std::snprintf(line, sizeof(line), "%-16s %-8s %6d %6d %8d %9d %10s\n",
                  c.at("prompt_id").get<std::string>().c_str(),
                  c.at("method").get<std::string>().c_str(), c.at("runs").get<int>(),
                  c.at("ideas").get<int>(), c.at("unique_ideas").get<int>(),
                  c.at("clusters").get<int>(),
                  nov.is_null() ? "-" : fmt(nov.get<double>()).c_str());
    os << line;
  }
  if (!report.at("coverage").empty()) {
    os << "\ncoverage (mean % of from-centroids covered, IQR)\n";
    for (const auto& c : report.at("coverage")) {
      if (c.at("from") == c.at("to")) continue;
      std::snprintf(line, sizeof(line), "%-16s %8s -> %-8s %7.2f [%6.2f, %6.2f]\n",
                    c.at("prompt_id").get<std::string>().c_str(),
                    c.at("from").get<std::string>().c_str(), c.at("to").get<std::string>().c_str(),
                    c.at("mean").get<double>(), c.at("p25").get<double>(),
                    c.at("p75").get<double>());
      os << line;
    }
  }
  if (!report.at("distinct").empty()) {
    os << "\ndistinct-count\n";
    for (const auto& d : report.at("distinct")) {
      std::snprintf(line, sizeof(line), "%-8s %6.3f over %d prompts\n",
                    d.at("method").get<std::string>().c_str(), d.at("fraction").get<double>(),
                    d.at("prompts").get<int>());
      os << line;
    }
  }
  bool judge_header = false;
  for (const auto& c : report.at("cells")) {
    if (!c.contains("judge")) continue;
    if (!judge_header) {
      os << "\njudge (relevance, diversity)\n";
      judge_header = true;
    }
    const auto& j = c.at("judge");
    std::snprintf(line, sizeof(line), "%-16s %-8s %8s %8s\n",
                  c.at("prompt_id").get<std::string>().c_str(),
                  c.at("method").get<std::string>().c_str(),
                  j.at("relevance").is_null() ? "-" : fmt(j.at("relevance").get<double>()).c_str(),
                  j.at("diversity").is_null() ? "-" : fmt(j.at("diversity").get<double>()).c_str());
    os << line;
  }
  return os.str();
}

}  // namespace recoding::harness
