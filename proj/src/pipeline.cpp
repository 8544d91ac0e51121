#include "textnet/pipeline.hpp"

#include <fmt/format.h>
#include <nlohmann/json.hpp>

#include <algorithm>
#include <cctype>
#include <cmath>
#include <cstdio>
#include <functional>
#include <map>
#include <memory>
#include <set>

#include "textnet/error.hpp"
#include "textnet/io.hpp"
#include "textnet/networks.hpp"

namespace textnet {

namespace fs = std::filesystem;
using nlohmann::json;
using nlohmann::ordered_json;

void RunConfig::validate() const {
  match_params().validate();
  if (corpus_path.empty()) throw ConfigError("no corpus path given");
  if (!(resolution > 0.0)) throw ConfigError("resolution must be positive");
  if (!(min_weight >= 0.0)) throw ConfigError("min_weight must be >= 0");
  if (threads == 0) throw ConfigError("threads must be positive");
  if (http_timeout_ms <= 0) throw ConfigError("http timeout must be positive");
  grid.validate();
  BiasScale{bias_levels};
  (void)parse_metric(metric_name(metric));
}

StageError::StageError(std::string stage, const std::string& message, int exit_code)
    : std::runtime_error("stage '" + stage + "': " + message), stage_(std::move(stage)), exit_code_(exit_code) {}

std::string event_dir_name(const std::string& event_id) {
  std::string out;
  for (unsigned char c : event_id) out += (std::isalnum(c) || c == '-' || c == '_' || c == '.') ? static_cast<char>(c) : '_';
  if (out.empty() || out == "." || out == "..") out = "_" + out;
  return out;
}

namespace {

template <typename F>
auto run_stage(const std::string& name, F&& body) -> decltype(body()) {
  try {
    return body();
  } catch (const StageError&) {
    throw;
  } catch (const ConfigError& e) {
    throw StageError(name, e.what(), 1);
  } catch (const ProviderError& e) {
    throw StageError(name, e.what(), 3);
  } catch (const std::exception& e) {
    throw StageError(name, e.what(), 2);
  }
}

class RunLock {
 public:
  explicit RunLock(const fs::path& dir) : path_(dir / ".lock") {
    fs::create_directories(dir);
    std::FILE* f = std::fopen(path_.c_str(), "wx");
    if (f == nullptr) throw DataError("run directory " + dir.string() + " is locked by another invocation");
    std::fclose(f);
  }
  ~RunLock() {
    std::error_code ec;
    fs::remove(path_, ec);
  }
  RunLock(const RunLock&) = delete;
  RunLock& operator=(const RunLock&) = delete;

 private:
  fs::path path_;
};

// Files produced by one invocation, staged under <run>/partial.
class Staging {
 public:
  explicit Staging(fs::path run_dir) : run_(std::move(run_dir)), partial_(run_ / "partial") {
    std::error_code ec;
    fs::remove_all(partial_, ec);
  }

  void put(const std::string& rel, const std::string& contents) {
    io::write_file(partial_ / rel, contents);
    files_.insert(rel);
  }

  // Moves staged files into the run directory; unchanged files keep their bytes and mtime.
  std::vector<std::string> promote() {
    std::vector<std::string> written;
    for (const auto& rel : files_) {
      if (io::write_if_changed(run_ / rel, io::read_file(partial_ / rel))) written.push_back(rel);
    }
    std::error_code ec;
    fs::remove_all(partial_, ec);
    return written;
  }

  const std::set<std::string>& files() const { return files_; }
  const fs::path& run_dir() const { return run_; }

 private:
  fs::path run_;
  fs::path partial_;
  std::set<std::string> files_;
};

struct LoadedEvent {
  EventGroup group;
  std::vector<std::vector<SentenceRecord>> segments;  // per article
};

std::vector<LoadedEvent> load_and_segment(const RunConfig& cfg, const BiasScale& scale) {
  auto groups = run_stage("corpus", [&] { return load_corpus(cfg.corpus_path, scale); });
  return run_stage("segment", [&] {
    const auto rules = SegmentationRules::from_files(cfg.junk_path, cfg.abbreviations_path);
    std::vector<LoadedEvent> out;
    for (auto& g : groups) {
      LoadedEvent ev{std::move(g), {}};
      for (const auto& a : ev.group.articles) ev.segments.push_back(clean_and_segment(a, rules));
      out.push_back(std::move(ev));
    }
    return out;
  });
}

std::string segments_jsonl(const LoadedEvent& ev) {
  std::string out;
  for (const auto& per_article : ev.segments) {
    for (const auto& s : per_article) {
      out += ordered_json{{"article_id", s.article_id}, {"index", s.index}, {"text", s.text}}.dump() + "\n";
    }
  }
  return out;
}

struct ScoredBundle {
  std::vector<ScoredEvent> events;
  std::vector<std::string> cache_texts;  // serialized sentences.jsonl per event
  std::string provider_name;
};

std::string cache_key(const std::string& provider_name, const std::string& lexicon_digest,
                      const std::vector<SentenceRecord>& records) {
  std::string material = provider_name + "\n" + lexicon_digest + "\n";
  for (const auto& r : records) material += r.article_id + "\t" + std::to_string(r.index) + "\t" + r.text + "\n";
  return io::sha256_hex(material);
}

std::optional<std::string> read_if_exists(const fs::path& p) {
  if (!fs::exists(p)) return std::nullopt;
  return io::read_file(p);
}

ScoredBundle score_events(const RunConfig& cfg, std::vector<LoadedEvent>& loaded) {
  const auto lexicon = run_stage("sentiment", [&] {
    auto lex = Lexicon::load(cfg.lexicon_path);
    if (lex.empty()) throw ConfigError("lexicon " + cfg.lexicon_path.string() + " is empty");
    return lex;
  });
  const std::string lexicon_digest = run_stage("sentiment", [&] { return io::file_sha256(cfg.lexicon_path); });
  auto provider = run_stage("embed", [&] {
    return make_provider(cfg.provider, std::chrono::milliseconds(cfg.http_timeout_ms));
  });

  ScoredBundle bundle;
  bundle.provider_name = provider->name();
  for (auto& ev : loaded) {
    std::vector<SentenceRecord> records;
    for (const auto& per_article : ev.segments) records.insert(records.end(), per_article.begin(), per_article.end());
    const std::string key = cache_key(bundle.provider_name, lexicon_digest, records);
    const std::string rel = event_dir_name(ev.group.event_id) + "/sentences.jsonl";

    std::optional<std::vector<ScoredSentence>> scored;
    for (const auto& candidate : {cfg.output_dir / rel, cfg.output_dir / "partial" / rel}) {
      if (auto text = read_if_exists(candidate)) {
        scored = deserialize_scored(*text, key);
        if (scored) break;
      }
    }
    if (!scored) {
      std::vector<ScoredSentence> fresh;
      run_stage("sentiment", [&] {
        for (const auto& r : records) fresh.push_back({r, {}, sentiment(r.text, lexicon)});
      });
      run_stage("embed", [&] {
        std::vector<std::string> texts;
        for (const auto& r : records) texts.push_back(r.text);
        auto vectors = texts.empty() ? std::vector<Embedding>{} : provider->embed_batch(texts);
        if (vectors.size() != texts.size()) throw ProviderError("provider returned the wrong number of vectors");
        for (std::size_t i = 0; i < vectors.size(); ++i) {
          for (double x : vectors[i]) {
            if (!std::isfinite(x)) throw ProviderError("provider returned a non-finite vector component");
          }
          fresh[i].embedding = std::move(vectors[i]);
        }
      });
      scored = std::move(fresh);
    }
    bundle.cache_texts.push_back(serialize_scored(key, *scored));
    bundle.events.push_back(run_stage("match", [&] {
      return ScoredEvent(ev.group.event_id, ev.group.articles, std::move(*scored), cfg.threads);
    }));
  }
  return bundle;
}

std::string config_fingerprint(const RunConfig& cfg) {
  ordered_json j;
  j["corpus_sha256"] = io::file_sha256(cfg.corpus_path);
  j["lexicon_sha256"] = io::file_sha256(cfg.lexicon_path);
  j["junk_sha256"] = io::file_sha256(cfg.junk_path);
  j["abbreviations_sha256"] = io::file_sha256(cfg.abbreviations_path);
  j["provider"] = cfg.provider;
  j["bias_levels"] = cfg.bias_levels;
  j["tau1"] = cfg.tau1;
  j["tau2"] = cfg.tau2;
  j["metric"] = metric_name(cfg.metric);
  j["resolution"] = cfg.resolution;
  j["seed"] = cfg.seed;
  j["min_weight"] = cfg.min_weight;
  j["normalize_display"] = cfg.normalize_display;
  return j.dump();
}

std::string self_similarity_csv(const DomainNetwork& d) {
  std::string out = "domain,self_similarity\n";
  for (std::size_t i = 0; i < d.network.size(); ++i) {
    out += io::csv_field(d.network.node(i).id) + "," + io::fixed6(d.self_similarity[i]) + "\n";
  }
  return out;
}

void stage_network(Staging& st, const std::string& dir, const std::string& stem, const WeightedNetwork& n) {
  st.put(dir + "/" + stem + ".graphml", to_graphml(n));
  st.put(dir + "/" + stem + ".csv", to_edge_csv(n));
  st.put(dir + "/" + stem + "_nodes.csv", to_node_csv(n));
}

}  // namespace

std::string serialize_scored(const std::string& key, const std::vector<ScoredSentence>& sentences) {
  std::string out = ordered_json{{"cache_key", key}, {"count", sentences.size()}}.dump() + "\n";
  for (const auto& s : sentences) {
    out += ordered_json{{"article_id", s.record.article_id},
                        {"index", s.record.index},
                        {"text", s.record.text},
                        {"sentiment", s.sentiment},
                        {"embedding", s.embedding}}
               .dump() +
           "\n";
  }
  return out;
}

std::optional<std::vector<ScoredSentence>> deserialize_scored(const std::string& text, const std::string& key) {
  std::vector<ScoredSentence> out;
  std::size_t pos = 0;
  bool header = true;
  std::size_t expected = 0;
  try {
    while (pos < text.size()) {
      auto nl = text.find('\n', pos);
      if (nl == std::string::npos) nl = text.size();
      const std::string line = text.substr(pos, nl - pos);
      pos = nl + 1;
      if (io::trim(line).empty()) continue;
      auto j = json::parse(line);
      if (header) {
        if (j.at("cache_key").get<std::string>() != key) return std::nullopt;
        expected = j.at("count").get<std::size_t>();
        header = false;
        continue;
      }
      out.push_back(ScoredSentence{
          SentenceRecord{j.at("article_id").get<std::string>(), j.at("index").get<std::size_t>(),
                         j.at("text").get<std::string>()},
          j.at("embedding").get<Embedding>(), j.at("sentiment").get<double>()});
    }
  } catch (const json::exception&) {
    return std::nullopt;
  }
  if (header || out.size() != expected) return std::nullopt;
  return out;
}

std::vector<ScoredEvent> load_scored_events(const RunConfig& cfg) {
  run_stage("config", [&] { cfg.validate(); });
  const BiasScale scale(cfg.bias_levels);
  auto loaded = load_and_segment(cfg, scale);
  return score_events(cfg, loaded).events;
}

PipelineResult run_pipeline(const RunConfig& cfg, Stage last) {
  run_stage("config", [&] { cfg.validate(); });
  const BiasScale scale(cfg.bias_levels);
  auto lock = run_stage("config", [&] { return std::make_unique<RunLock>(cfg.output_dir); });
  Staging st(cfg.output_dir);
  PipelineResult result;
  result.run_dir = cfg.output_dir;

  auto finish = [&] {
    result.written = st.promote();
    return result;
  };

  auto loaded = load_and_segment(cfg, scale);
  run_stage("segment", [&] {
    for (const auto& ev : loaded) st.put(event_dir_name(ev.group.event_id) + "/segments.jsonl", segments_jsonl(ev));
  });
  if (last == Stage::kSegment) return finish();

  auto bundle = score_events(cfg, loaded);
  run_stage("embed", [&] {
    for (std::size_t e = 0; e < bundle.events.size(); ++e) {
      st.put(event_dir_name(bundle.events[e].event_id) + "/sentences.jsonl", bundle.cache_texts[e]);
    }
  });
  if (last == Stage::kEmbed) return finish();

  std::vector<EventPartition> domain_partitions;
  std::vector<EvaluationReport> reports;
  for (const auto& ev : bundle.events) {
    const std::string dir = event_dir_name(ev.event_id);
    const auto built = run_stage("match", [&] { return build_event_network(ev, cfg.match_params(), cfg.metric, cfg.min_weight); });
    run_stage("match", [&] { st.put(dir + "/symbols.jsonl", built.symbols.dump()); });
    if (last == Stage::kMatch) continue;

    run_stage("similarity", [&] {
      const Metric other = cfg.metric == Metric::kEdit ? Metric::kOverlap : Metric::kEdit;
      const auto other_matrix = article_matrix(built.strings, other);
      st.put(dir + "/article_" + std::string(metric_name(cfg.metric)) + ".csv", built.similarity.to_csv());
      st.put(dir + "/article_" + std::string(metric_name(other)) + ".csv", other_matrix.to_csv());
      std::string strings = "article_id,glyphs\n";
      for (const auto& s : built.strings) strings += io::csv_field(s.article_id) + "," + s.glyph_string + "\n";
      st.put(dir + "/article_strings.csv", strings);
    });
    if (last == Stage::kSimilarity) continue;

    const auto domain = run_stage("network", [&] {
      auto d = induce_domain_network(built.network, MembershipMatrix::from_network(built.network),
                                     domain_labels(ev.articles));
      const auto shown = [&](const WeightedNetwork& n) { return cfg.normalize_display ? n.normalized_for_display() : n; };
      stage_network(st, dir, "article_net", shown(built.network));
      stage_network(st, dir, "domain_net", shown(d.network));
      st.put(dir + "/domain_self_similarity.csv", self_similarity_csv(d));
      return d;
    });
    if (last == Stage::kNetwork) continue;

    const auto article_eval = run_stage("cluster", [&] {
      return evaluate(built.network, ev.event_id, Level::kArticle, scale, cfg.resolution, cfg.seed);
    });
    const auto domain_eval = run_stage("cluster", [&] {
      return evaluate(domain.network, ev.event_id, Level::kDomain, scale, cfg.resolution, cfg.seed);
    });
    run_stage("evaluate", [&] {
      st.put(dir + "/article_partition.csv", article_eval.clusters.to_csv());
      st.put(dir + "/domain_partition.csv", domain_eval.clusters.to_csv());
    });
    reports.push_back(article_eval.report);
    reports.push_back(domain_eval.report);
    domain_partitions.push_back({ev.event_id, domain_eval.clusters});
  }
  if (last != Stage::kFull) return finish();

  run_stage("evaluate", [&] {
    std::string text;
    for (const auto& r : reports) text += r.to_json() + "\n";
    st.put("report.jsonl", text);
  });
  result.reports = reports;

  run_stage("ensemble", [&] {
    std::vector<Article> all_articles;
    for (const auto& ev : bundle.events) all_articles.insert(all_articles.end(), ev.articles.begin(), ev.articles.end());
    std::set<std::string> domain_set;
    for (const auto& a : all_articles) domain_set.insert(a.domain);
    const std::vector<std::string> all_domains(domain_set.begin(), domain_set.end());
    ordered_json report;
    report["event_count"] = domain_partitions.size();
    report["domain_count"] = all_domains.size();
    if (domain_partitions.size() < 2) {
      report["status"] = "skipped: fewer than two events";
      st.put("ensemble/report.json", report.dump(2) + "\n");
      return;
    }
    Partition ens = ensemble_clusters(domain_partitions, all_domains, cfg.resolution, cfg.seed);
    const auto labels = domain_labels(all_articles);
    std::vector<std::string> ids;
    std::vector<std::size_t> truth;
    for (const auto& d : all_domains) {
      if (auto it = labels.find(d); it != labels.end()) {
        ids.push_back(d);
        truth.push_back(*scale.index_of(it->second));
      }
    }
    report["cluster_count"] = ens.cluster_count();
    report["excluded_count"] = all_domains.size() - ids.size();
    if (!ids.empty()) {
      result.ensemble_ari = adjusted_rand_index(ens.restricted_to(ids), Partition(ids, truth));
      report["ari"] = *result.ensemble_ari;
    } else {
      report["ari"] = nullptr;
    }
    st.put("ensemble/partition.csv", ens.to_csv());
    st.put("ensemble/report.json", report.dump(2) + "\n");
    result.ensemble = std::move(ens);
  });

  run_stage("manifest", [&] {
    ordered_json manifest;
    manifest["config_sha256"] = io::sha256_hex(config_fingerprint(cfg));
    manifest["provider"] = bundle.provider_name;
    ordered_json files = ordered_json::object();
    for (const auto& rel : st.files()) files[rel] = io::file_sha256(cfg.output_dir / "partial" / rel);
    manifest["files"] = files;
    st.put("manifest.json", manifest.dump(2) + "\n");
  });
  return finish();
}

SweepResult run_sweep_command(const RunConfig& cfg) {
  auto events = load_scored_events(cfg);
  auto result = run_stage("sweep", [&] { return run_sweep(events, cfg.grid, cfg.metric, cfg.threads); });
  run_stage("sweep", [&] {
    io::write_if_changed(cfg.output_dir / "sweep/surface_tau1.csv", result.tau1.to_csv());
    io::write_if_changed(cfg.output_dir / "sweep/surface_tau2.csv", result.tau2.to_csv());
    std::string counts = "event_id,tau1,tau2,edges\n";
    for (std::size_t e = 0; e < result.event_ids.size(); ++e) {
      for (std::size_t i1 = 0; i1 < cfg.grid.tau1_values.size(); ++i1) {
        for (std::size_t i2 = 0; i2 < cfg.grid.tau2_values.size(); ++i2) {
          counts += fmt::format("{},{},{},{}\n", io::csv_field(result.event_ids[e]), cfg.grid.tau1_values[i1],
                                cfg.grid.tau2_values[i2], result.edge_counts[e][i1 * cfg.grid.tau2_values.size() + i2]);
        }
      }
    }
    io::write_if_changed(cfg.output_dir / "sweep/edge_counts.csv", counts);
  });
  return result;
}

}  // namespace textnet
