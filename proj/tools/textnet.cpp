// textnet: writing-style networks from cross-outlet sentence reuse.

#include <CLI11.hpp>
#include <fmt/format.h>
#include <nlohmann/json.hpp>

#include <cstdio>
#include <iostream>
#include <map>
#include <set>

#include "textnet/bench.hpp"
#include "textnet/error.hpp"
#include "textnet/io.hpp"
#include "textnet/pipeline.hpp"

namespace fs = std::filesystem;
using namespace textnet;

namespace {

struct Options {
  RunConfig cfg;
  std::string metric = "edit";
};

// Reads "node_id,bias_label" rows; the header line is required.
std::map<std::string, std::string> read_label_csv(const fs::path& path) {
  const std::string text = io::read_file(path);
  std::map<std::string, std::string> out;
  std::size_t pos = 0;
  bool header = true;
  while (pos < text.size()) {
    auto nl = text.find('\n', pos);
    if (nl == std::string::npos) nl = text.size();
    std::string line = text.substr(pos, nl - pos);
    pos = nl + 1;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (io::trim(line).empty()) continue;
    if (header) {
      header = false;
      continue;
    }
    auto fields = io::split_csv_line(line);
    if (fields.size() < 2) throw DataError(path.string() + ": expected node_id,bias_label");
    out[fields[0]] = fields[1];
  }
  return out;
}

WeightedNetwork with_labels(const WeightedNetwork& n, const std::map<std::string, std::string>& labels) {
  std::vector<NodeInfo> nodes = n.nodes();
  for (auto& node : nodes) {
    if (auto it = labels.find(node.id); it != labels.end()) {
      if (it->second.empty()) {
        node.attributes.erase("bias_label");
      } else {
        node.attributes["bias_label"] = it->second;
      }
    }
  }
  WeightedNetwork out(std::move(nodes));
  for (std::size_t i = 0; i < n.size(); ++i) {
    for (std::size_t j = i + 1; j < n.size(); ++j) {
      if (n.weight(i, j) > 0.0) out.set_weight(i, j, n.weight(i, j));
    }
  }
  return out;
}

Stage parse_stage(const std::string& s) {
  static const std::map<std::string, Stage> names{{"segment", Stage::kSegment},       {"embed", Stage::kEmbed},
                                                  {"match", Stage::kMatch},           {"similarity", Stage::kSimilarity},
                                                  {"network", Stage::kNetwork},       {"full", Stage::kFull}};
  auto it = names.find(s);
  if (it == names.end()) throw ConfigError("unknown stage '" + s + "'");
  return it->second;
}

void print_pipeline_summary(const PipelineResult& r) {
  for (const auto& rep : r.reports) std::cout << rep.to_json() << "\n";
  if (r.ensemble_ari) std::cout << fmt::format("ensemble ari {:.6f}\n", *r.ensemble_ari);
  std::cerr << fmt::format("{} file(s) written under {}\n", r.written.size(), r.run_dir.string());
}

void export_vectors(const RunConfig& cfg, const fs::path& path) {
  const auto events = load_scored_events(cfg);
  std::set<std::string> seen;
  std::vector<std::string> texts;
  std::vector<Embedding> vectors;
  std::size_t dim = 0;
  for (const auto& ev : events) {
    for (const auto& s : ev.sentences) {
      dim = s.embedding.size();
      if (seen.insert(s.record.text).second) {
        texts.push_back(s.record.text);
        vectors.push_back(s.embedding);
      }
    }
  }
  const auto provider = make_provider(cfg.provider, std::chrono::milliseconds(cfg.http_timeout_ms));
  write_vector_file(path, provider->name(), dim, texts, vectors);
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Writing-style networks from sentence reuse across news outlets"};
  app.require_subcommand(1);
  app.set_config("--config", "", "INI config file; command-line flags take precedence");

  Options o;
  auto& c = o.cfg;
  app.add_option("--corpus", c.corpus_path, "Article corpus (JSON lines)");
  app.add_option("--provider", c.provider, "toy:<dim>,<seed> | file:<path> | http:<url>")->capture_default_str();
  app.add_option("--lexicon", c.lexicon_path, "Sentiment lexicon (term<TAB>valence)")->capture_default_str();
  app.add_option("--junk", c.junk_path, "Junk sentence patterns")->capture_default_str();
  app.add_option("--abbreviations", c.abbreviations_path, "Abbreviations that do not end a sentence")
      ->capture_default_str();
  app.add_option("--bias-levels", c.bias_levels, "Ordered bias labels, comma separated")->delimiter(',');
  app.add_option("--tau1", c.tau1, "Cosine threshold (strict)")->capture_default_str();
  app.add_option("--tau2", c.tau2, "Sentiment tolerance")->capture_default_str();
  app.add_option("--metric", o.metric, "Article similarity: edit | overlap")->capture_default_str();
  app.add_option("--resolution", c.resolution, "Louvain resolution")->capture_default_str();
  app.add_option("--seed", c.seed, "Louvain visiting-order seed, 0 = index order")->capture_default_str();
  app.add_option("--min-weight", c.min_weight, "Drop article edges at or below this weight")->capture_default_str();
  app.add_flag("--normalize-display", c.normalize_display, "Scale exported networks to max weight 1");
  app.add_option("--out", c.output_dir, "Run directory")->capture_default_str();
  app.add_option("--threads", c.threads, "Worker threads")->capture_default_str();
  app.add_option("--http-timeout-ms", c.http_timeout_ms, "HTTP provider timeout")->capture_default_str();

  std::string until = "full";
  auto* pipeline = app.add_subcommand("pipeline", "Run every stage");
  pipeline->add_option("--until", until, "Last stage: segment|embed|match|similarity|network|full");

  std::map<std::string, CLI::App*> stage_cmds;
  stage_cmds["segment"] = app.add_subcommand("segment", "Clean and segment articles");
  stage_cmds["embed"] = app.add_subcommand("embed", "Score and embed sentences");
  stage_cmds["match"] = app.add_subcommand("match", "Build symbol tables");
  stage_cmds["similarity"] = app.add_subcommand("similarity", "Article similarity matrices");
  stage_cmds["network"] = app.add_subcommand("network", "Article and domain networks");
  fs::path export_path;
  stage_cmds["embed"]->add_option("--export-vectors", export_path, "Also write a vector file for file:<path>");

  auto* cluster = app.add_subcommand("cluster", "Louvain partition of a GraphML network");
  fs::path graph_path, partition_out;
  cluster->add_option("--graph", graph_path, "Input GraphML")->required();
  cluster->add_option("--partition-out", partition_out, "Partition CSV (stdout when omitted)");

  auto* evaluate_cmd = app.add_subcommand("evaluate", "Cluster a network and compare with bias labels");
  fs::path labels_path;
  std::string event_id = "-", level = "article";
  evaluate_cmd->add_option("--graph", graph_path, "Input GraphML")->required();
  evaluate_cmd->add_option("--labels", labels_path, "node_id,bias_label CSV overriding node attributes");
  evaluate_cmd->add_option("--event", event_id, "Event id for the report");
  evaluate_cmd->add_option("--level", level, "article | domain")->check(CLI::IsMember({"article", "domain"}));

  auto* ensemble = app.add_subcommand("ensemble", "Consensus domain clusters across events");
  std::vector<std::string> partition_specs;
  ensemble->add_option("--partition", partition_specs, "event=path of a domain partition CSV")->required();
  ensemble->add_option("--labels", labels_path, "domain,bias_label CSV");
  ensemble->add_option("--partition-out", partition_out, "Consensus partition CSV");

  auto* sweep = app.add_subcommand("sweep", "Threshold grid sweep");
  sweep->add_option("--tau1-grid", c.grid.tau1_values, "Ascending tau1 values")->delimiter(',');
  sweep->add_option("--tau2-grid", c.grid.tau2_values, "Ascending tau2 values")->delimiter(',');

  auto* bench = app.add_subcommand("bench", "Similarity measures on the alteration suite");
  fs::path suite = "data/alterations.jsonl", stopwords = "data/stopwords.txt", pronouns = "data/pronouns.txt";
  fs::path bench_out;
  bench->add_option("--suite", suite)->capture_default_str();
  bench->add_option("--stopwords", stopwords)->capture_default_str();
  bench->add_option("--pronouns", pronouns)->capture_default_str();
  bench->add_option("--report", bench_out, "CSV path (stdout when omitted)");

  for (auto* sub : app.get_subcommands({})) sub->fallthrough();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? 0 : 1;
  }

  try {
    c.metric = parse_metric(o.metric);
    if (pipeline->parsed()) {
      print_pipeline_summary(run_pipeline(c, parse_stage(until)));
    } else if (cluster->parsed()) {
      const auto n = load_graphml(graph_path);
      const auto p = louvain(n, c.resolution, c.seed);
      if (partition_out.empty()) {
        std::cout << p.to_csv();
      } else {
        io::write_file(partition_out, p.to_csv());
      }
    } else if (evaluate_cmd->parsed()) {
      auto n = load_graphml(graph_path);
      if (!labels_path.empty()) n = with_labels(n, read_label_csv(labels_path));
      const auto ev = evaluate(n, event_id, level == "domain" ? Level::kDomain : Level::kArticle,
                               BiasScale(c.bias_levels), c.resolution, c.seed);
      std::cout << ev.report.to_json() << "\n";
    } else if (ensemble->parsed()) {
      std::vector<EventPartition> parts;
      std::set<std::string> domains;
      for (const auto& spec : partition_specs) {
        const auto eq = spec.find('=');
        if (eq == std::string::npos || eq == 0) throw ConfigError("--partition expects event=path, got '" + spec + "'");
        auto p = Partition::from_csv(io::read_file(spec.substr(eq + 1)));
        domains.insert(p.node_ids().begin(), p.node_ids().end());
        parts.push_back({spec.substr(0, eq), std::move(p)});
      }
      const std::vector<std::string> all(domains.begin(), domains.end());
      const auto ens = ensemble_clusters(parts, all, c.resolution, c.seed);
      nlohmann::ordered_json report{{"event_count", parts.size()},
                                    {"domain_count", all.size()},
                                    {"cluster_count", ens.cluster_count()}};
      if (!labels_path.empty()) {
        const BiasScale scale(c.bias_levels);
        std::vector<std::string> ids;
        std::vector<std::size_t> truth;
        for (const auto& [domain, label] : read_label_csv(labels_path)) {
          if (label.empty() || !ens.label_of(domain)) continue;
          auto idx = scale.index_of(label);
          if (!idx) throw DataError("label '" + label + "' is not on the bias scale");
          ids.push_back(domain);
          truth.push_back(*idx);
        }
        report["ari"] = ids.empty() ? nlohmann::ordered_json(nullptr)
                                    : nlohmann::ordered_json(adjusted_rand_index(ens.restricted_to(ids),
                                                                                 Partition(ids, truth)));
      }
      if (!partition_out.empty()) io::write_file(partition_out, ens.to_csv());
      std::cout << report.dump() << "\n";
    } else if (sweep->parsed()) {
      const auto r = run_sweep_command(c);
      std::cerr << fmt::format("sweep over {} event(s) written to {}\n", r.event_ids.size(),
                               (c.output_dir / "sweep").string());
    } else if (bench->parsed()) {
      const auto cases = load_alteration_suite(suite);
      const auto provider = make_provider(c.provider, std::chrono::milliseconds(c.http_timeout_ms));
      const auto lexicon = Lexicon::load(c.lexicon_path);
      const auto filter = TokenFilter::from_files(stopwords, pronouns);
      std::vector<ComparisonRow> rows;
      for (const auto& k : cases) rows.push_back(compare_all(k, *provider, lexicon, filter));
      const auto csv = comparison_csv(rows);
      if (bench_out.empty()) {
        std::cout << csv;
      } else {
        io::write_file(bench_out, csv);
      }
    } else {
      for (const auto& [name, sub] : stage_cmds) {
        if (!sub->parsed()) continue;
        print_pipeline_summary(run_pipeline(c, parse_stage(name)));
        if (name == "embed" && !export_path.empty()) export_vectors(c, export_path);
      }
    }
  } catch (const StageError& e) {
    std::cerr << "textnet: " << e.what() << "\n";
    return e.exit_code();
  } catch (const ConfigError& e) {
    std::cerr << "textnet: configuration: " << e.what() << "\n";
    return 1;
  } catch (const ProviderError& e) {
    std::cerr << "textnet: provider: " << e.what() << "\n";
    return 3;
  } catch (const std::exception& e) {
    std::cerr << "textnet: " << e.what() << "\n";
    return 2;
  }
  return 0;
}
