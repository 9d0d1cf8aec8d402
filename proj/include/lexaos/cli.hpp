// Copyright 2026 The lexaos Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     https://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

// Command-line front end. Every subcommand reads its inputs, runs one stage
// and writes fixed-name artifacts under --out:
//
//   synth    statutes.jsonl, {train,dev,test}.jsonl, manifest.json
//   ingest   statutes.jsonl, cases.jsonl (masked, truncated)
//   embed    embeddings/ (index.json, statutes.emb, cases/*.emb)
//   train    checkpoint.ckpt
//   predict  predictions.jsonl
//   explain  explanations.jsonl
//   nfsf     nfsf.json
//   eval     metrics.json
//   report   report.json, per_statute.csv
//   llm      llm_outputs.jsonl, llm_predictions.jsonl
//
// Options may also come from a TOML file given with --config, one table per
// subcommand; flags on the command line win. JSON artifacts carry a
// "_provenance" object and JSONL artifacts start with a {"_provenance": ...}
// line recording the subcommand, its resolved options and the seed.
//
// Exit codes: 0 success, 1 user error (bad flags, missing or malformed
// input), 2 internal error.

#pragma once

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <map>
#include <memory>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"
#include "lexaos/aos_model.hpp"
#include "lexaos/checkpoint.hpp"
#include "lexaos/corpus.hpp"
#include "lexaos/embeddings.hpp"
#include "lexaos/explainer.hpp"
#include "lexaos/llm_prompting.hpp"
#include "lexaos/metrics.hpp"
#include "lexaos/synthetic.hpp"
#include "lexaos/trainer.hpp"

namespace lexaos::cli {

inline constexpr std::string_view kVersion = "0.1.0";

namespace fs = std::filesystem;
using ojson = nlohmann::ordered_json;

struct Options {
  std::uint64_t seed = 1;
  bool verbose = false;
  fs::path out;

  // inputs
  fs::path statutes, manifest, data, embeddings, checkpoint, pred, gold;
  std::string split = "test";

  // synth
  SyntheticOptions synth;

  // ingest
  int max_sentences = kDefaultMaxSentences;

  // embed
  std::string provider = "hashing";
  std::size_t dim = kDefaultEmbeddingDim;
  std::string embed_endpoint, embed_model = "remote";
  fs::path matrix, cache_dir;
  std::size_t embed_batch = 64;
  std::size_t embed_in_flight = 4;

  // train
  ModelConfig model;
  TrainerOptions trainer;
  bool random_statutes = false;

  // explain / nfsf
  std::string statute;
  unsigned threads = 1;

  // llm
  int k = kDefaultTopK;
  std::string mode = "standard";
  LlmClientConfig llm;
  std::string api_key_env = "LEXAOS_LLM_API_KEY";
  fs::path replay, record;
  int summary_sentences = kSummarySentences;
};

namespace detail {

inline ojson provenance(const CLI::App& root, const CLI::App& sub, const Options& o) {
  ojson opts = ojson::object();
  for (const CLI::Option* opt : sub.get_options()) {
    if (opt == sub.get_help_ptr() || opt == sub.get_help_all_ptr()) continue;
    const auto key = opt->get_single_name();
    if (opt->count() > 0) {
      const auto& res = opt->results();
      if (res.size() == 1) {
        opts[key] = res.front();
      } else {
        opts[key] = res;
      }
    } else {
      opts[key] = opt->get_default_str();
    }
  }
  const auto* cfg = root.get_config_ptr();
  return {{"tool", "lexaos"},
          {"version", std::string(kVersion)},
          {"subcommand", sub.get_name()},
          {"seed", o.seed},
          {"config", cfg != nullptr && cfg->count() > 0 ? ojson(cfg->as<std::string>()) : ojson(nullptr)},
          {"options", opts}};
}

inline std::ofstream open_output(const fs::path& path) {
  if (path.has_parent_path()) fs::create_directories(path.parent_path());
  std::ofstream os(path, std::ios::binary | std::ios::trunc);
  if (!os) throw UserError("cannot write " + path.string());
  return os;
}

inline std::ofstream open_jsonl(const fs::path& path, const ojson& prov) {
  auto os = open_output(path);
  os << ojson{{"_provenance", prov}}.dump() << '\n';
  return os;
}

inline void write_json(const fs::path& path, ojson body, const ojson& prov) {
  body["_provenance"] = prov;
  open_output(path) << body.dump(2) << '\n';
}

inline Dataset load_ingested(const fs::path& dir) {
  Dataset ds;
  ds.registry = load_statutes(dir / "statutes.jsonl");
  ds.cases = load_cases(dir / "cases.jsonl", ds.registry);
  return ds;
}

inline fs::path embeddings_dir(const Options& o) { return o.embeddings.empty() ? o.data / "embeddings" : o.embeddings; }

inline std::vector<std::string> statute_names(const StatuteRegistry& registry) {
  std::vector<std::string> names;
  for (const auto& s : registry) names.push_back(s.name);
  return names;
}

struct SplitData {
  std::vector<CaseDescription> cases;
  std::vector<EmbeddedCase<double>> embedded;
};

inline SplitData load_split(const Dataset& ds, const EmbeddingStore& store, Split split) {
  SplitData out;
  for (const auto* c : ds.split(split)) {
    MatrixD x = store.case_matrix(c->case_id).cast<double>();
    if (x.rows() != static_cast<Eigen::Index>(c->sentences.size())) {
      throw UserError("embeddings for case " + c->case_id + " have " + std::to_string(x.rows()) + " rows but the case has " +
                      std::to_string(c->sentences.size()) + " sentences; re-run embed");
    }
    out.cases.push_back(*c);
    out.embedded.push_back({c->case_id, std::move(x), c->gold_labels});
  }
  return out;
}

struct LoadedModel {
  Checkpoint ck;
  MatrixD y;
};

inline LoadedModel load_model(const fs::path& path, const Dataset& ds, const EmbeddingStore& store) {
  LoadedModel m{load_checkpoint(path), {}};
  if (m.ck.statute_names != statute_names(ds.registry)) {
    throw UserError(path.string() + ": statute list does not match the data directory");
  }
  if (static_cast<std::size_t>(m.ck.config.input_dim) != store.dim()) {
    throw UserError(path.string() + ": model expects " + std::to_string(m.ck.config.input_dim) +
                    "-dim embeddings, store has " + std::to_string(store.dim()));
  }
  m.y = m.ck.statute_embeddings.cast<double>();
  return m;
}

// case_id plus label names from a JSONL file of {"case_id", "labels", ...}
// objects (gold cases and prediction files share the shape).
struct LabeledRow {
  std::string case_id;
  std::vector<std::string> labels;
  std::optional<std::string> split;
};

inline std::vector<LabeledRow> read_labeled(const fs::path& path) {
  auto is = lexaos::detail::open_input(path);
  std::vector<LabeledRow> rows;
  std::set<std::string> seen;
  lexaos::detail::for_each_json_line(is, path.string(), [&](const nlohmann::json& obj, std::size_t line) {
    LabeledRow r;
    try {
      r.case_id = obj.at("case_id").get<std::string>();
      r.labels = obj.at("labels").get<std::vector<std::string>>();
      if (obj.contains("split")) r.split = obj["split"].get<std::string>();
    } catch (const nlohmann::json::exception& e) {
      throw ParseError(path.string(), line, e.what());
    }
    if (!seen.insert(r.case_id).second) throw ParseError(path.string(), line, "duplicate case_id " + r.case_id);
    rows.push_back(std::move(r));
  });
  return rows;
}

struct Aligned {
  std::vector<std::string> names;
  std::vector<LabeledCase> predicted, gold;
};

// Aligns predictions to gold by case id. The label universe is the registry
// when given, otherwise every name seen in either file (sorted).
inline Aligned align(const fs::path& pred_path, const fs::path& gold_path, const std::optional<StatuteRegistry>& registry,
                     const std::string& split) {
  const auto pred = read_labeled(pred_path);
  auto gold = read_labeled(gold_path);
  if (!split.empty()) {
    std::erase_if(gold, [&](const LabeledRow& r) { return r.split && *r.split != split; });
  }
  Aligned a;
  if (registry) {
    a.names = statute_names(*registry);
  } else {
    std::set<std::string> all;
    for (const auto& r : pred) all.insert(r.labels.begin(), r.labels.end());
    for (const auto& r : gold) all.insert(r.labels.begin(), r.labels.end());
    a.names.assign(all.begin(), all.end());
  }
  std::map<std::string, StatuteId> ids;
  for (std::size_t i = 0; i < a.names.size(); ++i) ids[a.names[i]] = static_cast<StatuteId>(i);
  auto to_set = [&](const LabeledRow& r, const fs::path& src) {
    std::set<StatuteId> s;
    for (const auto& n : r.labels) {
      auto it = ids.find(n);
      if (it == ids.end()) throw UserError(src.string() + ": unknown statute '" + n + "' in case " + r.case_id);
      s.insert(it->second);
    }
    return LabelSet(s.begin(), s.end());
  };
  std::map<std::string, const LabeledRow*> by_id;
  for (const auto& g : gold) by_id[g.case_id] = &g;
  for (const auto& p : pred) {
    auto it = by_id.find(p.case_id);
    if (it == by_id.end()) throw UserError("case " + p.case_id + " has a prediction but no gold labels");
    a.predicted.push_back({p.case_id, to_set(p, pred_path)});
    a.gold.push_back({p.case_id, to_set(*it->second, gold_path)});
  }
  if (pred.size() != gold.size()) {
    throw UserError("prediction file covers " + std::to_string(pred.size()) + " cases, gold has " +
                    std::to_string(gold.size()) + (split.empty() ? "" : " in split " + split));
  }
  return a;
}

inline LabelConfusion confusion_of(const Aligned& a) {
  LabelConfusion c(a.names.size());
  for (std::size_t k = 0; k < a.predicted.size(); ++k) c.add(a.predicted[k].labels, a.gold[k].labels);
  return c;
}

inline std::string fmt(double v) {
  std::ostringstream os;
  os << std::fixed << std::setprecision(4) << v;
  return os.str();
}

// ---------------------------------------------------------------------------
// Subcommands. Each returns the one-line summary.

inline std::string do_synth(const Options& o, const ojson& prov) {
  SyntheticOptions opt = o.synth;
  opt.seed = o.seed;
  const auto corpus = make_synthetic_corpus(opt);
  const auto& ds = corpus.dataset;
  {
    auto os = open_jsonl(o.out / "statutes.jsonl", prov);
    write_statutes(os, ds.registry);
  }
  ojson manifest = ojson::object();
  ojson counts = ojson::object();
  for (Split s : kAllSplits) {
    const std::string name(split_name(s));
    auto os = open_jsonl(o.out / (name + ".jsonl"), prov);
    std::size_t n = 0;
    for (const auto* c : ds.split(s)) {
      os << case_to_json(*c, ds.registry).dump() << '\n';
      ++n;
    }
    manifest[name] = name + ".jsonl";
    counts[name] = n;
  }
  manifest["counts"] = counts;
  write_json(o.out / "manifest.json", manifest, prov);
  return "synth: " + std::to_string(ds.registry.size()) + " statutes, " + std::to_string(ds.cases.size()) +
         " cases -> " + o.out.string();
}

inline std::string do_ingest(const Options& o, const ojson& prov) {
  if (o.max_sentences < 1) throw UserError("--max-sentences must be >= 1");
  const Dataset ds = prepare_dataset(load_dataset(o.statutes, load_manifest(o.manifest)), o.max_sentences);
  {
    auto os = open_jsonl(o.out / "statutes.jsonl", prov);
    write_statutes(os, ds.registry);
  }
  auto os = open_jsonl(o.out / "cases.jsonl", prov);
  write_cases(os, ds.cases, ds.registry);
  const auto sizes = ds.split_sizes();
  return "ingest: " + std::to_string(ds.registry.size()) + " statutes, " + std::to_string(sizes.at("train")) + "/" +
         std::to_string(sizes.at("dev")) + "/" + std::to_string(sizes.at("test")) + " train/dev/test cases -> " +
         o.out.string();
}

inline std::unique_ptr<EmbeddingProvider> make_provider(const Options& o) {
  if (o.provider == "hashing") return std::make_unique<HashingEmbedder>(o.dim);
  if (o.provider == "precomputed") {
    if (o.matrix.empty()) throw UserError("--provider precomputed needs --matrix");
    return std::make_unique<PrecomputedProvider>(o.matrix);
  }
  if (o.provider == "http") {
    if (o.embed_endpoint.empty()) throw UserError("--provider http needs --endpoint");
    return std::make_unique<HttpEmbeddingProvider>(o.embed_endpoint, o.dim, o.embed_model);
  }
  throw UserError("unknown provider '" + o.provider + "'");
}

inline std::string do_embed(const Options& o, const ojson& prov) {
  const Dataset ds = load_ingested(o.data);
  auto provider = make_provider(o);
  EmbeddingCache cache = o.cache_dir.empty() ? EmbeddingCache() : EmbeddingCache(o.cache_dir);
  EmbedStats stats;
  const fs::path dir = o.out / "embeddings";
  const auto store = embed_dataset(*provider, ds, dir, cache, {o.embed_batch, o.embed_in_flight}, &stats);
  nlohmann::json idx;
  {
    std::ifstream is(dir / "index.json");
    idx = nlohmann::json::parse(is);
  }
  idx["_provenance"] = prov;
  open_output(dir / "index.json") << idx.dump(2) << '\n';
  return "embed: " + std::to_string(store.case_count()) + " cases, " + std::to_string(stats.texts_embedded) +
         " texts embedded, " + std::to_string(stats.cache_hits) + " cache hits, dim " + std::to_string(store.dim()) +
         " -> " + dir.string();
}

inline std::string do_train(const Options& o, const ojson& prov, std::ostream& log) {
  const Dataset ds = load_ingested(o.data);
  const auto store = EmbeddingStore::open(embeddings_dir(o));
  ModelConfig cfg = o.model;
  cfg.num_statutes = static_cast<int>(ds.registry.size());
  cfg.input_dim = static_cast<int>(store.dim());
  cfg.validate();
  TrainerOptions topt = o.trainer;
  topt.seed = o.seed;

  MatrixF yf = o.random_statutes ? random_statute_embeddings(ds.registry.size(), store.dim(), o.seed) : store.statutes();
  if (yf.rows() != cfg.num_statutes) throw UserError("statute embeddings do not match the statute list; re-run embed");
  const MatrixD y = yf.cast<double>();
  const auto train_set = load_split(ds, store, Split::kTrain);
  const auto dev_set = load_split(ds, store, Split::kDev);
  if (train_set.embedded.empty()) throw UserError("no training cases in " + o.data.string());

  auto on_epoch = [&](const EpochRecord& r) {
    if (o.verbose) {
      log << "epoch " << r.epoch << " loss " << fmt(r.train_loss) << " dev micro-F1 " << fmt(r.dev_micro_f1)
          << " macro-F1 " << fmt(r.dev_macro_f1) << '\n';
    }
  };
  const auto result = train(init_parameters<double>(cfg, o.seed), cfg,
                            std::span<const EmbeddedCase<double>>(train_set.embedded),
                            std::span<const EmbeddedCase<double>>(dev_set.embedded), y, topt, on_epoch);

  Checkpoint ck;
  ck.config = cfg;
  ck.params = result.params;
  ck.statute_embeddings = yf;
  ck.statute_names = statute_names(ds.registry);
  nlohmann::json history = nlohmann::json::array();
  for (const auto& r : result.history) {
    history.push_back({{"epoch", r.epoch},
                       {"train_loss", r.train_loss},
                       {"dev_micro_f1", r.dev_micro_f1},
                       {"dev_macro_f1", r.dev_macro_f1}});
  }
  ck.meta = {{"optimizer", topt},
             {"seed", o.seed},
             {"epoch", result.best_epoch},
             {"statute_embeddings", o.random_statutes ? "random" : "content"},
             {"history", history},
             {"provenance", nlohmann::json::parse(prov.dump())}};
  if (result.best) {
    ck.meta["dev_metrics"] = {{"micro_f1", result.best->dev_micro_f1}, {"macro_f1", result.best->dev_macro_f1}};
  }
  const fs::path path = o.out / "checkpoint.ckpt";
  save_checkpoint(path, ck);
  std::string summary = "train: " + std::to_string(result.history.size()) + " epochs, best epoch " +
                        std::to_string(result.best_epoch);
  if (result.best) summary += ", dev micro-F1 " + fmt(result.best->dev_micro_f1) + " macro-F1 " + fmt(result.best->dev_macro_f1);
  return summary + " -> " + path.string();
}

struct Scored {
  Dataset ds;
  EmbeddingStore store;
  LoadedModel model;
  SplitData split;
};

inline Scored load_scored(const Options& o) {
  Scored s;
  s.ds = load_ingested(o.data);
  s.store = EmbeddingStore::open(embeddings_dir(o));
  s.model = load_model(o.checkpoint, s.ds, s.store);
  s.split = load_split(s.ds, s.store, parse_split(o.split));
  return s;
}

inline std::string do_predict(const Options& o, const ojson& prov) {
  const auto s = load_scored(o);
  const auto& names = s.model.ck.statute_names;
  const fs::path path = o.out / "predictions.jsonl";
  auto os = open_jsonl(path, prov);
  std::size_t labels = 0;
  for (const auto& p : predict_all(s.model.ck.params, s.model.ck.config,
                                   std::span<const EmbeddedCase<double>>(s.split.embedded), s.model.y)) {
    std::vector<std::string> predicted;
    for (StatuteId id : p.predicted) predicted.push_back(names[static_cast<std::size_t>(id)]);
    ojson probs = ojson::object();
    for (std::size_t i = 0; i < p.probs.size(); ++i) probs[names[i]] = p.probs[i];
    labels += predicted.size();
    os << ojson{{"case_id", p.case_id}, {"labels", predicted}, {"probs", probs}}.dump() << '\n';
  }
  return "predict: " + std::to_string(s.split.cases.size()) + " " + o.split + " cases, " + std::to_string(labels) +
         " predicted labels -> " + path.string();
}

inline std::string do_explain(const Options& o, const ojson& prov) {
  const auto s = load_scored(o);
  const auto& names = s.model.ck.statute_names;
  std::optional<StatuteId> only;
  if (!o.statute.empty()) {
    only = s.ds.registry.find(o.statute);
    if (!only) throw UserError("unknown statute '" + o.statute + "'");
  }
  const fs::path path = o.out / "explanations.jsonl";
  auto os = open_jsonl(path, prov);
  std::size_t count = 0;
  for (std::size_t c = 0; c < s.split.cases.size(); ++c) {
    const auto& cd = s.split.cases[c];
    std::vector<Explanation> expl;
    if (only) {
      expl.push_back(explain(s.model.ck.params, s.model.ck.config, cd.case_id, s.split.embedded[c].sentences, s.model.y, *only));
    } else {
      expl = explain_case(s.model.ck.params, s.model.ck.config, cd.case_id, s.split.embedded[c].sentences, s.model.y);
    }
    for (const auto& e : expl) {
      os << explanation_json(e, names[static_cast<std::size_t>(e.statute)], cd.sentences).dump() << '\n';
      ++count;
    }
  }
  return "explain: " + std::to_string(count) + " explanations over " + std::to_string(s.split.cases.size()) + " " +
         o.split + " cases -> " + path.string();
}

inline std::string do_nfsf(const Options& o, const ojson& prov) {
  const auto s = load_scored(o);
  const auto rep = evaluate_counterfactuals(s.model.ck.params, s.model.ck.config,
                                            std::span<const EmbeddedCase<double>>(s.split.embedded), s.model.y,
                                            {.necessity = true, .sufficiency = true, .threads = std::max(1u, o.threads)});
  const fs::path path = o.out / "nfsf.json";
  write_json(path, counterfactual_json(rep, s.model.ck.statute_names), prov);
  return "nfsf: " + std::to_string(rep.total()) + " (case, statute) pairs, NF " + fmt(rep.nf()) + " SF " + fmt(rep.sf()) +
         " -> " + path.string();
}

inline std::string do_eval(const Options& o, const ojson& prov) {
  std::optional<StatuteRegistry> registry;
  if (!o.statutes.empty()) registry = load_statutes(o.statutes);
  const auto a = align(o.pred, o.gold, registry, o.split);
  const auto conf = confusion_of(a);
  const auto rows = per_statute_report(conf, a.names, {});
  const fs::path path = o.out / "metrics.json";
  ojson body = metrics_report_json(conf, avg_jaccard(a.predicted, a.gold), rows);
  body["cases"] = a.predicted.size();
  write_json(path, body, prov);
  const auto micro = micro_prf(conf);
  const auto macro = macro_prf(conf);
  return "eval: " + std::to_string(a.predicted.size()) + " cases, micro P/R/F1 " + fmt(micro.precision) + "/" +
         fmt(micro.recall) + "/" + fmt(micro.f1) + ", macro P/R/F1 " + fmt(macro.precision) + "/" + fmt(macro.recall) +
         "/" + fmt(macro.f1) + ", Jaccard " + fmt(avg_jaccard(a.predicted, a.gold)) + " -> " + path.string();
}

inline std::string do_report(const Options& o, const ojson& prov) {
  const Dataset ds = load_ingested(o.data);
  const auto a = align(o.pred, o.gold, ds.registry, o.split);
  std::vector<std::int64_t> train_counts(ds.registry.size(), 0);
  for (const auto* c : ds.split(Split::kTrain)) {
    for (StatuteId id : c->gold_labels) ++train_counts[static_cast<std::size_t>(id)];
  }
  MatrixF y;
  if (!o.checkpoint.empty()) {
    auto ck = load_checkpoint(o.checkpoint);
    if (ck.statute_names != a.names) throw UserError(o.checkpoint.string() + ": statute list does not match the data directory");
    y = std::move(ck.statute_embeddings);
  }
  const auto conf = confusion_of(a);
  const auto rows = per_statute_report(conf, a.names, train_counts, y);
  write_json(o.out / "report.json", metrics_report_json(conf, avg_jaccard(a.predicted, a.gold), rows), prov);
  {
    auto os = open_output(o.out / "per_statute.csv");
    os << "# " << ojson{{"_provenance", prov}}.dump() << '\n';
    write_per_statute_csv(os, rows);
  }
  std::size_t never_hit = 0;
  for (const auto& r : rows) never_hit += (r.tp == 0 && r.tp + r.fn > 0) ? 1 : 0;
  return "report: " + std::to_string(rows.size()) + " statutes, " + std::to_string(never_hit) +
         " with gold cases but no true positive -> " + (o.out / "per_statute.csv").string();
}

inline std::string do_llm(const Options& o, const ojson& prov, std::ostream& log) {
  const auto s = load_scored(o);
  const PromptMode mode = parse_mode(o.mode);
  if (o.k < 1 || o.k > s.model.ck.config.num_statutes) {
    throw UserError("--k must lie in [1, " + std::to_string(s.model.ck.config.num_statutes) + "]");
  }

  std::unique_ptr<LlmClient> base;
  if (!o.replay.empty()) {
    base = std::make_unique<ReplayClient>(o.replay);
  } else {
    LlmClientConfig cfg = o.llm;
    if (cfg.endpoint.empty() || cfg.model.empty()) throw UserError("llm needs --endpoint and --model, or --replay");
    if (const char* key = std::getenv(o.api_key_env.c_str())) cfg.api_key = key;
    base = std::make_unique<HttpLlmClient>(cfg);
  }
  std::unique_ptr<LlmClient> recorder;
  if (!o.record.empty()) recorder = std::make_unique<RecordingClient>(*base, o.record);
  LlmClient& client = recorder ? *recorder : *base;

  const auto res = run_pipeline(s.split.cases, s.split.embedded, s.model.ck.params, s.model.ck.config, s.model.y,
                                s.ds.registry, client,
                                {.k = o.k, .mode = mode, .summary_sentences = o.summary_sentences,
                                 .max_in_flight = o.llm.max_in_flight});
  for (const auto& w : res.warnings) log << "warning: " << w << '\n';

  const auto& names = s.model.ck.statute_names;
  {
    auto os = open_jsonl(o.out / "llm_outputs.jsonl", prov);
    for (const auto& p : res.pairs) {
      os << pair_outcome_json(p, s.split.cases[p.case_index].case_id, names[static_cast<std::size_t>(p.statute)], mode).dump()
         << '\n';
    }
  }
  const std::set<std::string> errored(res.errored_cases.begin(), res.errored_cases.end());
  auto os = open_jsonl(o.out / "llm_predictions.jsonl", prov);
  std::size_t scored = 0;
  for (const auto& p : res.predicted) {
    if (errored.contains(p.case_id)) continue;
    std::vector<std::string> labels;
    for (StatuteId id : p.labels) labels.push_back(names[static_cast<std::size_t>(id)]);
    os << ojson{{"case_id", p.case_id}, {"labels", labels}}.dump() << '\n';
    ++scored;
  }
  return "llm: " + std::to_string(res.pairs.size()) + " prompts (" + std::string(mode_name(mode)) + ", k=" +
         std::to_string(o.k) + "), " + std::to_string(res.errored_pairs()) + " errored, " + std::to_string(scored) +
         " cases scored -> " + (o.out / "llm_predictions.jsonl").string();
}

}  // namespace detail

// Runs one subcommand; never throws.
inline int run(int argc, const char* const* argv, std::ostream& out = std::cout, std::ostream& err = std::cerr) {
  Options o;
  CLI::App app{"Statute identification with attention over statutes", "lexaos"};
  app.set_version_flag("--version", std::string(kVersion));
  app.set_config("--config", "", "TOML file with one table per subcommand; flags take precedence")
      ->check(CLI::ExistingFile);
  app.add_option("--seed", o.seed, "Seed for every random choice")->capture_default_str();
  app.add_flag("-v,--verbose", o.verbose, "Progress on stderr");
  app.require_subcommand(1);
  app.fallthrough();

  auto out_opt = [&](CLI::App* sub) { sub->add_option("--out", o.out, "Output directory")->required(); };
  auto data_opts = [&](CLI::App* sub) {
    sub->add_option("--data", o.data, "Directory written by ingest")->required()->check(CLI::ExistingDirectory);
    sub->add_option("--embeddings", o.embeddings, "Embedding directory (default: DATA/embeddings)")
        ->check(CLI::ExistingDirectory);
  };
  auto scored_opts = [&](CLI::App* sub) {
    sub->add_option("--checkpoint", o.checkpoint, "Checkpoint written by train")->required()->check(CLI::ExistingFile);
    data_opts(sub);
    sub->add_option("--split", o.split, "Split to score")
        ->capture_default_str()
        ->check(CLI::IsMember({"train", "dev", "test"}));
    out_opt(sub);
  };

  auto* synth = app.add_subcommand("synth", "Generate the keyword corpus");
  synth->add_option("--statutes", o.synth.statutes, "Number of statutes")->capture_default_str();
  synth->add_option("--train", o.synth.train, "Training cases")->capture_default_str();
  synth->add_option("--dev", o.synth.dev, "Dev cases")->capture_default_str();
  synth->add_option("--test", o.synth.test, "Test cases")->capture_default_str();
  out_opt(synth);

  auto* ingest = app.add_subcommand("ingest", "Load, mask and truncate a corpus");
  ingest->add_option("--statutes", o.statutes, "Statutes JSONL")->required()->check(CLI::ExistingFile);
  ingest->add_option("--manifest", o.manifest, "Split manifest JSON")->required()->check(CLI::ExistingFile);
  ingest->add_option("--max-sentences", o.max_sentences, "Sentences kept per case")->capture_default_str();
  out_opt(ingest);

  auto* embed = app.add_subcommand("embed", "Embed statutes and case sentences");
  embed->add_option("--data", o.data, "Directory written by ingest")->required()->check(CLI::ExistingDirectory);
  embed->add_option("--provider", o.provider, "hashing, http or precomputed")
      ->capture_default_str()
      ->check(CLI::IsMember({"hashing", "http", "precomputed"}));
  embed->add_option("--dim", o.dim, "Embedding dimension (hashing, http)")->capture_default_str();
  embed->add_option("--endpoint", o.embed_endpoint, "Embedding service base URL (http)");
  embed->add_option("--model-name", o.embed_model, "Model name for the cache identity (http)")->capture_default_str();
  embed->add_option("--matrix", o.matrix, "Matrix file with a row-index sidecar (precomputed)")->check(CLI::ExistingFile);
  embed->add_option("--cache-dir", o.cache_dir, "Persistent embedding cache");
  embed->add_option("--batch-size", o.embed_batch, "Texts per provider call")->capture_default_str();
  embed->add_option("--max-in-flight", o.embed_in_flight, "Concurrent provider calls")->capture_default_str();
  out_opt(embed);

  auto* trn = app.add_subcommand("train", "Train the attention-over-statutes classifier");
  data_opts(trn);
  trn->add_option("--heads", o.model.heads, "Attention heads per statute")->capture_default_str();
  trn->add_option("--attention-dim", o.model.attention_dim, "Query/key dimension")->capture_default_str();
  trn->add_option("--hidden-dim", o.model.hidden_dim, "Hidden layer width")->capture_default_str();
  trn->add_option("--dropout", o.model.dropout, "Dropout rate")->capture_default_str();
  trn->add_option("--positive-weight", o.model.positive_weight, "Loss weight of the positive class")->capture_default_str();
  trn->add_option("--negative-weight", o.model.negative_weight, "Loss weight of the negative class")->capture_default_str();
  trn->add_option("--lr", o.trainer.learning_rate, "Adam learning rate")->capture_default_str();
  trn->add_option("--batch-size", o.trainer.batch_size, "Cases per batch")->capture_default_str();
  trn->add_option("--epochs", o.trainer.epochs, "Maximum epochs")->capture_default_str();
  trn->add_option("--patience", o.trainer.patience, "Early-stopping patience (0 disables)")->capture_default_str();
  trn->add_flag("--random-statutes", o.random_statutes, "Replace statute embeddings with seeded noise");
  out_opt(trn);

  auto* pred = app.add_subcommand("predict", "Predict statutes for one split");
  scored_opts(pred);

  auto* expl = app.add_subcommand("explain", "Attention explanations for predicted statutes");
  scored_opts(expl);
  expl->add_option("--statute", o.statute, "Explain only this statute (must be predicted)");

  auto* nfsf = app.add_subcommand("nfsf", "Necessity and sufficiency of the explanations");
  scored_opts(nfsf);
  nfsf->add_option("--threads", o.threads, "Worker threads")->capture_default_str();

  auto* eval = app.add_subcommand("eval", "Score predictions against gold labels");
  eval->add_option("--pred", o.pred, "Predictions JSONL")->required()->check(CLI::ExistingFile);
  eval->add_option("--gold", o.gold, "Gold cases JSONL")->required()->check(CLI::ExistingFile);
  eval->add_option("--statutes", o.statutes, "Statutes JSONL fixing the label set")->check(CLI::ExistingFile);
  eval->add_option("--split", o.split, "Keep only gold cases of this split (empty: all)")->capture_default_str();
  out_opt(eval);

  auto* report = app.add_subcommand("report", "Per-statute breakdown with training frequency");
  report->add_option("--pred", o.pred, "Predictions JSONL")->required()->check(CLI::ExistingFile);
  report->add_option("--gold", o.gold, "Gold cases JSONL")->required()->check(CLI::ExistingFile);
  report->add_option("--data", o.data, "Directory written by ingest")->required()->check(CLI::ExistingDirectory);
  report->add_option("--checkpoint", o.checkpoint, "Checkpoint for statute similarity")->check(CLI::ExistingFile);
  report->add_option("--split", o.split, "Keep only gold cases of this split (empty: all)")->capture_default_str();
  out_opt(report);

  auto* llm = app.add_subcommand("llm", "Zero-shot LLM verdicts on the classifier's top-k statutes");
  scored_opts(llm);
  llm->add_option("--k", o.k, "Statutes per case sent to the LLM")->capture_default_str();
  llm->add_option("--mode", o.mode, "standard or cot")->capture_default_str()->check(CLI::IsMember({"standard", "cot"}));
  llm->add_option("--endpoint", o.llm.endpoint, "Chat-completions URL");
  llm->add_option("--model", o.llm.model, "Model name");
  llm->add_option("--temperature", o.llm.temperature, "Sampling temperature")->capture_default_str();
  llm->add_option("--max-tokens", o.llm.max_tokens, "Response token limit")->capture_default_str();
  llm->add_option("--max-in-flight", o.llm.max_in_flight, "Concurrent requests")->capture_default_str();
  llm->add_option("--timeout", o.llm.timeout_seconds, "Request timeout in seconds")->capture_default_str();
  llm->add_option("--api-key-env", o.api_key_env, "Environment variable holding the API key")->capture_default_str();
  llm->add_option("--summary-sentences", o.summary_sentences, "Sentences per case summary")->capture_default_str();
  llm->add_option("--replay", o.replay, "Answer from a recorded fixture")->check(CLI::ExistingFile);
  llm->add_option("--record", o.record, "Append every exchange to a fixture");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e, out, err);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e, out, err);
  } catch (const CLI::CallForVersion& e) {
    return app.exit(e, out, err);
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << "\n\n";
    const auto subs = app.get_subcommands();
    err << (subs.empty() ? app.help() : subs.front()->help());
    return 1;
  }

  CLI::App* sub = app.get_subcommands().front();
  const ojson prov = detail::provenance(app, *sub, o);
  try {
    std::string summary;
    const std::string name = sub->get_name();
    if (name == "synth") summary = detail::do_synth(o, prov);
    else if (name == "ingest") summary = detail::do_ingest(o, prov);
    else if (name == "embed") summary = detail::do_embed(o, prov);
    else if (name == "train") summary = detail::do_train(o, prov, err);
    else if (name == "predict") summary = detail::do_predict(o, prov);
    else if (name == "explain") summary = detail::do_explain(o, prov);
    else if (name == "nfsf") summary = detail::do_nfsf(o, prov);
    else if (name == "eval") summary = detail::do_eval(o, prov);
    else if (name == "report") summary = detail::do_report(o, prov);
    else if (name == "llm") summary = detail::do_llm(o, prov, err);
    out << summary << std::endl;
    return 0;
  } catch (const UserError& e) {
    err << "error: " << e.what() << '\n';
    return 1;
  } catch (const nlohmann::json::exception& e) {
    err << "error: malformed JSON: " << e.what() << '\n';
    return 1;
  } catch (const std::exception& e) {
    err << "internal error: " << e.what() << '\n';
    return 2;
  }
}

}  // namespace lexaos::cli
