// adlens command-line tool: synthetic corpus generation, fixture API
// serving, crawling, labeling, engagement analytics, dataset preparation,
// classifier training/evaluation and the undeclared-promotion audit.

#include <chrono>
#include <csignal>
#include <cstdlib>
#include <filesystem>
#include <iostream>
#include <memory>
#include <thread>

#include "CLI11.hpp"
#include "adlens/analytics.hpp"
#include "adlens/contextual.hpp"
#include "adlens/eval.hpp"
#include "adlens/forest.hpp"
#include "adlens/ingest.hpp"
#include "adlens/labeling.hpp"
#include "adlens/pipeline.hpp"
#include "adlens/sampling.hpp"
#include "adlens/synth.hpp"
#include "adlens/textprep.hpp"
#include "adlens/util.hpp"
#include "json.hpp"

namespace fs = std::filesystem;
using nlohmann::json;
using namespace adlens;

namespace {

int log_level() {
  const char* env = std::getenv("TOOL_LOG");
  if (env == nullptr) return 0;
  std::string v = lower_ascii(env);
  if (v == "debug") return 2;
  if (v == "info") return 1;
  return 0;
}

void log_info(const std::string& msg) {
  if (log_level() >= 1) std::cerr << "[info] " << msg << "\n";
}

void log_debug(const std::string& msg) {
  if (log_level() >= 2) std::cerr << "[debug] " << msg << "\n";
}

// Every run leaves a manifest next to its outputs. Wall-clock duration is
// run metadata, so determinism checks compare data files, not this one.
struct RunRecorder {
  json flags = json::object();
  std::string subcommand;
  fs::path target;  // directory (run_manifest.json inside) or "<file>.run.json"
  std::chrono::steady_clock::time_point started = std::chrono::steady_clock::now();
  std::vector<std::string> outputs;

  void finish(uint64_t seed) const {
    if (target.empty()) return;
    json m;
    m["subcommand"] = subcommand;
    m["flags"] = flags;
    m["config_hash"] = [&] {
      json key{{"subcommand", subcommand}, {"flags", flags}};
      char buf[24];
      std::snprintf(buf, sizeof(buf), "%016llx",
                    static_cast<unsigned long long>(fnv1a64(key.dump())));
      return std::string(buf);
    }();
    m["seed"] = seed;
    m["outputs"] = outputs;
    m["tool_version"] = std::string(kToolVersion);
    m["duration_ms"] = std::chrono::duration_cast<std::chrono::milliseconds>(
                           std::chrono::steady_clock::now() - started)
                           .count();
    fs::path path = fs::is_directory(target) || target.extension().empty()
                        ? target / "run_manifest.json"
                        : fs::path(target.string() + ".run.json");
    write_text_file(path, m.dump(2) + "\n");
  }
};

textprep::StopwordSet stopwords_or_default(const std::string& path) {
  return path.empty() ? textprep::default_stopwords() : textprep::load_stopwords(path);
}

labeling::SponsorHashtagSet tags_from_flag(const std::string& csv) {
  if (csv.empty()) return labeling::SponsorHashtagSet::defaults();
  labeling::SponsorHashtagSet tags;
  for (const std::string& t : split(csv, ',')) {
    if (!t.empty()) tags.tags.insert(lower_ascii(t));
  }
  tags.validate();
  return tags;
}

// ---- model files -------------------------------------------------------

struct LoadedModel {
  std::string kind;
  std::shared_ptr<features::FeaturePipeline> pipeline;
  std::shared_ptr<ml::ForestModel> forest;
  std::shared_ptr<ml::ContextualModel> contextual;
  json train_settings;  // hyperparameters for fold re-training
};

LoadedModel load_model_file(const fs::path& path) {
  json j = json::parse(read_text_file(path), nullptr, false);
  if (j.is_discarded() || !j.contains("kind") || !j.contains("pipeline")) {
    throw DataError("invalid model file: " + path.string());
  }
  LoadedModel m;
  m.kind = j.at("kind").get<std::string>();
  m.pipeline = std::make_shared<features::FeaturePipeline>(
      features::FeaturePipeline::from_json_string(j.at("pipeline").dump()));
  if (m.kind == "forest") {
    m.forest = std::make_shared<ml::ForestModel>(
        ml::ForestModel::from_json_string(j.at("model").dump()));
  } else if (m.kind == "contextual") {
    m.contextual = std::make_shared<ml::ContextualModel>(
        ml::ContextualModel::from_json_string(j.at("model").dump()));
  } else {
    throw DataError("unknown model kind '" + m.kind + "'");
  }
  if (j.contains("train_settings")) m.train_settings = j.at("train_settings");
  return m;
}

double score_example(const LoadedModel& m, const sampling::LabeledExample& e) {
  features::FeatureVector fv = m.pipeline->raw_features(e.post, e.profile);
  features::NumericVector numeric = m.pipeline->standardized_numeric(fv);
  if (m.forest) {
    std::vector<double> row = features::forest_row(fv.text_sequence, numeric);
    return ml::predict_forest(*m.forest, row);
  }
  return m.contextual->forward(fv.text_sequence, numeric);
}

// ---- shared flag bundles ------------------------------------------------

struct TrainFlags {
  std::string model = "contextual";
  std::string input;
  std::string split;
  std::string out;
  std::string stopwords_path;
  std::string sponsor_tags_csv;
  uint64_t seed = 0;
  bool no_scrub = false;
  bool no_biography = false;
  size_t vocab_size = 5000;
  size_t max_len = 60;
  // contextual
  size_t embed_dim = 32;
  size_t hidden = 64;
  size_t dense1 = 128;
  size_t dense2 = 64;
  int epochs = 15;
  int batch_size = 32;
  double learning_rate = 0.05;
  double momentum = 0.9;
  double init_scale = 0.08;
  int threads = 0;
  // forest
  int trees = 100;
  int max_depth = 12;
};

features::PipelineOptions pipeline_options_from(const TrainFlags& f) {
  features::PipelineOptions opt;
  opt.vocab_size = f.vocab_size;
  opt.max_len = f.max_len;
  opt.extract.scrub_sponsor_hashtags = !f.no_scrub;
  opt.extract.include_biography = !f.no_biography;
  opt.extract.sponsor_tags = tags_from_flag(f.sponsor_tags_csv);
  return opt;
}

void run_train(const TrainFlags& f) {
  RunRecorder run;
  run.subcommand = "train";
  run.target = f.out;
  run.flags = {{"model", f.model},       {"input", f.input},     {"split", f.split},
               {"out", f.out},           {"seed", f.seed},       {"no_scrub", f.no_scrub},
               {"vocab_size", f.vocab_size}, {"max_len", f.max_len}, {"epochs", f.epochs},
               {"trees", f.trees}};

  ingest::Dataset corpus = ingest::read_dataset_dir(f.input);
  features::PipelineOptions options = pipeline_options_from(f);
  sampling::LabeledSet labeled = sampling::build_labeled_set(corpus, options.extract.sponsor_tags);
  sampling::SplitManifest manifest = sampling::parse_split_manifest(read_text_file(f.split));
  sampling::LabeledSet train_set = sampling::subset_by_ids(labeled, manifest.train_ids);
  log_info("training on " + std::to_string(train_set.examples.size()) + " examples");

  auto pipeline = features::FeaturePipeline::fit(train_set.examples, options,
                                                 stopwords_or_default(f.stopwords_path));
  features::EncodedSet encoded = pipeline.encode(train_set.examples);

  json out;
  out["format_version"] = 1;
  out["kind"] = f.model;
  out["pipeline"] = json::parse(pipeline.to_json_string());

  if (f.model == "forest") {
    ml::ForestParams params;
    params.tree_count = f.trees;
    params.max_depth = f.max_depth;
    params.seed = derive_seed(f.seed, "forest");
    Matrix x = features::forest_matrix(encoded);
    ml::ForestModel model = ml::train_forest(x, encoded.labels, params);
    out["model"] = json::parse(model.to_json_string());
    out["train_settings"] = {{"trees", f.trees}, {"max_depth", f.max_depth}};
  } else if (f.model == "contextual") {
    ml::ContextualConfig cfg;
    cfg.vocab_size = f.vocab_size;
    cfg.embed_dim = f.embed_dim;
    cfg.max_len = f.max_len;
    cfg.hidden_size = f.hidden;
    cfg.dense1_size = f.dense1;
    cfg.dense2_size = f.dense2;
    ml::TrainConfig tcfg;
    tcfg.epochs = f.epochs;
    tcfg.batch_size = f.batch_size;
    tcfg.learning_rate = f.learning_rate;
    tcfg.momentum = f.momentum;
    tcfg.init_scale = f.init_scale;
    tcfg.seed = derive_seed(f.seed, "contextual");
    tcfg.threads = f.threads;
    ml::ContextualTrainResult result = ml::train_contextual(encoded, cfg, tcfg);
    out["model"] = json::parse(result.model.to_json_string());
    out["train_settings"] = {{"epochs", f.epochs},
                             {"batch_size", f.batch_size},
                             {"learning_rate", f.learning_rate},
                             {"momentum", f.momentum},
                             {"init_scale", f.init_scale},
                             {"embed_dim", f.embed_dim},
                             {"hidden", f.hidden},
                             {"dense1", f.dense1},
                             {"dense2", f.dense2},
                             {"threads", f.threads}};
    write_text_file(f.out + ".loss.csv", ml::loss_trace_to_csv(result.trace));
    run.outputs.push_back(f.out + ".loss.csv");
  } else {
    throw UsageError("unknown --model '" + f.model + "' (expected forest or contextual)");
  }

  write_text_file(f.out, out.dump() + "\n");
  run.outputs.insert(run.outputs.begin(), f.out);
  run.finish(f.seed);
}

// Re-trains the stored configuration on arbitrary fold data.
eval::Trainer make_fold_trainer(const LoadedModel& loaded, uint64_t seed) {
  auto options = loaded.pipeline->options();
  auto stop = loaded.pipeline->stopwords();
  std::string kind = loaded.kind;
  json settings = loaded.train_settings;

  return [options, stop, kind, settings, seed](const sampling::LabeledSet& fold_train) {
    auto pipeline = std::make_shared<features::FeaturePipeline>(
        features::FeaturePipeline::fit(fold_train.examples, options, stop));
    features::EncodedSet encoded = pipeline->encode(fold_train.examples);
    if (kind == "forest") {
      ml::ForestParams params;
      params.tree_count = settings.value("trees", 100);
      params.max_depth = settings.value("max_depth", 12);
      params.seed = derive_seed(seed, "cv-forest");
      auto model = std::make_shared<ml::ForestModel>(
          ml::train_forest(features::forest_matrix(encoded), encoded.labels, params));
      return eval::Predictor([pipeline, model](const sampling::LabeledExample& e) {
        features::FeatureVector fv = pipeline->raw_features(e.post, e.profile);
        return ml::predict_forest(*model,
                                  features::forest_row(fv.text_sequence,
                                                       pipeline->standardized_numeric(fv)));
      });
    }
    ml::ContextualConfig cfg;
    cfg.vocab_size = pipeline->options().vocab_size;
    cfg.max_len = pipeline->options().max_len;
    cfg.embed_dim = settings.value("embed_dim", 32);
    cfg.hidden_size = settings.value("hidden", 64);
    cfg.dense1_size = settings.value("dense1", 128);
    cfg.dense2_size = settings.value("dense2", 64);
    ml::TrainConfig tcfg;
    tcfg.epochs = settings.value("epochs", 15);
    tcfg.batch_size = settings.value("batch_size", 32);
    tcfg.learning_rate = settings.value("learning_rate", 0.05);
    tcfg.momentum = settings.value("momentum", 0.9);
    tcfg.init_scale = settings.value("init_scale", 0.08);
    tcfg.threads = settings.value("threads", 0);
    tcfg.seed = derive_seed(seed, "cv-contextual");
    auto model = std::make_shared<ml::ContextualModel>(
        ml::train_contextual(encoded, cfg, tcfg).model);
    return eval::Predictor([pipeline, model](const sampling::LabeledExample& e) {
      features::FeatureVector fv = pipeline->raw_features(e.post, e.profile);
      return model->forward(fv.text_sequence, pipeline->standardized_numeric(fv));
    });
  };
}

json confusion_to_json(const eval::ConfusionMatrix& cm) {
  return {{"tp", cm.tp}, {"fp", cm.fp}, {"fn", cm.fn}, {"tn", cm.tn}};
}

volatile std::sig_atomic_t g_stop_requested = 0;
void handle_stop_signal(int) { g_stop_requested = 1; }

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"sponsored-content analytics and detection toolkit"};
  app.require_subcommand(1);
  app.fallthrough();  // global flags like --seed may follow the subcommand
  app.set_version_flag("--version", "adlens " + std::string(kToolVersion));
  uint64_t master_seed = 0;
  app.add_option("--seed", master_seed, "master seed threaded through all stages")
      ->capture_default_str();

  // ---- synth ----
  auto* synth_cmd = app.add_subcommand("synth", "generate a labeled synthetic corpus");
  std::string synth_config_path, synth_out;
  synth_cmd->add_option("--config", synth_config_path, "synth config JSON");
  synth_cmd->add_option("--out", synth_out, "output corpus directory")->required();
  synth_cmd->callback([&] {
    RunRecorder run;
    run.subcommand = "synth";
    run.target = synth_out;
    run.flags = {{"config", synth_config_path}, {"out", synth_out}, {"seed", master_seed}};
    synth::SynthConfig config;
    if (!synth_config_path.empty()) {
      config = synth::SynthConfig::from_json_string(read_text_file(synth_config_path));
    }
    if (app.count("--seed") > 0 || synth_config_path.empty()) {
      config.seed = derive_seed(master_seed, "synth");
    }
    synth::SynthResult result = synth::generate_corpus(config);
    fs::create_directories(synth_out);
    synth::write_corpus(result, synth_out);
    write_text_file(fs::path(synth_out) / "synth_config.json", config.to_json_string());
    log_info("wrote " + std::to_string(result.dataset.posts.size()) + " posts, " +
             std::to_string(result.dataset.stories.size()) + " stories");
    run.outputs = {"profiles.jsonl", "posts.jsonl", "stories.jsonl", "manifest.jsonl",
                   "synth_config.json"};
    run.finish(config.seed);
  });

  // ---- serve ----
  auto* serve_cmd = app.add_subcommand("serve", "serve a corpus over the fixture HTTP API");
  std::string serve_input, serve_host = "127.0.0.1", ready_file;
  int serve_port = 8080;
  serve_cmd->add_option("--input", serve_input, "corpus directory")->required();
  serve_cmd->add_option("--host", serve_host, "bind host")->capture_default_str();
  serve_cmd->add_option("--port", serve_port, "bind port (0 = ephemeral)")->capture_default_str();
  serve_cmd->add_option("--ready-file", ready_file,
                        "write 'host port' to this file once listening");
  serve_cmd->callback([&] {
    ingest::FixtureServer server(ingest::read_dataset_dir(serve_input));
    int port = server.start(serve_host, serve_port);
    std::cerr << "serving " << serve_input << " on " << serve_host << ":" << port << "\n";
    if (!ready_file.empty()) {
      write_text_file(ready_file, serve_host + " " + std::to_string(port) + "\n");
    }
    std::signal(SIGINT, handle_stop_signal);
    std::signal(SIGTERM, handle_stop_signal);
    while (g_stop_requested == 0) {
      std::this_thread::sleep_for(std::chrono::milliseconds(100));
    }
    server.stop();
  });

  // ---- crawl ----
  auto* crawl_cmd = app.add_subcommand("crawl", "crawl the fixture API into a corpus directory");
  std::string crawl_server, crawl_tags, crawl_out;
  int crawl_page_size = 20, crawl_max_pages = 1000;
  crawl_cmd->add_option("--server", crawl_server, "host:port of the fixture API")->required();
  crawl_cmd->add_option("--tags", crawl_tags, "comma-separated seed hashtags")->required();
  crawl_cmd->add_option("--page-size", crawl_page_size, "items per page")->capture_default_str();
  crawl_cmd->add_option("--max-pages", crawl_max_pages, "page cap per tag")->capture_default_str();
  crawl_cmd->add_option("--out", crawl_out, "output corpus directory")->required();
  crawl_cmd->callback([&] {
    RunRecorder run;
    run.subcommand = "crawl";
    run.target = crawl_out;
    run.flags = {{"server", crawl_server}, {"tags", crawl_tags},
                 {"page_size", crawl_page_size}, {"max_pages", crawl_max_pages},
                 {"out", crawl_out}};
    auto parts = split(crawl_server, ':');
    if (parts.size() != 2) throw UsageError("--server must be host:port");
    ingest::ClientConfig client;
    client.host = parts[0];
    client.port = std::stoi(parts[1]);
    ingest::CrawlConfig crawl;
    for (const std::string& t : split(crawl_tags, ',')) {
      if (!t.empty()) crawl.seed_hashtags.push_back(lower_ascii(t));
    }
    crawl.page_size = crawl_page_size;
    crawl.max_pages = crawl_max_pages;
    ingest::TimelineResult result = ingest::run_pipeline(client, crawl);
    ingest::write_dataset_dir(result.dataset, crawl_out);
    json skipped;
    skipped["skipped_users"] = result.skipped_users;
    write_text_file(fs::path(crawl_out) / "skipped_users.json", skipped.dump(2) + "\n");
    log_info("crawled " + std::to_string(result.dataset.profiles.size()) + " profiles");
    run.outputs = {"profiles.jsonl", "posts.jsonl", "stories.jsonl", "skipped_users.json"};
    run.finish(master_seed);
  });

  // ---- label ----
  auto* label_cmd = app.add_subcommand("label", "apply the sponsorship labeling rules");
  std::string label_input, label_out, label_tags_csv, label_format = "jsonl";
  label_cmd->add_option("--input", label_input, "corpus directory")->required();
  label_cmd->add_option("--out", label_out, "output directory")->required();
  label_cmd->add_option("--sponsor-tags", label_tags_csv, "override disclosure hashtag set");
  label_cmd->add_option("--format", label_format, "jsonl | csv")->capture_default_str();
  label_cmd->callback([&] {
    RunRecorder run;
    run.subcommand = "label";
    run.target = label_out;
    run.flags = {{"input", label_input}, {"out", label_out}, {"sponsor_tags", label_tags_csv},
                 {"format", label_format}};
    if (label_format != "jsonl" && label_format != "csv") {
      throw UsageError("--format must be jsonl or csv");
    }
    ingest::Dataset ds = ingest::read_dataset_dir(label_input);
    labeling::SponsorHashtagSet tags = tags_from_flag(label_tags_csv);
    bool csv = label_format == "csv";
    std::string posts_out = csv ? "id,label\n" : "";
    std::string stories_out = posts_out;
    for (const Post& p : ds.posts) {
      std::string label(to_string(labeling::label_post(p, tags)));
      if (csv) {
        posts_out += p.id + "," + label + "\n";
      } else {
        posts_out += json{{"id", p.id}, {"label", label}}.dump() + "\n";
      }
    }
    for (const Story& s : ds.stories) {
      std::string label(to_string(labeling::label_story(s)));
      if (csv) {
        stories_out += s.id + "," + label + "\n";
      } else {
        stories_out += json{{"id", s.id}, {"label", label}}.dump() + "\n";
      }
    }
    const std::string ext = csv ? ".csv" : ".jsonl";
    write_text_file(fs::path(label_out) / ("post_labels" + ext), posts_out);
    write_text_file(fs::path(label_out) / ("story_labels" + ext), stories_out);
    run.outputs = {"post_labels" + ext, "story_labels" + ext};
    run.finish(master_seed);
  });

  // ---- tier ----
  auto* tier_cmd = app.add_subcommand("tier", "assign follower-band tiers to profiles");
  std::string tier_input, tier_out, tier_format = "jsonl";
  tier_cmd->add_option("--input", tier_input, "corpus directory")->required();
  tier_cmd->add_option("--out", tier_out, "output tiers file path")->required();
  tier_cmd->add_option("--format", tier_format, "jsonl | csv")->capture_default_str();
  tier_cmd->callback([&] {
    RunRecorder run;
    run.subcommand = "tier";
    run.target = tier_out;
    run.flags = {{"input", tier_input}, {"out", tier_out}, {"format", tier_format}};
    if (tier_format != "jsonl" && tier_format != "csv") {
      throw UsageError("--format must be jsonl or csv");
    }
    ingest::Dataset ds = ingest::read_dataset_dir(tier_input);
    bool csv = tier_format == "csv";
    std::string out = csv ? "username,tier,follower_count\n" : "";
    for (const auto& [name, profile] : ds.profiles) {
      std::string tier(to_string(labeling::assign_tier(profile)));
      if (csv) {
        out += name + "," + tier + "," + std::to_string(profile.follower_count) + "\n";
      } else {
        out += json{{"username", name},
                    {"tier", tier},
                    {"follower_count", profile.follower_count}}
                   .dump() +
               "\n";
      }
    }
    write_text_file(tier_out, out);
    run.outputs = {tier_out};
    run.finish(master_seed);
  });

  // ---- analyze ----
  auto* analyze_cmd = app.add_subcommand("analyze", "emit engagement analytics CSV reports");
  std::string analyze_input, analyze_out, analyze_tags_csv;
  analyze_cmd->add_option("--input", analyze_input, "corpus directory")->required();
  analyze_cmd->add_option("--out", analyze_out, "output directory")->required();
  analyze_cmd->add_option("--sponsor-tags", analyze_tags_csv, "override disclosure hashtag set");
  analyze_cmd->callback([&] {
    RunRecorder run;
    run.subcommand = "analyze";
    run.target = analyze_out;
    run.flags = {{"input", analyze_input}, {"out", analyze_out}};
    ingest::Dataset ds = ingest::read_dataset_dir(analyze_input);
    labeling::label_dataset_posts(ds.posts, tags_from_flag(analyze_tags_csv));
    analytics::write_reports_csv(ds, analyze_out);
    run.outputs = {"cdf_followers.csv", "comments_abs.csv", "comments_norm.csv",
                   "likes_abs.csv",     "likes_norm.csv",   "latency.csv",
                   "repeaters.csv",     "share.csv",        "categories.csv",
                   "diagnostics.json"};
    run.finish(master_seed);
  });

  // ---- featurize ----
  auto* feat_cmd = app.add_subcommand("featurize", "export feature matrices for inspection");
  std::string feat_input, feat_out, feat_stopwords, feat_tags_csv;
  size_t feat_vocab = 5000, feat_max_len = 60;
  bool feat_no_scrub = false;
  feat_cmd->add_option("--input", feat_input, "corpus directory")->required();
  feat_cmd->add_option("--out", feat_out, "output directory")->required();
  feat_cmd->add_option("--vocab-size", feat_vocab, "vocabulary size cap")->capture_default_str();
  feat_cmd->add_option("--max-len", feat_max_len, "sequence length")->capture_default_str();
  feat_cmd->add_option("--stopwords", feat_stopwords, "stopword file override");
  feat_cmd->add_option("--sponsor-tags", feat_tags_csv, "override disclosure hashtag set");
  feat_cmd->add_flag("--no-scrub", feat_no_scrub, "keep disclosure hashtags in features");
  feat_cmd->callback([&] {
    RunRecorder run;
    run.subcommand = "featurize";
    run.target = feat_out;
    run.flags = {{"input", feat_input}, {"out", feat_out}, {"vocab_size", feat_vocab},
                 {"max_len", feat_max_len}, {"no_scrub", feat_no_scrub}};
    ingest::Dataset ds = ingest::read_dataset_dir(feat_input);
    features::PipelineOptions options;
    options.vocab_size = feat_vocab;
    options.max_len = feat_max_len;
    options.extract.scrub_sponsor_hashtags = !feat_no_scrub;
    options.extract.sponsor_tags = tags_from_flag(feat_tags_csv);
    sampling::LabeledSet labeled = sampling::build_labeled_set(ds, options.extract.sponsor_tags);
    auto pipeline = features::FeaturePipeline::fit(labeled.examples, options,
                                                   stopwords_or_default(feat_stopwords));
    features::EncodedSet encoded = pipeline.encode(labeled.examples);

    write_text_file(fs::path(feat_out) / "vocab.json", pipeline.vocab().to_json_string() + "\n");
    write_text_file(fs::path(feat_out) / "scaler.json",
                    pipeline.standardizer().to_json_string() + "\n");
    std::string csv = "id,label";
    for (auto name : features::kNumericFeatureNames) csv += "," + std::string(name);
    csv += "\n";
    std::string seq_lines;
    for (size_t i = 0; i < labeled.examples.size(); ++i) {
      const auto& e = labeled.examples[i];
      features::FeatureVector fv = pipeline.raw_features(e.post, e.profile);
      csv += e.post.id + "," + std::to_string(e.label);
      for (double v : fv.numeric) csv += "," + format_double(v);
      csv += "\n";
      json j{{"id", e.post.id}, {"sequence", fv.text_sequence}};
      seq_lines += j.dump();
      seq_lines += '\n';
    }
    write_text_file(fs::path(feat_out) / "numeric.csv", csv);
    write_text_file(fs::path(feat_out) / "sequences.jsonl", seq_lines);
    run.outputs = {"vocab.json", "scaler.json", "numeric.csv", "sequences.jsonl"};
    run.finish(master_seed);
  });

  // ---- split ----
  auto* split_cmd = app.add_subcommand("split", "balance and split a labeled corpus");
  std::string split_input, split_out, split_tags_csv;
  double split_test_fraction = 0.2;
  bool split_no_balance = false;
  split_cmd->add_option("--input", split_input, "corpus directory")->required();
  split_cmd->add_option("--out", split_out, "output split manifest path")->required();
  split_cmd->add_option("--test-fraction", split_test_fraction, "held-out fraction")
      ->capture_default_str();
  split_cmd->add_flag("--no-balance", split_no_balance, "skip random under-sampling");
  split_cmd->add_option("--sponsor-tags", split_tags_csv, "override disclosure hashtag set");
  split_cmd->callback([&] {
    RunRecorder run;
    run.subcommand = "split";
    run.target = split_out;
    run.flags = {{"input", split_input}, {"out", split_out},
                 {"test_fraction", split_test_fraction}, {"no_balance", split_no_balance},
                 {"seed", master_seed}};
    ingest::Dataset ds = ingest::read_dataset_dir(split_input);
    sampling::LabeledSet labeled =
        sampling::build_labeled_set(ds, tags_from_flag(split_tags_csv));
    if (!split_no_balance) {
      labeled = sampling::undersample_balance(labeled, derive_seed(master_seed, "balance"));
    }
    auto [train, test] =
        sampling::split_train_test(labeled, split_test_fraction, derive_seed(master_seed, "split"));
    write_text_file(split_out, sampling::split_manifest_to_json(train, test, master_seed));
    log_info("split " + std::to_string(train.examples.size()) + " train / " +
             std::to_string(test.examples.size()) + " test");
    run.outputs = {split_out};
    run.finish(master_seed);
  });

  // ---- train ----
  auto* train_cmd = app.add_subcommand("train", "train a classifier on the train split");
  TrainFlags tf;
  train_cmd->add_option("--model", tf.model, "forest | contextual")->capture_default_str();
  train_cmd->add_option("--input", tf.input, "corpus directory")->required();
  train_cmd->add_option("--split", tf.split, "split manifest path")->required();
  train_cmd->add_option("--out", tf.out, "output model path")->required();
  train_cmd->add_option("--stopwords", tf.stopwords_path, "stopword file override");
  train_cmd->add_option("--sponsor-tags", tf.sponsor_tags_csv, "override disclosure hashtag set");
  train_cmd->add_flag("--no-scrub", tf.no_scrub, "keep disclosure hashtags in features");
  train_cmd->add_flag("--no-biography", tf.no_biography, "exclude biography text channel");
  train_cmd->add_option("--vocab-size", tf.vocab_size)->capture_default_str();
  train_cmd->add_option("--max-len", tf.max_len)->capture_default_str();
  train_cmd->add_option("--embed-dim", tf.embed_dim)->capture_default_str();
  train_cmd->add_option("--hidden", tf.hidden)->capture_default_str();
  train_cmd->add_option("--dense1", tf.dense1)->capture_default_str();
  train_cmd->add_option("--dense2", tf.dense2)->capture_default_str();
  train_cmd->add_option("--epochs", tf.epochs)->capture_default_str();
  train_cmd->add_option("--batch", tf.batch_size)->capture_default_str();
  train_cmd->add_option("--lr", tf.learning_rate)->capture_default_str();
  train_cmd->add_option("--momentum", tf.momentum)->capture_default_str();
  train_cmd->add_option("--init-scale", tf.init_scale)->capture_default_str();
  train_cmd->add_option("--threads", tf.threads)->capture_default_str();
  train_cmd->add_option("--trees", tf.trees)->capture_default_str();
  train_cmd->add_option("--max-depth", tf.max_depth)->capture_default_str();
  train_cmd->callback([&] {
    tf.seed = master_seed;
    run_train(tf);
  });

  // ---- eval ----
  auto* eval_cmd = app.add_subcommand("eval", "evaluate a model on the test split");
  std::string eval_model, eval_input, eval_split, eval_out;
  double eval_threshold = 0.5;
  int eval_folds = 0;
  eval_cmd->add_option("--model", eval_model, "model file")->required();
  eval_cmd->add_option("--input", eval_input, "corpus directory")->required();
  eval_cmd->add_option("--split", eval_split, "split manifest path")->required();
  eval_cmd->add_option("--out", eval_out, "output metrics JSON path")->required();
  eval_cmd->add_option("--threshold", eval_threshold, "decision threshold")
      ->capture_default_str();
  eval_cmd->add_option("--folds", eval_folds, "also run k-fold cross-validation (0 = off)")
      ->capture_default_str();
  eval_cmd->callback([&] {
    RunRecorder run;
    run.subcommand = "eval";
    run.target = eval_out;
    run.flags = {{"model", eval_model}, {"input", eval_input}, {"split", eval_split},
                 {"out", eval_out}, {"threshold", eval_threshold}, {"folds", eval_folds},
                 {"seed", master_seed}};
    LoadedModel loaded = load_model_file(eval_model);
    ingest::Dataset ds = ingest::read_dataset_dir(eval_input);
    sampling::LabeledSet labeled =
        sampling::build_labeled_set(ds, loaded.pipeline->options().extract.sponsor_tags);
    sampling::SplitManifest manifest = sampling::parse_split_manifest(read_text_file(eval_split));
    sampling::LabeledSet test_set = sampling::subset_by_ids(labeled, manifest.test_ids);

    eval::Predictor predictor = [&loaded](const sampling::LabeledExample& e) {
      return score_example(loaded, e);
    };
    eval::ConfusionMatrix cm = eval::evaluate(predictor, test_set, eval_threshold);
    eval::Metrics held_out = eval::compute_metrics(cm);

    json out;
    out["model"] = loaded.kind;
    out["threshold"] = eval_threshold;
    out["held_out"] = {{"confusion", confusion_to_json(cm)},
                       {"metrics", json::parse(eval::metrics_to_json(held_out))},
                       {"test_size", test_set.examples.size()}};

    std::vector<std::pair<std::string, eval::Metrics>> table_rows{{loaded.kind, held_out}};
    if (eval_folds > 0) {
      std::set<std::string> union_ids = manifest.train_ids;
      union_ids.insert(manifest.test_ids.begin(), manifest.test_ids.end());
      sampling::LabeledSet cv_set = sampling::subset_by_ids(labeled, union_ids);
      eval::CrossValResult cv =
          eval::cross_validate(make_fold_trainer(loaded, master_seed), cv_set, eval_folds,
                               derive_seed(master_seed, "cv-folds"), eval_threshold);
      json folds = json::array();
      for (const auto& fold : cv.folds) {
        folds.push_back({{"confusion", confusion_to_json(fold.confusion)},
                         {"metrics", json::parse(eval::metrics_to_json(fold.metrics))},
                         {"test_size", fold.test_size}});
      }
      out["cv"] = {{"k", eval_folds},
                   {"folds", std::move(folds)},
                   {"mean", json::parse(eval::metrics_to_json(cv.mean))},
                   {"std", json::parse(eval::metrics_to_json(cv.stddev))}};
      table_rows.push_back({loaded.kind + " (cv mean)", cv.mean});
    }

    write_text_file(eval_out, out.dump(2) + "\n");
    std::cout << eval::format_metrics_table(table_rows);
    run.outputs = {eval_out};
    run.finish(master_seed);
  });

  // ---- detect-hidden ----
  auto* detect_cmd =
      app.add_subcommand("detect-hidden", "audit undeclared posts for likely sponsorship");
  std::string detect_model, detect_input, detect_out, detect_manifest, detect_exclude;
  double detect_threshold = 0.5;
  detect_cmd->add_option("--model", detect_model, "model file")->required();
  detect_cmd->add_option("--input", detect_input, "corpus directory")->required();
  detect_cmd->add_option("--out", detect_out, "output report JSON path")->required();
  detect_cmd->add_option("--threshold", detect_threshold, "flagging threshold")
      ->capture_default_str();
  detect_cmd->add_option("--manifest", detect_manifest,
                         "ground-truth manifest.jsonl for plant recall");
  detect_cmd->add_option("--exclude-ids", detect_exclude,
                         "split manifest whose train+test posts are left out of the audit");
  detect_cmd->callback([&] {
    RunRecorder run;
    run.subcommand = "detect-hidden";
    run.target = detect_out;
    run.flags = {{"model", detect_model}, {"input", detect_input}, {"out", detect_out},
                 {"threshold", detect_threshold}, {"manifest", detect_manifest},
                 {"exclude_ids", detect_exclude}};
    LoadedModel loaded = load_model_file(detect_model);
    ingest::Dataset ds = ingest::read_dataset_dir(detect_input);
    const auto& tags = loaded.pipeline->options().extract.sponsor_tags;

    std::set<std::string> excluded;
    if (!detect_exclude.empty()) {
      sampling::SplitManifest m = sampling::parse_split_manifest(read_text_file(detect_exclude));
      excluded = m.train_ids;
      excluded.insert(m.test_ids.begin(), m.test_ids.end());
    }

    std::vector<eval::HiddenCandidate> candidates;
    for (const Post& p : ds.posts) {
      if (labeling::label_post(p, tags) == SponsorLabel::Sponsored) continue;
      if (excluded.contains(p.id)) continue;
      const Profile* profile = ds.find_profile(p.author);
      features::FeatureVector fv = loaded.pipeline->raw_features(p, *profile);
      features::NumericVector numeric = loaded.pipeline->standardized_numeric(fv);
      eval::HiddenCandidate c;
      c.id = p.id;
      c.tier = labeling::assign_tier(*profile);
      c.sequence = std::move(fv.text_sequence);
      c.numeric.assign(numeric.begin(), numeric.end());
      candidates.push_back(std::move(c));
    }

    auto score = [&loaded](const eval::HiddenCandidate& c) {
      if (loaded.forest) {
        return ml::predict_forest(*loaded.forest, features::forest_row(c.sequence, c.numeric));
      }
      return loaded.contextual->forward(c.sequence, c.numeric);
    };
    eval::HiddenAuditReport report = eval::detect_hidden(score, candidates, detect_threshold);

    json out = json::parse(report.to_json_string());
    if (!detect_manifest.empty()) {
      // Recall over plants that are actually in the audit population.
      std::set<std::string> plants;
      for (const auto& entry : synth::read_manifest(detect_manifest)) {
        if (entry.status == synth::TrueStatus::Hidden && !excluded.contains(entry.post_id)) {
          plants.insert(entry.post_id);
        }
      }
      size_t caught = 0;
      for (const std::string& id : report.flagged_ids) {
        if (plants.contains(id)) ++caught;
      }
      out["plants_audited"] = plants.size();
      out["plants_flagged"] = caught;
      out["plant_recall"] =
          plants.empty() ? nullptr
                         : json(static_cast<double>(caught) / static_cast<double>(plants.size()));
    }
    write_text_file(detect_out, out.dump(2) + "\n");
    run.outputs = {detect_out};
    run.finish(master_seed);
  });

  // ---- report ----
  auto* report_cmd = app.add_subcommand("report", "format metrics files as an aligned table");
  std::vector<std::string> report_inputs;
  std::string report_out;
  report_cmd->add_option("--metrics", report_inputs, "metrics JSON file(s) from eval")
      ->required()
      ->expected(-1);
  report_cmd->add_option("--out", report_out, "output table path (also printed)");
  report_cmd->callback([&] {
    std::vector<std::pair<std::string, eval::Metrics>> rows;
    auto parse_metrics = [](const json& j) {
      eval::Metrics m;
      auto opt = [&](const char* key) -> std::optional<double> {
        if (!j.contains(key) || j.at(key).is_null()) return std::nullopt;
        return j.at(key).get<double>();
      };
      m.accuracy = opt("accuracy");
      m.precision = opt("precision");
      m.recall = opt("recall");
      m.f1 = opt("f1");
      return m;
    };
    for (const std::string& path : report_inputs) {
      json j = json::parse(read_text_file(path), nullptr, false);
      if (j.is_discarded()) throw DataError("invalid metrics JSON: " + path);
      std::string name = j.value("model", fs::path(path).stem().string());
      rows.push_back({name, parse_metrics(j.at("held_out").at("metrics"))});
      if (j.contains("cv")) {
        rows.push_back({name + " (cv mean)", parse_metrics(j.at("cv").at("mean"))});
      }
    }
    std::string table = eval::format_metrics_table(rows);
    std::cout << table;
    if (!report_out.empty()) write_text_file(report_out, table);
  });

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int code = app.exit(e);
    return code == 0 ? 0 : 1;
  } catch (const UsageError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
  log_debug("done");
  return 0;
}
