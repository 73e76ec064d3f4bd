// SPDX-License-Identifier: Apache-2.0
#include "score/cli.hpp"

#include <filesystem>
#include <iostream>
#include <memory>
#include <set>

#include <CLI11.hpp>

#include "score/config.hpp"
#include "score/eval.hpp"
#include "score/io.hpp"

namespace score::cli {

namespace fs = std::filesystem;

namespace {

/// Flags shared by every subcommand.
struct CommonArgs {
    std::string config_path;
    std::vector<std::string> overrides;  // key=value
    std::int64_t seed = -1;              // -1 = not given
    std::string out;
    std::int64_t history_end = -1;  // -1 = use split.train_end when present
};

void add_common_flags(CLI::App* cmd, CommonArgs* common) {
    cmd->add_option("--config", common->config_path, "Config file (TOML subset)");
    cmd->add_option("--set", common->overrides, "Override a config key, e.g. --set params.k_s=0")
        ->take_all();
    cmd->add_option("--seed", common->seed, "Random seed (overrides config)");
    cmd->add_option("--out", common->out, "Output path");
    cmd->add_option("--history-end", common->history_end,
                    "Clamp user histories to this timestamp (defaults to split.train_end)");
}

RunConfig effective_config(const CommonArgs& common) {
    KvConfig kv;
    if (!common.config_path.empty()) kv = KvConfig::parse_file(common.config_path);
    for (const std::string& kvpair : common.overrides) {
        const std::size_t eq = kvpair.find('=');
        if (eq == std::string::npos || eq == 0)
            throw ConfigError("--set expects key=value, got '" + kvpair + "'");
        kv.set(kvpair.substr(0, eq), kvpair.substr(eq + 1));
    }
    if (common.seed >= 0) kv.set("seed", std::to_string(common.seed));
    RunConfig cfg = RunConfig::from(kv);
    cfg.validate();
    return cfg;
}

fs::path workpath(const RunConfig& cfg, const std::string& name) {
    return fs::path(cfg.workdir) / name;
}

Corpus load_corpus_arg(const std::string& corpus_dir, const RunConfig& cfg) {
    const fs::path dir = corpus_dir.empty() ? workpath(cfg, "corpus") : fs::path(corpus_dir);
    if (!fs::exists(dir / "interactions.tsv"))
        throw IoError("missing corpus at " + dir.string() +
                      " (expected interactions.tsv); run ingest first");
    return Corpus::load(dir);
}

/// History view used by retrieval, prompts and training texts: clamp to
/// --history-end, else to split.train_end, else use the full corpus.
Corpus history_view(const Corpus& corpus, const CommonArgs& common, const RunConfig& cfg) {
    if (common.history_end >= 0) return corpus.restricted(common.history_end);
    if (cfg.train_end) return corpus.restricted(*cfg.train_end);
    return corpus;
}

struct Providers {
    std::unique_ptr<EmbedProvider> embedder;
    std::unique_ptr<LlmProvider> llm;
};

Providers make_providers(const RunConfig& cfg, const Corpus& corpus) {
    Providers p;
    if (cfg.provider == ProviderKind::Stub) {
        p.embedder = std::make_unique<HashEmbedProvider>(cfg.embed_dim);
        p.llm = std::make_unique<StubLlmProvider>(StubLlmProvider::title_tags(corpus));
    } else {
        p.embedder = std::make_unique<RemoteEmbedProvider>(cfg.embed_endpoint, cfg.embed_dim);
        p.llm = std::make_unique<RemoteLlmProvider>(cfg.llm_endpoint, cfg.llm_model);
    }
    return p;
}

// ---------------------------------------------------------------------------
// Subcommand bodies
// ---------------------------------------------------------------------------

int cmd_ingest(const CommonArgs& common, const std::string& interactions,
               const std::string& metadata) {
    const RunConfig cfg = effective_config(common);
    const std::string inter = interactions.empty() ? cfg.interactions : interactions;
    const std::string meta = metadata.empty() ? cfg.metadata : metadata;
    if (inter.empty()) throw ConfigError("paths.interactions not set");
    if (meta.empty()) throw ConfigError("paths.metadata not set");
    if (!fs::exists(inter)) throw IoError("missing input file: " + inter);
    if (!fs::exists(meta)) throw IoError("missing input file: " + meta);

    IngestOptions opts;
    opts.binarize_threshold = cfg.binarize_threshold;
    opts.window_start = cfg.window_start;
    opts.min_interactions = cfg.min_interactions;
    const Corpus corpus = ingest(inter, meta, opts);

    const fs::path out = common.out.empty() ? workpath(cfg, "corpus") : fs::path(common.out);
    corpus.save(out);
    std::cout << "corpus: users=" << corpus.n_users() << " items=" << corpus.n_items()
              << " interactions=" << corpus.n_interactions() << "\n"
              << "written to " << out.string() << "\n";
    return 0;
}

int cmd_split(const CommonArgs& common, const std::string& corpus_dir, std::int64_t train_end,
              std::int64_t val_end) {
    const RunConfig cfg = effective_config(common);
    const Corpus corpus = load_corpus_arg(corpus_dir, cfg);
    SplitSpec spec;
    spec.train_end = train_end != -1 ? train_end : cfg.train_end.value_or(-1);
    spec.val_end = val_end != -1 ? val_end : cfg.val_end.value_or(-1);
    if (spec.train_end == -1) throw ConfigError("train_end not set");
    if (spec.val_end == -1) throw ConfigError("val_end not set");

    const Splits splits = temporal_split(corpus, spec);
    const fs::path out = common.out.empty() ? workpath(cfg, "splits") : fs::path(common.out);
    fs::create_directories(out);
    save_pairs(out / "train.tsv", corpus, splits.train);
    save_pairs(out / "val.tsv", corpus, splits.val);
    save_pairs(out / "test.tsv", corpus, splits.test);
    std::cout << "split: train=" << splits.train.size() << " val=" << splits.val.size()
              << " test=" << splits.test.size() << "\n"
              << "written to " << out.string() << "\n";
    return 0;
}

int cmd_train_crm(const CommonArgs& common, const std::string& corpus_dir,
                  const std::string& pairs_path) {
    const RunConfig cfg = effective_config(common);
    const Corpus corpus = load_corpus_arg(corpus_dir, cfg);
    const fs::path pairs_file =
        pairs_path.empty() ? workpath(cfg, "splits") / "train.tsv" : fs::path(pairs_path);
    if (!fs::exists(pairs_file)) throw IoError("missing input file: " + pairs_file.string());
    const auto train = load_pairs(pairs_file, corpus);

    CrmConfig crm_cfg;
    crm_cfg.d = cfg.d;
    crm_cfg.epochs = cfg.crm_epochs;
    crm_cfg.lr = cfg.crm_lr;
    crm_cfg.l2 = cfg.crm_l2;
    crm_cfg.seed = cfg.seed;
    crm_cfg.mode = cfg.crm_mode;
    std::vector<double> losses;
    const CrmModel model =
        train_bpr_mf(train, corpus.n_users(), corpus.n_items(), crm_cfg, &losses);

    const fs::path out = common.out.empty() ? workpath(cfg, "crm.bin") : fs::path(common.out);
    model.save(out);
    std::cout << "crm: d=" << crm_cfg.d << " epochs=" << crm_cfg.epochs;
    if (!losses.empty()) std::cout << " final_loss=" << losses.back();
    std::cout << "\nwritten to " << out.string() << "\n";
    return 0;
}

int cmd_train_car(const CommonArgs& common, const std::string& corpus_dir,
                  const std::string& crm_path) {
    const RunConfig cfg = effective_config(common);
    const Corpus full = load_corpus_arg(corpus_dir, cfg);
    const Corpus corpus = history_view(full, common, cfg);
    const fs::path crm_file =
        crm_path.empty() ? workpath(cfg, "crm.bin") : fs::path(crm_path);
    if (!fs::exists(crm_file)) throw IoError("missing input file: " + crm_file.string());
    const CrmModel model = CrmModel::load(crm_file, cfg.seed, cfg.crm_mode);

    const TrainingPairSet pairs = build_training_pairs(corpus, model, cfg.k_c);
    std::cout << "training pairs: " << pairs.entries.size() << " anchors, "
              << pairs.skipped_anchors << " skipped\n";

    const auto providers = make_providers(cfg, corpus);
    CarTrainConfig car_cfg;
    car_cfg.tau = cfg.tau_car;
    car_cfg.epochs = cfg.car_epochs;
    car_cfg.lr = cfg.car_lr;
    car_cfg.batch_size = cfg.batch_size;
    car_cfg.seed = cfg.seed;
    car_cfg.max_items = cfg.max_items;
    AdapterTrainInfo info;
    const Adapter adapter =
        train_car_adapter(pairs, corpus, *providers.embedder, car_cfg, &info);

    const fs::path out = common.out.empty() ? workpath(cfg, "car.bin") : fs::path(common.out);
    save_adapter(adapter, out, kCarAdapterMagic);
    std::cout << "car: initial_loss=" << info.initial_loss << " final_loss=" << info.final_loss
              << "\nwritten to " << out.string() << "\n";
    return 0;
}

int cmd_index(const CommonArgs& common, const std::string& corpus_dir,
              const std::string& car_path) {
    const RunConfig cfg = effective_config(common);
    const Corpus full = load_corpus_arg(corpus_dir, cfg);
    const Corpus corpus = history_view(full, common, cfg);
    const fs::path car_file = car_path.empty() ? workpath(cfg, "car.bin") : fs::path(car_path);
    if (!fs::exists(car_file)) throw IoError("missing input file: " + car_file.string());
    const Adapter adapter = load_adapter(car_file, kCarAdapterMagic);

    const auto providers = make_providers(cfg, corpus);
    const BehaviorIndex index =
        build_behavior_index(corpus, adapter, *providers.embedder, cfg.max_items);

    const fs::path out = common.out.empty() ? workpath(cfg, "index.bin") : fs::path(common.out);
    save_index(index, out);
    std::cout << "index: " << index.ids.size() << " users\nwritten to " << out.string() << "\n";
    return 0;
}

int cmd_assess(const CommonArgs& common, const std::string& corpus_dir,
               const std::string& pairs_path) {
    const RunConfig cfg = effective_config(common);
    const Corpus full = load_corpus_arg(corpus_dir, cfg);
    const Corpus corpus = history_view(full, common, cfg);
    const fs::path pairs_file =
        pairs_path.empty() ? workpath(cfg, "splits") / "train.tsv" : fs::path(pairs_path);
    if (!fs::exists(pairs_file)) throw IoError("missing input file: " + pairs_file.string());
    const auto pool = load_pairs(pairs_file, corpus);
    if (pool.empty()) throw DomainError("no pairs to assess");

    // Seeded uniform sample without replacement, deduplicated by pair.
    std::vector<std::size_t> order(pool.size());
    for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
    Rng rng(cfg.seed ^ 0xa55e55ULL);
    rng.shuffle(order);
    std::vector<std::pair<int, int>> sample;
    std::set<std::pair<int, int>> seen;
    for (std::size_t i : order) {
        if (static_cast<int>(sample.size()) >= cfg.assess_sample) break;
        const auto key = std::make_pair(pool[i].user, pool[i].item);
        if (seen.insert(key).second) sample.push_back(key);
    }

    const auto providers = make_providers(cfg, corpus);
    const AssessmentBatch batch = generate_assessments(*providers.llm, corpus, sample,
                                                       *providers.embedder, cfg.max_items);

    const fs::path out =
        common.out.empty() ? workpath(cfg, "assessments.jsonl") : fs::path(common.out);
    save_assessments(out, batch.records);
    std::cout << "assessments: " << batch.records.size() << " records, " << batch.skipped
              << " skipped\nwritten to " << out.string() << "\n";
    return 0;
}

int cmd_train_sare(const CommonArgs& common, const std::string& corpus_dir,
                   const std::string& assessments_path, const std::string& car_path,
                   const std::string& index_path) {
    const RunConfig cfg = effective_config(common);
    const Corpus full = load_corpus_arg(corpus_dir, cfg);
    const Corpus corpus = history_view(full, common, cfg);

    const fs::path assess_file = assessments_path.empty() ? workpath(cfg, "assessments.jsonl")
                                                          : fs::path(assessments_path);
    const fs::path car_file = car_path.empty() ? workpath(cfg, "car.bin") : fs::path(car_path);
    const fs::path index_file =
        index_path.empty() ? workpath(cfg, "index.bin") : fs::path(index_path);
    for (const fs::path& p : {assess_file, car_file, index_file})
        if (!fs::exists(p)) throw IoError("missing input file: " + p.string());

    const auto assessments = load_assessments(assess_file);
    const Adapter car_adapter = load_adapter(car_file, kCarAdapterMagic);
    const BehaviorIndex index = load_index(index_file);
    const auto providers = make_providers(cfg, corpus);

    // Reasoning-aligned rankings: retrieve K_e candidates per assessed
    // pair, then order them by alignment with the assessment embedding.
    std::vector<OrderedCandidateSet> rankings;
    std::size_t skipped = 0;
    for (const auto& rec : assessments) {
        const auto u = corpus.user_index(rec.user);
        if (!u || corpus.positives(*u).empty() || rec.embedding.zero) {
            ++skipped;
            continue;
        }
        const auto base = providers.embedder->embed({behavior_text(corpus, *u, cfg.max_items)});
        if (base.size() != 1 || base.front().zero) {
            ++skipped;
            continue;
        }
        const EmbeddingVector query = adapter_embed(car_adapter, base.front());
        const auto candidates = retrieve(index, query, cfg.k_e, rec.user);
        if (candidates.size() <= static_cast<std::size_t>(cfg.rank_threshold)) {
            ++skipped;  // no negative tail to sample from
            continue;
        }
        std::vector<std::pair<std::string, std::string>> texts;
        texts.reserve(candidates.size());
        for (const auto& [id, score_] : candidates) {
            const auto idx = corpus.user_index(id);
            if (!idx) throw DomainError("index references unknown user " + id);
            texts.emplace_back(id, behavior_text(corpus, *idx, cfg.max_items));
        }
        rankings.push_back(ranking_from_assessment(rec, texts, *providers.embedder));
    }
    if (skipped) std::cout << "rankings: skipped " << skipped << " assessments\n";
    if (rankings.empty()) throw DomainError("no usable rankings for reranker training");

    SareTrainConfig sare_cfg;
    sare_cfg.tau = cfg.tau_sare;
    sare_cfg.epochs = cfg.sare_epochs;
    sare_cfg.lr = cfg.sare_lr;
    sare_cfg.seed = cfg.seed;
    sare_cfg.max_items = cfg.max_items;
    sare_cfg.rank_threshold = cfg.rank_threshold;
    sare_cfg.neg_count = cfg.neg_count;
    AdapterTrainInfo info;
    const Adapter adapter =
        train_sare_adapter(rankings, corpus, *providers.embedder, sare_cfg, &info);

    const fs::path out = common.out.empty() ? workpath(cfg, "sare.bin") : fs::path(common.out);
    save_adapter(adapter, out, kSareAdapterMagic);
    std::cout << "sare: instances=" << info.instances << " initial_loss=" << info.initial_loss
              << " final_loss=" << info.final_loss << "\nwritten to " << out.string() << "\n";
    return 0;
}

struct LoadedArtifacts {
    Adapter car_adapter;
    BehaviorIndex index;
    Adapter sare_adapter;
};

LoadedArtifacts load_artifacts(const RunConfig& cfg, const std::string& car_path,
                               const std::string& index_path, const std::string& sare_path) {
    const fs::path car_file = car_path.empty() ? workpath(cfg, "car.bin") : fs::path(car_path);
    const fs::path index_file =
        index_path.empty() ? workpath(cfg, "index.bin") : fs::path(index_path);
    const fs::path sare_file =
        sare_path.empty() ? workpath(cfg, "sare.bin") : fs::path(sare_path);
    for (const fs::path& p : {car_file, index_file, sare_file})
        if (!fs::exists(p)) throw IoError("missing input file: " + p.string());
    return LoadedArtifacts{load_adapter(car_file, kCarAdapterMagic), load_index(index_file),
                           load_adapter(sare_file, kSareAdapterMagic)};
}

int cmd_predict(const CommonArgs& common, const std::string& corpus_dir,
                const std::string& pairs_path, const std::string& car_path,
                const std::string& index_path, const std::string& sare_path) {
    const RunConfig cfg = effective_config(common);
    const Corpus full = load_corpus_arg(corpus_dir, cfg);
    const Corpus corpus = history_view(full, common, cfg);
    const fs::path pairs_file =
        pairs_path.empty() ? workpath(cfg, "splits") / "test.tsv" : fs::path(pairs_path);
    if (!fs::exists(pairs_file)) throw IoError("missing input file: " + pairs_file.string());
    const auto pairs = load_pairs(pairs_file, corpus);

    const LoadedArtifacts loaded = load_artifacts(cfg, car_path, index_path, sare_path);
    const auto providers = make_providers(cfg, corpus);
    PipelineArtifacts artifacts{&loaded.car_adapter, &loaded.index, &loaded.sare_adapter};
    RecommendConfig rec_cfg{cfg.k_e, cfg.k_s, cfg.max_items};

    std::size_t cold = 0;
    const auto records = predict_batch(corpus, pairs, artifacts, *providers.embedder,
                                       *providers.llm, rec_cfg, cfg.concurrency, &cold);

    const fs::path out =
        common.out.empty() ? workpath(cfg, "predictions.jsonl") : fs::path(common.out);
    save_predictions(out, records);
    std::cout << "predictions: " << records.size() << " pairs scored, " << cold
              << " cold-start skipped\nwritten to " << out.string() << "\n";
    return 0;
}

int cmd_evaluate(const CommonArgs& common, const std::string& corpus_dir,
                 const std::string& pairs_path, const std::string& predictions_path,
                 const std::string& car_path, const std::string& index_path,
                 const std::string& sare_path) {
    const RunConfig cfg = effective_config(common);

    EvalReport report;
    if (!predictions_path.empty()) {
        if (!fs::exists(predictions_path))
            throw IoError("missing input file: " + predictions_path);
        const auto records = load_predictions(predictions_path);
        if (records.empty()) throw MetricError("no prediction records");
        std::vector<double> scores;
        std::vector<int> labels;
        for (const auto& rec : records) {
            scores.push_back(rec.prob);
            labels.push_back(rec.label);
        }
        report.auc = auc(scores, labels);
        const UaucResult u = uauc(records);
        report.uauc = u.value;
        report.n_pairs = records.size();
        report.n_users_evaluated = u.evaluated;
        report.n_users_skipped = u.skipped;
        report.config_digest = cfg.digest();
        report.seed = cfg.seed;
    } else {
        const Corpus full = load_corpus_arg(corpus_dir, cfg);
        const Corpus corpus = history_view(full, common, cfg);
        const fs::path pairs_file =
            pairs_path.empty() ? workpath(cfg, "splits") / "test.tsv" : fs::path(pairs_path);
        if (!fs::exists(pairs_file)) throw IoError("missing input file: " + pairs_file.string());
        const auto pairs = load_pairs(pairs_file, corpus);
        const LoadedArtifacts loaded = load_artifacts(cfg, car_path, index_path, sare_path);
        const auto providers = make_providers(cfg, corpus);
        PipelineArtifacts artifacts{&loaded.car_adapter, &loaded.index, &loaded.sare_adapter};
        RecommendConfig rec_cfg{cfg.k_e, cfg.k_s, cfg.max_items};
        report = run_experiment(corpus, pairs, artifacts, *providers.embedder, *providers.llm,
                                rec_cfg, cfg.concurrency, cfg.seed, cfg.digest());
    }

    fs::path out;
    if (!common.out.empty())
        out = common.out;
    else if (!cfg.report.empty())
        out = cfg.report;
    else
        out = workpath(cfg, "report.json");
    atomic_write_file(out, report_to_json(report));
    std::cout << "auc=" << report.auc << " uauc=" << report.uauc << " pairs=" << report.n_pairs
              << "\nwritten to " << out.string() << "\n";
    return 0;
}

}  // namespace

int run_command(const std::vector<std::string>& args) {
    CLI::App app{"Retrieve-rerank pipeline for collaborative-information-augmented "
                 "LLM recommendation"};
    app.require_subcommand(0, 1);

    // One subcommand runs per invocation, so option storage is shared.
    CommonArgs common;
    std::string interactions, metadata, corpus_dir, pairs_path, crm_path, car_path, index_path,
        sare_path, assessments_path, predictions_path;
    std::int64_t train_end = -1, val_end = -1;

    CLI::App* ingest_cmd =
        app.add_subcommand("ingest", "Build the corpus from interaction and metadata TSVs");
    ingest_cmd->add_option("--interactions", interactions, "Interactions TSV");
    ingest_cmd->add_option("--metadata", metadata, "Item metadata TSV");

    CLI::App* split_cmd = app.add_subcommand("split", "Temporal train/val/test split");
    split_cmd->add_option("--train-end", train_end, "Train boundary (inclusive)");
    split_cmd->add_option("--val-end", val_end, "Validation boundary (inclusive)");

    CLI::App* crm_cmd = app.add_subcommand("train-crm", "Train the collaborative model");
    crm_cmd->add_option("--pairs", pairs_path, "Training interaction set");

    CLI::App* car_cmd = app.add_subcommand("train-car", "Train the retriever adapter");
    car_cmd->add_option("--crm", crm_path, "Collaborative model artifact");

    CLI::App* index_cmd = app.add_subcommand("index", "Build the behavior embedding index");
    index_cmd->add_option("--car", car_path, "Retriever adapter artifact");

    CLI::App* assess_cmd = app.add_subcommand("assess", "Generate self-assessments");
    assess_cmd->add_option("--pairs", pairs_path, "Pair pool to sample from");

    CLI::App* sare_cmd = app.add_subcommand("train-sare", "Train the reranker adapter");
    sare_cmd->add_option("--assessments", assessments_path, "Assessments JSONL");
    sare_cmd->add_option("--car", car_path, "Retriever adapter artifact");
    sare_cmd->add_option("--index", index_path, "Behavior index artifact");

    CLI::App* predict_cmd = app.add_subcommand("predict", "Score labeled pairs");
    predict_cmd->add_option("--pairs", pairs_path, "Pairs to score");
    predict_cmd->add_option("--car", car_path, "Retriever adapter artifact");
    predict_cmd->add_option("--index", index_path, "Behavior index artifact");
    predict_cmd->add_option("--sare", sare_path, "Reranker adapter artifact");

    CLI::App* eval_cmd = app.add_subcommand("evaluate", "Compute AUC/UAUC and write a report");
    eval_cmd->add_option("--pairs", pairs_path, "Pairs to score");
    eval_cmd->add_option("--predictions", predictions_path,
                         "Evaluate an existing predictions file instead of scoring");
    eval_cmd->add_option("--car", car_path, "Retriever adapter artifact");
    eval_cmd->add_option("--index", index_path, "Behavior index artifact");
    eval_cmd->add_option("--sare", sare_path, "Reranker adapter artifact");

    for (CLI::App* cmd : {split_cmd, crm_cmd, car_cmd, index_cmd, assess_cmd, sare_cmd,
                          predict_cmd, eval_cmd})
        cmd->add_option("--corpus", corpus_dir, "Corpus directory");
    for (CLI::App* cmd : {ingest_cmd, split_cmd, crm_cmd, car_cmd, index_cmd, assess_cmd,
                          sare_cmd, predict_cmd, eval_cmd})
        add_common_flags(cmd, &common);

    std::vector<std::string> argv_vec;
    argv_vec.push_back("score");
    argv_vec.insert(argv_vec.end(), args.begin(), args.end());
    std::vector<char*> argv;
    for (auto& s : argv_vec) argv.push_back(s.data());

    try {
        app.parse(static_cast<int>(argv.size()), argv.data());
    } catch (const CLI::CallForHelp&) {
        std::cout << app.help();
        return 0;
    } catch (const CLI::CallForAllHelp&) {
        std::cout << app.help("", CLI::AppFormatMode::All);
        return 0;
    } catch (const CLI::ParseError& e) {
        std::cerr << "error: " << e.what() << "\n\n" << app.help();
        return 2;
    }

    try {
        if (ingest_cmd->parsed()) return cmd_ingest(common, interactions, metadata);
        if (split_cmd->parsed()) return cmd_split(common, corpus_dir, train_end, val_end);
        if (crm_cmd->parsed()) return cmd_train_crm(common, corpus_dir, pairs_path);
        if (car_cmd->parsed()) return cmd_train_car(common, corpus_dir, crm_path);
        if (index_cmd->parsed()) return cmd_index(common, corpus_dir, car_path);
        if (assess_cmd->parsed()) return cmd_assess(common, corpus_dir, pairs_path);
        if (sare_cmd->parsed())
            return cmd_train_sare(common, corpus_dir, assessments_path, car_path, index_path);
        if (predict_cmd->parsed())
            return cmd_predict(common, corpus_dir, pairs_path, car_path, index_path, sare_path);
        if (eval_cmd->parsed())
            return cmd_evaluate(common, corpus_dir, pairs_path, predictions_path, car_path,
                                index_path, sare_path);
        std::cout << app.help();
        return 0;
    } catch (const ConfigError& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return 1;
    } catch (const Error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
}

}  // namespace score::cli
