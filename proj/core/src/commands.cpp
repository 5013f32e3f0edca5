#include "haucl/commands.hpp"

#include <cmath>
#include <cstdio>
#include <numeric>
#include <ostream>

#include "haucl/adam.hpp"
#include "haucl/metrics.hpp"

namespace haucl {

namespace {

template <class Fn>
int guarded(Fn fn, std::ostream& err) {
  try {
    return fn();
  } catch (const ConfigError& e) {
    err << "config error: " << e.what() << '\n';
    return kExitConfigError;
  } catch (const DataError& e) {
    err << "data error: " << e.what() << '\n';
    return kExitDataError;
  } catch (const Error& e) {
    err << "error: " << e.what() << '\n';
    return kExitConfigError;
  }
}

HauclModel::ForwardOptions options_from(const RunConfig& cfg, bool train) {
  // zero-weighted loss terms drop their paths entirely, so a
  // lambda_g == lambda_cl == 0 run is exactly the plain classifier pipeline
  bool no_vhgae =
      cfg.ablation.no_vhgae_paths || (cfg.lambda_g == 0.0 && cfg.lambda_cl == 0.0);
  bool no_contrastive = cfg.ablation.no_contrastive || cfg.lambda_cl == 0.0;

  HauclModel::ForwardOptions opts;
  opts.train = train;
  opts.hard_incidence = train ? !cfg.soft_incidence : true;
  opts.dropout_p = train ? cfg.dropout : 0.0;
  opts.tau_gumbel = cfg.tau_gumbel;
  opts.tau_cl = cfg.tau_cl;
  opts.use_speaker_embedding = !cfg.ablation.no_speaker_embedding;
  opts.use_vhgae = !no_vhgae;
  opts.use_contrastive = !no_contrastive;
  return opts;
}

struct BatchLoss {
  Tensor loss, l_ce, l_g, l_cl;
  std::size_t utterances = 0;
};

BatchLoss assemble_batch_loss(const HauclModel& model,
                              const std::vector<const DialogueFeatures*>& dialogues,
                              const std::vector<HauclModel::Noise>& noises,
                              const HauclModel::ForwardOptions& opts, const RunConfig& cfg) {
  BatchLoss batch;
  Tensor nll_total = Tensor::scalar(0.0);
  Tensor lg_total = Tensor::scalar(0.0);
  Tensor lcl_total = Tensor::scalar(0.0);
  for (std::size_t i = 0; i < dialogues.size(); ++i) {
    HauclModel::Output out = model.forward(*dialogues[i], opts, noises[i]);
    nll_total = add(nll_total, out.nll_sum);
    batch.utterances += out.num_utterances;
    lg_total = add(lg_total, scale(add(out.loss_g_view1, out.loss_g_view2), 0.5));
    lcl_total = add(lcl_total, out.loss_cl);
  }
  double inv_dialogues = 1.0 / static_cast<double>(dialogues.size());
  batch.l_ce = scale(nll_total, 1.0 / static_cast<double>(batch.utterances));
  if (cfg.l2_lambda > 0.0) {
    batch.l_ce = add(batch.l_ce, scale(global_l2_norm(model.params()), cfg.l2_lambda));
  }
  batch.l_g = scale(lg_total, inv_dialogues);
  batch.l_cl = scale(lcl_total, inv_dialogues);
  batch.loss = add(add(batch.l_ce, scale(batch.l_g, cfg.lambda_g)),
                   scale(batch.l_cl, cfg.lambda_cl));
  return batch;
}

void shuffle_indices(std::vector<std::size_t>& order, RngStream& rng) {
  for (std::size_t i = order.size(); i > 1; --i) {
    std::size_t j = rng.next_u64() % i;
    std::swap(order[i - 1], order[j]);
  }
}

std::string format_epoch_line(std::size_t epoch, double loss, double ce, double lg, double lcl,
                              double acc, double wf1) {
  char buf[192];
  std::snprintf(buf, sizeof(buf), "epoch=%zu loss=%.6f ce=%.6f lg=%.6f lcl=%.6f acc=%.4f wf1=%.4f",
                epoch, loss, ce, lg, lcl, acc, wf1);
  return buf;
}

}  // namespace

EvalMetrics evaluate_model(const HauclModel& model, const Dataset& dataset,
                           const RunConfig& cfg) {
  HauclModel::ForwardOptions opts = options_from(cfg, /*train=*/false);
  std::vector<int> preds, labels;
  preds.reserve(dataset.total_utterances());
  labels.reserve(dataset.total_utterances());
  for (const DialogueFeatures& dlg : dataset.dialogues) {
    HauclModel::Noise noise = model.zero_noise(dlg.num_utterances, opts);
    HauclModel::Output out = model.forward(dlg, opts, noise);
    preds.insert(preds.end(), out.preds.begin(), out.preds.end());
    labels.insert(labels.end(), dlg.labels.begin(), dlg.labels.end());
  }
  EvalMetrics m;
  m.acc = accuracy(preds, labels);
  m.wf1 = weighted_f1(preds, labels, static_cast<std::size_t>(dataset.num_classes));
  return m;
}

int run_train(const RunConfig& cfg, std::ostream& log, std::ostream& err) {
  return guarded(
      [&]() -> int {
        cfg.validate();
        if (cfg.data_path.empty()) throw ConfigError("train: no dataset path configured");
        Dataset dataset = load_dataset(cfg.data_path);
        if (dataset.dialogues.empty()) {
          throw DataError(cfg.data_path + ": dataset has no dialogues");
        }

        RngStream init_rng = RngStream::for_purpose(cfg.seed, "init");
        HauclModel model(dims_from(cfg, dataset), init_rng);
        RngStream dropout_rng = RngStream::for_purpose(cfg.seed, "dropout");
        RngStream delta_rng = RngStream::for_purpose(cfg.seed, "delta");
        RngStream gumbel_rng = RngStream::for_purpose(cfg.seed, "gumbel");
        RngStream order_rng = RngStream::for_purpose(cfg.seed, "order");

        Adam adam(cfg.lr);
        HauclModel::ForwardOptions train_opts = options_from(cfg, /*train=*/true);

        std::vector<std::size_t> order(dataset.dialogues.size());
        std::iota(order.begin(), order.end(), 0);

        for (std::size_t epoch = 1; epoch <= cfg.epochs; ++epoch) {
          shuffle_indices(order, order_rng);
          double ep_loss = 0.0, ep_ce = 0.0, ep_lg = 0.0, ep_lcl = 0.0;
          std::size_t num_batches = 0;

          for (std::size_t start = 0; start < order.size(); start += cfg.batch_size) {
            std::size_t end = std::min(start + cfg.batch_size, order.size());
            std::vector<const DialogueFeatures*> batch_dialogues;
            std::vector<HauclModel::Noise> noises;
            for (std::size_t i = start; i < end; ++i) {
              const DialogueFeatures& dlg = dataset.dialogues[order[i]];
              batch_dialogues.push_back(&dlg);
              noises.push_back(model.draw_noise(dlg.num_utterances, train_opts, dropout_rng,
                                                delta_rng, gumbel_rng));
            }

            Tape tape;
            Tape::Scope scope(tape);
            BatchLoss batch = assemble_batch_loss(model, batch_dialogues, noises, train_opts, cfg);
            double loss_value = batch.loss.item();
            if (!std::isfinite(loss_value)) {
              err << "numerical divergence: non-finite loss in epoch " << epoch << '\n';
              return kExitDiverged;
            }
            tape.backward(batch.loss);
            adam.step(model.params());
            model.params().zero_grads();

            ep_loss += loss_value;
            ep_ce += batch.l_ce.item();
            ep_lg += batch.l_g.item();
            ep_lcl += batch.l_cl.item();
            ++num_batches;
          }

          double inv = 1.0 / static_cast<double>(num_batches);
          EvalMetrics m = evaluate_model(model, dataset, cfg);
          log << format_epoch_line(epoch, ep_loss * inv, ep_ce * inv, ep_lg * inv, ep_lcl * inv,
                                   m.acc, m.wf1)
              << '\n';
        }

        if (!cfg.checkpoint_out.empty()) save_checkpoint(model.params(), cfg.checkpoint_out);
        return kExitOk;
      },
      err);
}

int run_eval(const RunConfig& cfg, std::ostream& out, std::ostream& err) {
  return guarded(
      [&]() -> int {
        cfg.validate();
        if (cfg.data_path.empty()) throw ConfigError("eval: no dataset path configured");
        if (cfg.checkpoint_in.empty()) throw ConfigError("eval: no checkpoint path configured");
        Dataset dataset = load_dataset(cfg.data_path);
        if (dataset.dialogues.empty()) {
          throw DataError(cfg.data_path + ": dataset has no dialogues");
        }
        RngStream init_rng = RngStream::for_purpose(cfg.seed, "init");
        HauclModel model(dims_from(cfg, dataset), init_rng);
        load_checkpoint(model.params(), cfg.checkpoint_in);

        EvalMetrics m = evaluate_model(model, dataset, cfg);
        char buf[64];
        std::snprintf(buf, sizeof(buf), "acc=%.4f wf1=%.4f", m.acc, m.wf1);
        out << buf << '\n';
        return kExitOk;
      },
      err);
}

int run_gradcheck(const RunConfig& cfg, std::ostream& out, std::ostream& err,
                  const std::string& corrupt_param) {
  return guarded(
      [&]() -> int {
        cfg.validate();
        if (cfg.d > 8 || cfg.d_z > 8 || cfg.d_h > 8) {
          throw ConfigError("gradcheck: requires a tiny model (d, d_z, d_h <= 8)");
        }

        SynthSpec tiny;
        tiny.classes = 3;
        tiny.speakers = 2;
        tiny.num_dialogues = 2;
        tiny.min_len = 3;
        tiny.max_len = 4;
        tiny.dim_t = 6;
        tiny.dim_a = 5;
        tiny.dim_v = 4;
        tiny.seed = cfg.seed;
        Dataset dataset = generate_synthetic(tiny);

        RngStream init_rng = RngStream::for_purpose(cfg.seed, "init");
        HauclModel model(dims_from(cfg, dataset), init_rng);

        HauclModel::ForwardOptions opts = options_from(cfg, /*train=*/true);
        opts.hard_incidence = false;  // the binarization step is not differentiable

        RngStream dropout_rng = RngStream::for_purpose(cfg.seed, "dropout");
        RngStream delta_rng = RngStream::for_purpose(cfg.seed, "delta");
        RngStream gumbel_rng = RngStream::for_purpose(cfg.seed, "gumbel");

        std::vector<const DialogueFeatures*> dialogues;
        std::vector<HauclModel::Noise> noises;  // frozen for every evaluation
        for (const DialogueFeatures& dlg : dataset.dialogues) {
          dialogues.push_back(&dlg);
          noises.push_back(
              model.draw_noise(dlg.num_utterances, opts, dropout_rng, delta_rng, gumbel_rng));
        }

        auto loss_value = [&]() {
          return assemble_batch_loss(model, dialogues, noises, opts, cfg).loss.item();
        };

        {
          Tape tape;
          Tape::Scope scope(tape);
          BatchLoss batch = assemble_batch_loss(model, dialogues, noises, opts, cfg);
          tape.backward(batch.loss);
        }

        std::vector<std::vector<double>> analytic;
        analytic.reserve(model.params().size());
        for (const auto& [name, t] : model.params().items()) {
          analytic.push_back(t.grad().empty() ? std::vector<double>(t.numel(), 0.0) : t.grad());
        }
        model.params().zero_grads();

        if (!corrupt_param.empty()) {
          bool found = false;
          for (std::size_t i = 0; i < model.params().size(); ++i) {
            if (model.params().items()[i].first == corrupt_param) {
              analytic[i][0] += 1.0;
              found = true;
            }
          }
          if (!found) throw ConfigError("gradcheck: unknown parameter " + corrupt_param);
        }

        const double h = 1e-4;
        double worst = 0.0;
        std::string worst_name = "(none)";
        std::size_t total_elements = 0;
        for (std::size_t i = 0; i < model.params().size(); ++i) {
          const std::string& name = model.params().items()[i].first;
          Tensor t = model.params().items()[i].second;
          std::vector<double>& vals = t.mutable_values();
          for (std::size_t k = 0; k < vals.size(); ++k) {
            double saved = vals[k];
            vals[k] = saved + h;
            double f_plus = loss_value();
            vals[k] = saved - h;
            double f_minus = loss_value();
            vals[k] = saved;
            double fd = (f_plus - f_minus) / (2.0 * h);
            double rel = std::fabs(analytic[i][k] - fd) / std::max(1.0, std::fabs(fd));
            if (rel > worst) {
              worst = rel;
              worst_name = name;
            }
            ++total_elements;
          }
        }

        char buf[160];
        std::snprintf(buf, sizeof(buf), "gradcheck parameters=%zu elements=%zu",
                      model.params().size(), total_elements);
        out << buf << '\n';
        std::snprintf(buf, sizeof(buf), "max_rel_err=%.6e worst=%s", worst, worst_name.c_str());
        out << buf << '\n';
        if (worst < 1e-3) {
          out << "gradcheck ok\n";
          return kExitOk;
        }
        err << "gradcheck failed: " << worst_name << " rel_err=" << worst << '\n';
        return kExitGradcheckFailed;
      },
      err);
}

int run_synth(const SynthSpec& spec, const std::string& out_path, std::ostream& out,
              std::ostream& err) {
  return guarded(
      [&]() -> int {
        if (out_path.empty()) throw ConfigError("synth: no output path given");
        Dataset dataset = generate_synthetic(spec);
        save_dataset(dataset, out_path);
        out << "dialogues=" << dataset.dialogues.size()
            << " utterances=" << dataset.total_utterances() << " classes=" << dataset.num_classes
            << " speakers=" << dataset.num_speakers << '\n';
        return kExitOk;
      },
      err);
}

}  // namespace haucl
