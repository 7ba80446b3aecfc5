/*
 * Copyright 2026 The icda Authors.
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *     https://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

// The one-path collaboration protocol between users (i, j) and the analyst.
//
// Users hold X_{i,j}, Y_i and their map f_{i,j}; the analyst only ever sees
// what users send it. Every transfer is recorded in an append-only Trace
// so the information flow can be audited after the fact. Step numbers
// follow the training listing (1-15); the prediction phase uses 16 for the
// users' test intermediates and 17 for the returned predictions.
//
// Call order: run_training, then distill_users, then any number of
// predict_test batches.

#ifndef ICDA_PROTOCOL_HPP_
#define ICDA_PROTOCOL_HPP_

#include <algorithm>
#include <map>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include <nlohmann/json.hpp>

#include "icda/anchor.hpp"
#include "icda/collaboration.hpp"
#include "icda/core.hpp"
#include "icda/dataset.hpp"
#include "icda/dimred.hpp"
#include "icda/distill.hpp"
#include "icda/learner.hpp"

namespace icda {

enum class PayloadKind : int {
  AnchorBlock = 0,
  IntermediateData,
  IntermediateAnchor,
  GroundTruth,
  AnchorPredictions,
  TestIntermediate,
  TestPredictions,
};
inline constexpr int kPayloadKindCount = 7;

inline const char* to_string(PayloadKind k) {
  switch (k) {
    case PayloadKind::AnchorBlock: return "AnchorBlock";
    case PayloadKind::IntermediateData: return "IntermediateData";
    case PayloadKind::IntermediateAnchor: return "IntermediateAnchor";
    case PayloadKind::GroundTruth: return "GroundTruth";
    case PayloadKind::AnchorPredictions: return "AnchorPredictions";
    case PayloadKind::TestIntermediate: return "TestIntermediate";
    case PayloadKind::TestPredictions: return "TestPredictions";
  }
  return "Unknown";
}

namespace step {
inline constexpr int kShareAnchor = 1;
inline constexpr int kFitMaps = 3;
inline constexpr int kShareIntermediates = 6;
inline constexpr int kConcatenate = 7;
inline constexpr int kBuildAlignment = 8;
inline constexpr int kFitModel = 11;
inline constexpr int kPredictAnchor = 13;
inline constexpr int kReturnAnchorPredictions = 14;
inline constexpr int kDistill = 15;
inline constexpr int kShareTest = 16;
inline constexpr int kReturnTest = 17;
}  // namespace step

struct PartyId {
  enum class Role { User, Institution, Analyst, Broadcast };
  Role role = Role::Analyst;
  int institution = -1;
  int party = -1;

  static PartyId user(int i, int j) { return {Role::User, i, j}; }
  static PartyId institution_of(int i) { return {Role::Institution, i, -1}; }
  static PartyId analyst() { return {Role::Analyst, -1, -1}; }
  static PartyId broadcast() { return {Role::Broadcast, -1, -1}; }

  bool is_user_side() const { return role == Role::User || role == Role::Institution; }
  bool operator==(const PartyId&) const = default;

  std::string str() const {
    switch (role) {
      case Role::User: return "user(" + std::to_string(institution) + "," + std::to_string(party) + ")";
      case Role::Institution: return "institution(" + std::to_string(institution) + ")";
      case Role::Analyst: return "analyst";
      case Role::Broadcast: return "broadcast";
    }
    return "?";
  }
};

// Metadata of one transfer. Payload contents are never stored.
struct Message {
  PartyId sender;
  PartyId receiver;
  PayloadKind kind = PayloadKind::AnchorBlock;
  Eigen::Index rows = 0;
  Eigen::Index cols = 0;
  int step = 0;
  int round = 0;  // 0 = training, k >= 1 = k-th prediction batch
};

class Trace {
 public:
  Trace() = default;
  // party_widths[j] = m_j, the feature count of vertical party j.
  explicit Trace(std::vector<int> party_widths) : widths_(std::move(party_widths)) {}

  // Messages must arrive in (round, step) order.
  void append(const Message& m) {
    if (!messages_.empty()) {
      const auto& last = messages_.back();
      if (std::pair(m.round, m.step) < std::pair(last.round, last.step))
        throw std::logic_error("trace: message for round " + std::to_string(m.round) + " step " +
                               std::to_string(m.step) + " arrives after round " + std::to_string(last.round) +
                               " step " + std::to_string(last.step));
    }
    messages_.push_back(m);
  }
  int begin_prediction_round() { return ++round_; }
  int round() const { return round_; }

  const std::vector<Message>& messages() const { return messages_; }
  const std::vector<int>& party_widths() const { return widths_; }

  std::size_t count(PayloadKind k) const {
    return static_cast<std::size_t>(
        std::count_if(messages_.begin(), messages_.end(), [k](const Message& m) { return m.kind == k; }));
  }

  // One JSON object per line.
  std::string to_jsonl() const {
    std::ostringstream os;
    for (const auto& m : messages_) {
      nlohmann::json j{{"sender", m.sender.str()},
                       {"receiver", m.receiver.str()},
                       {"kind", to_string(m.kind)},
                       {"shape", {m.rows, m.cols}},
                       {"step", m.step},
                       {"round", m.round}};
      os << j.dump() << '\n';
    }
    return os.str();
  }

 private:
  std::vector<int> widths_;
  std::vector<Message> messages_;
  int round_ = 0;
};

struct AuditReport {
  bool passed = true;
  std::vector<std::string> violations;
  int training_upload_rounds = 0;                // distinct user->analyst steps in round 0
  std::map<int, int> prediction_upload_rounds;   // per prediction batch

  std::string str() const {
    std::ostringstream os;
    os << (passed ? "PASS" : "FAIL") << '\n';
    os << "training user->analyst rounds: " << training_upload_rounds << '\n';
    for (const auto& [round, n] : prediction_upload_rounds)
      os << "prediction batch " << round << " user->analyst rounds: " << n << '\n';
    for (const auto& v : violations) os << "violation: " << v << '\n';
    return os.str();
  }
};

// Structural information-flow checks:
//  (a) payload kinds come from the closed enum;
//  (b) intermediates leaving a user have fewer columns than that user's m_j;
//  (c) anchor blocks travel only from a user to the broadcast channel;
//  (d) nothing but data-matrix kinds travels user->analyst or back, so no
//      mapping function can leave a user;
// plus ordering and the one-path property (a single upload step per round).
inline AuditReport audit_trace(const Trace& trace) {
  AuditReport rep;
  auto fail = [&rep](std::size_t idx, const std::string& what) {
    rep.passed = false;
    rep.violations.push_back("message " + std::to_string(idx) + ": " + what);
  };
  const auto& widths = trace.party_widths();
  std::map<int, std::set<int>> upload_steps;
  std::optional<std::pair<int, int>> last;
  const auto& msgs = trace.messages();
  for (std::size_t k = 0; k < msgs.size(); ++k) {
    const auto& m = msgs[k];
    const int kind = static_cast<int>(m.kind);
    if (kind < 0 || kind >= kPayloadKindCount) {
      fail(k, "(a) unknown payload kind " + std::to_string(kind));
      continue;
    }
    if (last && std::pair(m.round, m.step) < *last) fail(k, "out of (round, step) order");
    last = std::pair(m.round, m.step);

    const bool to_analyst = m.receiver.role == PartyId::Role::Analyst;
    const bool from_analyst = m.sender.role == PartyId::Role::Analyst;
    switch (m.kind) {
      case PayloadKind::AnchorBlock:
        if (m.sender.role != PartyId::Role::User || m.receiver.role != PartyId::Role::Broadcast)
          fail(k, "(c) AnchorBlock must flow user->broadcast, got " + m.sender.str() + "->" + m.receiver.str());
        break;
      case PayloadKind::IntermediateData:
      case PayloadKind::IntermediateAnchor:
      case PayloadKind::TestIntermediate: {
        if (m.sender.role != PartyId::Role::User || !to_analyst) {
          fail(k, std::string("(d) ") + to_string(m.kind) + " must flow user->analyst");
          break;
        }
        const int j = m.sender.party;
        if (j < 0 || j >= static_cast<int>(widths.size()))
          fail(k, "(b) sender party " + std::to_string(j) + " has no recorded feature width");
        else if (m.cols >= widths[static_cast<std::size_t>(j)])
          fail(k, "(b) " + std::string(to_string(m.kind)) + " from " + m.sender.str() + " has " +
                      std::to_string(m.cols) + " columns, not fewer than m_j = " +
                      std::to_string(widths[static_cast<std::size_t>(j)]));
        break;
      }
      case PayloadKind::GroundTruth:
        if (!m.sender.is_user_side() || !to_analyst) fail(k, "(d) GroundTruth must flow user->analyst");
        break;
      case PayloadKind::AnchorPredictions:
      case PayloadKind::TestPredictions:
        if (!from_analyst || !m.receiver.is_user_side())
          fail(k, std::string("(d) ") + to_string(m.kind) + " must flow analyst->institution");
        break;
    }
    if (m.sender.is_user_side() && to_analyst) upload_steps[m.round].insert(m.step);
  }
  rep.training_upload_rounds = static_cast<int>(upload_steps[0].size());
  if (rep.training_upload_rounds != 1) {
    rep.passed = false;
    rep.violations.push_back("training used " + std::to_string(rep.training_upload_rounds) +
                             " user->analyst rounds, expected exactly 1");
  }
  for (const auto& [round, s] : upload_steps) {
    if (round == 0) continue;
    rep.prediction_upload_rounds[round] = static_cast<int>(s.size());
    if (s.size() != 1) {
      rep.passed = false;
      rep.violations.push_back("prediction batch " + std::to_string(round) + " used " + std::to_string(s.size()) +
                               " user->analyst rounds");
    }
  }
  return rep;
}

// A failure inside the protocol, tagged with the step it happened in.
class ProtocolError : public Error {
 public:
  ProtocolError(int step, const std::string& what)
      : Error("step " + std::to_string(step) + ": " + what), step_(step) {}
  int step() const { return step_; }

 private:
  int step_;
};

struct ReductionConfig {
  MapKind kind = MapKind::Lpp;
  int target_dim = 4;
  // Optional per-party override, indexed [i][j].
  std::vector<std::vector<int>> per_party;
  LppParams lpp;
  // When true every m~_{i,j} must be strictly below m_j.
  bool enforce_reduction = true;

  int dim(int i, int j) const {
    if (!per_party.empty()) return per_party.at(static_cast<std::size_t>(i)).at(static_cast<std::size_t>(j));
    return target_dim;
  }
};

struct LearnerConfig {
  double lambda = 0.01;
  std::optional<double> gamma;  // nullopt: median heuristic
  int gamma_sample_cap = 2000;
};

struct PipelineConfig {
  ReductionConfig reduction;
  AlignmentSolver solver = AlignmentSolver::Tls;
  TargetOptions target;
  LearnerConfig learner;
  TreeParams tree;
  std::uint64_t seed = 1;
};

// Everything the analyst holds after training. Built only from uploads.
struct AnalystState {
  CollaborationSpace collab;
  KrrModel model;
  Matrix X_hat;
  std::vector<Matrix> anchor_intermediates;  // X~_i^anc, per institution
  std::vector<Matrix> distill_intermediates;  // same, for a separate distillation anchor when present
  std::vector<Matrix> anchor_scores;          // Y_i^anc = h(g_i(.)), per institution
  int class_count = 0;
};

struct TrainedCollaboration {
  AnalystState analyst;
  // User-side secrets, indexed [i][j]. Analyst-side code never receives these.
  std::vector<std::vector<LinearMap>> user_maps;
  std::vector<std::optional<DecisionTree>> trees;
  std::vector<int> col_offsets;
  std::vector<std::string> feature_names;
  std::vector<std::string> warnings;
  Trace trace;

  int institutions() const { return static_cast<int>(user_maps.size()); }
  int parties() const { return user_maps.empty() ? 0 : static_cast<int>(user_maps.front().size()); }
};

namespace detail {

template <class F>
auto at_step(int s, F&& fn) -> decltype(fn()) {
  try {
    return fn();
  } catch (const ProtocolError&) {
    throw;
  } catch (const std::exception& e) {
    throw ProtocolError(s, e.what());
  }
}

// Uploads the analyst receives in the single training round.
struct AnalystInbox {
  std::vector<std::vector<Matrix>> data;     // X~_{i,j}
  std::vector<std::vector<Matrix>> anchor;   // X~_{i,j}^anc
  std::vector<std::vector<Matrix>> distill;  // optional separate distillation anchor
  std::vector<Labels> labels;                // Y_i as class indices
  int class_count = 0;
};

// Analyst side, steps 7-13.
inline AnalystState analyst_train(const AnalystInbox& in, const PipelineConfig& cfg, std::vector<std::string>& warnings) {
  const int c = static_cast<int>(in.data.size());
  AnalystState st;
  st.class_count = in.class_count;

  std::vector<Matrix> data_i;
  at_step(step::kConcatenate, [&] {
    for (int i = 0; i < c; ++i) {
      data_i.push_back(hstack(std::span<const Matrix>(in.data[i])));
      st.anchor_intermediates.push_back(hstack(std::span<const Matrix>(in.anchor[i])));
      if (!in.distill.empty()) st.distill_intermediates.push_back(hstack(std::span<const Matrix>(in.distill[i])));
    }
    return 0;
  });

  auto built = at_step(step::kBuildAlignment,
                       [&] { return build_collaboration(st.anchor_intermediates, data_i, cfg.solver, cfg.target); });
  st.collab = std::move(built.space);
  st.X_hat = std::move(built.X_hat);
  if (st.collab.underdetermined_target)
    warnings.push_back("anchor row count does not exceed the total intermediate width; alignment is underdetermined");
  for (int i = 0; i < c; ++i)
    if (st.collab.maps[static_cast<std::size_t>(i)].fell_back_to_ls)
      warnings.push_back("institution " + std::to_string(i) + ": TLS block was singular, used least squares");

  st.model = at_step(step::kFitModel, [&] {
    Labels all;
    for (const auto& l : in.labels) all.insert(all.end(), l.begin(), l.end());
    const auto Y = one_hot(all, in.class_count);
    const double gamma = cfg.learner.gamma ? *cfg.learner.gamma
                                           : median_gamma(st.X_hat, cfg.learner.gamma_sample_cap, cfg.seed);
    return fit_krr(st.X_hat, Y, cfg.learner.lambda, gamma);
  });

  at_step(step::kPredictAnchor, [&] {
    const auto& source = st.distill_intermediates.empty() ? st.anchor_intermediates : st.distill_intermediates;
    for (int i = 0; i < c; ++i)
      st.anchor_scores.push_back(predict_krr(st.model, st.collab.apply(i, source[static_cast<std::size_t>(i)])));
    return 0;
  });
  return st;
}

}  // namespace detail

// Training phase through step 13: anchor sharing, per-party maps, the single
// upload, alignment, the analyst model and the anchor predictions.
inline TrainedCollaboration run_training(const PartitionedDataset& data, const AnchorSet& anchor,
                                         const PipelineConfig& cfg) {
  const int c = data.institutions();
  const int d = data.parties();
  if (c < 1 || d < 1) throw ProtocolError(step::kShareAnchor, "empty partition");
  if (anchor.col_offsets != data.col_offsets)
    throw ProtocolError(step::kShareAnchor, "anchor column boundaries differ from the partition's");
  if (anchor.interp && anchor.interp->cols() != anchor.X.cols())
    throw ProtocolError(step::kShareAnchor, "distillation anchor width differs from the alignment anchor");

  TrainedCollaboration out;
  std::vector<int> widths;
  for (int j = 0; j < d; ++j) widths.push_back(data.cols(j));
  out.trace = Trace(widths);
  out.col_offsets = data.col_offsets;
  out.feature_names = data.feature_names;

  // Step 1: every party publishes its anchor block to all users.
  for (std::size_t g = 0; g + 1 < anchor.row_offsets.size(); ++g)
    for (int j = 0; j < d; ++j)
      out.trace.append({PartyId::user(static_cast<int>(g), j), PartyId::broadcast(), PayloadKind::AnchorBlock,
                        anchor.row_offsets[g + 1] - anchor.row_offsets[g], data.cols(j), step::kShareAnchor, 0});

  // Step 3: each user fits its private map.
  out.user_maps.resize(static_cast<std::size_t>(c));
  std::vector<int> institution_width(static_cast<std::size_t>(c), 0);
  for (int i = 0; i < c; ++i) {
    for (int j = 0; j < d; ++j) {
      const int dim = cfg.reduction.dim(i, j);
      if (cfg.reduction.enforce_reduction && dim >= data.cols(j))
        throw ProtocolError(step::kFitMaps, "party (" + std::to_string(i) + "," + std::to_string(j) +
                                                "): intermediate width " + std::to_string(dim) +
                                                " must be below its feature count " + std::to_string(data.cols(j)));
      out.user_maps[i].push_back(detail::at_step(step::kFitMaps, [&] {
        return cfg.reduction.kind == MapKind::Lpp ? fit_lpp(data.block(i, j), dim, cfg.reduction.lpp)
                                                  : fit_pca(data.block(i, j), dim);
      }));
      const auto& f = out.user_maps[i].back();
      if (f.lpp && !f.lpp->graph_connected)
        out.warnings.push_back("party (" + std::to_string(i) + "," + std::to_string(j) + "): LPP graph has " +
                               std::to_string(f.lpp->graph_components) + " components");
      institution_width[static_cast<std::size_t>(i)] += dim;
    }
  }
  const int widest = *std::max_element(institution_width.begin(), institution_width.end());
  if (anchor.rows() < widest)
    throw ProtocolError(step::kShareAnchor, "anchor has " + std::to_string(anchor.rows()) +
                                                " rows, fewer than the widest institution intermediate (" +
                                                std::to_string(widest) + ")");

  // Steps 4-6: users apply their maps and upload once.
  detail::AnalystInbox inbox;
  inbox.class_count = data.class_count;
  inbox.data.resize(static_cast<std::size_t>(c));
  inbox.anchor.resize(static_cast<std::size_t>(c));
  if (anchor.interp) inbox.distill.resize(static_cast<std::size_t>(c));
  for (int i = 0; i < c; ++i) {
    for (int j = 0; j < d; ++j) {
      const auto& f = out.user_maps[i][static_cast<std::size_t>(j)];
      inbox.data[i].push_back(apply_map(f, data.block(i, j)));
      inbox.anchor[i].push_back(apply_map(f, anchor.slice(j)));
      out.trace.append({PartyId::user(i, j), PartyId::analyst(), PayloadKind::IntermediateData,
                        inbox.data[i].back().rows(), inbox.data[i].back().cols(), step::kShareIntermediates, 0});
      out.trace.append({PartyId::user(i, j), PartyId::analyst(), PayloadKind::IntermediateAnchor,
                        inbox.anchor[i].back().rows(), inbox.anchor[i].back().cols(), step::kShareIntermediates, 0});
      if (anchor.interp) {
        inbox.distill[i].push_back(apply_map(f, anchor.interp_slice(j)));
        out.trace.append({PartyId::user(i, j), PartyId::analyst(), PayloadKind::IntermediateAnchor,
                          inbox.distill[i].back().rows(), inbox.distill[i].back().cols(), step::kShareIntermediates,
                          0});
      }
    }
    inbox.labels.push_back(data.labels[static_cast<std::size_t>(i)]);
    out.trace.append({PartyId::institution_of(i), PartyId::analyst(), PayloadKind::GroundTruth, data.rows(i),
                      data.class_count, step::kShareIntermediates, 0});
  }

  out.analyst = detail::analyst_train(inbox, cfg, out.warnings);
  out.trees.resize(static_cast<std::size_t>(c));
  return out;
}

// Steps 14-15: the analyst returns Y_i^anc to each institution, which fits
// its own tree t_i on the full-width anchor.
inline const std::vector<std::optional<DecisionTree>>& distill_users(TrainedCollaboration& trained,
                                                                      const AnchorSet& anchor,
                                                                      const TreeParams& params) {
  const int c = trained.institutions();
  const Matrix& inputs = anchor.distillation_inputs();
  for (int i = 0; i < c; ++i) {
    const Matrix& scores = trained.analyst.anchor_scores[static_cast<std::size_t>(i)];
    if (scores.rows() != inputs.rows())
      throw ProtocolError(step::kReturnAnchorPredictions, "anchor predictions do not match the distillation anchor");
    trained.trace.append({PartyId::analyst(), PartyId::institution_of(i), PayloadKind::AnchorPredictions,
                          scores.rows(), scores.cols(), step::kReturnAnchorPredictions, 0});
  }
  for (int i = 0; i < c; ++i) {
    const Labels labels = row_argmax(trained.analyst.anchor_scores[static_cast<std::size_t>(i)]);
    if (std::all_of(labels.begin(), labels.end(), [&](int y) { return y == labels.front(); }))
      trained.warnings.push_back("institution " + std::to_string(i) +
                                 ": all anchor predictions are one class; tree is a single leaf");
    trained.trees[static_cast<std::size_t>(i)] = detail::at_step(
        step::kDistill, [&] { return fit_tree(inputs, labels, params, trained.analyst.class_count); });
  }
  return trained.trees;
}

struct InstitutionPrediction {
  Matrix scores;  // s_i x l
  Labels labels;
};

// Prediction phase for one batch of held-out rows, split like the training
// data: users upload f_{i,j}(X^test_{i,j}); the analyst returns
// h(g_i([...])) to institution i.
inline std::vector<InstitutionPrediction> predict_test(TrainedCollaboration& trained,
                                                       const std::vector<std::vector<Matrix>>& test_blocks) {
  const int c = trained.institutions();
  const int d = trained.parties();
  if (static_cast<int>(test_blocks.size()) != c)
    throw ProtocolError(step::kShareTest, "expected test blocks for " + std::to_string(c) + " institutions");
  const int round = trained.trace.begin_prediction_round();

  std::vector<std::vector<Matrix>> uploads(static_cast<std::size_t>(c));
  for (int i = 0; i < c; ++i) {
    if (static_cast<int>(test_blocks[i].size()) != d)
      throw ProtocolError(step::kShareTest, "institution " + std::to_string(i) + " test row has the wrong party count");
    const auto s_i = test_blocks[i].empty() ? 0 : test_blocks[i][0].rows();
    for (int j = 0; j < d; ++j) {
      const auto& block = test_blocks[i][static_cast<std::size_t>(j)];
      const int width = trained.col_offsets[j + 1] - trained.col_offsets[j];
      if (block.cols() != width || block.rows() != s_i)
        throw ProtocolError(step::kShareTest, "test block (" + std::to_string(i) + "," + std::to_string(j) +
                                                  ") is " + std::to_string(block.rows()) + "x" +
                                                  std::to_string(block.cols()) + ", expected " + std::to_string(s_i) +
                                                  "x" + std::to_string(width));
      uploads[i].push_back(apply_map(trained.user_maps[i][static_cast<std::size_t>(j)], block));
      trained.trace.append({PartyId::user(i, j), PartyId::analyst(), PayloadKind::TestIntermediate,
                            uploads[i].back().rows(), uploads[i].back().cols(), step::kShareTest, round});
    }
  }

  std::vector<InstitutionPrediction> out;
  for (int i = 0; i < c; ++i) {
    const Matrix joined = hstack(std::span<const Matrix>(uploads[i]));
    InstitutionPrediction p;
    p.scores = detail::at_step(step::kReturnTest, [&] {
      return predict_krr(trained.analyst.model, trained.analyst.collab.apply(i, joined));
    });
    p.labels = row_argmax(p.scores);
    out.push_back(std::move(p));
  }
  for (int i = 0; i < c; ++i)
    trained.trace.append({PartyId::analyst(), PartyId::institution_of(i), PayloadKind::TestPredictions,
                          out[static_cast<std::size_t>(i)].scores.rows(),
                          out[static_cast<std::size_t>(i)].scores.cols(), step::kReturnTest, round});
  return out;
}

struct BaselineResult {
  DecisionTree tree;
  Labels predictions;
};

// Centralized analysis: one tree on the pooled data (the ideal case).
inline BaselineResult run_centralized(const LabeledDataset& full, const Matrix& test_X, const TreeParams& params) {
  BaselineResult r{fit_tree(full.X, full.labels, params, full.class_count), {}};
  r.predictions = predict_tree(r.tree, test_X);
  return r;
}

// Individual analysis: one party's block only, evaluated on the matching
// test columns.
inline BaselineResult run_individual(const Matrix& block, const Labels& labels, const Matrix& test_block,
                                     const TreeParams& params, int class_count) {
  BaselineResult r{fit_tree(block, labels, params, class_count), {}};
  r.predictions = predict_tree(r.tree, test_block);
  return r;
}

}  // namespace icda

#endif  // ICDA_PROTOCOL_HPP_
