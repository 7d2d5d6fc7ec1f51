#include "cae/eval.h"

#include <algorithm>
#include <functional>
#include <iomanip>
#include <sstream>
#include <tuple>

#include "cae/text.h"
#include "json.hpp"

namespace cae {
namespace {

std::vector<const RoleAnnotation *> OfRole(const AnnotationSet &set, RoleLabel role) {
  std::vector<const RoleAnnotation *> out;
  for (const RoleAnnotation &a : set.annotations) {
    if (a.role == role) out.push_back(&a);
  }
  std::stable_sort(out.begin(), out.end(), [](const RoleAnnotation *a, const RoleAnnotation *b) {
    return a->span < b->span;
  });
  return out;
}

double Ratio(std::size_t num, std::size_t den) {
  return den == 0 ? 0.0 : static_cast<double>(num) / static_cast<double>(den);
}

double HarmonicMean(double p, double r) { return p + r == 0 ? 0.0 : 2 * p * r / (p + r); }

}  // namespace

bool MatchPolicy::Accepts(const Span &gold, const Span &pred) const {
  switch (kind) {
    case Kind::kExact: return gold == pred;
    case Kind::kOverlap: return gold.Overlaps(pred);
    case Kind::kJaccard: return JaccardRatio(gold, pred) >= theta - 1e-12;
  }
  return false;
}

std::string MatchPolicy::ToString() const {
  switch (kind) {
    case Kind::kExact: return "exact";
    case Kind::kOverlap: return "overlap";
    case Kind::kJaccard: {
      std::ostringstream out;
      out << "jaccard:" << theta;
      return out.str();
    }
  }
  return "";
}

MatchPolicy ParsePolicy(std::string_view text) {
  if (text == "exact") return MatchPolicy::Exact();
  if (text == "overlap") return MatchPolicy::Overlap();
  if (text.rfind("jaccard:", 0) == 0) {
    auto theta = ParseDouble(text.substr(8));
    if (theta && *theta > 0 && *theta <= 1) return MatchPolicy::Jaccard(*theta);
    throw Error("jaccard threshold must be in (0, 1]");
  }
  throw Error("unknown policy '" + std::string(text) +
              "' (expected exact, overlap or jaccard:<theta>)");
}

double JaccardRatio(const Span &a, const Span &b) {
  std::size_t inter = a.OverlapSize(b);
  if (inter == 0) return 0.0;
  std::size_t uni = a.size() + b.size() - inter;
  return static_cast<double>(inter) / static_cast<double>(uni);
}

double RoleScore::Precision() const { return Ratio(matched, predicted); }
double RoleScore::Recall() const { return Ratio(matched, gold); }
double RoleScore::F1() const { return HarmonicMean(Precision(), Recall()); }

RoleScore ScoreReport::Micro() const {
  RoleScore total;
  for (const auto &[role, s] : roles) {
    total.gold += s.gold;
    total.predicted += s.predicted;
    total.matched += s.matched;
  }
  return total;
}

double ScoreReport::MacroPrecision() const {
  if (roles.empty()) return 0.0;
  double sum = 0;
  for (const auto &[role, s] : roles) sum += s.Precision();
  return sum / static_cast<double>(roles.size());
}

double ScoreReport::MacroRecall() const {
  if (roles.empty()) return 0.0;
  double sum = 0;
  for (const auto &[role, s] : roles) sum += s.Recall();
  return sum / static_cast<double>(roles.size());
}

double ScoreReport::MacroF1() const {
  if (roles.empty()) return 0.0;
  double sum = 0;
  for (const auto &[role, s] : roles) sum += s.F1();
  return sum / static_cast<double>(roles.size());
}

std::optional<double> ScoreReport::CueCategoryAccuracy() const {
  if (matched_cues == 0) return std::nullopt;
  return Ratio(cue_category_agreements, matched_cues);
}

void ScoreReport::Merge(const ScoreReport &other) {
  for (const auto &[role, s] : other.roles) {
    RoleScore &mine = roles[role];
    mine.gold += s.gold;
    mine.predicted += s.predicted;
    mine.matched += s.matched;
  }
  matched_cues += other.matched_cues;
  cue_category_agreements += other.cue_category_agreements;
}

std::vector<std::pair<std::size_t, std::size_t>> AlignRole(
    const std::vector<const RoleAnnotation *> &gold,
    const std::vector<const RoleAnnotation *> &pred, const MatchPolicy &policy) {
  const std::size_t ng = gold.size(), np = pred.size();
  std::vector<std::vector<std::size_t>> accepts(ng);
  std::vector<std::tuple<std::size_t, std::size_t, std::size_t>> candidates;
  for (std::size_t g = 0; g < ng; ++g) {
    for (std::size_t p = 0; p < np; ++p) {
      if (!policy.Accepts(gold[g]->span, pred[p]->span)) continue;
      accepts[g].push_back(p);
      candidates.emplace_back(gold[g]->span.OverlapSize(pred[p]->span), g, p);
    }
  }
  std::sort(candidates.begin(), candidates.end(), [](const auto &a, const auto &b) {
    if (std::get<0>(a) != std::get<0>(b)) return std::get<0>(a) > std::get<0>(b);
    return std::make_pair(std::get<1>(a), std::get<2>(a)) <
           std::make_pair(std::get<1>(b), std::get<2>(b));
  });

  constexpr std::size_t kNone = static_cast<std::size_t>(-1);
  std::vector<std::size_t> gold_to(ng, kNone), pred_to(np, kNone);
  for (const auto &[overlap, g, p] : candidates) {
    if (gold_to[g] == kNone && pred_to[p] == kNone) {
      gold_to[g] = p;
      pred_to[p] = g;
    }
  }
  // Augmenting paths turn the greedy alignment into a maximum one, so a
  // more permissive policy can never lose matches.
  std::function<bool(std::size_t, std::vector<bool> &)> augment =
      [&](std::size_t g, std::vector<bool> &seen) {
        for (std::size_t p : accepts[g]) {
          if (seen[p]) continue;
          seen[p] = true;
          if (pred_to[p] == kNone || augment(pred_to[p], seen)) {
            gold_to[g] = p;
            pred_to[p] = g;
            return true;
          }
        }
        return false;
      };
  for (std::size_t g = 0; g < ng; ++g) {
    if (gold_to[g] != kNone) continue;
    std::vector<bool> seen(np, false);
    augment(g, seen);
  }

  std::vector<std::pair<std::size_t, std::size_t>> pairs;
  for (std::size_t g = 0; g < ng; ++g) {
    if (gold_to[g] != kNone) pairs.emplace_back(g, gold_to[g]);
  }
  return pairs;
}

ScoreReport Score(const AnnotationSet &gold, const AnnotationSet &pred,
                  const MatchPolicy &policy) {
  if (gold.document_id != pred.document_id) {
    throw Error("gold is for document '" + gold.document_id + "' but prediction for '" +
                pred.document_id + "'");
  }
  ScoreReport report;
  report.policy = policy;
  for (RoleLabel role : kAllRoles) {
    auto g = OfRole(gold, role);
    auto p = OfRole(pred, role);
    if (g.empty() && p.empty()) continue;
    auto pairs = AlignRole(g, p, policy);
    report.roles[role] = RoleScore{g.size(), p.size(), pairs.size()};
    if (role == RoleLabel::kCue) {
      for (const auto &[gi, pi] : pairs) {
        ++report.matched_cues;
        if (g[gi]->emotion == p[pi]->emotion) ++report.cue_category_agreements;
      }
    }
  }
  return report;
}

std::string FormatReportTable(const ScoreReport &report) {
  std::ostringstream out;
  out << "policy: " << report.policy.ToString() << "\n";
  out << std::left << std::setw(13) << "role" << std::right << std::setw(6) << "gold"
      << std::setw(6) << "pred" << std::setw(6) << "match" << std::setw(10) << "P"
      << std::setw(10) << "R" << std::setw(10) << "F1" << "\n";
  out << std::fixed << std::setprecision(4);
  auto row = [&](std::string_view name, const RoleScore &s) {
    out << std::left << std::setw(13) << name << std::right << std::setw(6) << s.gold
        << std::setw(6) << s.predicted << std::setw(6) << s.matched << std::setw(10)
        << s.Precision() << std::setw(10) << s.Recall() << std::setw(10) << s.F1() << "\n";
  };
  for (const auto &[role, s] : report.roles) row(RoleName(role), s);
  row("micro", report.Micro());
  out << std::left << std::setw(31) << "macro" << std::right << std::setw(10)
      << report.MacroPrecision() << std::setw(10) << report.MacroRecall()
      << std::setw(10) << report.MacroF1() << "\n";
  if (auto acc = report.CueCategoryAccuracy()) {
    out << "cue category accuracy: " << *acc << " (" << report.cue_category_agreements
        << "/" << report.matched_cues << ")\n";
  }
  return out.str();
}

std::string FormatReportJson(const ScoreReport &report) {
  using nlohmann::json;
  auto scores = [](const RoleScore &s) {
    return json{{"gold", s.gold},           {"pred", s.predicted},
                {"matched", s.matched},     {"precision", s.Precision()},
                {"recall", s.Recall()},     {"f1", s.F1()}};
  };
  json j;
  j["schema"] = "cae-eval/1";
  j["policy"] = report.policy.ToString();
  j["roles"] = json::object();
  for (const auto &[role, s] : report.roles) j["roles"][std::string(RoleName(role))] = scores(s);
  j["micro"] = scores(report.Micro());
  j["macro"] = json{{"precision", report.MacroPrecision()},
                    {"recall", report.MacroRecall()},
                    {"f1", report.MacroF1()}};
  auto acc = report.CueCategoryAccuracy();
  j["cue_category_accuracy"] = acc ? json(*acc) : json(nullptr);
  return j.dump(2) + "\n";
}

std::string_view DiffKindName(DiffRecord::Kind kind) {
  switch (kind) {
    case DiffRecord::Kind::kFalsePositive: return "false-positive";
    case DiffRecord::Kind::kFalseNegative: return "false-negative";
    case DiffRecord::Kind::kSpanMismatch: return "span-mismatch";
  }
  return "";
}

std::vector<DiffRecord> Diff(const AnnotationSet &gold, const AnnotationSet &pred) {
  std::vector<DiffRecord> records;
  for (RoleLabel role : kAllRoles) {
    auto g = OfRole(gold, role);
    auto p = OfRole(pred, role);
    if (g.empty() && p.empty()) continue;
    std::vector<bool> g_done(g.size(), false), p_done(p.size(), false);
    for (const auto &[gi, pi] : AlignRole(g, p, MatchPolicy::Exact())) {
      g_done[gi] = p_done[pi] = true;
    }
    std::vector<const RoleAnnotation *> g_left, p_left;
    for (std::size_t i = 0; i < g.size(); ++i) {
      if (!g_done[i]) g_left.push_back(g[i]);
    }
    for (std::size_t i = 0; i < p.size(); ++i) {
      if (!p_done[i]) p_left.push_back(p[i]);
    }
    std::vector<bool> gl_done(g_left.size(), false), pl_done(p_left.size(), false);
    for (const auto &[gi, pi] : AlignRole(g_left, p_left, MatchPolicy::Overlap())) {
      gl_done[gi] = pl_done[pi] = true;
      records.push_back({DiffRecord::Kind::kSpanMismatch, *g_left[gi], *p_left[pi]});
    }
    for (std::size_t i = 0; i < g_left.size(); ++i) {
      if (!gl_done[i]) records.push_back({DiffRecord::Kind::kFalseNegative, *g_left[i], std::nullopt});
    }
    for (std::size_t i = 0; i < p_left.size(); ++i) {
      if (!pl_done[i]) records.push_back({DiffRecord::Kind::kFalsePositive, std::nullopt, *p_left[i]});
    }
  }
  return records;
}

}  // namespace cae
