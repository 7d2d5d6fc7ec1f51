#include <algorithm>

#include "cae/rules.h"
#include "cae/text.h"

namespace cae {
namespace {

std::string_view LemmaOf(const Token &token) {
  return token.lemma.empty() ? std::string_view(token.surface)
                             : std::string_view(token.lemma);
}

bool ArcHolds(const RuleArc &arc, const std::vector<std::size_t> &binding,
              const Sentence &sentence) {
  const Token &dep = sentence.tokens[binding[arc.dependent]];
  return dep.head == binding[arc.governor] && arc.deprels.count(dep.deprel) > 0;
}

class Matcher {
 public:
  Matcher(const Rule &rule, const Sentence &sentence, const MatchContext &context)
      : rule_(rule), sentence_(sentence) {
    const std::size_t nv = rule.vars.size();
    const std::size_t nt = sentence.size();
    allowed_.assign(nv, std::vector<bool>(nt, false));
    std::vector<std::size_t> counts(nv, 0);
    for (std::size_t v = 0; v < nv; ++v) {
      for (std::size_t t = 0; t < nt; ++t) {
        bool ok = std::all_of(rule.vars[v].predicates.begin(),
                              rule.vars[v].predicates.end(),
                              [&](const NodePredicate &p) {
                                return EvaluatePredicate(p, sentence.tokens[t], context);
                              });
        allowed_[v][t] = ok;
        counts[v] += ok;
      }
    }
    children_.resize(nt);
    for (const Token &t : sentence.tokens) {
      if (!t.IsRoot()) children_[t.head].push_back(t.index);
    }
    PlanOrder(counts);
  }

  std::vector<MatchResult> Run() {
    if (rule_.vars.empty() || sentence_.tokens.empty()) return {};
    binding_.assign(rule_.vars.size(), kRoot);
    used_.assign(sentence_.size(), false);
    Extend(0);
    std::sort(results_.begin(), results_.end(),
              [](const MatchResult &a, const MatchResult &b) {
                return a.bindings < b.bindings;
              });
    results_.erase(std::unique(results_.begin(), results_.end()), results_.end());
    return std::move(results_);
  }

 private:
  // Binding order: start from the most selective variable, then always
  // extend along an arc to an already-ordered variable.
  void PlanOrder(const std::vector<std::size_t> &counts) {
    const std::size_t nv = rule_.vars.size();
    std::vector<bool> placed(nv, false);
    anchor_.assign(nv, std::nullopt);
    for (std::size_t step = 0; step < nv; ++step) {
      std::optional<std::size_t> best;
      std::optional<std::size_t> best_anchor;
      for (std::size_t v = 0; v < nv; ++v) {
        if (placed[v]) continue;
        std::optional<std::size_t> anchor;
        for (std::size_t a = 0; a < rule_.arcs.size(); ++a) {
          const RuleArc &arc = rule_.arcs[a];
          if ((arc.governor == v && placed[arc.dependent]) ||
              (arc.dependent == v && placed[arc.governor])) {
            anchor = a;
            break;
          }
        }
        if (step > 0 && !anchor) continue;
        if (!best || counts[v] < counts[*best]) {
          best = v;
          best_anchor = anchor;
        }
      }
      if (!best) break;  // disconnected; compile rejects this
      placed[*best] = true;
      order_.push_back(*best);
      anchor_[*best] = best_anchor;
    }
  }

  bool Consistent(std::size_t var, std::size_t token) const {
    if (!allowed_[var][token] || used_[token]) return false;
    for (const RuleArc &arc : rule_.arcs) {
      std::size_t other;
      if (arc.governor == var) {
        other = arc.dependent;
      } else if (arc.dependent == var) {
        other = arc.governor;
      } else {
        continue;
      }
      if (binding_[other] == kRoot) continue;
      std::vector<std::size_t> probe = binding_;
      probe[var] = token;
      if (!ArcHolds(arc, probe, sentence_)) return false;
    }
    return true;
  }

  void Try(std::size_t depth, std::size_t var, std::size_t token) {
    if (!Consistent(var, token)) return;
    binding_[var] = token;
    used_[token] = true;
    Extend(depth + 1);
    used_[token] = false;
    binding_[var] = kRoot;
  }

  void Extend(std::size_t depth) {
    if (depth == order_.size()) {
      if (order_.size() == rule_.vars.size()) {
        results_.push_back(MatchResult{rule_.id, sentence_.index, binding_});
      }
      return;
    }
    const std::size_t var = order_[depth];
    if (!anchor_[var]) {
      for (std::size_t t = 0; t < sentence_.size(); ++t) Try(depth, var, t);
      return;
    }
    const RuleArc &arc = rule_.arcs[*anchor_[var]];
    if (arc.dependent == var) {
      for (std::size_t t : children_[binding_[arc.governor]]) Try(depth, var, t);
    } else {
      const Token &dep = sentence_.tokens[binding_[arc.dependent]];
      if (!dep.IsRoot()) Try(depth, var, dep.head);
    }
  }

  const Rule &rule_;
  const Sentence &sentence_;
  std::vector<std::vector<bool>> allowed_;
  std::vector<std::vector<std::size_t>> children_;
  std::vector<std::size_t> order_;
  std::vector<std::optional<std::size_t>> anchor_;
  std::vector<std::size_t> binding_;
  std::vector<bool> used_;
  std::vector<MatchResult> results_;
};

void CollectSubtree(const std::vector<std::vector<std::size_t>> &children,
                    const Sentence &sentence, std::size_t node, bool prune_clauses,
                    std::size_t &lo, std::size_t &hi) {
  lo = std::min(lo, node);
  hi = std::max(hi, node);
  for (std::size_t child : children[node]) {
    if (prune_clauses && IsClausalDeprel(sentence.tokens[child].deprel)) continue;
    CollectSubtree(children, sentence, child, prune_clauses, lo, hi);
  }
}

}  // namespace

bool EvaluatePredicate(const NodePredicate &predicate, const Token &token,
                       const MatchContext &context) {
  struct Visitor {
    const Token &token;
    const MatchContext &context;
    bool operator()(const LemmaIn &p) const {
      return p.lemmas.count(CaseFold(LemmaOf(token))) > 0;
    }
    bool operator()(const UposIn &p) const { return p.tags.count(token.upos) > 0; }
    bool operator()(const FeatsHas &p) const { return token.HasFeat(p.name, p.value); }
    bool operator()(const SurfaceMatches &p) const {
      return p.regex && std::regex_match(token.surface, *p.regex);
    }
    bool operator()(const IsFirstPerson &) const {
      return context.first_person &&
             context.first_person->count(CaseFold(token.surface)) > 0;
    }
    bool operator()(const InEmotionLexicon &) const {
      return context.emotions && context.emotions->Contains(LemmaOf(token));
    }
    bool operator()(const DeprelIn &p) const { return p.labels.count(token.deprel) > 0; }
  };
  return std::visit(Visitor{token, context}, predicate);
}

std::vector<MatchResult> FindMatches(const Rule &rule, const Sentence &sentence,
                                     const MatchContext &context) {
  return Matcher(rule, sentence, context).Run();
}

bool IsClausalDeprel(std::string_view deprel) {
  std::string_view base = deprel.substr(0, deprel.find(':'));
  return base == "advcl" || base == "ccomp" || base == "csubj" || base == "acl" ||
         base == "xcomp" || base == "parataxis";
}

Span ExtractSpan(std::size_t token, ExtentPolicy policy, const Sentence &sentence) {
  Span single{sentence.index, token, token + 1};
  switch (policy) {
    case ExtentPolicy::kTokenOnly:
      return single;
    case ExtentPolicy::kEnclosingChunk: {
      const Span *best = nullptr;
      for (const Span &chunk : sentence.chunks) {
        if (chunk.start <= token && token < chunk.end &&
            (!best || chunk.size() < best->size())) {
          best = &chunk;
        }
      }
      return best ? Span{sentence.index, best->start, best->end} : single;
    }
    case ExtentPolicy::kSubtree:
    case ExtentPolicy::kSubtreeWithoutClausalDependents: {
      std::vector<std::vector<std::size_t>> children(sentence.size());
      for (const Token &t : sentence.tokens) {
        if (!t.IsRoot() && t.head < sentence.size()) children[t.head].push_back(t.index);
      }
      std::size_t lo = token, hi = token;
      CollectSubtree(children, sentence, token,
                     policy == ExtentPolicy::kSubtreeWithoutClausalDependents, lo, hi);
      return Span{sentence.index, lo, hi + 1};
    }
  }
  return single;
}

}  // namespace cae
