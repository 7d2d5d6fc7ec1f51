#include "cae/pipeline.h"

#include <algorithm>
#include <deque>
#include <tuple>

#include "cae/text.h"

namespace cae {
namespace {

constexpr std::size_t kFar = kRoot;

MarkerPhrase Phrase(std::string_view text) {
  MarkerPhrase phrase;
  for (const std::string &w : Split(text, ' ')) {
    if (!w.empty()) phrase.push_back(CaseFold(w));
  }
  return phrase;
}

std::vector<MarkerPhrase> Phrases(std::initializer_list<std::string_view> texts) {
  std::vector<MarkerPhrase> out;
  for (std::string_view t : texts) out.push_back(Phrase(t));
  return out;
}

bool TokenMatches(const Token &token, const std::string &word) {
  return CaseFold(token.lemma) == word || CaseFold(token.surface) == word;
}

bool IsCueBearingUpos(std::string_view upos) {
  return upos == "VERB" || upos == "ADJ" || upos == "NOUN" || upos == "ADV";
}

std::string_view BaseDeprel(std::string_view deprel) {
  return deprel.substr(0, deprel.find(':'));
}

// Shortest tree distance between any token of `a` and any token of `b`.
std::size_t SpanDistance(const std::vector<std::vector<std::size_t>> &dist,
                         const Span &a, const Span &b) {
  std::size_t best = kFar;
  for (std::size_t i = a.start; i < a.end; ++i) {
    for (std::size_t j = b.start; j < b.end; ++j) best = std::min(best, dist[i][j]);
  }
  return best;
}

// Nearest cue to `span` (leftmost on ties) within `limit` hops.
std::optional<std::size_t> NearestCue(const std::vector<std::vector<std::size_t>> &dist,
                                      const Span &span, const Workspace &ws,
                                      const std::vector<std::size_t> &cue_ids,
                                      std::size_t limit) {
  std::optional<std::size_t> best;
  std::size_t best_dist = kFar;
  std::size_t best_start = kFar;
  for (std::size_t id : cue_ids) {
    const RoleAnnotation *cue = nullptr;
    for (const RoleAnnotation &a : ws.annotations()) {
      if (a.id == id) cue = &a;
    }
    if (!cue) continue;
    std::size_t d = SpanDistance(dist, span, cue->span);
    if (d > limit || d == kFar) continue;
    if (d < best_dist || (d == best_dist && cue->span.start < best_start)) {
      best = id;
      best_dist = d;
      best_start = cue->span.start;
    }
  }
  return best;
}

std::vector<std::vector<std::size_t>> Children(const Sentence &sentence) {
  std::vector<std::vector<std::size_t>> children(sentence.size());
  for (const Token &t : sentence.tokens) {
    if (!t.IsRoot()) children[t.head].push_back(t.index);
  }
  return children;
}

void SubtreeTokens(const std::vector<std::vector<std::size_t>> &children,
                   std::size_t node, std::vector<bool> &in) {
  in[node] = true;
  for (std::size_t c : children[node]) SubtreeTokens(children, c, in);
}

int ProvenancePriority(std::string_view provenance, const RuleSet &rules) {
  if (const Rule *rule = rules.Find(provenance)) return rule->priority;
  if (provenance == kCorefProvenance) return -10;
  return 0;
}

}  // namespace

// --- Configuration ---------------------------------------------------------

PipelineConfig PipelineConfig::Default() {
  PipelineConfig config;
  LanguageProfile en;
  en.first_person = {"i", "me", "my", "mine", "myself", "we", "us", "our", "ours",
                     "ourselves"};
  en.causal_markers = Phrases({"because", "because of", "due to", "since"});
  en.negation_markers = Phrases({"not", "n't", "never", "no", "nor"});
  en.degree_markers = Phrases({"a little", "a bit", "a lot", "very", "really", "so",
                               "too", "extremely", "quite", "rather", "slightly",
                               "deeply", "somewhat", "totally", "completely",
                               "incredibly"});
  LanguageProfile fr;
  fr.first_person = {"je", "j'", "me", "m'", "moi", "mon", "ma", "mes", "nous",
                     "notre", "nos", "moi-même"};
  fr.causal_markers = Phrases({"parce que", "car", "à cause de", "puisque",
                               "en raison de", "grâce à"});
  fr.negation_markers = Phrases({"ne", "n'", "pas", "jamais", "non", "aucun",
                                 "aucune"});
  fr.degree_markers = Phrases({"un peu", "très", "trop", "vraiment", "assez",
                               "tellement", "extrêmement", "beaucoup", "peu",
                               "profondément", "complètement", "totalement"});
  config.languages["en"] = std::move(en);
  config.languages["fr"] = std::move(fr);
  return config;
}

LanguageProfile PipelineConfig::ProfileFor(std::string_view language) const {
  std::string primary = CaseFold(language.substr(0, language.find('-')));
  if (auto it = languages.find(primary); it != languages.end()) return it->second;
  LanguageProfile merged;
  for (const auto &[code, p] : languages) {
    merged.first_person.insert(p.first_person.begin(), p.first_person.end());
    auto append = [](std::vector<MarkerPhrase> &to, const std::vector<MarkerPhrase> &from) {
      for (const MarkerPhrase &m : from) {
        if (std::find(to.begin(), to.end(), m) == to.end()) to.push_back(m);
      }
    };
    append(merged.causal_markers, p.causal_markers);
    append(merged.negation_markers, p.negation_markers);
    append(merged.degree_markers, p.degree_markers);
  }
  return merged;
}

// --- Workspace -------------------------------------------------------------

std::size_t Workspace::Add(RoleAnnotation annotation) {
  annotation.id = next_id_++;
  annotations_.push_back(std::move(annotation));
  return annotations_.back().id;
}

RoleAnnotation *Workspace::Find(std::size_t id) {
  for (RoleAnnotation &a : annotations_) {
    if (a.id == id) return &a;
  }
  return nullptr;
}

std::vector<std::size_t> Workspace::InSentence(std::size_t sentence,
                                               RoleLabel role) const {
  std::vector<std::size_t> ids;
  for (const RoleAnnotation &a : annotations_) {
    if (a.span.sentence == sentence && a.role == role) ids.push_back(a.id);
  }
  return ids;
}

// --- Helpers ---------------------------------------------------------------

std::vector<std::vector<std::size_t>> PathLengths(const Sentence &sentence) {
  const std::size_t n = sentence.size();
  std::vector<std::vector<std::size_t>> adj(n);
  for (const Token &t : sentence.tokens) {
    if (!t.IsRoot() && t.head < n) {
      adj[t.index].push_back(t.head);
      adj[t.head].push_back(t.index);
    }
  }
  std::vector<std::vector<std::size_t>> dist(n, std::vector<std::size_t>(n, kFar));
  for (std::size_t src = 0; src < n; ++src) {
    std::deque<std::size_t> queue{src};
    dist[src][src] = 0;
    while (!queue.empty()) {
      std::size_t cur = queue.front();
      queue.pop_front();
      for (std::size_t next : adj[cur]) {
        if (dist[src][next] == kFar) {
          dist[src][next] = dist[src][cur] + 1;
          queue.push_back(next);
        }
      }
    }
  }
  return dist;
}

std::vector<Span> FindMarkers(const Sentence &sentence,
                              const std::vector<MarkerPhrase> &phrases) {
  std::vector<const MarkerPhrase *> ordered;
  for (const MarkerPhrase &p : phrases) {
    if (!p.empty()) ordered.push_back(&p);
  }
  std::stable_sort(ordered.begin(), ordered.end(),
                   [](const MarkerPhrase *a, const MarkerPhrase *b) {
                     return a->size() > b->size();
                   });
  std::vector<Span> found;
  std::size_t i = 0;
  while (i < sentence.size()) {
    std::size_t matched = 0;
    for (const MarkerPhrase *p : ordered) {
      if (i + p->size() > sentence.size()) continue;
      bool ok = true;
      for (std::size_t k = 0; k < p->size() && ok; ++k) {
        ok = TokenMatches(sentence.tokens[i + k], (*p)[k]);
      }
      if (ok) {
        matched = p->size();
        break;
      }
    }
    if (matched > 0) {
      found.push_back(Span{sentence.index, i, i + matched});
      i += matched;
    } else {
      ++i;
    }
  }
  return found;
}

// --- Stages ----------------------------------------------------------------

void DetectCues(const Sentence &sentence, const Lexicons &lexicons,
                const PipelineConfig &config, Workspace &ws) {
  for (const Token &t : sentence.tokens) {
    if (!IsCueBearingUpos(t.upos)) continue;
    auto cls = ClassifyCue(t.lemma.empty() ? t.surface : t.lemma, t.upos,
                           lexicons.emotions, lexicons.sentiment, config.cue);
    if (!cls) continue;
    RoleAnnotation cue;
    cue.role = RoleLabel::kCue;
    cue.span = Span{sentence.index, t.index, t.index + 1};
    cue.emotion = cls->category;
    cue.provenance = std::string(kCueDetector);
    ws.Add(std::move(cue));
  }
}

void DetectAttacks(const Sentence &sentence, const Lexicons &lexicons,
                   const PipelineConfig &config, Workspace &ws) {
  auto it = lexicons.term_sets.find(config.attack_set);
  if (it == lexicons.term_sets.end()) return;
  for (const Token &t : sentence.tokens) {
    if (!it->second.Contains(t.lemma.empty() ? t.surface : t.lemma)) continue;
    RoleAnnotation attack;
    attack.role = RoleLabel::kAttack;
    attack.span = Span{sentence.index, t.index, t.index + 1};
    attack.provenance = std::string(kAttackDetector);
    ws.Add(std::move(attack));
  }
}

void ApplyRules(const RuleSet &rules, const Sentence &sentence,
                const MatchContext &context, Workspace &ws) {
  auto covering = [&](RoleLabel role, std::size_t token,
                      const std::vector<std::size_t> &prefer) -> std::optional<std::size_t> {
    for (std::size_t id : prefer) {
      const RoleAnnotation *a = ws.Find(id);
      if (a && a->role == role && a->span.Contains(sentence.index, token)) return id;
    }
    for (const RoleAnnotation &a : ws.annotations()) {
      if (a.role == role && a.span.Contains(sentence.index, token)) return a.id;
    }
    return std::nullopt;
  };

  for (const Rule &rule : rules.rules) {
    if (!rule.enabled) continue;
    for (const MatchResult &match : FindMatches(rule, sentence, context)) {
      std::vector<std::size_t> produced;
      for (const Production &prod : rule.productions) {
        if (prod.require &&
            !covering(prod.require->role, match.bindings[prod.require->var], produced)) {
          continue;
        }
        RoleAnnotation a;
        a.role = prod.role;
        a.span = ExtractSpan(match.bindings[prod.var], prod.extent, sentence);
        a.provenance = rule.id;
        if (prod.link) {
          a.cue_link = covering(prod.link->role, match.bindings[prod.link->var], produced);
        }
        produced.push_back(ws.Add(std::move(a)));
      }
    }
  }
}

void DetectExperiencers(const Sentence &sentence, const LanguageProfile &profile,
                        Workspace &ws) {
  const auto dist = PathLengths(sentence);
  const std::vector<std::size_t> cues = ws.InSentence(sentence.index, RoleLabel::kCue);
  for (const Token &t : sentence.tokens) {
    if (!profile.first_person.count(CaseFold(t.surface))) continue;
    RoleAnnotation e;
    e.role = RoleLabel::kExperiencer;
    e.span = Span{sentence.index, t.index, t.index + 1};
    e.cue_link = NearestCue(dist, e.span, ws, cues, kFar - 1);
    e.provenance = std::string(kFirstPersonDetector);
    ws.Add(std::move(e));
  }
  const auto children = Children(sentence);
  for (std::size_t cue_id : cues) {
    const Span cue_span = ws.Find(cue_id)->span;
    const Token &head = sentence.tokens[cue_span.start];
    if (head.upos != "VERB") continue;
    for (std::size_t c : children[head.index]) {
      if (BaseDeprel(sentence.tokens[c].deprel) != "nsubj") continue;
      RoleAnnotation e;
      e.role = RoleLabel::kExperiencer;
      e.span = ExtractSpan(c, ExtentPolicy::kEnclosingChunk, sentence);
      e.cue_link = cue_id;
      e.provenance = std::string(kSubjectDetector);
      ws.Add(std::move(e));
    }
  }
}

void DetectTargetsAndCauses(const Sentence &sentence, const LanguageProfile &profile,
                            const PipelineConfig &config, Workspace &ws) {
  const auto children = Children(sentence);
  const std::vector<Span> markers = FindMarkers(sentence, profile.causal_markers);
  for (std::size_t cue_id : ws.InSentence(sentence.index, RoleLabel::kCue)) {
    const Span cue_span = ws.Find(cue_id)->span;
    for (std::size_t c : children[cue_span.start]) {
      const Token &dep = sentence.tokens[c];
      std::string_view base = BaseDeprel(dep.deprel);
      bool adverbial = dep.deprel == "obl:npmod" || dep.deprel == "obl:tmod";
      if ((base == "obj" || base == "iobj" || base == "obl") && !adverbial) {
        RoleAnnotation target;
        target.role = RoleLabel::kTarget;
        target.span = ExtractSpan(c, ExtentPolicy::kEnclosingChunk, sentence);
        target.cue_link = cue_id;
        target.provenance = std::string(kTargetDetector);
        ws.Add(std::move(target));
        continue;
      }
      if (!IsClausalDeprel(dep.deprel)) continue;
      std::vector<bool> in_subtree(sentence.size(), false);
      SubtreeTokens(children, c, in_subtree);
      std::vector<Span> inside;
      for (const Span &m : markers) {
        bool all = true;
        for (std::size_t k = m.start; k < m.end; ++k) all = all && in_subtree[k];
        if (all) inside.push_back(m);
      }
      if (inside.empty()) continue;
      Span span = ExtractSpan(c, ExtentPolicy::kSubtreeWithoutClausalDependents, sentence);
      if (!config.keep_marker) {
        bool trimmed = true;
        while (trimmed && span.size() > 1) {
          trimmed = false;
          for (const Span &m : inside) {
            if (m.start == span.start && m.end < span.end) {
              span.start = m.end;
              trimmed = true;
            } else if (m.end == span.end && m.start > span.start) {
              span.end = m.start;
              trimmed = true;
            }
          }
        }
      }
      RoleAnnotation cause;
      cause.role = RoleLabel::kCause;
      cause.span = span;
      cause.cue_link = cue_id;
      cause.provenance = std::string(kCauseDetector);
      ws.Add(std::move(cause));
    }
  }
}

void AttachNegationAndModifiers(const Sentence &sentence,
                                const LanguageProfile &profile,
                                const PipelineConfig &config, Workspace &ws) {
  const std::vector<std::size_t> cues = ws.InSentence(sentence.index, RoleLabel::kCue);
  if (cues.empty()) return;
  const auto dist = PathLengths(sentence);
  std::vector<Span> cue_spans;
  for (std::size_t id : cues) cue_spans.push_back(ws.Find(id)->span);
  auto overlaps_any = [](const Span &s, const std::vector<Span> &spans) {
    return std::any_of(spans.begin(), spans.end(),
                       [&](const Span &o) { return s.Overlaps(o); });
  };

  std::vector<Span> negations;
  for (const Span &m : FindMarkers(sentence, profile.negation_markers)) {
    if (overlaps_any(m, cue_spans)) continue;
    auto cue = NearestCue(dist, m, ws, cues, config.max_path);
    if (!cue) continue;
    negations.push_back(m);
    RoleAnnotation n;
    n.role = RoleLabel::kNegation;
    n.span = m;
    n.cue_link = *cue;
    n.provenance = std::string(kNegationDetector);
    ws.Add(std::move(n));
    ws.Find(*cue)->negated = true;
  }
  for (const Span &m : FindMarkers(sentence, profile.degree_markers)) {
    if (overlaps_any(m, cue_spans) || overlaps_any(m, negations)) continue;
    auto cue = NearestCue(dist, m, ws, cues, config.max_path);
    if (!cue) continue;
    RoleAnnotation mod;
    mod.role = RoleLabel::kModifier;
    mod.span = m;
    mod.cue_link = *cue;
    mod.provenance = std::string(kModifierDetector);
    ws.Add(std::move(mod));
    RoleAnnotation *target = ws.Find(*cue);
    if (!target->intensity_span) target->intensity_span = m;
  }
}

std::size_t SpanHeadToken(const Sentence &sentence, const Span &span) {
  std::size_t best = span.start;
  std::size_t best_depth = kFar;
  for (std::size_t t = span.start; t < span.end && t < sentence.size(); ++t) {
    std::size_t depth = 0;
    for (std::size_t cur = t; sentence.tokens[cur].head != kRoot &&
                              depth <= sentence.size();
         cur = sentence.tokens[cur].head) {
      ++depth;
    }
    if (depth < best_depth) {
      best = t;
      best_depth = depth;
    }
  }
  return best;
}

AnnotationSet PropagateCoref(const Document &doc, const AnnotationSet &set) {
  AnnotationSet out = set;
  std::size_t next_id = 0;
  for (const RoleAnnotation &a : out.annotations) next_id = std::max(next_id, a.id + 1);

  bool changed = true;
  while (changed) {
    changed = false;
    for (const CorefChain &chain : doc.chains) {
      for (RoleLabel role : {RoleLabel::kExperiencer, RoleLabel::kTarget}) {
        auto covered = [&](const Span &mention) {
          return std::any_of(out.annotations.begin(), out.annotations.end(),
                             [&](const RoleAnnotation &a) {
                               return a.role == role && a.span.Overlaps(mention);
                             });
        };
        if (std::none_of(chain.mentions.begin(), chain.mentions.end(), covered)) {
          continue;
        }
        for (const Span &mention : chain.mentions) {
          if (covered(mention) || !doc.IsValidSpan(mention)) continue;
          const Sentence &sentence = doc.sentences[mention.sentence];
          const auto dist = PathLengths(sentence);
          const std::size_t head = SpanHeadToken(sentence, mention);
          std::optional<std::size_t> link;
          std::size_t best = kFar, best_start = kFar;
          for (const RoleAnnotation &a : out.annotations) {
            if (a.role != RoleLabel::kCue || a.span.sentence != mention.sentence) continue;
            std::size_t d = SpanDistance(dist, Span{mention.sentence, head, head + 1}, a.span);
            if (d < best || (d == best && a.span.start < best_start)) {
              link = a.id;
              best = d;
              best_start = a.span.start;
            }
          }
          RoleAnnotation added;
          added.id = next_id++;
          added.role = role;
          added.span = mention;
          added.cue_link = link;
          added.provenance = std::string(kCorefProvenance);
          out.annotations.push_back(std::move(added));
          changed = true;
        }
      }
    }
  }
  return out;
}

AnnotationSet ResolveConflicts(const AnnotationSet &set, const RuleSet &rules) {
  using Key = std::tuple<RoleLabel, Span>;
  std::map<Key, std::size_t> keeper;  // key -> index in set.annotations
  const auto &in = set.annotations;
  for (std::size_t i = 0; i < in.size(); ++i) {
    Key key{in[i].role, in[i].span};
    auto it = keeper.find(key);
    if (it == keeper.end()) {
      keeper.emplace(key, i);
    } else if (ProvenancePriority(in[i].provenance, rules) >
               ProvenancePriority(in[it->second].provenance, rules)) {
      it->second = i;
    }
  }
  std::map<std::size_t, std::size_t> redirect;  // dropped id -> kept id
  std::map<std::size_t, RoleAnnotation> kept;   // kept index -> merged record
  for (std::size_t i = 0; i < in.size(); ++i) {
    std::size_t k = keeper.at(Key{in[i].role, in[i].span});
    kept.emplace(k, in[k]);
    if (k != i) redirect[in[i].id] = in[k].id;
  }
  for (std::size_t i = 0; i < in.size(); ++i) {
    std::size_t k = keeper.at(Key{in[i].role, in[i].span});
    if (k == i) continue;
    RoleAnnotation &merged = kept.at(k);
    if (!merged.cue_link && in[i].cue_link) merged.cue_link = in[i].cue_link;
    if (!merged.emotion && in[i].emotion) merged.emotion = in[i].emotion;
    if (!merged.intensity_span && in[i].intensity_span) {
      merged.intensity_span = in[i].intensity_span;
    }
    merged.negated = merged.negated || in[i].negated;
  }
  AnnotationSet out;
  out.document_id = set.document_id;
  for (auto &[index, a] : kept) {
    if (a.cue_link) {
      if (auto it = redirect.find(*a.cue_link); it != redirect.end()) {
        a.cue_link = it->second;
      }
    }
    out.annotations.push_back(a);
  }
  return out;
}

AnnotationSet AnnotateDocument(const Document &doc, const RuleSet &rules,
                               const Lexicons &lexicons, const PipelineConfig &config) {
  const LanguageProfile profile = config.ProfileFor(doc.language);
  MatchContext context{&profile.first_person, &lexicons.emotions};
  Workspace ws;
  for (const Sentence &s : doc.sentences) {
    DetectCues(s, lexicons, config, ws);
    DetectAttacks(s, lexicons, config, ws);
    ApplyRules(rules, s, context, ws);
    DetectExperiencers(s, profile, ws);
    DetectTargetsAndCauses(s, profile, config, ws);
    AttachNegationAndModifiers(s, profile, config, ws);
  }
  AnnotationSet set;
  set.document_id = doc.id;
  set.annotations = ws.annotations();
  set = PropagateCoref(doc, set);
  if (config.conflict == ConflictPolicy::kCollapseIdentical) {
    set = ResolveConflicts(set, rules);
  }
  return Canonicalize(set);
}

}  // namespace cae
