#pragma once

// Hand-traced parse -> cloze fixtures for the syntactic rewriter.

#include <string>
#include <vector>

namespace cloze::testing {

struct RewriteFixture {
  const char* name;
  const char* ptb;
  const char* cloze;
  bool drop_aux = false;
};

inline const std::vector<RewriteFixture>& rewrite_fixtures() {
  static const std::vector<RewriteFixture> fixtures{
      {"coordinated SQ: the conjunction moves forward",
       "(SBARQ (WHADVP (WRB Where)) (SQ (VP (VBZ is) (NP (DT a) (JJ good) (NN idea))) (CC but) (VP (RB not) (VBN "
       "required) (S (VP (TO to) (VP (VB have) (NP (DT a) (NN fire) (NN extinguisher))))))) (. ?))",
       "But is a good idea not required to have a fire extinguisher at [MASK]."},
      {"object question, literal auxiliary",
       "(SBARQ (WHNP (WP What)) (SQ (VBP do) (NP (NNS people)) (VP (VBP aim) (S (VP (TO to) (VP (VB do) (PP (IN at) "
       "(NP (NN work)))))))) (. ?))",
       "People do aim to do at work [MASK]."},
      {"object question, auxiliary dropped",
       "(SBARQ (WHNP (WP What)) (SQ (VBP do) (NP (NNS people)) (VP (VBP aim) (S (VP (TO to) (VP (VB do) (PP (IN at) "
       "(NP (NN work)))))))) (. ?))",
       "People aim to do at work [MASK].", true},
      {"no SQ node", "(S (NP (WP What)) (VP (VBD happened) (ADVP (RB next))) (. ?))", "[MASK] happened next."},
      {"why -> because",
       "(SBARQ (WHADVP (WRB Why)) (SQ (MD would) (NP (PRP you)) (VP (VB be) (VP (VBG watching) (NP (NN TV))))) (. ?))",
       "You would be watching TV because [MASK]."},
      {"how -> by",
       "(SBARQ (WHADVP (WRB How)) (SQ (VBZ is) (NP (VBG riding) (DT a) (NN bike)) (VP (VBG getting) (S (NP (PRP it)) "
       "(VP (TO to) (VP (VB move)))))) (. ?))",
       "Riding a bike is getting it to move by [MASK]."},
      {"where -> at, embedded relative clause",
       "(SBARQ (WHADVP (WRB Where)) (SQ (MD could) (NP (PRP you)) (VP (VB find) (NP (NP (DT a) (NN toilet)) (SBAR "
       "(WHNP (WDT that)) (S (NP (RB only) (NNS friends)) (VP (MD can) (VP (VB use)))))))) (. ?))",
       "You could find a toilet that only friends can use at [MASK]."},
      {"multi-token wh-phrase keeps modifiers",
       "(SBARQ (WHNP (WDT What) (NN island) (NN country)) (SQ (VBZ is) (NP (NN ferret)) (ADJP (JJ popular))) (. ?))",
       "Ferret is popular [MASK] island country."},
      {"how many -> bare mask",
       "(SBARQ (WHNP (WHADJP (WRB How) (JJ many)) (NNS legs)) (SQ (VBP do) (NP (NNS dogs)) (VP (VB have))) (. ?))",
       "Dogs do have [MASK] legs."},
      {"when -> when",
       "(SBARQ (WHADVP (WRB When)) (SQ (VBZ does) (NP (DT a) (NN baker)) (VP (VB wake) (PRT (RP up)))) (. ?))",
       "A baker does wake up when [MASK]."},
      {"proper noun keeps its case", "(SBARQ (WHNP (WP Who)) (SQ (VBD did) (NP (NNP John)) (VP (VB see))) (. ?))",
       "John did see [MASK]."},
      {"yes/no question: initial word lowered, wh-word found by fallback",
       "(S (SQ (VBZ Does) (NP (PRP it)) (VP (VB matter) (SBAR (WHNP (WP what)) (S (NP (PRP he)) (VP (VBZ thinks)))))) "
       "(. ?))",
       "It does matter [MASK] he thinks."},
  };
  return fixtures;
}

}  // namespace cloze::testing
