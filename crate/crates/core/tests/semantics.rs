//! Independent evaluation paths over the same structures must agree.

use std::collections::BTreeMap;

use mereology::formula::{parse_sentence, TheoryMode};
use mereology::models::ModelHandle;
use mereology::oracle::{brute_eval_finite, generate_corpus, CorpusConfig};
use mereology::qe::decide;

const CLASS: TheoryMode = TheoryMode::ClassMereology;
const SET: TheoryMode = TheoryMode::SetMereology;

#[test]
fn finite_algebras_agree_with_brute_force() {
    let corpus = generate_corpus(&CorpusConfig::new(CLASS, 150, 31));
    for f in &corpus {
        for n in [0u32, 1, 2, 5, 9] {
            let by_profiles = ModelHandle::finite_ba(n).eval(f, &BTreeMap::new()).unwrap();
            let by_counting = brute_eval_finite(n, f, &BTreeMap::new()).unwrap();
            assert_eq!(by_profiles, by_counting, "ba{n}: {f}");
        }
    }
}

#[test]
fn saturated_algebra_agrees_with_decide() {
    for f in generate_corpus(&CorpusConfig::new(CLASS, 200, 32)) {
        let e = ModelHandle::SATURATED_BA.eval(&f, &BTreeMap::new()).unwrap();
        assert_eq!(e, decide(&f, CLASS).unwrap(), "{f}");
    }
}

#[test]
fn finite_sets_realize_every_finite_fragment_of_infinitude() {
    for k in 0..=32u32 {
        let parts: Vec<String> = (0..=k).map(|i| format!("~(|x| = {i})")).collect();
        let text = format!("E x. ({})", parts.join(" & "));
        let f = parse_sentence(&text, SET).unwrap();
        assert!(decide(&f, SET).unwrap(), "{text}");
        assert!(ModelHandle::PRIME.eval(&f, &BTreeMap::new()).unwrap(), "{text}");
    }
}
