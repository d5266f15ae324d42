use rand::Rng;

use super::{Complement, Polarity, Proposition, PropositionKind, RelTo, RhetoricalRelation};
use crate::nlg::lexical::SynonymLexicon;
use crate::nlg::params::set_stage;
use crate::nlg::{GenerationParams, Param};
use crate::rng::{fires, GenRng};
use crate::Error;

/// Distance from 0.5 at which CONTENT POLARITY stops merely ordering
/// supports and starts dropping those of the other polarity.
pub const POLARITY_FILTER_MARGIN: f64 = 0.3;

/// Number of propositions kept out of `n` at the given VERBOSITY:
/// `ceil(1 + verbosity * (n - 1))`, clamped to `1..=n`.
pub fn selection_size(n: usize, verbosity: f64) -> usize {
    if n == 0 {
        return 0;
    }
    let k = (1.0 + verbosity.clamp(0.0, 1.0) * (n - 1) as f64).ceil() as usize;
    k.clamp(1, n)
}

fn preferred(value: f64) -> Option<Polarity> {
    if value > 0.5 {
        Some(Polarity::Positive)
    } else if value < 0.5 {
        Some(Polarity::Negative)
    } else {
        None
    }
}

/// Chooses and orders what to say about one feature.
///
/// The steps, in order:
///
/// 1. Keep the claim and the first `selection_size(n, VERBOSITY) - 1`
///    supports after a stable sort that puts supports of the polarity
///    preferred by CONTENT POLARITY first. When CONTENT POLARITY is at least
///    [`POLARITY_FILTER_MARGIN`] away from 0.5, supports of the other
///    polarity are dropped outright. Kept propositions retain input order.
/// 2. POLARISATION: intensify every non-negated graded predicate ("very").
/// 3. CONCESSIONS: relabel one support as a concession, preferring the
///    polarity named by CONCESSIONS POLARITY.
/// 4. POSITIVE CONTENT FIRST: stable partition, positive before negative.
/// 5. REPETITIONS: repeat one proposition verbatim right after itself.
/// 6. RESTATEMENTS: paraphrase one proposition with synonyms right after
///    itself. Both 5 and 6 pick among propositions of the polarity named by
///    REPETITIONS POLARITY when there are any.
///
/// Steps 2 to 6 each draw one firing decision from `rng`, so selection in
/// step 1 never depends on the seed.
pub fn plan_content(
    props: &[Proposition],
    params: &GenerationParams,
    synonyms: &SynonymLexicon,
    rng: &mut GenRng,
) -> Result<Vec<Proposition>, Error> {
    set_stage("plan_content");
    if props.is_empty() {
        return Err(Error::Validation("cannot plan an empty proposition set".into()));
    }
    let claim_index = props
        .iter()
        .position(|p| p.kind == PropositionKind::Claim)
        .ok_or_else(|| Error::Validation("proposition set has no claim".into()))?;

    let k = selection_size(props.len(), params.get(Param::Verbosity));
    let content_polarity = params.get(Param::ContentPolarity);
    let strict = (content_polarity - 0.5).abs() >= POLARITY_FILTER_MARGIN;
    let want = preferred(content_polarity);
    let mut supports: Vec<usize> = (0..props.len())
        .filter(|&i| i != claim_index)
        .filter(|&i| !strict || want.map_or(true, |w| props[i].polarity == w))
        .collect();
    supports.sort_by_key(|&i| usize::from(want.is_some_and(|w| props[i].polarity != w)));
    let mut chosen: Vec<usize> = std::iter::once(claim_index)
        .chain(supports.into_iter().take(k - 1))
        .collect();
    chosen.sort_unstable();
    let mut plan: Vec<Proposition> = chosen.into_iter().map(|i| props[i].clone()).collect();

    if fires(params.get(Param::Polarisation), rng) {
        for p in plan.iter_mut().filter(|p| !p.predicate.negated) {
            let graded = match &p.predicate.complement {
                Complement::Noun(np) => !np.modifiers.is_empty(),
                Complement::Adjective { .. } => true,
            };
            if graded {
                p.predicate.intensifier = Some("very".into());
            }
        }
    }

    if fires(params.get(Param::Concessions), rng) {
        let want = if params.get(Param::ConcessionsPolarity) >= 0.5 {
            Polarity::Positive
        } else {
            Polarity::Negative
        };
        let is_support = |p: &Proposition| p.kind == PropositionKind::Support && p.rel_to.is_some();
        let pick = plan
            .iter()
            .position(|p| is_support(p) && p.polarity == want)
            .or_else(|| plan.iter().position(|p| is_support(p)));
        if let Some(i) = pick {
            if let Some(rel) = plan[i].rel_to.as_mut() {
                rel.relation = RhetoricalRelation::Concede;
            }
        }
    }

    if fires(params.get(Param::PositiveContentFirst), rng) {
        let (pos, neg): (Vec<_>, Vec<_>) = plan.into_iter().partition(|p| p.polarity == Polarity::Positive);
        plan = pos.into_iter().chain(neg).collect();
    }

    let repetition_polarity = preferred(params.get(Param::RepetitionsPolarity));
    let candidates = |plan: &[Proposition]| -> Vec<usize> {
        let originals: Vec<usize> = (0..plan.len())
            .filter(|&i| plan[i].rel_to.as_ref().map_or(true, |r| r.relation != RhetoricalRelation::Restate))
            .collect();
        let matching: Vec<usize> = originals
            .iter()
            .copied()
            .filter(|&i| repetition_polarity.map_or(true, |w| plan[i].polarity == w))
            .collect();
        if matching.is_empty() {
            originals
        } else {
            matching
        }
    };

    if fires(params.get(Param::Repetitions), rng) {
        let pool = candidates(&plan);
        let i = pool[rng.gen_range(0..pool.len())];
        let copy = restatement_of(&plan[i], "rep");
        plan.insert(i + 1, copy);
    }

    if fires(params.get(Param::Restatements), rng) {
        let mut pool = candidates(&plan);
        let start = rng.gen_range(0..pool.len());
        pool.rotate_left(start);
        for i in pool {
            if let Some(mut copy) = paraphrase(&plan[i], synonyms, rng) {
                copy.paraphrase = true;
                let at = plan
                    .iter()
                    .rposition(|p| p.id == plan[i].id || p.rel_to.as_ref().is_some_and(|r| r.target == plan[i].id && r.relation == RhetoricalRelation::Restate))
                    .unwrap_or(i);
                plan.insert(at + 1, copy);
                break;
            }
        }
    }

    Ok(plan)
}

fn restatement_of(p: &Proposition, tag: &str) -> Proposition {
    let mut copy = p.clone();
    copy.id = format!("{}/{tag}", p.id);
    copy.kind = PropositionKind::Support;
    copy.rel_to = Some(RelTo {
        target: p.id.clone(),
        relation: RhetoricalRelation::Restate,
    });
    copy
}

/// Swaps predicate words for synonyms; `None` when nothing can change.
fn paraphrase(p: &Proposition, synonyms: &SynonymLexicon, rng: &mut GenRng) -> Option<Proposition> {
    let mut copy = restatement_of(p, "res");
    let mut changed = false;
    let mut swap = |word: &mut String, rng: &mut GenRng| {
        let options = synonyms.alternatives(word);
        if !options.is_empty() {
            *word = options[rng.gen_range(0..options.len())].to_string();
            changed = true;
        }
    };
    match &mut copy.predicate.complement {
        Complement::Noun(np) => {
            for m in np.modifiers.iter_mut() {
                swap(m, rng);
            }
            swap(&mut np.head, rng);
        }
        Complement::Adjective { adjective } => swap(adjective, rng),
    }
    changed.then_some(copy)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::content::{explain_feature, FeatureCategory, MalwareFeature};
    use crate::rng::seeded;
    use crate::Config;
    use proptest::prelude::*;

    fn sms() -> Vec<Proposition> {
        let config = Config::shipped();
        explain_feature(&MalwareFeature::new("SEND_SMS", FeatureCategory::Permission), &config.lexicon)
    }

    fn camera() -> Vec<Proposition> {
        let config = Config::shipped();
        explain_feature(&MalwareFeature::new("CAMERA", FeatureCategory::Permission), &config.lexicon)
    }

    /// Neutral apart from `set`, with every probabilistic content decision off.
    fn params(set: &[(Param, f64)]) -> GenerationParams {
        let mut p = GenerationParams::neutral();
        for q in [
            Param::Restatements,
            Param::Repetitions,
            Param::Concessions,
            Param::Polarisation,
            Param::PositiveContentFirst,
        ] {
            p.set(q, 0.0);
        }
        for &(q, v) in set {
            p.set(q, v);
        }
        p
    }

    fn plan(props: &[Proposition], p: &GenerationParams, seed: u64) -> Vec<Proposition> {
        plan_content(props, p, &Config::shipped().synonyms, &mut seeded(seed)).unwrap()
    }

    #[test]
    fn verbosity_extremes() {
        let props = sms();
        let only = plan(&props, &params(&[(Param::Verbosity, 0.0)]), 1);
        assert_eq!(only.len(), 1);
        assert_eq!(only[0].kind, PropositionKind::Claim);
        let all = plan(&props, &params(&[(Param::Verbosity, 1.0)]), 1);
        assert_eq!(all, props);
    }

    #[test]
    fn half_verbosity_replays_procedure() {
        // n = 3: keep ceil(1 + 0.5 * 2) = 2, i.e. the claim and the first support.
        let props = sms();
        let got = plan(&props, &params(&[(Param::Verbosity, 0.5)]), 5);
        assert_eq!(got, vec![props[0].clone(), props[1].clone()]);
        // With a positive preference the positive support jumps the queue.
        let props = camera();
        let got = plan(&props, &params(&[(Param::Verbosity, 0.3), (Param::ContentPolarity, 0.6)]), 5);
        assert_eq!(got.iter().map(|p| p.id.as_str()).collect::<Vec<_>>(), ["CAMERA#0", "CAMERA#3"]);
    }

    #[test]
    fn strict_polarity_filters() {
        let props = camera();
        let neg = plan(&props, &params(&[(Param::Verbosity, 1.0), (Param::ContentPolarity, 0.1)]), 1);
        assert!(neg.iter().all(|p| p.polarity == Polarity::Negative));
        assert_eq!(neg.len(), 3);
    }

    #[test]
    fn empty_or_claimless_input() {
        let synonyms = Config::shipped().synonyms;
        let p = GenerationParams::neutral();
        assert!(plan_content(&[], &p, &synonyms, &mut seeded(0)).is_err());
        let supports: Vec<_> = sms().into_iter().skip(1).collect();
        assert!(plan_content(&supports, &p, &synonyms, &mut seeded(0)).is_err());
    }

    #[test]
    fn repetition_and_restatement() {
        let props = sms();
        let p = params(&[(Param::Verbosity, 1.0), (Param::Repetitions, 1.0)]);
        let got = plan(&props, &p, 3);
        assert_eq!(got.len(), 4);
        let copy = got.iter().find(|q| q.id.ends_with("/rep")).unwrap();
        let original = got.iter().find(|q| q.id == copy.rel_to.as_ref().unwrap().target).unwrap();
        assert_eq!(copy.predicate, original.predicate);

        let p = params(&[(Param::Verbosity, 1.0), (Param::Restatements, 1.0)]);
        let got = plan(&props, &p, 3);
        let copy = got.iter().find(|q| q.id.ends_with("/res")).unwrap();
        let original = got.iter().find(|q| q.id == copy.rel_to.as_ref().unwrap().target).unwrap();
        assert_ne!(copy.predicate, original.predicate);
        assert!(copy.paraphrase);
    }

    #[test]
    fn concession_relabels_a_support() {
        let props = camera();
        let p = params(&[(Param::Verbosity, 1.0), (Param::Concessions, 1.0), (Param::ConcessionsPolarity, 1.0)]);
        let got = plan(&props, &p, 3);
        let conceded: Vec<_> = got
            .iter()
            .filter(|q| q.rel_to.as_ref().is_some_and(|r| r.relation == RhetoricalRelation::Concede))
            .collect();
        assert_eq!(conceded.len(), 1);
        assert_eq!(conceded[0].polarity, Polarity::Positive);
    }

    #[test]
    fn polarisation_intensifies() {
        let got = plan(&sms(), &params(&[(Param::Verbosity, 1.0), (Param::Polarisation, 1.0)]), 3);
        assert_eq!(got[0].predicate.intensifier.as_deref(), Some("very"));
        assert_eq!(got[1].predicate.intensifier, None);
    }

    fn arb_params() -> impl Strategy<Value = GenerationParams> {
        proptest::collection::vec(0.0f64..=1.0, Param::ALL.len()).prop_map(|values| {
            let mut p = GenerationParams::neutral();
            for (q, v) in Param::ALL.into_iter().zip(values) {
                p.set(q, v);
            }
            p
        })
    }

    proptest! {
        #[test]
        fn claim_survives(p in arb_params(), seed in any::<u64>(), which in 0usize..2) {
            let props = if which == 0 { sms() } else { camera() };
            let got = plan(&props, &p, seed);
            prop_assert!(got.iter().any(|q| q.kind == PropositionKind::Claim));
            prop_assert_eq!(got.clone(), plan(&props, &p, seed));
        }

        #[test]
        fn size_monotone_in_verbosity(p in arb_params(), seed in any::<u64>(), a in 0.0f64..=1.0, b in 0.0f64..=1.0) {
            let (lo, hi) = if a <= b { (a, b) } else { (b, a) };
            let props = camera();
            let mut p_lo = p.clone();
            p_lo.set(Param::Verbosity, lo);
            let mut p_hi = p;
            p_hi.set(Param::Verbosity, hi);
            prop_assert!(plan(&props, &p_lo, seed).len() <= plan(&props, &p_hi, seed).len());
        }

        #[test]
        fn positive_first_holds(p in arb_params(), seed in any::<u64>()) {
            let mut p = p;
            p.set(Param::PositiveContentFirst, 1.0);
            let got = plan(&camera(), &p, seed);
            let first_negative = got.iter().position(|q| q.polarity == Polarity::Negative);
            let last_positive = got.iter().rposition(|q| q.polarity == Polarity::Positive);
            if let (Some(n), Some(pos)) = (first_negative, last_positive) {
                prop_assert!(pos < n);
            }
        }
    }
}
