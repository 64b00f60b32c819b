//! Property tests for the library's cross-cutting invariants.

use deteval_core::corpus::{dedup_pairs, stratified_split, Label, PairRecord, TextSample};
use deteval_core::features::{punctuation_entropy, FeatureExtractor};
use deteval_core::judge::{constrained_score, hybrid_ensemble, JudgeConfig, Polarity};
use deteval_core::metrics::{auroc, brier, eer, log_loss, separation, ScoredSample};
use deteval_core::scorer::{normalize_scores, perplexity, NormMethod, TokenLogProbs};
use proptest::prelude::*;

fn scored_samples() -> impl Strategy<Value = Vec<ScoredSample>> {
    // at least one of each class, scores on a coarse grid to exercise ties
    (
        prop::collection::vec((any::<bool>(), 0..=20u32), 2..40),
        0..=20u32,
        0..=20u32,
    )
        .prop_map(|(body, human_score, llm_score)| {
            let mut samples = vec![
                ScoredSample::new("anchor-h", Label::Human, human_score as f64 / 20.0).unwrap(),
                ScoredSample::new("anchor-l", Label::Llm, llm_score as f64 / 20.0).unwrap(),
            ];
            for (i, (is_llm, grid)) in body.into_iter().enumerate() {
                let label = if is_llm { Label::Llm } else { Label::Human };
                samples
                    .push(ScoredSample::new(format!("s{i}"), label, grid as f64 / 20.0).unwrap());
            }
            samples
        })
}

proptest! {
    #[test]
    fn normalized_scores_stay_in_unit_interval(
        values in prop::collection::vec(0.01f64..10_000.0, 2..50),
        method_idx in 0usize..4,
        invert in any::<bool>(),
    ) {
        let method = [
            NormMethod::Rank,
            NormMethod::LogRank,
            NormMethod::Minmax,
            NormMethod::Sigmoid,
        ][method_idx];
        let raw: Vec<(String, f64)> = values
            .iter()
            .enumerate()
            .map(|(i, &v)| (format!("s{i}"), v))
            .collect();
        let out = normalize_scores(&raw, method, invert).unwrap();
        prop_assert!(out.iter().all(|(_, s)| (0.0..=1.0).contains(s)));
    }

    #[test]
    fn rank_normalization_of_distinct_values_is_equally_spaced(
        perm_seed in 0u64..1000,
        n in 2usize..40,
    ) {
        // distinct raw values in a shuffled order
        let mut values: Vec<f64> = (0..n).map(|i| (i as f64 + 1.0) * 1.7).collect();
        let shift = (perm_seed as usize) % n;
        values.rotate_left(shift);
        let raw: Vec<(String, f64)> = values
            .iter()
            .enumerate()
            .map(|(i, &v)| (format!("s{i}"), v))
            .collect();
        let out = normalize_scores(&raw, NormMethod::Rank, false).unwrap();
        let mut scores: Vec<f64> = out.iter().map(|(_, s)| *s).collect();
        scores.sort_by(f64::total_cmp);
        for (k, s) in scores.iter().enumerate() {
            let expect = (k as f64 + 0.5) / n as f64;
            prop_assert!((s - expect).abs() < 1e-12);
        }
    }

    #[test]
    fn score_flip_maps_the_metric_suite(samples in scored_samples()) {
        let flipped: Vec<ScoredSample> = samples
            .iter()
            .map(|s| ScoredSample::new(s.id.clone(), s.label, 1.0 - s.score).unwrap())
            .collect();
        let a = auroc(&samples).unwrap();
        let a_flip = auroc(&flipped).unwrap();
        prop_assert!((a + a_flip - 1.0).abs() < 1e-12);

        let e = eer(&samples).unwrap();
        let e_flip = eer(&flipped).unwrap();
        prop_assert!((e - e_flip).abs() < 1e-9, "eer {e} vs flipped {e_flip}");

        let sep = separation(&samples).unwrap();
        let sep_flip = separation(&flipped).unwrap();
        prop_assert!((sep + sep_flip).abs() < 1e-12);
    }

    #[test]
    fn brier_bounded_and_log_loss_nonnegative(samples in scored_samples()) {
        let b = brier(&samples);
        prop_assert!((0.0..=1.0).contains(&b));
        prop_assert!(log_loss(&samples) >= 0.0);
    }

    #[test]
    fn polarity_complement_for_all_logits(
        yes in -30.0f64..30.0,
        no in -30.0f64..30.0,
    ) {
        let std = constrained_score(yes, no, Polarity::Standard, None).unwrap();
        let swp = constrained_score(yes, no, Polarity::Swapped, None).unwrap();
        prop_assert!((std + swp - 1.0).abs() < 1e-12);
        prop_assert!((0.0..=1.0).contains(&std));
    }

    #[test]
    fn hybrid_ensemble_stays_in_unit_interval(
        conf in proptest::option::of(0.0f64..=1.0),
        logit in 0.0f64..=1.0,
    ) {
        let out = hybrid_ensemble(conf, logit, &JudgeConfig::default()).unwrap();
        prop_assert!((0.0..=1.0).contains(&out));
    }

    #[test]
    fn constant_logprob_perplexity_closed_form(
        logprob in -8.0f64..-0.01,
        t in 1usize..600,
    ) {
        let tokens = (0..t).map(|i| format!("t{i}")).collect();
        let lp = TokenLogProbs::new("s", tokens, vec![logprob; t]).unwrap();
        let result = perplexity(&lp, 128, 64, f64::INFINITY).unwrap();
        prop_assert!((result.ppl - (-logprob).exp()).abs() < 1e-9);
    }

    #[test]
    fn dedup_is_idempotent(questions in prop::collection::vec(0u32..12, 1..30)) {
        let pairs: Vec<PairRecord> = questions
            .iter()
            .enumerate()
            .map(|(i, q)| {
                PairRecord::new(
                    format!("p{i}"),
                    format!("question {q}"),
                    TextSample::new(format!("p{i}-h"), "human words", Label::Human, "d", "m")
                        .unwrap(),
                    TextSample::new(format!("p{i}-l"), "llm words", Label::Llm, "d", "m")
                        .unwrap(),
                )
                .unwrap()
            })
            .collect();
        let once = dedup_pairs(pairs);
        let ids: Vec<String> = once.iter().map(|p| p.question_id.clone()).collect();
        let twice = dedup_pairs(once);
        let ids_twice: Vec<String> = twice.iter().map(|p| p.question_id.clone()).collect();
        prop_assert_eq!(ids, ids_twice);
    }

    #[test]
    fn stratified_split_partitions_every_id(
        per_class in 2usize..30,
        seed in any::<u64>(),
    ) {
        let mut samples = Vec::new();
        for i in 0..per_class {
            samples.push(
                TextSample::new(format!("h{i}"), "a b c", Label::Human, "d", "m").unwrap(),
            );
            samples.push(
                TextSample::new(format!("l{i}"), "a b c", Label::Llm, "d", "m").unwrap(),
            );
        }
        let split = stratified_split(&samples, 0.5, seed).unwrap();
        let mut seen: Vec<String> = split
            .train
            .iter()
            .chain(&split.test)
            .map(|s| s.id.clone())
            .collect();
        seen.sort();
        let mut expect: Vec<String> = samples.iter().map(|s| s.id.clone()).collect();
        expect.sort();
        prop_assert_eq!(seen, expect);
    }

    #[test]
    fn fewshot_always_returns_the_contracted_class_counts(
        k in 1usize..8,
        pool_per_class in 4usize..10,
        word_seed in 0u32..50,
    ) {
        use deteval_core::judge::retrieve_fewshot;
        let mut pool = Vec::new();
        for i in 0..pool_per_class {
            let filler = (word_seed + i as u32) % 7;
            pool.push(
                TextSample::new(
                    format!("h{i}"),
                    format!("human words {filler} more text {i}"),
                    Label::Human,
                    "d",
                    "m",
                )
                .unwrap(),
            );
            pool.push(
                TextSample::new(
                    format!("l{i}"),
                    format!("llm words {filler} other text {i}"),
                    Label::Llm,
                    "d",
                    "m",
                )
                .unwrap(),
            );
        }
        let out = retrieve_fewshot("human words query", &pool, k).unwrap();
        prop_assert_eq!(out.len(), k);
        let humans = out.iter().filter(|s| s.label == Label::Human).count();
        let llms = out.iter().filter(|s| s.label == Label::Llm).count();
        prop_assert_eq!(humans, k.div_ceil(2));
        prop_assert_eq!(llms, k / 2);
    }

    #[test]
    fn density_features_bounded_on_arbitrary_text(
        words in prop::collection::vec("[a-z]{1,8}", 1..60),
        punct_seed in 0u64..100,
    ) {
        let mut text = String::new();
        for (i, w) in words.iter().enumerate() {
            text.push_str(w);
            match (punct_seed as usize + i) % 7 {
                0 => text.push('.'),
                1 => text.push(','),
                2 => text.push('!'),
                _ => {}
            }
            text.push(' ');
        }
        let extractor = FeatureExtractor::default();
        let fv = extractor.classical("s", &text).unwrap();
        for name in [
            "type_token_ratio",
            "hapax_ratio",
            "comma_density",
            "period_density",
            "question_ratio",
            "exclamation_ratio",
            "bigram_repetition",
            "trigram_repetition",
            "hedging_density",
            "certainty_density",
            "connector_density",
            "contraction_ratio",
        ] {
            let v = fv.value(name).unwrap();
            prop_assert!((0.0..=1.0).contains(&v), "{} = {}", name, v);
        }
        for name in ["word_entropy", "sentence_length_entropy"] {
            prop_assert!(fv.value(name).unwrap() >= 0.0);
        }
        // punctuation entropy bounded by log2 of distinct punctuation marks
        let distinct = {
            let mut set: Vec<char> =
                text.chars().filter(|c| c.is_ascii_punctuation()).collect();
            set.sort_unstable();
            set.dedup();
            set.len()
        };
        let bound = if distinct == 0 { 0.0 } else { (distinct as f64).log2() };
        prop_assert!(punctuation_entropy(&text) <= bound + 1e-12);
    }
}
