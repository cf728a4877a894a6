//! Property checks shared by the proptest suite and the acceptance harness.

use freegad::encoder::{self, gate_weights, propagate};
use freegad::scoring::{anchor_distances, anchor_statistics};
use freegad::{
    auprc, auroc, final_scores, select_anchors, AnchorSet, EncoderConfig, FeatureMatrix, LabeledScores, ScoringConfig,
    SimilarityMode, SparseGraph, StatMode,
};
use proptest::prelude::*;
use proptest::test_runner::{Config, RngAlgorithm, TestCaseError, TestRng, TestRunner};

use super::{brute_auprc, brute_auroc, dense, max_rel_err, random_instance};

pub type Check = fn(u32) -> Result<(), String>;

/// Every property, by name.
pub const ALL: &[(&str, Check)] = &[
    ("graph symmetric and canonical", graph_symmetric),
    ("graph independent of edge order", graph_edge_order_independent),
    ("spmv matches dense multiply", spmv_matches_dense),
    ("softmax rows sum to one", softmax_rows_sum_to_one),
    ("softmax monotone in own affinity", softmax_monotone),
    ("gated layers per-coordinate convex", gated_layers_convex),
    ("identity graph encodes to raw features", identity_graph_encodes_exactly),
    ("encode deterministic", encode_deterministic),
    ("anchors disjoint with exact cardinality", anchors_disjoint_and_ranked),
    ("anchors invariant under increasing transforms", anchors_monotone_invariant),
    ("anchors permutation equivariant", anchors_permutation_equivariant),
    ("positive anchors have zero minimum distance", positive_anchor_zero_min),
    ("scores translation invariant", scores_translation_invariant),
    ("scores consistent with parts", scores_consistent),
    ("ranking invariant under weight rescaling", ranking_rescale_invariant),
    ("metrics match brute force", metrics_match_brute_force),
    ("metrics invariant under increasing transforms", metrics_monotone_invariant),
    ("auroc of negated scores complements", auroc_negation_complements),
];

pub fn check<S: Strategy>(
    cases: u32,
    strategy: S,
    test: impl Fn(S::Value) -> Result<(), TestCaseError>,
) -> Result<(), String> {
    let config = Config {
        cases,
        failure_persistence: None,
        ..Config::default()
    };
    let mut runner = TestRunner::new_with_rng(config, TestRng::deterministic_rng(RngAlgorithm::ChaCha));
    runner.run(&strategy, test).map_err(|e| e.to_string())
}

fn graph_strategy() -> impl Strategy<Value = (usize, Vec<(usize, usize)>)> {
    (1usize..40).prop_flat_map(|n| (Just(n), prop::collection::vec((0..n, 0..n), 0..4 * n)))
}

fn features(n: usize, m: usize) -> impl Strategy<Value = Vec<Vec<f64>>> {
    prop::collection::vec(prop::collection::vec(-10.0f64..10.0, m), n)
}

fn graph_with_features() -> impl Strategy<Value = (usize, Vec<(usize, usize)>, Vec<Vec<f64>>)> {
    (graph_strategy(), 1usize..6).prop_flat_map(|((n, e), m)| (Just(n), Just(e), features(n, m)))
}

fn mode() -> impl Strategy<Value = SimilarityMode> {
    prop_oneof![Just(SimilarityMode::SquaredNorm), Just(SimilarityMode::Cosine)]
}

fn stat() -> impl Strategy<Value = StatMode> {
    prop_oneof![Just(StatMode::Sum), Just(StatMode::Min), Just(StatMode::Max), Just(StatMode::Avg)]
}

fn affinity_and_k() -> impl Strategy<Value = (Vec<f64>, usize)> {
    // coarse grid so that ties occur
    (2usize..40).prop_flat_map(|n| {
        (
            prop::collection::vec((-100i32..=100).prop_map(|v| f64::from(v) / 100.0), n),
            1..=n / 2,
        )
    })
}

fn anchor_problem() -> impl Strategy<Value = (Vec<Vec<f64>>, Vec<usize>, usize)> {
    // representations, a random node ranking, and K
    (2usize..30, 1usize..5).prop_flat_map(|(n, m)| {
        (
            features(n, m),
            Just((0..n).collect::<Vec<_>>()).prop_shuffle(),
            1..=n / 2,
        )
    })
}

fn anchors_from_order(order: &[usize], k: usize) -> AnchorSet {
    let mut positive = order[..k].to_vec();
    let mut negative = order[order.len() - k..].to_vec();
    positive.sort();
    negative.sort();
    AnchorSet {
        positive,
        negative,
        affinity: vec![0.0; order.len()],
    }
}

pub fn graph_symmetric(cases: u32) -> Result<(), String> {
    check(cases, graph_strategy(), |(n, edges)| {
        let g = SparseGraph::build_normalized(&edges, n).unwrap();
        for i in 0..n {
            let (cols, vals) = g.row(i);
            prop_assert!(cols.windows(2).all(|w| w[0] < w[1]));
            prop_assert!(cols.contains(&i));
            prop_assert!(vals.iter().all(|&v| v > 0.0));
            for (&j, &v) in cols.iter().zip(vals) {
                prop_assert_eq!(g.get(j, i).to_bits(), v.to_bits());
            }
        }
        Ok(())
    })
}

pub fn graph_edge_order_independent(cases: u32) -> Result<(), String> {
    let s = graph_strategy().prop_flat_map(|(n, e)| {
        let flips = prop::collection::vec(any::<bool>(), e.len());
        (Just(n), Just(e.clone()), Just(e).prop_shuffle(), flips)
    });
    check(cases, s, |(n, edges, shuffled, flips)| {
        let flipped: Vec<(usize, usize)> = shuffled
            .iter()
            .zip(&flips)
            .map(|(&(i, j), &f)| if f { (j, i) } else { (i, j) })
            .collect();
        let a = SparseGraph::build_normalized(&edges, n).unwrap();
        let b = SparseGraph::build_normalized(&flipped, n).unwrap();
        prop_assert_eq!(a, b);
        Ok(())
    })
}

pub fn spmv_matches_dense(cases: u32) -> Result<(), String> {
    check(cases, graph_with_features(), |(n, edges, x)| {
        let g = SparseGraph::build_normalized(&edges, n).unwrap();
        let got = g.spmv(&FeatureMatrix::from_rows(&x).unwrap()).unwrap();
        let want: Vec<f64> = dense::matmul(&dense::normalized_adjacency(n, &edges), &x).concat();
        let scale = want.iter().fold(0.0f64, |a, v| a.max(v.abs()));
        prop_assert!(max_rel_err(got.as_slice(), &want, scale.max(f64::MIN_POSITIVE)) <= 1e-10);
        Ok(())
    })
}

pub fn softmax_rows_sum_to_one(cases: u32) -> Result<(), String> {
    // spreads below ~36 keep every weight representable strictly inside (0, 1)
    let narrow = (1usize..20, 1usize..9, Just(15.0));
    let wide = (1usize..20, 1usize..9, Just(1000.0));
    let s = prop_oneof![narrow, wide]
        .prop_flat_map(|(n, l, r)| (Just(n), Just(l), Just(r), prop::collection::vec(-r..r, n * l)));
    check(cases, s, |(n, l, range, a)| {
        let g = gate_weights(&a, n, l).unwrap();
        for i in 0..n {
            let w = g.weights(i);
            prop_assert!((w.iter().sum::<f64>() - 1.0).abs() <= 1e-9);
            prop_assert!(w.iter().all(|&v| (0.0..=1.0).contains(&v)), "weights {:?}", w);
            if l == 1 {
                prop_assert_eq!(w[0], 1.0);
            } else if range < 18.0 {
                prop_assert!(w.iter().all(|&v| v > 0.0 && v < 1.0), "weights {:?}", w);
            }
        }
        Ok(())
    })
}

pub fn softmax_monotone(cases: u32) -> Result<(), String> {
    let s = (2usize..9)
        .prop_flat_map(|l| (prop::collection::vec(-5.0f64..5.0, l), 0..l, 1e-6f64..5.0));
    check(cases, s, |(row, l, delta)| {
        let before = gate_weights(&row, 1, row.len()).unwrap().weights(0)[l];
        let mut bumped = row.clone();
        bumped[l] += delta;
        let after = gate_weights(&bumped, 1, row.len()).unwrap().weights(0)[l];
        prop_assert!(after > before, "{} -> {}", before, after);
        Ok(())
    })
}

pub fn gated_layers_convex(cases: u32) -> Result<(), String> {
    check(cases, (graph_with_features(), 1usize..7, mode()), |((n, edges, x), layers, similarity)| {
        let g = SparseGraph::build_normalized(&edges, n).unwrap();
        let x = FeatureMatrix::from_rows(&x).unwrap();
        let cfg = EncoderConfig {
            layers,
            similarity,
            retain_layers: true,
            ..Default::default()
        };
        let rep = encoder::encode(&g, &x, &cfg).unwrap();
        let stack = propagate(&g, &x, layers).unwrap();
        for (l, h) in rep.per_layer.unwrap().iter().enumerate() {
            for i in 0..n {
                for j in 0..x.m() {
                    let (a, b) = (stack[0].get(i, j), stack[l + 1].get(i, j));
                    let v = h.get(i, j);
                    prop_assert!(a.min(b) <= v && v <= a.max(b), "{} outside [{}, {}]", v, a, b);
                }
            }
        }
        Ok(())
    })
}

pub fn identity_graph_encodes_exactly(cases: u32) -> Result<(), String> {
    let s = (1usize..30, 1usize..6)
        .prop_flat_map(|(n, m)| features(n, m))
        .prop_flat_map(|x| (Just(x), 1usize..21, mode()));
    check(cases, s, |(x, layers, similarity)| {
        let g = SparseGraph::build_normalized(&[], x.len()).unwrap();
        let x = FeatureMatrix::from_rows(&x).unwrap();
        let cfg = EncoderConfig {
            layers,
            similarity,
            ..Default::default()
        };
        prop_assert_eq!(encoder::encode(&g, &x, &cfg).unwrap().mixed, x);
        Ok(())
    })
}

pub fn encode_deterministic(cases: u32) -> Result<(), String> {
    check(cases, any::<u64>(), |seed| {
        let inst = random_instance(seed);
        let (g, x) = (inst.graph(), inst.x());
        let a = encoder::encode(&g, &x, &inst.cfg.encoder).unwrap();
        let b = encoder::encode(&g, &x, &inst.cfg.encoder).unwrap();
        prop_assert_eq!(a.mixed, b.mixed);
        prop_assert_eq!(a.gates, b.gates);
        Ok(())
    })
}

pub fn anchors_disjoint_and_ranked(cases: u32) -> Result<(), String> {
    check(cases, affinity_and_k(), |(aff, k)| {
        let set = select_anchors(&aff, k).unwrap();
        prop_assert_eq!(set.positive.len(), k);
        prop_assert_eq!(set.negative.len(), k);
        prop_assert!(set.positive.windows(2).all(|w| w[0] < w[1]));
        prop_assert!(set.negative.windows(2).all(|w| w[0] < w[1]));
        prop_assert!(set.positive.iter().all(|p| !set.negative.contains(p)));
        let rest: Vec<usize> = (0..aff.len())
            .filter(|i| !set.positive.contains(i) && !set.negative.contains(i))
            .collect();
        let min_pos = set.positive.iter().map(|&i| aff[i]).fold(f64::INFINITY, f64::min);
        let max_neg = set.negative.iter().map(|&i| aff[i]).fold(f64::NEG_INFINITY, f64::max);
        for &r in &rest {
            prop_assert!(aff[r] <= min_pos && aff[r] >= max_neg);
            // equal affinities: lower index ranks higher
            for &p in &set.positive {
                prop_assert!(aff[r] < aff[p] || r > p);
            }
            for &q in &set.negative {
                prop_assert!(aff[r] > aff[q] || r < q);
            }
        }
        Ok(())
    })
}

pub fn anchors_monotone_invariant(cases: u32) -> Result<(), String> {
    let transforms: [fn(f64) -> f64; 4] = [|a| 3.0 * a + 7.0, |a| a * a * a, f64::exp, f64::atan];
    check(cases, (affinity_and_k(), 0usize..4), |((aff, k), t)| {
        let mapped: Vec<f64> = aff.iter().map(|&a| transforms[t](a)).collect();
        let a = select_anchors(&aff, k).unwrap();
        let b = select_anchors(&mapped, k).unwrap();
        prop_assert_eq!(a.positive, b.positive);
        prop_assert_eq!(a.negative, b.negative);
        Ok(())
    })
}

pub fn anchors_permutation_equivariant(cases: u32) -> Result<(), String> {
    let s = (2usize..40).prop_flat_map(|n| {
        (
            Just((0..n).collect::<Vec<_>>()).prop_shuffle(),
            Just((0..n).collect::<Vec<_>>()).prop_shuffle(),
            1..=n / 2,
        )
    });
    check(cases, s, |(ranks, perm, k)| {
        // distinct affinities from a random ranking
        let aff: Vec<f64> = ranks.iter().map(|&r| r as f64 * 0.37 - 2.0).collect();
        let mut permuted = vec![0.0; aff.len()];
        for (i, &p) in perm.iter().enumerate() {
            permuted[p] = aff[i];
        }
        let a = select_anchors(&aff, k).unwrap();
        let b = select_anchors(&permuted, k).unwrap();
        let map = |v: &[usize]| {
            let mut out: Vec<usize> = v.iter().map(|&i| perm[i]).collect();
            out.sort();
            out
        };
        prop_assert_eq!(map(&a.positive), b.positive);
        prop_assert_eq!(map(&a.negative), b.negative);
        Ok(())
    })
}

pub fn positive_anchor_zero_min(cases: u32) -> Result<(), String> {
    check(cases, anchor_problem(), |(h, order, k)| {
        let h = FeatureMatrix::from_rows(&h).unwrap();
        let set = anchors_from_order(&order, k);
        let d = anchor_distances(&h, &set.positive).unwrap();
        for (col, &p) in set.positive.iter().enumerate() {
            let row = d.row(p);
            prop_assert_eq!(row[col], 0.0);
            prop_assert_eq!(row.iter().cloned().fold(f64::INFINITY, f64::min), 0.0);
        }
        let (pos, _) = anchor_statistics(&h, &set, StatMode::Min).unwrap();
        for &p in &set.positive {
            prop_assert_eq!(pos[p], 0.0);
        }
        Ok(())
    })
}

pub fn scores_translation_invariant(cases: u32) -> Result<(), String> {
    let s = anchor_problem().prop_flat_map(|(h, o, k)| {
        let m = h[0].len();
        (
            Just(h),
            Just(o),
            Just(k),
            prop::collection::vec(-10.0f64..10.0, m),
            0.0f64..=1.0,
            0.0f64..=1.0,
            stat(),
        )
    });
    check(cases, s, |(h, order, k, shift, alpha, beta, stat)| {
        let set = anchors_from_order(&order, k);
        let cfg = ScoringConfig { alpha, beta, stat };
        let moved: Vec<Vec<f64>> = h
            .iter()
            .map(|r| r.iter().zip(&shift).map(|(a, b)| a + b).collect())
            .collect();
        let a = final_scores(&FeatureMatrix::from_rows(&h).unwrap(), &set, &cfg).unwrap();
        let b = final_scores(&FeatureMatrix::from_rows(&moved).unwrap(), &set, &cfg).unwrap();
        for (x, y) in a.scores.iter().zip(&b.scores) {
            prop_assert!((x - y).abs() <= 1e-10, "{} vs {}", x, y);
        }
        Ok(())
    })
}

pub fn scores_consistent(cases: u32) -> Result<(), String> {
    let s = (anchor_problem(), 0.0f64..=1.0, 0.0f64..=1.0, stat());
    check(cases, s, |((h, order, k), alpha, beta, stat)| {
        let set = anchors_from_order(&order, k);
        let x = FeatureMatrix::from_rows(&h).unwrap();
        let out = final_scores(&x, &set, &ScoringConfig { alpha, beta, stat }).unwrap();
        for i in 0..h.len() {
            let dp: Vec<f64> = set.positive.iter().map(|&p| dense::euclid(&h[i], &h[p])).collect();
            let dn: Vec<f64> = set.negative.iter().map(|&q| dense::euclid(&h[i], &h[q])).collect();
            let sp = dense::statistic(&dp, stat);
            let sn = dense::statistic(&dn, stat);
            prop_assert!((out.positive_part[i] - sp).abs() <= 1e-12 * sp.abs().max(1.0));
            prop_assert!((out.negative_part[i] - sn).abs() <= 1e-12 * sn.abs().max(1.0));
            let s = alpha * out.positive_part[i] - beta * out.negative_part[i];
            prop_assert!((out.scores[i] - s).abs() <= 1e-12 * s.abs().max(1.0));
        }
        Ok(())
    })
}

pub fn ranking_rescale_invariant(cases: u32) -> Result<(), String> {
    let s = (anchor_problem(), 0.0f64..=0.25, 0.0f64..=0.25, 1e-3f64..4.0, stat());
    check(cases, s, |((h, order, k), alpha, beta, c, stat)| {
        let set = anchors_from_order(&order, k);
        let x = FeatureMatrix::from_rows(&h).unwrap();
        let base = final_scores(&x, &set, &ScoringConfig { alpha, beta, stat }).unwrap().scores;
        let scaled = final_scores(
            &x,
            &set,
            &ScoringConfig {
                alpha: c * alpha,
                beta: c * beta,
                stat,
            },
        )
        .unwrap()
        .scores;
        let tol = 1e-12 * base.iter().fold(1.0f64, |a, v| a.max(v.abs()));
        for i in 0..base.len() {
            for j in 0..base.len() {
                if base[i] > base[j] + tol {
                    prop_assert!(scaled[i] > scaled[j]);
                }
            }
        }
        // power-of-two factors scale exactly, so the order and every metric match bit for bit
        let exact = final_scores(
            &x,
            &set,
            &ScoringConfig {
                alpha: 4.0 * alpha,
                beta: 4.0 * beta,
                stat,
            },
        )
        .unwrap()
        .scores;
        let labels: Vec<u8> = (0..base.len()).map(|i| u8::from(set.negative.contains(&i))).collect();
        let roc = |s: &[f64]| auroc(&LabeledScores::new(s.to_vec(), labels.clone()).unwrap()).unwrap();
        prop_assert_eq!(roc(&base), roc(&exact));
        Ok(())
    })
}

fn labeled(max_n: usize, tie_free: bool) -> impl Strategy<Value = (Vec<f64>, Vec<u8>)> {
    (2usize..=max_n).prop_flat_map(move |n| {
        let scores = if tie_free {
            Just((0..n).map(|i| i as f64 * 0.5 - 1.0).collect::<Vec<_>>())
                .prop_shuffle()
                .boxed()
        } else {
            prop::collection::vec((0i32..4).prop_map(f64::from), n).boxed()
        };
        let labels = prop::collection::vec(0u8..=1, n).prop_filter("both classes", |l| {
            l.contains(&0) && l.contains(&1)
        });
        (scores, labels)
    })
}

pub fn metrics_match_brute_force(cases: u32) -> Result<(), String> {
    check(cases, (labeled(12, true), labeled(12, false)), |(tie_free, tied)| {
        for (s, y) in [tie_free, tied] {
            let ls = LabeledScores::new(s.clone(), y.clone()).unwrap();
            prop_assert!((auroc(&ls).unwrap() - brute_auroc(&s, &y)).abs() <= 1e-12);
            prop_assert!((auprc(&ls).unwrap() - brute_auprc(&s, &y)).abs() <= 1e-12);
        }
        Ok(())
    })
}

pub fn metrics_monotone_invariant(cases: u32) -> Result<(), String> {
    check(cases, labeled(30, false), |(s, y)| {
        let t: Vec<f64> = s.iter().map(|v| (v * 0.7).exp() - 3.0).collect();
        let a = LabeledScores::new(s, y.clone()).unwrap();
        let b = LabeledScores::new(t, y).unwrap();
        prop_assert_eq!(auroc(&a).unwrap(), auroc(&b).unwrap());
        prop_assert_eq!(auprc(&a).unwrap(), auprc(&b).unwrap());
        Ok(())
    })
}

pub fn auroc_negation_complements(cases: u32) -> Result<(), String> {
    check(cases, labeled(40, true), |(s, y)| {
        let neg: Vec<f64> = s.iter().map(|v| -v).collect();
        let a = auroc(&LabeledScores::new(s, y.clone()).unwrap()).unwrap();
        let b = auroc(&LabeledScores::new(neg, y).unwrap()).unwrap();
        prop_assert!((a + b - 1.0).abs() <= 1e-12);
        Ok(())
    })
}
