//! Randomized persistence screening for tensors outside the exact
//! regimes. Persistence quantifies over every covector off a subspace,
//! so sampling can never certify it; positive outcomes here are
//! explicitly non-conclusive. A sampled covector whose contraction
//! fails 1-conciseness somewhere down the recursion is hard evidence
//! against the sampled witness.
//!
//! The sample set for a basis witness e always contains the sparse
//! covectors dual to e and its two-coordinate perturbations before any
//! random draws, so diagonal-supported tensors are reliably caught.

use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::scalar::{rat_frac, Cyclotomic};
use crate::tensor::{matrix_rank, Bipartition, CoVector, Tensor};

#[derive(Clone, Debug)]
pub enum ScreenOutcome {
    /// Every sampled chart of some basis witness stayed persistent-
    /// looking; NOT a certificate.
    LikelyPersistent { witness: usize, samples: usize },
    Inconclusive { trace: Vec<String> },
    NotPersistentEvidence { trace: Vec<String> },
}

enum Verdict {
    Pass,
    Soft(String),
    Hard(String),
}

fn first_mode_rank(t: &Tensor<Cyclotomic>) -> usize {
    if t.is_zero() {
        return 0;
    }
    let part = Bipartition::new(t.arity(), [0].into_iter().collect()).expect("cut");
    matrix_rank(t.flatten(&part))
}

fn sample_covectors(dim: usize, witness: usize, trials: usize, rng: &mut ChaCha8Rng) -> Vec<Vec<Cyclotomic>> {
    let mut out = Vec::new();
    // deterministic sparse charts first: the bare dual of the witness,
    // then each single extra coordinate at +1 and -1
    let base = |w: i64, extra: Option<(usize, i64)>| -> Vec<Cyclotomic> {
        let mut v = vec![Cyclotomic::zero(); dim];
        v[witness] = Cyclotomic::from_int(w);
        if let Some((k, x)) = extra {
            v[k] = Cyclotomic::from_int(x);
        }
        v
    };
    out.push(base(1, None));
    for k in 0..dim {
        if k != witness {
            out.push(base(1, Some((k, 1))));
            out.push(base(1, Some((k, -1))));
        }
    }
    while out.len() < trials {
        let mut v = vec![Cyclotomic::zero(); dim];
        v[witness] = Cyclotomic::one();
        for (k, slot) in v.iter_mut().enumerate() {
            if k == witness {
                continue;
            }
            let num = rng.gen_range(-6i64..=6);
            let den = rng.gen_range(1i64..=3);
            *slot = Cyclotomic::from_rational(rat_frac(num, den));
        }
        out.push(v);
    }
    out.truncate(trials.max(1));
    out
}

fn screen_recursive(
    t: &Tensor<Cyclotomic>,
    trials: usize,
    rng: &mut ChaCha8Rng,
    depth: usize,
) -> Verdict {
    let n = t.arity();
    let d1 = t.shape().dim(0);
    let rank = first_mode_rank(t);
    if rank < d1 {
        return Verdict::Hard(format!(
            "depth {depth}: contraction chain reached a tensor that is not 1-concise (mode-0 rank {rank} < {d1})"
        ));
    }
    if n == 2 {
        return Verdict::Pass;
    }
    let mut soft: Option<String> = None;
    'witness: for e in 0..d1 {
        for f in sample_covectors(d1, e, trials, rng) {
            let contraction = t
                .contract(0, &CoVector::new(f))
                .expect("covector dimension matches");
            match screen_recursive(&contraction, trials, rng, depth + 1) {
                Verdict::Pass => {}
                Verdict::Soft(msg) => {
                    soft = Some(msg);
                    continue 'witness;
                }
                Verdict::Hard(msg) => {
                    soft = Some(format!("witness |{e}> at depth {depth} is burnt: {msg}"));
                    continue 'witness;
                }
            }
        }
        return Verdict::Pass;
    }
    match soft {
        Some(msg) => Verdict::Hard(msg),
        None => Verdict::Soft(format!("depth {depth}: no witness candidate survived")),
    }
}

/// Heuristic persistence screening; deterministic for a given seed.
pub fn screen_persistence(t: &Tensor<Cyclotomic>, trials: usize, seed: u64) -> ScreenOutcome {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let n = t.arity();
    let d1 = t.shape().dim(0);
    if t.is_zero() || first_mode_rank(t) < d1 {
        return ScreenOutcome::NotPersistentEvidence {
            trace: vec!["not 1-concise (a zero or compressible tensor cannot be persistent)".into()],
        };
    }
    if n == 2 {
        return ScreenOutcome::LikelyPersistent { witness: 0, samples: 0 };
    }
    if trials == 0 {
        return ScreenOutcome::Inconclusive { trace: vec!["no trials requested".into()] };
    }
    let mut hard: Vec<String> = Vec::new();
    for e in 0..d1 {
        let mut burnt = false;
        let mut samples = 0usize;
        for f in sample_covectors(d1, e, trials, &mut rng) {
            samples += 1;
            let contraction = t.contract(0, &CoVector::new(f.clone())).expect("dims match");
            match screen_recursive(&contraction, trials, &mut rng, 1) {
                Verdict::Pass => {}
                Verdict::Soft(msg) | Verdict::Hard(msg) => {
                    let lit: Vec<String> = f.iter().map(|c| c.to_string()).collect();
                    hard.push(format!("witness |{e}>, chart [{}]: {}", lit.join(", "), msg));
                    burnt = true;
                    break;
                }
            }
        }
        if !burnt {
            return ScreenOutcome::LikelyPersistent { witness: e, samples };
        }
    }
    ScreenOutcome::NotPersistentEvidence { trace: hard }
}
