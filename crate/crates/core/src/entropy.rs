//! Exact Shannon-entropy computations on small explicit joint
//! distributions, and a brute-force verifier for the subset-entropy
//! inequality the converse bounds rest on: for every m there is a set S of
//! m variables with
//!
//! ```text
//!   H(X_{S^c} | X_S) <= (L - m) / L * H(X_{[L]}) .
//! ```
//!
//! Entropies are computed in double precision (logarithms are irrational);
//! the verifier accepts witnesses within 1e-9 and treats a missing witness
//! as an implementation bug, since the inequality is a theorem.

use crate::netmodel::Rat;
use crate::rng::SplitMix64;
use crate::subsets::colex_subsets;
use num_traits::{One, Signed, ToPrimitive, Zero};
use thiserror::Error;

/// Tolerance on the witness inequality.
pub const LEMMA_TOLERANCE: f64 = 1e-9;

/// Largest joint-alphabet size the exhaustive routines accept.
pub const MAX_STATES: usize = 1_000_000;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum EntropyError {
    #[error("bad probabilities: {0}")]
    BadProbabilities(String),
    #[error("variable index {0} out of range")]
    BadVariable(usize),
    #[error("variable subsets overlap at {0}")]
    Overlap(usize),
    #[error("subset size {m} exceeds the {l} variables")]
    BadSubsetSize { m: usize, l: usize },
    #[error("{states} joint states exceed the exhaustive limit {limit}")]
    TooLarge { states: usize, limit: usize },
    #[error("no witness subset found (margin {margin}); the verifier is broken")]
    WitnessNotFound { margin: f64 },
}

/// Explicit joint pmf over `variable_count` finite variables. `exact` marks
/// distributions built from rationals (sum checked exactly) as opposed to
/// floats (sum checked to 1e-12).
#[derive(Clone, Debug)]
pub struct JointPmf {
    alphabet: Vec<usize>,
    probs: Vec<f64>,
    exact: bool,
}

impl JointPmf {
    fn states_of(alphabet: &[usize]) -> Result<usize, EntropyError> {
        if alphabet.is_empty() || alphabet.contains(&0) {
            return Err(EntropyError::BadProbabilities(
                "every variable needs a nonempty alphabet".into(),
            ));
        }
        let mut states = 1usize;
        for &a in alphabet {
            states = states.checked_mul(a).filter(|&s| s <= MAX_STATES).ok_or(
                EntropyError::TooLarge {
                    states: usize::MAX,
                    limit: MAX_STATES,
                },
            )?;
        }
        Ok(states)
    }

    pub fn from_rationals(alphabet: Vec<usize>, probs: Vec<Rat>) -> Result<JointPmf, EntropyError> {
        let states = Self::states_of(&alphabet)?;
        if probs.len() != states {
            return Err(EntropyError::BadProbabilities(format!(
                "expected {states} probabilities, got {}",
                probs.len()
            )));
        }
        if probs.iter().any(|p| p.is_negative()) {
            return Err(EntropyError::BadProbabilities(
                "negative probability".into(),
            ));
        }
        let total: Rat = probs.iter().cloned().sum();
        if !total.is_one() {
            return Err(EntropyError::BadProbabilities(format!(
                "probabilities sum to {total}"
            )));
        }
        let probs = probs
            .iter()
            .map(|p| p.to_f64().expect("pmf entry fits f64"))
            .collect();
        Ok(JointPmf {
            alphabet,
            probs,
            exact: true,
        })
    }

    pub fn from_floats(alphabet: Vec<usize>, probs: Vec<f64>) -> Result<JointPmf, EntropyError> {
        let states = Self::states_of(&alphabet)?;
        if probs.len() != states {
            return Err(EntropyError::BadProbabilities(format!(
                "expected {states} probabilities, got {}",
                probs.len()
            )));
        }
        if probs.iter().any(|&p| p < 0.0 || !p.is_finite()) {
            return Err(EntropyError::BadProbabilities(
                "negative or non-finite probability".into(),
            ));
        }
        let total: f64 = probs.iter().sum();
        if (total - 1.0).abs() > 1e-12 {
            return Err(EntropyError::BadProbabilities(format!(
                "probabilities sum to {total}"
            )));
        }
        Ok(JointPmf {
            alphabet,
            probs,
            exact: false,
        })
    }

    pub fn variable_count(&self) -> usize {
        self.alphabet.len()
    }

    pub fn alphabet(&self) -> &[usize] {
        &self.alphabet
    }

    pub fn states(&self) -> usize {
        self.probs.len()
    }

    pub fn is_exact(&self) -> bool {
        self.exact
    }

    fn check_vars(&self, vars: &[usize]) -> Result<(), EntropyError> {
        let mut seen = vec![false; self.variable_count()];
        for &v in vars {
            if v >= self.variable_count() {
                return Err(EntropyError::BadVariable(v));
            }
            if seen[v] {
                return Err(EntropyError::Overlap(v));
            }
            seen[v] = true;
        }
        Ok(())
    }

    /// Marginal probability table over `vars` (given in ascending order of
    /// significance: the first variable varies slowest, matching the joint
    /// table layout).
    fn marginal(&self, vars: &[usize]) -> Vec<f64> {
        let size: usize = vars
            .iter()
            .map(|&v| self.alphabet[v])
            .product::<usize>()
            .max(1);
        let mut out = vec![0.0; size];
        for (state, &p) in self.probs.iter().enumerate() {
            if p == 0.0 {
                continue;
            }
            // Decode the full state, project onto vars.
            let mut rem = state;
            let mut values = vec![0usize; self.variable_count()];
            for v in (0..self.variable_count()).rev() {
                values[v] = rem % self.alphabet[v];
                rem /= self.alphabet[v];
            }
            let mut idx = 0usize;
            for &v in vars {
                idx = idx * self.alphabet[v] + values[v];
            }
            out[idx] += p;
        }
        out
    }
}

fn entropy_of(table: &[f64]) -> f64 {
    table
        .iter()
        .filter(|&&p| p > 0.0)
        .map(|&p| -p * p.log2())
        .sum()
}

/// H of the marginal over `vars`, in bits; H(empty) = 0.
pub fn joint_entropy(pmf: &JointPmf, vars: &[usize]) -> Result<f64, EntropyError> {
    pmf.check_vars(vars)?;
    Ok(entropy_of(&pmf.marginal(vars)))
}

/// H(a | b) = H(a union b) - H(b); `a` and `b` must be disjoint.
pub fn conditional_entropy(pmf: &JointPmf, a: &[usize], b: &[usize]) -> Result<f64, EntropyError> {
    let mut union: Vec<usize> = a.to_vec();
    union.extend_from_slice(b);
    pmf.check_vars(&union)?; // rejects overlap between a and b
    Ok(entropy_of(&pmf.marginal(&union)) - entropy_of(&pmf.marginal(b)))
}

/// A subset certifying the inequality, with the achieved slack.
#[derive(Clone, Debug)]
pub struct LemmaWitness {
    pub subset: Vec<usize>,
    pub conditional: f64,
    pub bound: f64,
    pub margin: f64,
}

/// Searches all m-subsets S (colex order) for one with
/// H(X_{S^c} | X_S) <= (L - m)/L * H(all) + tolerance and returns the first
/// hit. A full miss is reported as a hard error: the inequality always has
/// a witness, so a miss means the arithmetic is broken.
pub fn verify_subset_lemma(pmf: &JointPmf, m: usize) -> Result<LemmaWitness, EntropyError> {
    let l = pmf.variable_count();
    if m > l {
        return Err(EntropyError::BadSubsetSize { m, l });
    }
    let all: Vec<usize> = (0..l).collect();
    let h_all = joint_entropy(pmf, &all)?;
    let bound = (l - m) as f64 / l as f64 * h_all;
    let mut best_margin = f64::NEG_INFINITY;
    for subset in colex_subsets(l, m) {
        let complement: Vec<usize> = (0..l).filter(|v| !subset.contains(v)).collect();
        let conditional = conditional_entropy(pmf, &complement, &subset)?;
        let margin = bound - conditional;
        if margin >= -LEMMA_TOLERANCE {
            return Ok(LemmaWitness {
                subset,
                conditional,
                bound,
                margin,
            });
        }
        best_margin = best_margin.max(margin);
    }
    Err(EntropyError::WitnessNotFound {
        margin: best_margin,
    })
}

/// Symmetric Dirichlet-like random pmf: normalized exponentials from the
/// seeded generator.
pub fn random_pmf(rng: &mut SplitMix64, alphabet: &[usize]) -> JointPmf {
    let states: usize = alphabet.iter().product();
    let mut raw: Vec<f64> = (0..states)
        .map(|_| {
            let u = rng.next_f64().max(1e-300);
            -u.ln()
        })
        .collect();
    let total: f64 = raw.iter().sum();
    for p in raw.iter_mut() {
        *p /= total;
    }
    // Exact renormalization of the last entry to keep the float-sum check
    // happy regardless of rounding.
    let head: f64 = raw[..states - 1].iter().sum();
    raw[states - 1] = (1.0 - head).max(0.0);
    JointPmf::from_floats(alphabet.to_vec(), raw).expect("normalized exponentials form a pmf")
}

/// Adversarial corner distributions: a point mass, fully independent
/// uniforms, and (for equal alphabet sizes) the fully correlated uniform
/// diagonal. All exact.
pub fn corner_pmfs(alphabet: &[usize]) -> Vec<JointPmf> {
    let states: usize = alphabet.iter().product();
    let mut out = Vec::new();

    let mut point = vec![Rat::zero(); states];
    point[0] = Rat::one();
    out.push(JointPmf::from_rationals(alphabet.to_vec(), point).expect("point mass"));

    let uniform = vec![Rat::new(1.into(), (states as i64).into()); states];
    out.push(JointPmf::from_rationals(alphabet.to_vec(), uniform).expect("uniform"));

    if alphabet.windows(2).all(|w| w[0] == w[1]) && alphabet[0] > 0 {
        let a = alphabet[0];
        let l = alphabet.len();
        let mut diagonal = vec![Rat::zero(); states];
        for v in 0..a {
            let mut idx = 0usize;
            for _ in 0..l {
                idx = idx * a + v;
            }
            diagonal[idx] = Rat::new(1.into(), (a as i64).into());
        }
        out.push(JointPmf::from_rationals(alphabet.to_vec(), diagonal).expect("diagonal"));
    }
    out
}
