//! Matching-pair sequences `(r_m, ρ_m)` with `(5/3) r + ρ = 1`, their derived
//! scales, limit constants, and the projection onto line-only sequences.

use std::marker::PhantomData;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::scalar::Scalar;

/// Terms examined by the numeric divergence test for explicit lists.
pub const DIVERGENCE_CUTOFF: usize = 10_000;
/// A partial product below this declares the series divergent.
pub const DIVERGENT_PRODUCT: f64 = 1e-14;
/// A log increment below this declares the series convergent.
pub const CONVERGED_INCREMENT: f64 = 1e-15;

const TAIL_TERM_LIMIT: usize = 1_000_000;

/// Conductance ratio and line weight at one level.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct MatchingPair<T> {
    pub r: T,
    pub rho: T,
}

pub fn make_pair<T: Scalar>(rho: T) -> Result<MatchingPair<T>> {
    if !(rho > T::zero() && rho < T::one()) {
        return Err(Error::InvalidRho(rho.as_f64()));
    }
    Ok(MatchingPair {
        r: T::lit(0.6) * (T::one() - rho),
        rho,
    })
}

/// JSON description of a sequence. Explicit lists continue with `tail`
/// (reindexed from 1) when given; `r_star` records a known infinite product.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "family", rename_all = "lowercase")]
pub enum SequenceSpec {
    Constant {
        rho: f64,
    },
    Geometric {
        c: f64,
        q: f64,
    },
    /// `ρ_m = c / (m + offset)`
    Harmonic {
        c: f64,
        #[serde(default, skip_serializing_if = "is_zero")]
        offset: usize,
    },
    Explicit {
        rho: Vec<f64>,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        tail: Option<Box<SequenceSpec>>,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        r_star: Option<f64>,
    },
}

fn is_zero(x: &usize) -> bool {
    *x == 0
}

fn in_unit(x: f64) -> bool {
    x > 0.0 && x < 1.0
}

impl SequenceSpec {
    pub fn validate(&self) -> Result<()> {
        let bad = |msg: String| Err(Error::InvalidSequence(msg));
        match self {
            SequenceSpec::Constant { rho } if !in_unit(*rho) => Err(Error::InvalidRho(*rho)),
            SequenceSpec::Geometric { c, q } if !in_unit(*c) || !(*q > 0.0 && *q <= 1.0) => {
                bad(format!("geometric needs c in (0,1) and q in (0,1], got c={c}, q={q}"))
            }
            SequenceSpec::Harmonic { c, offset } if !in_unit(*c / (1 + offset) as f64) => {
                bad(format!("harmonic needs c/(1+offset) in (0,1), got c={c}"))
            }
            SequenceSpec::Explicit { rho, tail, r_star } => {
                if let Some(&x) = rho.iter().find(|x| !in_unit(**x)) {
                    return Err(Error::InvalidRho(x));
                }
                if let Some(r) = r_star {
                    if !(*r >= 0.0 && *r < 1.0) {
                        return bad(format!("r_star {r} outside [0,1)"));
                    }
                }
                match tail {
                    Some(t) => t.validate(),
                    None => Ok(()),
                }
            }
            _ => Ok(()),
        }
    }
}

/// Whether `Σ ρ_m` is finite.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Divergence {
    Converges,
    Diverges,
}

/// A validated infinite (or, for tail-less explicit lists, finite) sequence of matching pairs.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "SequenceSpec", into = "SequenceSpec", bound = "T: Scalar")]
pub struct MatchingSequence<T> {
    spec: SequenceSpec,
    _scalar: PhantomData<T>,
}

impl<T: Scalar> TryFrom<SequenceSpec> for MatchingSequence<T> {
    type Error = Error;

    fn try_from(spec: SequenceSpec) -> Result<Self> {
        spec.validate()?;
        Ok(MatchingSequence {
            spec,
            _scalar: PhantomData,
        })
    }
}

impl<T> From<MatchingSequence<T>> for SequenceSpec {
    fn from(s: MatchingSequence<T>) -> Self {
        s.spec
    }
}

/// Scales at one level.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct DerivedScales<T> {
    pub m: usize,
    /// `r_1⋯r_m`
    pub delta: T,
    /// `r_1⋯r_{m-1} ρ_m`
    pub gamma: T,
    /// `∏_{i≤m} (1-ρ_i)`
    pub p: T,
    /// `gamma / (1 - R_*)`
    pub eta: T,
    /// `-log(1-ρ_m)`
    pub kappa: T,
    /// `1 - ∏_{i<m} (1-ρ_i)`
    pub alpha_m: T,
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct LimitConstants<T> {
    /// `∏_{m≥1} (1-ρ_m)`
    pub r_star: T,
    /// `1 / r_star`, infinite when the product vanishes
    pub c_star: T,
    /// `1 - r_star`
    pub rho0: T,
    pub divergence: Divergence,
}

impl<T: Scalar> MatchingSequence<T> {
    pub fn new(spec: SequenceSpec) -> Result<Self> {
        spec.try_into()
    }

    pub fn constant(rho: f64) -> Result<Self> {
        Self::new(SequenceSpec::Constant { rho })
    }

    pub fn geometric(c: f64, q: f64) -> Result<Self> {
        Self::new(SequenceSpec::Geometric { c, q })
    }

    pub fn harmonic(c: f64) -> Result<Self> {
        Self::new(SequenceSpec::Harmonic { c, offset: 0 })
    }

    pub fn explicit(rho: Vec<f64>, tail: Option<SequenceSpec>) -> Result<Self> {
        Self::new(SequenceSpec::Explicit {
            rho,
            tail: tail.map(Box::new),
            r_star: None,
        })
    }

    pub fn from_json(json: &str) -> Result<Self> {
        let spec: SequenceSpec = serde_json::from_str(json).map_err(|e| Error::Parse(format!("{json}: {e}")))?;
        Self::new(spec)
    }

    pub fn spec(&self) -> &SequenceSpec {
        &self.spec
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string(&self.spec).expect("sequence spec serializes")
    }

    /// Number of terms, `None` when infinite.
    pub fn len(&self) -> Option<usize> {
        fn len_of(s: &SequenceSpec) -> Option<usize> {
            match s {
                SequenceSpec::Explicit { rho, tail, .. } => match tail {
                    Some(t) => len_of(t).map(|n| n + rho.len()),
                    None => Some(rho.len()),
                },
                _ => None,
            }
        }
        len_of(&self.spec)
    }

    pub fn is_empty(&self) -> bool {
        self.len() == Some(0)
    }

    /// `ρ_m`, `m ≥ 1`.
    pub fn rho(&self, m: usize) -> Result<T> {
        assert!(m >= 1, "levels of a sequence start at 1");
        rho_of(&self.spec, m)
    }

    pub fn pair(&self, m: usize) -> Result<MatchingPair<T>> {
        make_pair(self.rho(m)?)
    }

    /// The first `count` pairs.
    pub fn pairs(&self, count: usize) -> Result<Vec<MatchingPair<T>>> {
        (1..=count).map(|m| self.pair(m)).collect()
    }

    /// `δ_0, …, δ_m`.
    pub fn deltas(&self, m: usize) -> Result<Vec<T>> {
        let mut out = vec![T::one()];
        for k in 1..=m {
            out.push(out[k - 1] * self.pair(k)?.r);
        }
        Ok(out)
    }

    /// `γ_1, …, γ_m`.
    pub fn gammas(&self, m: usize) -> Result<Vec<T>> {
        let d = self.deltas(m)?;
        (1..=m).map(|k| Ok(d[k - 1] * self.rho(k)?)).collect()
    }

    /// `Σ_{i≥m} log(1-ρ_i)`, `-∞` for a divergent series.
    pub fn log_survival_from(&self, m: usize) -> Result<T> {
        log_survival(&self.spec, m.max(1))
    }

    pub fn divergence(&self) -> Result<Divergence> {
        Ok(if self.log_survival_from(1)? == T::neg_infinity() {
            Divergence::Diverges
        } else {
            Divergence::Converges
        })
    }

    pub fn r_star(&self) -> Result<LimitConstants<T>> {
        let s = self.log_survival_from(1)?;
        let (r_star, divergence) = if s == T::neg_infinity() {
            (T::zero(), Divergence::Diverges)
        } else {
            (s.exp(), Divergence::Converges)
        };
        Ok(LimitConstants {
            r_star,
            c_star: if r_star > T::zero() {
                r_star.recip()
            } else {
                T::infinity()
            },
            rho0: T::one() - r_star,
            divergence,
        })
    }

    pub fn derive(&self, m: usize) -> Result<DerivedScales<T>> {
        assert!(m >= 1, "levels of a sequence start at 1");
        let d = self.deltas(m)?;
        let rho = self.rho(m)?;
        let log_p_prev = (1..m).try_fold(T::zero(), |acc, i| Ok::<T, Error>(acc + (-self.rho(i)?).ln_1p()))?;
        let gamma = d[m - 1] * rho;
        let lim = self.r_star()?;
        Ok(DerivedScales {
            m,
            delta: d[m],
            gamma,
            p: (log_p_prev + (-rho).ln_1p()).exp(),
            eta: gamma / (T::one() - lim.r_star),
            kappa: -(-rho).ln_1p(),
            alpha_m: -log_p_prev.exp_m1(),
        })
    }

    /// Drops the first `n` pairs.
    pub fn shift(&self, n: usize) -> Result<Self> {
        if n == 0 {
            return Ok(self.clone());
        }
        Self::new(shift_spec(&self.spec, n)?)
    }
}

fn rho_of<T: Scalar>(spec: &SequenceSpec, m: usize) -> Result<T> {
    match spec {
        SequenceSpec::Constant { rho } => Ok(T::lit(*rho)),
        SequenceSpec::Geometric { c, q } => Ok(T::lit(*c) * T::lit(*q).powi(m as i32 - 1)),
        SequenceSpec::Harmonic { c, offset } => Ok(T::lit(*c) / T::lit((m + offset) as f64)),
        SequenceSpec::Explicit { rho, tail, .. } => {
            if m <= rho.len() {
                Ok(T::lit(rho[m - 1]))
            } else {
                match tail {
                    Some(t) => rho_of(t, m - rho.len()),
                    None => Err(Error::SequenceExhausted {
                        index: m,
                        len: rho.len(),
                    }),
                }
            }
        }
    }
}

/// Sum of `ln(1-ρ_i)` for `i ≥ m`.
fn log_survival<T: Scalar>(spec: &SequenceSpec, m: usize) -> Result<T> {
    match spec {
        SequenceSpec::Constant { .. } | SequenceSpec::Harmonic { .. } => Ok(T::neg_infinity()),
        SequenceSpec::Geometric { q, .. } if *q >= 1.0 => Ok(T::neg_infinity()),
        SequenceSpec::Geometric { .. } => {
            let mut terms = Vec::new();
            let mut acc = T::zero();
            for i in m..m + TAIL_TERM_LIMIT {
                let t = (-rho_of::<T>(spec, i)?).ln_1p();
                terms.push(t);
                acc += t;
                if t == T::zero() || t.abs() < T::epsilon() * T::lit(1e-3) * acc.abs() {
                    break;
                }
            }
            // smallest terms first
            Ok(terms.iter().rev().fold(T::zero(), |s, &t| s + t))
        }
        SequenceSpec::Explicit { rho, tail, r_star } => {
            let logs: Vec<T> = rho.iter().map(|&x| (-T::lit(x)).ln_1p()).collect();
            if let Some(r) = r_star {
                if *r == 0.0 {
                    return Ok(T::neg_infinity());
                }
                if m > rho.len() + 1 && tail.is_none() {
                    return Err(Error::SequenceExhausted {
                        index: m,
                        len: rho.len(),
                    });
                }
                let head: T = logs.iter().take(m - 1).copied().sum();
                let rest = if m > rho.len() + 1 {
                    // declared product covers the list and the tail together
                    let t = tail.as_ref().expect("checked above");
                    -log_prefix::<T>(t, m - rho.len())?
                } else {
                    T::zero()
                };
                return Ok(T::lit(*r).ln() - head + rest);
            }
            let from_list = |k: usize| -> T { logs.iter().skip(k - 1).rev().fold(T::zero(), |s, &t| s + t) };
            match tail {
                Some(t) => {
                    if m > rho.len() {
                        log_survival(t, m - rho.len())
                    } else {
                        let rest: T = log_survival(t, 1)?;
                        Ok(if rest == T::neg_infinity() {
                            rest
                        } else {
                            from_list(m) + rest
                        })
                    }
                }
                None => match numeric_divergence(&logs)? {
                    Divergence::Diverges => Ok(T::neg_infinity()),
                    Divergence::Converges => Ok(if m > rho.len() { T::zero() } else { from_list(m) }),
                },
            }
        }
    }
}

/// `Σ_{i<m} ln(1-ρ_i)`.
fn log_prefix<T: Scalar>(spec: &SequenceSpec, m: usize) -> Result<T> {
    (1..m).try_fold(T::zero(), |acc, i| Ok(acc + (-rho_of::<T>(spec, i)?).ln_1p()))
}

fn numeric_divergence<T: Scalar>(logs: &[T]) -> Result<Divergence> {
    let mut acc = T::zero();
    for &t in logs.iter().take(DIVERGENCE_CUTOFF) {
        acc += t;
        if acc.exp() < T::lit(DIVERGENT_PRODUCT) {
            return Ok(Divergence::Diverges);
        }
        if t.abs() < T::lit(CONVERGED_INCREMENT) {
            return Ok(Divergence::Converges);
        }
    }
    Err(Error::Undetermined(logs.len().min(DIVERGENCE_CUTOFF)))
}

fn shift_spec(spec: &SequenceSpec, n: usize) -> Result<SequenceSpec> {
    Ok(match spec {
        SequenceSpec::Constant { .. } => spec.clone(),
        SequenceSpec::Geometric { c, q } => SequenceSpec::Geometric {
            c: c * q.powi(n as i32),
            q: *q,
        },
        SequenceSpec::Harmonic { c, offset } => SequenceSpec::Harmonic {
            c: *c,
            offset: offset + n,
        },
        SequenceSpec::Explicit { rho, tail, r_star } => {
            let dropped = n.min(rho.len());
            let r_star = match r_star {
                Some(r) if *r > 0.0 => {
                    let head: f64 = rho[..dropped].iter().map(|x| (-x).ln_1p()).sum();
                    let beyond = if n > rho.len() {
                        let t = tail.as_ref().ok_or(Error::SequenceExhausted {
                            index: n,
                            len: rho.len(),
                        })?;
                        log_prefix::<f64>(t, n - rho.len() + 1)?
                    } else {
                        0.0
                    };
                    Some((r.ln() - head - beyond).exp())
                }
                other => *other,
            };
            if n <= rho.len() {
                SequenceSpec::Explicit {
                    rho: rho[n..].to_vec(),
                    tail: tail.clone(),
                    r_star,
                }
            } else {
                let t = tail.as_ref().ok_or(Error::SequenceExhausted {
                    index: n,
                    len: rho.len(),
                })?;
                let shifted = shift_spec(t, n - rho.len())?;
                match r_star {
                    Some(r) => SequenceSpec::Explicit {
                        rho: Vec::new(),
                        tail: Some(Box::new(shifted)),
                        r_star: Some(r),
                    },
                    None => shifted,
                }
            }
        }
    })
}

fn explicit_from<T: Scalar>(values: &[T], r_star: T) -> Result<MatchingSequence<T>> {
    MatchingSequence::new(SequenceSpec::Explicit {
        rho: values.iter().map(|v| v.as_f64()).collect(),
        tail: None,
        r_star: Some(r_star.as_f64()),
    })
}

/// Projection onto line-only sequences: the first `terms` pairs of the sequence whose
/// line form is the line part of the input, with `ρ_0 = 1 - R_*`.
///
/// The output has a divergent series and records `R_* = 0`.
pub fn project<T: Scalar>(seq: &MatchingSequence<T>, terms: usize) -> Result<MatchingSequence<T>> {
    let lim = seq.r_star()?;
    let mut sigma = Vec::with_capacity(terms);
    for m in 1..=terms {
        let rho = seq.rho(m)?;
        if lim.divergence == Divergence::Diverges {
            sigma.push(rho);
            continue;
        }
        // ∏_{i<m}(1-ρ_i) - R_* = ∏_{i<m}(1-ρ_i) · (1 - ∏_{i≥m}(1-ρ_i))
        let tail = seq.log_survival_from(m)?;
        sigma.push(rho / -tail.exp_m1());
    }
    explicit_from(&sigma, T::zero())
}

/// Inverse of [`project`] for a line-only input and a chosen `ρ_0`.
///
/// The output records `R_* = 1 - ρ_0`.
pub fn unproject<T: Scalar>(seq: &MatchingSequence<T>, rho0: T, terms: usize) -> Result<MatchingSequence<T>> {
    if !(rho0 > T::zero() && rho0 < T::one()) {
        return Err(Error::InvalidRho(rho0.as_f64()));
    }
    if seq.divergence()? != Divergence::Diverges {
        return Err(Error::InvalidSequence(
            "unproject needs a sequence with divergent series".into(),
        ));
    }
    let mut log_keep = T::zero();
    let mut out = Vec::with_capacity(terms);
    for m in 1..=terms {
        let sigma = seq.rho(m)?;
        let weight = rho0 * log_keep.exp();
        out.push(weight / (weight + (T::one() - rho0)) * sigma);
        log_keep += (-sigma).ln_1p();
    }
    explicit_from(&out, T::one() - rho0)
}

/// `|Σ_{i≤m} (5/3)^{i-1} γ_i + (5/3)^m δ_m - 1|`
pub fn telescoping_residual<T: Scalar>(seq: &MatchingSequence<T>, m: usize) -> Result<T> {
    let five_thirds = T::lit(5.0) / T::lit(3.0);
    let d = seq.deltas(m)?;
    let g = seq.gammas(m)?;
    let mut lhs = T::zero();
    for i in 1..=m {
        lhs += five_thirds.powi(i as i32 - 1) * g[i - 1];
    }
    lhs += five_thirds.powi(m as i32) * d[m];
    Ok((lhs - T::one()).abs())
}

pub fn shift<T: Scalar>(seq: &MatchingSequence<T>, n: usize) -> Result<MatchingSequence<T>> {
    seq.shift(n)
}
