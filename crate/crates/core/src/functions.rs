//! Test functions: gasket functions and their pullbacks, harmonic functions on
//! the gasket, segment tents, clamping and seeded random functions.

use std::collections::BTreeMap;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::engine::harmonic_extend;
use crate::error::{Error, Result};
use crate::network::{build_sg, DiscretizedFunction, Node, NodeValues};
use crate::scalar::Scalar;
use crate::topology::{canonicalize, sg_class, sg_vertex_set, Address, Bond, Segment, SgClass, Word};

/// Values on the level-`m` gasket vertices.
#[derive(Clone, Debug, PartialEq)]
pub struct SgFunction<T> {
    level: usize,
    values: BTreeMap<SgClass, T>,
}

impl<T: Scalar> SgFunction<T> {
    /// Requires exactly one value per level-`m` vertex.
    pub fn new(level: usize, values: BTreeMap<SgClass, T>) -> Result<Self> {
        let expected = sg_vertex_set(level)?;
        if values.len() != expected.len() {
            return Err(Error::InvalidBoundary(format!(
                "{} values for {} gasket vertices",
                values.len(),
                expected.len()
            )));
        }
        for c in &expected {
            if !values.contains_key(c) {
                return Err(Error::MissingValue(c.to_string()));
            }
        }
        Ok(SgFunction { level, values })
    }

    pub fn level(&self) -> usize {
        self.level
    }

    pub fn value(&self, c: &SgClass) -> Option<T> {
        self.values.get(c).copied()
    }

    pub fn values(&self) -> &BTreeMap<SgClass, T> {
        &self.values
    }

    /// Value at the gasket point of a canonical address with word length at most the level.
    pub fn at(&self, a: &Address) -> Result<T> {
        let c = sg_class(a, self.level)?;
        self.value(&c).ok_or_else(|| Error::MissingValue(c.to_string()))
    }

    fn at_cell(&self, w: &Word, i: u8) -> Result<T> {
        self.at(&canonicalize(w, i)?)
    }

    /// `Σ_{|w|=m} Σ_bonds (g(w,i) - g(w,j))²`
    pub fn triangle_sum(&self) -> Result<T> {
        let mut s = T::zero();
        for w in Word::all(self.level) {
            for b in Bond::ALL {
                let d = self.at_cell(&w, b.i())? - self.at_cell(&w, b.j())?;
                s += d * d;
            }
        }
        Ok(s)
    }

    /// `(5/3)^m` times [`triangle_sum`](Self::triangle_sum).
    pub fn energy(&self) -> Result<T> {
        Ok((T::lit(5.0) / T::lit(3.0)).powi(self.level as i32) * self.triangle_sum()?)
    }

    /// Harmonic refinement to level `m+1`: every new vertex on the side `{i,j}` of a
    /// level-`m` cell gets `(2 g_i + 2 g_j + g_k) / 5`.
    pub fn refine(&self) -> Result<Self> {
        let m = self.level;
        let mut values = BTreeMap::new();
        for c in sg_vertex_set(m + 1)? {
            let [(word, corner), _] = c.members();
            let a = canonicalize(&word, corner)?;
            let v = if a.word().len() <= m {
                self.at(&a)?
            } else {
                let w = Word::new(a.word().letters()[..m].to_vec())?;
                let i = a.word().last().expect("nonempty word");
                let j = a.corner();
                let k = 6 - i - j;
                let two = T::lit(2.0);
                (two * self.at_cell(&w, i)? + two * self.at_cell(&w, j)? + self.at_cell(&w, k)?) / T::lit(5.0)
            };
            values.insert(c, v);
        }
        Ok(SgFunction { level: m + 1, values })
    }
}

impl<T: Scalar> NodeValues<T> for SgFunction<T> {
    fn node_value(&self, node: &Node) -> Option<T> {
        match node {
            Node::Sg(c) if c.level() == self.level => self.value(c),
            _ => None,
        }
    }
}

/// Harmonic function on the level-`m` gasket network with values `boundary` at the three corners.
pub fn sg_harmonic<T: Scalar>(boundary: [T; 3], m: usize) -> Result<SgFunction<T>> {
    let net = build_sg::<T>(m)?;
    let data = (1..=3u8)
        .map(|i| {
            Ok((
                Node::Sg(sg_class(&Address::corner_of(i)?, m)?),
                boundary[i as usize - 1],
            ))
        })
        .collect::<Result<Vec<_>>>()?;
    let h = harmonic_extend(&net, &data)?;
    let values = sg_vertex_set(m)?
        .into_iter()
        .map(|c| {
            let v = h.value(&Node::Sg(c.clone())).expect("every class is a node");
            (c, v)
        })
        .collect();
    SgFunction::new(m, values)
}

/// `g ∘ π` at depth `M ≥ m`, where `m` is the level of `g`: constant along every segment.
/// For `M > m` the gasket function is first refined harmonically to level `M`.
pub fn pullback_sg<T: Scalar>(g: &SgFunction<T>, depth: usize, subdiv: usize) -> Result<DiscretizedFunction<T>> {
    if depth < g.level() {
        return Err(Error::DepthMismatch {
            expected: g.level(),
            found: depth,
        });
    }
    let mut fine = g.clone();
    while fine.level() < depth {
        fine = fine.refine()?;
    }
    let mut err = None;
    let f = DiscretizedFunction::from_fn(
        depth,
        subdiv,
        |a| {
            fine.at(a).unwrap_or_else(|e| {
                err = Some(e);
                T::zero()
            })
        },
        |s, _| fine.at(&s.start()).unwrap_or(T::zero()),
    )?;
    match err {
        Some(e) => Err(e),
        None => Ok(f),
    }
}

/// Zero except on the interior of one segment, where it rises linearly to 1 at the midpoint.
pub fn tent_on_segment<T: Scalar>(
    word: &Word,
    bond: Bond,
    depth: usize,
    subdiv: usize,
) -> Result<DiscretizedFunction<T>> {
    if subdiv < 2 || !subdiv.is_multiple_of(2) {
        return Err(Error::OddSubdivision(subdiv));
    }
    if word.len() >= depth {
        return Err(Error::DepthMismatch {
            expected: word.len() + 1,
            found: depth,
        });
    }
    let target = Segment::new(word.clone(), bond);
    let n = T::lit(subdiv as f64);
    DiscretizedFunction::from_fn(
        depth,
        subdiv,
        |_| T::zero(),
        |s, k| {
            if *s == target {
                T::one() - (T::lit(2.0 * k as f64) / n - T::one()).abs()
            } else {
                T::zero()
            }
        },
    )
}

/// Values clipped to `[0, 1]`.
pub fn clamp<T: Scalar>(f: &DiscretizedFunction<T>) -> DiscretizedFunction<T> {
    f.map(|v| v.max(T::zero()).min(T::one()))
}

/// Independent uniform values in `[-1, 1]` at every vertex and sample, reproducible from `seed`.
pub fn random_function<T: Scalar>(seed: u64, depth: usize, subdiv: usize) -> Result<DiscretizedFunction<T>> {
    let rng = std::cell::RefCell::new(ChaCha8Rng::seed_from_u64(seed));
    let draw = || T::lit(rng.borrow_mut().gen_range(-1.0..=1.0));
    DiscretizedFunction::from_fn(depth, subdiv, |_| draw(), |_, _| draw())
}

/// JSON description of a test function.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum FunctionSpec {
    /// Pullback of the gasket-harmonic function with these corner values, at the target depth.
    PullbackHarmonic {
        boundary: [f64; 3],
    },
    /// Tent on a segment written `w:ij`.
    Tent {
        segment: String,
    },
    Random {
        seed: u64,
    },
    Sum {
        parts: Vec<FunctionSpec>,
    },
}

impl FunctionSpec {
    pub fn from_json(json: &str) -> Result<Self> {
        serde_json::from_str(json).map_err(|e| Error::Parse(format!("{json}: {e}")))
    }

    pub fn build<T: Scalar>(&self, depth: usize, subdiv: usize) -> Result<DiscretizedFunction<T>> {
        match self {
            FunctionSpec::PullbackHarmonic { boundary } => {
                let g = sg_harmonic(boundary.map(T::lit), depth)?;
                pullback_sg(&g, depth, subdiv)
            }
            FunctionSpec::Tent { segment } => {
                let s: Segment = segment.parse()?;
                tent_on_segment(s.word(), s.bond(), depth, subdiv)
            }
            FunctionSpec::Random { seed } => random_function(*seed, depth, subdiv),
            FunctionSpec::Sum { parts } => {
                let mut acc = DiscretizedFunction::zeros(depth, subdiv)?;
                for p in parts {
                    acc = acc.add(&p.build(depth, subdiv)?)?;
                }
                Ok(acc)
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::network::{build_ssg, energy, form_components};
    use crate::sequence::MatchingSequence;
    use crate::topology::{segments, vertex_set};
    use proptest::prelude::*;

    fn addr(s: &str) -> Address {
        s.parse().unwrap()
    }

    fn class(s: &str, m: usize) -> SgClass {
        sg_class(&addr(s), m).unwrap()
    }

    #[test]
    fn harmonic_level_one_values() {
        let h = sg_harmonic([1.0f64, 0.0, 0.0], 1).unwrap();
        assert!((h.value(&class("1:2", 1)).unwrap() - 0.4).abs() < 1e-15);
        assert!((h.value(&class("1:3", 1)).unwrap() - 0.4).abs() < 1e-15);
        assert!((h.value(&class("2:3", 1)).unwrap() - 0.2).abs() < 1e-15);
        let c = sg_harmonic([1.0f64, 1.0, 1.0], 3).unwrap();
        assert!(c.values().values().all(|v| (v - 1.0).abs() < 1e-14));
    }

    #[test]
    fn harmonic_energy_is_level_independent() {
        let basis = [[1.0f64, 0.0, 0.0], [0.0, 1.0, 0.0], [0.0, 0.0, 1.0], [0.3, -1.2, 2.0]];
        for b in basis {
            let q0 = (b[0] - b[1]).powi(2) + (b[1] - b[2]).powi(2) + (b[2] - b[0]).powi(2);
            for m in 0..=6 {
                let h = sg_harmonic(b, m).unwrap();
                assert!((h.energy().unwrap() - q0).abs() < 1e-10, "level {m}");
            }
        }
    }

    #[test]
    fn harmonic_mean_value_property() {
        let net = build_sg::<f64>(4).unwrap();
        let h = sg_harmonic([1.0, -0.5, 0.25], 4).unwrap();
        let adj = net.adjacency();
        let corners: Vec<SgClass> = (1..=3)
            .map(|i| sg_class(&Address::corner_of(i).unwrap(), 4).unwrap())
            .collect();
        for (v, node) in net.nodes().iter().enumerate() {
            let Node::Sg(c) = node else { unreachable!() };
            if corners.contains(c) {
                continue;
            }
            let (mut num, mut den) = (0.0, 0.0);
            for (&u, &w) in &adj[v] {
                num += w * h.node_value(&net.nodes()[u]).unwrap();
                den += w;
            }
            assert!((num / den - h.value(c).unwrap()).abs() < 1e-10);
        }
    }

    #[test]
    fn refinement_matches_harmonic_solve() {
        for m in 0..=3 {
            let b: [f64; 3] = [0.7, -0.1, 0.4];
            let refined = sg_harmonic(b, m).unwrap().refine().unwrap();
            let direct = sg_harmonic(b, m + 1).unwrap();
            for (c, v) in direct.values() {
                assert!((refined.value(c).unwrap() - v).abs() < 1e-13);
            }
        }
    }

    #[test]
    fn pullback_examples() {
        let one = SgFunction::new(2, sg_vertex_set(2).unwrap().into_iter().map(|c| (c, 1.0)).collect()).unwrap();
        let f = pullback_sg(&one, 3, 2).unwrap();
        assert!(f.vertex_values().values().all(|&v| v == 1.0));
        assert!(f.profiles().values().flatten().all(|&v| v == 1.0));

        let h = sg_harmonic([1.0f64, 0.0, 0.0], 1).unwrap();
        let u = pullback_sg(&h, 1, 2).unwrap();
        assert!((u.value(&addr("1:2")).unwrap() - 0.4).abs() < 1e-15);
        assert!((u.value(&addr("2:1")).unwrap() - 0.4).abs() < 1e-15);
        assert!((u.value(&addr("2:3")).unwrap() - 0.2).abs() < 1e-15);
        assert!((u.value(&addr("3:2")).unwrap() - 0.2).abs() < 1e-15);
        assert!(pullback_sg(&h, 0, 1).is_err());
    }

    #[test]
    fn pullback_carries_no_line_energy() {
        let seq = MatchingSequence::<f64>::geometric(0.5, 0.5).unwrap();
        for m in 1..=3 {
            let h = sg_harmonic([0.2, 1.0, -0.3], m).unwrap();
            for depth in [m, m + 1] {
                let f = pullback_sg(&h, depth, 3).unwrap();
                let fc = form_components(&seq, m, &f).unwrap();
                assert!(fc.d_line.iter().chain(&fc.q_line).all(|&x| x == 0.0));
            }
        }
    }

    #[test]
    fn pullback_energy_identity() {
        for m in 0..=5 {
            let h = sg_harmonic([1.0f64, 0.3, -0.6], m).unwrap();
            let f = pullback_sg(&h, m, 1).unwrap();
            let seq = MatchingSequence::<f64>::constant(0.5).unwrap();
            let fc = form_components(&seq, m, &f).unwrap();
            assert!((fc.q_sigma - h.triangle_sum().unwrap()).abs() < 1e-12);
        }
    }

    #[test]
    fn deeper_pullback_is_refinement() {
        let h = sg_harmonic([1.0f64, 0.0, 0.0], 1).unwrap();
        let deep = pullback_sg(&h, 3, 1).unwrap();
        let direct = pullback_sg(&sg_harmonic([1.0, 0.0, 0.0], 3).unwrap(), 3, 1).unwrap();
        for (a, v) in deep.vertex_values() {
            assert!((v - direct.value(a).unwrap()).abs() < 1e-14);
        }
    }

    #[test]
    fn tent_examples() {
        let seq = MatchingSequence::<f64>::constant(0.25).unwrap();
        let t = tent_on_segment::<f64>(&Word::empty(), Bond::ALL[0], 2, 4).unwrap();
        let fc = form_components(&seq, 2, &t).unwrap();
        assert_eq!(fc.d_line[0], 4.0);
        assert_eq!(fc.q_line[0], 0.0);
        for m in 1..=3 {
            let t = tent_on_segment::<f64>(&Word::empty(), Bond::ALL[0], m, 2).unwrap();
            let e = energy(&build_ssg(&seq, m, 2).unwrap(), &t).unwrap();
            assert!((e - 16.0).abs() < 1e-12);
        }
        assert_eq!(
            tent_on_segment::<f64>(&Word::empty(), Bond::ALL[0], 2, 3),
            Err(Error::OddSubdivision(3))
        );
        assert!(tent_on_segment::<f64>(&"12".parse().unwrap(), Bond::ALL[0], 2, 2).is_err());
    }

    #[test]
    fn clamp_examples() {
        let t = tent_on_segment::<f64>(&Word::empty(), Bond::ALL[1], 1, 4).unwrap();
        assert_eq!(clamp(&t), t);
        let doubled = t.scale(2.0);
        let c = clamp(&doubled);
        assert_eq!(clamp(&c), c);
        let seg = Segment::new(Word::empty(), Bond::ALL[1]);
        assert_eq!(c.profile(&seg).unwrap(), &[1.0, 1.0, 1.0]);
        let seq = MatchingSequence::<f64>::constant(0.25).unwrap();
        let before = form_components(&seq, 1, &doubled).unwrap().d_line[0];
        let after = form_components(&seq, 1, &c).unwrap().d_line[0];
        assert!(after < before);
    }

    #[test]
    fn random_examples() {
        let a = random_function::<f64>(5, 2, 3).unwrap();
        assert_eq!(a, random_function(5, 2, 3).unwrap());
        assert_ne!(a, random_function(6, 2, 3).unwrap());
        assert!(a
            .vertex_values()
            .values()
            .chain(a.profiles().values().flatten())
            .all(|v| v.abs() <= 1.0));
        let net = build_ssg(&MatchingSequence::<f64>::constant(0.3).unwrap(), 2, 2).unwrap();
        let e = energy(&net, &random_function::<f64>(0, 2, 2).unwrap()).unwrap();
        assert!(e.is_finite() && e >= 0.0);
        assert_eq!(a.vertex_values().len(), vertex_set(2).unwrap().len());
        assert_eq!(a.profiles().len(), segments(2).len());
    }

    #[test]
    fn function_spec_language() {
        let spec = FunctionSpec::from_json(
            r#"{"kind":"sum","parts":[{"kind":"pullback_harmonic","boundary":[1,0,0]},{"kind":"tent","segment":"∅:12"}]}"#,
        )
        .unwrap();
        let f: DiscretizedFunction<f64> = spec.build(2, 2).unwrap();
        let seg = Segment::new(Word::empty(), Bond::ALL[0]);
        // pullback value at the segment plus the tent peak
        assert!((f.profile(&seg).unwrap()[0] - 1.4).abs() < 1e-15);
        let r = FunctionSpec::from_json(r#"{"kind":"random","seed":7}"#).unwrap();
        assert_eq!(r.build::<f64>(1, 1).unwrap(), random_function(7, 1, 1).unwrap());
        assert!(FunctionSpec::from_json(r#"{"kind":"wave"}"#).is_err());
        let back: FunctionSpec = serde_json::from_str(&serde_json::to_string(&spec).unwrap()).unwrap();
        assert_eq!(back, spec);
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(100))]

        #[test]
        fn clamp_never_raises_components(seed in any::<u64>(), m in 1usize..=3, n in 1usize..=4) {
            let seq = MatchingSequence::<f64>::constant(0.4).unwrap();
            let f = random_function::<f64>(seed, m, n).unwrap().scale(1.5);
            let a = form_components(&seq, m, &f).unwrap();
            let b = form_components(&seq, m, &clamp(&f)).unwrap();
            prop_assert!(b.q_sigma <= a.q_sigma);
            for k in 0..m {
                prop_assert!(b.q_line[k] <= a.q_line[k]);
                prop_assert!(b.d_line[k] <= a.d_line[k]);
            }
            prop_assert!(b.total <= a.total);
        }
    }
}
