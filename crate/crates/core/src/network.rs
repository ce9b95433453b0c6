//! Weighted networks realizing the level-`m` forms on the stretched gasket and on
//! the gasket itself, piecewise-linear functions on them, and the form components.

use std::collections::{BTreeMap, HashMap, VecDeque};
use std::fmt;

use crate::error::{Error, Result};
use crate::scalar::Scalar;
use crate::sequence::MatchingSequence;
use crate::topology::{
    canonicalize, max_level, segments, sg_class, sg_vertex_set, vertex_set, Address, Bond, Segment, SgClass, Symmetry,
    Word,
};

/// Interior sample `index` (1..subdiv) of a segment cut into `subdiv` pieces.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct SegmentSample {
    pub segment: Segment,
    pub index: usize,
    pub subdiv: usize,
}

#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Node {
    Vertex(Address),
    Sample(SegmentSample),
    Sg(SgClass),
    /// Unlabeled node for hand-built networks.
    Aux(usize),
}

impl fmt::Display for Node {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Node::Vertex(a) => write!(f, "{a}"),
            Node::Sample(s) => write!(f, "{}#{}/{}", s.segment, s.index, s.subdiv),
            Node::Sg(c) => write!(f, "sg:{c}"),
            Node::Aux(k) => write!(f, "aux:{k}"),
        }
    }
}

impl From<Address> for Node {
    fn from(a: Address) -> Self {
        Node::Vertex(a)
    }
}

impl From<SgClass> for Node {
    fn from(c: SgClass) -> Self {
        Node::Sg(c)
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum EdgeTag {
    Triangle {
        level: usize,
        cell: Word,
    },
    Segment {
        level: usize,
        cell: Word,
        bond: Bond,
        sub: usize,
    },
    Plain,
}

impl fmt::Display for EdgeTag {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            EdgeTag::Triangle { level, cell } => write!(f, "triangle m={level} w={cell}"),
            EdgeTag::Segment { level, cell, bond, sub } => {
                write!(f, "segment k={level} w={cell} b={bond} sub={sub}")
            }
            EdgeTag::Plain => write!(f, "plain"),
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct Edge<T> {
    pub a: usize,
    pub b: usize,
    pub conductance: T,
    pub tag: EdgeTag,
}

/// Finite graph with positive edge conductances; energy is `Σ_edges c (u_a - u_b)²`.
/// Parallel edges are allowed and add up.
#[derive(Clone, Debug, Default)]
pub struct ResistorNetwork<T> {
    nodes: Vec<Node>,
    index: HashMap<Node, usize>,
    edges: Vec<Edge<T>>,
}

impl<T: Scalar> ResistorNetwork<T> {
    pub fn new() -> Self {
        ResistorNetwork {
            nodes: Vec::new(),
            index: HashMap::new(),
            edges: Vec::new(),
        }
    }

    /// Inserts `node` if absent and returns its index.
    pub fn add_node(&mut self, node: Node) -> usize {
        if let Some(&i) = self.index.get(&node) {
            return i;
        }
        self.nodes.push(node.clone());
        self.index.insert(node, self.nodes.len() - 1);
        self.nodes.len() - 1
    }

    pub fn add_edge(&mut self, a: Node, b: Node, conductance: T, tag: EdgeTag) -> Result<()> {
        let (ia, ib) = (self.add_node(a), self.add_node(b));
        self.add_edge_between(ia, ib, conductance, tag)
    }

    pub fn add_edge_between(&mut self, a: usize, b: usize, conductance: T, tag: EdgeTag) -> Result<()> {
        if a >= self.nodes.len() || b >= self.nodes.len() {
            return Err(Error::UnknownNode(format!("index {}", a.max(b))));
        }
        if a == b {
            return Err(Error::SelfLoop(self.nodes[a].to_string()));
        }
        if !(conductance > T::zero() && conductance.is_finite()) {
            return Err(Error::BadConductance(conductance.as_f64()));
        }
        self.edges.push(Edge { a, b, conductance, tag });
        Ok(())
    }

    pub fn nodes(&self) -> &[Node] {
        &self.nodes
    }

    pub fn edges(&self) -> &[Edge<T>] {
        &self.edges
    }

    pub fn node_count(&self) -> usize {
        self.nodes.len()
    }

    pub fn edge_count(&self) -> usize {
        self.edges.len()
    }

    pub fn index_of(&self, node: &Node) -> Option<usize> {
        self.index.get(node).copied()
    }

    pub fn require(&self, node: &Node) -> Result<usize> {
        self.index_of(node).ok_or_else(|| Error::UnknownNode(node.to_string()))
    }

    /// Copy with one edge's conductance multiplied by `factor`.
    pub fn with_edge_scaled(&self, edge: usize, factor: T) -> Result<Self> {
        let mut out = self.clone();
        let e = out
            .edges
            .get_mut(edge)
            .ok_or_else(|| Error::UnknownNode(format!("edge {edge}")))?;
        let c = e.conductance * factor;
        if !(c > T::zero() && c.is_finite()) {
            return Err(Error::BadConductance(c.as_f64()));
        }
        e.conductance = c;
        Ok(out)
    }

    /// Neighbor lists with summed parallel conductances.
    pub fn adjacency(&self) -> Vec<BTreeMap<usize, T>> {
        let mut adj = vec![BTreeMap::new(); self.nodes.len()];
        for e in &self.edges {
            *adj[e.a].entry(e.b).or_insert(T::zero()) += e.conductance;
            *adj[e.b].entry(e.a).or_insert(T::zero()) += e.conductance;
        }
        adj
    }

    /// Connected component labels, numbered from 0 in node order.
    pub fn components(&self) -> Vec<usize> {
        let adj = self.adjacency();
        let mut label = vec![usize::MAX; self.nodes.len()];
        let mut next = 0;
        for start in 0..self.nodes.len() {
            if label[start] != usize::MAX {
                continue;
            }
            label[start] = next;
            let mut queue = VecDeque::from([start]);
            while let Some(v) = queue.pop_front() {
                for &u in adj[v].keys() {
                    if label[u] == usize::MAX {
                        label[u] = next;
                        queue.push_back(u);
                    }
                }
            }
            next += 1;
        }
        label
    }

    pub fn is_connected(&self) -> bool {
        self.components().iter().all(|&c| c == 0)
    }

    /// `u,v,conductance,tag` rows.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("u,v,conductance,tag\n");
        for e in &self.edges {
            out.push_str(&format!(
                "{},{},{},{}\n",
                self.nodes[e.a],
                self.nodes[e.b],
                crate::experiments::fmt_sig(e.conductance.as_f64()),
                e.tag
            ));
        }
        out
    }
}

/// `δ_0..δ_m` and `γ_1..γ_m` for a level-`m` network, possibly from non-matching pairs.
#[derive(Clone, Debug, PartialEq)]
pub struct LevelScales<T> {
    pub delta: Vec<T>,
    pub gamma: Vec<T>,
}

impl<T: Scalar> LevelScales<T> {
    pub fn from_sequence(seq: &MatchingSequence<T>, m: usize) -> Result<Self> {
        Ok(LevelScales {
            delta: seq.deltas(m)?,
            gamma: seq.gammas(m)?,
        })
    }

    /// Scales from arbitrary `(r_k, ρ_k)` without the matching condition.
    pub fn from_pairs(pairs: &[(T, T)]) -> Result<Self> {
        let mut delta = vec![T::one()];
        let mut gamma = Vec::with_capacity(pairs.len());
        for &(r, rho) in pairs {
            if !(r > T::zero() && rho > T::zero()) {
                return Err(Error::InvalidSequence(format!("pair ({r}, {rho}) must be positive")));
            }
            gamma.push(*delta.last().expect("nonempty") * rho);
            delta.push(*delta.last().expect("nonempty") * r);
        }
        Ok(LevelScales { delta, gamma })
    }

    pub fn level(&self) -> usize {
        self.gamma.len()
    }

    /// Scales of the first `m` levels.
    pub fn truncated(&self, m: usize) -> Self {
        LevelScales {
            delta: self.delta[..=m.min(self.level())].to_vec(),
            gamma: self.gamma[..m.min(self.level())].to_vec(),
        }
    }
}

fn check_level(m: usize) -> Result<()> {
    if m > max_level() {
        return Err(Error::LevelTooDeep {
            level: m,
            cap: max_level(),
        });
    }
    Ok(())
}

/// Network on `V_m` (plus `n-1` interior samples per segment) whose energy is
/// `Q_m^Σ/δ_m + Σ_k D_k/γ_k`.
pub fn build_ssg<T: Scalar>(seq: &MatchingSequence<T>, m: usize, n: usize) -> Result<ResistorNetwork<T>> {
    check_level(m)?;
    build_ssg_scaled(&LevelScales::from_sequence(seq, m)?, n)
}

pub fn build_ssg_scaled<T: Scalar>(scales: &LevelScales<T>, n: usize) -> Result<ResistorNetwork<T>> {
    if n == 0 {
        return Err(Error::ZeroSubdivision);
    }
    let m = scales.level();
    check_level(m)?;
    let mut net = ResistorNetwork::new();
    for a in vertex_set(m)? {
        net.add_node(Node::Vertex(a));
    }
    let top = T::one() / scales.delta[m];
    for w in Word::all(m) {
        for b in Bond::ALL {
            let p = net.require(&Node::Vertex(canonicalize(&w, b.i())?))?;
            let q = net.require(&Node::Vertex(canonicalize(&w, b.j())?))?;
            net.add_edge_between(
                p,
                q,
                top,
                EdgeTag::Triangle {
                    level: m,
                    cell: w.clone(),
                },
            )?;
        }
    }
    let nt = T::lit(n as f64);
    for seg in segments(m) {
        let k = seg.level();
        let c = nt / scales.gamma[k - 1];
        let mut chain = vec![net.require(&Node::Vertex(seg.start()))?];
        for index in 1..n {
            chain.push(net.add_node(Node::Sample(SegmentSample {
                segment: seg.clone(),
                index,
                subdiv: n,
            })));
        }
        chain.push(net.require(&Node::Vertex(seg.end()))?);
        for (sub, pair) in chain.windows(2).enumerate() {
            let tag = EdgeTag::Segment {
                level: k,
                cell: seg.word().clone(),
                bond: seg.bond(),
                sub,
            };
            net.add_edge_between(pair[0], pair[1], c, tag)?;
        }
    }
    Ok(net)
}

/// Gasket network on `V_m^*` with conductance `(5/3)^m` on every level-`m` triangle edge.
pub fn build_sg<T: Scalar>(m: usize) -> Result<ResistorNetwork<T>> {
    check_level(m)?;
    let mut net = ResistorNetwork::new();
    for c in sg_vertex_set(m)? {
        net.add_node(Node::Sg(c));
    }
    let c = (T::lit(5.0) / T::lit(3.0)).powi(m as i32);
    for w in Word::all(m) {
        for b in Bond::ALL {
            let p = net.require(&Node::Sg(sg_class(&canonicalize(&w, b.i())?, m)?))?;
            let q = net.require(&Node::Sg(sg_class(&canonicalize(&w, b.j())?, m)?))?;
            net.add_edge_between(
                p,
                q,
                c,
                EdgeTag::Triangle {
                    level: m,
                    cell: w.clone(),
                },
            )?;
        }
    }
    Ok(net)
}

/// Anything that assigns values to network nodes.
pub trait NodeValues<T> {
    fn node_value(&self, node: &Node) -> Option<T>;
}

impl<T: Copy> NodeValues<T> for HashMap<Node, T> {
    fn node_value(&self, node: &Node) -> Option<T> {
        self.get(node).copied()
    }
}

impl<T: Copy> NodeValues<T> for BTreeMap<Node, T> {
    fn node_value(&self, node: &Node) -> Option<T> {
        self.get(node).copied()
    }
}

/// Values of `f` at every node, in node order.
pub fn node_vector<T: Scalar>(net: &ResistorNetwork<T>, f: &impl NodeValues<T>) -> Result<Vec<T>> {
    net.nodes()
        .iter()
        .map(|n| f.node_value(n).ok_or_else(|| Error::MissingValue(n.to_string())))
        .collect()
}

pub fn energy<T: Scalar>(net: &ResistorNetwork<T>, f: &impl NodeValues<T>) -> Result<T> {
    Ok(energy_of_vector(net, &node_vector(net, f)?))
}

pub fn energy_of_vector<T: Scalar>(net: &ResistorNetwork<T>, u: &[T]) -> T {
    net.edges()
        .iter()
        .map(|e| {
            let d = u[e.a] - u[e.b];
            e.conductance * d * d
        })
        .sum()
}

/// Unit-parameter Dirichlet energy `n Σ (Δ)²` of a piecewise-linear profile given
/// by its `n+1` equally spaced values.
pub fn dirichlet_energy<T: Scalar>(profile: &[T]) -> T {
    let n = T::lit(profile.len().saturating_sub(1) as f64);
    n * profile.windows(2).map(|p| (p[1] - p[0]) * (p[1] - p[0])).sum::<T>()
}

/// Values on `V_M` and interior samples on every segment of level at most `M`,
/// read as the piecewise-linear interpolant along each segment.
#[derive(Clone, Debug, PartialEq)]
pub struct DiscretizedFunction<T> {
    depth: usize,
    subdiv: usize,
    vertices: BTreeMap<Address, T>,
    profiles: BTreeMap<Segment, Vec<T>>,
}

impl<T: Scalar> DiscretizedFunction<T> {
    /// Builds values from closures over vertices and `(segment, sample index)`.
    pub fn from_fn(
        depth: usize,
        subdiv: usize,
        mut vertex: impl FnMut(&Address) -> T,
        mut sample: impl FnMut(&Segment, usize) -> T,
    ) -> Result<Self> {
        if subdiv == 0 {
            return Err(Error::ZeroSubdivision);
        }
        let vertices = vertex_set(depth)?.into_iter().map(|a| {
            let v = vertex(&a);
            (a, v)
        });
        let vertices = vertices.collect();
        let profiles = segments(depth)
            .into_iter()
            .map(|s| {
                let p = (1..subdiv).map(|k| sample(&s, k)).collect();
                (s, p)
            })
            .collect();
        Ok(DiscretizedFunction {
            depth,
            subdiv,
            vertices,
            profiles,
        })
    }

    pub fn constant(depth: usize, subdiv: usize, c: T) -> Result<Self> {
        Self::from_fn(depth, subdiv, |_| c, |_, _| c)
    }

    pub fn zeros(depth: usize, subdiv: usize) -> Result<Self> {
        Self::constant(depth, subdiv, T::zero())
    }

    pub fn depth(&self) -> usize {
        self.depth
    }

    pub fn subdiv(&self) -> usize {
        self.subdiv
    }

    pub fn value(&self, a: &Address) -> Option<T> {
        self.vertices.get(a).copied()
    }

    pub fn vertex_values(&self) -> &BTreeMap<Address, T> {
        &self.vertices
    }

    /// Interior samples of a segment.
    pub fn profile(&self, s: &Segment) -> Option<&[T]> {
        self.profiles.get(s).map(|p| p.as_slice())
    }

    pub fn profiles(&self) -> &BTreeMap<Segment, Vec<T>> {
        &self.profiles
    }

    /// All `n+1` values along a segment, endpoints included.
    pub fn full_profile(&self, s: &Segment) -> Result<Vec<T>> {
        let missing = || Error::MissingValue(s.to_string());
        let mut out = vec![self.value(&s.start()).ok_or_else(missing)?];
        out.extend_from_slice(self.profile(s).ok_or_else(missing)?);
        out.push(self.value(&s.end()).ok_or_else(missing)?);
        Ok(out)
    }

    pub fn set_value(&mut self, a: &Address, v: T) -> Result<()> {
        match self.vertices.get_mut(a) {
            Some(slot) => {
                *slot = v;
                Ok(())
            }
            None => Err(Error::MissingValue(a.to_string())),
        }
    }

    pub fn set_profile(&mut self, s: &Segment, samples: Vec<T>) -> Result<()> {
        if samples.len() + 1 != self.subdiv {
            return Err(Error::InvalidBoundary(format!(
                "{} samples given for subdivision {}",
                samples.len(),
                self.subdiv
            )));
        }
        match self.profiles.get_mut(s) {
            Some(slot) => {
                *slot = samples;
                Ok(())
            }
            None => Err(Error::MissingValue(s.to_string())),
        }
    }

    pub fn map(&self, f: impl Fn(T) -> T) -> Self {
        DiscretizedFunction {
            depth: self.depth,
            subdiv: self.subdiv,
            vertices: self.vertices.iter().map(|(a, &v)| (a.clone(), f(v))).collect(),
            profiles: self
                .profiles
                .iter()
                .map(|(s, p)| (s.clone(), p.iter().map(|&v| f(v)).collect()))
                .collect(),
        }
    }

    pub fn zip_with(&self, other: &Self, f: impl Fn(T, T) -> T) -> Result<Self> {
        if self.depth != other.depth {
            return Err(Error::DepthMismatch {
                expected: self.depth,
                found: other.depth,
            });
        }
        if self.subdiv != other.subdiv {
            return Err(Error::DepthMismatch {
                expected: self.subdiv,
                found: other.subdiv,
            });
        }
        Ok(DiscretizedFunction {
            depth: self.depth,
            subdiv: self.subdiv,
            vertices: self
                .vertices
                .iter()
                .map(|(a, &v)| (a.clone(), f(v, other.vertices[a])))
                .collect(),
            profiles: self
                .profiles
                .iter()
                .map(|(s, p)| {
                    let q = &other.profiles[s];
                    (s.clone(), p.iter().zip(q).map(|(&x, &y)| f(x, y)).collect())
                })
                .collect(),
        })
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        self.zip_with(other, |a, b| a + b)
    }

    pub fn sub(&self, other: &Self) -> Result<Self> {
        self.zip_with(other, |a, b| a - b)
    }

    pub fn scale(&self, c: T) -> Self {
        self.map(|v| c * v)
    }

    /// `f ∘ s`: the value at `x` is the value of `f` at the image of `x`.
    pub fn compose_symmetry(&self, s: Symmetry) -> Self {
        let vertices = self
            .vertices
            .keys()
            .map(|a| (a.clone(), self.vertices[&crate::topology::apply_symmetry(s, a)]))
            .collect();
        let profiles = self
            .profiles
            .keys()
            .map(|seg| {
                let (image, reversed) = s.segment(seg);
                let mut p = self.profiles[&image].clone();
                if reversed {
                    p.reverse();
                }
                (seg.clone(), p)
            })
            .collect();
        DiscretizedFunction {
            depth: self.depth,
            subdiv: self.subdiv,
            vertices,
            profiles,
        }
    }

    /// `f ∘ G_i` at depth `M - 1`.
    pub fn restrict_to_cell(&self, i: u8) -> Result<Self> {
        if self.depth == 0 {
            return Err(Error::DepthMismatch { expected: 1, found: 0 });
        }
        let vertices = vertex_set(self.depth - 1)?
            .into_iter()
            .map(|a| {
                let v = self.vertices[&canonicalize(&a.word().prepend(i), a.corner())?];
                Ok((a, v))
            })
            .collect::<Result<_>>()?;
        let profiles = segments(self.depth - 1)
            .into_iter()
            .map(|s| {
                let outer = Segment::new(s.word().prepend(i), s.bond());
                let p = self.profiles[&outer].clone();
                (s, p)
            })
            .collect();
        Ok(DiscretizedFunction {
            depth: self.depth - 1,
            subdiv: self.subdiv,
            vertices,
            profiles,
        })
    }

    /// `address,value` rows, then a `segment,index,value` block of interior samples.
    pub fn to_csv(&self) -> String {
        let fmt = |v: T| crate::experiments::fmt_sig(v.as_f64());
        let mut out = String::from("address,value\n");
        for (a, &v) in &self.vertices {
            out.push_str(&format!("{a},{}\n", fmt(v)));
        }
        out.push_str("\nsegment,index,value\n");
        for (s, p) in &self.profiles {
            for (k, &v) in p.iter().enumerate() {
                out.push_str(&format!("{s},{},{}\n", k + 1, fmt(v)));
            }
        }
        out
    }
}

impl<T: Scalar> NodeValues<T> for DiscretizedFunction<T> {
    fn node_value(&self, node: &Node) -> Option<T> {
        match node {
            Node::Vertex(a) => self.value(a),
            Node::Sample(s) if s.subdiv == self.subdiv => {
                self.profiles.get(&s.segment).and_then(|p| p.get(s.index - 1)).copied()
            }
            _ => None,
        }
    }
}

/// The pieces of the level-`m` energy.
#[derive(Clone, Debug, PartialEq)]
pub struct FormComponents<T> {
    /// `Q_m^Σ`: triangle differences over all level-`m` cells.
    pub q_sigma: T,
    /// `Q_k^I`, `k = 1..m`: squared endpoint differences of level-`k` segments.
    pub q_line: Vec<T>,
    /// `D_k^I`, `k = 1..m`: Dirichlet energy of level-`k` profiles.
    pub d_line: Vec<T>,
    pub total: T,
}

pub fn form_components<T: Scalar>(
    seq: &MatchingSequence<T>,
    m: usize,
    f: &DiscretizedFunction<T>,
) -> Result<FormComponents<T>> {
    form_components_scaled(&LevelScales::from_sequence(seq, m)?, f)
}

pub fn form_components_scaled<T: Scalar>(
    scales: &LevelScales<T>,
    f: &DiscretizedFunction<T>,
) -> Result<FormComponents<T>> {
    let m = scales.level();
    if f.depth() < m {
        return Err(Error::DepthMismatch {
            expected: m,
            found: f.depth(),
        });
    }
    let at = |w: &Word, i: u8| -> Result<T> {
        let a = canonicalize(w, i)?;
        f.value(&a).ok_or_else(|| Error::MissingValue(a.to_string()))
    };
    let mut q_sigma = T::zero();
    for w in Word::all(m) {
        for b in Bond::ALL {
            let d = at(&w, b.i())? - at(&w, b.j())?;
            q_sigma += d * d;
        }
    }
    let mut q_line = vec![T::zero(); m];
    let mut d_line = vec![T::zero(); m];
    for seg in segments(m) {
        let p = f.full_profile(&seg)?;
        let d = p[p.len() - 1] - p[0];
        q_line[seg.level() - 1] += d * d;
        d_line[seg.level() - 1] += dirichlet_energy(&p);
    }
    let mut total = q_sigma / scales.delta[m];
    for (d, g) in d_line.iter().zip(&scales.gamma) {
        total += *d / *g;
    }
    Ok(FormComponents {
        q_sigma,
        q_line,
        d_line,
        total,
    })
}
