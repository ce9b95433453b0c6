//! Network reduction: Laplacians, traces (Schur complements), harmonic
//! extension, effective resistance, the Δ-Y transform, and the level-to-level
//! compatibility check.

mod dense;
mod kron;

use std::collections::{HashMap, HashSet};

use crate::error::{Error, Result};
use crate::network::{build_sg, build_ssg_scaled, EdgeTag, LevelScales, Node, NodeValues, ResistorNetwork};
use crate::scalar::Scalar;
use crate::sequence::MatchingSequence;
use crate::topology::{sg_vertex_set, vertex_set};

use dense::{schur_complement, Cholesky, Dense};
use kron::Reduction;

/// Largest network handled by the dense all-pairs route.
pub const DENSE_LIMIT: usize = 3000;
/// Threshold for identities checked through a network solve.
pub const STRUCTURAL_TOL: f64 = 1e-9;
/// Threshold for closed-form scalar identities.
pub const SCALAR_TOL: f64 = 1e-12;

/// Laplacian of a reduced network on a list of boundary nodes:
/// diagonal entries are summed conductances, off-diagonals are negated conductances.
#[derive(Clone, Debug, PartialEq)]
pub struct TraceForm<T> {
    boundary: Vec<Node>,
    matrix: Vec<T>,
}

impl<T: Scalar> TraceForm<T> {
    pub fn boundary(&self) -> &[Node] {
        &self.boundary
    }

    pub fn size(&self) -> usize {
        self.boundary.len()
    }

    pub fn entry(&self, i: usize, j: usize) -> T {
        self.matrix[i * self.size() + j]
    }

    /// Effective conductance between boundary nodes `i != j`.
    pub fn conductance(&self, i: usize, j: usize) -> T {
        -self.entry(i, j)
    }

    pub fn energy(&self, x: &[T]) -> T {
        let k = self.size();
        let mut e = T::zero();
        for i in 0..k {
            for j in i + 1..k {
                let d = x[i] - x[j];
                e += self.conductance(i, j) * d * d;
            }
        }
        e
    }

    pub fn energy_of(&self, f: &impl NodeValues<T>) -> Result<T> {
        let x = self
            .boundary
            .iter()
            .map(|n| f.node_value(n).ok_or_else(|| Error::MissingValue(n.to_string())))
            .collect::<Result<Vec<T>>>()?;
        Ok(self.energy(&x))
    }

    /// Largest absolute row sum (zero up to rounding).
    pub fn max_row_sum(&self) -> T {
        let k = self.size();
        (0..k)
            .map(|i| (0..k).map(|j| self.entry(i, j)).sum::<T>().abs())
            .fold(T::zero(), T::max)
    }

    /// Largest `|a_ij - a_ji|`.
    pub fn asymmetry(&self) -> T {
        let k = self.size();
        let mut worst = T::zero();
        for i in 0..k {
            for j in 0..k {
                worst = worst.max((self.entry(i, j) - self.entry(j, i)).abs());
            }
        }
        worst
    }

    /// Max-abs entry difference after matching boundary nodes by name.
    pub fn max_abs_diff(&self, other: &TraceForm<T>) -> Result<T> {
        if self.size() != other.size() {
            return Err(Error::InvalidBoundary(format!(
                "boundaries have {} and {} nodes",
                self.size(),
                other.size()
            )));
        }
        let pos: HashMap<&Node, usize> = other.boundary.iter().enumerate().map(|(i, n)| (n, i)).collect();
        let map = self
            .boundary
            .iter()
            .map(|n| pos.get(n).copied().ok_or_else(|| Error::UnknownNode(n.to_string())))
            .collect::<Result<Vec<usize>>>()?;
        let k = self.size();
        let mut worst = T::zero();
        for i in 0..k {
            for j in 0..k {
                worst = worst.max((self.entry(i, j) - other.entry(map[i], map[j])).abs());
            }
        }
        Ok(worst)
    }

    /// Header row of node names, then one matrix row per node.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("node");
        for n in &self.boundary {
            out.push_str(&format!(",{n}"));
        }
        out.push('\n');
        for (i, n) in self.boundary.iter().enumerate() {
            out.push_str(&n.to_string());
            for j in 0..self.size() {
                out.push_str(&format!(",{}", crate::experiments::fmt_sig(self.entry(i, j).as_f64())));
            }
            out.push('\n');
        }
        out
    }
}

/// Laplacian of the whole network, in node order.
pub fn laplacian<T: Scalar>(net: &ResistorNetwork<T>) -> TraceForm<T> {
    let d = dense_laplacian(net);
    TraceForm {
        boundary: net.nodes().to_vec(),
        matrix: d.data,
    }
}

fn dense_laplacian<T: Scalar>(net: &ResistorNetwork<T>) -> Dense<T> {
    let mut d = Dense::zeros(net.node_count());
    for e in net.edges() {
        *d.at_mut(e.a, e.a) += e.conductance;
        *d.at_mut(e.b, e.b) += e.conductance;
        *d.at_mut(e.a, e.b) -= e.conductance;
        *d.at_mut(e.b, e.a) -= e.conductance;
    }
    d
}

fn boundary_indices<T: Scalar>(net: &ResistorNetwork<T>, boundary: &[Node]) -> Result<Vec<usize>> {
    if boundary.is_empty() {
        return Err(Error::InvalidBoundary("boundary is empty".into()));
    }
    let mut seen = HashSet::new();
    boundary
        .iter()
        .map(|n| {
            let i = net.require(n)?;
            if !seen.insert(i) {
                return Err(Error::InvalidBoundary(format!("{n} listed twice")));
            }
            Ok(i)
        })
        .collect()
}

fn reduce<T: Scalar>(net: &ResistorNetwork<T>, keep: &[usize]) -> Result<Reduction<T>> {
    if !net.is_connected() {
        return Err(Error::NotConnected);
    }
    let mut kept = vec![false; net.node_count()];
    for &k in keep {
        kept[k] = true;
    }
    Reduction::eliminate(net.adjacency(), &kept, &vec![true; net.node_count()])
}

/// Trace onto `boundary`: the Schur complement of the Laplacian, computed by
/// eliminating interior nodes in minimum-degree order.
pub fn trace<T: Scalar>(net: &ResistorNetwork<T>, boundary: &[Node]) -> Result<TraceForm<T>> {
    let idx = boundary_indices(net, boundary)?;
    let red = reduce(net, &idx)?;
    let k = idx.len();
    let mut matrix = vec![T::zero(); k * k];
    for (a, &i) in idx.iter().enumerate() {
        for (b, &j) in idx.iter().enumerate() {
            if a != b {
                let c = red.kept_links[i].get(&j).copied().unwrap_or(T::zero());
                matrix[a * k + b] = -c;
                matrix[a * k + a] += c;
            }
        }
    }
    Ok(TraceForm {
        boundary: boundary.to_vec(),
        matrix,
    })
}

/// Same as [`trace`] through a dense Cholesky factor of the interior block.
pub fn trace_dense<T: Scalar>(net: &ResistorNetwork<T>, boundary: &[Node]) -> Result<TraceForm<T>> {
    let idx = boundary_indices(net, boundary)?;
    if !net.is_connected() {
        return Err(Error::NotConnected);
    }
    let s = schur_complement(&dense_laplacian(net), &idx)?;
    Ok(TraceForm {
        boundary: boundary.to_vec(),
        matrix: s.data,
    })
}

/// Energy minimizer with prescribed boundary values.
#[derive(Clone, Debug, PartialEq)]
pub struct HarmonicExtension<T> {
    nodes: Vec<Node>,
    values: Vec<T>,
    index: HashMap<Node, usize>,
    boundary: Vec<(Node, T)>,
    energy: T,
}

impl<T: Scalar> HarmonicExtension<T> {
    pub fn value(&self, node: &Node) -> Option<T> {
        self.index.get(node).map(|&i| self.values[i])
    }

    /// Values in network node order.
    pub fn values(&self) -> &[T] {
        &self.values
    }

    pub fn nodes(&self) -> &[Node] {
        &self.nodes
    }

    pub fn boundary(&self) -> &[(Node, T)] {
        &self.boundary
    }

    /// Energy of the extension, equal to the trace energy of the boundary data.
    pub fn energy(&self) -> T {
        self.energy
    }
}

impl<T: Scalar> NodeValues<T> for HarmonicExtension<T> {
    fn node_value(&self, node: &Node) -> Option<T> {
        self.value(node)
    }
}

pub fn harmonic_extend<T: Scalar>(net: &ResistorNetwork<T>, boundary: &[(Node, T)]) -> Result<HarmonicExtension<T>> {
    let nodes: Vec<Node> = boundary.iter().map(|(n, _)| n.clone()).collect();
    let idx = boundary_indices(net, &nodes)?;
    let red = reduce(net, &idx)?;
    let mut values = vec![T::zero(); net.node_count()];
    for (&i, (_, v)) in idx.iter().zip(boundary) {
        values[i] = *v;
    }
    red.extend(&mut values);
    let energy = crate::network::energy_of_vector(net, &values);
    Ok(HarmonicExtension {
        nodes: net.nodes().to_vec(),
        index: net.nodes().iter().enumerate().map(|(i, n)| (n.clone(), i)).collect(),
        values,
        boundary: boundary.to_vec(),
        energy,
    })
}

pub fn effective_resistance<T: Scalar>(net: &ResistorNetwork<T>, p: &Node, q: &Node) -> Result<T> {
    let (ip, iq) = (net.require(p)?, net.require(q)?);
    if ip == iq {
        return Err(Error::InvalidBoundary(format!("{p} is both endpoints")));
    }
    let comp = net.components();
    if comp[ip] != comp[iq] {
        return Err(Error::InfiniteResistance(p.to_string(), q.to_string()));
    }
    let active: Vec<bool> = comp.iter().map(|&c| c == comp[ip]).collect();
    let mut kept = vec![false; net.node_count()];
    kept[ip] = true;
    kept[iq] = true;
    let red = Reduction::eliminate(net.adjacency(), &kept, &active)?;
    let c = red.kept_links[ip].get(&iq).copied().unwrap_or(T::zero());
    if c.is_nan() || c <= T::zero() {
        return Err(Error::InfiniteResistance(p.to_string(), q.to_string()));
    }
    Ok(c.recip())
}

/// Symmetric table of effective resistances between all node pairs, in node order.
#[derive(Clone, Debug, PartialEq)]
pub struct ResistanceTable<T> {
    pub nodes: Vec<Node>,
    values: Vec<T>,
}

impl<T: Scalar> ResistanceTable<T> {
    pub fn get(&self, i: usize, j: usize) -> T {
        self.values[i * self.nodes.len() + j]
    }

    pub fn max(&self) -> T {
        self.values.iter().copied().fold(T::zero(), T::max)
    }
}

/// Grounded Green function columns: `column(i)[j] = G_ij` with node 0 grounded.
fn green_columns<T: Scalar>(net: &ResistorNetwork<T>) -> Result<Box<dyn Fn(usize) -> Vec<T> + '_>> {
    if !net.is_connected() {
        return Err(Error::NotConnected);
    }
    let n = net.node_count();
    if n <= DENSE_LIMIT {
        let rest: Vec<usize> = (1..n).collect();
        let g = Cholesky::factor(&dense_laplacian(net).submatrix(&rest, &rest))?.inverse();
        Ok(Box::new(move |i| {
            let mut col = vec![T::zero(); n];
            if i > 0 {
                for (j, c) in col.iter_mut().enumerate().skip(1) {
                    *c = g.at(j - 1, i - 1);
                }
            }
            col
        }))
    } else {
        let mut kept = vec![false; n];
        kept[0] = true;
        let red = Reduction::eliminate(net.adjacency(), &kept, &vec![true; n])?;
        Ok(Box::new(move |i| {
            let mut e = vec![T::zero(); n];
            e[i] = T::one();
            red.solve_grounded(&e)
        }))
    }
}

/// All-pairs effective resistance from one factorization of the grounded Laplacian
/// (dense up to [`DENSE_LIMIT`] nodes, sparse beyond).
pub fn resistance_matrix<T: Scalar>(net: &ResistorNetwork<T>) -> Result<ResistanceTable<T>> {
    let n = net.node_count();
    let column = green_columns(net)?;
    let cols: Vec<Vec<T>> = (0..n).map(&column).collect();
    let mut values = vec![T::zero(); n * n];
    for i in 0..n {
        for j in 0..n {
            values[i * n + j] = if i == j {
                T::zero()
            } else {
                cols[i][i] + cols[j][j] - cols[i][j] - cols[j][i]
            };
        }
    }
    Ok(ResistanceTable {
        nodes: net.nodes().to_vec(),
        values,
    })
}

pub fn resistance_diameter<T: Scalar>(net: &ResistorNetwork<T>) -> Result<T> {
    let n = net.node_count();
    let column = green_columns(net)?;
    let diag: Vec<T> = (0..n).map(|i| column(i)[i]).collect();
    let mut worst = T::zero();
    for i in 0..n {
        let col = column(i);
        for j in i + 1..n {
            worst = worst.max(diag[i] + diag[j] - col[j] - col[j]);
        }
    }
    Ok(worst)
}

/// Star arms `(R_1, R_2, R_3)` equivalent to the triangle with resistances `r12, r23, r31`.
pub fn delta_wye<T: Scalar>(r12: T, r23: T, r31: T) -> Result<[T; 3]> {
    for r in [r12, r23, r31] {
        if !(r > T::zero() && r.is_finite()) {
            return Err(Error::BadConductance(r.as_f64()));
        }
    }
    let s = r12 + r23 + r31;
    Ok([r12 * r31 / s, r12 * r23 / s, r23 * r31 / s])
}

/// Star with centre `Aux(0)` and arms of resistance `arms[i-1]` to `Aux(i)`.
pub fn star_network<T: Scalar>(arms: [T; 3]) -> Result<ResistorNetwork<T>> {
    let mut net = ResistorNetwork::new();
    for (i, r) in arms.iter().enumerate() {
        net.add_edge(Node::Aux(0), Node::Aux(i + 1), r.recip(), EdgeTag::Plain)?;
    }
    Ok(net)
}

fn vertex_nodes(m: usize) -> Result<Vec<Node>> {
    Ok(vertex_set(m)?.into_iter().map(Node::Vertex).collect())
}

/// Max-abs difference between the trace of the level `m+1` network onto `V_m`
/// and the level-`m` network.
pub fn compatibility_residual<T: Scalar>(seq: &MatchingSequence<T>, m: usize) -> Result<T> {
    compatibility_residual_scaled(&LevelScales::from_sequence(seq, m + 1)?)
}

/// [`compatibility_residual`] for scales of levels `0..=m+1`, which need not come from matching pairs.
pub fn compatibility_residual_scaled<T: Scalar>(scales: &LevelScales<T>) -> Result<T> {
    let top = scales.level();
    if top == 0 {
        return Err(Error::InvalidSequence("need at least one level".into()));
    }
    let fine = build_ssg_scaled(scales, 1)?;
    let coarse = build_ssg_scaled(&scales.truncated(top - 1), 1)?;
    let traced = trace(&fine, &vertex_nodes(top - 1)?)?;
    traced.max_abs_diff(&laplacian(&coarse))
}

/// Same check for the gasket networks of levels `m+1` and `m`.
pub fn sg_compatibility_residual<T: Scalar>(m: usize) -> Result<T> {
    let boundary: Vec<Node> = sg_vertex_set(m)?.into_iter().map(Node::Sg).collect();
    // level-m classes are named at level m; rename the fine nodes to match
    let fine = build_sg::<T>(m + 1)?;
    let mut renamed = ResistorNetwork::new();
    for node in fine.nodes() {
        let n = match node {
            Node::Sg(c) if c.level() == m + 1 => coarse_name(c, m)?.map(Node::Sg).unwrap_or_else(|| node.clone()),
            other => other.clone(),
        };
        renamed.add_node(n);
    }
    for e in fine.edges() {
        renamed.add_edge_between(e.a, e.b, e.conductance, e.tag.clone())?;
    }
    let traced = trace(&renamed, &boundary)?;
    traced.max_abs_diff(&laplacian(&build_sg::<T>(m)?))
}

/// The level-`m` class of a level-`m+1` vertex, if it is already present at level `m`.
fn coarse_name(c: &crate::topology::SgClass, m: usize) -> Result<Option<crate::topology::SgClass>> {
    for (word, corner) in c.members() {
        let a = crate::topology::canonicalize(&word, corner)?;
        if a.word().len() <= m {
            return Ok(Some(crate::topology::sg_class(&a, m)?));
        }
    }
    Ok(None)
}

#[cfg(test)]
mod tests;
