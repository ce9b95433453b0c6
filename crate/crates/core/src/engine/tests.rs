use super::*;
use crate::functions::{pullback_sg, random_function, sg_harmonic, tent_on_segment};
use crate::network::{build_ssg, energy, energy_of_vector, node_vector, EdgeTag, NodeValues};
use crate::topology::{Address, Bond, Word};
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

type Seq = MatchingSequence<f64>;

fn aux(k: usize) -> Node {
    Node::Aux(k)
}

fn corner(i: u8) -> Node {
    Node::Vertex(Address::corner_of(i).unwrap())
}

fn corners() -> Vec<Node> {
    (1..=3).map(corner).collect()
}

fn path(conductances: &[f64]) -> ResistorNetwork<f64> {
    let mut net = ResistorNetwork::new();
    for (k, &c) in conductances.iter().enumerate() {
        net.add_edge(aux(k), aux(k + 1), c, EdgeTag::Plain).unwrap();
    }
    net
}

fn unit_triangle() -> ResistorNetwork<f64> {
    let mut net = ResistorNetwork::new();
    for (a, b) in [(0, 1), (1, 2), (2, 0)] {
        net.add_edge(aux(a), aux(b), 1.0, EdgeTag::Plain).unwrap();
    }
    net
}

fn close(a: f64, b: f64, tol: f64) -> bool {
    (a - b).abs() <= tol
}

#[test]
fn series_path() {
    let net = path(&[1.0, 1.0]);
    let t = trace(&net, &[aux(0), aux(2)]).unwrap();
    assert!(close(t.conductance(0, 1), 0.5, 1e-15));
    assert!(close(t.entry(0, 0), 0.5, 1e-15));
    assert!(close(effective_resistance(&net, &aux(0), &aux(2)).unwrap(), 2.0, 1e-15));
}

#[test]
fn triangle_resistance() {
    let r = effective_resistance(&unit_triangle(), &aux(0), &aux(1)).unwrap();
    assert!(close(r, 2.0 / 3.0, 1e-15));
}

#[test]
fn trace_onto_everything_is_the_laplacian() {
    let net = build_ssg(&Seq::constant(0.25).unwrap(), 1, 2).unwrap();
    let all = net.nodes().to_vec();
    let t = trace(&net, &all).unwrap();
    assert!(t.max_abs_diff(&laplacian(&net)).unwrap() < 1e-15);
}

#[test]
fn level_one_trace_is_unit_triangle() {
    for seq in [
        Seq::constant(0.25).unwrap(),
        Seq::geometric(0.5, 0.5).unwrap(),
        Seq::harmonic(0.5).unwrap(),
    ] {
        let t = trace(&build_ssg(&seq, 1, 1).unwrap(), &corners()).unwrap();
        for i in 0..3 {
            assert!(close(t.entry(i, i), 2.0, 1e-12));
            for j in 0..3 {
                if i != j {
                    assert!(close(t.conductance(i, j), 1.0, 1e-12));
                }
            }
        }
    }
}

#[test]
fn sparse_and_dense_traces_agree() {
    let seq = Seq::geometric(0.5, 0.5).unwrap();
    for (m, n) in [(1, 1), (2, 2), (3, 3)] {
        let net = build_ssg(&seq, m, n).unwrap();
        let b: Vec<Node> = vertex_set(m.saturating_sub(1))
            .unwrap()
            .into_iter()
            .map(Node::Vertex)
            .collect();
        let s = trace(&net, &b).unwrap();
        let d = trace_dense(&net, &b).unwrap();
        assert!(s.max_abs_diff(&d).unwrap() < 1e-12);
    }
}

#[test]
fn trace_forms_are_laplacians() {
    let net = build_ssg(&Seq::harmonic(0.5).unwrap(), 3, 2).unwrap();
    let t = trace(&net, &vertex_nodes(1).unwrap()).unwrap();
    assert!(t.max_row_sum() < 1e-12);
    assert!(t.asymmetry() < 1e-12);
    for i in 0..t.size() {
        for j in 0..t.size() {
            if i != j {
                assert!(t.entry(i, j) <= 1e-15);
            }
        }
    }
}

#[test]
fn trace_tower() {
    let net = build_ssg(&Seq::constant(0.25).unwrap(), 3, 2).unwrap();
    let b1 = vertex_nodes(1).unwrap();
    let b2 = vertex_nodes(2).unwrap();
    let direct = trace(&net, &b1).unwrap();
    // rebuild the level-2 trace as a network, then trace again
    let mid = trace(&net, &b2).unwrap();
    let mut mnet = ResistorNetwork::new();
    for n in mid.boundary() {
        mnet.add_node(n.clone());
    }
    for i in 0..mid.size() {
        for j in i + 1..mid.size() {
            let c = mid.conductance(i, j);
            if c > 0.0 {
                mnet.add_edge_between(i, j, c, EdgeTag::Plain).unwrap();
            }
        }
    }
    let twice = trace(&mnet, &b1).unwrap();
    assert!(direct.max_abs_diff(&twice).unwrap() < 1e-12);
}

#[test]
fn resistance_is_a_metric() {
    let seq = Seq::geometric(0.5, 0.5).unwrap();
    for m in 0..=3 {
        let net = build_ssg(&seq, m, 1).unwrap();
        let r = resistance_matrix(&net).unwrap();
        let n = r.nodes.len();
        for i in 0..n {
            assert_eq!(r.get(i, i), 0.0);
            for j in 0..n {
                assert!(close(r.get(i, j), r.get(j, i), 1e-13));
                if i != j {
                    assert!(r.get(i, j) > 0.0);
                }
                for k in 0..n {
                    assert!(r.get(i, k) <= r.get(i, j) + r.get(j, k) + 1e-12);
                }
            }
        }
        let direct = effective_resistance(&net, &net.nodes()[0], &net.nodes()[n - 1]).unwrap();
        assert!(close(direct, r.get(0, n - 1), 1e-12));
    }
}

#[test]
fn delta_wye_examples() {
    let [a, b, c] = delta_wye(1.0, 1.0, 1.0).unwrap();
    for x in [a, b, c] {
        assert!(close(x, 1.0 / 3.0, 1e-15));
    }
    let arms = delta_wye(1.0, 2.0, 3.0).unwrap();
    assert!(close(arms[0], 0.5, 1e-15));
    assert!(close(arms[1], 1.0 / 3.0, 1e-15));
    assert!(close(arms[2], 1.0, 1e-15));
    assert!(delta_wye(0.0, 1.0, 1.0).is_err());
}

#[test]
fn delta_wye_roundtrip() {
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    for _ in 0..100 {
        let r: [f64; 3] = [
            rng.gen_range(0.1..10.0),
            rng.gen_range(0.1..10.0),
            rng.gen_range(0.1..10.0),
        ];
        let star = star_network(delta_wye(r[0], r[1], r[2]).unwrap()).unwrap();
        let t = trace(&star, &[aux(1), aux(2), aux(3)]).unwrap();
        assert!(close(1.0 / t.conductance(0, 1), r[0], 1e-12 * r[0]));
        assert!(close(1.0 / t.conductance(1, 2), r[1], 1e-12 * r[1]));
        assert!(close(1.0 / t.conductance(2, 0), r[2], 1e-12 * r[2]));
    }
}

#[test]
fn harmonic_extension_minimizes_energy() {
    let seq = Seq::geometric(0.5, 0.5).unwrap();
    let net = build_ssg(&seq, 2, 2).unwrap();
    let b = vec![(corner(1), 1.0), (corner(2), -0.5), (corner(3), 0.25)];
    let h = harmonic_extend(&net, &b).unwrap();
    let t = trace(&net, &corners()).unwrap();
    assert!(close(h.energy(), t.energy(&[1.0, -0.5, 0.25]), 1e-12));
    let fixed: Vec<usize> = b.iter().map(|(n, _)| net.index_of(n).unwrap()).collect();
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    for _ in 0..50 {
        let mut u = h.values().to_vec();
        for (i, x) in u.iter_mut().enumerate() {
            if !fixed.contains(&i) {
                *x += rng.gen_range(-0.1..0.1);
            }
        }
        assert!(energy_of_vector(&net, &u) >= h.energy() - 1e-13);
    }
}

#[test]
fn maximum_principle_and_affine_segments() {
    let net = build_ssg(&Seq::harmonic(0.5).unwrap(), 2, 4).unwrap();
    let h = harmonic_extend(&net, &[(corner(1), 1.0), (corner(2), 0.0), (corner(3), 0.3)]).unwrap();
    for &v in h.values() {
        assert!((-1e-14..=1.0 + 1e-14).contains(&v));
    }
    // interior samples on each segment interpolate linearly between endpoints
    for node in h.nodes() {
        if let Node::Sample(s) = node {
            let a = h.value(&Node::Vertex(s.segment.start())).unwrap();
            let b = h.value(&Node::Vertex(s.segment.end())).unwrap();
            let t = s.index as f64 / s.subdiv as f64;
            assert!(close(h.value(node).unwrap(), a + t * (b - a), 1e-12));
        }
    }
}

#[test]
fn corner_trace_energy_matches_unit_triangle() {
    let seq = Seq::geometric(0.5, 0.5).unwrap();
    for m in 0..=3 {
        let t = trace(&build_ssg(&seq, m, 1).unwrap(), &corners()).unwrap();
        // boundary data (1,0,0) on the unit triangle has energy 2
        assert!(close(t.energy(&[1.0, 0.0, 0.0]), 2.0, 1e-10));
    }
}

#[test]
fn harmonic_part_is_orthogonal_to_zero_boundary_part() {
    let seq = Seq::geometric(0.5, 0.5).unwrap();
    let net = build_ssg(&seq, 2, 2).unwrap();
    let f = random_function::<f64>(9, 2, 2).unwrap();
    let u = node_vector(&net, &f).unwrap();
    let b: Vec<(Node, f64)> = corners()
        .into_iter()
        .map(|c| (c.clone(), f.node_value(&c).unwrap()))
        .collect();
    let h = harmonic_extend(&net, &b).unwrap();
    let rest: Vec<f64> = u.iter().zip(h.values()).map(|(a, b)| a - b).collect();
    let total = energy_of_vector(&net, &u);
    assert!(close(total, h.energy() + energy_of_vector(&net, &rest), 1e-11 * total));
}

#[test]
fn diameter_examples() {
    assert!(close(resistance_diameter(&path(&[1.0, 1.0])).unwrap(), 2.0, 1e-14));
    assert!(close(resistance_diameter(&unit_triangle()).unwrap(), 2.0 / 3.0, 1e-14));
    let seq = Seq::constant(0.25).unwrap();
    for m in 0..=3 {
        let d = resistance_diameter(&build_ssg(&seq, m, 1).unwrap()).unwrap();
        assert!(d <= 4.0, "m={m} d={d}");
        assert!(d >= 2.0 / 3.0 - 1e-12);
    }
}

#[test]
fn sg_level_one_harmonic_value() {
    let net = build_sg::<f64>(1).unwrap();
    let b: Vec<(Node, f64)> = sg_vertex_set(0)
        .unwrap()
        .into_iter()
        .map(|c| {
            let v = if c.representative().1 == 1 { 1.0 } else { 0.0 };
            (Node::Sg(crate::topology::sg_class(&c.address(), 1).unwrap()), v)
        })
        .collect();
    let h = harmonic_extend(&net, &b).unwrap();
    let mut interior: Vec<f64> = h
        .nodes()
        .iter()
        .filter(|n| !b.iter().any(|(x, _)| x == *n))
        .map(|n| h.value(n).unwrap())
        .collect();
    interior.sort_by(f64::total_cmp);
    assert_eq!(interior.len(), 3);
    assert!(close(interior[0], 0.2, 1e-14));
    assert!(close(interior[1], 0.4, 1e-14));
    assert!(close(interior[2], 0.4, 1e-14));
}

#[test]
fn compatibility_examples() {
    for seq in [
        Seq::constant(0.25).unwrap(),
        Seq::geometric(0.5, 0.5).unwrap(),
        Seq::harmonic(0.5).unwrap(),
    ] {
        for m in 0..=3 {
            let r = compatibility_residual(&seq, m).unwrap();
            assert!(r < STRUCTURAL_TOL, "m={m} r={r}");
        }
    }
    let broken = LevelScales::from_pairs(&[(0.5, 0.4)]).unwrap();
    assert!(compatibility_residual_scaled(&broken).unwrap() > 1e-3);
}

#[test]
fn sg_chain_is_compatible() {
    for m in 0..=3 {
        assert!(sg_compatibility_residual::<f64>(m).unwrap() < 1e-12);
    }
}

#[test]
fn pulled_back_harmonic_is_not_changed_by_extension() {
    let seq = Seq::geometric(0.5, 0.5).unwrap();
    let net = build_ssg(&seq, 2, 2).unwrap();
    let g = sg_harmonic([1.0, 0.0, 0.0], 2).unwrap();
    let u = pullback_sg(&g, 2, 2).unwrap();
    let e = energy(&net, &u).unwrap();
    let p = seq.derive(2).unwrap().p;
    assert!(close(e, 2.0 / p, 1e-10));
    let tent = tent_on_segment::<f64>(&Word::empty(), Bond::ALL[0], 2, 2).unwrap();
    assert!(close(energy(&net, &tent).unwrap(), 4.0 / seq.rho(1).unwrap(), 1e-10));
}

#[test]
fn disconnected_network() {
    let mut net = path(&[1.0]);
    net.add_edge(aux(5), aux(6), 1.0, EdgeTag::Plain).unwrap();
    assert!(matches!(
        effective_resistance(&net, &aux(0), &aux(6)),
        Err(Error::InfiniteResistance(_, _))
    ));
    assert!(close(effective_resistance(&net, &aux(5), &aux(6)).unwrap(), 1.0, 1e-15));
    assert!(matches!(trace(&net, &[aux(0)]), Err(Error::NotConnected)));
    assert!(matches!(resistance_diameter(&net), Err(Error::NotConnected)));
}

#[test]
fn bad_boundaries() {
    let net = unit_triangle();
    assert!(trace(&net, &[]).is_err());
    assert!(trace(&net, &[aux(0), aux(0)]).is_err());
    assert!(trace(&net, &[aux(9)]).is_err());
    assert!(effective_resistance(&net, &aux(0), &aux(0)).is_err());
}

#[test]
fn single_precision() {
    let seq = MatchingSequence::<f32>::constant(0.25).unwrap();
    let net = build_ssg(&seq, 2, 1).unwrap();
    let r = effective_resistance(&net, &corner(1), &corner(2)).unwrap();
    assert!((r - 2.0 / 3.0).abs() < 1e-5);
}

#[test]
fn large_network_uses_sparse_green_columns() {
    // longer than the dense limit
    let net = path(&vec![2.0; DENSE_LIMIT + 5]);
    let n = net.node_count();
    let r = resistance_diameter(&net).unwrap();
    assert!(close(r, (n - 1) as f64 / 2.0, 1e-8));
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn random_boundary_energy_matches_trace(b in prop::array::uniform3(-1.0f64..1.0), seed in 0u64..1000) {
        let seq = Seq::geometric(0.5, 0.5).unwrap();
        let net = build_ssg(&seq, 2, 2).unwrap();
        let t = trace(&net, &corners()).unwrap();
        let h = harmonic_extend(&net, &[(corner(1), b[0]), (corner(2), b[1]), (corner(3), b[2])]).unwrap();
        prop_assert!((h.energy() - t.energy(&b)).abs() < 1e-11);
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut u = h.values().to_vec();
        let k = rng.gen_range(0..u.len());
        if !corners().contains(&net.nodes()[k]) {
            u[k] += 0.05;
        }
        prop_assert!(energy_of_vector(&net, &u) >= h.energy() - 1e-13);
    }
}
