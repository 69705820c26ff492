//! Oracles and instance generators shared by the integration tests. Nothing
//! here calls the library's eigensolver.
#![allow(dead_code)]

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use ratiolab::families::{self, FamilySpec};
use ratiolab::{Edge, Graph};

pub fn adjacency(g: &Graph) -> Vec<Vec<f64>> {
    let n = g.n();
    let mut a = vec![vec![0.0; n]; n];
    for e in g.edges() {
        let (u, v) = e.endpoints();
        a[u][v] = 1.0;
        a[v][u] = 1.0;
    }
    a
}

/// Cyclic Jacobi rotations. Returns eigenvalues in descending order and,
/// when asked, the matching eigenvectors as rows.
pub fn jacobi(mut a: Vec<Vec<f64>>, want_vectors: bool) -> (Vec<f64>, Vec<Vec<f64>>) {
    let n = a.len();
    let mut v: Vec<Vec<f64>> = if want_vectors {
        (0..n).map(|i| (0..n).map(|j| if i == j { 1.0 } else { 0.0 }).collect()).collect()
    } else {
        Vec::new()
    };
    let frob: f64 = a.iter().flatten().map(|x| x * x).sum::<f64>().sqrt();
    for _sweep in 0..100 {
        let off: f64 = (0..n).flat_map(|i| (0..n).filter(move |&j| j != i).map(move |j| (i, j))).map(|(i, j)| a[i][j] * a[i][j]).sum::<f64>().sqrt();
        if off <= 1e-15 * frob.max(1.0) {
            break;
        }
        for p in 0..n {
            for q in p + 1..n {
                let apq = a[p][q];
                if apq.abs() < 1e-300 {
                    continue;
                }
                let theta = (a[q][q] - a[p][p]) / (2.0 * apq);
                let sgn = if theta >= 0.0 { 1.0 } else { -1.0 };
                let t = sgn / (theta.abs() + (theta * theta + 1.0).sqrt());
                let c = 1.0 / (t * t + 1.0).sqrt();
                let s = t * c;
                for k in 0..n {
                    let (akp, akq) = (a[k][p], a[k][q]);
                    a[k][p] = c * akp - s * akq;
                    a[k][q] = s * akp + c * akq;
                }
                for k in 0..n {
                    let (apk, aqk) = (a[p][k], a[q][k]);
                    a[p][k] = c * apk - s * aqk;
                    a[q][k] = s * apk + c * aqk;
                }
                if want_vectors {
                    let (vp, vq) = (v[p].clone(), v[q].clone());
                    for k in 0..n {
                        v[p][k] = c * vp[k] - s * vq[k];
                        v[q][k] = s * vp[k] + c * vq[k];
                    }
                }
            }
        }
    }
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| a[j][j].total_cmp(&a[i][i]));
    let values = order.iter().map(|&i| a[i][i]).collect();
    let vectors = if want_vectors { order.iter().map(|&i| v[i].clone()).collect() } else { Vec::new() };
    (values, vectors)
}

/// Principal ratio from the Jacobi oracle.
pub fn oracle_gamma(g: &Graph) -> f64 {
    let (_, vecs) = jacobi(adjacency(g), true);
    let q = &vecs[0];
    let max = q.iter().fold(f64::MIN, |m, &x| m.max(x.abs()));
    let min = q.iter().fold(f64::MAX, |m, &x| m.min(x.abs()));
    max / min
}

/// `U_k(t)` by the three-term recurrence.
pub fn cheb_u(k: usize, t: f64) -> f64 {
    let (mut a, mut b) = (1.0, 2.0 * t);
    if k == 0 {
        return a;
    }
    for _ in 1..k {
        (a, b) = (b, 2.0 * t * b - a);
    }
    b
}

/// `T_k(t) = cosh(k acosh t)` for `t >= 1`.
pub fn cheb_t(k: usize, t: f64) -> f64 {
    (k as f64 * t.acosh()).cosh()
}

pub fn complement(g: &Graph) -> Graph {
    Graph::from_edges(g.n(), g.non_edges().map(|e| e.endpoints())).unwrap()
}

fn connected_gnp(rng: &mut ChaCha8Rng) -> Graph {
    loop {
        let n = rng.gen_range(6..40);
        let p = rng.gen_range(0.1..0.6);
        let edges: Vec<(usize, usize)> =
            (0..n).flat_map(|i| (i + 1..n).map(move |j| (i, j))).filter(|_| rng.gen_bool(p)).collect();
        let g = Graph::from_edges(n, edges).unwrap();
        if g.is_connected() {
            return g;
        }
    }
}

fn build(spec: &str) -> Graph {
    spec.parse::<FamilySpec>().unwrap().build().unwrap()
}

/// Seeded connected d-regular graph, cycling through several families.
pub fn regular_instance(i: u64) -> (String, Graph) {
    let mut rng = ChaCha8Rng::seed_from_u64(1000 + i);
    loop {
        let spec = match i % 7 {
            0 | 1 => {
                let d = rng.gen_range(3..7);
                let n = 2 * rng.gen_range(6..40);
                format!("rr:n={n},d={d},seed={}", rng.gen::<u32>())
            }
            2 => format!("cycle:{}", rng.gen_range(3..60)),
            3 => format!("complete:{}", rng.gen_range(3..30)),
            4 => {
                let a = rng.gen_range(2..20);
                format!("bipartite:{a},{a}")
            }
            5 => format!("cart:cycle:{},cycle:{}", rng.gen_range(3..10), rng.gen_range(3..10)),
            _ => format!("lex:cycle:{},empty:{}", rng.gen_range(3..12), rng.gen_range(1..6)),
        };
        let g = build(&spec);
        if g.is_connected() {
            assert!(g.regular_degree().is_some(), "{spec}");
            return (spec, g);
        }
    }
}

/// Seeded connected graph that is not regular.
pub fn nonregular_instance(i: u64) -> (String, Graph) {
    let mut rng = ChaCha8Rng::seed_from_u64(2000 + i);
    loop {
        let (spec, g) = match i % 6 {
            0 => {
                let spec = format!("kite:r={},s={}", rng.gen_range(1..15), rng.gen_range(3..10));
                (spec.clone(), build(&spec))
            }
            1 => {
                let spec = format!("path:{}", rng.gen_range(3..60));
                (spec.clone(), build(&spec))
            }
            2 => {
                let spec = format!("bipartite:{},{}", rng.gen_range(1..12), rng.gen_range(13..25));
                (spec.clone(), build(&spec))
            }
            3 => {
                let spec = format!("ring+e:r={},d={}", rng.gen_range(1..10), rng.gen_range(3..6));
                (spec.clone(), build(&spec))
            }
            4 => {
                let spec = format!("cart:path:{},cycle:{}", rng.gen_range(2..8), rng.gen_range(3..8));
                (spec.clone(), build(&spec))
            }
            _ => ("gnp".to_string(), connected_gnp(&mut rng)),
        };
        if g.regular_degree().is_none() {
            return (spec, g);
        }
    }
}

/// Mixed corpus: even indices regular, odd ones not.
pub fn connected_instance(i: u64) -> (String, Graph) {
    if i % 2 == 0 {
        regular_instance(i / 2)
    } else {
        nonregular_instance(i / 2)
    }
}

/// Random 3-regular graph with an edge on a cycle of length at most 5,
/// trying successive seeds from `seed`.
pub fn short_cycle_instance(n: usize, seed: u64) -> (u64, Graph, Edge) {
    for s in seed.. {
        let g = families::random_regular(n, 3, s).unwrap();
        if !g.is_connected() {
            continue;
        }
        let found = g.edges().find(|&e| {
            let h = g.remove_edge(e).unwrap();
            matches!(h.distance(e.u(), e.v()).unwrap(), Some(k) if k <= 4)
        });
        if let Some(e) = found {
            return (s, g, e);
        }
    }
    unreachable!()
}
