//! Principal eigenvector of a regular graph after one edge is added or
//! deleted, obtained by rotating the eigenbasis of the unperturbed graph.
//!
//! Write `U = (x Y)` for the eigenbasis of the d-regular `A` (`x` uniform,
//! `Y` the remaining eigenvectors by descending eigenvalue) and `E` for the
//! symmetric rank-2 edit. In that basis the perturbed principal vector is
//! `(1, p)` up to scale, where `p` solves
//!
//! ```text
//! M p = e21 - p (e21^T p),     M = (d + e11) I - L - E22
//! ```
//!
//! with `e11 = x^T E x`, `e21 = Y^T E x`, `E22 = Y^T E Y` and
//! `L = diag(lambda_2, ..., lambda_n)`. [`solve_p`] finds `p` by fixed-point
//! iteration, [`assemble_xtilde`] maps it back to the vertex basis and
//! [`certify_ratio`] compares the resulting ratio with `(1 + c) / (1 - c)`.
//!
//! `E` is never formed: everything it touches comes from the two rows of
//! `Y` indexed by the endpoints of the edge.

use std::fmt;
use std::str::FromStr;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::graph::{Edge, Graph};
use crate::linalg::{Cholesky, DenseMatrix, SymmetricEigen};
use crate::scalar::{dot, norm, Real};
use crate::spectral::{self, Eigenpair, Method};

/// Whether the edge is added (`+1`) or deleted (`-1`).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum EdgeSign {
    #[serde(rename = "+")]
    Plus,
    #[serde(rename = "-")]
    Minus,
}

impl EdgeSign {
    pub fn value<T: Real>(self) -> T {
        match self {
            EdgeSign::Plus => T::one(),
            EdgeSign::Minus => -T::one(),
        }
    }
}

impl fmt::Display for EdgeSign {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            EdgeSign::Plus => "+",
            EdgeSign::Minus => "-",
        })
    }
}

impl FromStr for EdgeSign {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim() {
            "+" | "+1" | "plus" | "add" => Ok(EdgeSign::Plus),
            "-" | "-1" | "minus" | "remove" | "delete" => Ok(EdgeSign::Minus),
            other => Err(Error::Parse(format!("edge sign must be '+' or '-', got '{other}'"))),
        }
    }
}

#[derive(Debug, Clone)]
pub struct PerturbationSystem<T> {
    pub n: usize,
    pub d: usize,
    /// Uniform unit vector.
    pub x: Vec<T>,
    /// `n x (n-1)`, columns ordered by descending eigenvalue.
    pub y: DenseMatrix<T>,
    /// `lambda_2, ..., lambda_n`
    pub l: Vec<T>,
    pub e11: T,
    pub e21: Vec<T>,
    pub e22: DenseMatrix<T>,
    /// Spectral norm of `E22`.
    pub e22_norm: T,
    pub m: DenseMatrix<T>,
    /// Smallest eigenvalue of `M`.
    pub theta: T,
    /// `||e21||`
    pub eta: T,
    /// Additive gap `d - lambda_2` of the unperturbed graph.
    pub delta: T,
    pub edit: Option<(Edge, EdgeSign)>,
    /// The graph after the edit (the base graph itself when there is none).
    pub perturbed: Graph,
}

fn regular_connected(g: &Graph) -> Result<usize> {
    let d = g.regular_degree().ok_or(Error::NotRegular)?;
    if !g.is_connected() {
        return Err(Error::Disconnected);
    }
    if g.n() < 2 {
        return Err(Error::InvalidSize("perturbation needs at least two vertices".into()));
    }
    Ok(d)
}

/// Rotated system for `A + sign * E`, with `E` the indicator of edge `e`.
pub fn build_system<T: Real>(g: &Graph, e: Edge, sign: EdgeSign) -> Result<PerturbationSystem<T>> {
    let d = regular_connected(g)?;
    let perturbed = match sign {
        EdgeSign::Plus => g.add_edge(e)?,
        EdgeSign::Minus => g.remove_edge(e)?,
    };
    assemble_system(g, d, Some((e, sign)), perturbed)
}

impl<T: Real> PerturbationSystem<T> {
    /// The system for `E = 0`.
    pub fn unperturbed(g: &Graph) -> Result<Self> {
        let d = regular_connected(g)?;
        assemble_system(g, d, None, g.clone())
    }
}

fn assemble_system<T: Real>(
    g: &Graph,
    d: usize,
    edit: Option<(Edge, EdgeSign)>,
    perturbed: Graph,
) -> Result<PerturbationSystem<T>> {
    let n = g.n();
    let k = n - 1;
    let eig = spectral::dense_spectrum::<T>(g)?;
    let x = vec![T::of_usize(n).sqrt().recip(); n];
    let y = DenseMatrix::from_fn(n, k, |i, j| eig.vectors[(i, j + 1)]);
    let l: Vec<T> = eig.values[1..].to_vec();
    let d_t = T::of_usize(d);
    let delta = d_t - l[0];

    let (e11, e21, e22, e22_norm) = match edit {
        None => (T::zero(), vec![T::zero(); k], DenseMatrix::zeros(k, k), T::zero()),
        Some((edge, sign)) => {
            let s: T = sign.value();
            let ya = y.row(edge.u());
            let yb = y.row(edge.v());
            let inv_sqrt_n = x[0];
            let e11 = s * T::of(2.0) / T::of_usize(n);
            let e21: Vec<T> = ya.iter().zip(yb).map(|(&a, &b)| s * inv_sqrt_n * (a + b)).collect();
            let e22 = DenseMatrix::from_fn(k, k, |i, j| s * (ya[i] * yb[j] + yb[i] * ya[j]));
            // eigenvalues of a b^T + b a^T are a.b +- |a||b|
            let e22_norm = dot(ya, yb).abs() + norm(ya) * norm(yb);
            (e11, e21, e22, e22_norm)
        }
    };

    let m = DenseMatrix::from_fn(k, k, |i, j| {
        let diag = if i == j { d_t + e11 - l[i] } else { T::zero() };
        diag - e22[(i, j)]
    });
    let theta = if k == 0 {
        T::infinity()
    } else {
        *SymmetricEigen::new(&m)?.values.last().unwrap()
    };
    let slack = T::of(1e-9) * d_t.max(T::one());
    if theta < delta - T::of(2.0) - slack {
        return Err(Error::Numerical(format!("min eigenvalue of M is {theta}, below delta - 2 = {}", delta - T::of(2.0))));
    }
    let eta = norm(&e21);
    Ok(PerturbationSystem { n, d, x, y, l, e11, e21, e22, e22_norm, m, theta, eta, delta, edit, perturbed })
}

impl<T: Real> PerturbationSystem<T> {
    /// Whether `delta > (2 / c) sqrt(n) + 2`.
    pub fn gap_condition(&self, c: T) -> bool {
        self.delta > T::of(2.0) / c * T::of_usize(self.n).sqrt() + T::of(2.0)
    }

    /// Smallest `c` allowed by the gap condition, `2 sqrt(n) / (delta - 2)`;
    /// infinite when `delta <= 2`.
    pub fn min_admissible_c(&self) -> T {
        let excess = self.delta - T::of(2.0);
        if excess > T::zero() {
            T::of(2.0) * T::of_usize(self.n).sqrt() / excess
        } else {
            T::infinity()
        }
    }

    /// `2 eta / (theta + sqrt(theta^2 - 4 eta^2))`
    pub fn p_bound(&self) -> T {
        let disc = self.theta * self.theta - T::of(4.0) * self.eta * self.eta;
        T::of(2.0) * self.eta / (self.theta + disc.max(T::zero()).sqrt())
    }

    /// `4 eta^2 / theta^2`
    pub fn rho(&self) -> T {
        T::of(4.0) * self.eta * self.eta / (self.theta * self.theta)
    }

    fn gap_error(&self, c: T) -> Error {
        Error::GapTooSmall {
            delta: self.delta.to_f64_lossy(),
            n: self.n,
            c: c.to_f64_lossy(),
            min_c: self.min_admissible_c().to_f64_lossy(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CorrectionSolution<T> {
    pub p: Vec<T>,
    pub iterations: usize,
    pub rho: T,
    /// `||p_i||` for `i = 1..=iterations`.
    pub norms: Vec<T>,
}

pub const P_TOLERANCE: f64 = 1e-13;
pub const P_MAX_ITERATIONS: usize = 100_000;

/// Fixed-point iteration `p_i = M^-1 (e21 - p_{i-1} (e21^T p_{i-1}))` from
/// `p_0 = 0`, stopping once `||p_i - p_{i-1}|| <= 1e-13`.
pub fn solve_p<T: Real>(sys: &PerturbationSystem<T>, c: T) -> Result<CorrectionSolution<T>> {
    if !(c > T::zero() && c < T::one()) {
        return Err(Error::InvalidParameters(format!("c must lie in (0, 1), got {c}")));
    }
    if !sys.gap_condition(c) {
        return Err(sys.gap_error(c));
    }
    let chol = Cholesky::new(&sys.m)?;
    let tol = T::of(P_TOLERANCE);
    let mut p = vec![T::zero(); sys.e21.len()];
    let mut norms = Vec::new();
    for it in 1..=P_MAX_ITERATIONS {
        let s = dot(&sys.e21, &p);
        let rhs: Vec<T> = sys.e21.iter().zip(&p).map(|(&e, &pi)| e - pi * s).collect();
        let next = chol.solve(&rhs);
        let step = next.iter().zip(&p).map(|(&a, &b)| (a - b) * (a - b)).sum::<T>().sqrt();
        p = next;
        norms.push(norm(&p));
        if step <= tol {
            return Ok(CorrectionSolution { p, iterations: it, rho: sys.rho(), norms });
        }
    }
    Err(Error::NoConvergence { iterations: P_MAX_ITERATIONS })
}

/// `||M p - e21 + p (e21^T p)||`
pub fn correction_residual<T: Real>(sys: &PerturbationSystem<T>, p: &[T]) -> T {
    let mp = sys.m.matvec(p);
    let s = dot(&sys.e21, p);
    let r: Vec<T> = mp.iter().zip(&sys.e21).zip(p).map(|((&a, &e), &pi)| a - e + pi * s).collect();
    norm(&r)
}

/// `x~ = (x + Y p) / sqrt(1 + ||p||^2)` as an eigenpair of the perturbed
/// graph, with the Rayleigh quotient as eigenvalue. Fails when a coordinate
/// is not strictly positive or when the Rayleigh quotient is not the top of
/// the perturbed spectrum.
pub fn assemble_xtilde<T: Real>(sys: &PerturbationSystem<T>, p: &[T]) -> Result<Eigenpair<T>> {
    let yp = sys.y.matvec(p);
    let scale = (T::one() + dot(p, p)).sqrt();
    let vector: Vec<T> = sys.x.iter().zip(&yp).map(|(&a, &b)| (a + b) / scale).collect();
    if let Some((vertex, &v)) = vector.iter().enumerate().find(|(_, &v)| !(v > T::zero())) {
        return Err(Error::NonPositiveCoordinate { vertex, value: v.to_f64_lossy() });
    }
    let g = &sys.perturbed;
    let value = spectral::rayleigh_quotient(g, &vector);
    let residual = spectral::eigen_residual(g, value, &vector);
    let top = spectral::dense_spectrum::<T>(g)?.values[0];
    if (value - top).abs() > T::of(1e-8) * top.abs().max(T::one()) {
        return Err(Error::Numerical(format!("Rayleigh quotient {value} is not the top eigenvalue {top}")));
    }
    Ok(Eigenpair { value, vector, residual })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PerturbationReport<T> {
    pub n: usize,
    pub d: usize,
    pub edge: Edge,
    pub sign: EdgeSign,
    pub c: T,
    pub gap_condition_holds: bool,
    pub delta: T,
    pub min_admissible_c: T,
    pub theta: T,
    pub eta: T,
    pub e11: T,
    pub e22_norm: T,
    pub p_norm: T,
    pub p_bound: T,
    pub rho: T,
    pub iterations: usize,
    pub correction_residual: T,
    pub lambda_tilde: T,
    pub xtilde_residual: T,
    pub gamma_observed: T,
    /// Ratio of the perturbed graph from the spectral module.
    pub gamma_direct: T,
    /// `(1 + c) / (1 - c)`
    pub gamma_certificate: T,
    /// `gamma_observed < gamma_certificate`
    pub certified: bool,
}

/// Tolerance for the agreement between the rotated-basis ratio and a
/// direct solve on the perturbed graph.
pub const AGREEMENT_TOLERANCE: f64 = 1e-7;

pub fn certify_ratio<T: Real>(g: &Graph, e: Edge, sign: EdgeSign, c: T) -> Result<PerturbationReport<T>> {
    let sys = build_system::<T>(g, e, sign)?;
    let sol = solve_p(&sys, c)?;
    let pair = assemble_xtilde(&sys, &sol.p)?;
    let ratio = spectral::RatioReport::from_eigenpair(&pair);
    let direct = spectral::ratio_with::<T>(&sys.perturbed, Method::Dense)?;
    let rel = (ratio.gamma - direct.gamma).abs() / direct.gamma;
    if rel > T::of(AGREEMENT_TOLERANCE) {
        return Err(Error::Numerical(format!(
            "ratio from the rotated basis {} disagrees with the direct ratio {}",
            ratio.gamma, direct.gamma
        )));
    }
    let certificate = (T::one() + c) / (T::one() - c);
    Ok(PerturbationReport {
        n: sys.n,
        d: sys.d,
        edge: e,
        sign,
        c,
        gap_condition_holds: true,
        delta: sys.delta,
        min_admissible_c: sys.min_admissible_c(),
        theta: sys.theta,
        eta: sys.eta,
        e11: sys.e11,
        e22_norm: sys.e22_norm,
        p_norm: norm(&sol.p),
        p_bound: sys.p_bound(),
        rho: sol.rho,
        iterations: sol.iterations,
        correction_residual: correction_residual(&sys, &sol.p),
        lambda_tilde: pair.value,
        xtilde_residual: pair.residual,
        gamma_observed: ratio.gamma,
        gamma_direct: direct.gamma,
        gamma_certificate: certificate,
        certified: ratio.gamma < certificate,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::families::{complete, complete_bipartite, petersen};

    fn edge(a: usize, b: usize) -> Edge {
        Edge::new(a, b).unwrap()
    }

    /// The rotated complement `(Y - x p^T)(I + p p^T)^(-1/2)`; together with
    /// `x~` it forms an orthogonal matrix.
    fn rotated_complement<T: Real>(sys: &PerturbationSystem<T>, p: &[T]) -> DenseMatrix<T> {
        let n = sys.n;
        let k = p.len();
        let pp = dot(p, p);
        // (I + p p^T)^(-1/2) = I + (1/sqrt(1 + |p|^2) - 1) p p^T / |p|^2
        let coef = if pp > T::zero() { ((T::one() + pp).sqrt().recip() - T::one()) / pp } else { T::zero() };
        let shifted = DenseMatrix::from_fn(n, k, |i, j| sys.y[(i, j)] - sys.x[i] * p[j]);
        let root = DenseMatrix::from_fn(k, k, |i, j| {
            let id = if i == j { T::one() } else { T::zero() };
            id + coef * p[i] * p[j]
        });
        shifted.matmul(&root)
    }

    fn explicit_e(n: usize, e: Edge, sign: EdgeSign) -> DenseMatrix<f64> {
        let mut m = DenseMatrix::zeros(n, n);
        m[(e.u(), e.v())] = sign.value();
        m[(e.v(), e.u())] = sign.value();
        m
    }

    #[test]
    fn blocks_match_explicit_products() {
        let g = complete(12).unwrap();
        let e = edge(3, 7);
        let sys = build_system::<f64>(&g, e, EdgeSign::Minus).unwrap();
        let big_e = explicit_e(12, e, EdgeSign::Minus);
        let ex = big_e.matvec(&sys.x);
        assert!((dot(&sys.x, &ex) - sys.e11).abs() < 1e-15);
        assert!((sys.e11 + 2.0 / 12.0).abs() == 0.0);
        let yt = sys.y.transpose();
        let e21 = yt.matvec(&ex);
        for (a, b) in e21.iter().zip(&sys.e21) {
            assert!((a - b).abs() < 1e-14);
        }
        let e22 = yt.matmul(&big_e).matmul(&sys.y);
        for i in 0..11 {
            for j in 0..11 {
                assert!((e22[(i, j)] - sys.e22[(i, j)]).abs() < 1e-14);
            }
        }
        let spec = SymmetricEigen::new(&e22).unwrap();
        let nrm = spec.values[0].abs().max(spec.values[10].abs());
        assert!((nrm - sys.e22_norm).abs() < 1e-12);
        assert!(sys.m.is_symmetric(0.0));
    }

    #[test]
    fn frame_is_orthogonal() {
        let sys = build_system::<f64>(&complete(20).unwrap(), edge(0, 1), EdgeSign::Minus).unwrap();
        let mut u = DenseMatrix::zeros(20, 20);
        for i in 0..20 {
            u[(i, 0)] = sys.x[i];
            for j in 0..19 {
                u[(i, j + 1)] = sys.y[(i, j)];
            }
        }
        assert!(u.orthogonality_defect() < 1e-9);
    }

    #[test]
    fn k25_theta_above_gap_minus_two() {
        let g = complete(25).unwrap();
        for e in [edge(0, 1), edge(4, 19)] {
            let sys = build_system::<f64>(&g, e, EdgeSign::Minus).unwrap();
            assert!((sys.delta - 25.0).abs() < 1e-10);
            assert!(sys.theta >= 23.0 - 1e-9);
        }
    }

    #[test]
    fn zero_perturbation() {
        let g = complete(25).unwrap();
        let sys = PerturbationSystem::<f64>::unperturbed(&g).unwrap();
        assert!(sys.e21.iter().all(|&v| v == 0.0));
        assert!((sys.theta - 25.0).abs() < 1e-10);
        let sol = solve_p(&sys, 0.5).unwrap();
        assert_eq!(sol.iterations, 1);
        assert!(sol.p.iter().all(|&v| v == 0.0));
        let pair = assemble_xtilde(&sys, &sol.p).unwrap();
        assert_eq!(pair.vector, sys.x);
        assert!((pair.value - (24.0 + sys.e11)).abs() < 1e-12);
    }

    #[test]
    fn k25_minus_e_bound_chain() {
        let sys = build_system::<f64>(&complete(25).unwrap(), edge(2, 9), EdgeSign::Minus).unwrap();
        let sol = solve_p(&sys, 0.5).unwrap();
        let p = norm(&sol.p);
        assert!(p < sys.p_bound());
        assert!(sys.p_bound() < 2.0 * sys.eta / sys.theta);
        assert!(2.0 * sys.eta / sys.theta < 0.1);
        assert!(sol.rho < 0.25 / 100.0);
        assert!(correction_residual(&sys, &sol.p) <= 1e-10);
    }

    #[test]
    fn majorant_dominates_iterates() {
        let sys = build_system::<f64>(&complete(30).unwrap(), edge(0, 5), EdgeSign::Minus).unwrap();
        let sol = solve_p(&sys, 0.5).unwrap();
        let phi = |xi: f64| sys.eta * (1.0 + xi * xi) / sys.theta;
        let mut xi = 0.0;
        for &pn in &sol.norms {
            xi = phi(xi);
            assert!(pn <= xi * (1.0 + 1e-12));
        }
        // smaller root of xi = eta (1 + xi^2) / theta
        for _ in 0..200 {
            xi = phi(xi);
        }
        assert!((xi - sys.p_bound()).abs() < 1e-14);
    }

    #[test]
    fn coordinates_inside_certified_window() {
        let g = complete(64).unwrap();
        let c = 0.5;
        let sys = build_system::<f64>(&g, edge(10, 40), EdgeSign::Minus).unwrap();
        let sol = solve_p(&sys, c).unwrap();
        let pair = assemble_xtilde(&sys, &sol.p).unwrap();
        let s = 8.0;
        for &v in &pair.vector {
            assert!(v > (1.0 - c) / s && v < (1.0 + c) / s);
        }
    }

    #[test]
    fn bipartite_plus_intra_edge_matches_dense() {
        let g = complete_bipartite(50, 50).unwrap();
        let sys = build_system::<f64>(&g, edge(0, 1), EdgeSign::Plus).unwrap();
        let sol = solve_p(&sys, 0.5).unwrap();
        let pair = assemble_xtilde(&sys, &sol.p).unwrap();
        let oracle = spectral::dense_spectrum::<f64>(&sys.perturbed).unwrap().vector(0);
        for (a, b) in pair.vector.iter().zip(&oracle) {
            assert!((a - b).abs() < 1e-7);
        }
        assert!(pair.residual <= 1e-8);
    }

    #[test]
    fn rotated_frame_orthogonal() {
        let g = complete(40).unwrap();
        let sys = build_system::<f64>(&g, edge(1, 2), EdgeSign::Minus).unwrap();
        let sol = solve_p(&sys, 0.5).unwrap();
        let xt = assemble_xtilde(&sys, &sol.p).unwrap().vector;
        let yt = rotated_complement(&sys, &sol.p);
        let u = DenseMatrix::from_fn(40, 40, |i, j| if j == 0 { xt[i] } else { yt[(i, j - 1)] });
        assert!(u.orthogonality_defect() < 1e-8);
    }

    #[test]
    fn certificates() {
        let r = certify_ratio::<f64>(&complete(100).unwrap(), edge(0, 1), EdgeSign::Minus, 0.25).unwrap();
        assert!(r.certified && r.gamma_observed < 5.0 / 3.0);
        assert!(r.p_norm < 0.025);
        let r = certify_ratio::<f64>(&complete_bipartite(50, 50).unwrap(), edge(0, 1), EdgeSign::Plus, 0.5).unwrap();
        assert!(r.certified && r.gamma_observed < 3.0);
        assert!(((r.gamma_observed - r.gamma_direct) / r.gamma_direct).abs() < 1e-7);
    }

    #[test]
    fn gap_too_small_for_petersen() {
        let g = petersen();
        let e = g.edges().next().unwrap();
        for c in [0.1, 0.5, 0.99] {
            let err = certify_ratio::<f64>(&g, e, EdgeSign::Minus, c).unwrap_err();
            match err {
                Error::GapTooSmall { n, min_c, .. } => {
                    assert_eq!(n, 10);
                    assert!(min_c.is_infinite() || min_c >= 1.0);
                }
                other => panic!("unexpected {other:?}"),
            }
        }
    }

    #[test]
    fn preconditions() {
        let k = complete(6).unwrap();
        assert!(matches!(build_system::<f64>(&k, edge(0, 1), EdgeSign::Plus), Err(Error::EdgeExists(_))));
        let kb = complete_bipartite(3, 3).unwrap();
        assert!(matches!(build_system::<f64>(&kb, edge(0, 1), EdgeSign::Minus), Err(Error::EdgeMissing(_))));
        let path = crate::families::path(4).unwrap();
        assert!(matches!(build_system::<f64>(&path, edge(0, 2), EdgeSign::Plus), Err(Error::NotRegular)));
        let two_triangles = Graph::from_edges(6, [(0, 1), (1, 2), (0, 2), (3, 4), (4, 5), (3, 5)]).unwrap();
        assert!(matches!(build_system::<f64>(&two_triangles, edge(0, 3), EdgeSign::Plus), Err(Error::Disconnected)));
        let cyc = crate::families::cycle(5).unwrap();
        assert!(build_system::<f64>(&cyc, edge(0, 1), EdgeSign::Minus).is_ok());
        assert!(matches!(solve_p(&PerturbationSystem::<f64>::unperturbed(&k).unwrap(), 1.5), Err(Error::InvalidParameters(_))));
        assert_eq!("-".parse::<EdgeSign>().unwrap(), EdgeSign::Minus);
        assert!("x".parse::<EdgeSign>().is_err());
    }
}
