//! Adjacency spectra, principal eigenpairs and principal ratios.
//!
//! The dense path (Householder + QL on the full adjacency matrix) is the
//! default oracle up to [`DENSE_LIMIT`] vertices. Power iteration on the
//! sparse neighbor lists is available for larger graphs or as a cross-check.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::graph::Graph;
use crate::linalg::{DenseMatrix, SymmetricEigen};
use crate::scalar::{dot, norm, Real};

pub const DENSE_LIMIT: usize = 4096;

pub fn adjacency_matrix<T: Real>(g: &Graph) -> DenseMatrix<T> {
    let mut a = DenseMatrix::zeros(g.n(), g.n());
    for e in g.edges() {
        a[(e.u(), e.v())] = T::one();
        a[(e.v(), e.u())] = T::one();
    }
    a
}

/// `diag(deg) - A`
pub fn laplacian_matrix<T: Real>(g: &Graph) -> DenseMatrix<T> {
    let mut l = adjacency_matrix::<T>(g);
    for i in 0..g.n() {
        for j in 0..g.n() {
            l[(i, j)] = -l[(i, j)];
        }
        l[(i, i)] = T::of_usize(g.degree(i));
    }
    l
}

/// `out = A x` using the neighbor lists.
pub fn adjacency_apply<T: Real>(g: &Graph, x: &[T], out: &mut [T]) {
    for (v, o) in out.iter_mut().enumerate() {
        *o = g.neighbors(v).iter().map(|&w| x[w]).sum();
    }
}

/// `||A x - lambda x||`
pub fn eigen_residual<T: Real>(g: &Graph, lambda: T, x: &[T]) -> T {
    let mut ax = vec![T::zero(); x.len()];
    adjacency_apply(g, x, &mut ax);
    ax.iter().zip(x).map(|(&a, &b)| (a - lambda * b) * (a - lambda * b)).sum::<T>().sqrt()
}

/// Full adjacency spectrum, eigenvalues descending. The first column is
/// oriented to have positive coordinate sum; every other column so that its
/// first clearly nonzero coordinate is positive.
pub fn dense_spectrum<T: Real>(g: &Graph) -> Result<SymmetricEigen<T>> {
    dense_spectrum_limited(g, DENSE_LIMIT)
}

pub fn dense_spectrum_limited<T: Real>(g: &Graph, limit: usize) -> Result<SymmetricEigen<T>> {
    if g.n() > limit {
        return Err(Error::SizeLimit { n: g.n(), limit });
    }
    let mut eig = SymmetricEigen::new(&adjacency_matrix::<T>(g))?;
    orient_columns(&mut eig.vectors);
    Ok(eig)
}

fn orient_columns<T: Real>(v: &mut DenseMatrix<T>) {
    let n = v.rows();
    for j in 0..v.cols() {
        let col = v.column(j);
        let flip = if j == 0 {
            col.iter().copied().sum::<T>() < T::zero()
        } else {
            let big = col.iter().fold(T::zero(), |m, &x| m.max(x.abs()));
            let cut = big * T::of(1e-6);
            col.iter().find(|x| x.abs() > cut).is_some_and(|&x| x < T::zero())
        };
        if flip {
            for i in 0..n {
                v[(i, j)] = -v[(i, j)];
            }
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Default)]
pub enum Method {
    /// Dense when the graph fits under [`DENSE_LIMIT`], power iteration otherwise.
    #[default]
    Auto,
    Dense,
    Power,
}

/// A unit eigenvector with positive coordinate sum and its eigenvalue.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Eigenpair<T> {
    pub value: T,
    pub vector: Vec<T>,
    /// `||A v - value v||`
    pub residual: T,
}

#[derive(Debug, Clone, Copy)]
pub struct PowerOptions<T> {
    /// Stop once `|rho_k - rho_{k-1}| <= rq_tol * max(1, rho)` ...
    pub rq_tol: T,
    /// ... and `||A x - rho x|| <= residual_tol * max(1, rho)`.
    pub residual_tol: T,
    pub max_matvecs: usize,
}

impl<T: Real> Default for PowerOptions<T> {
    fn default() -> Self {
        let eps = T::epsilon();
        let (rq_tol, residual_tol) = if eps <= T::of(1e-15) {
            (T::of(1e-13), T::of(1e-10))
        } else {
            // the double-precision targets are below single-precision resolution
            (eps * T::of(16.0), eps.sqrt() * T::of(4.0))
        };
        PowerOptions { rq_tol, residual_tol, max_matvecs: 10_000_000 }
    }
}

/// Shifted power iteration on `A + (Delta/2) I` from the all-ones direction
/// plus a small deterministic perturbation. The shift keeps the
/// `-lambda_1` eigenvalue of bipartite graphs from stalling convergence.
pub fn power_iteration<T: Real>(g: &Graph, opts: &PowerOptions<T>) -> Result<Eigenpair<T>> {
    let n = g.n();
    if n == 0 {
        return Err(Error::InvalidSize("empty graph".into()));
    }
    let shift = T::of_usize(g.max_degree()) * T::of(0.5);
    let mut x: Vec<T> = (0..n).map(|i| T::one() + T::of(1e-6) * T::of(start_jitter(i))).collect();
    let nx = norm(&x);
    x.iter_mut().for_each(|v| *v /= nx);

    let mut ax = vec![T::zero(); n];
    let mut rho_prev = T::nan();
    for step in 1..=opts.max_matvecs {
        adjacency_apply(g, &x, &mut ax);
        let rho = dot(&x, &ax);
        let res = ax.iter().zip(&x).map(|(&a, &b)| (a - rho * b) * (a - rho * b)).sum::<T>().sqrt();
        let scale = rho.abs().max(T::one());
        if step > 1 && (rho - rho_prev).abs() <= opts.rq_tol * scale && res <= opts.residual_tol * scale {
            return Ok(Eigenpair { value: rho, vector: x, residual: res });
        }
        rho_prev = rho;
        for (xi, &ai) in x.iter_mut().zip(&ax) {
            *xi = ai + shift * *xi;
        }
        let nx = norm(&x);
        if nx == T::zero() {
            return Err(Error::Numerical("power iterate vanished".into()));
        }
        x.iter_mut().for_each(|v| *v /= nx);
    }
    Err(Error::NoConvergence { iterations: opts.max_matvecs })
}

fn start_jitter(i: usize) -> f64 {
    ((i as u64).wrapping_mul(2_654_435_761) % 1000) as f64 / 1000.0
}

/// Principal (Perron) eigenpair of a connected graph; every coordinate of
/// the returned vector is strictly positive.
pub fn principal_eigenpair<T: Real>(g: &Graph, method: Method) -> Result<Eigenpair<T>> {
    if g.n() == 0 {
        return Err(Error::InvalidSize("empty graph".into()));
    }
    if !g.is_connected() {
        return Err(Error::Disconnected);
    }
    let pair = match resolve(method, g) {
        Method::Power => power_iteration(g, &PowerOptions::default())?,
        _ => {
            let eig = dense_spectrum::<T>(g)?;
            let mut vector = eig.vector(0);
            let mut value = eig.values[0];
            if let Some(polished) = perron_polish(g, &vector, POLISH_MAX_STEPS) {
                vector = polished;
                value = rayleigh_quotient(g, &vector);
            }
            let residual = eigen_residual(g, value, &vector);
            Eigenpair { value, vector, residual }
        }
    };
    if let Some((i, &q)) = pair.vector.iter().enumerate().find(|(_, &q)| !(q > T::zero())) {
        return Err(Error::Numerical(format!(
            "principal vector coordinate {i} is {q}; the graph's principal ratio exceeds the solver's resolution"
        )));
    }
    Ok(pair)
}

const POLISH_MAX_STEPS: usize = 20_000;

pub fn rayleigh_quotient<T: Real>(g: &Graph, x: &[T]) -> T {
    let mut ax = vec![T::zero(); x.len()];
    adjacency_apply(g, x, &mut ax);
    dot(x, &ax) / dot(x, x)
}

/// Componentwise refinement of an approximate Perron vector `q`.
///
/// Householder-based solvers only bound the eigenvector error in norm, so
/// coordinates many orders of magnitude below the largest one carry little
/// relative accuracy and may even come out with the wrong sign. Running
/// shifted power iteration on `D^-1 A D` with `D = diag(q)` works with an
/// iterate whose entries are all close to one and whose matrix entries
/// `q_j / q_i` are bounded by `lambda_1` on edges, so the fixed point `D z`
/// is accurate relative to each coordinate. Coordinates below
/// `eps * max(q)` are first raised to that floor; the iteration keeps every
/// entry positive, and a second pass from the repaired vector restores the
/// componentwise accuracy. Returns `None` when `q` has no positive entry.
pub fn perron_polish<T: Real>(g: &Graph, q: &[T], max_steps: usize) -> Option<Vec<T>> {
    let top = q.iter().fold(T::zero(), |m, &x| m.max(x));
    if !(top > T::zero()) || !top.is_finite() {
        return None;
    }
    let floor = top * T::epsilon();
    let repaired = q.iter().any(|&x| !(x >= floor));
    let mut base: Vec<T> = q.iter().map(|&x| if x >= floor { x } else { floor }).collect();
    for _ in 0..if repaired { 2 } else { 1 } {
        base = polish_round(g, &base, max_steps);
    }
    Some(base)
}

fn polish_round<T: Real>(g: &Graph, q: &[T], max_steps: usize) -> Vec<T> {
    let n = g.n();
    let shift = T::of_usize(g.max_degree()) * T::of(0.5);
    let weights: Vec<Vec<T>> =
        (0..n).map(|i| g.neighbors(i).iter().map(|&j| q[j] / q[i]).collect()).collect();
    let tol = T::epsilon() * T::of(8.0);
    let mut z = vec![T::one(); n];
    let mut next = vec![T::zero(); n];
    for _ in 0..max_steps {
        for i in 0..n {
            let acc: T = g.neighbors(i).iter().zip(&weights[i]).map(|(&j, &w)| w * z[j]).sum();
            next[i] = shift * z[i] + acc;
        }
        let top = next.iter().fold(T::zero(), |m, &x| m.max(x));
        let mut change = T::zero();
        for i in 0..n {
            let zi = next[i] / top;
            change = change.max((zi - z[i]).abs() / zi);
            z[i] = zi;
        }
        if change <= tol {
            break;
        }
    }
    let mut out: Vec<T> = q.iter().zip(&z).map(|(&a, &b)| a * b).collect();
    let nrm = norm(&out);
    out.iter_mut().for_each(|x| *x /= nrm);
    out
}

fn resolve(method: Method, g: &Graph) -> Method {
    match method {
        Method::Auto if g.n() <= DENSE_LIMIT => Method::Dense,
        Method::Auto => Method::Power,
        m => m,
    }
}

/// Second largest adjacency eigenvalue (may be negative).
pub fn second_eigenvalue<T: Real>(g: &Graph, method: Method) -> Result<T> {
    if g.n() < 2 {
        return Err(Error::InvalidSize("lambda_2 needs at least two vertices".into()));
    }
    if !g.is_connected() {
        return Err(Error::Disconnected);
    }
    match resolve(method, g) {
        Method::Power => {
            let q = principal_eigenpair::<T>(g, Method::Power)?;
            deflated_power(g, &q.vector, &PowerOptions::default())
        }
        _ => Ok(dense_spectrum::<T>(g)?.values[1]),
    }
}

/// Power iteration for the top of the spectrum restricted to `q`'s
/// orthogonal complement, shifted by `Delta` so every restricted eigenvalue
/// is non-negative.
fn deflated_power<T: Real>(g: &Graph, q: &[T], opts: &PowerOptions<T>) -> Result<T> {
    let n = g.n();
    let shift = T::of_usize(g.max_degree());
    let project = |x: &mut Vec<T>| {
        let c = dot(q, x);
        for (xi, &qi) in x.iter_mut().zip(q) {
            *xi -= c * qi;
        }
    };
    let mut x: Vec<T> = (0..n).map(|i| T::of(start_jitter(i * 7 + 3) - 0.5)).collect();
    project(&mut x);
    let nx = norm(&x);
    x.iter_mut().for_each(|v| *v /= nx);
    let mut ax = vec![T::zero(); n];
    let mut rho_prev = T::nan();
    for step in 1..=opts.max_matvecs {
        adjacency_apply(g, &x, &mut ax);
        project(&mut ax);
        let rho = dot(&x, &ax);
        let res = ax.iter().zip(&x).map(|(&a, &b)| (a - rho * b) * (a - rho * b)).sum::<T>().sqrt();
        let scale = rho.abs().max(T::one());
        if step > 1 && (rho - rho_prev).abs() <= opts.rq_tol * scale && res <= opts.residual_tol * scale {
            return Ok(rho);
        }
        rho_prev = rho;
        for (xi, &ai) in x.iter_mut().zip(&ax) {
            *xi = ai + shift * *xi;
        }
        project(&mut x);
        let nx = norm(&x);
        x.iter_mut().for_each(|v| *v /= nx);
    }
    Err(Error::NoConvergence { iterations: opts.max_matvecs })
}

/// Second smallest Laplacian eigenvalue (Fiedler value).
pub fn algebraic_connectivity<T: Real>(g: &Graph) -> Result<T> {
    if g.n() < 2 {
        return Err(Error::InvalidSize("algebraic connectivity needs at least two vertices".into()));
    }
    if g.n() > DENSE_LIMIT {
        return Err(Error::SizeLimit { n: g.n(), limit: DENSE_LIMIT });
    }
    let eig = SymmetricEigen::new(&laplacian_matrix::<T>(g))?;
    Ok(eig.values[g.n() - 2])
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SpectrumSummary<T> {
    pub n: usize,
    pub lambda1: T,
    pub lambda2: T,
    /// `lambda1 - lambda2`
    pub additive_gap: T,
    /// `additive_gap / lambda1`
    pub multiplicative_gap: T,
    pub regular_degree: Option<usize>,
    /// Fiedler value; computed when the graph is regular, where it must
    /// equal the additive gap.
    pub algebraic_connectivity: Option<T>,
}

pub fn spectrum_summary<T: Real>(g: &Graph) -> Result<SpectrumSummary<T>> {
    spectrum_summary_with(g, Method::Auto)
}

pub fn spectrum_summary_with<T: Real>(g: &Graph, method: Method) -> Result<SpectrumSummary<T>> {
    if g.n() < 2 {
        return Err(Error::InvalidSize("spectrum summary needs at least two vertices".into()));
    }
    if !g.is_connected() {
        return Err(Error::Disconnected);
    }
    let dense = resolve(method, g) == Method::Dense;
    let (lambda1, lambda2) = if dense {
        let eig = dense_spectrum::<T>(g)?;
        (eig.values[0], eig.values[1])
    } else {
        (principal_eigenpair::<T>(g, Method::Power)?.value, second_eigenvalue::<T>(g, Method::Power)?)
    };
    let regular_degree = g.regular_degree();
    let additive_gap = lambda1 - lambda2;
    let mut algebraic = None;
    if let (Some(d), true) = (regular_degree, dense) {
        let a = algebraic_connectivity::<T>(g)?;
        let tol = T::of(1e-8).max(T::epsilon().sqrt()) * T::of_usize(d).max(T::one());
        if (a - additive_gap).abs() > tol {
            return Err(Error::Numerical(format!(
                "additive gap {additive_gap} differs from algebraic connectivity {a} on a regular graph"
            )));
        }
        algebraic = Some(a);
    }
    Ok(SpectrumSummary {
        n: g.n(),
        lambda1,
        lambda2,
        additive_gap,
        multiplicative_gap: additive_gap / lambda1,
        regular_degree,
        algebraic_connectivity: algebraic,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RatioReport<T> {
    /// `q_max / q_min`
    pub gamma: T,
    pub log_gamma: T,
    pub q_max: T,
    pub q_min: T,
    pub v_max: usize,
    pub v_min: usize,
    pub lambda1: T,
    pub residual: T,
}

impl<T: Real> RatioReport<T> {
    /// Extremal coordinates of a positive vector; ties go to the lowest id.
    pub fn from_eigenpair(pair: &Eigenpair<T>) -> Self {
        let q = &pair.vector;
        let (mut v_max, mut v_min) = (0, 0);
        for (i, &x) in q.iter().enumerate() {
            if x > q[v_max] {
                v_max = i;
            }
            if x < q[v_min] {
                v_min = i;
            }
        }
        let (q_max, q_min) = (q[v_max], q[v_min]);
        RatioReport {
            gamma: q_max / q_min,
            log_gamma: q_max.ln() - q_min.ln(),
            q_max,
            q_min,
            v_max,
            v_min,
            lambda1: pair.value,
            residual: pair.residual,
        }
    }
}

pub fn ratio<T: Real>(g: &Graph) -> Result<RatioReport<T>> {
    ratio_with(g, Method::Auto)
}

pub fn ratio_with<T: Real>(g: &Graph, method: Method) -> Result<RatioReport<T>> {
    Ok(RatioReport::from_eigenpair(&principal_eigenpair(g, method)?))
}

/// Additive gap of `C_r o (complement of K_s)`, whose spectrum is
/// `s * spec(C_r)` together with `(s-1) r` zeros. For `r >= 4` this is
/// `s (2 - 2 cos(2 pi / r))`; for the triangle with `s >= 2` the zero
/// eigenvalues sit above `s * lambda_2(C_3) = -s` and the gap is `2s`.
pub fn predicted_lex_gap<T: Real>(r: usize, s: usize) -> Result<T> {
    if r < 3 || s < 1 {
        return Err(Error::InvalidParameters(format!("lex gap needs r >= 3 and s >= 1, got r={r}, s={s}")));
    }
    let two = T::of(2.0);
    let s_t = T::of_usize(s);
    let angle = two * T::PI() / T::of_usize(r);
    let mut second = s_t * two * angle.cos();
    if s >= 2 {
        second = second.max(T::zero());
    }
    Ok(two * s_t - second)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::families::*;

    #[test]
    fn small_spectra() {
        let k1 = complete(1).unwrap();
        assert_eq!(dense_spectrum::<f64>(&k1).unwrap().values, vec![0.0]);
        let k4 = dense_spectrum::<f64>(&complete(4).unwrap()).unwrap();
        for (got, want) in k4.values.iter().zip([3.0, -1.0, -1.0, -1.0]) {
            assert!((got - want).abs() < 1e-12);
        }
        assert!(matches!(
            dense_spectrum_limited::<f64>(&cycle(10).unwrap(), 5),
            Err(Error::SizeLimit { n: 10, limit: 5 })
        ));
    }

    #[test]
    fn regular_principal_is_uniform() {
        for g in [cycle(6).unwrap(), petersen(), complete(7).unwrap(), complete_bipartite(4, 4).unwrap()] {
            let d = g.regular_degree().unwrap() as f64;
            let u = 1.0 / (g.n() as f64).sqrt();
            for method in [Method::Dense, Method::Power] {
                let p = principal_eigenpair::<f64>(&g, method).unwrap();
                assert!((p.value - d).abs() < 1e-10, "{method:?}");
                assert!(p.vector.iter().all(|&x| (x - u).abs() < 1e-9));
                assert!((norm(&p.vector) - 1.0).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn kite_pendant_is_smallest() {
        let g = kite(2, 3).unwrap();
        let dense = principal_eigenpair::<f64>(&g, Method::Dense).unwrap();
        let power = principal_eigenpair::<f64>(&g, Method::Power).unwrap();
        assert!((dense.value - power.value).abs() < 1e-11);
        for (a, b) in dense.vector.iter().zip(&power.vector) {
            assert!((a - b).abs() < 1e-8);
        }
        assert!(dense.vector.iter().skip(1).all(|&q| q > dense.vector[0]));
        let r = ratio::<f64>(&g).unwrap();
        assert_eq!(r.v_min, 0);
        assert!(r.gamma > 1.0);
    }

    #[test]
    fn disconnected_rejected() {
        let g = edgeless(3).unwrap();
        assert_eq!(principal_eigenpair::<f64>(&g, Method::Dense), Err(Error::Disconnected));
        assert_eq!(ratio::<f64>(&g), Err(Error::Disconnected));
        assert_eq!(second_eigenvalue::<f64>(&g, Method::Dense), Err(Error::Disconnected));
    }

    #[test]
    fn second_eigenvalues() {
        assert!(second_eigenvalue::<f64>(&cycle(4).unwrap(), Method::Dense).unwrap().abs() < 1e-12);
        for n in [2, 3, 6, 11] {
            let l2 = second_eigenvalue::<f64>(&complete(n).unwrap(), Method::Dense).unwrap();
            assert!((l2 + 1.0).abs() < 1e-12);
        }
        for g in [petersen(), kite(4, 5).unwrap(), cycle(9).unwrap(), random_regular(30, 3, 2).unwrap()] {
            let dense = second_eigenvalue::<f64>(&g, Method::Dense).unwrap();
            let power = second_eigenvalue::<f64>(&g, Method::Power).unwrap();
            assert!((dense - power).abs() < 1e-8, "{dense} vs {power}");
        }
        // negative lambda_2 through the deflated path
        let l2 = second_eigenvalue::<f64>(&complete(5).unwrap(), Method::Power).unwrap();
        assert!((l2 + 1.0).abs() < 1e-9);
    }

    #[test]
    fn summaries() {
        let s = spectrum_summary::<f64>(&petersen()).unwrap();
        assert!((s.lambda1 - 3.0).abs() < 1e-12);
        assert!((s.lambda2 - 1.0).abs() < 1e-12);
        assert!((s.additive_gap - 2.0).abs() < 1e-12);
        assert!((s.multiplicative_gap - 2.0 / 3.0).abs() < 1e-12);
        assert!((s.algebraic_connectivity.unwrap() - 2.0).abs() < 1e-12);

        let s = spectrum_summary::<f64>(&complete_bipartite(50, 50).unwrap()).unwrap();
        assert!((s.lambda1 - 50.0).abs() < 1e-10);
        assert!(s.lambda2.abs() < 1e-10);

        let s = spectrum_summary::<f64>(&kite(3, 4).unwrap()).unwrap();
        assert_eq!(s.regular_degree, None);
        assert_eq!(s.algebraic_connectivity, None);
    }

    #[test]
    fn lex_gap_formula() {
        assert!((predicted_lex_gap::<f64>(4, 1).unwrap() - 2.0).abs() < 1e-15);
        // zeros from the empty factor outrank s * lambda_2(C_3) = -2
        assert!((predicted_lex_gap::<f64>(3, 2).unwrap() - 4.0).abs() < 1e-14);
        assert!((predicted_lex_gap::<f64>(3, 1).unwrap() - 3.0).abs() < 1e-14);
        let want = 40.0 * (2.0 - 2.0 * (std::f64::consts::PI / 5.0).cos());
        assert!((predicted_lex_gap::<f64>(10, 40).unwrap() - want).abs() < 1e-12);
        assert!(predicted_lex_gap::<f64>(2, 2).is_err());

        for (r, s) in [(3, 1), (3, 2), (4, 3), (5, 2), (7, 4), (12, 3)] {
            let g = lexicographic_product(&cycle(r).unwrap(), &edgeless(s).unwrap()).unwrap();
            let measured = spectrum_summary::<f64>(&g).unwrap().additive_gap;
            assert!((measured - predicted_lex_gap::<f64>(r, s).unwrap()).abs() < 1e-10, "r={r} s={s}");
        }
    }

    #[test]
    fn laplacian_rows_sum_to_zero() {
        let g = kite(3, 4).unwrap();
        let l = laplacian_matrix::<f64>(&g);
        for i in 0..g.n() {
            assert_eq!(l.row(i).iter().sum::<f64>(), 0.0);
        }
        let kn = algebraic_connectivity::<f64>(&complete(6).unwrap()).unwrap();
        assert!((kn - 6.0).abs() < 1e-12);
        let split = algebraic_connectivity::<f64>(&edgeless(3).unwrap()).unwrap();
        assert!(split.abs() < 1e-12);
    }

    #[test]
    fn f32_path() {
        let p = principal_eigenpair::<f32>(&kite(4, 4).unwrap(), Method::Power).unwrap();
        let q = principal_eigenpair::<f64>(&kite(4, 4).unwrap(), Method::Dense).unwrap();
        assert!((p.value as f64 - q.value).abs() < 1e-4);
        let s = spectrum_summary::<f32>(&petersen()).unwrap();
        assert!((s.additive_gap - 2.0).abs() < 1e-4);
    }
}
