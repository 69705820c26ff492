//! Inequality checks on concrete graphs.
//!
//! Each check recomputes both sides from scratch and reports them in a
//! [`BoundCheck`]. Exponential quantities are compared through their
//! logarithms. Non-strict comparisons allow a margin of
//! `1e-9 * max(1, |rhs|)` so that equality cases are not lost to rounding.

use std::collections::BTreeMap;

use serde::Serialize;

use crate::chebyshev::{cheb_recurrence, ChebKind};
use crate::error::{Error, Result};
use crate::families::{ring_plus_e, RingDescriptor};
use crate::graph::{Edge, Graph};
use crate::perturbation::EdgeSign;
use crate::spectral::{self, Eigenpair, Method, RatioReport};

pub const MARGIN: f64 = 1e-9;

/// How `lhs` must compare with `rhs` for the check to hold.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum Relation {
    #[serde(rename = "<=")]
    Le,
    #[serde(rename = "<")]
    Lt,
    #[serde(rename = ">=")]
    Ge,
    #[serde(rename = ">")]
    Gt,
}

impl Relation {
    pub fn symbol(self) -> &'static str {
        match self {
            Relation::Le => "<=",
            Relation::Lt => "<",
            Relation::Ge => ">=",
            Relation::Gt => ">",
        }
    }

    fn holds(self, lhs: f64, rhs: f64) -> bool {
        let tol = MARGIN * rhs.abs().max(1.0);
        match self {
            Relation::Le => lhs <= rhs + tol,
            Relation::Lt => lhs < rhs,
            Relation::Ge => lhs >= rhs - tol,
            Relation::Gt => lhs > rhs,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BoundCheck {
    pub name: String,
    /// Instance description, e.g. `n=10,m=15` or a family spec.
    pub params: String,
    pub lhs: f64,
    pub rhs: f64,
    /// Whether `lhs` and `rhs` are natural logarithms of the compared quantities.
    pub log_space: bool,
    pub relation: Relation,
    pub holds: bool,
    /// Distance to the boundary, positive when the check holds.
    pub slack: f64,
    pub context: BTreeMap<String, f64>,
}

impl BoundCheck {
    pub fn new(name: &str, params: String, lhs: f64, rhs: f64, relation: Relation, log_space: bool) -> Self {
        let slack = match relation {
            Relation::Le | Relation::Lt => rhs - lhs,
            Relation::Ge | Relation::Gt => lhs - rhs,
        };
        BoundCheck {
            name: name.to_string(),
            params,
            lhs,
            rhs,
            log_space,
            relation,
            holds: relation.holds(lhs, rhs),
            slack,
            context: BTreeMap::new(),
        }
    }

    pub fn with(mut self, key: &str, value: f64) -> Self {
        self.context.insert(key.to_string(), value);
        self
    }

    pub fn with_params(mut self, params: impl Into<String>) -> Self {
        self.params = params.into();
        self
    }

    pub const CSV_HEADER: [&'static str; 7] = ["name", "params", "lhs", "rhs", "log_space", "holds", "slack"];

    /// Fields in [`Self::CSV_HEADER`] order; reals with 17 significant digits.
    pub fn csv_fields(&self) -> [String; 7] {
        [
            self.name.clone(),
            self.params.clone(),
            format_real(self.lhs),
            format_real(self.rhs),
            self.log_space.to_string(),
            self.holds.to_string(),
            format_real(self.slack),
        ]
    }
}

/// Round-trip exact formatting of a double.
pub fn format_real(x: f64) -> String {
    if x.is_finite() {
        format!("{x:.16e}")
    } else {
        x.to_string()
    }
}

fn graph_params(g: &Graph) -> String {
    format!("n={},m={}", g.n(), g.m())
}

fn require_connected(g: &Graph) -> Result<()> {
    if g.n() == 0 {
        return Err(Error::InvalidSize("empty graph".into()));
    }
    if !g.is_connected() {
        return Err(Error::Disconnected);
    }
    Ok(())
}

fn require_regular(g: &Graph) -> Result<usize> {
    require_connected(g)?;
    g.regular_degree().ok_or(Error::NotRegular)
}

/// `log gamma <= D log lambda_1`
pub fn check_ratio_diameter(g: &Graph) -> Result<BoundCheck> {
    require_connected(g)?;
    let r = spectral::ratio::<f64>(g)?;
    let diam = g.diameter()?;
    let delta_max = g.max_degree() as f64;
    Ok(BoundCheck::new("ratio_diameter", graph_params(g), r.log_gamma, diam as f64 * r.lambda1.ln(), Relation::Le, true)
        .with("gamma", r.gamma)
        .with("lambda1", r.lambda1)
        .with("D", diam as f64)
        .with("Delta", delta_max)
        .with("log_Delta_bound", diam as f64 * delta_max.ln()))
}

/// `log(q_j / q_i) <= dist(i, j) log lambda_1` for one pair.
pub fn check_distance_ratio(g: &Graph, i: usize, j: usize) -> Result<BoundCheck> {
    require_connected(g)?;
    let pair = spectral::principal_eigenpair::<f64>(g, Method::Auto)?;
    distance_ratio_from(g, &pair, i, j)
}

/// Like [`check_distance_ratio`] for many pairs sharing one eigen-solve.
pub fn check_distance_ratios(g: &Graph, pairs: &[(usize, usize)]) -> Result<Vec<BoundCheck>> {
    require_connected(g)?;
    let pair = spectral::principal_eigenpair::<f64>(g, Method::Auto)?;
    pairs.iter().map(|&(i, j)| distance_ratio_from(g, &pair, i, j)).collect()
}

fn distance_ratio_from(g: &Graph, pair: &Eigenpair<f64>, i: usize, j: usize) -> Result<BoundCheck> {
    let dist = g.distance(i, j)?.ok_or(Error::Disconnected)?;
    let q = &pair.vector;
    let lhs = q[j].ln() - q[i].ln();
    Ok(BoundCheck::new(
        "distance_ratio",
        format!("{},i={i},j={j}", graph_params(g)),
        lhs,
        dist as f64 * pair.value.ln(),
        Relation::Le,
        true,
    )
    .with("dist", dist as f64)
    .with("lambda1", pair.value)
    .with("q_i", q[i])
    .with("q_j", q[j]))
}

/// `D <= 3n / d` for connected d-regular graphs.
pub fn check_regular_diameter(g: &Graph) -> Result<BoundCheck> {
    let d = require_regular(g)?;
    let diam = g.diameter()?;
    let n = g.n() as f64;
    Ok(BoundCheck::new("regular_diameter", graph_params(g), diam as f64, 3.0 * n / d as f64, Relation::Le, false)
        .with("D", diam as f64)
        .with("d", d as f64)
        // the sharper form d * ceil(D / 3) <= n
        .with("d_ceil_D_over_3", (d * diam.div_ceil(3)) as f64))
}

/// `D(G + e) >= D(G) / 2`
pub fn check_diameter_change(g: &Graph, e: Edge) -> Result<BoundCheck> {
    require_connected(g)?;
    let plus = g.add_edge(e)?;
    let before = g.diameter()?;
    let after = plus.diameter()?;
    Ok(BoundCheck::new(
        "diameter_change",
        format!("{},e={e}", graph_params(g)),
        after as f64,
        before as f64 / 2.0,
        Relation::Ge,
        false,
    )
    .with("D", before as f64)
    .with("D_plus_e", after as f64))
}

/// `Delta - lambda_1 >= 1 / (n (D + 1))` for connected nonregular graphs.
pub fn check_cgn(g: &Graph) -> Result<BoundCheck> {
    require_connected(g)?;
    if g.regular_degree().is_some() {
        return Err(Error::NonRegularRequired);
    }
    let lambda1 = spectral::principal_eigenpair::<f64>(g, Method::Auto)?.value;
    let diam = g.diameter()?;
    let delta_max = g.max_degree() as f64;
    let n = g.n() as f64;
    Ok(BoundCheck::new(
        "cgn",
        graph_params(g),
        delta_max - lambda1,
        1.0 / (n * (diam as f64 + 1.0)),
        Relation::Ge,
        false,
    )
    .with("lambda1", lambda1)
    .with("Delta", delta_max)
    .with("D", diam as f64))
}

/// `D <= 2 floor(sqrt(2 Delta / delta_L) log2 n)` with `delta_L` the
/// algebraic connectivity.
pub fn check_alon_milman(g: &Graph) -> Result<BoundCheck> {
    require_connected(g)?;
    if g.n() < 2 {
        return Err(Error::InvalidSize("needs at least two vertices".into()));
    }
    let fiedler = spectral::algebraic_connectivity::<f64>(g)?;
    let diam = g.diameter()?;
    let delta_max = g.max_degree() as f64;
    let n = g.n() as f64;
    let rhs = 2.0 * ((2.0 * delta_max / fiedler).sqrt() * n.log2()).floor();
    Ok(BoundCheck::new("alon_milman", graph_params(g), diam as f64, rhs, Relation::Le, false)
        .with("D", diam as f64)
        .with("Delta", delta_max)
        .with("algebraic_connectivity", fiedler))
}

/// `log gamma(G +- e) <= 4 sqrt(2 / eps) log2(d + 1) ln n` where
/// `eps = (d - lambda_2) / d` is measured on the regular graph `G`.
pub fn check_expander_corollary(g: &Graph, e: Edge, op: EdgeSign) -> Result<BoundCheck> {
    let d = require_regular(g)?;
    let edited = match op {
        EdgeSign::Plus => g.add_edge(e)?,
        EdgeSign::Minus => g.remove_edge(e)?,
    };
    let summary = spectral::spectrum_summary::<f64>(g)?;
    let eps = summary.additive_gap / d as f64;
    if !(eps > 0.0) {
        return Err(Error::InvalidParameters(format!("measured expansion {eps} is not positive")));
    }
    let r = spectral::ratio::<f64>(&edited)?;
    let n = g.n() as f64;
    let rhs = 4.0 * (2.0 / eps).sqrt() * ((d + 1) as f64).log2() * n.ln();
    Ok(BoundCheck::new(
        "expander_corollary",
        format!("{},e={e},op={op}", graph_params(g)),
        r.log_gamma,
        rhs,
        Relation::Le,
        true,
    )
    .with("eps", eps)
    .with("d", d as f64)
    .with("lambda2", summary.lambda2)
    .with("gamma", r.gamma))
}

/// Layer structure of the principal vector of `Ring + e_star`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct LayerIdentity {
    /// `(lambda_1 - d + 2) / 2`
    pub t: f64,
    /// `a_j` for `j = 0..=r`, taken as the mean over layers `L_j` and `L_-j`.
    pub a: Vec<f64>,
    /// Largest `|a_j / a_0 - T_j(t)| / T_j(t)` over both sides of the ring.
    pub max_relative_error: f64,
    /// Largest `(max - min) / min` of the coordinates inside one layer.
    pub max_layer_spread: f64,
}

pub fn ring_layer_identity(desc: &RingDescriptor, pair: &Eigenpair<f64>) -> LayerIdentity {
    let q = &pair.vector;
    let d = desc.d as f64;
    let t = (pair.value - d + 2.0) / 2.0;
    let r = desc.r as isize;
    let mut spread: f64 = 0.0;
    for i in -r..=r {
        let vals: Vec<f64> = desc.layer(i).iter().map(|&v| q[v]).collect();
        let lo = vals.iter().copied().fold(f64::INFINITY, f64::min);
        let hi = vals.iter().copied().fold(0.0, f64::max);
        spread = spread.max((hi - lo) / lo);
    }
    let layer_value = |i: isize| q[desc.layer(i)[0]];
    let a0 = layer_value(0);
    let mut err: f64 = 0.0;
    let mut a = Vec::with_capacity(desc.r + 1);
    for j in 0..=desc.r {
        let tj = cheb_recurrence(ChebKind::FirstKind, j, t);
        for side in [j as isize, -(j as isize)] {
            err = err.max((layer_value(side) / a0 - tj).abs() / tj);
        }
        a.push(0.5 * (layer_value(j as isize) + layer_value(-(j as isize))));
    }
    LayerIdentity { t, a, max_relative_error: err, max_layer_spread: spread }
}

pub const LAYER_IDENTITY_TOLERANCE: f64 = 1e-8;

/// The exponential-ratio statement for `Ring_{r,d} + e_star` (requires
/// `n > 18 d^3`), followed by the intermediate facts its argument rests on:
///
/// - `exponential_ring`: `log gamma > n / (18 d^3)`
/// - `ring_eigenvalue_jump`: `lambda_1 > d + 2 / (3 d (d + 1))`
/// - `ring_chebyshev_chain`: `log gamma >= r ln(1 + 1 / (3 d (d + 1))) - ln 2`
/// - `ring_layer_identity`: layer ratios match `T_j((lambda_1 - d + 2) / 2)`
pub fn check_exponential_ring(r: usize, d: usize) -> Result<Vec<BoundCheck>> {
    if d < 3 {
        return Err(Error::InvalidParameters(format!("ring graphs need d >= 3, got d={d}")));
    }
    let n = RingDescriptor::expected_order(r, d);
    let threshold = 18 * d * d * d;
    if n <= threshold {
        return Err(Error::ParametersTooSmall(format!("n = {n} must exceed 18 d^3 = {threshold}")));
    }
    let (desc, plus) = ring_plus_e(r, d)?;
    let pair = spectral::principal_eigenpair::<f64>(&plus, Method::Auto)?;
    let rep = RatioReport::from_eigenpair(&pair);
    let params = format!("r={r},d={d},n={n}");
    let df = d as f64;
    let jump = 2.0 / (3.0 * df * (df + 1.0));
    let identity = ring_layer_identity(&desc, &pair);
    let n_f = n as f64;

    let main = BoundCheck::new("exponential_ring", params.clone(), rep.log_gamma, n_f / (18.0 * df.powi(3)), Relation::Gt, true)
        .with("lambda1", rep.lambda1)
        .with("gamma_log10", rep.log_gamma / std::f64::consts::LN_10)
        .with("n", n_f);
    let eig = BoundCheck::new("ring_eigenvalue_jump", params.clone(), rep.lambda1, df + jump, Relation::Gt, false)
        .with("c_d", jump);
    let chain_rhs = r as f64 * (1.0 + jump / 2.0).ln() - std::f64::consts::LN_2;
    let chain = BoundCheck::new("ring_chebyshev_chain", params.clone(), rep.log_gamma, chain_rhs, Relation::Ge, true)
        .with("t", identity.t)
        .with("log_T_r", cheb_recurrence(ChebKind::FirstKind, r, identity.t).ln());
    let ident = BoundCheck::new(
        "ring_layer_identity",
        params,
        identity.max_relative_error,
        LAYER_IDENTITY_TOLERANCE,
        Relation::Le,
        false,
    )
    .with("t", identity.t)
    .with("max_layer_spread", identity.max_layer_spread);
    Ok(vec![main, eig, chain, ident])
}

/// `gamma(G - e) < n^2 (1 + d^c)` for a non-bridge `e` of a connected
/// d-regular graph whose endpoints stay within distance `c` after removal,
/// followed by `removal_min_endpoint`: the smallest coordinate of the
/// principal vector of `G - e` sits on an endpoint of `e`. The second check
/// compares the smaller endpoint coordinate against the global minimum.
pub fn check_removal_poly(g: &Graph, e: Edge, c_dist: usize) -> Result<Vec<BoundCheck>> {
    let d = require_regular(g)?;
    let minus = g.remove_edge(e)?;
    let dist = minus.distance(e.u(), e.v())?;
    match dist {
        Some(k) if k <= c_dist => {}
        _ => return Err(Error::DistanceTooLarge { distance: dist, allowed: c_dist }),
    }
    let dist = dist.unwrap();
    let pair = spectral::principal_eigenpair::<f64>(&minus, Method::Auto)?;
    let rep = RatioReport::from_eigenpair(&pair);
    let n = g.n() as f64;
    let rhs = 2.0 * n.ln() + (1.0 + (d as f64).powi(c_dist as i32)).ln();
    let params = format!("{},e={e},c={c_dist}", graph_params(g));
    let poly = BoundCheck::new("removal_poly", params.clone(), rep.log_gamma, rhs, Relation::Lt, true)
        .with("dist", dist as f64)
        .with("d", d as f64)
        .with("lambda1", rep.lambda1)
        .with("gamma", rep.gamma);
    let q = &pair.vector;
    let endpoint_min = q[e.u()].min(q[e.v()]);
    let endpoint = BoundCheck::new("removal_min_endpoint", params, endpoint_min, rep.q_min, Relation::Le, false)
        .with("argmin", rep.v_min as f64);
    Ok(vec![poly, endpoint])
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::families::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn edge(a: usize, b: usize) -> Edge {
        Edge::new(a, b).unwrap()
    }

    #[test]
    fn ratio_diameter_examples() {
        let c = check_ratio_diameter(&complete(9).unwrap()).unwrap();
        assert!(c.holds && c.lhs.abs() < 1e-12 && (c.rhs - 8f64.ln()).abs() < 1e-12);
        let c = check_ratio_diameter(&kite(10, 5).unwrap()).unwrap();
        assert!(c.holds && c.slack > 0.1);
        let c = check_ratio_diameter(&cycle(12).unwrap()).unwrap();
        assert!(c.holds && (c.rhs - 6.0 * 2f64.ln()).abs() < 1e-9);
        assert!(check_ratio_diameter(&complete(2).unwrap()).unwrap().holds);
    }

    #[test]
    fn distance_ratio_examples() {
        let g = kite(5, 4).unwrap();
        assert!(check_distance_ratio(&g, 3, 3).unwrap().holds);
        // pendant end against a clique vertex, both directions
        let a = check_distance_ratio(&g, 0, 7).unwrap();
        let b = check_distance_ratio(&g, 7, 0).unwrap();
        assert!(a.holds && b.holds && a.lhs > 0.0);
        let rr = random_regular(60, 3, 4).unwrap();
        let e = rr.edges().find(|&e| !rr.is_bridge(e).unwrap()).unwrap();
        let g = rr.remove_edge(e).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let pairs: Vec<_> = (0..50).map(|_| (rng.gen_range(0..60), rng.gen_range(0..60))).collect();
        assert!(check_distance_ratios(&g, &pairs).unwrap().iter().all(|c| c.holds));
    }

    #[test]
    fn regular_diameter_examples() {
        let c = check_regular_diameter(&cycle(15).unwrap()).unwrap();
        assert!(c.holds && c.lhs == 7.0 && c.rhs == 22.5);
        let c = check_regular_diameter(&complete(7).unwrap()).unwrap();
        assert!(c.holds && c.lhs == 1.0);
        let ring = ring(125, 3).unwrap();
        let c = check_regular_diameter(&ring.graph).unwrap();
        assert!(c.holds && c.rhs == 512.0);
        assert!(matches!(check_regular_diameter(&path(4).unwrap()), Err(Error::NotRegular)));
    }

    #[test]
    fn diameter_change_examples() {
        // the chord splits C_10 into two 6-cycles; 2 and 7 stay 5 apart through either
        let c = check_diameter_change(&cycle(10).unwrap(), edge(0, 5)).unwrap();
        assert!(c.holds && c.lhs == 5.0 && c.rhs == 2.5);
        let c = check_diameter_change(&path(9).unwrap(), edge(0, 8)).unwrap();
        assert!(c.holds && c.lhs == 4.0 && c.rhs == 4.0 && c.slack == 0.0);
        assert!(matches!(check_diameter_change(&complete(5).unwrap(), edge(0, 1)), Err(Error::EdgeExists(_))));
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for k in 0..100 {
            let g = random_regular(30, 3, k).unwrap();
            let non: Vec<Edge> = g.non_edges().collect();
            let e = non[rng.gen_range(0..non.len())];
            assert!(check_diameter_change(&g, e).unwrap().holds);
        }
    }

    #[test]
    fn cgn_examples() {
        assert!(check_cgn(&kite(3, 3).unwrap()).unwrap().holds);
        let g = random_regular(40, 3, 2).unwrap();
        let e = g.edges().find(|&e| !g.is_bridge(e).unwrap()).unwrap();
        let c = check_cgn(&g.remove_edge(e).unwrap()).unwrap();
        assert!(c.holds && c.lhs > 0.0);
        assert!(matches!(check_cgn(&petersen()), Err(Error::NonRegularRequired)));
    }

    #[test]
    fn alon_milman_examples() {
        for n in [4, 9, 16] {
            let c = check_alon_milman(&complete(n).unwrap()).unwrap();
            assert!((c.context["algebraic_connectivity"] - n as f64).abs() < 1e-9);
            assert!(c.holds && c.rhs >= 2.0 * (n as f64).log2().floor());
        }
        let lex = lexicographic_product(&cycle(10).unwrap(), &edgeless(40).unwrap()).unwrap();
        assert!(check_alon_milman(&lex).unwrap().holds);
        let (_, plus) = ring_plus_e(50, 3).unwrap();
        assert!(check_alon_milman(&plus).unwrap().holds);
    }

    #[test]
    fn expander_examples() {
        let p = petersen();
        let c = check_expander_corollary(&p, edge(0, 1), EdgeSign::Minus).unwrap();
        assert!((c.context["eps"] - 2.0 / 3.0).abs() < 1e-12);
        assert!(c.holds && c.slack > 1.0);
        let non = p.non_edges().next().unwrap();
        assert!(check_expander_corollary(&p, non, EdgeSign::Plus).unwrap().holds);
        let g = random_regular(100, 3, 8).unwrap();
        let non = g.non_edges().nth(17).unwrap();
        assert!(check_expander_corollary(&g, non, EdgeSign::Plus).unwrap().holds);
        let ring = ring(30, 3).unwrap();
        let c = check_expander_corollary(&ring.graph, ring.e_star, EdgeSign::Plus).unwrap();
        assert!(c.holds && c.context["eps"] < 0.01);
    }

    #[test]
    fn exponential_ring_small_parameters_rejected() {
        assert!(matches!(check_exponential_ring(100, 3), Err(Error::ParametersTooSmall(_))));
        assert!(matches!(check_exponential_ring(200, 2), Err(Error::InvalidParameters(_))));
    }

    #[test]
    fn layer_identity_at_small_r() {
        // r = 120 is a case where the raw dense vector has a negative coordinate
        for (r, d) in [(5, 3), (12, 4), (20, 3), (120, 3)] {
            let (desc, plus) = ring_plus_e(r, d).unwrap();
            let pair = spectral::principal_eigenpair::<f64>(&plus, Method::Dense).unwrap();
            let id = ring_layer_identity(&desc, &pair);
            assert!(id.max_relative_error <= 1e-8, "r={r} d={d}: {}", id.max_relative_error);
            assert!(id.max_layer_spread <= 1e-9);
            assert!(id.t > 1.0);
        }
    }

    #[test]
    fn removal_examples() {
        let c = cycle(9).unwrap();
        assert!(matches!(
            check_removal_poly(&c, edge(0, 1), 3),
            Err(Error::DistanceTooLarge { distance: Some(8), allowed: 3 })
        ));
        assert!(matches!(check_removal_poly(&path(3).unwrap(), edge(0, 1), 3), Err(Error::NotRegular)));
        let checks = check_removal_poly(&c, edge(0, 1), 8).unwrap();
        assert!(checks.iter().all(|c| c.holds));
        let checks = check_removal_poly(&petersen(), edge(0, 1), 4).unwrap();
        assert_eq!(checks[0].context["dist"], 4.0);
        assert!(checks.iter().all(|c| c.holds));
    }

    #[test]
    fn csv_row_shape() {
        let c = check_ratio_diameter(&kite(4, 3).unwrap()).unwrap();
        let row = c.csv_fields();
        assert_eq!(row[0], "ratio_diameter");
        assert_eq!(row[4], "true");
        assert_eq!(row[2].parse::<f64>().unwrap(), c.lhs);
        assert_eq!(format_real(0.1), "1.0000000000000001e-1");
    }
}
