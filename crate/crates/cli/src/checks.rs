//! Running named bound checks on one graph, with sampled pairs and edges.

use rand::seq::SliceRandom;
use rand::Rng;
use ratiolab::bounds::{self, BoundCheck};
use ratiolab::perturbation::EdgeSign;
use ratiolab::{Edge, Error, FamilySpec, Graph, Result};

pub const CHECK_NAMES: [&str; 9] = [
    "ratio_diameter",
    "distance_ratio",
    "regular_diameter",
    "diameter_change",
    "cgn",
    "alon_milman",
    "expander_corollary",
    "removal_poly",
    "exponential_ring",
];

/// Names of the individual rows a check produces.
pub fn sub_checks(name: &str) -> &'static [&'static str] {
    match name {
        "ratio_diameter" => &["ratio_diameter"],
        "distance_ratio" => &["distance_ratio"],
        "regular_diameter" => &["regular_diameter"],
        "diameter_change" => &["diameter_change"],
        "cgn" => &["cgn"],
        "alon_milman" => &["alon_milman"],
        "expander_corollary" => &["expander_corollary"],
        "removal_poly" => &["removal_poly", "removal_min_endpoint"],
        "exponential_ring" => &["exponential_ring", "ring_eigenvalue_jump", "ring_chebyshev_chain", "ring_layer_identity"],
        _ => &[],
    }
}

#[derive(Debug, Clone)]
pub struct CheckOptions {
    /// Sampled vertex pairs or edges per check.
    pub samples: usize,
    pub edge: Option<Edge>,
    pub edge_op: EdgeSign,
    /// Distance allowance for `removal_poly`; the measured distance when absent.
    pub c_dist: Option<usize>,
}

impl Default for CheckOptions {
    fn default() -> Self {
        CheckOptions { samples: 10, edge: None, edge_op: EdgeSign::Plus, c_dist: None }
    }
}

/// Errors that point at a numerical fault rather than an unmet assumption.
pub fn is_fault(e: &Error) -> bool {
    matches!(
        e,
        Error::Numerical(_) | Error::NoConvergence { .. } | Error::NonPositiveCoordinate { .. } | Error::NotPositiveDefinite
    )
}

fn sample<T: Clone>(items: Vec<T>, k: usize, rng: &mut impl Rng, what: &str) -> Result<Vec<T>> {
    if items.is_empty() {
        return Err(Error::InvalidParameters(format!("graph has no {what}")));
    }
    Ok(items.choose_multiple(rng, k.min(items.len())).cloned().collect())
}

fn non_edges(g: &Graph, opts: &CheckOptions, rng: &mut impl Rng) -> Result<Vec<Edge>> {
    match opts.edge {
        Some(e) => Ok(vec![e]),
        None => sample(g.non_edges().collect(), opts.samples, rng, "non-edges"),
    }
}

fn removable_edges(g: &Graph, opts: &CheckOptions, rng: &mut impl Rng) -> Result<Vec<Edge>> {
    match opts.edge {
        Some(e) => Ok(vec![e]),
        None => {
            let edges: Vec<Edge> = g.edges().filter(|&e| g.is_bridge(e) == Ok(false)).collect();
            sample(edges, opts.samples, rng, "non-bridge edges")
        }
    }
}

/// Runs one named check; sampled checks yield one row per sample.
pub fn run_check(
    name: &str,
    spec: &FamilySpec,
    g: &Graph,
    opts: &CheckOptions,
    rng: &mut impl Rng,
) -> Result<Vec<BoundCheck>> {
    let params = spec.to_string();
    let tag = |mut c: BoundCheck| {
        c.params = format!("{params};{}", c.params);
        c
    };
    let rows = match name {
        "ratio_diameter" => vec![bounds::check_ratio_diameter(g)?],
        "distance_ratio" => {
            let n = g.n();
            let pairs: Vec<(usize, usize)> = (0..opts.samples).map(|_| (rng.gen_range(0..n), rng.gen_range(0..n))).collect();
            bounds::check_distance_ratios(g, &pairs)?
        }
        "regular_diameter" => vec![bounds::check_regular_diameter(g)?],
        "diameter_change" => {
            non_edges(g, opts, rng)?.into_iter().map(|e| bounds::check_diameter_change(g, e)).collect::<Result<_>>()?
        }
        "cgn" => vec![bounds::check_cgn(g)?],
        "alon_milman" => vec![bounds::check_alon_milman(g)?],
        "expander_corollary" => {
            let edges = match opts.edge_op {
                EdgeSign::Plus => non_edges(g, opts, rng)?,
                EdgeSign::Minus => removable_edges(g, opts, rng)?,
            };
            edges
                .into_iter()
                .map(|e| bounds::check_expander_corollary(g, e, opts.edge_op))
                .collect::<Result<_>>()?
        }
        "removal_poly" => {
            g.regular_degree().ok_or(Error::NotRegular)?;
            let mut out = Vec::new();
            for e in removable_edges(g, opts, rng)? {
                let c = match opts.c_dist {
                    Some(c) => c,
                    None => g.remove_edge(e)?.distance(e.u(), e.v())?.ok_or(Error::Disconnected)?,
                };
                out.extend(bounds::check_removal_poly(g, e, c)?);
            }
            out
        }
        "exponential_ring" => match spec {
            FamilySpec::Ring(r, d) | FamilySpec::RingPlusE(r, d) => bounds::check_exponential_ring(*r, *d)?,
            _ => return Err(Error::InvalidParameters("exponential_ring needs a ring:r=..,d=.. spec".into())),
        },
        other => {
            return Err(Error::InvalidParameters(format!(
                "unknown check '{other}'; expected one of {} or all",
                CHECK_NAMES.join(", ")
            )))
        }
    };
    Ok(rows.into_iter().map(tag).collect())
}
