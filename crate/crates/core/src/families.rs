//! Graph family constructors and their CLI-facing names.
//!
//! Labelling conventions:
//! * cycles and paths use consecutive ids along the walk;
//! * `kite(r, s)` puts the path on `0..r` with `0` pendant, and the clique on
//!   `r-1..r+s-1`;
//! * products are row-major: `(w, v) -> w * |V(G)| + v`;
//! * ring graphs put the layers first (see [`RingDescriptor`]).

use std::fmt;
use std::path::PathBuf;
use std::str::FromStr;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::edgelist;
use crate::error::{Error, Result};
use crate::graph::{Edge, Graph};

pub fn cycle(n: usize) -> Result<Graph> {
    if n < 3 {
        return Err(Error::InvalidSize(format!("cycle needs n >= 3, got {n}")));
    }
    Graph::from_edges(n, (0..n).map(|i| (i, (i + 1) % n)))
}

pub fn path(n: usize) -> Result<Graph> {
    if n < 1 {
        return Err(Error::InvalidSize("path needs at least one vertex".into()));
    }
    Graph::from_edges(n, (1..n).map(|i| (i - 1, i)))
}

pub fn complete(s: usize) -> Result<Graph> {
    if s < 1 {
        return Err(Error::InvalidSize("complete graph needs at least one vertex".into()));
    }
    Graph::from_edges(s, (0..s).flat_map(|i| (i + 1..s).map(move |j| (i, j))))
}

/// The edgeless graph on `s` vertices (complement of `K_s`).
pub fn edgeless(s: usize) -> Result<Graph> {
    if s < 1 {
        return Err(Error::InvalidSize("edgeless graph needs at least one vertex".into()));
    }
    Ok(Graph::empty(s))
}

/// `K_{a,b}` with sides `0..a` and `a..a+b`.
pub fn complete_bipartite(a: usize, b: usize) -> Result<Graph> {
    if a < 1 || b < 1 {
        return Err(Error::InvalidSize(format!("bipartite sides must be nonempty, got {a},{b}")));
    }
    Graph::from_edges(a + b, (0..a).flat_map(|i| (a..a + b).map(move |j| (i, j))))
}

/// Outer 5-cycle on `0..5`, inner pentagram on `5..10`, spokes `i ~ i+5`.
pub fn petersen() -> Graph {
    let outer = (0..5).map(|i| (i, (i + 1) % 5));
    let inner = (0..5).map(|i| (5 + i, 5 + (i + 2) % 5));
    let spokes = (0..5).map(|i| (i, i + 5));
    Graph::from_edges(10, outer.chain(inner).chain(spokes)).expect("petersen is simple")
}

/// Lollipop `P_r . K_s`: a path on `r` vertices whose last vertex is merged
/// into an `s`-clique.
pub fn kite(r: usize, s: usize) -> Result<Graph> {
    if r < 1 || s < 2 {
        return Err(Error::InvalidSize(format!("kite needs r >= 1 and s >= 2, got r={r}, s={s}")));
    }
    let n = r + s - 1;
    let path_edges = (1..r).map(|i| (i - 1, i));
    let clique = r - 1..n;
    let clique_edges = clique.clone().flat_map(move |i| (i + 1..n).map(move |j| (i, j)));
    Graph::from_edges(n, path_edges.chain(clique_edges))
}

pub fn cartesian_product(h: &Graph, g: &Graph) -> Result<Graph> {
    if h.n() == 0 || g.n() == 0 {
        return Err(Error::InvalidSize("product factors must be nonempty".into()));
    }
    let ng = g.n();
    let mut edges = Vec::with_capacity(h.m() * ng + g.m() * h.n());
    for w in 0..h.n() {
        for e in g.edges() {
            edges.push((w * ng + e.u(), w * ng + e.v()));
        }
    }
    for e in h.edges() {
        for v in 0..ng {
            edges.push((e.u() * ng + v, e.v() * ng + v));
        }
    }
    Graph::from_edges(h.n() * ng, edges)
}

/// `H o G`: `(w1,v1) ~ (w2,v2)` iff `w1 ~ w2` in `H`, or `w1 = w2` and `v1 ~ v2` in `G`.
pub fn lexicographic_product(h: &Graph, g: &Graph) -> Result<Graph> {
    if h.n() == 0 || g.n() == 0 {
        return Err(Error::InvalidSize("product factors must be nonempty".into()));
    }
    let ng = g.n();
    let mut edges = Vec::with_capacity(h.m() * ng * ng + g.m() * h.n());
    for w in 0..h.n() {
        for e in g.edges() {
            edges.push((w * ng + e.u(), w * ng + e.v()));
        }
    }
    for e in h.edges() {
        for v1 in 0..ng {
            for v2 in 0..ng {
                edges.push((e.u() * ng + v1, e.v() * ng + v2));
            }
        }
    }
    Graph::from_edges(h.n() * ng, edges)
}

/// Named vertices of the two-clique gadget closing up a ring graph.
/// `h1[t - 1]` is vertex `t` of the first clique copy (1-based as in the
/// construction), likewise `h2`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct RingGadget {
    pub h1: Vec<usize>,
    pub h2: Vec<usize>,
    pub w1: usize,
    pub w2: usize,
    pub u1: usize,
    pub u2: usize,
}

/// A d-regular ring graph built from `P_{2r+1} [] K_{d-1}` and a gadget.
///
/// Layer `L_i` (`-r <= i <= r`) holds ids `(i + r)(d - 1) .. (i + r + 1)(d - 1)`.
/// Then come `w1`, `w2`, the `d + 1` vertices of `H1`, and those of `H2`.
#[derive(Debug, Clone)]
pub struct RingDescriptor {
    pub r: usize,
    pub d: usize,
    pub graph: Graph,
    /// `layers[i + r]` lists the vertices of `L_i`.
    pub layers: Vec<Vec<usize>>,
    pub gadget: RingGadget,
    /// `{H1[3], H1[4]}`, the non-edge whose addition blows up the ratio.
    pub e_star: Edge,
}

impl RingDescriptor {
    pub fn expected_order(r: usize, d: usize) -> usize {
        (2 * r + 1) * (d - 1) + 2 + 2 * (d + 1)
    }

    pub fn layer(&self, i: isize) -> &[usize] {
        &self.layers[(i + self.r as isize) as usize]
    }

    /// Layer index of a ring vertex, `None` for gadget vertices.
    pub fn layer_of(&self, v: usize) -> Option<isize> {
        let ring_size = (2 * self.r + 1) * (self.d - 1);
        (v < ring_size).then(|| (v / (self.d - 1)) as isize - self.r as isize)
    }

    /// The switching automorphism: negates layers and swaps
    /// `w1<->w2`, `u1<->u2`, `H1[3]<->H1[4]`, `H2[1]<->H2[2]`.
    pub fn switching_permutation(&self) -> Vec<usize> {
        let n = self.graph.n();
        let k = self.d - 1;
        let mut perm: Vec<usize> = (0..n).collect();
        for (v, p) in perm.iter_mut().enumerate().take((2 * self.r + 1) * k) {
            let layer = v / k;
            *p = (2 * self.r - layer) * k + v % k;
        }
        let g = &self.gadget;
        for (a, b) in [(g.w1, g.w2), (g.u1, g.u2), (g.h1[2], g.h1[3]), (g.h2[0], g.h2[1])] {
            perm[a] = b;
            perm[b] = a;
        }
        perm
    }
}

pub fn ring(r: usize, d: usize) -> Result<RingDescriptor> {
    if r < 1 || d < 3 {
        return Err(Error::InvalidParameters(format!(
            "ring needs r >= 1 and d >= 3 (the gadget needs clique vertices 1..4), got r={r}, d={d}"
        )));
    }
    let k = d - 1;
    let layers_graph = cartesian_product(&path(2 * r + 1)?, &complete(k)?)?;
    let base = layers_graph.n();
    let w1 = base;
    let w2 = base + 1;
    let h1: Vec<usize> = (0..d + 1).map(|t| base + 2 + t).collect();
    let h2: Vec<usize> = (0..d + 1).map(|t| base + 2 + d + 1 + t).collect();
    let (u1, u2) = (h1[0], h1[1]);
    let n = base + 2 + 2 * (d + 1);

    let mut edges: Vec<(usize, usize)> = layers_graph.edges().map(|e| e.endpoints()).collect();
    for a in 0..=d {
        for b in a + 1..=d {
            // H1 loses {3,4} and {u1,u2} = {1,2}; H2 loses {1,2}
            if !((a, b) == (2, 3) || (a, b) == (0, 1)) {
                edges.push((h1[a], h1[b]));
            }
            if (a, b) != (0, 1) {
                edges.push((h2[a], h2[b]));
            }
        }
    }
    edges.push((h2[0], h1[2]));
    edges.push((h2[1], h1[3]));
    edges.push((w1, u1));
    edges.push((w2, u2));
    for c in 0..k {
        edges.push((w1, c));
        edges.push((w2, 2 * r * k + c));
    }
    let graph = Graph::from_edges(n, edges)?;
    let layers = (0..2 * r + 1).map(|p| (p * k..(p + 1) * k).collect()).collect();
    Ok(RingDescriptor {
        r,
        d,
        graph,
        layers,
        e_star: Edge::new(h1[2], h1[3])?,
        gadget: RingGadget { h1, h2, w1, w2, u1, u2 },
    })
}

/// The ring graph together with `ring + e_star`.
pub fn ring_plus_e(r: usize, d: usize) -> Result<(RingDescriptor, Graph)> {
    let desc = ring(r, d)?;
    let plus = desc.graph.add_edge(desc.e_star)?;
    Ok((desc, plus))
}

const MAX_ATTEMPTS: usize = 1000;
const MAX_PICKS: usize = 100;

/// Connected simple d-regular graph from the configuration (pairing) model.
/// Stubs are paired at random; a pair that would create a loop or a parallel
/// edge is redrawn, and a stuck or disconnected attempt restarts.
pub fn random_regular(n: usize, d: usize, seed: u64) -> Result<Graph> {
    if (n * d) % 2 == 1 || d >= n {
        return Err(Error::GenerationFailed { attempts: 0 });
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    for attempt in 1..=MAX_ATTEMPTS {
        if let Some(g) = try_pairing(n, d, &mut rng) {
            if g.is_connected() {
                return Ok(g);
            }
        }
        if attempt == MAX_ATTEMPTS {
            break;
        }
    }
    Err(Error::GenerationFailed { attempts: MAX_ATTEMPTS })
}

fn try_pairing(n: usize, d: usize, rng: &mut ChaCha8Rng) -> Option<Graph> {
    let mut stubs: Vec<usize> = (0..n).flat_map(|v| std::iter::repeat(v).take(d)).collect();
    let mut g = Graph::empty(n);
    while !stubs.is_empty() {
        let mut placed = false;
        for _ in 0..MAX_PICKS {
            let i = rng.gen_range(0..stubs.len());
            let j = rng.gen_range(0..stubs.len());
            let (a, b) = (stubs[i], stubs[j]);
            if a == b || g.is_adjacent(a, b) {
                continue;
            }
            g = g.add_edge(Edge::new(a, b).ok()?).ok()?;
            let (hi, lo) = (i.max(j), i.min(j));
            stubs.swap_remove(hi);
            stubs.swap_remove(lo);
            placed = true;
            break;
        }
        if !placed {
            return None;
        }
    }
    Some(g)
}

/// A named construction, with a canonical string form such as
/// `ring:r=125,d=3`, `kite:r=10,s=5`, `lex:cycle:10,empty:40` or
/// `rr:n=100,d=3,seed=7`.
#[derive(Debug, Clone, PartialEq)]
pub enum FamilySpec {
    Cycle(usize),
    Path(usize),
    Complete(usize),
    EmptyComplementKs(usize),
    Bipartite(usize, usize),
    Petersen,
    Kite(usize, usize),
    Cartesian(Box<FamilySpec>, Box<FamilySpec>),
    Lexicographic(Box<FamilySpec>, Box<FamilySpec>),
    Ring(usize, usize),
    RingPlusE(usize, usize),
    RandomRegular { n: usize, d: usize, seed: u64 },
    FromFile(PathBuf),
}

impl FamilySpec {
    pub fn build(&self) -> Result<Graph> {
        match self {
            FamilySpec::Cycle(n) => cycle(*n),
            FamilySpec::Path(n) => path(*n),
            FamilySpec::Complete(n) => complete(*n),
            FamilySpec::EmptyComplementKs(s) => edgeless(*s),
            FamilySpec::Bipartite(a, b) => complete_bipartite(*a, *b),
            FamilySpec::Petersen => Ok(petersen()),
            FamilySpec::Kite(r, s) => kite(*r, *s),
            FamilySpec::Cartesian(h, g) => cartesian_product(&h.build()?, &g.build()?),
            FamilySpec::Lexicographic(h, g) => lexicographic_product(&h.build()?, &g.build()?),
            FamilySpec::Ring(r, d) => Ok(ring(*r, *d)?.graph),
            FamilySpec::RingPlusE(r, d) => Ok(ring_plus_e(*r, *d)?.1),
            FamilySpec::RandomRegular { n, d, seed } => random_regular(*n, *d, *seed),
            FamilySpec::FromFile(p) => edgelist::read(p),
        }
    }
}

impl fmt::Display for FamilySpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            FamilySpec::Cycle(n) => write!(f, "cycle:{n}"),
            FamilySpec::Path(n) => write!(f, "path:{n}"),
            FamilySpec::Complete(n) => write!(f, "complete:{n}"),
            FamilySpec::EmptyComplementKs(s) => write!(f, "empty:{s}"),
            FamilySpec::Bipartite(a, b) => write!(f, "bipartite:a={a},b={b}"),
            FamilySpec::Petersen => write!(f, "petersen"),
            FamilySpec::Kite(r, s) => write!(f, "kite:r={r},s={s}"),
            FamilySpec::Cartesian(h, g) => write!(f, "cart:{h},{g}"),
            FamilySpec::Lexicographic(h, g) => write!(f, "lex:{h},{g}"),
            FamilySpec::Ring(r, d) => write!(f, "ring:r={r},d={d}"),
            FamilySpec::RingPlusE(r, d) => write!(f, "ring+e:r={r},d={d}"),
            FamilySpec::RandomRegular { n, d, seed } => write!(f, "rr:n={n},d={d},seed={seed}"),
            FamilySpec::FromFile(p) => write!(f, "file:{}", p.display()),
        }
    }
}

/// Reads `names.len()` integer arguments given positionally (`10,5`) or by
/// key (`r=10,s=5`, any order).
fn int_args(family: &str, args: &str, names: &[&str]) -> Result<Vec<u64>> {
    let bad = |msg: String| Error::Parse(format!("{family}: {msg}"));
    let parts: Vec<&str> = if args.is_empty() { Vec::new() } else { args.split(',').collect() };
    if parts.len() != names.len() {
        return Err(bad(format!("expected {} arguments ({}), got '{args}'", names.len(), names.join(","))));
    }
    let mut out = vec![None; names.len()];
    for (pos, part) in parts.iter().enumerate() {
        let (slot, value) = match part.split_once('=') {
            Some((k, v)) => {
                let k = k.trim();
                let slot = names.iter().position(|n| *n == k).ok_or_else(|| bad(format!("unknown key '{k}'")))?;
                (slot, v)
            }
            None => (pos, *part),
        };
        let parsed = value.trim().parse().map_err(|_| bad(format!("'{value}' is not a non-negative integer")))?;
        if out[slot].replace(parsed).is_some() {
            return Err(bad(format!("'{}' given twice", names[slot])));
        }
    }
    Ok(out.into_iter().map(|v| v.expect("all slots filled")).collect())
}

fn parse_pair_of_specs(family: &str, args: &str) -> Result<(FamilySpec, FamilySpec)> {
    for (idx, _) in args.match_indices(',') {
        let (a, b) = (&args[..idx], &args[idx + 1..]);
        if let (Ok(h), Ok(g)) = (a.parse(), b.parse()) {
            return Ok((h, g));
        }
    }
    Err(Error::Parse(format!("{family}: cannot split '{args}' into two family specs")))
}

impl FromStr for FamilySpec {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        if let Some(inner) = s.strip_prefix('(').and_then(|t| t.strip_suffix(')')) {
            return inner.parse();
        }
        let (name, args) = s.split_once(':').unwrap_or((s, ""));
        let us = |v: u64| v as usize;
        Ok(match name {
            "cycle" => FamilySpec::Cycle(us(int_args(name, args, &["n"])?[0])),
            "path" => FamilySpec::Path(us(int_args(name, args, &["n"])?[0])),
            "complete" => FamilySpec::Complete(us(int_args(name, args, &["n"])?[0])),
            "empty" => FamilySpec::EmptyComplementKs(us(int_args(name, args, &["s"])?[0])),
            "petersen" if args.is_empty() => FamilySpec::Petersen,
            "bipartite" => {
                let v = int_args(name, args, &["a", "b"])?;
                FamilySpec::Bipartite(us(v[0]), us(v[1]))
            }
            "kite" => {
                let v = int_args(name, args, &["r", "s"])?;
                FamilySpec::Kite(us(v[0]), us(v[1]))
            }
            "ring" => {
                let v = int_args(name, args, &["r", "d"])?;
                FamilySpec::Ring(us(v[0]), us(v[1]))
            }
            "ring+e" => {
                let v = int_args(name, args, &["r", "d"])?;
                FamilySpec::RingPlusE(us(v[0]), us(v[1]))
            }
            "rr" => {
                let v = int_args(name, args, &["n", "d", "seed"])?;
                FamilySpec::RandomRegular { n: us(v[0]), d: us(v[1]), seed: v[2] }
            }
            "cart" => {
                let (h, g) = parse_pair_of_specs(name, args)?;
                FamilySpec::Cartesian(Box::new(h), Box::new(g))
            }
            "lex" => {
                let (h, g) = parse_pair_of_specs(name, args)?;
                FamilySpec::Lexicographic(Box::new(h), Box::new(g))
            }
            "file" if !args.is_empty() => FamilySpec::FromFile(PathBuf::from(args)),
            _ => return Err(Error::Parse(format!("unknown family '{s}'"))),
        })
    }
}
