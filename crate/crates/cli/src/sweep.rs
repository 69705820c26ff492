//! Parameter sweeps driven by a flat `key = value` config.
//!
//! ```text
//! # growth of the ratio along the ring family
//! family   = ring+e:r={r},d=3
//! r        = 10..125:5
//! analyses = ratio, spectrum, exponential_ring
//! output   = ring.csv
//! format   = csv
//! seed     = 1
//! ```
//!
//! Keys other than the reserved ones below define swept parameters,
//! referenced as `{name}` in `family`. A value is either an inclusive
//! integer range `a..b` with optional `:step`, or a comma-separated list.
//! With two parameters the grid is their cartesian product, first key
//! outermost, unless `zip = true` pairs them up positionally.
//!
//! Reserved keys: `family`, `analyses`, `output`, `format` (`csv` or
//! `json`), `seed` (also substituted for `{seed}`), `zip`, `samples`
//! (sampled pairs or edges per bound check), `edge` and `sign` (the edit
//! used by `perturb`, sampled when `edge` is absent), `c_dist`.
//!
//! Analyses: `ratio`, `spectrum`, `lex_gap` (for `lex:cycle:R,empty:S`),
//! `perturb(C)` with `C` a number or `{param}`, and any bound-check name.
//! Each row lists the parameter values, `spec`, `n`, `m`, the analysis
//! columns and `error`; failed analyses leave their cells empty and
//! append to `error`.

use std::collections::BTreeMap;
use std::io::Write;
use std::path::Path;

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use ratiolab::bounds::{format_real, BoundCheck};
use ratiolab::perturbation::{self, EdgeSign};
use ratiolab::spectral;
use ratiolab::{Edge, Error, FamilySpec, Graph};

use crate::checks::{self, CheckOptions, CHECK_NAMES};
use crate::{csv_err, Failure, Format, EXIT_OK, EXIT_VIOLATION};

const RESERVED: [&str; 10] = ["family", "analyses", "output", "format", "seed", "zip", "samples", "edge", "sign", "c_dist"];

#[derive(Debug, Clone, PartialEq)]
pub enum CValue {
    Fixed(f64),
    Param(String),
}

#[derive(Debug, Clone, PartialEq)]
pub enum Analysis {
    Ratio,
    Spectrum,
    LexGap,
    Perturb(CValue),
    Check(String),
}

#[derive(Debug, Clone)]
pub struct SweepConfig {
    pub family: String,
    pub params: Vec<(String, Vec<String>)>,
    pub zip: bool,
    pub analyses: Vec<Analysis>,
    pub output: Option<String>,
    pub format: Format,
    pub seed: u64,
    pub samples: usize,
    pub edge: Option<Edge>,
    pub sign: EdgeSign,
    pub c_dist: Option<usize>,
}

fn usage(msg: impl Into<String>) -> Failure {
    Failure::Usage(msg.into())
}

fn parse_values(key: &str, v: &str) -> Result<Vec<String>, Failure> {
    let v = v.trim();
    let out: Vec<String> = if let Some((a, rest)) = v.split_once("..") {
        let (b, step) = rest.split_once(':').unwrap_or((rest, "1"));
        let num = |s: &str| s.trim().parse::<i64>().map_err(|_| usage(format!("{key}: '{s}' is not an integer in range '{v}'")));
        let (a, b, step) = (num(a)?, num(b)?, num(step)?);
        if step <= 0 {
            return Err(usage(format!("{key}: range step must be positive")));
        }
        (a..=b).step_by(step as usize).map(|x| x.to_string()).collect()
    } else {
        v.split(',').map(|s| s.trim().to_string()).filter(|s| !s.is_empty()).collect()
    };
    if out.is_empty() {
        return Err(usage(format!("swept parameter '{key}' has no values")));
    }
    Ok(out)
}

fn parse_analyses(v: &str, params: &[(String, Vec<String>)]) -> Result<Vec<Analysis>, Failure> {
    let mut out = Vec::new();
    for item in v.split(',').map(str::trim).filter(|s| !s.is_empty()) {
        let a = match item {
            "ratio" => Analysis::Ratio,
            "spectrum" => Analysis::Spectrum,
            "lex_gap" => Analysis::LexGap,
            _ if item.starts_with("perturb(") && item.ends_with(')') => {
                let arg = item["perturb(".len()..item.len() - 1].trim();
                if let Some(name) = arg.strip_prefix('{').and_then(|s| s.strip_suffix('}')) {
                    if !params.iter().any(|(k, _)| k == name) {
                        return Err(usage(format!("perturb({{{name}}}) refers to an undefined parameter")));
                    }
                    Analysis::Perturb(CValue::Param(name.to_string()))
                } else {
                    let c = arg.parse().map_err(|_| usage(format!("perturb: '{arg}' is not a number")))?;
                    Analysis::Perturb(CValue::Fixed(c))
                }
            }
            _ if CHECK_NAMES.contains(&item) => Analysis::Check(item.to_string()),
            _ => {
                return Err(usage(format!(
                    "unknown analysis '{item}'; expected ratio, spectrum, lex_gap, perturb(c) or one of {}",
                    CHECK_NAMES.join(", ")
                )))
            }
        };
        if out.contains(&a) || (matches!(a, Analysis::Perturb(_)) && out.iter().any(|x| matches!(x, Analysis::Perturb(_)))) {
            return Err(usage(format!("analysis '{item}' listed twice")));
        }
        out.push(a);
    }
    if out.is_empty() {
        return Err(usage("analyses is empty; list at least one analysis"));
    }
    Ok(out)
}

pub fn parse_config(text: &str) -> Result<SweepConfig, Failure> {
    let mut kv: Vec<(String, String)> = Vec::new();
    for (ln, raw) in text.lines().enumerate() {
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let (k, v) = line.split_once('=').ok_or_else(|| usage(format!("config line {}: expected 'key = value'", ln + 1)))?;
        let (k, v) = (k.trim().to_string(), v.trim().to_string());
        if kv.iter().any(|(x, _)| *x == k) {
            return Err(usage(format!("config key '{k}' given twice")));
        }
        kv.push((k, v));
    }
    let get = |k: &str| kv.iter().find(|(x, _)| x == k).map(|(_, v)| v.as_str());
    let family = get("family").ok_or_else(|| usage("config needs a 'family' template"))?.to_string();

    let mut params = Vec::new();
    for (k, v) in &kv {
        if !RESERVED.contains(&k.as_str()) {
            params.push((k.clone(), parse_values(k, v)?));
        }
    }
    if params.is_empty() || params.len() > 2 {
        return Err(usage(format!("a sweep needs one or two swept parameters, found {}", params.len())));
    }
    for (k, _) in &params {
        if !family.contains(&format!("{{{k}}}")) && !kv.iter().any(|(x, v)| x == "analyses" && v.contains(&format!("{{{k}}}"))) {
            return Err(usage(format!("parameter '{k}' is not used by the family template or the analyses")));
        }
    }
    let zip = match get("zip") {
        None | Some("false") => false,
        Some("true") => true,
        Some(other) => return Err(usage(format!("zip must be true or false, got '{other}'"))),
    };
    if zip && params.len() == 2 && params[0].1.len() != params[1].1.len() {
        return Err(usage("zip = true needs parameter lists of equal length"));
    }
    let analyses = parse_analyses(get("analyses").unwrap_or(""), &params)?;
    let format = match get("format").unwrap_or("csv") {
        "csv" => Format::Csv,
        "json" => Format::Json,
        other => return Err(usage(format!("format must be csv or json, got '{other}'"))),
    };
    let num = |k: &str, default: u64| -> Result<u64, Failure> {
        get(k).map_or(Ok(default), |v| v.parse().map_err(|_| usage(format!("{k} must be a non-negative integer"))))
    };
    Ok(SweepConfig {
        family,
        zip,
        analyses,
        output: get("output").map(str::to_string),
        format,
        seed: num("seed", 0)?,
        samples: num("samples", 10)? as usize,
        edge: get("edge").map(crate::parse_edge).transpose().map_err(usage)?,
        sign: get("sign").map_or(Ok(EdgeSign::Minus), |s| s.parse()).map_err(|e: Error| usage(e.to_string()))?,
        c_dist: get("c_dist").map(|_| num("c_dist", 0)).transpose()?.map(|c| c as usize),
        params,
    })
}

impl SweepConfig {
    /// Parameter assignments in output order.
    pub fn points(&self) -> Vec<Vec<String>> {
        match self.params.as_slice() {
            [(_, a)] => a.iter().map(|x| vec![x.clone()]).collect(),
            [(_, a), (_, b)] if self.zip => a.iter().zip(b).map(|(x, y)| vec![x.clone(), y.clone()]).collect(),
            [(_, a), (_, b)] => a.iter().flat_map(|x| b.iter().map(move |y| vec![x.clone(), y.clone()])).collect(),
            _ => Vec::new(),
        }
    }

    pub fn columns(&self) -> Vec<String> {
        let mut cols: Vec<String> = self.params.iter().map(|(k, _)| k.clone()).collect();
        cols.extend(["spec", "n", "m"].map(String::from));
        for a in &self.analyses {
            cols.extend(analysis_columns(a));
        }
        cols.push("error".into());
        cols
    }
}

const RATIO_COLS: [&str; 8] = ["gamma", "log_gamma", "lambda1", "q_max", "q_min", "v_max", "v_min", "residual"];
const SPECTRUM_COLS: [&str; 5] =
    ["spectrum_lambda1", "spectrum_lambda2", "additive_gap", "multiplicative_gap", "algebraic_connectivity"];
const LEX_COLS: [&str; 3] = ["predicted_lex_gap", "measured_gap", "lex_gap_error"];
const PERTURB_COLS: [&str; 15] = [
    "perturb_c",
    "perturb_edge",
    "perturb_sign",
    "perturb_delta",
    "perturb_min_c",
    "perturb_theta",
    "perturb_eta",
    "perturb_p_norm",
    "perturb_p_bound",
    "perturb_rho",
    "perturb_iterations",
    "perturb_gamma_observed",
    "perturb_gamma_direct",
    "perturb_gamma_certificate",
    "perturb_certified",
];

fn analysis_columns(a: &Analysis) -> Vec<String> {
    match a {
        Analysis::Ratio => RATIO_COLS.map(String::from).to_vec(),
        Analysis::Spectrum => SPECTRUM_COLS.map(String::from).to_vec(),
        Analysis::LexGap => LEX_COLS.map(String::from).to_vec(),
        Analysis::Perturb(_) => PERTURB_COLS.map(String::from).to_vec(),
        Analysis::Check(name) => checks::sub_checks(name)
            .iter()
            .flat_map(|s| ["holds", "lhs", "rhs", "slack"].map(|f| format!("{s}_{f}")))
            .collect(),
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum Cell {
    Empty,
    Text(String),
    Int(i64),
    Real(f64),
    Bool(bool),
}

impl Cell {
    fn csv(&self) -> String {
        match self {
            Cell::Empty => String::new(),
            Cell::Text(s) => s.clone(),
            Cell::Int(i) => i.to_string(),
            Cell::Real(x) => format_real(*x),
            Cell::Bool(b) => b.to_string(),
        }
    }

    fn json(&self) -> serde_json::Value {
        use serde_json::Value;
        match self {
            Cell::Empty => Value::Null,
            Cell::Text(s) => Value::String(s.clone()),
            Cell::Int(i) => Value::from(*i),
            Cell::Real(x) => serde_json::Number::from_f64(*x).map_or_else(|| Value::String(x.to_string()), Value::Number),
            Cell::Bool(b) => Value::Bool(*b),
        }
    }
}

struct Row {
    cells: Vec<Cell>,
    /// A bound check failed or a certificate was not met.
    violated: bool,
}

fn substitute(template: &str, names: &[String], values: &[String], seed: u64) -> String {
    let mut s = template.replace("{seed}", &seed.to_string());
    for (k, v) in names.iter().zip(values) {
        s = s.replace(&format!("{{{k}}}"), v);
    }
    s
}

fn real(x: f64) -> Cell {
    Cell::Real(x)
}

fn evaluate(cfg: &SweepConfig, index: usize, values: &[String]) -> Row {
    let names: Vec<String> = cfg.params.iter().map(|(k, _)| k.clone()).collect();
    let mut cells: Vec<Cell> = values.iter().map(|v| Cell::Text(v.clone())).collect();
    let mut errors: Vec<String> = Vec::new();
    let mut violated = false;
    let spec_text = substitute(&cfg.family, &names, values, cfg.seed);
    let built = crate::resolve_graph(&spec_text).and_then(|s| s.build().map(|g| (s, g)));
    let (spec, g) = match built {
        Ok(x) => x,
        Err(e) => {
            cells.push(Cell::Text(spec_text));
            let width: usize = 2 + cfg.analyses.iter().map(|a| analysis_columns(a).len()).sum::<usize>();
            cells.extend(std::iter::repeat(Cell::Empty).take(width));
            cells.push(Cell::Text(format!("family: {e}")));
            return Row { cells, violated: false };
        }
    };
    cells.push(Cell::Text(spec.to_string()));
    cells.push(Cell::Int(g.n() as i64));
    cells.push(Cell::Int(g.m() as i64));
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed.wrapping_add(index as u64));

    for a in &cfg.analyses {
        let width = analysis_columns(a).len();
        let result: Result<Vec<Cell>, Error> = match a {
            Analysis::Ratio => spectral::ratio::<f64>(&g).map(|r| {
                vec![
                    real(r.gamma),
                    real(r.log_gamma),
                    real(r.lambda1),
                    real(r.q_max),
                    real(r.q_min),
                    Cell::Int(r.v_max as i64),
                    Cell::Int(r.v_min as i64),
                    real(r.residual),
                ]
            }),
            Analysis::Spectrum => spectral::spectrum_summary::<f64>(&g).map(|s| {
                vec![
                    real(s.lambda1),
                    real(s.lambda2),
                    real(s.additive_gap),
                    real(s.multiplicative_gap),
                    s.algebraic_connectivity.map_or(Cell::Empty, real),
                ]
            }),
            Analysis::LexGap => lex_gap(&spec, &g),
            Analysis::Perturb(c) => {
                let c = match c {
                    CValue::Fixed(c) => Ok(*c),
                    CValue::Param(p) => {
                        let i = names.iter().position(|k| k == p).expect("validated");
                        values[i].parse::<f64>().map_err(|_| Error::Parse(format!("{p}={} is not a number", values[i])))
                    }
                };
                c.and_then(|c| perturb(cfg, &g, c, &mut rng)).map(|(cells, ok)| {
                    violated |= !ok;
                    cells
                })
            }
            Analysis::Check(name) => {
                let opts = CheckOptions { samples: cfg.samples, edge: cfg.edge, edge_op: cfg.sign, c_dist: cfg.c_dist };
                checks::run_check(name, &spec, &g, &opts, &mut rng).map(|rows| {
                    violated |= rows.iter().any(|r| !r.holds);
                    check_cells(name, &rows)
                })
            }
        };
        match result {
            Ok(c) => cells.extend(c),
            Err(e) => {
                violated |= checks::is_fault(&e);
                errors.push(format!("{}: {e}", analysis_label(a)));
                cells.extend(std::iter::repeat(Cell::Empty).take(width));
            }
        }
    }
    cells.push(if errors.is_empty() { Cell::Empty } else { Cell::Text(errors.join(" | ")) });
    Row { cells, violated }
}

fn analysis_label(a: &Analysis) -> String {
    match a {
        Analysis::Ratio => "ratio".into(),
        Analysis::Spectrum => "spectrum".into(),
        Analysis::LexGap => "lex_gap".into(),
        Analysis::Perturb(_) => "perturb".into(),
        Analysis::Check(n) => n.clone(),
    }
}

fn lex_gap(spec: &FamilySpec, g: &Graph) -> Result<Vec<Cell>, Error> {
    let (r, s) = match spec {
        FamilySpec::Lexicographic(h, e) => match (h.as_ref(), e.as_ref()) {
            (FamilySpec::Cycle(r), FamilySpec::EmptyComplementKs(s)) => (*r, *s),
            _ => return Err(Error::InvalidParameters("lex_gap needs lex:cycle:R,empty:S".into())),
        },
        _ => return Err(Error::InvalidParameters("lex_gap needs lex:cycle:R,empty:S".into())),
    };
    let predicted = spectral::predicted_lex_gap::<f64>(r, s)?;
    let measured = spectral::spectrum_summary::<f64>(g)?.additive_gap;
    Ok(vec![real(predicted), real(measured), real((measured - predicted).abs())])
}

fn perturb(cfg: &SweepConfig, g: &Graph, c: f64, rng: &mut ChaCha8Rng) -> Result<(Vec<Cell>, bool), Error> {
    let edge = match cfg.edge {
        Some(e) => e,
        None => {
            let pool: Vec<Edge> = match cfg.sign {
                EdgeSign::Plus => g.non_edges().collect(),
                EdgeSign::Minus => g.edges().filter(|&e| g.is_bridge(e) == Ok(false)).collect(),
            };
            *pool.choose(rng).ok_or_else(|| Error::InvalidParameters("no edge available for the edit".into()))?
        }
    };
    let r = perturbation::certify_ratio::<f64>(g, edge, cfg.sign, c)?;
    let cells = vec![
        real(r.c),
        Cell::Text(edge.to_string()),
        Cell::Text(cfg.sign.to_string()),
        real(r.delta),
        real(r.min_admissible_c),
        real(r.theta),
        real(r.eta),
        real(r.p_norm),
        real(r.p_bound),
        real(r.rho),
        Cell::Int(r.iterations as i64),
        real(r.gamma_observed),
        real(r.gamma_direct),
        real(r.gamma_certificate),
        Cell::Bool(r.certified),
    ];
    Ok((cells, r.certified))
}

/// Worst sample (smallest slack) per sub-check.
fn check_cells(name: &str, rows: &[BoundCheck]) -> Vec<Cell> {
    let mut worst: BTreeMap<&str, &BoundCheck> = BTreeMap::new();
    for r in rows {
        let e = worst.entry(r.name.as_str()).or_insert(r);
        if r.slack < e.slack || (!r.holds && e.holds) {
            *e = r;
        }
    }
    checks::sub_checks(name)
        .iter()
        .flat_map(|s| match worst.get(s) {
            Some(r) => vec![Cell::Bool(r.holds), real(r.lhs), real(r.rhs), real(r.slack)],
            None => vec![Cell::Empty; 4],
        })
        .collect()
}

pub(crate) fn run_sweep(
    config: &Path,
    output: Option<&Path>,
    out: &mut dyn Write,
    err: &mut dyn Write,
) -> Result<i32, Failure> {
    let text = std::fs::read_to_string(config).map_err(|e| usage(format!("cannot read config {}: {e}", config.display())))?;
    let cfg = parse_config(&text)?;
    let columns = cfg.columns();
    let points = cfg.points();
    let rows: Vec<Row> = points.par_iter().enumerate().map(|(i, p)| evaluate(&cfg, i, p)).collect();

    let mut buf: Vec<u8> = Vec::new();
    match cfg.format {
        Format::Csv => {
            let mut w = csv::Writer::from_writer(&mut buf);
            w.write_record(&columns).map_err(csv_err)?;
            for r in &rows {
                w.write_record(r.cells.iter().map(Cell::csv)).map_err(csv_err)?;
            }
            w.flush()?;
        }
        Format::Json => {
            let objs: Vec<serde_json::Map<String, serde_json::Value>> = rows
                .iter()
                .map(|r| columns.iter().cloned().zip(r.cells.iter().map(Cell::json)).collect())
                .collect();
            serde_json::to_writer_pretty(&mut buf, &objs).map_err(|e| Failure::Core("json output".into(), Error::Io(e.to_string())))?;
            buf.push(b'\n');
        }
    }
    let target = output.map(Path::to_path_buf).or_else(|| cfg.output.as_ref().map(Into::into));
    match target {
        Some(path) => {
            std::fs::write(&path, &buf).map_err(|e| Failure::Core(format!("writing {}", path.display()), e.into()))?;
            let _ = writeln!(err, "wrote {} rows to {}", rows.len(), path.display());
        }
        None => out.write_all(&buf)?,
    }
    let failed = rows.iter().filter(|r| r.violated).count();
    if failed > 0 {
        let _ = writeln!(err, "{failed} rows with violated checks");
        return Ok(EXIT_VIOLATION);
    }
    Ok(EXIT_OK)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn ranges_and_lists() {
        assert_eq!(parse_values("r", "10..20:5").ok().unwrap(), ["10", "15", "20"]);
        assert_eq!(parse_values("r", "3..5").ok().unwrap(), ["3", "4", "5"]);
        assert_eq!(parse_values("s", "1, 2,4").ok().unwrap(), ["1", "2", "4"]);
        assert!(parse_values("r", "5..3").is_err());
        assert!(parse_values("r", "1..4:0").is_err());
    }

    #[test]
    fn grid_orders() {
        let cfg = parse_config("family = lex:cycle:{r},empty:{s}\nr = 4,5\ns = 1,2\nanalyses = spectrum\n").ok().unwrap();
        assert_eq!(cfg.points(), vec![vec!["4", "1"], vec!["4", "2"], vec!["5", "1"], vec!["5", "2"]]);
        let cfg = parse_config("family = lex:cycle:{r},empty:{s}\nr = 4,5\ns = 1,2\nzip = true\nanalyses = spectrum\n").ok().unwrap();
        assert_eq!(cfg.points(), vec![vec!["4", "1"], vec!["5", "2"]]);
    }

    #[test]
    fn config_errors() {
        let bad = [
            "r = 1..3\nanalyses = ratio\n",
            "family = cycle:{n}\nn = 5..7\nanalyses =\n",
            "family = cycle:{n}\nn = 5..7\nanalyses = wobble\n",
            "family = cycle:{n}\nanalyses = ratio\n",
            "family = cycle:{n}\nn = 5..7\nq = 1,2\nanalyses = ratio\n",
            "family = cycle:{n}\nn = 5..7\nanalyses = ratio, ratio\n",
            "family = cycle:{n}\nn = 5..7\nanalyses = perturb({c})\n",
        ];
        for text in bad {
            assert!(matches!(parse_config(text), Err(Failure::Usage(_))), "{text}");
        }
    }

    #[test]
    fn columns_are_stable() {
        let cfg = parse_config("family = ring+e:r={r},d=3\nr = 1..2\nanalyses = ratio, removal_poly\n").ok().unwrap();
        let cols = cfg.columns();
        assert_eq!(cols[..4], ["r", "spec", "n", "m"]);
        assert!(cols.contains(&"removal_min_endpoint_holds".to_string()));
        assert_eq!(cols.last().unwrap(), "error");
    }
}
