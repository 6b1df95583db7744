use std::path::PathBuf;

use capprox::contour::{build_contour, partition, Neighborhood, QuadratureRule};
use capprox::extremal::{
    chebyshev_family, green as green_fn, monomial_family, siciak as siciak_fn, GreenValue,
};
use capprox::hulls::{hull_defect, poly_hull, rational_hull, CandidateGrid, Slack};
use capprox::numeric::{DenseFamily, FamilySpec, RationalFunction};
use capprox::random::{
    check_measurable, is_measurable, oka_weil_select, random_hull, random_siciak, select_uniform,
    uniform_net, FiniteSampleSpace, Random, RandomCompactSet, RandomFunctionTable,
};
use capprox::runge::{approximate, RungeOptions};
use capprox::series::{laurent_table, taylor_table};
use capprox::{c64, hausdorff as hausdorff_fn, image as image_fn, CompactNet, FunctionExpr, Shape};
use serde::{Deserialize, Serialize};
use serde_json::{json, Value};

use crate::io::{load, parse_point, save, CliError, CliResult};
use crate::{
    ContourArgs, ExtremalArgs, FamilyArgs, HausdorffArgs, HullArgs, ImageArgs, LaurentArgs,
    OkaWeilArgs, RandomDemoArgs, Report, RhullArgs, Rule, RungeArgs, SelectArgs, ShapeArgs,
    TaylorArgs,
};

const NET_CAVEAT: &str =
    "maxima are taken over the net, which may underestimate the sup over the compact by up to L·h";

fn report(outputs: Value) -> CliResult<Report> {
    Ok(Report {
        outputs,
        warnings: Vec::new(),
    })
}

/// Save `value` to `out` and record the path, or inline it under `key`.
fn emit<T: Serialize>(key: &str, value: &T, out: &Option<PathBuf>) -> CliResult<Value> {
    match out {
        Some(p) => {
            save(p, value)?;
            Ok(json!({ "path": p.display().to_string() }))
        }
        None => Ok(json!({ key: value })),
    }
}

fn merge(mut a: Value, b: Value) -> Value {
    if let (Some(a), Value::Object(b)) = (a.as_object_mut(), b) {
        a.extend(b);
    }
    a
}

fn expr(src: &str, dim: usize) -> CliResult<FunctionExpr> {
    Ok(FunctionExpr::parse(src, dim)?)
}

pub fn shape(a: &ShapeArgs) -> CliResult<Report> {
    let s: Shape = load(&a.shape)?;
    let net = CompactNet::from_shape(&s, a.h)?;
    let head = json!({ "points": net.len(), "dim": net.dim(), "mesh": net.mesh() });
    report(merge(head, emit("net", &net, &a.out.out)?))
}

pub fn hausdorff(a: &HausdorffArgs) -> CliResult<Report> {
    let x: CompactNet = load(&a.a)?;
    let y: CompactNet = load(&a.b)?;
    report(json!({ "distance": hausdorff_fn(&x, &y)? }))
}

pub fn image(a: &ImageArgs) -> CliResult<Report> {
    let k: CompactNet = load(&a.k)?;
    let g =
        a.f.iter()
            .map(|s| expr(s, k.dim()))
            .collect::<CliResult<Vec<_>>>()?;
    let net = image_fn(&k, &g)?;
    let head = json!({ "points": net.len(), "dim": net.dim(), "mesh": net.mesh() });
    Ok(Report {
        outputs: merge(head, emit("net", &net, &a.out.out)?),
        warnings: vec!["mesh is a Lipschitz estimate times the input mesh".into()],
    })
}

pub fn contour(a: &ContourArgs) -> CliResult<Report> {
    let k: CompactNet = load(&a.k)?;
    let nbhd = match a.margin {
        Some(m) => Neighborhood::Margin(m),
        None => Neighborhood::Forbidden(
            a.forbidden
                .iter()
                .map(|s| parse_point(s).and_then(|p| one_coord(&p)))
                .collect::<CliResult<Vec<_>>>()?,
        ),
    };
    let c = build_contour(&k, &nbhd, a.cell)?;
    let mut head = json!({
        "cycles": c.cycles().len(),
        "vertices": c.vertex_count(),
        "length": c.length(),
        "clearance": c.clearance(),
    });
    if let Some(d) = a.delta {
        let p = partition(&c, d)?;
        head["partition"] = json!({ "delta": d, "pieces": p.len() });
    }
    report(merge(head, emit("contour", &c, &a.out.out)?))
}

fn one_coord(p: &[capprox::C64]) -> CliResult<capprox::C64> {
    match p {
        [z] => Ok(*z),
        _ => Err(CliError::Usage(
            "expected a single complex coordinate".into(),
        )),
    }
}

pub fn runge(a: &RungeArgs) -> CliResult<Report> {
    let k: CompactNet = load(&a.k)?;
    let f = expr(&a.f, 1)?;
    let opts = RungeOptions {
        cell: a.cell,
        max_halvings: a.max_halvings,
        rule: match a.rule {
            Rule::Trapezoid => QuadratureRule::Trapezoid,
            Rule::TerminalPoint => QuadratureRule::TerminalPoint,
        },
        max_nodes: a.max_nodes,
    };
    let r = approximate(&f, &k, a.margin, a.eps, &opts)?;
    let pole_distance = k
        .points()
        .map(|p| r.rational.pole_distance(p[0]))
        .fold(f64::INFINITY, f64::min);
    let head = json!({
        "achieved_error": r.error,
        "delta": r.delta,
        "refinements": r.history.len(),
        "history": r.history,
        "poles": r.rational.len(),
        "min_pole_distance": pole_distance,
        "clearance": r.contour.clearance(),
    });
    Ok(Report {
        outputs: merge(head, emit("rational", &r.rational, &a.out.out)?),
        warnings: vec!["achieved_error is measured on the net only".into()],
    })
}

pub fn taylor(a: &TaylorArgs) -> CliResult<Report> {
    let f = expr(&a.f, a.radii.len())?;
    let t = taylor_table(&f, a.degree, &a.radii, a.nodes)?;
    report(merge(
        json!({ "entries": t.len() }),
        emit("table", &t, &a.out.out)?,
    ))
}

pub fn laurent(a: &LaurentArgs) -> CliResult<Report> {
    let f = expr(&a.f, a.radii.len())?;
    let t = laurent_table(&f, a.order, &a.radii, a.nodes)?;
    report(merge(
        json!({ "entries": t.len() }),
        emit("table", &t, &a.out.out)?,
    ))
}

fn family_from(
    dim: usize,
    deg: u32,
    height: u32,
    cap: usize,
    truncate: bool,
) -> CliResult<DenseFamily> {
    Ok(DenseFamily::from_spec(
        &FamilySpec::new(dim, deg, height).with_cap(cap, truncate),
    )?)
}

fn hull_family(k: &CompactNet, f: &FamilyArgs) -> CliResult<DenseFamily> {
    family_from(k.dim(), f.deg, f.height, f.cap, f.truncate)
}

fn slack(a: &HullArgs) -> Slack {
    if a.net_compensated {
        Slack::NetCompensated(a.slack)
    } else {
        Slack::Fixed(a.slack)
    }
}

fn hull_warnings(a: &HullArgs, fam: &DenseFamily) -> Vec<String> {
    let mut w = Vec::new();
    if !a.net_compensated {
        w.push(NET_CAVEAT.to_string());
    }
    if fam.truncated() > 0 {
        w.push(format!(
            "family truncated: {} members dropped",
            fam.truncated()
        ));
    }
    w
}

pub fn hull(a: &HullArgs) -> CliResult<Report> {
    let k: CompactNet = load(&a.k)?;
    let fam = hull_family(&k, &a.family)?;
    let grid = CandidateGrid::around(&k, a.res)?;
    let h = poly_hull(&k, &fam, &grid, slack(a))?;
    let head = json!({
        "points": h.len(),
        "mesh": h.mesh(),
        "family_size": fam.len(),
        "defect": hull_defect(&k, &h)?,
    });
    Ok(Report {
        outputs: merge(head, emit("net", &h, &a.out.out)?),
        warnings: hull_warnings(a, &fam),
    })
}

pub fn rhull(a: &RhullArgs) -> CliResult<Report> {
    let k: CompactNet = load(&a.hull.k)?;
    let fam = hull_family(&k, &a.hull.family)?;
    let rats =
        a.r.iter()
            .map(|s| {
                expr(s, k.dim())?
                    .to_rational()
                    .ok_or_else(|| CliError::Usage(format!("{s:?} is not a rational function")))
            })
            .collect::<CliResult<Vec<RationalFunction>>>()?;
    let grid = CandidateGrid::around(&k, a.hull.res)?;
    let r = rational_hull(&k, &fam, &rats, &grid, slack(&a.hull), a.tau_sing)?;
    let head = json!({
        "points": r.hull.len(),
        "mesh": r.hull.mesh(),
        "family_size": fam.len(),
        "skipped": r.skipped,
        "defect": hull_defect(&k, &r.hull)?,
    });
    Ok(Report {
        outputs: merge(head, emit("net", &r.hull, &a.hull.out.out)?),
        warnings: hull_warnings(&a.hull, &fam),
    })
}

fn extremal_family(a: &ExtremalArgs, dim: usize) -> CliResult<DenseFamily> {
    let one_var = |polys: Vec<capprox::Polynomial>| {
        if dim != 1 {
            return Err(CliError::Usage("built-in families are one-variable".into()));
        }
        Ok(DenseFamily::from_polynomials(1, &polys)?)
    };
    match (a.chebyshev, a.monomials, a.deg, a.height) {
        (Some(n), _, _, _) => one_var(chebyshev_family(n)),
        (_, Some(n), _, _) => one_var(monomial_family(n)),
        (_, _, Some(d), Some(h)) => family_from(dim, d, h, a.cap, a.truncate),
        _ => Err(CliError::Usage(
            "choose a family: --chebyshev N, --monomials N or --deg D --height H".into(),
        )),
    }
}

fn estimate_json(e: &capprox::extremal::ExtremalEstimate) -> Value {
    json!({
        "estimate": if e.value.is_finite() { json!(e.value) } else { Value::Null },
        "infinite": e.value.is_infinite(),
        "witness_index": e.witness_index,
        "witness": e.witness,
        "family_size": e.family_size,
        "normalized": e.normalized,
    })
}

pub fn siciak(a: &ExtremalArgs) -> CliResult<Report> {
    let k: CompactNet = load(&a.k)?;
    let z = parse_point(&a.z)?;
    let fam = extremal_family(a, k.dim())?;
    let e = siciak_fn(&k, &z, &fam, !a.raw)?;
    Ok(Report {
        outputs: estimate_json(&e),
        warnings: vec![format!("lower estimate; {NET_CAVEAT}")],
    })
}

pub fn green(a: &ExtremalArgs) -> CliResult<Report> {
    let k: CompactNet = load(&a.k)?;
    let z = parse_point(&a.z)?;
    let fam = extremal_family(a, k.dim())?;
    let (v, e) = green_fn(&k, &z, &fam, !a.raw)?;
    let mut out = estimate_json(&e);
    out["green"] = match v {
        GreenValue::Finite(x) => json!(x),
        GreenValue::Infinite => Value::Null,
    };
    Ok(Report {
        outputs: out,
        warnings: vec![format!("log of a lower estimate; {NET_CAVEAT}")],
    })
}

fn demo_compact() -> CliResult<RandomCompactSet> {
    let space = FiniteSampleSpace::from_partition(&[0, 0, 1, 1, 1])?;
    let circle = CompactNet::from_shape(
        &Shape::Circle {
            center: c64(0.0, 0.0),
            radius: 1.0,
        },
        0.02,
    )?;
    let disk = CompactNet::from_shape(
        &Shape::Disk {
            center: c64(0.0, 0.0),
            radius: 0.5,
        },
        0.05,
    )?;
    Ok(Random::from_fn(space, |i| {
        if i < 2 {
            circle.clone()
        } else {
            disk.clone()
        }
    }))
}

pub fn random_demo(a: &RandomDemoArgs) -> CliResult<Report> {
    let k = match &a.k {
        Some(s) => load::<RandomCompactSet>(s)?,
        None => demo_compact()?,
    };
    check_measurable(&k, 0.0)?;
    let dim = k.get(0).dim();
    let fam = family_from(dim, a.deg, a.height, 250_000, false)?;
    let hull = random_hull(&k, &fam, a.res, Slack::default())?;
    let space = k.space();
    let per_atom = space
        .atoms()
        .iter()
        .enumerate()
        .map(|(idx, atom)| {
            let i = atom[0];
            Ok(json!({
                "atom": idx,
                "outcomes": atom.iter().map(|&j| space.label(j)).collect::<Vec<_>>(),
                "compact_points": k.get(i).len(),
                "hull_points": hull.get(i).len(),
                "hull_defect": hull_defect(k.get(i), hull.get(i))?,
            }))
        })
        .collect::<CliResult<Vec<Value>>>()?;
    let mut out = json!({
        "outcomes": space.len(),
        "atoms": space.atoms().len(),
        "input_measurable": true,
        "hull_measurable": is_measurable(&hull, 0.0),
        "uniform_net_points": uniform_net(&k)?.len(),
        "per_atom": per_atom,
    });
    if let Some(z) = &a.z {
        let z = parse_point(z)?;
        let v = random_siciak(&k, &z, &fam, true)?;
        out["siciak"] = json!(v
            .atom_values()
            .iter()
            .map(|x| if x.is_finite() { json!(x) } else { Value::Null })
            .collect::<Vec<_>>());
        out["siciak_measurable"] = json!(is_measurable(&v, 0.0));
    }
    Ok(Report {
        outputs: out,
        warnings: vec![NET_CAVEAT.to_string()],
    })
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct SelectInput {
    k: RandomCompactSet,
    target: Random<String>,
    sequence: Vec<Random<String>>,
}

fn parse_table(t: &Random<String>, dim: usize) -> CliResult<RandomFunctionTable> {
    let values = t
        .values()
        .iter()
        .map(|s| expr(s, dim))
        .collect::<CliResult<Vec<_>>>()?;
    Ok(Random::new(t.space().clone(), values)?)
}

/// 1 + z + … + z^n/n! as an expression.
fn exp_partial_sum(n: u32) -> CliResult<FunctionExpr> {
    let mut s = String::from("1");
    let mut fact = 1.0f64;
    for k in 1..=n {
        fact *= k as f64;
        s.push_str(&format!(" + z^{k}/{fact}"));
    }
    expr(&s, 1)
}

/// Outcomes are assigned to atoms round-robin; atom j shifts the Taylor
/// index by j mod 5.
fn battery(
    a: &SelectArgs,
) -> CliResult<(
    RandomCompactSet,
    Vec<RandomFunctionTable>,
    RandomFunctionTable,
)> {
    if a.atoms == 0 || a.outcomes < a.atoms {
        return Err(CliError::Usage("need at least one outcome per atom".into()));
    }
    let ids: Vec<usize> = (0..a.outcomes).map(|i| i % a.atoms).collect();
    let space = FiniteSampleSpace::from_partition(&ids)?;
    let disk = CompactNet::from_shape(
        &Shape::Disk {
            center: c64(0.0, 0.0),
            radius: 1.0,
        },
        0.05,
    )?;
    let k = Random::constant(space.clone(), disk);
    let target = Random::constant(space.clone(), expr("exp(z)", 1)?);
    let sums: Vec<FunctionExpr> = (0..a.length + 5)
        .map(exp_partial_sum)
        .collect::<CliResult<_>>()?;
    let seq = (0..a.length as usize)
        .map(|j| Random::from_fn(space.clone(), |i| sums[j + space.atom_of(i) % 5].clone()))
        .collect();
    Ok((k, seq, target))
}

pub fn select(a: &SelectArgs) -> CliResult<Report> {
    let (k, seq, target) = match &a.input {
        Some(src) => {
            let inp: SelectInput = load(src)?;
            let dim = inp.k.get(0).dim();
            let seq = inp
                .sequence
                .iter()
                .map(|t| parse_table(t, dim))
                .collect::<CliResult<Vec<_>>>()?;
            (inp.k, seq, parse_table(&inp.target, dim)?)
        }
        None => battery(a)?,
    };
    let r = select_uniform(&k, &seq, &target, a.eps)?;
    let phi: serde_json::Map<String, Value> = k
        .space()
        .outcomes()
        .iter()
        .zip(&r.phi)
        .map(|(l, j)| (l.clone(), json!(j)))
        .collect();
    Ok(Report {
        outputs: json!({
            "error": r.error,
            "atom_index": r.atom_index,
            "atom_errors": r.atom_errors,
            "phi": phi,
        }),
        warnings: vec!["errors are measured on the nets of K(ω)".into()],
    })
}

pub fn okaweil(a: &OkaWeilArgs) -> CliResult<Report> {
    let k: RandomCompactSet = load(&a.k)?;
    let dim = k.get(0).dim();
    let space = k.space().clone();
    let f = if a.f.trim_start().starts_with('{') || a.f.ends_with(".json") {
        parse_table(&load::<Random<String>>(&a.f)?, dim)?
    } else {
        Random::constant(space.clone(), expr(&a.f, dim)?)
    };
    let eps = Random::constant(space.clone(), a.eps);
    let radii = Random::constant(space.clone(), a.radii.clone());
    let r = oka_weil_select(&k, &f, &eps, &radii, a.budget, a.nodes)?;
    let per_atom: Vec<Value> = space
        .atoms()
        .iter()
        .enumerate()
        .map(|(idx, atom)| {
            let i = atom[0];
            json!({
                "atom": idx,
                "degree": r.degrees.get(i),
                "error": r.errors.get(i),
                "polynomial": r.polynomials.get(i),
            })
        })
        .collect();
    Ok(Report {
        outputs: json!({ "atoms": per_atom, "exceptional_outcomes": [] }),
        warnings: vec!["errors are measured on the nets of K(ω)".into()],
    })
}
