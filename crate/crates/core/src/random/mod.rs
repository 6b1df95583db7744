//! "Random" objects over finite sample spaces.
//!
//! A sample space is a finite set of labelled outcomes together with a
//! partition into atoms generating the σ-algebra. An assignment from outcomes
//! to values is measurable iff it is constant on every atom. Transforms are
//! applied outcome by outcome; identical inputs are computed once.

mod space;

use std::collections::BTreeMap;

use serde::{Deserialize, Deserializer, Serialize, Serializer};

pub use space::FiniteSampleSpace;

use crate::compact::{hausdorff, image, union, CompactNet};
use crate::error::{Error, Result};
use crate::exec;
use crate::expr::FunctionExpr;
use crate::extremal::siciak;
use crate::hulls::{poly_hull, rational_hull, CandidateGrid, Slack};
use crate::numeric::{DenseFamily, Polynomial, RationalFunction, C64};
use crate::series::{coeff, compact_convergence_check, homogeneous_sum, taylor_table};

/// A value for every outcome of a sample space.
#[derive(Debug, Clone, PartialEq)]
pub struct Random<T> {
    space: FiniteSampleSpace,
    values: Vec<T>,
}

pub type RandomCompactSet = Random<CompactNet>;
pub type RandomFunctionTable = Random<FunctionExpr>;

impl<T> Random<T> {
    pub fn new(space: FiniteSampleSpace, values: Vec<T>) -> Result<Self> {
        if values.len() != space.len() {
            return Err(Error::arg(format!(
                "assignment has {} values for {} outcomes",
                values.len(),
                space.len()
            )));
        }
        Ok(Random { space, values })
    }

    pub fn from_fn(space: FiniteSampleSpace, f: impl FnMut(usize) -> T) -> Self {
        let values = (0..space.len()).map(f).collect();
        Random { space, values }
    }

    pub fn constant(space: FiniteSampleSpace, v: T) -> Self
    where
        T: Clone,
    {
        Random::from_fn(space, |_| v.clone())
    }

    pub fn space(&self) -> &FiniteSampleSpace {
        &self.space
    }

    pub fn values(&self) -> &[T] {
        &self.values
    }

    pub fn get(&self, outcome: usize) -> &T {
        &self.values[outcome]
    }

    pub fn by_label(&self, label: &str) -> Option<&T> {
        self.space.index_of(label).map(|i| &self.values[i])
    }

    /// Atoms on which some value differs from the atom's first value.
    pub fn non_constant_atoms(&self, same: impl Fn(&T, &T) -> bool) -> Vec<usize> {
        self.space
            .atoms()
            .iter()
            .enumerate()
            .filter(|(_, atom)| {
                let first = &self.values[atom[0]];
                atom[1..].iter().any(|&i| !same(first, &self.values[i]))
            })
            .map(|(a, _)| a)
            .collect()
    }

    /// The value on each atom, read at the atom's first outcome.
    pub fn atom_values(&self) -> Vec<&T> {
        self.space
            .atoms()
            .iter()
            .map(|a| &self.values[a[0]])
            .collect()
    }
}

/// JSON form: `{"space": {...}, "values": {"<label>": value, ...}}`.
#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct RandomJson<T> {
    space: FiniteSampleSpace,
    values: BTreeMap<String, T>,
}

impl<T: Serialize + Clone> Serialize for Random<T> {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        let values = self
            .space
            .outcomes()
            .iter()
            .cloned()
            .zip(self.values.iter().cloned())
            .collect();
        RandomJson {
            space: self.space.clone(),
            values,
        }
        .serialize(s)
    }
}

impl<'de, T: Deserialize<'de>> Deserialize<'de> for Random<T> {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        use serde::de::Error as _;
        let mut j = RandomJson::<T>::deserialize(d)?;
        let mut values = Vec::with_capacity(j.space.len());
        for label in j.space.outcomes() {
            let v = j
                .values
                .remove(label)
                .ok_or_else(|| D::Error::custom(format!("values: missing outcome {label:?}")))?;
            values.push(v);
        }
        if let Some(extra) = j.values.keys().next() {
            return Err(D::Error::custom(format!(
                "values: unknown outcome {extra:?}"
            )));
        }
        Ok(Random {
            space: j.space,
            values,
        })
    }
}

/// Equality up to a tolerance, used for measurability checks.
pub trait AtomCompare {
    fn same(&self, other: &Self, tol: f64) -> bool;
}

impl AtomCompare for CompactNet {
    fn same(&self, other: &Self, tol: f64) -> bool {
        self == other || hausdorff(self, other).is_ok_and(|d| d <= tol)
    }
}

impl AtomCompare for FunctionExpr {
    fn same(&self, other: &Self, _tol: f64) -> bool {
        self == other
    }
}

impl AtomCompare for Polynomial {
    fn same(&self, other: &Self, tol: f64) -> bool {
        self == other
            || self
                .sub(other)
                .is_ok_and(|d| d.terms().all(|(_, c)| c.norm() <= tol))
    }
}

impl AtomCompare for f64 {
    fn same(&self, other: &Self, tol: f64) -> bool {
        self == other || (self - other).abs() <= tol
    }
}

impl AtomCompare for C64 {
    fn same(&self, other: &Self, tol: f64) -> bool {
        self == other || (self - other).norm() <= tol
    }
}

impl AtomCompare for usize {
    fn same(&self, other: &Self, _tol: f64) -> bool {
        self == other
    }
}

impl AtomCompare for u32 {
    fn same(&self, other: &Self, _tol: f64) -> bool {
        self == other
    }
}

impl<T: AtomCompare> AtomCompare for Vec<T> {
    fn same(&self, other: &Self, tol: f64) -> bool {
        self.len() == other.len() && self.iter().zip(other).all(|(a, b)| a.same(b, tol))
    }
}

/// Constant on every atom, up to `tol` (Hausdorff distance for nets).
pub fn is_measurable<T: AtomCompare>(x: &Random<T>, tol: f64) -> bool {
    x.non_constant_atoms(|a, b| a.same(b, tol)).is_empty()
}

/// Like [`is_measurable`], but names the offending atoms.
pub fn check_measurable<T: AtomCompare>(x: &Random<T>, tol: f64) -> Result<()> {
    let atoms = x.non_constant_atoms(|a, b| a.same(b, tol));
    if atoms.is_empty() {
        Ok(())
    } else {
        Err(Error::NotMeasurable { atoms })
    }
}

fn same_space(a: &FiniteSampleSpace, b: &FiniteSampleSpace) -> Result<()> {
    if a == b {
        Ok(())
    } else {
        Err(Error::arg("random inputs live on different sample spaces"))
    }
}

/// Evaluate `f` once per class of outcomes with equal keys, in parallel over
/// the classes, and broadcast. Errors carry the outcome label.
fn per_outcome<K, U, F>(space: &FiniteSampleSpace, key: impl Fn(usize) -> K, f: F) -> Result<Vec<U>>
where
    K: PartialEq,
    U: Clone + Send,
    F: Fn(usize) -> Result<U> + Sync + Send,
{
    let keys: Vec<K> = (0..space.len()).map(key).collect();
    let mut reps: Vec<usize> = Vec::new();
    let class: Vec<usize> = (0..keys.len())
        .map(|i| match reps.iter().position(|&r| keys[r] == keys[i]) {
            Some(c) => c,
            None => {
                reps.push(i);
                reps.len() - 1
            }
        })
        .collect();
    let computed = exec::try_map(&reps, |&i| {
        f(i).map_err(|e| Error::Outcome {
            outcome: space.label(i).to_string(),
            source: Box::new(e),
        })
    })?;
    Ok(class.into_iter().map(|c| computed[c].clone()).collect())
}

fn measurable_output<T: AtomCompare>(
    space: &FiniteSampleSpace,
    values: Vec<T>,
) -> Result<Random<T>> {
    let out = Random::new(space.clone(), values)?;
    check_measurable(&out, 0.0)?;
    Ok(out)
}

fn same_dim(k: &RandomCompactSet) -> Result<usize> {
    let d = k.values[0].dim();
    for v in &k.values {
        Error::check_dim(d, v.dim())?;
    }
    Ok(d)
}

/// Pointwise polynomial hull over a grid of resolution `res` around each K(ω).
pub fn random_hull(
    k: &RandomCompactSet,
    family: &DenseFamily,
    res: f64,
    slack: Slack,
) -> Result<RandomCompactSet> {
    check_measurable(k, 0.0)?;
    same_dim(k)?;
    let v = per_outcome(
        &k.space,
        |i| &k.values[i],
        |i| {
            let kw = &k.values[i];
            poly_hull(kw, family, &CandidateGrid::around(kw, res)?, slack)
        },
    )?;
    measurable_output(&k.space, v)
}

/// Pointwise rational hull.
pub fn random_rational_hull(
    k: &RandomCompactSet,
    family: &DenseFamily,
    rationals: &[RationalFunction],
    res: f64,
    slack: Slack,
    tau_sing: f64,
) -> Result<RandomCompactSet> {
    check_measurable(k, 0.0)?;
    same_dim(k)?;
    let v = per_outcome(
        &k.space,
        |i| &k.values[i],
        |i| {
            let kw = &k.values[i];
            let grid = CandidateGrid::around(kw, res)?;
            Ok(rational_hull(kw, family, rationals, &grid, slack, tau_sing)?.hull)
        },
    )?;
    measurable_output(&k.space, v)
}

/// ω ↦ g(ω)(X).
pub fn random_image(x: &CompactNet, g: &RandomFunctionTable) -> Result<RandomCompactSet> {
    check_measurable(g, 0.0)?;
    let v = per_outcome(
        &g.space,
        |i| &g.values[i],
        |i| image(x, std::slice::from_ref(&g.values[i])),
    )?;
    measurable_output(&g.space, v)
}

/// Spectrum of f(ω) in C(K): the range f(ω)(K).
pub fn spectrum(f: &RandomFunctionTable, k: &CompactNet) -> Result<RandomCompactSet> {
    random_image(k, f)
}

/// Which function algebra the joint spectrum is taken in.
#[derive(Debug, Clone, Copy)]
pub enum Algebra<'a> {
    /// C(K): maximal ideal space K.
    Continuous,
    /// P(K): maximal ideal space the polynomial hull, approximated on a grid.
    Polynomial {
        family: &'a DenseFamily,
        res: f64,
        slack: Slack,
    },
}

/// ω ↦ (f_1(ω), …, f_q(ω)) applied to the maximal ideal space of the algebra.
pub fn joint_spectrum(
    fs: &[RandomFunctionTable],
    k: &CompactNet,
    algebra: Algebra<'_>,
) -> Result<RandomCompactSet> {
    let first = fs
        .first()
        .ok_or_else(|| Error::arg("joint spectrum needs at least one function"))?;
    for f in fs {
        same_space(&first.space, &f.space)?;
        check_measurable(f, 0.0)?;
    }
    let base = match algebra {
        Algebra::Continuous => k.clone(),
        Algebra::Polynomial { family, res, slack } => {
            if fs
                .iter()
                .flat_map(|f| &f.values)
                .any(|e| e.to_polynomial().is_none())
            {
                return Err(Error::arg("P(K) joint spectrum needs polynomial functions"));
            }
            poly_hull(k, family, &CandidateGrid::around(k, res)?, slack)?
        }
    };
    let space = &first.space;
    let v = per_outcome(
        space,
        |i| fs.iter().map(|f| &f.values[i]).collect::<Vec<_>>(),
        |i| {
            let comps: Vec<FunctionExpr> = fs.iter().map(|f| f.values[i].clone()).collect();
            image(&base, &comps)
        },
    )?;
    measurable_output(space, v)
}

/// Pointwise Siciak estimate at z.
pub fn random_siciak(
    k: &RandomCompactSet,
    z: &[C64],
    family: &DenseFamily,
    normalize: bool,
) -> Result<Random<f64>> {
    check_measurable(k, 0.0)?;
    let v = per_outcome(
        &k.space,
        |i| &k.values[i],
        |i| siciak(&k.values[i], z, family, normalize).map(|e| e.value),
    )?;
    measurable_output(&k.space, v)
}

/// Pointwise union of two random compacts on the same space.
pub fn random_union(a: &RandomCompactSet, b: &RandomCompactSet) -> Result<RandomCompactSet> {
    same_space(&a.space, &b.space)?;
    check_measurable(a, 0.0)?;
    check_measurable(b, 0.0)?;
    let v = per_outcome(
        &a.space,
        |i| (&a.values[i], &b.values[i]),
        |i| union(&a.values[i], &b.values[i]),
    )?;
    Random::new(a.space.clone(), v)
}

/// Coefficient c_ν of f(ω) for every outcome.
pub fn random_coeff(
    f: &RandomFunctionTable,
    nu: &[i32],
    radii: &[f64],
    m: usize,
) -> Result<Random<C64>> {
    check_measurable(f, 0.0)?;
    let v = per_outcome(
        &f.space,
        |i| &f.values[i],
        |i| coeff(&f.values[i], nu, radii, m),
    )?;
    Random::new(f.space.clone(), v)
}

/// All pairs (ω, z) with z a net point of K(ω), outcomes in order.
pub fn graph(k: &RandomCompactSet) -> Vec<(usize, Vec<C64>)> {
    k.values
        .iter()
        .enumerate()
        .flat_map(|(i, net)| net.points().map(move |p| (i, p.to_vec())))
        .collect()
}

/// Outcomes whose net has a point within h/2 of z.
pub fn preimage(k: &RandomCompactSet, z: &[C64]) -> Vec<usize> {
    (0..k.values.len())
        .filter(|&i| {
            let net = &k.values[i];
            net.dim() == z.len() && net.distance_to(z) <= net.mesh() / 2.0
        })
        .collect()
}

/// One point list serving as a net for every K(ω): the union of the
/// distinct values.
pub fn uniform_net(k: &RandomCompactSet) -> Result<CompactNet> {
    let mut distinct: Vec<&CompactNet> = Vec::new();
    for v in &k.values {
        if !distinct.contains(&v) {
            distinct.push(v);
        }
    }
    let d = same_dim(k)?;
    let mesh = distinct.iter().map(|n| n.mesh()).fold(0.0, f64::max);
    let coords = distinct
        .iter()
        .flat_map(|n| n.coords().iter().copied())
        .collect();
    CompactNet::new(d, coords, mesh)
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SelectionResult {
    /// Selected sequence index per outcome.
    pub phi: Vec<usize>,
    /// Selected index per atom.
    pub atom_index: Vec<usize>,
    /// max over the graph of |f_target − f_φ(ω)|.
    pub error: f64,
    /// Same maximum restricted to each atom.
    pub atom_errors: Vec<f64>,
}

/// Min-index measurable selection.
///
/// For each outcome, N(ω) is the set of indices j such that every available
/// f_k with k ≥ j is within ε of the target on K(ω). Each atom takes the
/// largest of the minima of its outcomes (inputs must be measurable, so
/// these coincide), so the selection is constant on atoms and ε-accurate
/// everywhere.
pub fn select_uniform(
    k: &RandomCompactSet,
    seq: &[RandomFunctionTable],
    target: &RandomFunctionTable,
    eps: f64,
) -> Result<SelectionResult> {
    if eps.is_nan() || eps <= 0.0 {
        return Err(Error::arg("target error must be positive"));
    }
    if seq.is_empty() {
        return Err(Error::arg("empty function sequence"));
    }
    same_space(&k.space, &target.space)?;
    check_measurable(k, 0.0)?;
    check_measurable(target, 0.0)?;
    for f in seq {
        same_space(&k.space, &f.space)?;
        check_measurable(f, 0.0)?;
    }
    let space = &k.space;
    // errs[ω][j] = sup_{K(ω)} |target − f_j|
    let errs: Vec<Vec<f64>> = per_outcome(
        space,
        |i| {
            (
                &k.values[i],
                &target.values[i],
                seq.iter().map(|f| &f.values[i]).collect::<Vec<_>>(),
            )
        },
        |i| {
            let net = &k.values[i];
            let pts: Vec<&[C64]> = net.points().collect();
            let t = exec::try_map(&pts, |p| target.values[i].eval(p))?;
            seq.iter()
                .map(|f| {
                    let mut worst = 0.0f64;
                    for (p, tv) in pts.iter().zip(&t) {
                        worst = worst.max((tv - f.values[i].eval(p)?).norm());
                    }
                    Ok(worst)
                })
                .collect()
        },
    )?;
    // smallest j whose whole tail is within ε
    let min_index: Vec<Option<usize>> = errs
        .iter()
        .map(|e| {
            let mut j = e.len();
            while j > 0 && e[j - 1] <= eps {
                j -= 1;
            }
            (j < e.len()).then_some(j)
        })
        .collect();
    let mut failed = Vec::new();
    let mut atom_index = Vec::new();
    for (a, atom) in space.atoms().iter().enumerate() {
        match atom
            .iter()
            .map(|&i| min_index[i])
            .collect::<Option<Vec<usize>>>()
        {
            Some(m) => atom_index.push(m.into_iter().max().expect("atoms are nonempty")),
            None => {
                failed.push(a);
                atom_index.push(0);
            }
        }
    }
    if !failed.is_empty() {
        let best: Vec<String> = failed
            .iter()
            .map(|&a| {
                let b = space.atoms()[a]
                    .iter()
                    .map(|&i| *errs[i].last().expect("nonempty sequence"))
                    .fold(0.0, f64::max);
                format!("atom {a}: last error {b:e}")
            })
            .collect();
        return Err(Error::Selection {
            atoms: failed,
            message: format!(
                "no index reaches {eps:e} within the sequence ({})",
                best.join("; ")
            ),
        });
    }
    let phi: Vec<usize> = (0..space.len())
        .map(|i| atom_index[space.atom_of(i)])
        .collect();
    let atom_errors: Vec<f64> = space
        .atoms()
        .iter()
        .zip(&atom_index)
        .map(|(atom, &j)| atom.iter().map(|&i| errs[i][j]).fold(0.0, f64::max))
        .collect();
    let error = atom_errors.iter().copied().fold(0.0, f64::max);
    Ok(SelectionResult {
        phi,
        atom_index,
        error,
        atom_errors,
    })
}

#[derive(Debug, Clone, PartialEq)]
pub struct OkaWeilResult {
    pub polynomials: Random<Polynomial>,
    pub degrees: Random<u32>,
    /// sup over K(ω) of |f(ω) − p(ω)|.
    pub errors: Random<f64>,
}

/// Per outcome, the first Taylor partial sum of f(ω) (coefficients from the
/// torus of radii r(ω)) within ε(ω) of f(ω) on K(ω), of degree ≤ `budget`.
///
/// Every atom must succeed: atoms whose budget runs out, or whose torus
/// meets a singularity, are reported together with their best errors.
pub fn oka_weil_select(
    k: &RandomCompactSet,
    f: &RandomFunctionTable,
    eps: &Random<f64>,
    radii: &Random<Vec<f64>>,
    budget: u32,
    nodes: usize,
) -> Result<OkaWeilResult> {
    let space = &k.space;
    same_space(space, &f.space)?;
    same_space(space, &eps.space)?;
    same_space(space, &radii.space)?;
    check_measurable(k, 0.0)?;
    check_measurable(f, 0.0)?;
    check_measurable(eps, 0.0)?;
    check_measurable(radii, 0.0)?;
    if eps.values.iter().any(|e| e.is_nan() || *e <= 0.0) {
        return Err(Error::arg("per-outcome targets must be positive"));
    }
    let nodes = nodes.max(2 * budget as usize + 2);
    // Ok(Err(best)) marks an atom-level failure; Err aborts the run
    type Attempt = std::result::Result<(Polynomial, u32, f64), f64>;
    let attempts: Vec<Attempt> = per_outcome(
        space,
        |i| (&k.values[i], &f.values[i], eps.values[i], &radii.values[i]),
        |i| {
            let (kw, fw, r) = (&k.values[i], &f.values[i], &radii.values[i]);
            let table = match taylor_table(fw, budget, r, nodes) {
                Ok(t) => t,
                Err(Error::PoleProximity { .. } | Error::Domain(_)) => {
                    return Ok(Err(f64::INFINITY))
                }
                Err(e) => return Err(e),
            };
            match compact_convergence_check(fw, &table, kw, eps.values[i]) {
                Ok(m) => {
                    let p = homogeneous_sum(&table, m)?;
                    let err = crate::compact::max_abs_on(kw, &Difference(fw, &p))?;
                    Ok(Ok((p, m, err)))
                }
                Err(Error::Convergence { best_error, .. }) => Ok(Err(best_error)),
                Err(Error::PoleProximity { .. } | Error::Domain(_)) => Ok(Err(f64::INFINITY)),
                Err(e) => Err(e),
            }
        },
    )?;
    let mut failed: BTreeMap<usize, f64> = BTreeMap::new();
    for (i, a) in attempts.iter().enumerate() {
        if let Err(best) = a {
            let slot = failed.entry(space.atom_of(i)).or_insert(0.0);
            *slot = slot.max(*best);
        }
    }
    if !failed.is_empty() {
        let detail: Vec<String> = failed
            .iter()
            .map(|(a, b)| format!("atom {a}: best error {b:e}"))
            .collect();
        return Err(Error::Selection {
            atoms: failed.keys().copied().collect(),
            message: format!("degree budget {budget} exhausted ({})", detail.join("; ")),
        });
    }
    let ok: Vec<(Polynomial, u32, f64)> = attempts
        .into_iter()
        .map(|a| a.expect("failures handled"))
        .collect();
    let polynomials = measurable_output(space, ok.iter().map(|t| t.0.clone()).collect())?;
    let degrees = measurable_output(space, ok.iter().map(|t| t.1).collect())?;
    let errors = measurable_output(space, ok.iter().map(|t| t.2).collect())?;
    Ok(OkaWeilResult {
        polynomials,
        degrees,
        errors,
    })
}

/// f − p as a map, for sup-norm errors.
struct Difference<'a>(&'a FunctionExpr, &'a Polynomial);

impl crate::numeric::ComplexMap for Difference<'_> {
    fn dim(&self) -> usize {
        self.0.dim()
    }

    fn eval(&self, z: &[C64]) -> Result<C64> {
        Ok(self.0.eval(z)? - self.1.eval(z)?)
    }
}
