//! Complex function expressions supplied as strings: `z^2+1`,
//! `exp(z1)*z2`, `1/(z-2)`. See [`parser`] for the grammar.

mod parser;

use std::fmt;

use crate::error::{Error, Result};
use crate::numeric::{
    ensure_finite, BoxRegion, ComplexMap, MultiIndex, Polynomial, RationalFunction, C64,
    DEFAULT_TAU_POLE,
};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BinOp {
    Add,
    Sub,
    Mul,
    Div,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Func {
    Exp,
    Sin,
    Cos,
    Log,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Constant {
    Pi,
    E,
}

#[derive(Debug, Clone, PartialEq)]
pub enum Expr {
    Num(C64),
    /// 0-based coordinate index.
    Var(usize),
    Const(Constant),
    Neg(Box<Expr>),
    Bin(BinOp, Box<Expr>, Box<Expr>),
    Pow(Box<Expr>, i32),
    Call(Func, Box<Expr>),
}

/// A parsed expression in `dim` complex variables.
#[derive(Debug, Clone, PartialEq)]
pub struct FunctionExpr {
    dim: usize,
    root: Expr,
    holomorphy_asserted: bool,
}

impl FunctionExpr {
    pub fn parse(src: &str, dim: usize) -> Result<Self> {
        if dim == 0 {
            return Err(Error::arg("expression dimension must be >= 1"));
        }
        Ok(FunctionExpr {
            dim,
            root: parser::parse_expr(src, dim)?,
            holomorphy_asserted: false,
        })
    }

    pub fn from_ast(dim: usize, root: Expr) -> Result<Self> {
        if dim == 0 {
            return Err(Error::arg("expression dimension must be >= 1"));
        }
        if let Some(k) = max_var(&root) {
            if k >= dim {
                return Err(Error::arg(format!(
                    "variable index {k} out of range for dimension {dim}"
                )));
            }
        }
        Ok(FunctionExpr {
            dim,
            root,
            holomorphy_asserted: false,
        })
    }

    pub fn identity() -> Self {
        FunctionExpr {
            dim: 1,
            root: Expr::Var(0),
            holomorphy_asserted: false,
        }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn ast(&self) -> &Expr {
        &self.root
    }

    /// Caller vouches that the expression is holomorphic on the domain of
    /// interest despite containing `log`.
    pub fn assert_holomorphic(mut self) -> Self {
        self.holomorphy_asserted = true;
        self
    }

    pub fn contains_log(&self) -> bool {
        fn walk(e: &Expr) -> bool {
            match e {
                Expr::Call(Func::Log, _) => true,
                Expr::Call(_, a) | Expr::Neg(a) | Expr::Pow(a, _) => walk(a),
                Expr::Bin(_, a, b) => walk(a) || walk(b),
                _ => false,
            }
        }
        walk(&self.root)
    }

    pub fn eval(&self, z: &[C64]) -> Result<C64> {
        Error::check_dim(self.dim, z.len())?;
        let v = eval_node(&self.root, z)?;
        ensure_finite(v, z)
    }

    /// Same expression with every z_j replaced by (M w)_j.
    pub fn compose_linear(&self, m: &[Vec<C64>]) -> Result<FunctionExpr> {
        if m.len() != self.dim || m.iter().any(|row| row.len() != self.dim) {
            return Err(Error::arg("linear map must be dim x dim"));
        }
        fn subst(e: &Expr, m: &[Vec<C64>]) -> Expr {
            match e {
                Expr::Var(j) => m[*j]
                    .iter()
                    .enumerate()
                    .map(|(k, c)| {
                        Expr::Bin(BinOp::Mul, Box::new(Expr::Num(*c)), Box::new(Expr::Var(k)))
                    })
                    .reduce(|a, b| Expr::Bin(BinOp::Add, Box::new(a), Box::new(b)))
                    .expect("dim >= 1"),
                Expr::Num(_) | Expr::Const(_) => e.clone(),
                Expr::Neg(a) => Expr::Neg(Box::new(subst(a, m))),
                Expr::Bin(op, a, b) => Expr::Bin(*op, Box::new(subst(a, m)), Box::new(subst(b, m))),
                Expr::Pow(a, k) => Expr::Pow(Box::new(subst(a, m)), *k),
                Expr::Call(f, a) => Expr::Call(*f, Box::new(subst(a, m))),
            }
        }
        Ok(FunctionExpr {
            dim: self.dim,
            root: subst(&self.root, m),
            holomorphy_asserted: self.holomorphy_asserted,
        })
    }

    /// Expand into numerator/denominator polynomials when the expression uses
    /// only arithmetic; `None` if it calls a transcendental function.
    pub fn to_rational(&self) -> Option<RationalFunction> {
        let (num, den) = to_fraction(&self.root, self.dim)?;
        RationalFunction::new(num, den).ok()
    }

    /// Expand into a polynomial when the expression is one (constant
    /// denominator after expansion).
    pub fn to_polynomial(&self) -> Option<Polynomial> {
        let r = self.to_rational()?;
        let den = r.denominator();
        if den.degree() != 0 {
            return None;
        }
        let c = den.coeff(&MultiIndex::zero(self.dim));
        Some(r.numerator().scale(C64::new(1.0, 0.0) / c))
    }
}

impl ComplexMap for FunctionExpr {
    fn dim(&self) -> usize {
        self.dim
    }
    fn eval(&self, z: &[C64]) -> Result<C64> {
        FunctionExpr::eval(self, z)
    }
    fn check_holomorphic(&self) -> Result<()> {
        if self.contains_log() && !self.holomorphy_asserted {
            Err(Error::arg(
                "expression contains log (branch cut); assert holomorphy on the domain to use it here",
            ))
        } else {
            Ok(())
        }
    }
}

fn max_var(e: &Expr) -> Option<usize> {
    match e {
        Expr::Var(j) => Some(*j),
        Expr::Num(_) | Expr::Const(_) => None,
        Expr::Neg(a) | Expr::Pow(a, _) | Expr::Call(_, a) => max_var(a),
        Expr::Bin(_, a, b) => max_var(a).max(max_var(b)),
    }
}

fn pole(z: &[C64], modulus: f64) -> Error {
    Error::PoleProximity {
        point: z.to_vec(),
        modulus,
    }
}

fn eval_node(e: &Expr, z: &[C64]) -> Result<C64> {
    Ok(match e {
        Expr::Num(c) => *c,
        Expr::Var(j) => z[*j],
        Expr::Const(Constant::Pi) => C64::new(std::f64::consts::PI, 0.0),
        Expr::Const(Constant::E) => C64::new(std::f64::consts::E, 0.0),
        Expr::Neg(a) => -eval_node(a, z)?,
        Expr::Bin(op, a, b) => {
            let x = eval_node(a, z)?;
            let y = eval_node(b, z)?;
            match op {
                BinOp::Add => x + y,
                BinOp::Sub => x - y,
                BinOp::Mul => x * y,
                BinOp::Div => {
                    if y.norm() < DEFAULT_TAU_POLE * (1.0 + x.norm()) {
                        return Err(pole(z, y.norm()));
                    }
                    x / y
                }
            }
        }
        Expr::Pow(a, k) => {
            let x = eval_node(a, z)?;
            let p = x.powu(k.unsigned_abs());
            if *k >= 0 {
                p
            } else {
                if p.norm() < DEFAULT_TAU_POLE {
                    return Err(pole(z, p.norm()));
                }
                C64::new(1.0, 0.0) / p
            }
        }
        Expr::Call(f, a) => {
            let x = eval_node(a, z)?;
            match f {
                Func::Exp => x.exp(),
                Func::Sin => x.sin(),
                Func::Cos => x.cos(),
                Func::Log => {
                    if x.norm() < DEFAULT_TAU_POLE {
                        return Err(Error::Domain(format!(
                            "log argument {:e} too close to 0 at {}",
                            x.norm(),
                            crate::error::fmt_point(z)
                        )));
                    }
                    x.ln()
                }
            }
        }
    })
}

fn to_fraction(e: &Expr, dim: usize) -> Option<(Polynomial, Polynomial)> {
    let one = || Polynomial::constant(dim, C64::new(1.0, 0.0));
    Some(match e {
        Expr::Num(c) => (Polynomial::constant(dim, *c), one()),
        Expr::Var(j) => (Polynomial::variable(dim, *j), one()),
        Expr::Const(Constant::Pi) => (
            Polynomial::constant(dim, C64::new(std::f64::consts::PI, 0.0)),
            one(),
        ),
        Expr::Const(Constant::E) => (
            Polynomial::constant(dim, C64::new(std::f64::consts::E, 0.0)),
            one(),
        ),
        Expr::Neg(a) => {
            let (n, d) = to_fraction(a, dim)?;
            (n.scale(C64::new(-1.0, 0.0)), d)
        }
        Expr::Bin(op, a, b) => {
            let (an, ad) = to_fraction(a, dim)?;
            let (bn, bd) = to_fraction(b, dim)?;
            match op {
                BinOp::Add | BinOp::Sub => {
                    let l = an.mul(&bd).ok()?;
                    let r = bn.mul(&ad).ok()?;
                    let n = if *op == BinOp::Add {
                        l.add(&r).ok()?
                    } else {
                        l.sub(&r).ok()?
                    };
                    (n, ad.mul(&bd).ok()?)
                }
                BinOp::Mul => (an.mul(&bn).ok()?, ad.mul(&bd).ok()?),
                BinOp::Div => {
                    if bn.is_zero() {
                        return None;
                    }
                    (an.mul(&bd).ok()?, ad.mul(&bn).ok()?)
                }
            }
        }
        Expr::Pow(a, k) => {
            let (n, d) = to_fraction(a, dim)?;
            let m = k.unsigned_abs();
            if *k >= 0 {
                (n.pow(m), d.pow(m))
            } else {
                if n.is_zero() {
                    return None;
                }
                (d.pow(m), n.pow(m))
            }
        }
        Expr::Call(..) => return None,
    })
}

/// Finite-difference Lipschitz estimate of `f` over a deterministic grid on
/// the box: the largest difference quotient between grid neighbours along
/// each real axis. An estimate, not a certified bound.
pub fn lipschitz_estimate<F: ComplexMap + ?Sized>(f: &F, region: &BoxRegion) -> Result<f64> {
    Error::check_dim(f.dim(), region.dim())?;
    let real_dims = 2 * region.dim();
    // odd count so the box centre is always sampled
    let per_axis = ((4096f64).powf(1.0 / real_dims as f64).floor() as usize | 1).clamp(3, 65);
    let axes: Vec<Vec<f64>> = (0..real_dims)
        .map(|k| {
            let (lo, hi) = region.real_bounds(k);
            if hi - lo <= 0.0 {
                vec![lo]
            } else {
                (0..per_axis)
                    .map(|i| lo + (hi - lo) * i as f64 / (per_axis - 1) as f64)
                    .collect()
            }
        })
        .collect();
    let shape: Vec<usize> = axes.iter().map(Vec::len).collect();
    let total: usize = shape.iter().product();
    let point_of = |mut idx: usize| -> Vec<C64> {
        let mut coords = vec![0.0; real_dims];
        for k in (0..real_dims).rev() {
            coords[k] = axes[k][idx % shape[k]];
            idx /= shape[k];
        }
        coords.chunks(2).map(|c| C64::new(c[0], c[1])).collect()
    };
    let values = crate::exec::try_map_range(total, |i| f.eval(&point_of(i)))?;
    let mut best: f64 = 0.0;
    let mut stride = 1;
    for k in (0..real_dims).rev() {
        if shape[k] > 1 {
            let step = axes[k][1] - axes[k][0];
            for i in 0..total {
                if (i / stride) % shape[k] + 1 < shape[k] {
                    let q = (values[i + stride] - values[i]).norm() / step;
                    best = best.max(q);
                }
            }
        }
        stride *= shape[k];
    }
    Ok(best)
}

impl fmt::Display for FunctionExpr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write_expr(f, &self.root, self.dim)
    }
}

fn write_num(f: &mut fmt::Formatter<'_>, c: C64) -> fmt::Result {
    if c.im == 0.0 && c.re >= 0.0 {
        write!(f, "{:?}", c.re)
    } else if c.re == 0.0 && c.im >= 0.0 {
        write!(f, "{:?}i", c.im)
    } else {
        write!(f, "({:?}+({:?})*i)", c.re, c.im)
    }
}

fn write_expr(f: &mut fmt::Formatter<'_>, e: &Expr, dim: usize) -> fmt::Result {
    match e {
        Expr::Num(c) => write_num(f, *c),
        Expr::Var(j) if dim == 1 => {
            let _ = j;
            write!(f, "z")
        }
        Expr::Var(j) => write!(f, "z{}", j + 1),
        Expr::Const(Constant::Pi) => write!(f, "pi"),
        Expr::Const(Constant::E) => write!(f, "e"),
        Expr::Neg(a) => {
            write!(f, "(-")?;
            write_expr(f, a, dim)?;
            write!(f, ")")
        }
        Expr::Bin(op, a, b) => {
            let sym = match op {
                BinOp::Add => "+",
                BinOp::Sub => "-",
                BinOp::Mul => "*",
                BinOp::Div => "/",
            };
            write!(f, "(")?;
            write_expr(f, a, dim)?;
            write!(f, "{sym}")?;
            write_expr(f, b, dim)?;
            write!(f, ")")
        }
        Expr::Pow(a, k) => {
            write!(f, "(")?;
            write_expr(f, a, dim)?;
            write!(f, ")^{k}")
        }
        Expr::Call(func, a) => {
            let name = match func {
                Func::Exp => "exp",
                Func::Sin => "sin",
                Func::Cos => "cos",
                Func::Log => "log",
            };
            write!(f, "{name}(")?;
            write_expr(f, a, dim)?;
            write!(f, ")")
        }
    }
}
