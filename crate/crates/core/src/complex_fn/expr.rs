use std::fmt;

use num_complex::Complex64;

use crate::error::{Error, Result};

/// Denominator modulus below which a division is treated as a pole.
pub const DIV_GUARD: f64 = 1e-14;

/// Entire functions admitted as unary nodes.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Func {
    Exp,
    Sin,
    Cos,
    Sinh,
    Cosh,
}

impl Func {
    pub fn name(self) -> &'static str {
        match self {
            Func::Exp => "exp",
            Func::Sin => "sin",
            Func::Cos => "cos",
            Func::Sinh => "sinh",
            Func::Cosh => "cosh",
        }
    }

    pub fn from_name(name: &str) -> Option<Func> {
        Some(match name {
            "exp" => Func::Exp,
            "sin" => Func::Sin,
            "cos" => Func::Cos,
            "sinh" => Func::Sinh,
            "cosh" => Func::Cosh,
            _ => return None,
        })
    }

    fn apply(self, z: Complex64) -> Complex64 {
        match self {
            Func::Exp => z.exp(),
            Func::Sin => z.sin(),
            Func::Cos => z.cos(),
            Func::Sinh => z.sinh(),
            Func::Cosh => z.cosh(),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
enum Node {
    Const(Complex64),
    Var,
    Neg(Box<Node>),
    Add(Box<Node>, Box<Node>),
    Sub(Box<Node>, Box<Node>),
    Mul(Box<Node>, Box<Node>),
    Div(Box<Node>, Box<Node>),
    Pow(Box<Node>, i32),
    Call(Func, Box<Node>),
}

/// Expression tree for a meromorphic function of the single complex variable `w`.
///
/// Trees are immutable once built. Evaluation checks every division (and every
/// negative integer power) against [`DIV_GUARD`] and reports
/// [`Error::PoleEncountered`] instead of producing infinities.
#[derive(Debug, Clone, PartialEq)]
pub struct HolomorphicExpr {
    root: Node,
}

impl HolomorphicExpr {
    pub fn constant(c: Complex64) -> Self {
        Self { root: Node::Const(c) }
    }

    pub fn var() -> Self {
        Self { root: Node::Var }
    }

    pub fn call(func: Func, arg: HolomorphicExpr) -> Self {
        Self {
            root: Node::Call(func, Box::new(arg.root)),
        }
    }

    pub fn powi(self, n: i32) -> Self {
        Self {
            root: Node::Pow(Box::new(self.root), n),
        }
    }

    pub fn is_constant(&self) -> bool {
        !self.root.contains_var()
    }

    /// Returns `Some(c)` when the tree is a bare literal.
    pub fn as_literal(&self) -> Option<Complex64> {
        match self.root {
            Node::Const(c) => Some(c),
            _ => None,
        }
    }

    pub fn eval(&self, w: Complex64) -> Result<Complex64> {
        let value = self.root.eval(w)?;
        if value.re.is_finite() && value.im.is_finite() {
            Ok(value)
        } else {
            Err(Error::NonFinite { w })
        }
    }

    /// Exact symbolic derivative with respect to `w`.
    pub fn differentiate(&self) -> HolomorphicExpr {
        HolomorphicExpr {
            root: self.root.derivative(),
        }
    }

    /// Number of nodes in the tree.
    pub fn size(&self) -> usize {
        self.root.size()
    }
}

impl Node {
    fn contains_var(&self) -> bool {
        match self {
            Node::Const(_) => false,
            Node::Var => true,
            Node::Neg(a) | Node::Pow(a, _) | Node::Call(_, a) => a.contains_var(),
            Node::Add(a, b) | Node::Sub(a, b) | Node::Mul(a, b) | Node::Div(a, b) => {
                a.contains_var() || b.contains_var()
            }
        }
    }

    fn size(&self) -> usize {
        match self {
            Node::Const(_) | Node::Var => 1,
            Node::Neg(a) | Node::Pow(a, _) | Node::Call(_, a) => 1 + a.size(),
            Node::Add(a, b) | Node::Sub(a, b) | Node::Mul(a, b) | Node::Div(a, b) => {
                1 + a.size() + b.size()
            }
        }
    }

    fn eval(&self, w: Complex64) -> Result<Complex64> {
        Ok(match self {
            Node::Const(c) => *c,
            Node::Var => w,
            Node::Neg(a) => -a.eval(w)?,
            Node::Add(a, b) => a.eval(w)? + b.eval(w)?,
            Node::Sub(a, b) => a.eval(w)? - b.eval(w)?,
            Node::Mul(a, b) => a.eval(w)? * b.eval(w)?,
            Node::Div(a, b) => {
                let num = a.eval(w)?;
                let den = b.eval(w)?;
                if den.norm() < DIV_GUARD {
                    return Err(Error::PoleEncountered { w });
                }
                num / den
            }
            Node::Pow(a, n) => {
                let base = a.eval(w)?;
                if *n < 0 && base.norm() < DIV_GUARD {
                    return Err(Error::PoleEncountered { w });
                }
                base.powi(*n)
            }
            Node::Call(f, a) => f.apply(a.eval(w)?),
        })
    }

    fn derivative(&self) -> Node {
        match self {
            Node::Const(_) => zero(),
            Node::Var => one(),
            Node::Neg(a) => neg(a.derivative()),
            Node::Add(a, b) => add(a.derivative(), b.derivative()),
            Node::Sub(a, b) => sub(a.derivative(), b.derivative()),
            Node::Mul(a, b) => add(
                mul(a.derivative(), (**b).clone()),
                mul((**a).clone(), b.derivative()),
            ),
            Node::Div(a, b) => {
                let a_prime = a.derivative();
                let b_prime = b.derivative();
                if is_zero(&b_prime) {
                    return div(a_prime, (**b).clone());
                }
                div(
                    sub(
                        mul(a_prime, (**b).clone()),
                        mul((**a).clone(), b_prime),
                    ),
                    pow((**b).clone(), 2),
                )
            }
            Node::Pow(a, n) => {
                if *n == 0 {
                    return zero();
                }
                mul(
                    mul(
                        Node::Const(Complex64::new(*n as f64, 0.0)),
                        pow((**a).clone(), n - 1),
                    ),
                    a.derivative(),
                )
            }
            Node::Call(f, a) => {
                let inner = a.derivative();
                let outer = match f {
                    Func::Exp => Node::Call(Func::Exp, a.clone()),
                    Func::Sin => Node::Call(Func::Cos, a.clone()),
                    Func::Cos => neg(Node::Call(Func::Sin, a.clone())),
                    Func::Sinh => Node::Call(Func::Cosh, a.clone()),
                    Func::Cosh => Node::Call(Func::Sinh, a.clone()),
                };
                mul(outer, inner)
            }
        }
    }
}

// Constructors used by differentiation. They fold literal zeros and ones so
// derivative trees stay proportional to the input size.

fn zero() -> Node {
    Node::Const(Complex64::new(0.0, 0.0))
}

fn one() -> Node {
    Node::Const(Complex64::new(1.0, 0.0))
}

fn is_zero(n: &Node) -> bool {
    matches!(n, Node::Const(c) if *c == Complex64::new(0.0, 0.0))
}

fn is_one(n: &Node) -> bool {
    matches!(n, Node::Const(c) if *c == Complex64::new(1.0, 0.0))
}

fn neg(a: Node) -> Node {
    match a {
        Node::Const(c) => Node::Const(-c),
        Node::Neg(inner) => *inner,
        other => Node::Neg(Box::new(other)),
    }
}

fn add(a: Node, b: Node) -> Node {
    match (a, b) {
        (Node::Const(x), Node::Const(y)) => Node::Const(x + y),
        (a, b) if is_zero(&a) => b,
        (a, b) if is_zero(&b) => a,
        (a, b) => Node::Add(Box::new(a), Box::new(b)),
    }
}

fn sub(a: Node, b: Node) -> Node {
    match (a, b) {
        (Node::Const(x), Node::Const(y)) => Node::Const(x - y),
        (a, b) if is_zero(&b) => a,
        (a, b) if is_zero(&a) => neg(b),
        (a, b) => Node::Sub(Box::new(a), Box::new(b)),
    }
}

fn mul(a: Node, b: Node) -> Node {
    match (a, b) {
        (Node::Const(x), Node::Const(y)) => Node::Const(x * y),
        (a, _) if is_zero(&a) => zero(),
        (_, b) if is_zero(&b) => zero(),
        (a, b) if is_one(&a) => b,
        (a, b) if is_one(&b) => a,
        (a, b) => Node::Mul(Box::new(a), Box::new(b)),
    }
}

fn div(a: Node, b: Node) -> Node {
    if is_zero(&a) {
        return zero();
    }
    if is_one(&b) {
        return a;
    }
    Node::Div(Box::new(a), Box::new(b))
}

fn pow(a: Node, n: i32) -> Node {
    match n {
        0 => one(),
        1 => a,
        _ => Node::Pow(Box::new(a), n),
    }
}

macro_rules! binary_op {
    ($trait:ident, $method:ident, $variant:ident) => {
        impl std::ops::$trait for HolomorphicExpr {
            type Output = HolomorphicExpr;
            fn $method(self, rhs: HolomorphicExpr) -> HolomorphicExpr {
                HolomorphicExpr {
                    root: Node::$variant(Box::new(self.root), Box::new(rhs.root)),
                }
            }
        }
    };
}

binary_op!(Add, add, Add);
binary_op!(Sub, sub, Sub);
binary_op!(Mul, mul, Mul);
binary_op!(Div, div, Div);

impl std::ops::Neg for HolomorphicExpr {
    type Output = HolomorphicExpr;
    fn neg(self) -> HolomorphicExpr {
        HolomorphicExpr {
            root: Node::Neg(Box::new(self.root)),
        }
    }
}

impl fmt::Display for HolomorphicExpr {
    /// Prints the tree in the textual grammar accepted by [`super::parse_expr`],
    /// fully parenthesised.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write_node(&self.root, f)
    }
}

fn write_literal(c: Complex64, f: &mut fmt::Formatter<'_>) -> fmt::Result {
    // `{:?}` on f64 is the shortest representation that round-trips.
    match (c.re == 0.0, c.im == 0.0) {
        (_, true) => write!(f, "({:?})", c.re),
        (true, false) => write!(f, "({:?}*i)", c.im),
        (false, false) => write!(f, "({:?}+{:?}*i)", c.re, c.im),
    }
}

fn write_node(node: &Node, f: &mut fmt::Formatter<'_>) -> fmt::Result {
    match node {
        Node::Const(c) => write_literal(*c, f),
        Node::Var => write!(f, "w"),
        Node::Neg(a) => {
            write!(f, "(-")?;
            write_node(a, f)?;
            write!(f, ")")
        }
        Node::Add(a, b) | Node::Sub(a, b) | Node::Mul(a, b) | Node::Div(a, b) => {
            let op = match node {
                Node::Add(..) => '+',
                Node::Sub(..) => '-',
                Node::Mul(..) => '*',
                _ => '/',
            };
            write!(f, "(")?;
            write_node(a, f)?;
            write!(f, "{op}")?;
            write_node(b, f)?;
            write!(f, ")")
        }
        Node::Pow(a, n) => {
            write!(f, "(")?;
            write_node(a, f)?;
            write!(f, "^{n})")
        }
        Node::Call(func, a) => {
            write!(f, "{}(", func.name())?;
            write_node(a, f)?;
            write!(f, ")")
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn exp_at_i_pi_is_minus_one() {
        let e = HolomorphicExpr::call(Func::Exp, HolomorphicExpr::var());
        let v = e.eval(c(0.0, PI)).unwrap();
        assert!((v - c(-1.0, 0.0)).norm() < 1e-15);
        assert_eq!(e.eval(c(0.0, 0.0)).unwrap(), c(1.0, 0.0));
    }

    #[test]
    fn reciprocal_at_zero_is_a_pole() {
        let e = HolomorphicExpr::constant(c(1.0, 0.0)) / HolomorphicExpr::var();
        assert_eq!(
            e.eval(c(0.0, 0.0)),
            Err(Error::PoleEncountered { w: c(0.0, 0.0) })
        );
        let p = HolomorphicExpr::var().powi(-2);
        assert!(matches!(p.eval(c(0.0, 0.0)), Err(Error::PoleEncountered { .. })));
    }

    #[test]
    fn overflow_is_reported_not_propagated() {
        let e = HolomorphicExpr::call(Func::Exp, HolomorphicExpr::var());
        assert!(matches!(e.eval(c(1000.0, 0.0)), Err(Error::NonFinite { .. })));
    }

    #[test]
    fn derivative_of_constant_is_zero_literal() {
        let e = HolomorphicExpr::constant(c(3.0, -1.0));
        assert_eq!(e.differentiate().as_literal(), Some(c(0.0, 0.0)));
    }

    #[test]
    fn derivative_of_exp_is_exp() {
        let e = HolomorphicExpr::call(Func::Exp, HolomorphicExpr::var());
        assert_eq!(e.differentiate(), e);
    }

    #[test]
    fn power_rule() {
        let e = HolomorphicExpr::var().powi(3);
        let d = e.differentiate();
        let w = c(0.3, -1.2);
        assert!((d.eval(w).unwrap() - 3.0 * w * w).norm() < 1e-14);
    }
}
