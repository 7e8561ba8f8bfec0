use num_bigint::BigInt;

use super::lexer::{Diagnostic, Tok, Token};
use crate::coeff::{RatFunc, Rational};
use crate::diffpoly::{DerIndet, DiffPoly, MultiIndex};
use crate::weil::{BElem, Coords, Descent, FreeExtension};

/// Names visible to the expression parser.
#[derive(Clone, Debug, Default)]
pub struct Scope {
    pub field: Vec<String>,
    pub vars: Vec<String>,
    pub basis: Vec<String>,
    pub m: usize,
}

impl Scope {
    pub fn ell(&self) -> usize {
        self.basis.len()
    }
}

/// Whether `s` reads as a derivative operator (`d`, `d1`, `d12`, …).
pub fn is_derivative_name(s: &str) -> bool {
    s.strip_prefix('d').is_some_and(|rest| rest.chars().all(|c| c.is_ascii_digit()))
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct VarRef {
    pub var: usize,
    pub xi: MultiIndex,
    /// 0-based coordinate index for `x(i)` descent variables.
    pub weil: Option<usize>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Expr {
    Num(BigInt),
    Gen(usize),
    Basis(usize),
    Var(VarRef),
    Add(Box<Expr>, Box<Expr>),
    Sub(Box<Expr>, Box<Expr>),
    Mul(Box<Expr>, Box<Expr>),
    Div(Box<Expr>, Box<Expr>),
    Neg(Box<Expr>),
    Pow(Box<Expr>, u32),
}

const ATOM_START: &[&str] = &["number", "variable", "generator", "derivative", "`(`", "`-`"];

pub struct Parser<'a> {
    toks: &'a [Token],
    pos: usize,
    scope: &'a Scope,
}

impl<'a> Parser<'a> {
    pub fn new(toks: &'a [Token], pos: usize, scope: &'a Scope) -> Self {
        Parser { toks, pos, scope }
    }

    pub fn pos(&self) -> usize {
        self.pos
    }

    fn peek(&self) -> &Token {
        &self.toks[self.pos.min(self.toks.len() - 1)]
    }

    fn bump(&mut self) -> Token {
        let t = self.peek().clone();
        if self.pos < self.toks.len() - 1 {
            self.pos += 1;
        }
        t
    }

    fn is_sym(&self, c: char) -> bool {
        self.peek().tok == Tok::Sym(c)
    }

    fn err_here(&self, msg: &str, expected: &[&str]) -> Diagnostic {
        let t = self.peek();
        Diagnostic::new(t.line, t.col, format!("{}, found {}", msg, t.tok)).expecting(expected)
    }

    fn expect_sym(&mut self, c: char) -> Result<(), Diagnostic> {
        if self.is_sym(c) {
            self.bump();
            Ok(())
        } else {
            Err(self.err_here("unexpected token", &[&format!("`{}`", c)]))
        }
    }

    fn int(&mut self) -> Result<u32, Diagnostic> {
        match &self.peek().tok {
            Tok::Int(s) => {
                let v = s.parse::<u32>().map_err(|_| self.err_here("integer too large", &["integer"]))?;
                self.bump();
                Ok(v)
            }
            _ => Err(self.err_here("unexpected token", &["integer"])),
        }
    }

    pub fn expr(&mut self) -> Result<Expr, Diagnostic> {
        let mut lhs = self.term()?;
        loop {
            if self.is_sym('+') {
                self.bump();
                lhs = Expr::Add(Box::new(lhs), Box::new(self.term()?));
            } else if self.is_sym('-') {
                self.bump();
                lhs = Expr::Sub(Box::new(lhs), Box::new(self.term()?));
            } else {
                return Ok(lhs);
            }
        }
    }

    fn term(&mut self) -> Result<Expr, Diagnostic> {
        let mut lhs = self.factor()?;
        loop {
            if self.is_sym('*') {
                self.bump();
                lhs = Expr::Mul(Box::new(lhs), Box::new(self.factor()?));
            } else if self.is_sym('/') {
                self.bump();
                lhs = Expr::Div(Box::new(lhs), Box::new(self.factor()?));
            } else {
                return Ok(lhs);
            }
        }
    }

    fn factor(&mut self) -> Result<Expr, Diagnostic> {
        if self.is_sym('-') {
            self.bump();
            return Ok(Expr::Neg(Box::new(self.factor()?)));
        }
        let base = self.atom()?;
        if self.is_sym('^') {
            self.bump();
            let e = self.int()?;
            return Ok(Expr::Pow(Box::new(base), e));
        }
        Ok(base)
    }

    fn atom(&mut self) -> Result<Expr, Diagnostic> {
        let t = self.peek().clone();
        match &t.tok {
            Tok::Int(s) => {
                self.bump();
                Ok(Expr::Num(s.parse().expect("digits")))
            }
            Tok::Sym('(') => {
                self.bump();
                let e = self.expr()?;
                if !self.is_sym(')') {
                    return Err(self.err_here("unclosed parenthesis", &["`)`", "`+`", "`-`", "`*`", "`/`", "`^`"]));
                }
                self.bump();
                Ok(e)
            }
            Tok::Ident(name) => {
                if let Some(j) = self.scope.field.iter().position(|n| n == name) {
                    self.bump();
                    return Ok(Expr::Gen(j));
                }
                if let Some(j) = self.scope.basis.iter().position(|n| n == name) {
                    self.bump();
                    return Ok(Expr::Basis(j));
                }
                if self.scope.vars.contains(name) || is_derivative_name(name) {
                    return self.derivative();
                }
                Err(Diagnostic::new(t.line, t.col, format!("unknown name `{}`", name)).expecting(ATOM_START))
            }
            _ => Err(self.err_here("unexpected token", ATOM_START)),
        }
    }

    fn derivative(&mut self) -> Result<Expr, Diagnostic> {
        let m = self.scope.m;
        let mut xi = vec![0u32; m];
        let mut any_op = false;
        loop {
            let t = self.peek().clone();
            let Tok::Ident(name) = &t.tok else { break };
            if !is_derivative_name(name) || self.scope.vars.contains(name) {
                break;
            }
            self.bump();
            any_op = true;
            if name == "d" && self.is_sym('[') && self.peek().glued {
                self.bump();
                for (k, slot) in xi.iter_mut().enumerate() {
                    if k > 0 {
                        self.expect_sym(',')?;
                    }
                    *slot += self.int()?;
                }
                self.expect_sym(']')?;
            } else {
                let k = if name == "d" {
                    if m != 1 {
                        return Err(Diagnostic::new(t.line, t.col, "bare `d` needs exactly one derivation; write d1..dm"));
                    }
                    1
                } else {
                    name[1..].parse::<usize>().unwrap_or(0)
                };
                if k == 0 || k > m {
                    return Err(Diagnostic::new(t.line, t.col, format!("derivation index out of range 1..{}", m)));
                }
                let e = if self.is_sym('^') {
                    self.bump();
                    self.int()?
                } else {
                    1
                };
                xi[k - 1] += e;
            }
        }
        let t = self.peek().clone();
        let var = match &t.tok {
            Tok::Ident(name) => self.scope.vars.iter().position(|n| n == name),
            _ => None,
        };
        let Some(var) = var else {
            return Err(self.err_here("a derivative must act on a variable", &["variable"]));
        };
        self.bump();
        let mut weil = None;
        if self.is_sym('[') && self.peek().glued {
            if any_op {
                return Err(self.err_here("jet coordinates take no derivative prefix", &[]));
            }
            self.bump();
            for (k, slot) in xi.iter_mut().enumerate() {
                if k > 0 {
                    self.expect_sym(',')?;
                }
                *slot = self.int()?;
            }
            self.expect_sym(']')?;
        } else if self.is_sym('(') && self.peek().glued {
            self.bump();
            let here = self.peek().clone();
            let i = self.int()? as usize;
            if i == 0 || i > self.scope.ell() {
                return Err(Diagnostic::new(here.line, here.col, format!("coordinate index out of range 1..{}", self.scope.ell())));
            }
            weil = Some(i - 1);
            self.expect_sym(')')?;
        }
        Ok(Expr::Var(VarRef { var, xi, weil }))
    }
}

/// Target algebra for expression evaluation.
pub trait Alg: Clone {
    type Ctx<'c>: Copy;
    fn k(ctx: Self::Ctx<'_>, c: RatFunc) -> Self;
    fn basis(ctx: Self::Ctx<'_>, i: usize) -> Result<Self, String>;
    fn var(ctx: Self::Ctx<'_>, v: &VarRef) -> Result<Self, String>;
    fn add(ctx: Self::Ctx<'_>, a: &Self, b: &Self) -> Self;
    fn mul(ctx: Self::Ctx<'_>, a: &Self, b: &Self) -> Self;
    fn neg(ctx: Self::Ctx<'_>, a: &Self) -> Self;
}

pub fn eval<A: Alg>(e: &Expr, ctx: A::Ctx<'_>) -> Result<A, String> {
    Ok(match e {
        Expr::Num(n) => A::k(ctx, RatFunc::from_rational(Rational::from_integer(n.clone()))),
        Expr::Gen(j) => A::k(ctx, RatFunc::gen(*j)),
        Expr::Basis(i) => A::basis(ctx, *i)?,
        Expr::Var(v) => A::var(ctx, v)?,
        Expr::Add(a, b) => A::add(ctx, &eval(a, ctx)?, &eval(b, ctx)?),
        Expr::Sub(a, b) => A::add(ctx, &eval(a, ctx)?, &A::neg(ctx, &eval(b, ctx)?)),
        Expr::Mul(a, b) => A::mul(ctx, &eval(a, ctx)?, &eval(b, ctx)?),
        Expr::Neg(a) => A::neg(ctx, &eval(a, ctx)?),
        Expr::Div(a, b) => {
            let d: RatFunc = eval(b, ())?;
            let inv = d.inv().map_err(|_| "division by zero".to_string())?;
            A::mul(ctx, &eval(a, ctx)?, &A::k(ctx, inv))
        }
        Expr::Pow(a, n) => {
            let base = eval::<A>(a, ctx)?;
            let mut acc = A::k(ctx, RatFunc::one());
            for _ in 0..*n {
                acc = A::mul(ctx, &acc, &base);
            }
            acc
        }
    })
}

impl Alg for RatFunc {
    type Ctx<'c> = ();
    fn k(_: (), c: RatFunc) -> Self {
        c
    }
    fn basis(_: (), _: usize) -> Result<Self, String> {
        Err("basis element where a base-field element is expected".into())
    }
    fn var(_: (), _: &VarRef) -> Result<Self, String> {
        Err("variable where a base-field element is expected (divisors must lie in K)".into())
    }
    fn add(_: (), a: &Self, b: &Self) -> Self {
        a + b
    }
    fn mul(_: (), a: &Self, b: &Self) -> Self {
        a * b
    }
    fn neg(_: (), a: &Self) -> Self {
        -a
    }
}

/// Context: ℓ, used to place descent variables `x(i)`.
impl Alg for DiffPoly {
    type Ctx<'c> = usize;
    fn k(_: usize, c: RatFunc) -> Self {
        DiffPoly::constant(c)
    }
    fn basis(_: usize, _: usize) -> Result<Self, String> {
        Err("basis element in a K-polynomial".into())
    }
    fn var(ell: usize, v: &VarRef) -> Result<Self, String> {
        let var = match v.weil {
            None => v.var,
            Some(i) => v.var * ell + i,
        };
        Ok(DiffPoly::indet(DerIndet::new(var, v.xi.clone())))
    }
    fn add(_: usize, a: &Self, b: &Self) -> Self {
        a.add(b)
    }
    fn mul(_: usize, a: &Self, b: &Self) -> Self {
        a.mul(b)
    }
    fn neg(_: usize, a: &Self) -> Self {
        a.neg()
    }
}

impl Alg for BElem {
    type Ctx<'c> = &'c FreeExtension;
    fn k(e: &FreeExtension, c: RatFunc) -> Self {
        e.scalar(&c)
    }
    fn basis(e: &FreeExtension, i: usize) -> Result<Self, String> {
        Ok(e.basis_elem(i))
    }
    fn var(_: &FreeExtension, _: &VarRef) -> Result<Self, String> {
        Err("variable in an element of B".into())
    }
    fn add(e: &FreeExtension, a: &Self, b: &Self) -> Self {
        e.add(a, b)
    }
    fn mul(e: &FreeExtension, a: &Self, b: &Self) -> Self {
        e.mul(a, b)
    }
    fn neg(e: &FreeExtension, a: &Self) -> Self {
        e.scale(a, &RatFunc::from_int(-1))
    }
}

impl Alg for Coords {
    type Ctx<'c> = &'c Descent;
    fn k(d: &Descent, c: RatFunc) -> Self {
        d.from_elem(&d.scalar_elem(&c))
    }
    fn basis(d: &Descent, i: usize) -> Result<Self, String> {
        Ok(d.from_elem(&d.ext().basis_elem(i)))
    }
    fn var(d: &Descent, v: &VarRef) -> Result<Self, String> {
        if v.weil.is_some() {
            return Err("descent coordinates do not occur in B{T}".into());
        }
        Ok(d.scalar(&DiffPoly::indet(DerIndet::new(v.var, v.xi.clone()))))
    }
    fn add(d: &Descent, a: &Self, b: &Self) -> Self {
        d.add(a, b)
    }
    fn mul(d: &Descent, a: &Self, b: &Self) -> Self {
        d.mul(a, b)
    }
    fn neg(d: &Descent, a: &Self) -> Self {
        d.sub(&d.zero(), a)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cli::lexer::lex;
    use crate::diffpoly::IndetStyle;

    fn scope(m: usize) -> Scope {
        Scope { field: vec!["t".into()], vars: vec!["x1".into(), "x2".into()], basis: vec![], m }
    }

    fn parse(src: &str, sc: &Scope) -> Result<DiffPoly, Diagnostic> {
        let toks = lex(src, 1, 1)?;
        let mut p = Parser::new(&toks, 0, sc);
        let e = p.expr()?;
        if toks[p.pos()].tok != Tok::End {
            return Err(Diagnostic::new(1, toks[p.pos()].col, "trailing input"));
        }
        eval::<DiffPoly>(&e, 0).map_err(|m| Diagnostic::new(1, 1, m))
    }

    #[test]
    fn spec_examples() {
        let sc = scope(2);
        let f = parse("d1 x1", &sc).unwrap();
        assert_eq!(f, DiffPoly::indet(DerIndet::new(0, vec![1, 0])));
        let g = parse("(d1 x1)^2 - t", &sc).unwrap();
        assert_eq!(g, f.pow(2).sub(&DiffPoly::constant(RatFunc::gen(0))));
        let err = parse("d1 x1 +", &sc).unwrap_err();
        assert_eq!((err.line, err.col), (1, 8));
        assert!(err.message.contains("end of input"));
        assert!(!err.expected.is_empty());
    }

    #[test]
    fn sugar_and_printer_forms() {
        let sc = scope(2);
        assert_eq!(parse("d[2,1] x1", &sc).unwrap(), parse("d1^2 d2 x1", &sc).unwrap());
        let h = parse("d1^2 x1 * x2 + (1/(2*t)) * x2", &sc).unwrap();
        let names = sc.field.clone();
        let printed = h.fmt_with(&names, IndetStyle::Diff(&sc.vars));
        assert_eq!(parse(&printed, &sc).unwrap(), h);
        assert_eq!(parse("x1[1,0]", &sc).unwrap(), parse("d1 x1", &sc).unwrap());
        assert!(parse("d x1", &sc).is_err());
        assert!(parse("d3 x1", &sc).is_err());
        assert!(parse("x1/x2", &sc).is_err());
        assert!(parse("d1 t", &sc).is_err());
    }
}
