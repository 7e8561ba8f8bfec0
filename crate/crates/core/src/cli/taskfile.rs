use std::collections::BTreeMap;
use std::sync::Arc;

use super::expr::{eval, is_derivative_name, Alg, Expr, Parser, Scope, VarRef};
use super::lexer::{lex, Diagnostic, Tok, Token};
use crate::coeff::{validate_field, BaseField, RatFunc};
use crate::diffpoly::{DiffPoly, DiffRing, IndetStyle};
use crate::kernels::{CoordSpec, KernelPresentation};
use crate::weil::{validate_extension, BElem, Coords, Descent, FreeExtension};

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Decl {
    Poly(DiffPoly),
    Set(Vec<DiffPoly>),
    /// Relations in B{T}, T being the declared variables.
    Presentation(Vec<Coords>),
    Kernel(KernelPresentation),
    /// Probe points for the (◇) check, one K-value per coordinate of Γ_n(C).
    Probe(Vec<Vec<RatFunc>>),
    /// One B-value per variable.
    BPoint(Vec<BElem>),
}

impl Decl {
    fn kind(&self) -> DeclKind {
        match self {
            Decl::Poly(_) => DeclKind::Poly,
            Decl::Set(_) => DeclKind::Set,
            Decl::Presentation(_) => DeclKind::Presentation,
            Decl::Kernel(_) => DeclKind::Kernel,
            Decl::Probe(_) => DeclKind::Probe,
            Decl::BPoint(_) => DeclKind::BPoint,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
enum DeclKind {
    Poly,
    Set,
    Presentation,
    Kernel,
    Probe,
    BPoint,
}

impl DeclKind {
    fn word(self) -> &'static str {
        match self {
            DeclKind::Poly => "poly",
            DeclKind::Set => "set",
            DeclKind::Presentation => "presentation",
            DeclKind::Kernel => "kernel",
            DeclKind::Probe => "probe",
            DeclKind::BPoint => "bpoint",
        }
    }
}

/// A requested operation with resolved, type-checked arguments.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Task {
    ValidateField,
    ValidateExtension,
    Leader(String),
    Differentiate(String, usize),
    ReductionStatus(String, String),
    Divide(String, String),
    Member(String, String),
    Autoreduce(String),
    Theta(String, u32),
    Polify(String, u32),
    Descend(String),
    Thm32(String),
    Thm33(RatFunc, RatFunc),
    Transfer(String, String),
    Gamma(u32),
    Prolong(String, u32),
    Tau1(String),
    Ucm(String, u32),
    Jet(String, u32),
    Partition(String, u32, u32),
    BoundC(u64, u64, u64),
    Ackermann(u64, u64),
    AlphaBeta(u64, u64),
    IndexMaps(usize, usize),
    Leaders(String),
    ValidateKernel(String),
    Diamond(String, String, String),
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TaskSpec {
    pub line: usize,
    pub task: Task,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TaskFile {
    pub field: Arc<BaseField>,
    pub vars: Vec<String>,
    pub ext: Option<Arc<FreeExtension>>,
    pub decls: Vec<(String, Decl)>,
    pub tasks: Vec<TaskSpec>,
}

impl TaskFile {
    pub fn decl(&self, name: &str) -> Option<&Decl> {
        self.decls.iter().find(|(n, _)| n == name).map(|(_, d)| d)
    }

    pub fn ring(&self) -> DiffRing {
        DiffRing::with_names(self.field.clone(), self.vars.clone())
    }

    pub fn descent(&self) -> Option<Descent> {
        self.ext.as_ref().map(|e| Descent::new(e.clone(), self.vars.clone()))
    }

    /// Canonical source text; parsing it yields an equal task file.
    pub fn to_source(&self) -> String {
        let mut out = Vec::new();
        let f = &self.field;
        out.push(format!("field {}", f.names().join(" ")).trim_end().to_string());
        out.push(format!("derivations {}", f.m()));
        for d in 0..f.m() {
            for (j, name) in f.names().iter().enumerate() {
                let a = f.action(d, j);
                if !a.is_zero() {
                    out.push(format!("action d{} {} = {}", d + 1, name, f.fmt(a)));
                }
            }
        }
        if !self.vars.is_empty() {
            out.push(format!("vars {}", self.vars.join(" ")));
        }
        if let Some(e) = &self.ext {
            out.push(format!("extension {}", e.basis_names().join(" ")));
            let one = e.basis_names().iter().position(|n| n == "1");
            if one.map(|u| e.basis_elem(u)) != Some(e.unit().clone()) {
                out.push(format!("unit = {}", e.fmt_elem(e.unit())));
            }
            let names = e.basis_names();
            for i in 0..e.ell() {
                for j in i..e.ell() {
                    let p = e.mult(i, j);
                    let default = match one {
                        Some(u) if u == i => e.basis_elem(j),
                        Some(u) if u == j => e.basis_elem(i),
                        _ => e.zero_elem(),
                    };
                    if *p != default {
                        out.push(format!("mult {} {} = {}", names[i], names[j], e.fmt_elem(p)));
                    }
                }
            }
            for d in 0..e.m() {
                for j in 0..e.ell() {
                    let col: BElem = (0..e.ell()).map(|i| e.der(d, i, j).clone()).collect();
                    if !FreeExtension::is_zero_elem(&col) {
                        out.push(format!("der d{} {} = {}", d + 1, names[j], e.fmt_elem(&col)));
                    }
                }
            }
        }
        let ring = self.ring();
        let desc = self.descent();
        for (name, d) in &self.decls {
            match d {
                Decl::Poly(p) => out.push(format!("poly {} = {}", name, ring.fmt(p))),
                Decl::Set(ps) => {
                    let items: Vec<String> = ps.iter().map(|p| ring.fmt(p)).collect();
                    out.push(format!("set {} = {{{}}}", name, items.join(", ")));
                }
                Decl::Presentation(rs) => {
                    let desc = desc.as_ref().expect("presentations need an extension");
                    let items: Vec<String> = rs.iter().map(|r| desc.fmt_bpoly(r)).collect();
                    out.push(format!("presentation {} = {{{}}}", name, items.join(", ")));
                }
                Decl::Kernel(k) => {
                    out.push(format!("kernel {} {}", name, k.r()));
                    for (v, spec) in k.coords() {
                        if let CoordSpec::Algebraic(p) = spec {
                            let style = IndetStyle::Pol(&self.vars);
                            out.push(format!(
                                "coord {} {} minpoly {}",
                                name,
                                crate::diffpoly::fmt_indet(v, style),
                                p.fmt_with(f.names(), style)
                            ));
                        }
                    }
                }
                Decl::Probe(pts) => {
                    for p in pts {
                        let vals: Vec<String> = p.iter().map(|c| f.fmt(c)).collect();
                        out.push(format!("probe {} = {}", name, vals.join(", ")));
                    }
                }
                Decl::BPoint(vals) => {
                    let e = self.ext.as_ref().expect("B-points need an extension");
                    let vals: Vec<String> = vals.iter().map(|c| e.fmt_elem(c)).collect();
                    out.push(format!("bpoint {} = {}", name, vals.join(", ")));
                }
            }
        }
        for t in &self.tasks {
            out.push(format!("task {}", fmt_task(&t.task, f)));
        }
        out.join("\n") + "\n"
    }
}

pub fn fmt_task(t: &Task, field: &BaseField) -> String {
    match t {
        Task::ValidateField => "validate_field".into(),
        Task::ValidateExtension => "validate_extension".into(),
        Task::Leader(a) => format!("leader {}", a),
        Task::Differentiate(a, d) => format!("differentiate {} {}", a, d + 1),
        Task::ReductionStatus(a, b) => format!("reduction_status {} {}", a, b),
        Task::Divide(a, b) => format!("divide {} {}", a, b),
        Task::Member(a, b) => format!("member {} {}", a, b),
        Task::Autoreduce(a) => format!("autoreduce {}", a),
        Task::Theta(a, r) => format!("theta {} {}", a, r),
        Task::Polify(a, r) => format!("polify {} {}", a, r),
        Task::Descend(a) => format!("descend {}", a),
        Task::Thm32(a) => format!("thm32 {}", a),
        Task::Thm33(a, b) => format!("thm33 ({}) ({})", field.fmt(a), field.fmt(b)),
        Task::Transfer(a, b) => format!("transfer {} {}", a, b),
        Task::Gamma(r) => format!("gamma {}", r),
        Task::Prolong(a, r) => format!("prolong {} {}", a, r),
        Task::Tau1(a) => format!("tau1 {}", a),
        Task::Ucm(a, r) => format!("ucm {} {}", a, r),
        Task::Jet(a, r) => format!("jet {} {}", a, r),
        Task::Partition(a, r, s) => format!("partition {} {} {}", a, r, s),
        Task::BoundC(n, r, m) => format!("bounds C {} {} {}", n, r, m),
        Task::Ackermann(x, y) => format!("bounds A {} {}", x, y),
        Task::AlphaBeta(n, m) => format!("bounds alpha_beta {} {}", n, m),
        Task::IndexMaps(n, m) => format!("index_maps {} {}", n, m),
        Task::Leaders(a) => format!("leaders {}", a),
        Task::ValidateKernel(a) => format!("validate_kernel {}", a),
        Task::Diamond(a, b, c) => format!("diamond {} {} {}", a, b, c),
    }
}

/// Linear combinations of basis elements, for extension tables that are
/// read before the multiplication is known.
#[derive(Clone, Debug)]
enum Lin {
    Scalar(RatFunc),
    Vector(BElem),
}

#[derive(Clone, Copy)]
struct LinCtx<'a> {
    ell: usize,
    unit: Option<&'a BElem>,
}

impl Lin {
    fn into_elem(self, ctx: LinCtx<'_>) -> Result<BElem, String> {
        match self {
            Lin::Vector(v) => Ok(v),
            Lin::Scalar(c) => match ctx.unit {
                Some(u) => Ok(u.iter().map(|x| x * &c).collect()),
                None => Err("a base-field scalar needs the unit; declare `unit` or a basis element named 1".into()),
            },
        }
    }
}

impl Alg for Lin {
    type Ctx<'c> = LinCtx<'c>;
    fn k(_: LinCtx<'_>, c: RatFunc) -> Self {
        Lin::Scalar(c)
    }
    fn basis(ctx: LinCtx<'_>, i: usize) -> Result<Self, String> {
        let mut v = vec![RatFunc::zero(); ctx.ell];
        v[i] = RatFunc::one();
        Ok(Lin::Vector(v))
    }
    fn var(_: LinCtx<'_>, _: &VarRef) -> Result<Self, String> {
        Err("variable in an element of B".into())
    }
    fn add(ctx: LinCtx<'_>, a: &Self, b: &Self) -> Self {
        match (a, b) {
            (Lin::Scalar(x), Lin::Scalar(y)) => Lin::Scalar(x + y),
            _ => match (a.clone().into_elem(ctx), b.clone().into_elem(ctx)) {
                (Ok(x), Ok(y)) => Lin::Vector(x.iter().zip(&y).map(|(p, q)| p + q).collect()),
                // reported when the value is finally converted
                _ => Lin::Scalar(RatFunc::zero()).poison(),
            },
        }
    }
    fn mul(_: LinCtx<'_>, a: &Self, b: &Self) -> Self {
        match (a, b) {
            (Lin::Scalar(x), Lin::Scalar(y)) => Lin::Scalar(x * y),
            (Lin::Scalar(c), Lin::Vector(v)) | (Lin::Vector(v), Lin::Scalar(c)) => {
                Lin::Vector(v.iter().map(|x| x * c).collect())
            }
            (Lin::Vector(_), Lin::Vector(_)) => Lin::Scalar(RatFunc::zero()).poison(),
        }
    }
    fn neg(_: LinCtx<'_>, a: &Self) -> Self {
        match a {
            Lin::Scalar(x) => Lin::Scalar(-x),
            Lin::Vector(v) => Lin::Vector(v.iter().map(|x| -x).collect()),
        }
    }
}

impl Lin {
    /// Marker for an invalid combination: an empty vector never matches ℓ.
    fn poison(self) -> Self {
        Lin::Vector(Vec::new())
    }
}

/// One tokenized statement line.
struct Line {
    no: usize,
    toks: Vec<Token>,
    pos: usize,
}

impl Line {
    fn peek(&self) -> &Token {
        &self.toks[self.pos]
    }

    fn bump(&mut self) -> Token {
        let t = self.toks[self.pos].clone();
        if self.pos < self.toks.len() - 1 {
            self.pos += 1;
        }
        t
    }

    fn err(&self, msg: &str, expected: &[&str]) -> Diagnostic {
        let t = self.peek();
        Diagnostic::new(t.line, t.col, format!("{}, found {}", msg, t.tok)).expecting(expected)
    }

    fn ident(&mut self, what: &str) -> Result<(String, Token), Diagnostic> {
        match &self.peek().tok {
            Tok::Ident(s) => {
                let s = s.clone();
                Ok((s, self.bump()))
            }
            _ => Err(self.err(&format!("expected {}", what), &[what])),
        }
    }

    fn name_or_one(&mut self, what: &str) -> Result<(String, Token), Diagnostic> {
        if self.peek().tok == Tok::Int("1".into()) {
            let t = self.bump();
            return Ok(("1".into(), t));
        }
        self.ident(what)
    }

    fn int(&mut self) -> Result<u64, Diagnostic> {
        match &self.peek().tok {
            Tok::Int(s) => {
                let v = s.parse::<u64>().map_err(|_| self.err("integer too large", &["integer"]))?;
                self.bump();
                Ok(v)
            }
            _ => Err(self.err("expected an integer", &["integer"])),
        }
    }

    fn sym(&mut self, c: char) -> Result<(), Diagnostic> {
        if self.peek().tok == Tok::Sym(c) {
            self.bump();
            Ok(())
        } else {
            Err(self.err("unexpected token", &[&format!("`{}`", c)]))
        }
    }

    fn is_sym(&self, c: char) -> bool {
        self.peek().tok == Tok::Sym(c)
    }

    fn end(&self) -> Result<(), Diagnostic> {
        if self.peek().tok == Tok::End {
            Ok(())
        } else {
            Err(self.err("unexpected trailing input", &["end of input"]))
        }
    }

    fn expr(&mut self, scope: &Scope) -> Result<(Expr, Token), Diagnostic> {
        let start = self.peek().clone();
        let mut p = Parser::new(&self.toks, self.pos, scope);
        let e = p.expr()?;
        self.pos = p.pos();
        Ok((e, start))
    }

    /// `{e, e, …}` or `{}`.
    fn braced_list(&mut self, scope: &Scope) -> Result<Vec<(Expr, Token)>, Diagnostic> {
        self.sym('{')?;
        let mut out = Vec::new();
        if self.is_sym('}') {
            self.bump();
            return Ok(out);
        }
        loop {
            out.push(self.expr(scope)?);
            if self.is_sym(',') {
                self.bump();
            } else if self.is_sym('}') {
                self.bump();
                return Ok(out);
            } else {
                return Err(self.err("unexpected token in list", &["`,`", "`}`", "operator"]));
            }
        }
    }

    fn comma_list(&mut self, scope: &Scope) -> Result<Vec<(Expr, Token)>, Diagnostic> {
        let mut out = vec![self.expr(scope)?];
        while self.is_sym(',') {
            self.bump();
            out.push(self.expr(scope)?);
        }
        Ok(out)
    }
}

fn at(t: &Token, msg: impl Into<String>) -> Diagnostic {
    Diagnostic::new(t.line, t.col, msg)
}

#[derive(PartialEq, Eq, PartialOrd, Ord, Clone, Copy)]
enum Phase {
    Field,
    Extension,
    Body,
}

#[derive(Default)]
struct ExtDraft {
    line: usize,
    basis: Vec<String>,
    unit: Option<BElem>,
    mult: BTreeMap<(usize, usize), BElem>,
    der: BTreeMap<(usize, usize), BElem>,
}

struct Builder {
    phase: Phase,
    field_seen: bool,
    field_line: usize,
    field_names: Vec<String>,
    m: usize,
    action: BTreeMap<(usize, usize), RatFunc>,
    field: Option<Arc<BaseField>>,
    vars: Option<Vec<String>>,
    draft: Option<ExtDraft>,
    ext: Option<Arc<FreeExtension>>,
    decls: Vec<(String, Decl)>,
    tasks: Vec<TaskSpec>,
}

const STATEMENTS: &[&str] = &[
    "field", "derivations", "action", "vars", "extension", "unit", "mult", "der", "poly", "set", "presentation",
    "kernel", "coord", "probe", "bpoint", "task",
];

/// Parses and validates a task file.
pub fn parse_taskfile(src: &str) -> Result<TaskFile, Diagnostic> {
    let mut b = Builder {
        phase: Phase::Field,
        field_seen: false,
        field_line: 1,
        field_names: Vec::new(),
        m: 1,
        action: BTreeMap::new(),
        field: None,
        vars: None,
        draft: None,
        ext: None,
        decls: Vec::new(),
        tasks: Vec::new(),
    };
    for (i, raw) in src.lines().enumerate() {
        let no = i + 1;
        let text = raw.split('#').next().unwrap_or("");
        if text.trim().is_empty() {
            continue;
        }
        let toks = lex(text, no, 1)?;
        let mut line = Line { no, toks, pos: 0 };
        b.statement(&mut line, text)?;
    }
    b.close_field()?;
    b.close_ext()?;
    Ok(TaskFile {
        field: b.field.expect("closed"),
        vars: b.vars.unwrap_or_default(),
        ext: b.ext,
        decls: b.decls,
        tasks: b.tasks,
    })
}

impl Builder {
    fn scope(&self, with_basis: bool) -> Scope {
        Scope {
            field: self.field_names.clone(),
            vars: self.vars.clone().unwrap_or_default(),
            basis: if with_basis {
                self.draft.as_ref().map(|d| d.basis.clone()).unwrap_or_default()
            } else {
                Vec::new()
            },
            m: self.m,
        }
    }

    fn close_field(&mut self) -> Result<(), Diagnostic> {
        if self.field.is_some() {
            return Ok(());
        }
        let k = self.field_names.len();
        let action: Vec<Vec<RatFunc>> = (0..self.m)
            .map(|d| (0..k).map(|j| self.action.get(&(d, j)).cloned().unwrap_or_default()).collect())
            .collect();
        let field = BaseField::new_unchecked(self.field_names.clone(), action)
            .map_err(|e| Diagnostic::new(self.field_line, 1, e.to_string()))?;
        if let Some(r) = validate_field(&field) {
            return Err(Diagnostic::new(
                self.field_line,
                1,
                format!(
                    "derivations d{} and d{} do not commute on {} (bracket {})",
                    r.i + 1,
                    r.j + 1,
                    r.generator,
                    r.bracket
                ),
            ));
        }
        self.field = Some(Arc::new(field));
        Ok(())
    }

    fn close_ext(&mut self) -> Result<(), Diagnostic> {
        let Some(d) = self.draft.as_ref() else { return Ok(()) };
        if self.ext.is_some() {
            return Ok(());
        }
        let ell = d.basis.len();
        let one = d.basis.iter().position(|n| n == "1");
        let unit_of = |j: usize| {
            let mut v = vec![RatFunc::zero(); ell];
            v[j] = RatFunc::one();
            v
        };
        let unit = match (&d.unit, one) {
            (Some(u), _) => u.clone(),
            (None, Some(u)) => unit_of(u),
            (None, None) => return Err(Diagnostic::new(d.line, 1, "extension needs `unit = …` or a basis element named 1")),
        };
        let mut mult = vec![vec![vec![RatFunc::zero(); ell]; ell]; ell];
        for (i, row) in mult.iter_mut().enumerate() {
            for (j, cell) in row.iter_mut().enumerate() {
                if let Some(p) = d.mult.get(&(i, j)).or_else(|| d.mult.get(&(j, i))) {
                    *cell = p.clone();
                } else if one == Some(i) {
                    *cell = unit_of(j);
                } else if one == Some(j) {
                    *cell = unit_of(i);
                }
            }
        }
        let field = self.field.clone().expect("field closed first");
        let mut der = vec![vec![vec![RatFunc::zero(); ell]; ell]; self.m];
        for (&(dd, j), col) in &d.der {
            for (i, c) in col.iter().enumerate() {
                der[dd][i][j] = c.clone();
            }
        }
        let ext = FreeExtension::new_unchecked(field, d.basis.clone(), mult, unit, der)
            .map_err(|e| Diagnostic::new(d.line, 1, e.to_string()))?;
        if let Some(r) = validate_extension(&ext) {
            return Err(Diagnostic::new(d.line, 1, format!("invalid extension: {} fails: {}", r.identity, r.detail)));
        }
        self.ext = Some(Arc::new(ext));
        Ok(())
    }

    fn enter(&mut self, phase: Phase, line: &Line) -> Result<(), Diagnostic> {
        if phase < self.phase {
            let what = if phase == Phase::Field { "field" } else { "extension" };
            return Err(at(&line.toks[0], format!("the {} block is already closed", what)));
        }
        if phase > Phase::Field {
            self.close_field()?;
        }
        if phase > Phase::Extension {
            self.close_ext()?;
        }
        self.phase = phase;
        Ok(())
    }

    fn check_new_name(&self, name: &str, t: &Token) -> Result<(), Diagnostic> {
        if is_derivative_name(name) {
            return Err(at(t, format!("`{}` is reserved for derivative operators", name)));
        }
        let taken = self.field_names.iter().any(|n| n == name)
            || self.vars.as_ref().is_some_and(|v| v.iter().any(|n| n == name))
            || self.draft.as_ref().is_some_and(|d| d.basis.iter().any(|n| n == name))
            || self.decls.iter().any(|(n, _)| n == name)
            || STATEMENTS.contains(&name);
        if taken {
            return Err(at(t, format!("name `{}` is already in use", name)));
        }
        Ok(())
    }

    fn names_to_end(&self, line: &mut Line, what: &str) -> Result<Vec<String>, Diagnostic> {
        let mut out: Vec<String> = Vec::new();
        while line.peek().tok != Tok::End {
            let (n, t) = if what == "basis name" { line.name_or_one(what)? } else { line.ident(what)? };
            if n != "1" {
                self.check_new_name(&n, &t)?;
            }
            if out.contains(&n) {
                return Err(at(&t, format!("duplicate name `{}`", n)));
            }
            out.push(n);
        }
        Ok(out)
    }

    fn derivation_index(&self, line: &mut Line) -> Result<usize, Diagnostic> {
        let (name, t) = line.ident("derivation")?;
        let k = if name == "d" && self.m == 1 { Some(1) } else { name.strip_prefix('d').and_then(|s| s.parse::<usize>().ok()) };
        match k {
            Some(k) if (1..=self.m).contains(&k) => Ok(k - 1),
            _ => Err(at(&t, format!("expected a derivation d1..d{}", self.m)).expecting(&["derivation"])),
        }
    }

    fn statement(&mut self, line: &mut Line, _text: &str) -> Result<(), Diagnostic> {
        let (kw, kt) = line.ident("statement keyword").map_err(|d| d.expecting(STATEMENTS))?;
        match kw.as_str() {
            "field" => {
                self.enter(Phase::Field, line)?;
                if self.field_seen {
                    return Err(at(&kt, "field declared twice"));
                }
                self.field_seen = true;
                self.field_line = line.no;
                self.field_names = self.names_to_end(line, "generator name")?;
            }
            "derivations" => {
                self.enter(Phase::Field, line)?;
                let m = line.int()? as usize;
                if m == 0 {
                    return Err(at(&kt, "at least one derivation is required"));
                }
                self.m = m;
                line.end()?;
            }
            "action" => {
                self.enter(Phase::Field, line)?;
                let d = self.derivation_index(line)?;
                let (g, gt) = line.ident("generator name")?;
                let j = self.field_names.iter().position(|n| *n == g).ok_or_else(|| at(&gt, format!("unknown generator `{}`", g)))?;
                line.sym('=')?;
                let (e, et) = line.expr(&self.scope(false))?;
                line.end()?;
                let v: RatFunc = eval(&e, ()).map_err(|m| at(&et, m))?;
                self.action.insert((d, j), v);
            }
            "vars" => {
                if self.vars.is_some() {
                    return Err(at(&kt, "variables declared twice"));
                }
                let v = self.names_to_end(line, "variable name")?;
                self.vars = Some(v);
            }
            "extension" => {
                self.enter(Phase::Extension, line)?;
                if self.draft.is_some() {
                    return Err(at(&kt, "one extension per task file"));
                }
                let basis = self.names_to_end(line, "basis name")?;
                if basis.is_empty() {
                    return Err(at(&kt, "extension needs at least one basis element"));
                }
                self.draft = Some(ExtDraft { line: line.no, basis, ..Default::default() });
            }
            "unit" | "mult" | "der" => {
                if self.phase != Phase::Extension || self.draft.is_none() {
                    return Err(at(&kt, format!("`{}` belongs to an extension block", kw)));
                }
                self.ext_entry(&kw, line)?;
            }
            "poly" | "set" | "presentation" | "kernel" | "coord" | "probe" | "bpoint" => {
                self.enter(Phase::Body, line)?;
                self.declaration(&kw, line)?;
            }
            "task" => {
                self.enter(Phase::Body, line)?;
                let task = self.task(line)?;
                self.tasks.push(TaskSpec { line: line.no, task });
            }
            _ => return Err(at(&kt, format!("unknown statement `{}`", kw)).expecting(STATEMENTS)),
        }
        Ok(())
    }

    fn lin_elem(&self, line: &mut Line) -> Result<BElem, Diagnostic> {
        let d = self.draft.as_ref().expect("inside extension block");
        let one = d.basis.iter().position(|n| n == "1");
        let unit_vec = one.map(|u| {
            let mut v = vec![RatFunc::zero(); d.basis.len()];
            v[u] = RatFunc::one();
            v
        });
        let unit = d.unit.as_ref().or(unit_vec.as_ref());
        let ctx = LinCtx { ell: d.basis.len(), unit };
        let (e, et) = line.expr(&self.scope(true))?;
        line.end()?;
        let v: Lin = eval(&e, ctx).map_err(|m| at(&et, m))?;
        let v = v.into_elem(ctx).map_err(|m| at(&et, m))?;
        if v.len() != d.basis.len() {
            return Err(at(&et, "basis elements can only be combined linearly in extension tables"));
        }
        Ok(v)
    }

    fn basis_index(&self, line: &mut Line) -> Result<usize, Diagnostic> {
        let (n, t) = line.name_or_one("basis name")?;
        let d = self.draft.as_ref().expect("inside extension block");
        d.basis.iter().position(|b| *b == n).ok_or_else(|| at(&t, format!("unknown basis element `{}`", n)))
    }

    fn ext_entry(&mut self, kw: &str, line: &mut Line) -> Result<(), Diagnostic> {
        match kw {
            "unit" => {
                line.sym('=')?;
                let v = self.lin_elem(line)?;
                self.draft.as_mut().expect("draft").unit = Some(v);
            }
            "mult" => {
                let i = self.basis_index(line)?;
                let j = self.basis_index(line)?;
                line.sym('=')?;
                let v = self.lin_elem(line)?;
                self.draft.as_mut().expect("draft").mult.insert((i, j), v);
            }
            _ => {
                let dd = self.derivation_index(line)?;
                let j = self.basis_index(line)?;
                line.sym('=')?;
                let v = self.lin_elem(line)?;
                self.draft.as_mut().expect("draft").der.insert((dd, j), v);
            }
        }
        Ok(())
    }

    fn need_vars(&self, t: &Token) -> Result<usize, Diagnostic> {
        match &self.vars {
            Some(v) if !v.is_empty() => Ok(v.len()),
            _ => Err(at(t, "declare `vars` first")),
        }
    }

    fn poly(&self, e: &Expr, t: &Token) -> Result<DiffPoly, Diagnostic> {
        eval::<DiffPoly>(e, 0).map_err(|m| at(t, m))
    }

    fn declaration(&mut self, kw: &str, line: &mut Line) -> Result<(), Diagnostic> {
        let (name, nt) = line.ident("name")?;
        let existing = self.decls.iter().position(|(n, _)| *n == name);
        let appendable = matches!(kw, "probe" | "coord");
        if kw == "coord" {
            return self.coord(existing, &name, &nt, line);
        }
        if !(appendable && existing.is_some_and(|i| self.decls[i].1.kind() == DeclKind::Probe)) {
            self.check_new_name(&name, &nt)?;
        }
        if kw == "kernel" {
            self.need_vars(&nt)?;
            let r = line.int()? as u32;
            line.end()?;
            let kp = KernelPresentation::new(self.field.clone().expect("field"), self.need_vars(&nt)?, r)
                .map_err(|e| at(&nt, e.to_string()))?;
            self.decls.push((name, Decl::Kernel(kp)));
            return Ok(());
        }
        line.sym('=')?;
        let decl = match kw {
            "poly" => {
                let (e, et) = line.expr(&self.scope(false))?;
                line.end()?;
                Decl::Poly(self.poly(&e, &et)?)
            }
            "set" => {
                let items = line.braced_list(&self.scope(false))?;
                line.end()?;
                Decl::Set(items.iter().map(|(e, t)| self.poly(e, t)).collect::<Result<_, _>>()?)
            }
            "presentation" => {
                let desc = self.descent_or(&nt)?;
                let items = line.braced_list(&self.scope(true))?;
                line.end()?;
                Decl::Presentation(
                    items.iter().map(|(e, t)| eval::<Coords>(e, &desc).map_err(|m| at(t, m))).collect::<Result<_, _>>()?,
                )
            }
            "probe" => {
                let items = line.comma_list(&self.scope(false))?;
                line.end()?;
                let pt: Vec<RatFunc> =
                    items.iter().map(|(e, t)| eval::<RatFunc>(e, ()).map_err(|m| at(t, m))).collect::<Result<_, _>>()?;
                if let Some(i) = existing {
                    if let Decl::Probe(pts) = &mut self.decls[i].1 {
                        pts.push(pt);
                    }
                    return Ok(());
                }
                Decl::Probe(vec![pt])
            }
            _ => {
                let desc = self.descent_or(&nt)?;
                let items = line.comma_list(&self.scope(true))?;
                line.end()?;
                if items.len() != self.need_vars(&nt)? {
                    return Err(at(&nt, "a B-point needs one value per variable"));
                }
                Decl::BPoint(
                    items
                        .iter()
                        .map(|(e, t)| eval::<BElem>(e, desc.ext()).map_err(|m| at(t, m)))
                        .collect::<Result<_, _>>()?,
                )
            }
        };
        self.decls.push((name, decl));
        Ok(())
    }

    fn descent_or(&self, t: &Token) -> Result<Descent, Diagnostic> {
        self.need_vars(t)?;
        match &self.ext {
            Some(e) => Ok(Descent::new(e.clone(), self.vars.clone().unwrap_or_default())),
            None => Err(at(t, "declare an extension first")),
        }
    }

    fn coord(&mut self, existing: Option<usize>, name: &str, nt: &Token, line: &mut Line) -> Result<(), Diagnostic> {
        let Some(idx) = existing.filter(|&i| self.decls[i].1.kind() == DeclKind::Kernel) else {
            return Err(at(nt, format!("`{}` is not a declared kernel", name)));
        };
        let scope = self.scope(false);
        let (e, et) = line.expr(&scope)?;
        let v = match self.poly(&e, &et)?.indets().into_iter().collect::<Vec<_>>().as_slice() {
            [v] if DiffPoly::indet(v.clone()) == self.poly(&e, &et)? => v.clone(),
            _ => return Err(at(&et, "expected a coordinate such as x1[1]")),
        };
        let (mode, mt) = line.ident("`transcendental` or `minpoly`")?;
        let spec = match mode.as_str() {
            "transcendental" => CoordSpec::Transcendental,
            "minpoly" => {
                let (p, pt) = line.expr(&scope)?;
                CoordSpec::Algebraic(self.poly(&p, &pt)?)
            }
            _ => return Err(at(&mt, "unknown coordinate kind").expecting(&["transcendental", "minpoly"])),
        };
        line.end()?;
        if let Decl::Kernel(kp) = &mut self.decls[idx].1 {
            kp.set(&v, spec).map_err(|e| at(&et, e.to_string()))?;
        }
        Ok(())
    }

    fn arg_name(&self, line: &mut Line, kind: DeclKind) -> Result<String, Diagnostic> {
        let (n, t) = line.ident(kind.word())?;
        match self.decls.iter().find(|(m, _)| *m == n) {
            Some((_, d)) if d.kind() == kind => Ok(n),
            Some((_, d)) => Err(at(&t, format!("`{}` is a {}, expected a {}", n, d.kind().word(), kind.word()))),
            None => Err(at(&t, format!("unknown name `{}`", n))),
        }
    }

    fn task(&self, line: &mut Line) -> Result<Task, Diagnostic> {
        use DeclKind::*;
        let (op, ot) = line.ident("operation")?;
        let int32 = |line: &mut Line| -> Result<u32, Diagnostic> {
            let t = line.peek().clone();
            u32::try_from(line.int()?).map_err(|_| at(&t, "integer too large"))
        };
        let task = match op.as_str() {
            "validate_field" => Task::ValidateField,
            "validate_extension" => {
                if self.ext.is_none() {
                    return Err(at(&ot, "no extension declared"));
                }
                Task::ValidateExtension
            }
            "leader" => Task::Leader(self.arg_name(line, Poly)?),
            "differentiate" => {
                let f = self.arg_name(line, Poly)?;
                let t = line.peek().clone();
                let d = line.int()? as usize;
                if d == 0 || d > self.m {
                    return Err(at(&t, format!("derivation index out of range 1..{}", self.m)));
                }
                Task::Differentiate(f, d - 1)
            }
            "reduction_status" => Task::ReductionStatus(self.arg_name(line, Poly)?, self.arg_name(line, Poly)?),
            "divide" => Task::Divide(self.arg_name(line, Poly)?, self.arg_name(line, Set)?),
            "member" => Task::Member(self.arg_name(line, Poly)?, self.arg_name(line, Set)?),
            "autoreduce" => Task::Autoreduce(self.arg_name(line, Set)?),
            "theta" => Task::Theta(self.arg_name(line, Set)?, int32(line)?),
            "polify" => Task::Polify(self.arg_name(line, Poly)?, int32(line)?),
            "descend" => Task::Descend(self.arg_name(line, Presentation)?),
            "thm32" => Task::Thm32(self.arg_name(line, Presentation)?),
            "thm33" => {
                if self.ext.is_none() {
                    return Err(at(&ot, "no extension declared"));
                }
                let scope = self.scope(false);
                let (a, at1) = line.expr(&scope)?;
                let (b, at2) = line.expr(&scope)?;
                Task::Thm33(eval(&a, ()).map_err(|m| at(&at1, m))?, eval(&b, ()).map_err(|m| at(&at2, m))?)
            }
            "transfer" => Task::Transfer(self.arg_name(line, Presentation)?, self.arg_name(line, BPoint)?),
            "gamma" => {
                self.need_vars(&ot)?;
                Task::Gamma(int32(line)?)
            }
            "prolong" => Task::Prolong(self.arg_name(line, Set)?, int32(line)?),
            "tau1" => Task::Tau1(self.arg_name(line, Set)?),
            "ucm" => Task::Ucm(self.arg_name(line, Set)?, int32(line)?),
            "jet" => Task::Jet(self.arg_name(line, Set)?, int32(line)?),
            "partition" => Task::Partition(self.arg_name(line, Set)?, int32(line)?, int32(line)?),
            "bounds" => {
                let (which, wt) = line.ident("`C`, `A` or `alpha_beta`")?;
                match which.as_str() {
                    "C" => Task::BoundC(line.int()?, line.int()?, line.int()?),
                    "A" => Task::Ackermann(line.int()?, line.int()?),
                    "alpha_beta" => Task::AlphaBeta(line.int()?, line.int()?),
                    _ => return Err(at(&wt, "unknown bound").expecting(&["C", "A", "alpha_beta"])),
                }
            }
            "index_maps" => Task::IndexMaps(line.int()? as usize, line.int()? as usize),
            "leaders" => Task::Leaders(self.arg_name(line, Kernel)?),
            "validate_kernel" => Task::ValidateKernel(self.arg_name(line, Kernel)?),
            "diamond" => {
                self.need_vars(&ot)?;
                Task::Diamond(self.arg_name(line, Set)?, self.arg_name(line, Set)?, self.arg_name(line, Probe)?)
            }
            _ => return Err(at(&ot, format!("unknown operation `{}`", op)).expecting(OPERATIONS)),
        };
        line.end()?;
        Ok(task)
    }
}

pub const OPERATIONS: &[&str] = &[
    "validate_field",
    "validate_extension",
    "leader",
    "differentiate",
    "reduction_status",
    "divide",
    "member",
    "autoreduce",
    "theta",
    "polify",
    "descend",
    "thm32",
    "thm33",
    "transfer",
    "gamma",
    "prolong",
    "tau1",
    "ucm",
    "jet",
    "partition",
    "bounds",
    "index_maps",
    "leaders",
    "validate_kernel",
    "diamond",
];

/// Parses one expression over the file's field and variables.
pub fn parse_poly(tf: &TaskFile, src: &str) -> Result<DiffPoly, Diagnostic> {
    let scope = Scope { field: tf.field.names().to_vec(), vars: tf.vars.clone(), basis: Vec::new(), m: tf.field.m() };
    let toks = lex(src, 1, 1)?;
    let mut p = Parser::new(&toks, 0, &scope);
    let e = p.expr()?;
    let end = &toks[p.pos()];
    if end.tok != Tok::End {
        return Err(at(end, "unexpected trailing input"));
    }
    eval::<DiffPoly>(&e, 0).map_err(|m| Diagnostic::new(1, 1, m))
}
