use std::time::Instant;

use serde_json::{json, Value};

use super::taskfile::{fmt_task, Decl, Task, TaskFile};
use crate::coeff::RatFunc;
use crate::diffpoly::{
    autoreduce, divide, fmt_indet, leader_data, membership_test, polify, reduction_status, theta_set, Autoreduced,
    DerIndet, DiffPoly, DiffRing, IndetStyle, PolPoly, RankedSet,
};
use crate::error::Error;
use crate::kernels::{
    ackermann, check_diamond, index_maps, leaders, validate_kernel, BoundTable, KernelPresentation, DEFAULT_BUDGET,
};
use crate::prolong::{gamma_set, jet_system_off_h, prolongation_equations, tau1_explicit, theta_partition, ucm_instance};
use crate::weil::{
    check_thm32, check_thm33, descend_presentation, prolong_b_point, standardize_descent, transfer_to_base,
    validate_extension, Coords, DerivationExpr, Descent, Transfer,
};

#[derive(Clone, Debug)]
pub struct RunOptions {
    pub stable: bool,
    pub order_bound: Option<u32>,
    pub budget: u64,
    pub check_certificates: bool,
}

impl Default for RunOptions {
    fn default() -> Self {
        RunOptions { stable: false, order_bound: None, budget: DEFAULT_BUDGET, check_certificates: false }
    }
}

#[derive(Clone, Debug)]
pub struct TaskResult {
    pub line: usize,
    pub op: String,
    pub passed: bool,
    pub lines: Vec<String>,
    pub result: Value,
    pub error: Option<String>,
    pub micros: u128,
}

#[derive(Clone, Debug)]
pub struct Report {
    pub results: Vec<TaskResult>,
    pub micros: u128,
}

impl Report {
    pub fn passed(&self) -> bool {
        self.results.iter().all(|r| r.passed)
    }

    pub fn exit_code(&self) -> i32 {
        if self.passed() {
            0
        } else {
            1
        }
    }

    pub fn to_text(&self) -> String {
        let mut s = String::new();
        for (i, r) in self.results.iter().enumerate() {
            s.push_str(&format!("[{}] {}: {}\n", i + 1, r.op, if r.passed { "pass" } else { "fail" }));
            for l in &r.lines {
                s.push_str(&format!("  {}\n", l));
            }
            if let Some(e) = &r.error {
                s.push_str(&format!("  error: {}\n", e));
            }
        }
        let failed = self.results.iter().filter(|r| !r.passed).count();
        s.push_str(&format!("{} tasks, {} failed\n", self.results.len(), failed));
        s
    }

    pub fn to_json(&self, stable: bool) -> String {
        let tasks: Vec<Value> = self
            .results
            .iter()
            .map(|r| {
                let mut v = json!({
                    "line": r.line,
                    "op": r.op,
                    "status": if r.passed { "pass" } else { "fail" },
                    "result": r.result,
                });
                if let Some(e) = &r.error {
                    v["error"] = json!(e);
                }
                if !stable {
                    v["elapsed_us"] = json!(r.micros as u64);
                }
                v
            })
            .collect();
        let mut v = json!({
            "schema": 1,
            "status": if self.passed() { "pass" } else { "fail" },
            "tasks": tasks,
        });
        if !stable {
            v["elapsed_us"] = json!(self.micros as u64);
        }
        serde_json::to_string_pretty(&v).expect("json") + "\n"
    }
}

/// What one task produced: text lines, JSON payload, pass flag.
type Outcome = Result<(Vec<String>, Value, bool), String>;

pub fn run(tf: &TaskFile, opts: &RunOptions) -> Report {
    let start = Instant::now();
    let table = BoundTable::new(opts.budget);
    let ctx = Ctx { tf, opts, table: &table, ring: tf.ring(), desc: tf.descent() };
    let mut results = Vec::new();
    for spec in &tf.tasks {
        let t0 = Instant::now();
        let out = ctx.exec(&spec.task);
        let micros = t0.elapsed().as_micros();
        let op = fmt_task(&spec.task, &tf.field);
        results.push(match out {
            Ok((lines, result, passed)) => TaskResult { line: spec.line, op, passed, lines, result, error: None, micros },
            Err(e) => TaskResult {
                line: spec.line,
                op,
                passed: false,
                lines: Vec::new(),
                result: Value::Null,
                error: Some(e),
                micros,
            },
        });
    }
    Report { results, micros: start.elapsed().as_micros() }
}

struct Ctx<'a> {
    tf: &'a TaskFile,
    opts: &'a RunOptions,
    table: &'a BoundTable,
    ring: DiffRing,
    desc: Option<Descent>,
}

fn estr(e: Error) -> String {
    e.to_string()
}

impl<'a> Ctx<'a> {
    fn poly(&self, name: &str) -> &DiffPoly {
        match self.tf.decl(name) {
            Some(Decl::Poly(p)) => p,
            _ => unreachable!("arguments are type-checked at parse time"),
        }
    }

    fn polys(&self, name: &str) -> &[DiffPoly] {
        match self.tf.decl(name) {
            Some(Decl::Set(p)) => p,
            _ => unreachable!("arguments are type-checked at parse time"),
        }
    }

    fn ranked(&self, name: &str) -> Result<RankedSet, String> {
        RankedSet::new(self.polys(name).to_vec()).map_err(estr)
    }

    fn relations(&self, name: &str) -> &[Coords] {
        match self.tf.decl(name) {
            Some(Decl::Presentation(p)) => p,
            _ => unreachable!("arguments are type-checked at parse time"),
        }
    }

    fn kernel(&self, name: &str) -> &KernelPresentation {
        match self.tf.decl(name) {
            Some(Decl::Kernel(k)) => k,
            _ => unreachable!("arguments are type-checked at parse time"),
        }
    }

    fn desc(&self) -> &Descent {
        self.desc.as_ref().expect("descent tasks are checked to have an extension")
    }

    fn fmt(&self, p: &DiffPoly) -> String {
        self.ring.fmt(p)
    }

    fn fmt_pol(&self, p: &DiffPoly) -> String {
        p.fmt_with(self.tf.field.names(), IndetStyle::Pol(&self.tf.vars))
    }

    fn fmt_k(&self, c: &RatFunc) -> String {
        self.tf.field.fmt(c)
    }

    fn indet(&self, v: &DerIndet) -> String {
        fmt_indet(v, IndetStyle::Diff(&self.tf.vars))
    }

    fn jet(&self, v: &DerIndet) -> String {
        fmt_indet(v, IndetStyle::Pol(&self.tf.vars))
    }

    fn order_bound(&self, relations: &[Coords]) -> u32 {
        let ord = relations.iter().flatten().map(DiffPoly::order).max().unwrap_or(0);
        self.opts.order_bound.unwrap_or(ord.max(1))
    }

    fn algebraic(&self, name: &str) -> Result<Vec<PolPoly>, String> {
        self.polys(name)
            .iter()
            .map(|p| {
                if p.order() > 0 {
                    Err(format!("{} is not algebraic in the variables", self.fmt(p)))
                } else {
                    Ok(PolPoly::from_poly(p.clone()))
                }
            })
            .collect()
    }

    fn exec(&self, task: &Task) -> Outcome {
        let field = &self.tf.field;
        match task {
            Task::ValidateField => Ok((vec!["valid".into()], json!({"valid": true}), true)),
            Task::ValidateExtension => {
                let ext = self.desc().ext();
                match validate_extension(ext) {
                    None => Ok((vec!["valid".into()], json!({"valid": true, "rank": ext.ell()}), true)),
                    Some(r) => Ok((
                        vec![format!("rejected: {} ({})", r.identity, r.detail)],
                        json!({"valid": false, "identity": r.identity, "detail": r.detail}),
                        true,
                    )),
                }
            }
            Task::Leader(f) => {
                let ld = leader_data(self.poly(f)).map_err(estr)?;
                let v = json!({
                    "leader": self.indet(&ld.leader),
                    "degree": ld.degree,
                    "separant": self.fmt(&ld.separant),
                    "initial": self.fmt(&ld.initial),
                });
                Ok((
                    vec![format!(
                        "leader {}, degree {}, separant {}, initial {}",
                        v["leader"].as_str().unwrap_or_default(),
                        ld.degree,
                        self.fmt(&ld.separant),
                        self.fmt(&ld.initial)
                    )],
                    v,
                    true,
                ))
            }
            Task::Differentiate(f, d) => {
                let g = self.ring.differentiate(*d, self.poly(f)).map_err(estr)?;
                Ok((vec![self.fmt(&g)], json!({"result": self.fmt(&g)}), true))
            }
            Task::ReductionStatus(g, f) => {
                let st = reduction_status(self.poly(g), self.poly(f)).map_err(estr)?;
                let v = serde_json::to_value(st).expect("json");
                Ok((vec![v.as_str().unwrap_or_default().to_string()], json!({"status": v}), true))
            }
            Task::Divide(f, l) => {
                let set = self.ranked(l)?;
                let cert = divide(&self.ring, self.poly(f), &set);
                let mut passed = true;
                let mut v = self.certificate_json(&cert);
                if self.opts.check_certificates {
                    let ok = cert.verify(&self.ring, self.poly(f), &set);
                    v["verified"] = json!(ok);
                    passed = ok;
                }
                Ok((vec![format!("remainder {}, ell {}", self.fmt(&cert.remainder), cert.ell)], v, passed))
            }
            Task::Member(f, l) => {
                let set = self.ranked(l)?;
                let res = membership_test(&self.ring, self.poly(f), &set);
                let mut passed = true;
                let mut v = json!({
                    "member": res.member,
                    "nonmember_needs_characteristic_set": res.nonmember_needs_characteristic_set,
                    "certificate": self.certificate_json(&res.certificate),
                });
                if self.opts.check_certificates {
                    let ok = res.certificate.verify(&self.ring, self.poly(f), &set);
                    v["verified"] = json!(ok);
                    passed = ok;
                }
                let line = if res.member { "member" } else { "not shown to be a member" };
                Ok((vec![line.to_string()], v, passed))
            }
            Task::Autoreduce(l) => match autoreduce(&self.ring, self.polys(l)) {
                Autoreduced::Set(s) => {
                    let items: Vec<String> = s.members().iter().map(|p| self.fmt(p)).collect();
                    Ok((vec![format!("{{{}}}", items.join(", "))], json!({"autoreduced": items}), true))
                }
                Autoreduced::Inconsistent(p) => Ok((
                    vec![format!("inconsistent: {}", self.fmt(&p))],
                    json!({"inconsistent": self.fmt(&p)}),
                    true,
                )),
            },
            Task::Theta(l, r) => {
                let th = theta_set(&self.ring, &self.ranked(l)?, *r).map_err(estr)?;
                let items: Vec<Value> = th
                    .iter()
                    .map(|t| json!({"source": t.source + 1, "xi": t.xi, "poly": self.fmt(&t.poly)}))
                    .collect();
                let lines = th.iter().map(|t| self.fmt(&t.poly)).collect();
                Ok((lines, json!({"theta": items}), true))
            }
            Task::Polify(f, r) => {
                let p = polify(self.poly(f), *r).map_err(estr)?;
                let s = self.fmt_pol(p.as_poly());
                Ok((vec![s.clone()], json!({"pol": s}), true))
            }
            Task::Descend(p) => self.descend(p),
            Task::Thm32(p) => {
                let rels = self.relations(p);
                let s = self.order_bound(rels);
                let rep = check_thm32(self.desc(), rels, s);
                Ok((
                    vec![format!("{} identities checked, {} failures", rep.checked, rep.failures.len())],
                    serde_json::to_value(&rep).expect("json"),
                    rep.ok(),
                ))
            }
            Task::Thm33(a1, a2) => {
                let desc = self.desc();
                let s = self.opts.order_bound.unwrap_or(2);
                let p1 = DerivationExpr::Natural(0);
                let p2 = DerivationExpr::Natural(desc.m() - 1);
                let rep = check_thm33(desc, &p1, &p2, a1, a2, s);
                Ok((
                    vec![format!("{} identities checked, {} failures", rep.checked, rep.failures.len())],
                    serde_json::to_value(&rep).expect("json"),
                    rep.ok(),
                ))
            }
            Task::Transfer(p, b) => {
                let desc = self.desc();
                let rels = self.relations(p);
                let s = self.order_bound(rels);
                let Some(Decl::BPoint(vals)) = self.tf.decl(b) else { unreachable!("type-checked") };
                let pt = prolong_b_point(desc.ext(), vals, s);
                match transfer_to_base(desc, rels, s, &pt).map_err(estr)? {
                    Transfer::Point(w) => {
                        let items: Vec<Value> = w
                            .iter()
                            .map(|(v, c)| json!([desc.fmt_w(&DiffPoly::indet(v.clone())), self.fmt_k(c)]))
                            .collect();
                        let lines = w
                            .iter()
                            .map(|(v, c)| format!("{} = {}", desc.fmt_w(&DiffPoly::indet(v.clone())), self.fmt_k(c)))
                            .collect();
                        Ok((lines, json!({"point": items}), true))
                    }
                    Transfer::Rejected(why) => {
                        Ok((vec![format!("rejected: {}", why)], json!({"rejected": why}), true))
                    }
                }
            }
            Task::Gamma(r) => {
                let g = gamma_set(self.tf.vars.len(), field.m(), *r).map_err(estr)?;
                let names: Vec<String> = g.iter().map(|v| self.jet(v)).collect();
                Ok((vec![names.join(", ")], json!({"size": g.len(), "coordinates": names}), true))
            }
            Task::Prolong(l, r) => {
                let sys = prolongation_equations(field, self.tf.vars.len(), &self.algebraic(l)?, *r).map_err(estr)?;
                let v = sys.to_json(field.names(), &self.tf.vars);
                let lines = sys.equations.iter().map(|p| self.fmt_pol(p.as_poly())).collect();
                Ok((lines, v, true))
            }
            Task::Tau1(l) => {
                let sys = tau1_explicit(field, self.tf.vars.len(), &self.algebraic(l)?).map_err(estr)?;
                let v = sys.to_json(field.names(), &self.tf.vars);
                let lines = sys.equations.iter().map(|p| self.fmt_pol(p.as_poly())).collect();
                Ok((lines, v, true))
            }
            Task::Ucm(l, r) | Task::Jet(l, r) => {
                let set = self.ranked(l)?;
                let inst = if matches!(task, Task::Ucm(..)) {
                    ucm_instance(&self.ring, &set, *r)
                } else {
                    jet_system_off_h(&self.ring, &set, *r)
                }
                .map_err(estr)?;
                let mut lines: Vec<String> = inst.system.iter().map(|p| self.fmt_pol(p.as_poly())).collect();
                lines.push(format!("H = {}", self.fmt_pol(inst.ineq.as_poly())));
                Ok((lines, inst.to_json(field.names(), &self.tf.vars), true))
            }
            Task::Partition(l, r, s) => {
                let (t1, t2) = theta_partition(&self.ring, &self.ranked(l)?, *r, *s).map_err(estr)?;
                let a: Vec<String> = t1.iter().map(|v| self.indet(v)).collect();
                let b: Vec<String> = t2.iter().map(|v| self.indet(v)).collect();
                Ok((
                    vec![format!("theta1 = {{{}}}", a.join(", ")), format!("theta2 = {{{}}}", b.join(", "))],
                    json!({"theta1": a, "theta2": b}),
                    true,
                ))
            }
            Task::BoundC(n, r, m) => {
                let c = self.table.c(*n, *r, *m).map_err(estr)?;
                Ok((vec![c.to_string()], json!({"C": c}), true))
            }
            Task::Ackermann(x, y) => {
                let a = ackermann(*x, *y, self.table.budget()).map_err(estr)?;
                Ok((vec![a.to_string()], json!({"A": a}), true))
            }
            Task::AlphaBeta(n, m) => {
                let (a, b) = self.table.alpha_beta(*n, *m).map_err(estr)?;
                Ok((vec![format!("alpha = {}, beta = {}", a, b)], json!({"alpha": a, "beta": b}), true))
            }
            Task::IndexMaps(n, m) => {
                let maps = index_maps(self.table, *n, *m).map_err(estr)?;
                let v = json!({
                    "C": maps.c,
                    "source": maps.source.iter().map(|v| (v.xi.clone(), v.var + 1)).collect::<Vec<_>>(),
                    "pi": maps.pi,
                    "psi": maps.psi,
                    "phi": maps.phi,
                    "phi_injective": maps.phi_is_injective(),
                });
                Ok((
                    vec![format!(
                        "C = {}, |source| = {}, |pi| = {}, |psi| = {}, |phi| = {}",
                        maps.c,
                        maps.source.len(),
                        maps.pi.len(),
                        maps.psi.len(),
                        maps.phi.len()
                    )],
                    v,
                    true,
                ))
            }
            Task::Leaders(k) => {
                let (all, min) = leaders(self.kernel(k));
                let a: Vec<String> = all.iter().map(|v| self.jet(v)).collect();
                let b: Vec<String> = min.iter().map(|v| self.jet(v)).collect();
                Ok((
                    vec![format!("leaders = {{{}}}", a.join(", ")), format!("minimal = {{{}}}", b.join(", "))],
                    json!({"leaders": a, "minimal": b}),
                    true,
                ))
            }
            Task::ValidateKernel(k) => match validate_kernel(self.kernel(k)) {
                None => Ok((vec!["accepted".into()], json!({"accepted": true}), true)),
                Some(rej) => {
                    let v = json!({"accepted": false, "rejection": rej});
                    Ok((vec![format!("rejected: {}", serde_json::to_string(&rej).expect("json"))], v, true))
                }
            },
            Task::Diamond(w, piw, q) => {
                let Some(Decl::Probe(pts)) = self.tf.decl(q) else { unreachable!("type-checked") };
                let rep = check_diamond(field, self.table, self.tf.vars.len(), self.polys(w), self.polys(piw), pts)
                    .map_err(estr)?;
                let lines = rep.outcomes.iter().map(|o| serde_json::to_string(o).expect("json")).collect();
                let ok = rep.all_pass();
                Ok((lines, serde_json::to_value(&rep).expect("json"), ok))
            }
        }
    }

    fn certificate_json(&self, cert: &crate::diffpoly::DivisionCertificate) -> Value {
        json!({
            "remainder": self.fmt(&cert.remainder),
            "ell": cert.ell,
            "initial_exponents": cert.initial_exponents,
            "separant_exponents": cert.separant_exponents,
            "cofactors": cert
                .cofactors
                .iter()
                .map(|((j, xi), c)| json!({"member": j + 1, "xi": xi, "cofactor": self.fmt(c)}))
                .collect::<Vec<_>>(),
        })
    }

    fn descend(&self, p: &str) -> Outcome {
        let desc = self.desc();
        let rels = self.relations(p);
        let s = self.order_bound(rels);
        let out = descend_presentation(desc, rels, s).map_err(estr)?;
        let std = standardize_descent(desc, &out);
        let yring = desc.y_ring();
        let gens: Vec<String> = out.ideal_gens.iter().map(|g| desc.fmt_w(&g.poly)).collect();
        let std_s: Vec<String> = std.iter().map(|g| yring.fmt(g)).collect();
        let mut v = json!({
            "order_bound": s,
            "ideal_gens": out
                .ideal_gens
                .iter()
                .map(|g| json!({"relation": g.relation + 1, "coord": g.coord + 1, "poly": desc.fmt_w(&g.poly)}))
                .collect::<Vec<_>>(),
            "standardized": std_s,
        });
        let mut passed = true;
        if self.opts.check_certificates {
            let rep = check_thm32(desc, rels, s);
            v["identities_checked"] = json!(rep.checked);
            v["identity_failures"] = json!(rep.failures);
            passed = rep.ok();
        }
        Ok((
            vec![format!("ideal: {{{}}}", gens.join(", ")), format!("standardized: {{{}}}", std_s.join(", "))],
            v,
            passed,
        ))
    }
}
