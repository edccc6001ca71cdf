//! Executable checks of the structural statements about twisted, generalized
//! and `(α,β,γ)`-derivations. Each check either passes, fails with a
//! witness, or reports that its hypotheses are not met at the bound.

use std::collections::{BTreeMap, HashMap};
use std::fmt;
use std::sync::{Arc, Mutex};

use num_traits::{One, Zero};
use rayon::prelude::*;
use serde::Serialize;
use serde_json::{json, Value};

use crate::cend::{bracket_at, ConfMap, GeneralizedScalar, Morphism, Operator, Twist};
use crate::error::{Error, Result};
use crate::gmod::{pullback_into_span, span_basis, submodule_membership, Element, Parity, PolyMatrix, SparseVec};
use crate::lcsa::Algebra;
use crate::poly::{int, MPoly, Rational, Var};
use crate::solver::{
    full_space, intersect, residual, residual_for_operator, saturation_scan, space_equal,
    Constraint, DegreeBound, EquationKind, SolutionSpace,
};

const PARITIES: [Parity; 2] = [Parity::Even, Parity::Odd];

/// Elements per parity fed into pairwise bracket checks.
pub const PAIR_CAP: usize = 4;
/// Elements fed into triple (Jacobi) checks.
pub const TRIPLE_CAP: usize = 3;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub enum PropositionId {
    P2_1,
    P2_2,
    P2_3,
    P2_4,
    C2_5,
    P2_6,
    P2_7,
    P2_8,
    P4_1,
    L4_2,
    L4_3,
    P4_4,
    C4_5,
    P4_6,
    P4_7,
    T4_8,
    T4_9,
    L4_10,
    P4_11,
    P4_12,
}

impl PropositionId {
    pub const ALL: [PropositionId; 20] = [
        PropositionId::P2_1,
        PropositionId::P2_2,
        PropositionId::P2_3,
        PropositionId::P2_4,
        PropositionId::C2_5,
        PropositionId::P2_6,
        PropositionId::P2_7,
        PropositionId::P2_8,
        PropositionId::P4_1,
        PropositionId::L4_2,
        PropositionId::L4_3,
        PropositionId::P4_4,
        PropositionId::C4_5,
        PropositionId::P4_6,
        PropositionId::P4_7,
        PropositionId::T4_8,
        PropositionId::T4_9,
        PropositionId::L4_10,
        PropositionId::P4_11,
        PropositionId::P4_12,
    ];

    pub fn as_str(self) -> &'static str {
        use PropositionId::*;
        match self {
            P2_1 => "P2.1",
            P2_2 => "P2.2",
            P2_3 => "P2.3",
            P2_4 => "P2.4",
            C2_5 => "C2.5",
            P2_6 => "P2.6",
            P2_7 => "P2.7",
            P2_8 => "P2.8",
            P4_1 => "P4.1",
            L4_2 => "L4.2",
            L4_3 => "L4.3",
            P4_4 => "P4.4",
            C4_5 => "C4.5",
            P4_6 => "P4.6",
            P4_7 => "P4.7",
            T4_8 => "T4.8",
            T4_9 => "T4.9",
            L4_10 => "L4.10",
            P4_11 => "P4.11",
            P4_12 => "P4.12",
        }
    }

    pub fn parse(s: &str) -> Option<Self> {
        let norm = s.trim().to_ascii_uppercase().replace('_', ".");
        Self::ALL.into_iter().find(|p| p.as_str() == norm)
    }
}

impl fmt::Display for PropositionId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Status {
    Pass,
    Fail,
    /// Holds on every probe; not proven for all elements.
    ProbedPass,
    NotEvaluated,
    Inconclusive,
}

impl Status {
    pub fn as_str(self) -> &'static str {
        match self {
            Status::Pass => "pass",
            Status::Fail => "fail",
            Status::ProbedPass => "probed, not proven",
            Status::NotEvaluated => "not evaluated",
            Status::Inconclusive => "inconclusive",
        }
    }

    fn from_bool(ok: bool) -> Self {
        if ok {
            Status::Pass
        } else {
            Status::Fail
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Outcome {
    Pass,
    Fail,
    HypothesesNotMet,
    Inconclusive,
}

impl Outcome {
    pub fn as_str(self) -> &'static str {
        match self {
            Outcome::Pass => "pass",
            Outcome::Fail => "fail",
            Outcome::HypothesesNotMet => "hypotheses not met",
            Outcome::Inconclusive => "inconclusive",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Check {
    pub name: String,
    pub status: Status,
    pub detail: Option<String>,
}

impl Check {
    fn new(name: impl Into<String>, status: Status, detail: Option<String>) -> Self {
        Check {
            name: name.into(),
            status,
            detail,
        }
    }

    fn to_json(&self) -> Value {
        json!({"name": self.name, "status": self.status.as_str(), "detail": self.detail})
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct VerifyReport {
    pub id: PropositionId,
    pub algebra: String,
    pub bound: DegreeBound,
    pub parameters: BTreeMap<String, String>,
    pub hypotheses: Vec<Check>,
    pub claims: Vec<Check>,
    pub outcome: Outcome,
}

impl VerifyReport {
    pub fn passed(&self) -> bool {
        self.outcome == Outcome::Pass
    }

    pub fn claim_status(&self) -> Status {
        if self.claims.is_empty() || self.claims.iter().all(|c| c.status == Status::NotEvaluated) {
            Status::NotEvaluated
        } else if self.claims.iter().any(|c| c.status == Status::Fail) {
            Status::Fail
        } else if self.claims.iter().any(|c| c.status == Status::Inconclusive) {
            Status::Inconclusive
        } else {
            Status::Pass
        }
    }

    pub fn to_json(&self) -> Value {
        json!({
            "id": self.id.as_str(),
            "algebra": self.algebra,
            "bound": self.bound.to_json(),
            "parameters": self.parameters,
            "hypotheses": self.hypotheses.iter().map(Check::to_json).collect::<Vec<_>>(),
            "claim": {
                "status": self.claim_status().as_str(),
                "checks": self.claims.iter().map(Check::to_json).collect::<Vec<_>>(),
            },
            "outcome": self.outcome.as_str(),
            "scope": if self.outcome == Outcome::Pass { "verified at bound" } else { "at bound" },
        })
    }

    /// One line for the summary table.
    pub fn summary_line(&self) -> String {
        format!("{:<6} {:<22} {}", self.id.as_str(), self.algebra, self.outcome.as_str())
    }
}

/// Inputs shared by all checks.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct VerifyParams {
    pub bound: DegreeBound,
    pub sigma: Morphism,
    pub tau: Morphism,
    pub sigma_prime: Morphism,
    pub abg: [Rational; 3],
    pub delta: Rational,
    pub alpha: Rational,
    pub scale: Rational,
}

impl VerifyParams {
    /// All twisting maps the identity, `(α,β,γ) = (1,2,3)`, `δ = α = 1`,
    /// scaling factor 5.
    pub fn identity(alg: &Algebra, bound: DegreeBound) -> Self {
        let id = Morphism::identity(alg.rank());
        VerifyParams {
            bound,
            sigma: id.clone(),
            tau: id.clone(),
            sigma_prime: id,
            abg: [int(1), int(2), int(3)],
            delta: int(1),
            alpha: int(1),
            scale: int(5),
        }
    }
}

type Key = (Vec<Constraint>, Parity, DegreeBound);

/// Memoizing solver front end for one algebra.
pub struct Context<'a> {
    pub alg: &'a Algebra,
    pub params: VerifyParams,
    cache: Mutex<HashMap<Key, Arc<SolutionSpace>>>,
}

impl<'a> Context<'a> {
    pub fn new(alg: &'a Algebra, params: VerifyParams) -> Self {
        Context {
            alg,
            params,
            cache: Mutex::new(HashMap::new()),
        }
    }

    fn bound(&self) -> DegreeBound {
        self.params.bound
    }

    pub fn space(&self, cs: &[Constraint], parity: Parity) -> Result<Arc<SolutionSpace>> {
        self.space_at(cs, parity, self.bound())
    }

    fn space_at(&self, cs: &[Constraint], parity: Parity, bound: DegreeBound) -> Result<Arc<SolutionSpace>> {
        let key = (cs.to_vec(), parity, bound);
        if let Some(s) = self.cache.lock().expect("cache lock").get(&key) {
            return Ok(s.clone());
        }
        let label = cs.iter().map(Constraint::label).collect::<Vec<_>>().join("+");
        let s = if cs.is_empty() {
            Arc::new(full_space(self.alg, parity, bound)?)
        } else {
            Arc::new(crate::solver::solve_constraints(self.alg, cs, parity, bound, &label)?)
        };
        self.cache.lock().expect("cache lock").insert(key, s.clone());
        Ok(s)
    }

    pub fn kind(&self, kind: EquationKind, parity: Parity) -> Result<Arc<SolutionSpace>> {
        self.space(&[Constraint::Equation(kind)], parity)
    }

    /// Wrap a map as a twist, generalized when it is not an automorphism.
    pub fn twist(&self, m: &Morphism) -> Twist {
        if m.is_automorphism(self.alg) {
            Twist::Strict(m.clone())
        } else {
            Twist::Generalized(GeneralizedScalar(m.clone()))
        }
    }

    fn sigma_tau(&self, s: &Morphism, t: &Morphism) -> EquationKind {
        EquationKind::SigmaTau(self.twist(s), self.twist(t))
    }

    fn cder_sigma(&self, s: &Morphism) -> EquationKind {
        self.sigma_tau(s, &Morphism::identity(self.alg.rank()))
    }

    fn abg(&self, a: &Rational, b: &Rational, g: &Rational) -> EquationKind {
        EquationKind::Abg(a.clone(), b.clone(), g.clone())
    }
}

struct Builder<'c, 'a> {
    ctx: &'c Context<'a>,
    id: PropositionId,
    parameters: BTreeMap<String, String>,
    hypotheses: Vec<Check>,
    claims: Vec<Check>,
}

impl<'c, 'a> Builder<'c, 'a> {
    fn new(ctx: &'c Context<'a>, id: PropositionId) -> Self {
        Builder {
            ctx,
            id,
            parameters: BTreeMap::new(),
            hypotheses: Vec::new(),
            claims: Vec::new(),
        }
    }

    fn param(&mut self, k: &str, v: impl ToString) -> &mut Self {
        self.parameters.insert(k.to_string(), v.to_string());
        self
    }

    fn hyp(&mut self, name: impl Into<String>, status: Status, detail: Option<String>) {
        self.hypotheses.push(Check::new(name, status, detail));
    }

    fn hyp_bool(&mut self, name: impl Into<String>, ok: bool, detail: Option<String>) {
        self.hyp(name, Status::from_bool(ok), detail);
    }

    fn hypotheses_met(&self) -> bool {
        self.hypotheses
            .iter()
            .all(|h| matches!(h.status, Status::Pass | Status::ProbedPass))
    }

    fn claim(&mut self, name: impl Into<String>, status: Status, detail: Option<String>) {
        self.claims.push(Check::new(name, status, detail));
    }

    fn claim_bool(&mut self, name: impl Into<String>, ok: bool, detail: Option<String>) {
        self.claim(name, Status::from_bool(ok), detail);
    }

    /// Run the claim checks only when every hypothesis holds.
    fn claims_if_met(mut self, f: impl FnOnce(&mut Self) -> Result<()>) -> Result<VerifyReport> {
        if self.hypotheses_met() {
            f(&mut self)?;
        } else {
            self.claim("claim", Status::NotEvaluated, Some("hypotheses not met".into()));
        }
        Ok(self.finish())
    }

    fn finish(self) -> VerifyReport {
        let outcome = if !self.hypotheses_met() {
            Outcome::HypothesesNotMet
        } else if self.claims.iter().any(|c| c.status == Status::Fail) {
            Outcome::Fail
        } else if self.claims.iter().any(|c| matches!(c.status, Status::Inconclusive | Status::NotEvaluated)) {
            Outcome::Inconclusive
        } else {
            Outcome::Pass
        };
        VerifyReport {
            id: self.id,
            algebra: self.ctx.alg.name().to_string(),
            bound: self.ctx.bound(),
            parameters: self.parameters,
            hypotheses: self.hypotheses,
            claims: self.claims,
            outcome,
        }
    }

    /// Space equality per parity, with the dimension table as detail.
    fn equal_spaces(
        &mut self,
        name: &str,
        lhs: impl Fn(Parity) -> Result<Arc<SolutionSpace>>,
        rhs: impl Fn(Parity) -> Result<Arc<SolutionSpace>>,
    ) -> Result<()> {
        for p in PARITIES {
            let (a, b) = (lhs(p)?, rhs(p)?);
            let eq = space_equal(&a, &b)?;
            let detail = format!("{p}: dim {} vs {}", a.dim(), b.dim());
            self.claim_bool(format!("{name} [{p}]"), eq && a.residual_check() && b.residual_check(), Some(detail));
        }
        Ok(())
    }
}

fn first_nonzero(v: &[MPoly]) -> Option<String> {
    v.iter().find(|p| !p.is_zero()).map(|p| p.to_string())
}

fn residual_detail(v: &[MPoly]) -> (bool, Option<String>) {
    match first_nonzero(v) {
        None => (true, None),
        Some(w) => (false, Some(format!("nonzero residual {w}"))),
    }
}

fn ops_equal(a: &Operator, b: &Operator) -> (bool, Option<String>) {
    let diff = a.matrix.sub(&b.matrix).expect("same shape");
    let mut entries: Vec<MPoly> = diff.entries().to_vec();
    entries.push(&a.shift - &b.shift);
    residual_detail(&entries)
}

/// Basis elements of both parities, at most `cap` of each.
fn sample(ctx: &Context<'_>, kind: &[Constraint], cap: usize) -> Result<Vec<ConfMap>> {
    let mut out = Vec::new();
    for p in PARITIES {
        let s = ctx.space(kind, p)?;
        out.extend(s.basis().iter().take(cap).cloned());
    }
    Ok(out)
}

fn automorphism_hyp(b: &mut Builder<'_, '_>, name: &str, m: &Morphism) {
    let ok = m.is_automorphism(b.ctx.alg);
    b.hyp_bool(format!("{name} is an automorphism"), ok, None);
}

fn eq(k: EquationKind) -> Vec<Constraint> {
    vec![Constraint::Equation(k)]
}

fn residual_of(ctx: &Context<'_>, kind: &EquationKind, f: &ConfMap) -> Vec<MPoly> {
    residual(ctx.alg, &eq(kind.clone()), f.parity(), std::slice::from_ref(f))
}

fn x(i: usize) -> MPoly {
    MPoly::var(Var::SLOTS[i])
}

fn fmt_q(q: &Rational) -> String {
    if q.is_integer() {
        q.numer().to_string()
    } else {
        format!("{}/{}", q.numer(), q.denom())
    }
}

fn fmt_abg(t: &[Rational; 3]) -> String {
    format!("({},{},{})", fmt_q(&t[0]), fmt_q(&t[1]), fmt_q(&t[2]))
}

fn center_members(alg: &Algebra, vs: &[Vec<MPoly>], d_bound: usize) -> Result<(bool, Option<String>)> {
    let z = alg.center(d_bound);
    for v in vs {
        let e = Element::new(alg.basis(), v.clone())?;
        if !submodule_membership(&z, &e)? {
            return Ok((false, Some(format!("{} is not central", e.render(alg.basis())))));
        }
    }
    Ok((true, None))
}

fn max_d_degree(vs: &[Vec<MPoly>]) -> usize {
    vs.iter()
        .flatten()
        .map(|p| p.degree_in(Var::Partial).max(0) as usize)
        .max()
        .unwrap_or(0)
}

fn p2_1(ctx: &Context<'_>) -> Result<VerifyReport> {
    let (s, t) = (&ctx.params.sigma, &ctx.params.tau);
    let mut b = Builder::new(ctx, PropositionId::P2_1);
    b.param("sigma", s.name()).param("tau", t.name());
    automorphism_hyp(&mut b, "sigma", s);
    automorphism_hyp(&mut b, "tau", t);
    b.claims_if_met(|b| {
        let tinv = t.invert()?;
        let reduced = ctx.cder_sigma(&tinv.compose(s));
        let twisted = ctx.sigma_tau(s, t);
        for p in PARITIES {
            let lhs = ctx.kind(twisted.clone(), p)?;
            let rhs = ctx.kind(reduced.clone(), p)?;
            let mut ok = true;
            let mut witness = None;
            let mut round_trip = true;
            for d in lhs.basis() {
                let phi = d.after_morphism(&tinv);
                let (good, w) = residual_detail(&residual_of(ctx, &reduced, &phi));
                if !good && witness.is_none() {
                    witness = w;
                }
                ok &= good;
                round_trip &= phi.after_morphism(t) == *d;
            }
            b.claim_bool(format!("tau^-1 d re-verifies [{p}]"), ok, witness);
            b.claim_bool(
                format!("dim equality [{p}]"),
                lhs.dim() == rhs.dim(),
                Some(format!("{} vs {}", lhs.dim(), rhs.dim())),
            );
            b.claim_bool(format!("psi after phi is the identity [{p}]"), round_trip, None);
        }
        Ok(())
    })
}

type Family<'f> = Box<dyn Fn(&MPoly) -> Operator + Sync + 'f>;

fn family(f: &ConfMap) -> Family<'_> {
    Box::new(move |s: &MPoly| f.at(s))
}

/// `σ ∘ [σ⁻¹a_param σ⁻¹b]` at total slot `slot`.
fn twisted(
    sigma: &Morphism,
    sinv: &Morphism,
    a: &dyn Fn(&MPoly) -> Operator,
    pa: Parity,
    b: &dyn Fn(&MPoly) -> Operator,
    pb: Parity,
    param: &MPoly,
    slot: &MPoly,
) -> Operator {
    let inner = bracket_at(
        |p: &MPoly| sinv.op().then(&a(p)),
        pa,
        |p: &MPoly| sinv.op().then(&b(p)),
        pb,
        param,
        slot,
    );
    sigma.op().then(&inner)
}

fn p2_2(ctx: &Context<'_>) -> Result<VerifyReport> {
    let s = &ctx.params.sigma;
    let mut b = Builder::new(ctx, PropositionId::P2_2);
    b.param("sigma", s.name());
    automorphism_hyp(&mut b, "sigma", s);
    b.claims_if_met(|b| {
        let sinv = s.invert()?;
        let kind = ctx.sigma_tau(s, s);
        let elems = sample(ctx, &eq(kind.clone()), PAIR_CAP)?;
        let (x0, x1, x2) = (x(0), x(1), x(2));
        let mut iso = (true, None);
        for f in &elems {
            let r = residual_of(ctx, &EquationKind::Der, &f.after_morphism(&sinv));
            let c = residual_detail(&r);
            if !c.0 && iso.0 {
                iso = c;
            }
        }
        b.claim("phi_sigma maps into CDer", Status::from_bool(iso.0), iso.1);
        let pairs: Vec<(&ConfMap, &ConfMap)> = elems.iter().flat_map(|f| elems.iter().map(move |g| (f, g))).collect();
        let results: Vec<[(bool, Option<String>); 4]> = pairs
            .par_iter()
            .map(|(f, g)| {
                let (pf, pg) = (f.parity(), g.parity());
                let fg = twisted(s, &sinv, &family(f), pf, &family(g), pg, &x0, &x1);
                let df = f.partial();
                let c1 = ops_equal(
                    &twisted(s, &sinv, &family(&df), pf, &family(g), pg, &x0, &x1),
                    &fg.scale(&-&x0),
                );
                let sign = MPoly::from_int(-Parity::sign(pf, pg));
                let gf = twisted(s, &sinv, &family(g), pg, &family(f), pf, &(&x1 - &x0), &x1);
                let c2 = ops_equal(&fg, &gf.scale(&sign));
                let closure = residual_detail(&residual_for_operator(ctx.alg, &kind, pf + pg, &fg, &x1, &x2));
                let plain = bracket_at(
                    |p: &MPoly| sinv.op().then(&f.at(p)),
                    pf,
                    |p: &MPoly| sinv.op().then(&g.at(p)),
                    pg,
                    &x0,
                    &x1,
                );
                let inter = ops_equal(&sinv.op().then(&fg), &plain);
                [c1, c2, closure, inter]
            })
            .collect();
        let names = [
            "twisted bracket sesquilinearity",
            "twisted bracket skew-symmetry",
            "twisted bracket closes in CDer_(sigma,sigma)",
            "phi_sigma intertwines brackets",
        ];
        for (k, name) in names.iter().enumerate() {
            let bad = results.iter().find(|r| !r[k].0);
            b.claim(
                *name,
                Status::from_bool(bad.is_none()),
                bad.and_then(|r| r[k].1.clone()).or(Some(format!("{} pairs", results.len()))),
            );
        }
        let trip: Vec<&ConfMap> = elems.iter().take(TRIPLE_CAP).collect();
        let mut triples: Vec<(&ConfMap, &ConfMap, &ConfMap)> = Vec::new();
        for f in &trip {
            for g in &trip {
                for h in &trip {
                    triples.push((*f, *g, *h));
                }
            }
        }
        let jac: Vec<(bool, Option<String>)> = triples
            .par_iter()
            .map(|(f, g, h)| {
                let (pf, pg, ph) = (f.parity(), g.parity(), h.parity());
                let gh = |sl: &MPoly| twisted(s, &sinv, &family(g), pg, &family(h), ph, &x1, sl);
                let lhs = twisted(s, &sinv, &family(f), pf, &gh, pg + ph, &x0, &x2);
                let fg = |sl: &MPoly| twisted(s, &sinv, &family(f), pf, &family(g), pg, &x0, sl);
                let r1 = twisted(s, &sinv, &fg, pf + pg, &family(h), ph, &(&x0 + &x1), &x2);
                let fh = |sl: &MPoly| twisted(s, &sinv, &family(f), pf, &family(h), ph, &x0, sl);
                let r2 = twisted(s, &sinv, &family(g), pg, &fh, pf + ph, &x1, &x2);
                let sign = MPoly::from_int(Parity::sign(pf, pg));
                ops_equal(&lhs, &r1.add(&r2.scale(&sign)))
            })
            .collect();
        let bad = jac.iter().find(|r| !r.0);
        b.claim(
            "twisted bracket Jacobi identity",
            Status::from_bool(bad.is_none()),
            bad.and_then(|r| r.1.clone()).or(Some(format!("{} triples", jac.len()))),
        );
        Ok(())
    })
}

fn p2_3(ctx: &Context<'_>) -> Result<VerifyReport> {
    let (s, t) = (&ctx.params.sigma, &ctx.params.tau);
    let mut b = Builder::new(ctx, PropositionId::P2_3);
    b.param("sigma", s.name()).param("tau", t.name());
    let diff = s.sub(t);
    let cols = diff.matrix().columns();
    let (ok, detail) = center_members(ctx.alg, &cols, max_d_degree(&cols) + ctx.bound().slack as usize)?;
    b.hyp_bool("(sigma - tau)(R) is central", ok, detail);
    b.claims_if_met(|b| {
        b.equal_spaces(
            "CDer_sigma = CDer_tau",
            |p| ctx.kind(ctx.cder_sigma(s), p),
            |p| ctx.kind(ctx.cder_sigma(t), p),
        )
    })
}

/// Three-slot residual of `[f_x₀ g]_x₁` against `kind` with `λ = x₁`,
/// `μ = x₂`.
fn bracket_residual(ctx: &Context<'_>, kind: &EquationKind, f: &ConfMap, g: &ConfMap) -> Vec<MPoly> {
    let op = bracket_at(|p: &MPoly| f.at(p), f.parity(), |p: &MPoly| g.at(p), g.parity(), &x(0), &x(1));
    residual_for_operator(ctx.alg, kind, f.parity() + g.parity(), &op, &x(1), &x(2))
}

fn bracket_claim(
    b: &mut Builder<'_, '_>,
    name: &str,
    kind: &EquationKind,
    fs: &[ConfMap],
    gs: &[ConfMap],
) {
    let ctx = b.ctx;
    let pairs: Vec<(&ConfMap, &ConfMap)> = fs.iter().flat_map(|f| gs.iter().map(move |g| (f, g))).collect();
    let res: Vec<(bool, Option<String>)> = pairs
        .par_iter()
        .map(|(f, g)| residual_detail(&bracket_residual(ctx, kind, f, g)))
        .collect();
    let bad = res.iter().find(|r| !r.0);
    b.claim(
        name,
        Status::from_bool(bad.is_none()),
        bad.and_then(|r| r.1.clone()).or(Some(format!("{} pairs", res.len()))),
    );
}

fn p2_4(ctx: &Context<'_>) -> Result<VerifyReport> {
    let (s, s2) = (&ctx.params.sigma, &ctx.params.sigma_prime);
    let mut b = Builder::new(ctx, PropositionId::P2_4);
    b.param("sigma", s.name()).param("sigma_prime", s2.name());
    automorphism_hyp(&mut b, "sigma", s);
    automorphism_hyp(&mut b, "sigma_prime", s2);
    b.hyp_bool("sigma and sigma_prime commute", s.commutes_with(s2), None);
    let fcs = vec![Constraint::Equation(ctx.cder_sigma(s)), Constraint::CommutesWith(s2.clone())];
    let gcs = vec![Constraint::Equation(ctx.cder_sigma(s2)), Constraint::CommutesWith(s.clone())];
    let fs = sample(ctx, &fcs, PAIR_CAP)?;
    let gs = sample(ctx, &gcs, PAIR_CAP)?;
    b.hyp_bool("f commutes with sigma_prime", fs.iter().all(|f| f.commutes_with(s2)), Some(format!("{} maps", fs.len())));
    b.hyp_bool("g commutes with sigma", gs.iter().all(|g| g.commutes_with(s)), Some(format!("{} maps", gs.len())));
    b.claims_if_met(|b| {
        let kind = ctx.cder_sigma(&s.compose(s2));
        bracket_claim(b, "[f_x g] lies in CDer_(sigma sigma')", &kind, &fs, &gs);
        Ok(())
    })
}

fn c2_5(ctx: &Context<'_>) -> Result<VerifyReport> {
    let s = &ctx.params.sigma;
    let mut b = Builder::new(ctx, PropositionId::C2_5);
    b.param("sigma", s.name());
    automorphism_hyp(&mut b, "sigma", s);
    b.hyp_bool("sigma^2 = id", s.compose(s).is_identity(), None);
    let kind = ctx.cder_sigma(s);
    let mut commute = true;
    for p in PARITIES {
        commute &= ctx.kind(kind.clone(), p)?.basis().iter().all(|f| f.commutes_with(s));
    }
    b.hyp_bool("sigma commutes with CDer_sigma", commute, None);
    b.claims_if_met(|b| {
        let fs = sample(ctx, &eq(kind.clone()), PAIR_CAP)?;
        bracket_claim(b, "[f_x g] lies in CDer_(sigma^2)", &ctx.cder_sigma(&s.compose(s)), &fs, &fs);
        bracket_claim(b, "CDer_sigma closed under the gc bracket", &kind, &fs, &fs);
        Ok(())
    })
}

fn p2_6(ctx: &Context<'_>) -> Result<VerifyReport> {
    let (s, t) = (&ctx.params.sigma, &ctx.params.tau);
    let mut b = Builder::new(ctx, PropositionId::P2_6);
    b.param("sigma", s.name()).param("tau", t.name());
    automorphism_hyp(&mut b, "sigma", s);
    automorphism_hyp(&mut b, "tau", t);
    b.claims_if_met(|b| {
        let left = ctx.sigma_tau(&t.compose(s), t);
        let right = ctx.sigma_tau(&s.compose(t), t);
        let ds = sample(ctx, &eq(ctx.cder_sigma(s)), usize::MAX)?;
        let mut l = (true, None);
        let mut r = (true, None);
        for d in &ds {
            let a = residual_detail(&residual_of(ctx, &left, &d.after_morphism(t)));
            if !a.0 && l.0 {
                l = a;
            }
            let c = residual_detail(&residual_of(ctx, &right, &d.before_morphism(t)));
            if !c.0 && r.0 {
                r = c;
            }
        }
        b.claim("tau d in CDer_(tau sigma, tau)", Status::from_bool(l.0), l.1.or(Some(format!("{} maps", ds.len()))));
        b.claim("d tau in CDer_(sigma tau, tau)", Status::from_bool(r.0), r.1.or(Some(format!("{} maps", ds.len()))));
        Ok(())
    })
}

/// Basis elements, their `∂`- and `(∂+1)`-dressings, pairwise sums and the
/// sum of all basis elements.
pub fn probe_set(alg: &Algebra) -> Vec<Vec<MPoly>> {
    let n = alg.rank();
    let d = MPoly::var(Var::Partial);
    let mut out = Vec::new();
    for i in 0..n {
        for p in [MPoly::one(), d.clone(), &d + &MPoly::one()] {
            let mut v = vec![MPoly::zero(); n];
            v[i] = p;
            out.push(v);
        }
    }
    for i in 0..n {
        for j in i + 1..n {
            let mut v = vec![MPoly::zero(); n];
            v[i] = MPoly::one();
            v[j] = MPoly::one();
            out.push(v);
        }
    }
    if n > 2 {
        out.push(vec![MPoly::one(); n]);
    }
    out
}

fn p2_7(ctx: &Context<'_>) -> Result<VerifyReport> {
    let (s, t) = (&ctx.params.sigma, &ctx.params.tau);
    let alg = ctx.alg;
    let mut b = Builder::new(ctx, PropositionId::P2_7);
    b.param("sigma", s.name()).param("tau", t.name());
    automorphism_hyp(&mut b, "sigma", s);
    automorphism_hyp(&mut b, "tau", t);
    if b.hypotheses_met() {
        let st = s.invert()?.compose(t);
        let probes = probe_set(alg);
        let failing = probes.iter().find(|c| {
            let tc = st.apply(c);
            let w: Vec<MPoly> = c.iter().zip(&tc).map(|(a, b)| a - b).collect();
            alg.bracket_raw(c, &w, &x(0)).iter().all(MPoly::is_zero)
        });
        match failing {
            None => b.hyp(
                "c - sigma^-1 tau c outside Z_c(R)",
                Status::ProbedPass,
                Some(format!("{} probes", probes.len())),
            ),
            Some(c) => b.hyp(
                "c - sigma^-1 tau c outside Z_c(R)",
                Status::Fail,
                Some(format!("fails at c = {}", crate::gmod::render_vector(c, alg.basis()))),
            ),
        }
    }
    b.claims_if_met(|b| {
        for p in PARITIES {
            let i = intersect(alg, &*ctx.kind(ctx.cder_sigma(s), p)?, &*ctx.kind(ctx.cder_sigma(t), p)?)?;
            b.claim_bool(format!("CDer_sigma and CDer_tau meet in 0 [{p}]"), i.dim() == 0, Some(format!("dim {}", i.dim())));
        }
        Ok(())
    })
}

fn p2_8(ctx: &Context<'_>) -> Result<VerifyReport> {
    let s = &ctx.params.sigma;
    let alg = ctx.alg;
    let mut b = Builder::new(ctx, PropositionId::P2_8);
    b.param("sigma", s.name());
    automorphism_hyp(&mut b, "sigma", s);
    let cs = vec![Constraint::Equation(ctx.cder_sigma(s)), Constraint::CommutatorCentral(s.clone())];
    let mut ds = Vec::new();
    for p in PARITIES {
        ds.extend(ctx.space(&cs, p)?.basis().iter().cloned());
    }
    let mut central = (true, None);
    for d in &ds {
        let e = d.commutator_with(s);
        let mut cols = Vec::new();
        for col in e.columns() {
            let deg = col.iter().map(|p| p.degree_in(Var::X0)).max().unwrap_or(-1);
            for q in 0..=deg.max(0) as u32 {
                cols.push(col.iter().map(|p| p.coefficient_of(Var::X0, q)).collect::<Vec<_>>());
            }
        }
        let r = center_members(alg, &cols, max_d_degree(&cols) + ctx.bound().slack as usize)?;
        if !r.0 && central.0 {
            central = r;
        }
    }
    b.hyp(
        "(d sigma - sigma d)(R) is central",
        if ds.is_empty() { Status::Fail } else { Status::from_bool(central.0) },
        if ds.is_empty() {
            Some("vacuous: no nonzero d satisfies the hypothesis at bound".into())
        } else {
            central.1.or(Some(format!("{} maps", ds.len())))
        },
    );
    b.claims_if_met(|b| {
        let derived = alg.derived_subalgebra().columns();
        let mut ok = (true, None);
        for d in &ds {
            let e = d.at(&x(0)).then(&s.op()).sub(&s.op().then(&d.at(&x(0))));
            for g in &derived {
                let r = residual_detail(&e.apply(g));
                if !r.0 && ok.0 {
                    ok = r;
                }
            }
        }
        b.claim(
            "[R,R] in the kernel of d sigma - sigma d",
            Status::from_bool(ok.0),
            ok.1.or(Some(format!("{} maps, {} generators", ds.len(), derived.len()))),
        );
        Ok(())
    })
}

fn p4_1(ctx: &Context<'_>) -> Result<VerifyReport> {
    let s = &ctx.params.sigma;
    let mut b = Builder::new(ctx, PropositionId::P4_1);
    b.param("sigma", s.name());
    let z = ctx.alg.center(ctx.bound().d_partial as usize + ctx.bound().slack as usize);
    b.hyp_bool("Z(R) = 0", z.cols() == 0, Some(format!("{} central elements at bound", z.cols())));
    b.claims_if_met(|b| {
        for p in PARITIES {
            let i = intersect(ctx.alg, &*ctx.kind(EquationKind::Centroid, p)?, &*ctx.kind(ctx.cder_sigma(s), p)?)?;
            b.claim_bool(format!("C(R) and CDer_sigma meet in 0 [{p}]"), i.dim() == 0, Some(format!("dim {}", i.dim())));
        }
        Ok(())
    })
}

/// `ad(v)` at slot `slot`: column `j` is `[v_slot aⱼ]`.
fn ad_op(alg: &Algebra, v: &[MPoly], slot: &MPoly) -> Operator {
    let cols: Vec<Vec<MPoly>> = (0..alg.rank()).map(|j| alg.bracket_raw(v, &alg.unit(j), slot)).collect();
    Operator {
        matrix: PolyMatrix::from_columns(alg.rank(), &cols),
        shift: slot.clone(),
    }
}

fn l4_2(ctx: &Context<'_>) -> Result<VerifyReport> {
    let s = &ctx.params.sigma;
    let alg = ctx.alg;
    let mut b = Builder::new(ctx, PropositionId::L4_2);
    b.param("sigma", s.name());
    automorphism_hyp(&mut b, "sigma", s);
    b.claims_if_met(|b| {
        let sinv = s.invert()?;
        let ds = sample(ctx, &eq(ctx.cder_sigma(s)), usize::MAX)?;
        let mut ok = (true, None);
        let mut count = 0;
        for d in &ds {
            for i in 0..alg.rank() {
                let a = Element::basis_vector(alg.basis(), i, MPoly::one())?;
                let ad = alg.adjoint(&a)?;
                let lhs = bracket_at(|p: &MPoly| d.at(p), d.parity(), |p: &MPoly| ad.at(p), ad.parity(), &x(0), &x(1));
                let v = sinv.apply(&d.at(&x(0)).apply(&alg.unit(i)));
                let rhs = s.op().then(&ad_op(alg, &v, &x(1)));
                let r = ops_equal(&lhs, &rhs);
                if !r.0 && ok.0 {
                    ok = r;
                }
                count += 1;
            }
        }
        b.claim(
            "[d_x ad(a)] = sigma ad(sigma^-1 d_x a)",
            Status::from_bool(ok.0),
            ok.1.or(Some(format!("{count} (d, a) pairs"))),
        );
        Ok(())
    })
}

fn l4_3(ctx: &Context<'_>) -> Result<VerifyReport> {
    let s = &ctx.params.sigma;
    let alg = ctx.alg;
    let mut b = Builder::new(ctx, PropositionId::L4_3);
    b.param("sigma", s.name());
    automorphism_hyp(&mut b, "sigma", s);
    b.claims_if_met(|b| {
        let sinv = s.invert()?;
        let phi = |d: &ConfMap, i: usize| -> Operator {
            let v = sinv.apply(&d.at(&x(0)).apply(&alg.unit(i)));
            ad_op(alg, &v, &x(2))
        };
        let ds = sample(ctx, &eq(ctx.cder_sigma(s)), PAIR_CAP)?;
        let mut add = (true, None);
        let mut equi = (true, None);
        for i in 0..alg.rank() {
            for f in &ds {
                let r = ops_equal(&phi(&f.partial(), i), &phi(f, i).scale(&-x(0)));
                if !r.0 && equi.0 {
                    equi = r;
                }
                for g in ds.iter().filter(|g| g.parity() == f.parity()) {
                    let r = ops_equal(&phi(&f.add(g), i), &phi(f, i).add(&phi(g, i)));
                    if !r.0 && add.0 {
                        add = r;
                    }
                }
            }
        }
        b.claim("phi_a additive", Status::from_bool(add.0), add.1);
        b.claim("phi_a d-equivariant", Status::from_bool(equi.0), equi.1);
        Ok(())
    })
}

/// Canonical rows of `{d ∈ s : d_x₀(a) ∈ Z(R)[x₀]}` via the centre slice.
fn kernel_via_center(alg: &Algebra, s: &SolutionSpace, a: &[MPoly], z: &PolyMatrix) -> Vec<SparseVec> {
    let mut keys: BTreeMap<(usize, u32, u32), usize> = BTreeMap::new();
    let mut free = |v: &[MPoly]| -> SparseVec {
        let mut out = SparseVec::new();
        for (k, p) in v.iter().enumerate() {
            for (e, c) in p.terms() {
                let next = keys.len();
                let idx = *keys.entry((k, e[0], e[1])).or_insert(next);
                out.insert(idx, c.clone());
            }
        }
        out
    };
    let images: Vec<SparseVec> = s.basis().iter().map(|d| free(&d.at(&x(0)).apply(a))).collect();
    let lam = MPoly::var(Var::X0);
    let mut span = Vec::new();
    for q in 0..=s.bound().d_lambda {
        for col in z.columns() {
            let v: Vec<MPoly> = col.iter().map(|p| p * &lam.pow(q)).collect();
            span.push(free(&v));
        }
    }
    let _ = alg;
    let coeffs = pullback_into_span(&images, &span);
    let rows: Vec<SparseVec> = coeffs
        .iter()
        .map(|c| {
            let mut v = SparseVec::new();
            for (i, x) in c {
                crate::gmod::axpy(&mut v, x, &s.coords()[*i]);
            }
            v
        })
        .collect();
    span_basis(&rows)
}

fn p4_4(ctx: &Context<'_>) -> Result<VerifyReport> {
    let s = &ctx.params.sigma;
    let alg = ctx.alg;
    let mut b = Builder::new(ctx, PropositionId::P4_4);
    b.param("sigma", s.name());
    automorphism_hyp(&mut b, "sigma", s);
    b.claims_if_met(|b| {
        let z = alg.center(ctx.bound().d_partial as usize);
        for i in 0..alg.rank() {
            let a = alg.unit(i);
            let name = &alg.basis().names()[i];
            let mut closure_elems = Vec::new();
            for p in PARITIES {
                let full = ctx.kind(ctx.cder_sigma(s), p)?;
                let k1 = kernel_via_center(alg, &full, &a, &z);
                let k2 = ctx.space(
                    &[Constraint::Equation(ctx.cder_sigma(s)), Constraint::BracketKills(a.clone())],
                    p,
                )?;
                b.claim_bool(
                    format!("Ker phi_{name}: central image = bracket kill [{p}]"),
                    k1 == k2.coords(),
                    Some(format!("dim {} vs {}", k1.len(), k2.dim())),
                );
                closure_elems.extend(k2.basis().iter().take(PAIR_CAP).cloned());
            }
            let mut ok = (true, None);
            for f in &closure_elems {
                for g in &closure_elems {
                    let op = bracket_at(|p: &MPoly| f.at(p), f.parity(), |p: &MPoly| g.at(p), g.parity(), &x(0), &x(1));
                    let img = op.apply(&a);
                    let r: Vec<MPoly> = (0..alg.rank())
                        .flat_map(|j| alg.bracket_raw(&img, &alg.unit(j), &x(2)))
                        .collect();
                    let r = residual_detail(&r);
                    if !r.0 && ok.0 {
                        ok = r;
                    }
                }
            }
            b.claim(
                format!("Ker phi_{name} closed under the gc bracket"),
                Status::from_bool(ok.0),
                ok.1.or(Some(format!("{} maps", closure_elems.len()))),
            );
        }
        Ok(())
    })
}

fn c4_5(ctx: &Context<'_>) -> Result<VerifyReport> {
    let s = &ctx.params.sigma;
    let alg = ctx.alg;
    let mut b = Builder::new(ctx, PropositionId::C4_5);
    b.param("sigma", s.name());
    automorphism_hyp(&mut b, "sigma", s);
    let z = alg.center(ctx.bound().d_partial as usize + ctx.bound().slack as usize);
    b.hyp_bool("Z(R) = 0", z.cols() == 0, Some(format!("{} central elements at bound", z.cols())));
    let kind = ctx.cder_sigma(s);
    let mut candidates: Vec<Vec<MPoly>> = (0..alg.rank()).map(|i| alg.unit(i)).collect();
    if alg.rank() > 1 {
        candidates.push(vec![MPoly::one(); alg.rank()]);
    }
    let mut found = None;
    if b.hypotheses_met() {
        for c in &candidates {
            let mut injective = true;
            for p in PARITIES {
                let k = ctx.space(&[Constraint::Equation(kind.clone()), Constraint::Annihilates(vec![c.clone()])], p)?;
                injective &= k.dim() == 0;
            }
            if injective {
                found = Some(c.clone());
                break;
            }
        }
        match &found {
            Some(c) => b.hyp(
                "a0 with d(a0) != 0 for all nonzero d",
                Status::ProbedPass,
                Some(format!("a0 = {}", crate::gmod::render_vector(c, alg.basis()))),
            ),
            None => b.hyp(
                "a0 with d(a0) != 0 for all nonzero d",
                Status::Fail,
                Some(format!("no probe among {} candidates", candidates.len())),
            ),
        }
    }
    b.claims_if_met(|b| {
        let mut total = 0;
        let mut saturated = true;
        for p in PARITIES {
            let r = saturation_scan(alg, &eq(kind.clone()), p, ctx.bound(), 2)?;
            saturated &= r.saturated;
            total += r.rank;
        }
        if saturated {
            b.claim_bool(
                "rank CDer_sigma <= rank R",
                total <= alg.rank(),
                Some(format!("{} <= {}", total, alg.rank())),
            );
        } else {
            b.claim("rank CDer_sigma <= rank R", Status::Inconclusive, Some("unsaturated at bound".into()));
        }
        Ok(())
    })
}

fn p4_6(ctx: &Context<'_>) -> Result<VerifyReport> {
    let [a, bb, g] = ctx.params.abg.clone();
    let k = ctx.params.scale.clone();
    let mut b = Builder::new(ctx, PropositionId::P4_6);
    b.param("abg", fmt_abg(&ctx.params.abg)).param("scale", fmt_q(&k));
    b.hyp_bool("scale is nonzero", !k.is_zero(), None);
    b.claims_if_met(|b| {
        let one = int(1);
        let zero = int(0);
        b.equal_spaces(
            "(1) CDer_(1,1,1) = CDer",
            |p| ctx.kind(ctx.abg(&one, &one, &one), p),
            |p| ctx.kind(EquationKind::Der, p),
        )?;
        b.equal_spaces(
            "(2) CDer_(0,1,-1) = QC",
            |p| ctx.kind(ctx.abg(&zero, &one, &-one.clone()), p),
            |p| ctx.kind(EquationKind::QCentroid, p),
        )?;
        b.equal_spaces(
            "(3) CDer_(1,0,0) and CDer_(0,1,0) meet in ZDer",
            |p| {
                Ok(Arc::new(intersect(
                    ctx.alg,
                    &*ctx.kind(ctx.abg(&one, &zero, &zero), p)?,
                    &*ctx.kind(ctx.abg(&zero, &one, &zero), p)?,
                )?))
            },
            |p| ctx.kind(EquationKind::ZDer, p),
        )?;
        b.equal_spaces(
            "(4) scaling invariance",
            |p| ctx.kind(ctx.abg(&(&a * &k), &(&bb * &k), &(&g * &k)), p),
            |p| ctx.kind(ctx.abg(&a, &bb, &g), p),
        )
    })
}

fn p4_7_claim(b: &mut Builder<'_, '_>, t: &[Rational; 3]) -> Result<()> {
    let ctx = b.ctx;
    let [a, bb, g] = t.clone();
    let two = int(2);
    b.equal_spaces(
        &format!("CDer_{} = CDer_(0,b-g,g-b) and CDer_(2a,b+g,b+g)", fmt_abg(t)),
        |p| ctx.kind(ctx.abg(&a, &bb, &g), p),
        |p| {
            Ok(Arc::new(intersect(
                ctx.alg,
                &*ctx.kind(ctx.abg(&int(0), &(&bb - &g), &(&g - &bb)), p)?,
                &*ctx.kind(ctx.abg(&(&two * &a), &(&bb + &g), &(&bb + &g)), p)?,
            )?))
        },
    )
}

fn p4_7(ctx: &Context<'_>) -> Result<VerifyReport> {
    let mut b = Builder::new(ctx, PropositionId::P4_7);
    b.param("abg", fmt_abg(&ctx.params.abg));
    let t = ctx.params.abg.clone();
    b.claims_if_met(|b| p4_7_claim(b, &t))
}

/// Which of the four normal forms `(δ,0,0)`, `(δ,1,−1)`, `(δ,1,0)`,
/// `(δ,1,1)` an `(α,β,γ)` triple reduces to.
pub fn normal_form(t: &[Rational; 3]) -> (usize, [Rational; 3]) {
    let [a, b, g] = t;
    let one = int(1);
    if b.is_zero() && g.is_zero() {
        (1, [a.clone(), int(0), int(0)])
    } else if (b + g).is_zero() {
        (2, [a / b, one, int(-1)])
    } else if b == g {
        (4, [a / b, one.clone(), one])
    } else {
        (3, [a / (b + g), one, int(0)])
    }
}

fn t4_8(ctx: &Context<'_>) -> Result<VerifyReport> {
    let mut b = Builder::new(ctx, PropositionId::T4_8);
    b.param("grid", "alpha in {0,1,2}, beta and gamma in {-1,0,1,2}");
    b.claims_if_met(|b| {
        let mut grid = Vec::new();
        for a in 0..=2 {
            for bb in -1..=2 {
                for g in -1..=2 {
                    grid.push([int(a), int(bb), int(g)]);
                }
            }
        }
        let mut fired = [0usize; 4];
        let mut bad = None;
        for t in &grid {
            let (case, nf) = normal_form(t);
            fired[case - 1] += 1;
            for p in PARITIES {
                let lhs = ctx.kind(ctx.abg(&t[0], &t[1], &t[2]), p)?;
                let rhs = ctx.kind(ctx.abg(&nf[0], &nf[1], &nf[2]), p)?;
                if !space_equal(&lhs, &rhs)? && bad.is_none() {
                    bad = Some(format!("{} vs case ({case}) {} [{p}]", fmt_abg(t), fmt_abg(&nf)));
                }
            }
        }
        b.claim(
            "every triple equals its normal form",
            Status::from_bool(bad.is_none()),
            bad.or(Some(format!(
                "{} triples; cases fired (1) {} (2) {} (3) {} (4) {}",
                grid.len(),
                fired[0],
                fired[1],
                fired[2],
                fired[3]
            ))),
        );
        Ok(())
    })
}

fn t4_9(ctx: &Context<'_>) -> Result<VerifyReport> {
    let delta = ctx.params.delta.clone();
    let alg = ctx.alg;
    let mut b = Builder::new(ctx, PropositionId::T4_9);
    b.param("delta", fmt_q(&delta));
    b.hyp_bool("delta is nonzero", !delta.is_zero(), None);
    b.claims_if_met(|b| {
        let (zero, one) = (int(0), int(1));
        let mone = int(-1);
        let two_d = &int(2) * &delta;
        b.equal_spaces(
            "(i) CDer_(0,0,0) = Cend",
            |p| ctx.kind(ctx.abg(&zero, &zero, &zero), p),
            |p| ctx.space(&[], p),
        )?;
        let derived = alg.derived_subalgebra().columns();
        b.equal_spaces(
            "(ii) CDer_(1,0,0) = maps killing [R,R]",
            |p| ctx.kind(ctx.abg(&one, &zero, &zero), p),
            |p| ctx.space(&[Constraint::Annihilates(derived.clone())], p),
        )?;
        b.equal_spaces(
            "(iii) CDer_(0,1,-1) = QC",
            |p| ctx.kind(ctx.abg(&zero, &one, &mone), p),
            |p| ctx.kind(EquationKind::QCentroid, p),
        )?;
        b.equal_spaces(
            "(iv) CDer_(delta,1,-1) = CDer_(0,1,-1) and CDer_(1,0,0)",
            |p| ctx.kind(ctx.abg(&delta, &one, &mone), p),
            |p| {
                Ok(Arc::new(intersect(
                    alg,
                    &*ctx.kind(ctx.abg(&zero, &one, &mone), p)?,
                    &*ctx.kind(ctx.abg(&one, &zero, &zero), p)?,
                )?))
            },
        )?;
        b.equal_spaces(
            "(v) CDer_(delta,1,1) = CDer_(0,0,0) and CDer_(2delta,2,2)",
            |p| ctx.kind(ctx.abg(&delta, &one, &one), p),
            |p| {
                Ok(Arc::new(intersect(
                    alg,
                    &*ctx.kind(ctx.abg(&zero, &zero, &zero), p)?,
                    &*ctx.kind(ctx.abg(&two_d, &int(2), &int(2)), p)?,
                )?))
            },
        )?;
        b.equal_spaces(
            "(vi) CDer_(delta,1,0) = CDer_(0,1,-1) and CDer_(2delta,1,1)",
            |p| ctx.kind(ctx.abg(&delta, &one, &zero), p),
            |p| {
                Ok(Arc::new(intersect(
                    alg,
                    &*ctx.kind(ctx.abg(&zero, &one, &mone), p)?,
                    &*ctx.kind(ctx.abg(&two_d, &one, &one), p)?,
                )?))
            },
        )
    })
}

fn l4_10(ctx: &Context<'_>) -> Result<VerifyReport> {
    let [a, bb, g] = ctx.params.abg.clone();
    let mut b = Builder::new(ctx, PropositionId::L4_10);
    b.param("abg", fmt_abg(&ctx.params.abg));
    b.hyp_bool("beta + gamma != 0", !(&bb + &g).is_zero(), None);
    b.hyp_bool("beta != gamma", bb != g, None);
    b.claims_if_met(|b| {
        let delta = &a / &(&bb + &g);
        b.param("delta", fmt_q(&delta));
        b.equal_spaces(
            "CDer_(a,b,g) = CDer_(a/(b+g),1,0)",
            |p| ctx.kind(ctx.abg(&a, &bb, &g), p),
            |p| ctx.kind(ctx.abg(&delta, &int(1), &int(0)), p),
        )
    })
}

fn p4_11(ctx: &Context<'_>) -> Result<VerifyReport> {
    let s = &ctx.params.sigma;
    let alpha = ctx.params.alpha.clone();
    let n = ctx.alg.rank();
    let mut b = Builder::new(ctx, PropositionId::P4_11);
    b.param("sigma", s.name()).param("alpha", fmt_q(&alpha));
    automorphism_hyp(&mut b, "sigma", s);
    let shifted = s.sub(&Morphism::scalar(n, alpha.clone(), "alpha"));
    let cols = shifted.matrix().columns();
    let (ok, detail) = center_members(ctx.alg, &cols, max_d_degree(&cols) + ctx.bound().slack as usize)?;
    b.hyp_bool("(sigma - alpha id)(R) is central", ok, detail);
    b.hyp_bool("alpha != -1", alpha != int(-1), None);
    b.claims_if_met(|b| {
        if alpha.is_one() {
            b.equal_spaces(
                "CDer_sigma = CDer",
                |p| ctx.kind(ctx.cder_sigma(s), p),
                |p| ctx.kind(EquationKind::Der, p),
            )
        } else {
            let delta = Rational::one() / (&alpha + &Rational::one());
            b.equal_spaces(
                &format!("CDer_sigma = CDer_({},1,0)", fmt_q(&delta)),
                |p| ctx.kind(ctx.cder_sigma(s), p),
                |p| ctx.kind(ctx.abg(&delta, &int(1), &int(0)), p),
            )
        }
    })
}

fn p4_12(ctx: &Context<'_>) -> Result<VerifyReport> {
    let delta = ctx.params.delta.clone();
    let n = ctx.alg.rank();
    let mut b = Builder::new(ctx, PropositionId::P4_12);
    b.param("delta", fmt_q(&delta));
    b.hyp_bool("delta is nonzero", !delta.is_zero(), None);
    b.claims_if_met(|b| {
        let id = Twist::Strict(Morphism::identity(n));
        let neg = Twist::Generalized(GeneralizedScalar(Morphism::scalar(n, int(-1), "neg_id")));
        let inv = Rational::one() / &delta;
        let scaled = Twist::Generalized(GeneralizedScalar(Morphism::scalar(n, inv.clone(), format!("{}*id", fmt_q(&inv)))));
        b.equal_spaces(
            "CDer_(delta,1,-1) = CDer_(id,-id)",
            |p| ctx.kind(ctx.abg(&delta, &int(1), &int(-1)), p),
            |p| ctx.kind(EquationKind::SigmaTau(id.clone(), neg.clone()), p),
        )?;
        b.equal_spaces(
            "CDer_(delta,1,1) = CDer_(id/delta,id/delta)",
            |p| ctx.kind(ctx.abg(&delta, &int(1), &int(1)), p),
            |p| ctx.kind(EquationKind::SigmaTau(scaled.clone(), scaled.clone()), p),
        )
    })
}

pub fn verify_with(ctx: &Context<'_>, id: PropositionId) -> Result<VerifyReport> {
    use PropositionId::*;
    if ctx.params.sigma.rank() != ctx.alg.rank()
        || ctx.params.tau.rank() != ctx.alg.rank()
        || ctx.params.sigma_prime.rank() != ctx.alg.rank()
    {
        return Err(Error::Dimension("twisting maps must match the algebra rank".into()));
    }
    ctx.alg.require_axioms()?;
    match id {
        P2_1 => p2_1(ctx),
        P2_2 => p2_2(ctx),
        P2_3 => p2_3(ctx),
        P2_4 => p2_4(ctx),
        C2_5 => c2_5(ctx),
        P2_6 => p2_6(ctx),
        P2_7 => p2_7(ctx),
        P2_8 => p2_8(ctx),
        P4_1 => p4_1(ctx),
        L4_2 => l4_2(ctx),
        L4_3 => l4_3(ctx),
        P4_4 => p4_4(ctx),
        C4_5 => c4_5(ctx),
        P4_6 => p4_6(ctx),
        P4_7 => p4_7(ctx),
        T4_8 => t4_8(ctx),
        T4_9 => t4_9(ctx),
        L4_10 => l4_10(ctx),
        P4_11 => p4_11(ctx),
        P4_12 => p4_12(ctx),
    }
}

pub fn verify(id: PropositionId, alg: &Algebra, params: &VerifyParams) -> Result<VerifyReport> {
    verify_with(&Context::new(alg, params.clone()), id)
}

/// Run several checks sharing one solver cache; reports follow `ids` order.
pub fn verify_many(ids: &[PropositionId], alg: &Algebra, params: &VerifyParams) -> Result<Vec<VerifyReport>> {
    let ctx = Context::new(alg, params.clone());
    ids.par_iter().map(|id| verify_with(&ctx, *id)).collect()
}

macro_rules! named_verifiers {
    ($($f:ident => $id:ident),* $(,)?) => {
        $(
            pub fn $f(alg: &Algebra, params: &VerifyParams) -> Result<VerifyReport> {
                verify(PropositionId::$id, alg, params)
            }
        )*
    };
}

named_verifiers! {
    verify_p2_1 => P2_1, verify_p2_2 => P2_2, verify_p2_3 => P2_3, verify_p2_4 => P2_4,
    verify_c2_5 => C2_5, verify_p2_6 => P2_6, verify_p2_7 => P2_7, verify_p2_8 => P2_8,
    verify_p4_1 => P4_1, verify_l4_2 => L4_2, verify_l4_3 => L4_3, verify_p4_4 => P4_4,
    verify_c4_5 => C4_5, verify_p4_6 => P4_6, verify_p4_7 => P4_7, verify_t4_8 => T4_8,
    verify_t4_9 => T4_9, verify_l4_10 => L4_10, verify_p4_11 => P4_11, verify_p4_12 => P4_12,
}

/// Human-readable table of outcomes.
pub fn summary_table(reports: &[VerifyReport]) -> String {
    let mut out = format!("{:<6} {:<22} {}\n", "id", "algebra", "outcome");
    for r in reports {
        out.push_str(&r.summary_line());
        out.push('\n');
    }
    out
}
