//! Generalized typed lambda calculus: term formation, free variables,
//! capture-avoiding substitution with order-preserving renaming, and the
//! equational theory decided by normalization (β, η, projections, surjective
//! pairing, terminal collapse, α).
//!
//! Terms live in the same arena as type expressions. A variable is an
//! iterated `()·` on a type, represented as the pair (type, depth); the
//! standard variables of a type are exactly depths 1, 2, ... with the
//! variable order given by depth.

use alloc::collections::{BTreeMap, BTreeSet};
use alloc::format;
use alloc::string::ToString;
use alloc::vec::Vec;

use crate::error::{Error, Result};
use crate::expr::{Expr, ExprId, NameId, World};

/// Handle of an interned term.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct TermId(pub u32);

/// A variable: iterated `()·` applied to a type, depth ≥ 1.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Var {
    pub ty: ExprId,
    pub depth: u32,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
pub enum Term {
    Var(ExprId, u32),
    /// The distinguished term `*`.
    StarT,
    /// The name `⌜A⌝` of a type.
    NameOf(ExprId),
    /// A declared constant term.
    ConstT(NameId),
    Proj1T(TermId),
    Proj2T(TermId),
    PairT(TermId, TermId),
    /// Application `s ≀ t`.
    App(TermId, TermId),
    /// `λ(x, s)`; the binder is a standard variable.
    Lam(ExprId, u32, TermId),
}

#[derive(Debug, Clone)]
pub struct TermMeta {
    pub ty: ExprId,
    /// Raw free variables (before excluding validating terms), sorted.
    pub fv: Vec<Var>,
    pub size: u32,
}

/// A lambda calculus over the world's type signature: declared constants
/// live in the world; this view carries validity data.
#[derive(Debug, Clone, Default)]
pub struct LambdaCalculus {
    /// Variables promoted to validating terms (the `Λ_x` construction);
    /// they are excluded from `FV`.
    pub validating: BTreeSet<Var>,
    /// Declared validity seeds.
    pub valid_seeds: BTreeSet<TermId>,
}

impl LambdaCalculus {
    pub fn new() -> Self {
        Self::default()
    }

    /// `Λ_x`: the same calculus with `x` taken to be a validating term.
    pub fn as_constant(&self, x: Var) -> LambdaCalculus {
        let mut c = self.clone();
        c.validating.insert(x);
        c
    }
}

impl World {
    /// View a type as an exponential: `Ent(a,b)` and identities `1_c = c ⊢ c`.
    /// η-expansion uses this node-based view.
    pub fn view_ent(&self, ty: ExprId) -> Option<(ExprId, ExprId)> {
        match self.node(ty) {
            Expr::Ent(a, b) => Some((a, b)),
            Expr::Id(c) => Some((c, c)),
            _ => None,
        }
    }

    /// The applicable-type view: additionally, an object is its own
    /// identity and hence its own hom type. η-expansion must not use this
    /// (it would not terminate at object types); application formation must.
    pub fn view_ent_full(&self, ty: ExprId) -> Option<(ExprId, ExprId)> {
        if let Some(p) = self.view_ent(ty) {
            return Some(p);
        }
        if self.is_object(ty) {
            return Some((ty, ty));
        }
        None
    }

    /// View a type as a product: wedge nodes, identities of products, and
    /// the collapsed pair forms.
    pub fn view_wedge(&mut self, ty: ExprId) -> Result<Option<(ExprId, ExprId)>> {
        self.wedge_components(ty)
    }

    fn intern_term(&mut self, t: Term, meta: TermMeta) -> TermId {
        if let Some(&id) = self.term_ids.get(&t) {
            return id;
        }
        let id = TermId(self.terms.len() as u32);
        self.terms.push(t);
        self.term_ids.insert(t, id);
        self.term_meta.push(meta);
        id
    }

    pub fn term_node(&self, id: TermId) -> Term {
        self.terms[id.0 as usize]
    }

    pub fn ty(&self, id: TermId) -> ExprId {
        self.term_meta[id.0 as usize].ty
    }

    pub fn term_size(&self, id: TermId) -> u32 {
        self.term_meta[id.0 as usize].size
    }

    /// Raw free variables, ignoring validity.
    pub fn fv_raw(&self, id: TermId) -> &[Var] {
        &self.term_meta[id.0 as usize].fv
    }

    /// Free variables per the calculus: raw minus validating variables.
    pub fn free_vars(&self, calc: &LambdaCalculus, id: TermId) -> Vec<Var> {
        self.fv_raw(id)
            .iter()
            .copied()
            .filter(|v| !calc.validating.contains(v))
            .collect()
    }

    /// Declare a constant term `k : ty`, together with its categorical
    /// counterpart: the global element `k : ⊤ → ty`.
    pub fn declare_term_const(&mut self, name: &str, ty: ExprId) -> Result<TermId> {
        let id = self.name_id(name);
        if self.term_consts.contains_key(&id) {
            return Err(Error::DuplicateName(name.to_string()));
        }
        let top = self.top();
        self.declare_gen(name, top, ty)?;
        self.term_consts.insert(id, ty);
        self.const_term(id)
    }

    pub fn term_const_type(&self, name: NameId) -> Option<ExprId> {
        self.term_consts.get(&name).copied()
    }

    // ----- constructors (enforce the typing conditions) --------------------

    pub fn var_term(&mut self, ty: ExprId, depth: u32) -> Result<TermId> {
        if depth == 0 {
            return Err(Error::IllTyped("variable depth must be positive".to_string()));
        }
        Ok(self.intern_term(
            Term::Var(ty, depth),
            TermMeta { ty, fv: alloc::vec![Var { ty, depth }], size: 1 },
        ))
    }

    pub fn star_term(&mut self) -> TermId {
        let top = self.top();
        self.intern_term(Term::StarT, TermMeta { ty: top, fv: Vec::new(), size: 1 })
    }

    pub fn name_term(&mut self, a: ExprId) -> Result<TermId> {
        let src = self.source(a);
        let tgt = self.target(a);
        let ty = self.ent(src, tgt)?;
        Ok(self.intern_term(Term::NameOf(a), TermMeta { ty, fv: Vec::new(), size: 1 }))
    }

    pub fn const_term(&mut self, name: NameId) -> Result<TermId> {
        let ty = self
            .term_const_type(name)
            .ok_or_else(|| Error::UnknownName(self.name_str(name).to_string()))?;
        Ok(self.intern_term(Term::ConstT(name), TermMeta { ty, fv: Vec::new(), size: 1 }))
    }

    pub fn proj1_term(&mut self, t: TermId) -> Result<TermId> {
        let ty = self.ty(t);
        let Some((a, _)) = self.view_wedge(ty)? else {
            return Err(Error::IllTyped(format!("pi applied at type {}", self.render(ty))));
        };
        let meta = TermMeta { ty: a, fv: self.fv_raw(t).to_vec(), size: 1 + self.term_size(t) };
        Ok(self.intern_term(Term::Proj1T(t), meta))
    }

    pub fn proj2_term(&mut self, t: TermId) -> Result<TermId> {
        let ty = self.ty(t);
        let Some((_, b)) = self.view_wedge(ty)? else {
            return Err(Error::IllTyped(format!("pi' applied at type {}", self.render(ty))));
        };
        let meta = TermMeta { ty: b, fv: self.fv_raw(t).to_vec(), size: 1 + self.term_size(t) };
        Ok(self.intern_term(Term::Proj2T(t), meta))
    }

    pub fn pair_term(&mut self, u: TermId, v: TermId) -> Result<TermId> {
        let tu = self.ty(u);
        let tv = self.ty(v);
        let ty = self.wedge(tu, tv)?;
        let fv = self.merge_fv(u, v);
        let meta = TermMeta { ty, fv, size: 1 + self.term_size(u) + self.term_size(v) };
        Ok(self.intern_term(Term::PairT(u, v), meta))
    }

    pub fn app_term(&mut self, s: TermId, t: TermId) -> Result<TermId> {
        let ts = self.ty(s);
        let Some((a, b)) = self.view_ent_full(ts) else {
            return Err(Error::IllTyped(format!(
                "application head has type {}",
                self.render(ts)
            )));
        };
        if self.ty(t) != a {
            return Err(Error::IllTyped(format!(
                "argument type {} does not match {}",
                self.render(self.ty(t)),
                self.render(a)
            )));
        }
        let fv = self.merge_fv(s, t);
        let meta = TermMeta { ty: b, fv, size: 1 + self.term_size(s) + self.term_size(t) };
        Ok(self.intern_term(Term::App(s, t), meta))
    }

    pub fn lam_term(&mut self, x: Var, body: TermId) -> Result<TermId> {
        let tb = self.ty(body);
        let ty = self.ent(x.ty, tb)?;
        let fv: Vec<Var> = self.fv_raw(body).iter().copied().filter(|v| *v != x).collect();
        let meta = TermMeta { ty, fv, size: 1 + self.term_size(body) };
        Ok(self.intern_term(Term::Lam(x.ty, x.depth, body), meta))
    }

    fn merge_fv(&self, u: TermId, v: TermId) -> Vec<Var> {
        let mut s: BTreeSet<Var> = self.fv_raw(u).iter().copied().collect();
        s.extend(self.fv_raw(v).iter().copied());
        s.into_iter().collect()
    }

    // ----- variable bookkeeping -------------------------------------------

    /// All variables appearing in `t`, free or bound, including binders.
    pub fn all_vars(&self, t: TermId, out: &mut BTreeSet<Var>) {
        match self.term_node(t) {
            Term::Var(ty, depth) => {
                out.insert(Var { ty, depth });
            }
            Term::StarT | Term::NameOf(_) | Term::ConstT(_) => {}
            Term::Proj1T(u) | Term::Proj2T(u) => self.all_vars(u, out),
            Term::PairT(u, v) | Term::App(u, v) => {
                self.all_vars(u, out);
                self.all_vars(v, out);
            }
            Term::Lam(ty, depth, b) => {
                out.insert(Var { ty, depth });
                self.all_vars(b, out);
            }
        }
    }

    /// Binders of `t` (the variables appearing captured).
    pub fn captured_vars(&self, t: TermId, out: &mut BTreeSet<Var>) {
        match self.term_node(t) {
            Term::Var(..) | Term::StarT | Term::NameOf(_) | Term::ConstT(_) => {}
            Term::Proj1T(u) | Term::Proj2T(u) => self.captured_vars(u, out),
            Term::PairT(u, v) | Term::App(u, v) => {
                self.captured_vars(u, out);
                self.captured_vars(v, out);
            }
            Term::Lam(ty, depth, b) => {
                out.insert(Var { ty, depth });
                self.captured_vars(b, out);
            }
        }
    }

    fn rename_free(&mut self, t: TermId, map: &BTreeMap<Var, Var>) -> Result<TermId> {
        if map.is_empty() {
            return Ok(t);
        }
        match self.term_node(t) {
            Term::Var(ty, depth) => {
                let v = Var { ty, depth };
                match map.get(&v) {
                    Some(w) => self.var_term(w.ty, w.depth),
                    None => Ok(t),
                }
            }
            Term::StarT | Term::NameOf(_) | Term::ConstT(_) => Ok(t),
            Term::Proj1T(u) => {
                let u = self.rename_free(u, map)?;
                self.proj1_term(u)
            }
            Term::Proj2T(u) => {
                let u = self.rename_free(u, map)?;
                self.proj2_term(u)
            }
            Term::PairT(u, v) => {
                let u = self.rename_free(u, map)?;
                let v = self.rename_free(v, map)?;
                self.pair_term(u, v)
            }
            Term::App(u, v) => {
                let u = self.rename_free(u, map)?;
                let v = self.rename_free(v, map)?;
                self.app_term(u, v)
            }
            Term::Lam(ty, depth, b) => {
                let x = Var { ty, depth };
                let mut inner = map.clone();
                inner.remove(&x);
                let b = self.rename_free(b, &inner)?;
                self.lam_term(x, b)
            }
        }
    }

    // ----- substitution -----------------------------------------------------

    /// `s[x/t]` with the order-preserving renaming scheme: the clash set
    /// `FV(t) ∩ CAP(s)` is shifted, as a whole, by the least positive
    /// increment avoiding `VAR(s) ∪ VAR(t)`.
    pub fn subst(&mut self, s: TermId, x: Var, t: TermId) -> Result<TermId> {
        if self.ty(t) != x.ty {
            return Err(Error::TypeMismatch {
                expected: self.render(x.ty),
                found: self.render(self.ty(t)),
            });
        }
        let mut cap = BTreeSet::new();
        self.captured_vars(s, &mut cap);
        let clash: BTreeSet<Var> =
            self.fv_raw(t).iter().copied().filter(|v| cap.contains(v)).collect();
        let t_prime = if clash.is_empty() {
            t
        } else {
            let mut avoid = BTreeSet::new();
            self.all_vars(s, &mut avoid);
            self.all_vars(t, &mut avoid);
            let mut n = 1u32;
            loop {
                let image: Vec<Var> =
                    clash.iter().map(|v| Var { ty: v.ty, depth: v.depth + n }).collect();
                if image.iter().all(|w| !avoid.contains(w)) {
                    break;
                }
                n += 1;
            }
            let map: BTreeMap<Var, Var> = clash
                .iter()
                .map(|v| (*v, Var { ty: v.ty, depth: v.depth + n }))
                .collect();
            self.rename_free(t, &map)?
        };
        self.replace_free(s, x, t_prime)
    }

    fn replace_free(&mut self, s: TermId, x: Var, t: TermId) -> Result<TermId> {
        if !self.fv_raw(s).contains(&x) {
            return Ok(s);
        }
        match self.term_node(s) {
            Term::Var(ty, depth) if (Var { ty, depth }) == x => Ok(t),
            Term::Var(..) | Term::StarT | Term::NameOf(_) | Term::ConstT(_) => Ok(s),
            Term::Proj1T(u) => {
                let u = self.replace_free(u, x, t)?;
                self.proj1_term(u)
            }
            Term::Proj2T(u) => {
                let u = self.replace_free(u, x, t)?;
                self.proj2_term(u)
            }
            Term::PairT(u, v) => {
                let u = self.replace_free(u, x, t)?;
                let v = self.replace_free(v, x, t)?;
                self.pair_term(u, v)
            }
            Term::App(u, v) => {
                let u = self.replace_free(u, x, t)?;
                let v = self.replace_free(v, x, t)?;
                self.app_term(u, v)
            }
            Term::Lam(ty, depth, b) => {
                if (Var { ty, depth }) == x {
                    Ok(s)
                } else {
                    let b = self.replace_free(b, x, t)?;
                    self.lam_term(Var { ty, depth }, b)
                }
            }
        }
    }

    // ----- the action of a type expression on a term -----------------------

    /// Unfold `⌜A⌝ ≀ t` along the structure of `A`. Structured heads act by
    /// their categorical reading; atoms stay as neutral name applications.
    pub fn act(&mut self, a: ExprId, t: TermId) -> Result<TermId> {
        match self.node(a) {
            Expr::Id(_) => Ok(t),
            Expr::Top => Ok(self.star_term()),
            Expr::Comp(f, g) => {
                let inner = self.act(g, t)?;
                self.act(f, inner)
            }
            Expr::Pair(f, g) => {
                let u = self.act(f, t)?;
                let v = self.act(g, t)?;
                self.pair_term(u, v)
            }
            Expr::Wedge(f, g) => {
                let p1 = self.proj1_term(t)?;
                let p2 = self.proj2_term(t)?;
                let u = self.act(f, p1)?;
                let v = self.act(g, p2)?;
                self.pair_term(u, v)
            }
            Expr::Proj1(..) => self.proj1_term(t),
            Expr::Proj2(..) => self.proj2_term(t),
            Expr::Eval(..) => {
                let f = self.proj1_term(t)?;
                let x = self.proj2_term(t)?;
                self.app_term(f, x)
            }
            Expr::Star(f) => {
                let src = self.source(f);
                let Some((_, b)) = self.wedge_components(src)? else {
                    return Err(Error::Internal("star source must be a wedge"));
                };
                let mut avoid = BTreeSet::new();
                self.all_vars(t, &mut avoid);
                let depth = 1 + avoid
                    .iter()
                    .filter(|v| v.ty == b)
                    .map(|v| v.depth)
                    .max()
                    .unwrap_or(0);
                let y = Var { ty: b, depth };
                let yv = self.var_term(b, depth)?;
                let arg = self.pair_term(t, yv)?;
                let body = self.act(f, arg)?;
                self.lam_term(y, body)
            }
            Expr::Ent(_, c) => {
                // A type edge is the generic element of its target and
                // ignores its input: translate base-pointed, so that the
                // absorption equations hold on the lambda side.
                if self.node(c) == Expr::Top {
                    return Ok(self.star_term());
                }
                let top = self.top();
                let e0 = self.ent(top, c)?;
                let n = self.name_term(e0)?;
                let st = self.star_term();
                self.app_term(n, st)
            }
            Expr::Gen(_) | Expr::Indet(_) => {
                // Objects are their own identities and act trivially.
                if self.is_object(a) {
                    return Ok(t);
                }
                let n = self.name_term(a)?;
                self.app_term(n, t)
            }
        }
    }

    fn name_unfolds(&self, a: ExprId) -> bool {
        match self.node(a) {
            // Object generators are identities and act trivially.
            Expr::Gen(_) => self.is_object(a),
            Expr::Indet(_) | Expr::Ent(..) => false,
            _ => true,
        }
    }

    // ----- normalization ----------------------------------------------------

    /// β/π/⊤/name-unfold reduction to normal form.
    fn reduce(&mut self, t: TermId) -> Result<TermId> {
        if let Some(&r) = self.term_reduce_memo.get(&t) {
            return Ok(r);
        }
        let ty = self.ty(t);
        let top = self.top();
        let r = if ty == top {
            self.star_term()
        } else {
            match self.term_node(t) {
                Term::Var(..) | Term::StarT | Term::NameOf(_) | Term::ConstT(_) => t,
                Term::Proj1T(u) => {
                    let u = self.reduce(u)?;
                    match self.term_node(u) {
                        Term::PairT(p, _) => p,
                        _ => self.proj1_term(u)?,
                    }
                }
                Term::Proj2T(u) => {
                    let u = self.reduce(u)?;
                    match self.term_node(u) {
                        Term::PairT(_, q) => q,
                        _ => self.proj2_term(u)?,
                    }
                }
                Term::PairT(u, v) => {
                    let u = self.reduce(u)?;
                    let v = self.reduce(v)?;
                    self.pair_term(u, v)?
                }
                Term::Lam(ty0, depth, b) => {
                    let b = self.reduce(b)?;
                    self.lam_term(Var { ty: ty0, depth }, b)?
                }
                Term::App(f, x) => {
                    let f = self.reduce(f)?;
                    let x = self.reduce(x)?;
                    match self.term_node(f) {
                        Term::Lam(ty0, depth, b) => {
                            let s = self.subst(b, Var { ty: ty0, depth }, x)?;
                            self.reduce(s)?
                        }
                        Term::NameOf(a) if self.name_unfolds(a) => {
                            let s = self.act(a, x)?;
                            self.reduce(s)?
                        }
                        // ⌜k⌝ ≀ * for a declared constant's global element
                        // is the constant term itself.
                        Term::NameOf(a) => {
                            if let Expr::Gen(k) = self.node(a) {
                                if self.node(self.source(a)) == Expr::Top
                                    && self.term_consts.contains_key(&k)
                                {
                                    self.const_term(k)?
                                } else {
                                    self.app_term(f, x)?
                                }
                            } else {
                                self.app_term(f, x)?
                            }
                        }
                        _ => self.app_term(f, x)?,
                    }
                }
            }
        };
        self.term_reduce_memo.insert(t, r);
        Ok(r)
    }

    /// Type-directed η/surjective-pairing expansion of a reduced term.
    /// Identity types are expanded through their views (`1_c = c ⊢ c`,
    /// `1_{a∧b} = 1_a ∧ 1_b`, products first).
    fn eta_long(&mut self, t: TermId) -> Result<TermId> {
        let ty = self.ty(t);
        if self.node(ty) == Expr::Top {
            return Ok(self.star_term());
        }
        if let Some(_) = self.view_wedge(ty)? {
            return match self.term_node(t) {
                Term::PairT(u, v) => {
                    let u = self.eta_long(u)?;
                    let v = self.eta_long(v)?;
                    self.pair_term(u, v)
                }
                _ => {
                    let p1 = self.proj1_term(t)?;
                    let p1 = self.reduce(p1)?;
                    let p1 = self.eta_long(p1)?;
                    let p2 = self.proj2_term(t)?;
                    let p2 = self.reduce(p2)?;
                    let p2 = self.eta_long(p2)?;
                    self.pair_term(p1, p2)
                }
            };
        }
        if let Some((a, _)) = self.view_ent(ty) {
            return match self.term_node(t) {
                Term::Lam(ty0, depth, b) => {
                    let b = self.eta_long(b)?;
                    self.lam_term(Var { ty: ty0, depth }, b)
                }
                _ => {
                    let mut avoid = BTreeSet::new();
                    self.all_vars(t, &mut avoid);
                    let depth = 1 + avoid
                        .iter()
                        .filter(|v| v.ty == a)
                        .map(|v| v.depth)
                        .max()
                        .unwrap_or(0);
                    let yv = self.var_term(a, depth)?;
                    let app = self.app_term(t, yv)?;
                    let app = self.reduce(app)?;
                    let body = self.eta_long(app)?;
                    self.lam_term(Var { ty: a, depth }, body)
                }
            };
        }
        self.eta_long_neutral(t)
    }

    /// Expand only the arguments of a neutral spine.
    fn eta_long_neutral(&mut self, t: TermId) -> Result<TermId> {
        match self.term_node(t) {
            Term::App(f, u) => {
                let f = self.eta_long_neutral(f)?;
                let u = self.eta_long(u)?;
                self.app_term(f, u)
            }
            Term::Proj1T(u) => {
                let u = self.eta_long_neutral(u)?;
                self.proj1_term(u)
            }
            Term::Proj2T(u) => {
                let u = self.eta_long_neutral(u)?;
                self.proj2_term(u)
            }
            _ => Ok(t),
        }
    }

    /// Canonical α-renaming: binders are renumbered in traversal order,
    /// starting above the ambient free depths of each type.
    fn alpha_canon(&mut self, t: TermId) -> Result<TermId> {
        let mut base: BTreeMap<ExprId, u32> = BTreeMap::new();
        for v in self.fv_raw(t).to_vec() {
            let e = base.entry(v.ty).or_insert(0);
            *e = (*e).max(v.depth);
        }
        let mut next = base;
        let mut env: BTreeMap<Var, u32> = BTreeMap::new();
        self.alpha_walk(t, &mut next, &mut env)
    }

    fn alpha_walk(
        &mut self,
        t: TermId,
        next: &mut BTreeMap<ExprId, u32>,
        env: &mut BTreeMap<Var, u32>,
    ) -> Result<TermId> {
        match self.term_node(t) {
            Term::Var(ty, depth) => {
                let v = Var { ty, depth };
                match env.get(&v) {
                    Some(&d) => self.var_term(ty, d),
                    None => Ok(t),
                }
            }
            Term::StarT | Term::NameOf(_) | Term::ConstT(_) => Ok(t),
            Term::Proj1T(u) => {
                let u = self.alpha_walk(u, next, env)?;
                self.proj1_term(u)
            }
            Term::Proj2T(u) => {
                let u = self.alpha_walk(u, next, env)?;
                self.proj2_term(u)
            }
            Term::PairT(u, v) => {
                let u = self.alpha_walk(u, next, env)?;
                let v = self.alpha_walk(v, next, env)?;
                self.pair_term(u, v)
            }
            Term::App(u, v) => {
                let u = self.alpha_walk(u, next, env)?;
                let v = self.alpha_walk(v, next, env)?;
                self.app_term(u, v)
            }
            Term::Lam(ty, depth, b) => {
                let counter = next.entry(ty).or_insert(0);
                *counter += 1;
                let fresh = *counter;
                let old = Var { ty, depth };
                let shadowed = env.insert(old, fresh);
                let b = self.alpha_walk(b, next, env)?;
                match shadowed {
                    Some(d) => {
                        env.insert(old, d);
                    }
                    None => {
                        env.remove(&old);
                    }
                }
                self.lam_term(Var { ty, depth: fresh }, b)
            }
        }
    }

    /// Canonical representative of the term's equality class.
    pub fn normalize_term(&mut self, t: TermId) -> Result<TermId> {
        if let Some(&r) = self.term_nf_memo.get(&t) {
            return Ok(r);
        }
        let r = self.reduce(t)?;
        let r = self.eta_long(r)?;
        let r = self.alpha_canon(r)?;
        self.term_nf_memo.insert(t, r);
        self.term_nf_memo.insert(r, r);
        Ok(r)
    }

    /// Decide term equality via canonical forms.
    pub fn term_equal(&mut self, s: TermId, t: TermId) -> Result<bool> {
        if self.ty(s) != self.ty(t) {
            return Ok(false);
        }
        let s = self.normalize_term(s)?;
        let t = self.normalize_term(t)?;
        Ok(s == t)
    }

    // ----- categorical readback --------------------------------------------

    /// Interpret a term as an arrow in the free ideal cartesian closed
    /// category over the type signature, in a nonempty variable context.
    /// The context domain is the left-nested wedge of the variable types
    /// (a single variable contributes its bare type).
    pub fn term_to_arrow(&mut self, t: TermId, ctx: &[Var]) -> Result<ExprId> {
        if ctx.is_empty() {
            return Err(Error::Internal("empty readback context"));
        }
        let dom = self.ctx_domain(ctx)?;
        self.to_arrow_in(t, ctx, dom)
    }

    fn ctx_domain(&mut self, ctx: &[Var]) -> Result<ExprId> {
        let mut dom = ctx[0].ty;
        for v in &ctx[1..] {
            dom = self.wedge(dom, v.ty)?;
        }
        Ok(dom)
    }

    fn lookup_var_arrow(&mut self, ctx: &[Var], dom: ExprId, v: Var) -> Result<Option<ExprId>> {
        let Some(pos) = ctx.iter().rposition(|&w| w == v) else {
            return Ok(None);
        };
        // Walk outward: dom = (((ty0 ∧ ty1) ∧ ...) ∧ tyn)
        let mut arrow: Option<ExprId> = None;
        let mut cur = dom;
        for i in (0..ctx.len()).rev() {
            if i == 0 {
                if pos == 0 {
                    let a = match arrow {
                        Some(a) => a,
                        None => self.id(cur)?,
                    };
                    return Ok(Some(a));
                }
                break;
            }
            let (l, r) = match self.node(cur) {
                Expr::Wedge(l, r) => (l, r),
                _ => return Err(Error::Internal("context domain shape")),
            };
            if i == pos {
                let p2 = self.proj2(l, r)?;
                let a = match arrow {
                    Some(a) => self.comp(a, p2)?,
                    None => p2,
                };
                return Ok(Some(a));
            }
            let p1 = self.proj1(l, r)?;
            arrow = Some(match arrow {
                Some(a) => self.comp(a, p1)?,
                None => p1,
            });
            cur = l;
        }
        Err(Error::Internal("variable position out of context"))
    }

    fn terminal_to(&mut self, dom: ExprId) -> Result<ExprId> {
        let top = self.top();
        self.ent(dom, top)
    }

    /// The name `⌜f⌝ : ⊤ → (f̄ ⊢ f̂)` of an arrow.
    pub fn name_arrow(&mut self, f: ExprId) -> Result<ExprId> {
        let src = self.source(f);
        let top = self.top();
        let p2 = self.proj2(top, src)?;
        let body = self.comp(f, p2)?;
        self.star(body)
    }

    fn to_arrow_in(&mut self, t: TermId, ctx: &[Var], dom: ExprId) -> Result<ExprId> {
        match self.term_node(t) {
            Term::Var(ty, depth) => {
                match self.lookup_var_arrow(ctx, dom, Var { ty, depth })? {
                    Some(a) => Ok(a),
                    None => Err(Error::NotABulletin(format!(
                        "variable {}·{} outside the readback context",
                        self.render(ty),
                        depth
                    ))),
                }
            }
            Term::StarT => self.terminal_to(dom),
            Term::NameOf(a) => {
                let n = self.name_arrow(a)?;
                let ter = self.terminal_to(dom)?;
                self.comp(n, ter)
            }
            Term::ConstT(k) => {
                let g = self.gen_expr(k)?;
                let ter = self.terminal_to(dom)?;
                self.comp(g, ter)
            }
            Term::Proj1T(u) => {
                let tu = self.ty(u);
                let Some((a, b)) = self.view_wedge(tu)? else {
                    return Err(Error::Internal("projection at non-wedge type"));
                };
                let p = self.proj1(a, b)?;
                let ua = self.to_arrow_in(u, ctx, dom)?;
                self.comp(p, ua)
            }
            Term::Proj2T(u) => {
                let tu = self.ty(u);
                let Some((a, b)) = self.view_wedge(tu)? else {
                    return Err(Error::Internal("projection at non-wedge type"));
                };
                let p = self.proj2(a, b)?;
                let ua = self.to_arrow_in(u, ctx, dom)?;
                self.comp(p, ua)
            }
            Term::PairT(u, v) => {
                let ua = self.to_arrow_in(u, ctx, dom)?;
                let va = self.to_arrow_in(v, ctx, dom)?;
                self.pair(ua, va)
            }
            Term::App(s, u) => {
                let ts = self.ty(s);
                let Some((a, b)) = self.view_ent_full(ts) else {
                    return Err(Error::Internal("application at non-ent type"));
                };
                let ev = self.eval(a, b)?;
                let sa = self.to_arrow_in(s, ctx, dom)?;
                let ua = self.to_arrow_in(u, ctx, dom)?;
                let p = self.pair(sa, ua)?;
                self.comp(ev, p)
            }
            Term::Lam(ty, depth, b) => {
                let x = Var { ty, depth };
                let mut ctx2: Vec<Var> = ctx.to_vec();
                // Shadowing: readback resolves the innermost binding, so a
                // duplicate variable is fine with rposition lookup.
                ctx2.push(x);
                let dom2 = self.wedge(dom, ty)?;
                let ba = self.to_arrow_in(b, &ctx2, dom2)?;
                self.star(ba)
            }
        }
    }

    /// `unname`: the unique type `A` with `s =_{x} ⌜A⌝ ≀ x`, for a term with
    /// exactly one free variable.
    pub fn unname(&mut self, calc: &LambdaCalculus, s: TermId) -> Result<ExprId> {
        let fv = self.free_vars(calc, s);
        if fv.len() != 1 {
            return Err(Error::NotABulletin(format!(
                "term has {} free variables",
                fv.len()
            )));
        }
        let x = fv[0];
        let n = self.normalize_term(s)?;
        self.term_to_arrow(n, &[x])
    }

    // ----- validity ---------------------------------------------------------

    /// Validity closure on terms (seeds, `*`, names of valid types, pairs,
    /// applications, lambdas, projections of valid terms, validating vars).
    pub fn term_is_valid(&mut self, calc: &LambdaCalculus, t: TermId) -> bool {
        if calc.valid_seeds.contains(&t) {
            return true;
        }
        match self.term_node(t) {
            Term::StarT => true,
            Term::Var(ty, depth) => calc.validating.contains(&Var { ty, depth }),
            Term::NameOf(a) => self.valid_seeds.contains(&a) || self.expr_is_valid_shallow(a),
            Term::ConstT(_) => true,
            Term::Proj1T(u) | Term::Proj2T(u) => self.term_is_valid(calc, u),
            Term::PairT(u, v) | Term::App(u, v) => {
                self.term_is_valid(calc, u) && self.term_is_valid(calc, v)
            }
            Term::Lam(_, _, b) => self.term_is_valid(calc, b),
        }
    }

    fn expr_is_valid_shallow(&self, a: ExprId) -> bool {
        matches!(
            self.node(a),
            Expr::Top | Expr::Id(_) | Expr::Proj1(..) | Expr::Proj2(..) | Expr::Eval(..)
        )
    }
}

/// A lambda-calculus morphism (translation): maps type generators and term
/// constants into a target world, extended homomorphically.
pub struct Translation {
    /// Type generator images (by source-world name).
    pub gen_map: BTreeMap<NameId, ExprId>,
    /// Term constant images.
    pub const_map: BTreeMap<NameId, NameId>,
}

impl Translation {
    pub fn apply_type(&self, src: &World, dst: &mut World, a: ExprId) -> Result<ExprId> {
        match src.node(a) {
            Expr::Gen(n) => match self.gen_map.get(&n) {
                Some(&img) => Ok(img),
                None => {
                    let id = dst
                        .lookup_name(src.name_str(n))
                        .ok_or_else(|| Error::UnknownName(src.name_str(n).to_string()))?;
                    dst.gen_expr(id)
                }
            },
            Expr::Indet(n) => {
                let id = dst
                    .lookup_name(src.name_str(n))
                    .ok_or_else(|| Error::UnknownIndeterminate(src.name_str(n).to_string()))?;
                dst.indet_expr(id)
            }
            Expr::Top => Ok(dst.top()),
            Expr::Id(x) => {
                let x = self.apply_type(src, dst, x)?;
                dst.id(x)
            }
            Expr::Comp(f, g) => {
                let f = self.apply_type(src, dst, f)?;
                let g = self.apply_type(src, dst, g)?;
                dst.comp(f, g)
            }
            Expr::Ent(x, y) => {
                let x = self.apply_type(src, dst, x)?;
                let y = self.apply_type(src, dst, y)?;
                dst.ent(x, y)
            }
            Expr::Wedge(f, g) => {
                let f = self.apply_type(src, dst, f)?;
                let g = self.apply_type(src, dst, g)?;
                dst.wedge(f, g)
            }
            Expr::Pair(f, g) => {
                let f = self.apply_type(src, dst, f)?;
                let g = self.apply_type(src, dst, g)?;
                dst.pair(f, g)
            }
            Expr::Star(f) => {
                let f = self.apply_type(src, dst, f)?;
                dst.star(f)
            }
            Expr::Proj1(x, y) => {
                let x = self.apply_type(src, dst, x)?;
                let y = self.apply_type(src, dst, y)?;
                dst.proj1(x, y)
            }
            Expr::Proj2(x, y) => {
                let x = self.apply_type(src, dst, x)?;
                let y = self.apply_type(src, dst, y)?;
                dst.proj2(x, y)
            }
            Expr::Eval(x, y) => {
                let x = self.apply_type(src, dst, x)?;
                let y = self.apply_type(src, dst, y)?;
                dst.eval(x, y)
            }
        }
    }

    pub fn apply_term(&self, src: &World, dst: &mut World, t: TermId) -> Result<TermId> {
        match src.term_node(t) {
            Term::Var(ty, depth) => {
                let ty = self.apply_type(src, dst, ty)?;
                dst.var_term(ty, depth)
            }
            Term::StarT => Ok(dst.star_term()),
            Term::NameOf(a) => {
                let a = self.apply_type(src, dst, a)?;
                dst.name_term(a)
            }
            Term::ConstT(k) => {
                let img = self.const_map.get(&k).copied().unwrap_or(k);
                dst.const_term(img)
            }
            Term::Proj1T(u) => {
                let u = self.apply_term(src, dst, u)?;
                dst.proj1_term(u)
            }
            Term::Proj2T(u) => {
                let u = self.apply_term(src, dst, u)?;
                dst.proj2_term(u)
            }
            Term::PairT(u, v) => {
                let u = self.apply_term(src, dst, u)?;
                let v = self.apply_term(src, dst, v)?;
                dst.pair_term(u, v)
            }
            Term::App(u, v) => {
                let u = self.apply_term(src, dst, u)?;
                let v = self.apply_term(src, dst, v)?;
                dst.app_term(u, v)
            }
            Term::Lam(ty, depth, b) => {
                let ty = self.apply_type(src, dst, ty)?;
                let b = self.apply_term(src, dst, b)?;
                dst.lam_term(Var { ty, depth }, b)
            }
        }
    }
}
